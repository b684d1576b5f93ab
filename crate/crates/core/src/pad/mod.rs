//! Presentation-attack detection from per-region pulse features.

mod cv;
mod svm;

pub use cv::{subject_folds, subject_split, svm_train, video_verdict, Confusion, CvReport, FoldReport};
pub use svm::{Kernel, Scaler, SmoStats, SvmModel, SvmParams};

use alloc::string::String;
use alloc::vec::Vec;

use crate::exec::Executor;
use crate::imaging::FrameSequence;
use crate::scales::{analyze_regions, LandmarkInput, MetricsTimeline, Preprocess, RegionAnalysis, RegionName};
use crate::signal::AnalysisConfig;
use crate::{Error, Result};

pub const LABEL_GENUINE: u8 = 0;
pub const LABEL_ATTACK: u8 = 1;

/// One (region, window) row of the feature table.
#[derive(Debug, Clone, PartialEq)]
pub struct PadSample {
    pub subject_id: String,
    pub region: RegionName,
    pub window_index: usize,
    /// `(snr_db, magnitude, rho_ref)`.
    pub features: [f64; 3],
    pub label: u8,
}

/// Region with the highest mean window SNR; ties keep the earlier region.
/// Regions without windows are skipped.
pub fn select_reference_region(regions: &[(RegionName, MetricsTimeline)]) -> Result<RegionName> {
    let mut best: Option<(RegionName, f64)> = None;
    for (name, tl) in regions.iter().filter(|(_, tl)| !tl.is_empty()) {
        let m = tl.mean_snr_db();
        if best.is_none_or(|(_, b)| m > b) {
            best = Some((*name, m));
        }
    }
    best.map(|(n, _)| n).ok_or(Error::NoRegions)
}

/// Feature rows of an existing region analysis. A window whose correlation is
/// undefined (flat pulse) contributes `rho_ref = 0`.
pub fn features_from_analysis(analysis: &RegionAnalysis, label: u8, subject_id: &str) -> Vec<PadSample> {
    let mut out = Vec::new();
    for (name, tl) in &analysis.regions {
        for (w, e) in tl.entries.iter().enumerate() {
            out.push(PadSample {
                subject_id: subject_id.into(),
                region: *name,
                window_index: w,
                features: [e.snr_db, e.magnitude, e.rho_ref.unwrap_or(0.0)],
                label,
            });
        }
    }
    out
}

/// Runs the region analysis and flattens it into one sample per region and window.
pub fn extract_feature_table<E: Executor>(
    seq: &FrameSequence,
    landmarks: &LandmarkInput,
    cfg: &AnalysisConfig,
    label: u8,
    subject_id: &str,
    pre: Preprocess,
    exec: &E,
) -> Result<Vec<PadSample>> {
    let analysis = analyze_regions(seq, landmarks, cfg, pre, exec)?;
    Ok(features_from_analysis(&analysis, label, subject_id))
}

#[cfg(test)]
mod tests;

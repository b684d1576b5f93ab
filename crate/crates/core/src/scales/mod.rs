//! The three analysis scales: global ROI averages, landmark-based facial
//! regions and per-pixel maps at a pyramid level.

mod event;
mod global;
mod local;
mod maps;
mod regions;

pub use event::{detect_reperfusion, normalize_min_max, ReperfusionEvent};
pub use global::{analyze_global, extract_traces, GlobalAnalysis, Preprocess};
pub use local::{analyze_local, analyze_local_level, LocalOptions};
pub use maps::{PerfusionMapSet, ValueMap};
pub use regions::{
    analyze_regions, frontal_landmarks, rasterize_polygon, region_masks, regions_from_landmarks,
    polygon_area, LandmarkInput, LandmarkSet, RegionAnalysis, RegionName, RegionSpec, REGION_TABLE,
};

use alloc::vec::Vec;

use crate::signal::{
    effective_band, estimate_hr, filtfilt, normalize_trace, pearson_corr, perfusion_index,
    pos_project, snr_and_magnitude, AnalysisConfig, RgbTrace, Sos, SpectrumAnalyzer,
    WindowMetrics,
};
use crate::{Error, Result};

/// Per-window metrics of one signal source, in window order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsTimeline {
    pub entries: Vec<WindowMetrics>,
}

impl MetricsTimeline {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mean_snr_db(&self) -> f64 {
        self.entries.iter().map(|e| e.snr_db).sum::<f64>() / self.entries.len() as f64
    }

    pub fn bpm(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.bpm).collect()
    }

    pub fn pi(&self) -> Vec<Option<f64>> {
        self.entries.iter().map(|e| e.pi).collect()
    }

    pub fn rho_ref(&self) -> Vec<Option<f64>> {
        self.entries.iter().map(|e| e.rho_ref).collect()
    }
}

/// Sample offsets of the full sliding windows over `n` samples; a trailing
/// partial window is dropped.
pub fn window_starts(n: usize, fs: f64, cfg: &AnalysisConfig) -> Vec<usize> {
    let (win, step) = (cfg.window_samples(fs), cfg.step_samples(fs));
    if win == 0 || n < win {
        return Vec::new();
    }
    (0..=(n - win) / step).map(|k| k * step).collect()
}

pub(crate) fn check_duration(frames: usize, fs: f64, cfg: &AnalysisConfig) -> Result<()> {
    let win = cfg.window_samples(fs);
    if frames < win.max(1) || window_starts(frames, fs, cfg).is_empty() {
        return Err(Error::TooShortRecording {
            needed: cfg.t_win,
            got: frames as f64 / fs,
        });
    }
    Ok(())
}

/// Pulse extraction and spectral analysis for windows of one fixed length,
/// with the filter and FFT plan built once.
#[derive(Debug, Clone)]
pub struct WindowAnalyzer {
    cfg: AnalysisConfig,
    fs: f64,
    sos: Sos,
    spectrum: SpectrumAnalyzer,
}

/// Filtered pulse of one window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowPulse {
    pub samples: Vec<f64>,
    pub degenerate: bool,
}

impl WindowAnalyzer {
    pub fn new(cfg: &AnalysisConfig, fs: f64) -> Result<Self> {
        cfg.validate()?;
        let (f1, f2) = effective_band(cfg, fs)?;
        let cfg = AnalysisConfig {
            f1,
            f2,
            ..cfg.clone()
        };
        let win = cfg.window_samples(fs);
        let needed = 3 * cfg.filter_order + 1;
        if win < needed {
            return Err(Error::TooShort { needed, got: win });
        }
        Ok(Self {
            sos: Sos::butter_bandpass(cfg.filter_order, f1, f2, fs)?,
            spectrum: SpectrumAnalyzer::new(win, fs, &cfg)?,
            cfg,
            fs,
        })
    }

    /// Configuration with the band edges actually in use.
    pub fn config(&self) -> &AnalysisConfig {
        &self.cfg
    }

    pub fn window_len(&self) -> usize {
        self.spectrum.signal_len()
    }

    /// Normalize, project and band-pass one raw window.
    pub fn pulse(&self, raw: &RgbTrace) -> Result<WindowPulse> {
        let norm = normalize_trace(raw)?;
        let proj = pos_project(&norm);
        Ok(WindowPulse {
            samples: filtfilt(&self.sos, proj.pulse.as_slice()),
            degenerate: proj.degenerate,
        })
    }

    /// Heart rate, SNR and magnitude of a filtered pulse. With `f_hr` given the
    /// SNR mask is centred there instead of on the window's own estimate; the
    /// reported rate is always the window's own.
    pub fn spectral(&self, pulse: &[f64], f_hr: Option<f64>) -> Result<(f64, f64, f64)> {
        let spec = self.spectrum.analyze(pulse)?;
        let own = estimate_hr(&spec, &self.cfg)?;
        let centre = f_hr.unwrap_or(own);
        let (snr, mag) = snr_and_magnitude(&spec, centre, &self.cfg)?;
        Ok((own, snr.snr_db, mag))
    }

    /// Heart frequency of a filtered pulse.
    pub fn heart_rate(&self, pulse: &[f64]) -> Result<f64> {
        estimate_hr(&self.spectrum.analyze(pulse)?, &self.cfg)
    }

    /// Full metrics record of one window.
    pub fn metrics(
        &self,
        t_start: f64,
        raw: &RgbTrace,
        pulse: &[f64],
        reference: Option<&[f64]>,
    ) -> Result<WindowMetrics> {
        let (f_hr, snr_db, magnitude) = self.spectral(pulse, None)?;
        let pi = perfusion_index(&raw.g, self.fs, &self.cfg)?;
        Ok(WindowMetrics {
            t_start,
            f_hr,
            bpm: 60.0 * f_hr,
            snr_db,
            magnitude,
            pi: Some(pi),
            rho_ref: reference.and_then(|r| correlation(pulse, r)),
        })
    }
}

/// Pearson correlation, absent when either side is flat.
pub(crate) fn correlation(a: &[f64], b: &[f64]) -> Option<f64> {
    match pearson_corr(a, b) {
        Ok(r) => Some(r),
        Err(_) => None,
    }
}

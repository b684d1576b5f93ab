use alloc::vec::Vec;

use super::{check_duration, window_starts, MetricsTimeline, WindowAnalyzer};
use crate::exec::Executor;
use crate::imaging::{
    mean_rgb_over_mask, register_translation, shift_image, skin_segment, FrameSequence, Registration,
    RgbImage, RoiMask,
};
use crate::signal::{reference_from_hr, AnalysisConfig, RgbTrace};
use crate::{Error, Result};

/// Optional per-frame steps before averaging, applied in the order
/// register, then segment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Preprocess {
    /// Translation-only motion compensation against the first frame, searched
    /// within the first mask's bounding box.
    pub register: bool,
    /// Intersect every mask with the frame's YCbCr skin mask.
    pub skin_seg: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalAnalysis {
    pub roi: MetricsTimeline,
    /// Present when a reference region was supplied.
    pub reference: Option<MetricsTimeline>,
    /// One entry per frame when registration ran.
    pub registrations: Vec<Registration>,
}

/// Channel means of every mask in one frame after the optional
/// preprocessing steps. Registration aligns `frame` onto `first` using
/// `search` as the search mask.
pub(crate) fn frame_means(
    first: &RgbImage,
    frame: &RgbImage,
    masks: &[&RoiMask],
    search: Option<&RoiMask>,
    pre: Preprocess,
) -> Result<(Vec<[f64; 3]>, Option<Registration>)> {
    let mut reg = None;
    let aligned;
    let frame = match search {
        Some(search) if pre.register => {
            let r = register_translation(first, frame, search)?;
            reg = Some(r);
            if r.dx != 0 || r.dy != 0 {
                aligned = shift_image(frame, r.dx, r.dy);
                &aligned
            } else {
                frame
            }
        }
        _ => frame,
    };
    let skin = pre.skin_seg.then(|| skin_segment(frame));
    let means = masks
        .iter()
        .map(|m| match &skin {
            Some(s) => mean_rgb_over_mask(frame, &m.and(s)?),
            None => mean_rgb_over_mask(frame, m),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((means, reg))
}

/// Regroups per-frame channel means into one trace per mask.
pub(crate) fn collect_traces(
    per_frame: Vec<Result<(Vec<[f64; 3]>, Option<Registration>)>>,
    n_masks: usize,
    fs: f64,
) -> Result<(Vec<RgbTrace>, Vec<Registration>)> {
    let mut samples: Vec<Vec<[f64; 3]>> = (0..n_masks).map(|_| Vec::with_capacity(per_frame.len())).collect();
    let mut regs = Vec::new();
    for item in per_frame {
        let (means, reg) = item?;
        for (s, m) in samples.iter_mut().zip(means) {
            s.push(m);
        }
        regs.extend(reg);
    }
    let traces = samples
        .iter()
        .map(|s| RgbTrace::from_samples(s, fs))
        .collect::<Result<Vec<_>>>()?;
    Ok((traces, regs))
}

/// Mean RGB traces of every mask, one trace per mask. Registration searches
/// within the first mask.
pub fn extract_traces<E: Executor>(
    seq: &FrameSequence,
    masks: &[&RoiMask],
    pre: Preprocess,
    exec: &E,
) -> Result<(Vec<RgbTrace>, Vec<Registration>)> {
    for m in masks {
        m.check_dims((seq.width, seq.height))?;
    }
    let first = &seq.frames[0];
    let search = masks.first().copied();
    let per_frame = exec.map(seq.len(), |i| frame_means(first, &seq.frames[i], masks, search, pre));
    collect_traces(per_frame, masks.len(), seq.fs)
}

/// Sliding-window metrics of the ROI average, correlated against a reference
/// region or, failing that, a sine at `external_hr` Hz.
pub fn analyze_global<E: Executor>(
    seq: &FrameSequence,
    roi: &RoiMask,
    reference: Option<&RoiMask>,
    cfg: &AnalysisConfig,
    external_hr: Option<f64>,
    pre: Preprocess,
    exec: &E,
) -> Result<GlobalAnalysis> {
    cfg.validate()?;
    if reference.is_none() && external_hr.is_none() {
        return Err(Error::MissingReference);
    }
    for m in core::iter::once(roi).chain(reference) {
        m.check_dims((seq.width, seq.height))?;
        if m.count() == 0 {
            return Err(Error::EmptyMask);
        }
    }
    check_duration(seq.len(), seq.fs, cfg)?;
    let wa = WindowAnalyzer::new(cfg, seq.fs)?;
    let win = wa.window_len();
    let sine = match (reference, external_hr) {
        (None, Some(hr)) => Some(reference_from_hr(hr, seq.fs, cfg.t_win)?.samples),
        _ => None,
    };

    let mut masks = alloc::vec![roi];
    masks.extend(reference);
    let (traces, registrations) = extract_traces(seq, &masks, pre, exec)?;
    let starts = window_starts(seq.len(), seq.fs, cfg);

    let rows = exec.map(starts.len(), |w| -> Result<_> {
        let s = starts[w];
        let t_start = s as f64 / seq.fs;
        let roi_raw = traces[0].slice(s..s + win);
        let roi_pulse = wa.pulse(&roi_raw)?;
        match traces.get(1) {
            Some(ref_trace) => {
                let ref_raw = ref_trace.slice(s..s + win);
                let ref_pulse = wa.pulse(&ref_raw)?;
                let roi_m = wa.metrics(t_start, &roi_raw, &roi_pulse.samples, Some(&ref_pulse.samples))?;
                let ref_m = wa.metrics(t_start, &ref_raw, &ref_pulse.samples, Some(&ref_pulse.samples))?;
                Ok((roi_m, Some(ref_m)))
            }
            None => {
                let roi_m = wa.metrics(t_start, &roi_raw, &roi_pulse.samples, sine.as_deref())?;
                Ok((roi_m, None))
            }
        }
    });
    let mut roi_tl = MetricsTimeline::default();
    let mut ref_tl = reference.map(|_| MetricsTimeline::default());
    for row in rows {
        let (a, b) = row?;
        roi_tl.entries.push(a);
        if let (Some(tl), Some(m)) = (ref_tl.as_mut(), b) {
            tl.entries.push(m);
        }
    }
    Ok(GlobalAnalysis {
        roi: roi_tl,
        reference: ref_tl,
        registrations,
    })
}

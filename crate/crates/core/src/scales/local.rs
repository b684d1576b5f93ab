use alloc::vec::Vec;

use super::{check_duration, correlation, window_starts, PerfusionMapSet, ValueMap, WindowAnalyzer};
use crate::exec::Executor;
use crate::imaging::{
    mean_rgb_over_mask, pyramid_frame, pyramid_level_for, FloatImage, FloatSequence, FrameSequence,
    PyramidLevel, RoiMask,
};
use crate::signal::{reference_from_hr, AnalysisConfig, RgbTrace};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalOptions {
    /// Pixel count the pyramid level should approach.
    pub target_px: usize,
}

impl Default for LocalOptions {
    fn default() -> Self {
        Self { target_px: 10_000 }
    }
}

/// Per-pixel maps for every sliding window, computed at the pyramid level
/// closest to `opts.target_px`. `reference` is given at full resolution.
pub fn analyze_local<E: Executor>(
    seq: &FrameSequence,
    reference: Option<&RoiMask>,
    external_hr: Option<f64>,
    cfg: &AnalysisConfig,
    opts: LocalOptions,
    exec: &E,
) -> Result<(Vec<PerfusionMapSet>, PyramidLevel)> {
    cfg.validate()?;
    if reference.is_none() && external_hr.is_none() {
        return Err(Error::MissingReference);
    }
    if let Some(r) = reference {
        r.check_dims((seq.width, seq.height))?;
    }
    check_duration(seq.len(), seq.fs, cfg)?;
    let lvl = pyramid_level_for(seq.width, seq.height, opts.target_px)?;
    let frames = exec.map(seq.len(), |i| {
        pyramid_frame(&FloatImage::from_rgb(&seq.frames[i]), lvl.level)
    });
    let small = FloatSequence {
        width: lvl.width,
        height: lvl.height,
        fs: seq.fs,
        frames,
    };
    let ref_small = reference.map(|r| r.resample(lvl.width, lvl.height));
    let maps = analyze_local_level(&small, ref_small.as_ref(), external_hr, cfg, exec)?;
    Ok((maps, lvl))
}

/// Per-pixel maps of an already downscaled sequence; `reference` must match
/// its dimensions.
pub fn analyze_local_level<E: Executor>(
    seq: &FloatSequence,
    reference: Option<&RoiMask>,
    external_hr: Option<f64>,
    cfg: &AnalysisConfig,
    exec: &E,
) -> Result<Vec<PerfusionMapSet>> {
    cfg.validate()?;
    if seq.is_empty() {
        return Err(Error::TooShortRecording {
            needed: cfg.t_win,
            got: 0.0,
        });
    }
    check_duration(seq.len(), seq.fs, cfg)?;
    let (w, h) = (seq.width, seq.height);
    let ref_trace = match (reference, external_hr) {
        (Some(m), _) => {
            m.check_dims((w, h))?;
            if m.count() == 0 {
                return Err(Error::EmptyMask);
            }
            let s = seq
                .frames
                .iter()
                .map(|f| mean_rgb_over_mask(f, m))
                .collect::<Result<Vec<_>>>()?;
            Some(RgbTrace::from_samples(&s, seq.fs)?)
        }
        (None, Some(_)) => None,
        (None, None) => return Err(Error::MissingReference),
    };
    let wa = WindowAnalyzer::new(cfg, seq.fs)?;
    let win = wa.window_len();
    let sine = match external_hr {
        Some(hr) if ref_trace.is_none() => Some(reference_from_hr(hr, seq.fs, cfg.t_win)?.samples),
        _ => None,
    };

    let mut out = Vec::new();
    for s in window_starts(seq.len(), seq.fs, cfg) {
        let (ref_pulse, f_hr) = match (&ref_trace, &sine) {
            (Some(tr), _) => {
                let p = wa.pulse(&tr.slice(s..s + win))?.samples;
                let f = wa.heart_rate(&p)?;
                (p, f)
            }
            (None, Some(sine)) => (sine.clone(), external_hr.unwrap_or_default()),
            (None, None) => unreachable!("reference presence checked above"),
        };
        let frames = &seq.frames[s..s + win];
        let cells = exec.map(w * h, |p| -> Option<[f64; 4]> {
            let mut rgb = [Vec::with_capacity(win), Vec::with_capacity(win), Vec::with_capacity(win)];
            for f in frames {
                for (c, ch) in rgb.iter_mut().enumerate() {
                    ch.push(f.data[3 * p + c] as f64);
                }
            }
            let [r, g, b] = rgb;
            let raw = RgbTrace::new(r, g, b, seq.fs).ok()?;
            let pulse = wa.pulse(&raw).ok()?;
            let rho = correlation(&pulse.samples, &ref_pulse)?;
            let (own, snr, mag) = wa.spectral(&pulse.samples, Some(f_hr)).ok()?;
            Some([mag, snr, rho, 60.0 * own])
        });
        let pick = |k: usize| ValueMap::from_options(w, h, cells.iter().map(|c| c.map(|v| v[k])));
        out.push(PerfusionMapSet {
            width: w,
            height: h,
            t_start: s as f64 / seq.fs,
            f_hr_global: f_hr,
            magnitude: pick(0),
            snr_db: pick(1),
            rho_ref: pick(2),
            bpm: pick(3),
        });
    }
    Ok(out)
}

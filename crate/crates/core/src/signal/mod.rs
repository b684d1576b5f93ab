//! One-dimensional pulse-signal mathematics: trace normalization, the
//! plane-orthogonal-to-skin projection, Butterworth filtering, spectral
//! analysis and the perfusion parameters derived from it.

mod filter;
mod metrics;
mod pos;
mod spectrum;
mod trace;

pub use filter::{bandpass_filter, effective_band, filtfilt, lowpass_filter, Biquad, Sos};
pub use metrics::{
    estimate_hr, estimate_hr_bin, pearson_corr, perfusion_index, pi_cutoff, reference_from_hr,
    snr_and_magnitude, SnrBreakdown,
};
pub use pos::{pos_project, PosPlanes, PosProjection};
pub use spectrum::{spectrum, spectrum_len, Spectrum, SpectrumAnalyzer};
pub use trace::{normalize_trace, RgbTrace};

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A one-dimensional pulse signal sampled at `fs` Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct RppgSignal {
    pub samples: Vec<f64>,
    pub fs: f64,
}

impl RppgSignal {
    pub fn new(samples: Vec<f64>, fs: f64) -> Self {
        Self { samples, fs }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.samples
    }
}

/// Taper applied to each analysis window before the FFT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum WindowFunction {
    #[default]
    Hann,
    Rectangular,
}

/// Parameters shared by every analysis scale.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct AnalysisConfig {
    /// Sliding window length in seconds.
    pub t_win: f64,
    /// Sliding window step in seconds.
    pub t_step: f64,
    /// Lower edge of the heart-rate band in Hz.
    pub f1: f64,
    /// Upper edge of the heart-rate band in Hz.
    pub f2: f64,
    /// Half width of the signal mask around `f_hr` and `2 f_hr` in Hz (3 BPM).
    pub hr_tolerance: f64,
    /// Preferred low-pass cutoff for the perfusion index in Hz.
    pub pi_cutoff: f64,
    /// Butterworth prototype order.
    pub filter_order: usize,
    /// Largest acceptable spectral bin spacing in Hz.
    pub min_delta_f: f64,
    pub window: WindowFunction,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            t_win: 10.0,
            t_step: 1.0,
            f1: 0.6,
            f2: 4.0,
            hr_tolerance: 0.05,
            pi_cutoff: 20.0,
            filter_order: 5,
            min_delta_f: 1.0 / 60.0,
            window: WindowFunction::Hann,
        }
    }
}

impl AnalysisConfig {
    /// Checks the sampling-rate independent invariants.
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.t_win) || !positive(self.t_step) {
            return Err(Error::InvalidConfig(format!(
                "t_win ({}) and t_step ({}) must be positive",
                self.t_win, self.t_step
            )));
        }
        if self.t_step > self.t_win {
            return Err(Error::InvalidConfig(format!(
                "t_step ({}) exceeds t_win ({})",
                self.t_step, self.t_win
            )));
        }
        if !positive(self.f1) || !(self.f2 > self.f1) || !self.f2.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "band must satisfy 0 < f1 < f2, got [{}, {}]",
                self.f1, self.f2
            )));
        }
        if !positive(self.hr_tolerance) {
            return Err(Error::InvalidConfig("hr_tolerance must be positive".into()));
        }
        if !positive(self.pi_cutoff) || !positive(self.min_delta_f) {
            return Err(Error::InvalidConfig(
                "pi_cutoff and min_delta_f must be positive".into(),
            ));
        }
        if self.filter_order == 0 || self.filter_order > 12 {
            return Err(Error::InvalidConfig(format!(
                "filter_order must be in 1..=12, got {}",
                self.filter_order
            )));
        }
        Ok(())
    }

    /// Window length in samples at `fs`.
    pub fn window_samples(&self, fs: f64) -> usize {
        libm_round(self.t_win * fs)
    }

    /// Step length in samples at `fs` (at least one).
    pub fn step_samples(&self, fs: f64) -> usize {
        libm_round(self.t_step * fs).max(1)
    }
}

fn libm_round(v: f64) -> usize {
    #[allow(unused_imports)]
    use num_traits::Float;
    v.round().max(0.0) as usize
}

/// Metrics of one sliding window.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WindowMetrics {
    pub t_start: f64,
    pub f_hr: f64,
    pub bpm: f64,
    pub snr_db: f64,
    pub magnitude: f64,
    pub pi: Option<f64>,
    pub rho_ref: Option<f64>,
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Population standard deviation.
pub(crate) fn std_dev(x: &[f64]) -> f64 {
    #[allow(unused_imports)]
    use num_traits::Float;
    let m = mean(x);
    (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64).sqrt()
}

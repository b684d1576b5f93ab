use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{AnalysisConfig, RppgSignal, WindowFunction};
use crate::fft::Radix2Fft;
use crate::{Error, Result};

/// One-sided magnitude spectrum `M(k)`, `k = 0..=n_fft/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub magnitudes: Vec<f64>,
    pub delta_f: f64,
    pub n_fft: usize,
    pub fs: f64,
}

impl Spectrum {
    pub fn frequency(&self, bin: usize) -> f64 {
        self.delta_f * bin as f64
    }

    /// Nearest bin to `freq`, if it is representable.
    pub fn bin_of(&self, freq: f64) -> Option<usize> {
        if !(freq >= 0.0) {
            return None;
        }
        let k = (freq / self.delta_f).round() as usize;
        (k < self.magnitudes.len()).then_some(k)
    }

    /// Inclusive bin range whose frequencies fall inside `[f1, f2]`.
    pub fn band_bins(&self, f1: f64, f2: f64) -> core::ops::RangeInclusive<usize> {
        let lo = (f1 / self.delta_f).ceil().max(0.0) as usize;
        let hi = ((f2 / self.delta_f).floor() as usize).min(self.magnitudes.len() - 1);
        lo..=hi
    }
}

/// Smallest power-of-two FFT length that holds `len` samples and reaches a bin
/// spacing of at most `min_delta_f`.
pub fn spectrum_len(len: usize, fs: f64, min_delta_f: f64) -> usize {
    let mut n = len.max(2).next_power_of_two();
    while fs / n as f64 > min_delta_f {
        n *= 2;
    }
    n
}

/// Reusable windowed, zero-padded FFT for signals of one fixed length.
#[derive(Debug, Clone)]
pub struct SpectrumAnalyzer {
    fs: f64,
    window: Vec<f64>,
    fft: Radix2Fft,
}

impl SpectrumAnalyzer {
    pub fn new(len: usize, fs: f64, cfg: &AnalysisConfig) -> Result<Self> {
        if len < 2 {
            return Err(Error::TooShort { needed: 2, got: len });
        }
        let n_fft = spectrum_len(len, fs, cfg.min_delta_f);
        let window = match cfg.window {
            WindowFunction::Hann => (0..len)
                .map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / (len - 1) as f64).cos())
                .collect(),
            WindowFunction::Rectangular => alloc::vec![1.0; len],
        };
        Ok(Self {
            fs,
            window,
            fft: Radix2Fft::new(n_fft),
        })
    }

    pub fn n_fft(&self) -> usize {
        self.fft.len()
    }

    pub fn signal_len(&self) -> usize {
        self.window.len()
    }

    /// The tapered samples that enter the transform.
    pub fn windowed(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.window).map(|(v, w)| v * w).collect()
    }

    pub fn analyze(&self, x: &[f64]) -> Result<Spectrum> {
        if x.len() != self.window.len() {
            return Err(Error::LengthMismatch(x.len(), self.window.len()));
        }
        let n_fft = self.fft.len();
        let mut buf = alloc::vec![Complex64::new(0.0, 0.0); n_fft];
        for ((slot, v), w) in buf.iter_mut().zip(x).zip(&self.window) {
            *slot = Complex64::new(v * w, 0.0);
        }
        self.fft.forward(&mut buf);
        Ok(Spectrum {
            magnitudes: buf[..=n_fft / 2].iter().map(|c| c.norm()).collect(),
            delta_f: self.fs / n_fft as f64,
            n_fft,
            fs: self.fs,
        })
    }
}

/// Windowed, zero-padded magnitude spectrum of `signal`.
pub fn spectrum(signal: &RppgSignal, cfg: &AnalysisConfig) -> Result<Spectrum> {
    SpectrumAnalyzer::new(signal.len(), signal.fs, cfg)?.analyze(&signal.samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sine(freq: f64, fs: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| (2.0 * PI * freq * i as f64 / fs).sin()).collect()
    }

    #[test]
    fn padding_rule_at_30_hz() {
        let s = spectrum(&RppgSignal::new(sine(1.0, 30.0, 300), 30.0), &AnalysisConfig::default())
            .unwrap();
        assert_eq!(s.n_fft, 2048);
        assert!((s.delta_f - 30.0 / 2048.0).abs() < 1e-15);
        assert_eq!(s.magnitudes.len(), 1025);
    }

    #[test]
    fn long_signals_are_not_truncated() {
        assert_eq!(spectrum_len(3000, 30.0, 1.0 / 60.0), 4096);
    }

    #[test]
    fn unpadded_rectangular_constant_is_a_dc_line() {
        // A 2048-sample record at 30 Hz needs no padding; without a taper a
        // constant has energy only in bin 0.
        let cfg = AnalysisConfig {
            window: WindowFunction::Rectangular,
            ..AnalysisConfig::default()
        };
        let s = spectrum(&RppgSignal::new(alloc::vec![2.5; 2048], 30.0), &cfg).unwrap();
        assert_eq!(s.n_fft, 2048);
        let dc = s.magnitudes[0];
        assert!(s.magnitudes[1..].iter().all(|m| *m < 1e-9 * dc));
    }

    #[test]
    fn tone_peak_is_at_its_frequency() {
        let s = spectrum(&RppgSignal::new(sine(1.2, 30.0, 300), 30.0), &AnalysisConfig::default())
            .unwrap();
        let (k, _) = s
            .magnitudes
            .iter()
            .enumerate()
            .fold((0, 0.0), |best, (k, &m)| if m > best.1 { (k, m) } else { best });
        assert!((s.frequency(k) - 1.2).abs() <= s.delta_f);
    }

    #[test]
    fn too_short_is_rejected() {
        assert!(matches!(
            spectrum(&RppgSignal::new(alloc::vec![1.0], 30.0), &AnalysisConfig::default()),
            Err(Error::TooShort { .. })
        ));
    }

    proptest! {
        #[test]
        fn parseval_holds(x in proptest::collection::vec(-5.0f64..5.0, 2..400)) {
            let cfg = AnalysisConfig::default();
            let an = SpectrumAnalyzer::new(x.len(), 30.0, &cfg).unwrap();
            let s = an.analyze(&x).unwrap();
            let time: f64 = an.windowed(&x).iter().map(|v| v * v).sum();
            let n = s.n_fft;
            let m = &s.magnitudes;
            let full: f64 = m[0] * m[0]
                + m[n / 2] * m[n / 2]
                + 2.0 * m[1..n / 2].iter().map(|v| v * v).sum::<f64>();
            prop_assert!((time - full / n as f64).abs() <= 1e-6 * time.max(1e-12));
        }
    }
}

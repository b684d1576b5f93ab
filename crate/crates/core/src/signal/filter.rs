//! Butterworth IIR design (bilinear transform, second-order sections) and
//! zero-phase forward-backward application.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{AnalysisConfig, RppgSignal};
use crate::{Error, Result};

/// One second-order section, `a[0] == 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 3],
}

impl Biquad {
    fn dc_gain(&self) -> f64 {
        (self.b[0] + self.b[1] + self.b[2]) / (1.0 + self.a[1] + self.a[2])
    }

    /// Transposed direct-form II state reached after a long constant unit input.
    fn steady_state(&self) -> [f64; 2] {
        let h = self.dc_gain();
        let z2 = self.b[2] - self.a[2] * h;
        [h - self.b[0], z2]
    }
}

/// Cascade of second-order sections.
#[derive(Debug, Clone, PartialEq)]
pub struct Sos {
    pub sections: Vec<Biquad>,
}

impl Sos {
    /// Digital Butterworth low-pass of the given prototype order.
    pub fn butter_lowpass(order: usize, cutoff: f64, fs: f64) -> Result<Self> {
        check_frequency(cutoff, fs)?;
        let fs2 = 2.0 * fs;
        let wc = fs2 * (PI * cutoff / fs).tan();
        let poles: Vec<Complex64> = prototype_poles(order).into_iter().map(|p| p * wc).collect();
        let gain = wc.powi(order as i32);
        let zeros_at_minus_one = order;
        Ok(bilinear_to_sos(&poles, gain, &[], zeros_at_minus_one, fs))
    }

    /// Digital Butterworth band-pass; the resulting filter has order `2 * order`.
    pub fn butter_bandpass(order: usize, f1: f64, f2: f64, fs: f64) -> Result<Self> {
        check_frequency(f2, fs)?;
        if !(f1 > 0.0 && f1 < f2) {
            return Err(Error::InvalidConfig(alloc::format!(
                "band-pass edges must satisfy 0 < f1 < f2, got [{f1}, {f2}]"
            )));
        }
        let fs2 = 2.0 * fs;
        let w1 = fs2 * (PI * f1 / fs).tan();
        let w2 = fs2 * (PI * f2 / fs).tan();
        let bw = w2 - w1;
        let w0_sq = Complex64::new(w1 * w2, 0.0);
        let mut poles = Vec::with_capacity(2 * order);
        for p in prototype_poles(order) {
            let half = p * (bw / 2.0);
            let root = (half * half - w0_sq).sqrt();
            poles.push(half + root);
            poles.push(half - root);
        }
        let gain = bw.powi(order as i32);
        // `order` analog zeros at s = 0, the remaining degree maps to z = -1.
        let zeros = alloc::vec![Complex64::new(0.0, 0.0); order];
        Ok(bilinear_to_sos(&poles, gain, &zeros, order, fs))
    }

    /// Magnitude of the frequency response at `freq` Hz.
    pub fn magnitude_at(&self, freq: f64, fs: f64) -> f64 {
        let w = 2.0 * PI * freq / fs;
        let z1 = Complex64::new(w.cos(), -w.sin());
        let z2 = z1 * z1;
        self.sections
            .iter()
            .map(|s| {
                let num = z2 * s.b[2] + z1 * s.b[1] + s.b[0];
                let den = z2 * s.a[2] + z1 * s.a[1] + s.a[0];
                (num / den).norm()
            })
            .product()
    }

    /// Causal filtering starting from the supplied per-section states.
    fn filter_with_state(&self, x: &mut [f64], mut state: Vec<[f64; 2]>) {
        for (s, z) in self.sections.iter().zip(state.iter_mut()) {
            for v in x.iter_mut() {
                let input = *v;
                let y = s.b[0] * input + z[0];
                z[0] = s.b[1] * input - s.a[1] * y + z[1];
                z[1] = s.b[2] * input - s.a[2] * y;
                *v = y;
            }
        }
    }

    /// Initial states matching a constant input of one.
    fn initial_state(&self) -> Vec<[f64; 2]> {
        let mut scale = 1.0;
        self.sections
            .iter()
            .map(|s| {
                let [z1, z2] = s.steady_state();
                let out = [z1 * scale, z2 * scale];
                scale *= s.dc_gain();
                out
            })
            .collect()
    }

    /// Edge extension length used by [`filtfilt`].
    fn pad_len(&self) -> usize {
        let trailing_b = self.sections.iter().filter(|s| s.b[2] == 0.0).count();
        let trailing_a = self.sections.iter().filter(|s| s.a[2] == 0.0).count();
        3 * (2 * self.sections.len() + 1 - trailing_b.min(trailing_a))
    }
}

fn check_frequency(freq: f64, fs: f64) -> Result<()> {
    if !(freq > 0.0 && freq < fs / 2.0) {
        return Err(Error::NyquistViolation {
            freq,
            nyquist: fs / 2.0,
        });
    }
    Ok(())
}

/// Left half-plane poles of the unit-cutoff analog Butterworth prototype.
fn prototype_poles(order: usize) -> Vec<Complex64> {
    let n = order as f64;
    (0..order)
        .map(|k| {
            let theta = PI * (2.0 * k as f64 + n + 1.0) / (2.0 * n);
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect()
}

/// Maps analog zeros/poles through the bilinear transform and groups them into
/// second-order sections. `extra_minus_one` digital zeros at `z = -1` account
/// for the excess of analog poles over zeros.
fn bilinear_to_sos(
    analog_poles: &[Complex64],
    analog_gain: f64,
    analog_zeros: &[Complex64],
    extra_minus_one: usize,
    fs: f64,
) -> Sos {
    let fs2 = Complex64::new(2.0 * fs, 0.0);
    let map = |s: Complex64| (fs2 + s) / (fs2 - s);
    let num: Complex64 = analog_zeros.iter().map(|z| fs2 - z).product();
    let den: Complex64 = analog_poles.iter().map(|p| fs2 - p).product();
    let gain = analog_gain * (num / den).re;

    // Interleave so each band-pass section gets one zero at z = 1 and one at z = -1.
    let mapped: Vec<f64> = analog_zeros.iter().map(|z| map(*z).re).collect();
    let mut zeros = Vec::with_capacity(mapped.len() + extra_minus_one);
    for i in 0..mapped.len().max(extra_minus_one) {
        if let Some(z) = mapped.get(i) {
            zeros.push(*z);
        }
        if i < extra_minus_one {
            zeros.push(-1.0);
        }
    }
    let poles: Vec<Complex64> = analog_poles.iter().map(|p| map(*p)).collect();

    // Conjugate pairs first (upper half-plane representative), then real poles.
    let mut complex: Vec<Complex64> = poles.iter().copied().filter(|p| p.im > 1e-12).collect();
    let mut real: Vec<f64> = poles.iter().filter(|p| p.im.abs() <= 1e-12).map(|p| p.re).collect();
    complex.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap_or(core::cmp::Ordering::Equal));
    real.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));

    let mut denominators: Vec<[f64; 3]> = complex
        .iter()
        .map(|p| [1.0, -2.0 * p.re, p.norm_sqr()])
        .collect();
    for pair in real.chunks(2) {
        match *pair {
            [p, q] => denominators.push([1.0, -(p + q), p * q]),
            [p] => denominators.push([1.0, -p, 0.0]),
            _ => unreachable!(),
        }
    }

    let mut zero_iter = zeros.into_iter();
    let mut sections: Vec<Biquad> = denominators
        .into_iter()
        .map(|a| {
            let order = if a[2] == 0.0 { 1 } else { 2 };
            let b = match (order, zero_iter.next(), if order == 2 { zero_iter.next() } else { None }) {
                (_, Some(z1), Some(z2)) => [1.0, -(z1 + z2), z1 * z2],
                (_, Some(z1), None) => [1.0, -z1, 0.0],
                _ => [1.0, 0.0, 0.0],
            };
            Biquad { b, a }
        })
        .collect();

    let per_section = gain.abs().powf(1.0 / sections.len() as f64);
    for s in sections.iter_mut() {
        s.b.iter_mut().for_each(|v| *v *= per_section);
    }
    if gain < 0.0 {
        sections[0].b.iter_mut().for_each(|v| *v = -*v);
    }
    Sos { sections }
}

/// Zero-phase forward-backward filtering with odd edge extension and
/// steady-state initial conditions.
pub fn filtfilt(sos: &Sos, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let pad = sos.pad_len().min(n - 1);
    let mut ext = Vec::with_capacity(n + 2 * pad);
    let (first, last) = (x[0], x[n - 1]);
    ext.extend((1..=pad).rev().map(|i| 2.0 * first - x[i]));
    ext.extend_from_slice(x);
    ext.extend((1..=pad).map(|i| 2.0 * last - x[n - 1 - i]));

    let zi = sos.initial_state();
    let scaled = |level: f64| zi.iter().map(|z| [z[0] * level, z[1] * level]).collect();

    let start = ext[0];
    sos.filter_with_state(&mut ext, scaled(start));
    ext.reverse();
    let start = ext[0];
    sos.filter_with_state(&mut ext, scaled(start));
    ext.reverse();
    ext[pad..pad + n].to_vec()
}

/// Band edges actually used at sampling rate `fs`: an upper edge at or above
/// Nyquist is pulled down to `0.8 * fs / 2`.
pub fn effective_band(cfg: &AnalysisConfig, fs: f64) -> Result<(f64, f64)> {
    let nyquist = fs / 2.0;
    let mut f2 = cfg.f2;
    if f2 >= nyquist {
        f2 = 0.8 * nyquist;
        log::warn!(
            "band-pass upper edge {} Hz is not below Nyquist ({} Hz); using {} Hz",
            cfg.f2,
            nyquist,
            f2
        );
    }
    if !(cfg.f1 > 0.0 && cfg.f1 < f2) {
        return Err(Error::NyquistViolation {
            freq: cfg.f2,
            nyquist,
        });
    }
    Ok((cfg.f1, f2))
}

/// Zero-phase Butterworth band-pass over `[f1, f2]`.
pub fn bandpass_filter(signal: &RppgSignal, cfg: &AnalysisConfig) -> Result<RppgSignal> {
    let needed = 3 * cfg.filter_order + 1;
    if signal.len() < needed {
        return Err(Error::TooShort {
            needed,
            got: signal.len(),
        });
    }
    let (f1, f2) = effective_band(cfg, signal.fs)?;
    let sos = Sos::butter_bandpass(cfg.filter_order, f1, f2, signal.fs)?;
    Ok(RppgSignal::new(filtfilt(&sos, &signal.samples), signal.fs))
}

/// Zero-phase Butterworth low-pass at `cutoff` Hz.
pub fn lowpass_filter(x: &[f64], fs: f64, cutoff: f64, order: usize) -> Result<Vec<f64>> {
    let needed = 3 * order + 1;
    if x.len() < needed {
        return Err(Error::TooShort {
            needed,
            got: x.len(),
        });
    }
    let sos = Sos::butter_lowpass(order, cutoff, fs)?;
    Ok(filtfilt(&sos, x))
}

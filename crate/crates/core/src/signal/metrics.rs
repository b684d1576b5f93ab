use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::{lowpass_filter, mean, AnalysisConfig, RppgSignal, Spectrum};
use crate::{Error, Result};

/// Noise power never drops below this fraction of the signal power.
const SNR_FLOOR: f64 = 1e-12;

/// Heart-rate bin: the in-band bin maximizing `M(k) + M(2k)`. The harmonic
/// term is zero past Nyquist; ties go to the lower frequency.
pub fn estimate_hr_bin(spec: &Spectrum, cfg: &AnalysisConfig) -> Result<usize> {
    let bins = spec.band_bins(cfg.f1, cfg.f2);
    if bins.is_empty() {
        return Err(Error::EmptyBand {
            f1: cfg.f1,
            f2: cfg.f2,
        });
    }
    let m = &spec.magnitudes;
    let mut best = (*bins.start(), f64::NEG_INFINITY);
    for k in bins {
        let score = m[k] + m.get(2 * k).copied().unwrap_or(0.0);
        if score > best.1 {
            best = (k, score);
        }
    }
    Ok(best.0)
}

/// Heart frequency in Hz, see [`estimate_hr_bin`].
pub fn estimate_hr(spec: &Spectrum, cfg: &AnalysisConfig) -> Result<f64> {
    estimate_hr_bin(spec, cfg).map(|k| spec.frequency(k))
}

/// Decomposition of the in-band power into the masked signal part and the
/// remaining noise part.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrBreakdown {
    pub snr_db: f64,
    pub signal_power: f64,
    pub noise_power: f64,
    /// `U_m(k)` for every spectrum bin.
    pub mask: Vec<bool>,
}

/// Signal-to-noise ratio around `f_hr` and its second harmonic, plus the
/// magnitude `M(f_hr)`.
pub fn snr_and_magnitude(
    spec: &Spectrum,
    f_hr: f64,
    cfg: &AnalysisConfig,
) -> Result<(SnrBreakdown, f64)> {
    let slack = 1e-9 * spec.delta_f;
    if !(f_hr >= cfg.f1 - slack && f_hr <= cfg.f2 + slack) {
        return Err(Error::OutOfBand(f_hr));
    }
    let hr_bin = spec.bin_of(f_hr).ok_or(Error::OutOfBand(f_hr))?;
    let harmonic = 2.0 * f_hr;
    let use_harmonic = harmonic <= spec.fs / 2.0;
    let mask: Vec<bool> = (0..spec.magnitudes.len())
        .map(|k| {
            let f = spec.frequency(k);
            (f_hr - f).abs() <= cfg.hr_tolerance
                || (use_harmonic && (harmonic - f).abs() <= cfg.hr_tolerance)
        })
        .collect();

    let (mut signal, mut noise) = (0.0, 0.0);
    for k in spec.band_bins(cfg.f1, cfg.f2) {
        let p = spec.magnitudes[k] * spec.magnitudes[k];
        if mask[k] {
            signal += p;
        } else {
            noise += p;
        }
    }
    let ratio = if signal > 0.0 {
        signal / noise.max(SNR_FLOOR * signal)
    } else {
        SNR_FLOOR
    };
    Ok((
        SnrBreakdown {
            snr_db: 10.0 * ratio.log10(),
            signal_power: signal,
            noise_power: noise,
            mask,
        },
        spec.magnitudes[hr_bin],
    ))
}

/// Low-pass cutoff for the perfusion index: the configured cutoff, or
/// `0.8 * fs / 2` when that is lower.
pub fn pi_cutoff(cfg: &AnalysisConfig, fs: f64) -> f64 {
    cfg.pi_cutoff.min(0.8 * fs / 2.0)
}

/// Perfusion index `max(g_lp) / mean(g_lp)` of the low-passed green trace.
pub fn perfusion_index(green: &[f64], fs: f64, cfg: &AnalysisConfig) -> Result<f64> {
    let Some(&offset) = green.first() else {
        return Err(Error::TooShort { needed: 2, got: 0 });
    };
    // Filter deviations from the first sample; the low-pass has unit DC gain,
    // so g_lp = offset + lp(g - offset) and a constant trace stays exact.
    let deviation: Vec<f64> = green.iter().map(|v| v - offset).collect();
    let lp = lowpass_filter(&deviation, fs, pi_cutoff(cfg, fs), cfg.filter_order)?;
    let mean_dev = mean(&lp);
    let mu = offset + mean_dev;
    if !(mu > 0.0) {
        return Err(Error::NonPositiveMean);
    }
    let peak_dev = lp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(1.0 + (peak_dev - mean_dev) / mu)
}

/// Pearson correlation coefficient, clamped to `[-1, 1]`.
pub fn pearson_corr(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: a.len(),
        });
    }
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if !(saa > 0.0 && sbb > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Unit sine at an externally measured heart frequency, used when no reference
/// region is visible.
pub fn reference_from_hr(f_hr: f64, fs: f64, duration: f64) -> Result<RppgSignal> {
    if !(f_hr > 0.0 && f_hr < fs / 2.0) {
        return Err(Error::NyquistViolation {
            freq: f_hr,
            nyquist: fs / 2.0,
        });
    }
    let n = (duration * fs).round().max(0.0) as usize;
    let samples = (0..n)
        .map(|i| (2.0 * PI * f_hr * i as f64 / fs).sin())
        .collect();
    Ok(RppgSignal::new(samples, fs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{spectrum, WindowFunction};
    use alloc::vec;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn synthetic_spectrum(magnitudes: Vec<f64>, fs: f64) -> Spectrum {
        let n_fft = 2 * (magnitudes.len() - 1);
        Spectrum {
            magnitudes,
            delta_f: fs / n_fft as f64,
            n_fft,
            fs,
        }
    }

    /// Places unit-width spectral lines at `tones` on a 2048-point grid at 30 Hz.
    fn line_spectrum(tones: &[(f64, f64)]) -> Spectrum {
        let mut m = vec![0.0; 1025];
        let df = 30.0 / 2048.0;
        for &(f, a) in tones {
            m[(f / df).round() as usize] += a;
        }
        synthetic_spectrum(m, 30.0)
    }

    /// Exhaustive search written independently of `estimate_hr_bin`.
    fn brute_force_hr(spec: &Spectrum, f1: f64, f2: f64) -> usize {
        let candidates: Vec<usize> = (0..spec.magnitudes.len())
            .filter(|&k| {
                let f = k as f64 * spec.fs / spec.n_fft as f64;
                f >= f1 && f <= f2
            })
            .collect();
        let score = |k: usize| {
            let h = if 2 * k <= spec.n_fft / 2 { spec.magnitudes[2 * k] } else { 0.0 };
            spec.magnitudes[k] + h
        };
        let best = candidates.iter().map(|&k| score(k)).fold(f64::NEG_INFINITY, f64::max);
        *candidates.iter().find(|&&k| score(k) == best).unwrap()
    }

    fn pulse(fs: f64, n: usize, f0: f64, harmonic: f64) -> Vec<f64> {
        (0..n)
            .map(|i| {
                let t = i as f64 / fs;
                (2.0 * PI * f0 * t).sin() + harmonic * (4.0 * PI * f0 * t).sin()
            })
            .collect()
    }

    #[test]
    fn single_tone_hr() {
        let cfg = AnalysisConfig::default();
        let fs = 30.0;
        // With a second harmonic present the fundamental wins clearly.
        let s = spectrum(&RppgSignal::new(pulse(fs, 300, 1.2, 0.3), fs), &cfg).unwrap();
        let f = estimate_hr(&s, &cfg).unwrap();
        assert!((f - 1.2).abs() <= s.delta_f);
        assert!((60.0 * f - 72.0).abs() <= 1.0);
        assert_eq!(estimate_hr_bin(&s, &cfg).unwrap(), brute_force_hr(&s, 0.6, 4.0));

        // A pure tone leaves M(f/2) and M(2f) to leakage; at 72 BPM the
        // sub-harmonic 0.6 Hz is in band and its harmonic term is the peak.
        let s = spectrum(&RppgSignal::new(pulse(fs, 300, 1.2, 0.0), fs), &cfg).unwrap();
        let k = estimate_hr_bin(&s, &cfg).unwrap();
        assert_eq!(k, brute_force_hr(&s, 0.6, 4.0));
        assert!((s.frequency(k) - 0.6).abs() <= s.delta_f);
    }

    #[test]
    fn pure_tone_below_seventy_two_bpm_is_unambiguous() {
        let cfg = AnalysisConfig::default();
        let s = spectrum(&RppgSignal::new(pulse(30.0, 300, 1.0, 0.0), 30.0), &cfg).unwrap();
        assert!((estimate_hr(&s, &cfg).unwrap() - 1.0).abs() <= s.delta_f);
    }

    #[test]
    fn out_of_band_tone_is_ignored_after_band_pass() {
        let cfg = AnalysisConfig::default();
        let fs = 30.0;
        let x: Vec<f64> = (0..300)
            .map(|i| {
                let t = i as f64 / fs;
                (2.0 * PI * 5.0 * t).sin() + 0.3 * (2.0 * PI * 1.0 * t).sin()
            })
            .collect();
        let filtered = crate::signal::bandpass_filter(&RppgSignal::new(x, fs), &cfg).unwrap();
        let s = spectrum(&filtered, &cfg).unwrap();
        let k = estimate_hr_bin(&s, &cfg).unwrap();
        assert_eq!(k, brute_force_hr(&s, 0.6, 4.0));
        assert!((s.frequency(k) - 1.0).abs() <= s.delta_f);
    }

    #[test]
    fn harmonic_sum_prefers_fundamental() {
        let cfg = AnalysisConfig::default();
        let s = line_spectrum(&[(1.0, 1.0), (2.0, 0.6)]);
        let f = estimate_hr(&s, &cfg).unwrap();
        assert!((f - 1.0).abs() <= s.delta_f);
        assert_eq!(estimate_hr_bin(&s, &cfg).unwrap(), brute_force_hr(&s, 0.6, 4.0));
    }

    #[test]
    fn raw_line_counts_as_harmonic_of_its_half() {
        // Unfiltered, a dominant 5 Hz line scores for the in-band 2.5 Hz candidate.
        let cfg = AnalysisConfig::default();
        let df = 30.0 / 2048.0;
        let mut m = vec![0.0; 1025];
        m[342] = 1.0;
        m[68] = 0.3;
        let s = synthetic_spectrum(m, 30.0);
        let k = estimate_hr_bin(&s, &cfg).unwrap();
        assert_eq!(k, brute_force_hr(&s, 0.6, 4.0));
        assert_eq!(k, 171);
        assert!((s.frequency(k) - 171.0 * df).abs() < 1e-12);
    }

    #[test]
    fn ties_break_low() {
        let cfg = AnalysisConfig::default();
        let s = synthetic_spectrum(vec![1.0; 1025], 30.0);
        let k = estimate_hr_bin(&s, &cfg).unwrap();
        assert_eq!(k, s.band_bins(0.6, 4.0).start().clone());
    }

    #[test]
    fn empty_band_is_an_error() {
        let cfg = AnalysisConfig {
            f1: 0.6,
            f2: 0.61,
            ..AnalysisConfig::default()
        };
        // Bin spacing of 1 Hz leaves no bin in [0.6, 0.61].
        let s = synthetic_spectrum(vec![1.0; 9], 16.0);
        assert!(matches!(estimate_hr(&s, &cfg), Err(Error::EmptyBand { .. })));
    }

    #[test]
    fn noiseless_line_hits_clamp() {
        let cfg = AnalysisConfig::default();
        let s = line_spectrum(&[(1.2, 5.0)]);
        let f = s.frequency(s.bin_of(1.2).unwrap());
        let (snr, mag) = snr_and_magnitude(&s, f, &cfg).unwrap();
        assert!((snr.snr_db - 120.0).abs() < 1e-9);
        assert_eq!(mag, 5.0);
    }

    #[test]
    fn energy_outside_mask_is_strongly_negative() {
        let cfg = AnalysisConfig::default();
        let s = line_spectrum(&[(3.3, 1.0)]);
        let (snr, _) = snr_and_magnitude(&s, 1.2, &cfg).unwrap();
        assert!(snr.snr_db <= -40.0);
    }

    #[test]
    fn mask_covers_three_bpm_around_fundamental_and_harmonic() {
        let cfg = AnalysisConfig::default();
        let s = line_spectrum(&[(1.2, 1.0)]);
        let f = s.frequency(s.bin_of(1.2).unwrap());
        let (snr, _) = snr_and_magnitude(&s, f, &cfg).unwrap();
        for (k, &on) in snr.mask.iter().enumerate() {
            let fk = s.frequency(k);
            let want = (fk - f).abs() <= 0.05 || (fk - 2.0 * f).abs() <= 0.05;
            assert_eq!(on, want, "bin {k}");
        }
        // 0.05 Hz at 30/2048 Hz spacing: bins -3..=3 around each centre.
        assert_eq!(snr.mask.iter().filter(|m| **m).count(), 14);
    }

    #[test]
    fn harmonic_above_nyquist_is_dropped() {
        let cfg = AnalysisConfig {
            f2: 4.5,
            ..AnalysisConfig::default()
        };
        // fs = 10 Hz: 2 * 4.5 Hz exceeds Nyquist.
        let mut m = vec![0.0; 1025];
        m[1024] = 1.0;
        let s = synthetic_spectrum(m, 10.0);
        let (snr, _) = snr_and_magnitude(&s, 4.5, &cfg).unwrap();
        assert!(!snr.mask[1024]);
    }

    #[test]
    fn out_of_band_hr_rejected() {
        let s = line_spectrum(&[(1.2, 1.0)]);
        assert!(matches!(
            snr_and_magnitude(&s, 5.0, &AnalysisConfig::default()),
            Err(Error::OutOfBand(_))
        ));
    }

    /// SNR evaluated directly from a windowed DFT, independent of
    /// the spectrum and mask code paths.
    fn direct_snr(x: &[f64], fs: f64, f_hr: f64, hann: bool) -> f64 {
        let n = x.len();
        let n_fft = n.next_power_of_two().max(2048);
        let (mut sig, mut noi) = (0.0, 0.0);
        for k in 0..=n_fft / 2 {
            let f = k as f64 * fs / n_fft as f64;
            if !(0.6..=4.0).contains(&f) {
                continue;
            }
            let (mut re, mut im) = (0.0, 0.0);
            for (j, v) in x.iter().enumerate() {
                let w = if hann {
                    0.5 - 0.5 * (2.0 * PI * j as f64 / (n - 1) as f64).cos()
                } else {
                    1.0
                };
                let a = -2.0 * PI * ((k * j) % n_fft) as f64 / n_fft as f64;
                re += v * w * a.cos();
                im += v * w * a.sin();
            }
            let p = re * re + im * im;
            if (f - f_hr).abs() <= 0.05 || (f - 2.0 * f_hr).abs() <= 0.05 {
                sig += p;
            } else {
                noi += p;
            }
        }
        10.0 * (sig / noi).log10()
    }

    #[test]
    fn snr_matches_direct_evaluation() {
        let fs = 30.0;
        let cfg = AnalysisConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..300)
            .map(|i| {
                let n: f64 = StandardNormal.sample(&mut rng);
                (2.0 * PI * 1.1 * i as f64 / fs).sin() + 0.2 * n
            })
            .collect();
        let s = spectrum(&RppgSignal::new(x.clone(), fs), &cfg).unwrap();
        let f = estimate_hr(&s, &cfg).unwrap();
        let (snr, _) = snr_and_magnitude(&s, f, &cfg).unwrap();
        let oracle = direct_snr(&x, fs, f, true);
        assert!((snr.snr_db - oracle).abs() < 1e-6, "{} vs {}", snr.snr_db, oracle);
    }

    #[test]
    fn snr_falls_as_noise_doubles() {
        // Unpadded, untapered record with the tone on a bin: the tone has no
        // leakage, so the noise term is the added noise alone.
        let fs = 30.0;
        let n = 2048;
        let cfg = AnalysisConfig {
            window: WindowFunction::Rectangular,
            ..AnalysisConfig::default()
        };
        let f0 = 82.0 * fs / n as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let noise: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut last = f64::INFINITY;
        for level in [0.01, 0.02, 0.04] {
            let x: Vec<f64> = (0..n)
                .map(|i| (2.0 * PI * f0 * i as f64 / fs).sin() + level * noise[i])
                .collect();
            let s = spectrum(&RppgSignal::new(x.clone(), fs), &cfg).unwrap();
            let (snr, _) = snr_and_magnitude(&s, f0, &cfg).unwrap();
            let oracle = direct_snr(&x, fs, f0, false);
            assert!((snr.snr_db - oracle).abs() < 1e-6, "{} vs {}", snr.snr_db, oracle);
            assert!(snr.snr_db < last, "level {level}: {} dB", snr.snr_db);
            last = snr.snr_db;
        }
    }

    #[test]
    fn pi_of_constant_is_one() {
        let pi = perfusion_index(&vec![0.7; 300], 30.0, &AnalysisConfig::default()).unwrap();
        assert_eq!(pi, 1.0);
    }

    #[test]
    fn pi_of_modulated_green() {
        let fs = 30.0;
        let g: Vec<f64> = (0..300)
            .map(|i| 1.0 + 0.1 * (2.0 * PI * 1.2 * i as f64 / fs).sin())
            .collect();
        let pi = perfusion_index(&g, fs, &AnalysisConfig::default()).unwrap();
        assert!((pi - 1.1).abs() < 1e-3, "pi = {pi}");
    }

    #[test]
    fn pi_cutoff_falls_back_below_nyquist() {
        let cfg = AnalysisConfig::default();
        assert_eq!(pi_cutoff(&cfg, 25.0), 10.0);
        assert_eq!(pi_cutoff(&cfg, 30.0), 12.0);
        assert_eq!(pi_cutoff(&cfg, 60.0), 20.0);
    }

    #[test]
    fn pi_rejects_zero_mean() {
        let g: Vec<f64> = (0..300).map(|i| (i as f64 * 0.3).sin() - (i as f64 * 0.3).sin()).collect();
        assert_eq!(
            perfusion_index(&g, 30.0, &AnalysisConfig::default()),
            Err(Error::NonPositiveMean)
        );
    }

    #[test]
    fn correlation_basics() {
        let x: Vec<f64> = (0..100).map(|i| (i as f64 * 0.21).sin() + 0.01 * i as f64).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let affine: Vec<f64> = x.iter().map(|v| 3.5 * v + 7.0).collect();
        assert!((pearson_corr(&x, &x).unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson_corr(&x, &neg).unwrap() + 1.0).abs() < 1e-12);
        assert!((pearson_corr(&x, &affine).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(pearson_corr(&x, &x[..50]), Err(Error::LengthMismatch(100, 50)));
        assert_eq!(pearson_corr(&x, &vec![1.0; 100]), Err(Error::ZeroVariance));
    }

    #[test]
    fn reference_sine() {
        let r = reference_from_hr(1.2, 30.0, 10.0).unwrap();
        assert_eq!(r.len(), 300);
        for i in 0..275 {
            assert!((r.samples[i] - r.samples[i + 25]).abs() < 1e-9);
        }
        assert_eq!(pearson_corr(&r.samples, &r.samples).unwrap(), 1.0);
        assert!(matches!(
            reference_from_hr(20.0, 30.0, 10.0),
            Err(Error::NyquistViolation { .. })
        ));
    }

    #[test]
    fn rectangular_window_is_selectable() {
        let cfg = AnalysisConfig {
            window: WindowFunction::Rectangular,
            ..AnalysisConfig::default()
        };
        let x: Vec<f64> = (0..300).map(|i| (2.0 * PI * 1.0 * i as f64 / 30.0).sin()).collect();
        let s = spectrum(&RppgSignal::new(x, 30.0), &cfg).unwrap();
        assert!((estimate_hr(&s, &cfg).unwrap() - 1.0).abs() <= s.delta_f);
    }

    #[test]
    fn hr_matches_brute_force_on_random_spectra() {
        use rand::Rng;
        let cfg = AnalysisConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..100 {
            let m: Vec<f64> = (0..1025).map(|_| rng.random::<f64>()).collect();
            let s = synthetic_spectrum(m, 30.0);
            assert_eq!(estimate_hr_bin(&s, &cfg).unwrap(), brute_force_hr(&s, 0.6, 4.0));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn snr_powers_partition_band(m in proptest::collection::vec(0.0f64..10.0, 1025), hr in 0.6f64..4.0) {
            let s = synthetic_spectrum(m, 30.0);
            let cfg = AnalysisConfig::default();
            let (b, _) = snr_and_magnitude(&s, hr, &cfg).unwrap();
            let total: f64 = s.band_bins(0.6, 4.0).map(|k| s.magnitudes[k].powi(2)).sum();
            prop_assert!((b.signal_power + b.noise_power - total).abs() <= 1e-9 * total.max(1e-300));
        }

        #[test]
        fn correlation_is_symmetric_and_affine_invariant(
            a in proptest::collection::vec(-1.0f64..1.0, 3..64),
            scale in 0.1f64..10.0,
            shift in -5.0f64..5.0,
        ) {
            let b: Vec<f64> = a.iter().enumerate().map(|(i, v)| v * v + i as f64 * 0.01).collect();
            if let (Ok(ab), Ok(ba)) = (pearson_corr(&a, &b), pearson_corr(&b, &a)) {
                prop_assert!((ab - ba).abs() < 1e-12);
                let t: Vec<f64> = a.iter().map(|v| scale * v + shift).collect();
                let tb = pearson_corr(&t, &b).unwrap();
                prop_assert!((tb - ab).abs() < 1e-9);
            }
        }
    }
}

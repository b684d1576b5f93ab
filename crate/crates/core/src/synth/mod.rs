//! Synthetic pulsatile video generator used as ground truth for every
//! analysis scale.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::imaging::{FrameSequence, RgbImage};
use crate::{Error, Result};

/// Relative RGB weights of the blood-volume pulse in normalized colour space.
pub const DEFAULT_PULSE_DIRECTION: [f64; 3] = [0.33, 0.77, 0.53];
/// Correlation length of the static texture in pixels.
pub const TEXTURE_SIGMA: f64 = 1.5;

/// Half-open pixel rectangle `[x0, x1) × [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rect {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl Rect {
    pub fn new(x0: usize, y0: usize, x1: usize, y1: usize) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }
}

/// Transient over-perfusion after reperfusion: a Gaussian bump on the pulse
/// amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct Hyperemia {
    /// Seconds from reperfusion to the peak.
    pub delay: f64,
    /// Standard deviation of the bump in seconds.
    pub width: f64,
    /// Peak relative amplitude increase (1.0 doubles the pulse).
    pub gain: f64,
}

impl Default for Hyperemia {
    fn default() -> Self {
        Self {
            delay: 15.0,
            width: 4.0,
            gain: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SynthSpec {
    pub width: usize,
    pub height: usize,
    pub fs: f64,
    /// Seconds.
    pub duration: f64,
    pub base_color: [u8; 3],
    /// Beats per minute.
    pub pulse_hr: f64,
    /// Pulse amplitude as a fraction of the base green level.
    pub pulse_amplitude: f64,
    pub pulse_direction: [f64; 3],
    /// Second-harmonic amplitude relative to the fundamental.
    pub harmonic_ratio: f64,
    /// Per-pixel Gaussian noise standard deviation as a fraction of the base green level.
    pub noise_sigma: f64,
    /// Non-pulsatile rectangles.
    pub dead_zones: Vec<Rect>,
    /// Seconds; the pulse is absent before this time.
    pub reperfusion_time: Option<f64>,
    /// Area affected by `reperfusion_time`; the whole frame when absent.
    pub reperfusion_region: Option<Rect>,
    pub hyperemia: Option<Hyperemia>,
    /// Radians of pulse phase delay per pixel along x.
    pub phase_gradient: Option<f64>,
    /// Relative amplitude of a static smooth texture (for registration).
    pub texture: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            width: 100,
            height: 100,
            fs: 30.0,
            duration: 30.0,
            base_color: [180, 120, 100],
            pulse_hr: 72.0,
            pulse_amplitude: 0.02,
            pulse_direction: DEFAULT_PULSE_DIRECTION,
            harmonic_ratio: 0.2,
            noise_sigma: 0.0,
            dead_zones: Vec::new(),
            reperfusion_time: None,
            reperfusion_region: None,
            hyperemia: None,
            phase_gradient: None,
            texture: 0.0,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: alloc::string::String| Err(Error::InvalidSpec(m));
        if self.width == 0 || self.height == 0 {
            return bad(format!("frame size {}x{} is empty", self.width, self.height));
        }
        if !(self.fs.is_finite() && self.fs > 0.0) || !(self.duration.is_finite() && self.duration > 0.0) {
            return bad(format!("fs ({}) and duration ({}) must be positive", self.fs, self.duration));
        }
        if self.frame_count() == 0 {
            return bad("duration shorter than one frame".into());
        }
        if !(36.0..=240.0).contains(&self.pulse_hr) {
            return bad(format!("pulse_hr {} outside [36, 240] BPM", self.pulse_hr));
        }
        if !(self.fs > 2.0 * self.pulse_hr / 60.0) {
            return bad(format!("fs {} does not sample {} BPM above Nyquist", self.fs, self.pulse_hr));
        }
        if !(0.0..0.5).contains(&self.pulse_amplitude) {
            return bad(format!("pulse_amplitude {} outside [0, 0.5)", self.pulse_amplitude));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return bad(format!("noise_sigma {} must be non-negative", self.noise_sigma));
        }
        if !(0.0..1.0).contains(&self.harmonic_ratio) {
            return bad(format!("harmonic_ratio {} outside [0, 1)", self.harmonic_ratio));
        }
        if !(0.0..0.5).contains(&self.texture) {
            return bad(format!("texture {} outside [0, 0.5)", self.texture));
        }
        if self.pulse_direction.iter().any(|v| !v.is_finite()) || !(self.pulse_direction[1] > 0.0) {
            return bad("pulse_direction needs a positive green weight".into());
        }
        if let Some(t) = self.reperfusion_time {
            if !t.is_finite() {
                return bad("reperfusion_time must be finite".into());
            }
        }
        if let Some(h) = self.hyperemia {
            if !(h.width > 0.0 && h.gain >= 0.0 && h.delay.is_finite()) {
                return bad("hyperemia needs width > 0 and gain >= 0".into());
            }
        }
        if let Some(g) = self.phase_gradient {
            if !g.is_finite() {
                return bad("phase_gradient must be finite".into());
            }
        }
        Ok(())
    }

    pub fn frame_count(&self) -> usize {
        (self.duration * self.fs).round().max(0.0) as usize
    }

    pub fn f_hr(&self) -> f64 {
        self.pulse_hr / 60.0
    }
}

/// Ground truth accompanying a generated video.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthTruth {
    pub hr_bpm: f64,
    pub f_hr: f64,
    pub width: usize,
    pub height: usize,
    /// Nominal relative pulse amplitude per pixel, row-major (0 in dead zones).
    pub amplitude_map: Vec<f64>,
    /// Unit pulse shape p(t) at zero phase, one sample per frame.
    pub waveform: Vec<f64>,
}

/// Frame-by-frame generator. Each frame draws from its own ChaCha stream, so
/// frames can be produced in any order or in parallel with identical bytes.
#[derive(Debug, Clone)]
pub struct SynthGenerator {
    spec: SynthSpec,
    amplitude: Vec<f64>,
    phase: Vec<f64>,
    /// Whether each pixel follows `reperfusion_time`.
    gated: Vec<bool>,
    /// Static multiplicative texture factor per pixel.
    texture: Vec<f64>,
    /// Per-channel pulse weights relative to green.
    weights: [f64; 3],
}

impl SynthGenerator {
    pub fn new(spec: SynthSpec) -> Result<Self> {
        spec.validate()?;
        let (w, h) = (spec.width, spec.height);
        let mut amplitude = vec![spec.pulse_amplitude; w * h];
        let mut phase = vec![0.0; w * h];
        let mut gated = vec![spec.reperfusion_time.is_some(); w * h];
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                if spec.dead_zones.iter().any(|r| r.contains(x, y)) {
                    amplitude[i] = 0.0;
                }
                if let Some(g) = spec.phase_gradient {
                    phase[i] = -g * x as f64;
                }
                if let Some(r) = spec.reperfusion_region {
                    gated[i] &= r.contains(x, y);
                }
            }
        }
        let texture = if spec.texture > 0.0 {
            texture_field(w, h, spec.seed, spec.texture)
        } else {
            vec![1.0; w * h]
        };
        let d = spec.pulse_direction;
        let weights = [d[0] / d[1], 1.0, d[2] / d[1]];
        Ok(Self {
            spec,
            amplitude,
            phase,
            gated,
            texture,
            weights,
        })
    }

    pub fn spec(&self) -> &SynthSpec {
        &self.spec
    }

    pub fn frame_count(&self) -> usize {
        self.spec.frame_count()
    }

    /// Pulse shape at time `t` with extra phase `phi`.
    fn pulse(&self, t: f64, phi: f64) -> f64 {
        let theta = 2.0 * PI * self.spec.f_hr() * t + phi;
        theta.sin() + self.spec.harmonic_ratio * (2.0 * theta).sin()
    }

    /// Amplitude envelope of gated pixels.
    pub fn envelope(&self, t: f64) -> f64 {
        match self.spec.reperfusion_time {
            Some(t0) if t < t0 => 0.0,
            Some(t0) => 1.0 + self.hyperemia_bump(t - t0),
            None => 1.0,
        }
    }

    fn hyperemia_bump(&self, since: f64) -> f64 {
        match self.spec.hyperemia {
            Some(h) => {
                let z = (since - h.delay) / h.width;
                h.gain * (-0.5 * z * z).exp()
            }
            None => 0.0,
        }
    }

    pub fn frame(&self, index: usize) -> RgbImage {
        let s = &self.spec;
        let t = index as f64 / s.fs;
        let env = self.envelope(t);
        let base = [s.base_color[0] as f64, s.base_color[1] as f64, s.base_color[2] as f64];
        let noise_sd = s.noise_sigma * base[1];
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        rng.set_stream(index as u64);
        let mut data = Vec::with_capacity(s.width * s.height * 3);
        for i in 0..s.width * s.height {
            let a = self.amplitude[i] * if self.gated[i] { env } else { 1.0 };
            let p = if a > 0.0 { a * self.pulse(t, self.phase[i]) } else { 0.0 };
            let varying = self.amplitude[i] > 0.0 || noise_sd > 0.0;
            for c in 0..3 {
                let z: f64 = rng.sample(StandardNormal);
                let dither = rng.random::<f64>() - rng.random::<f64>();
                let mut v = base[c] * self.texture[i] * (1.0 + self.weights[c] * p) + noise_sd * z;
                if varying {
                    v += dither;
                }
                data.push(v.round().clamp(0.0, 255.0) as u8);
            }
        }
        RgbImage::new(s.width, s.height, data).expect("buffer sized from spec")
    }

    pub fn truth(&self) -> SynthTruth {
        let s = &self.spec;
        SynthTruth {
            hr_bpm: s.pulse_hr,
            f_hr: s.f_hr(),
            width: s.width,
            height: s.height,
            amplitude_map: self.amplitude.clone(),
            waveform: (0..self.frame_count()).map(|i| self.pulse(i as f64 / s.fs, 0.0)).collect(),
        }
    }
}

/// Static texture `1 + amp·T(x, y)`: white noise smoothed by a Gaussian of
/// [`TEXTURE_SIGMA`] pixels, scaled so that `T` spans `[-1, 1]`.
fn texture_field(w: usize, h: usize, seed: u64, amp: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    let raw: Vec<f64> = (0..w * h).map(|_| rng.random_range(-1.0..1.0)).collect();
    let r = (3.0 * TEXTURE_SIGMA).ceil() as isize;
    let kernel: Vec<f64> = (-r..=r)
        .map(|k| (-0.5 * (k * k) as f64 / (TEXTURE_SIGMA * TEXTURE_SIGMA)).exp())
        .collect();
    let norm: f64 = kernel.iter().sum();
    let blur = |src: &[f64], horizontal: bool| -> Vec<f64> {
        let mut out = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                let mut acc = 0.0;
                for (k, kv) in kernel.iter().enumerate() {
                    let d = k as isize - r;
                    let (sx, sy) = if horizontal {
                        ((x as isize + d).clamp(0, w as isize - 1) as usize, y)
                    } else {
                        (x, (y as isize + d).clamp(0, h as isize - 1) as usize)
                    };
                    acc += kv * src[sy * w + sx];
                }
                out[y * w + x] = acc / norm;
            }
        }
        out
    };
    let t = blur(&blur(&raw, true), false);
    let peak = t.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if peak > 0.0 { amp / peak } else { 0.0 };
    t.into_iter().map(|v| 1.0 + scale * v).collect()
}

/// Generates the whole recording sequentially.
pub fn generate_synthetic_video(spec: &SynthSpec) -> Result<(FrameSequence, SynthTruth)> {
    let gen = SynthGenerator::new(spec.clone())?;
    let frames = (0..gen.frame_count()).map(|i| gen.frame(i)).collect();
    let seq = FrameSequence::new(spec.fs, frames)?;
    Ok((seq, gen.truth()))
}

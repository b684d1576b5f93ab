use alloc::vec::Vec;

use super::mean;
use crate::{Error, Result};

/// Spatially averaged red, green and blue channel values over time.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbTrace {
    pub r: Vec<f64>,
    pub g: Vec<f64>,
    pub b: Vec<f64>,
    pub fs: f64,
}

impl RgbTrace {
    pub fn new(r: Vec<f64>, g: Vec<f64>, b: Vec<f64>, fs: f64) -> Result<Self> {
        if r.len() != g.len() {
            return Err(Error::LengthMismatch(r.len(), g.len()));
        }
        if r.len() != b.len() {
            return Err(Error::LengthMismatch(r.len(), b.len()));
        }
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::InvalidConfig(alloc::format!("sampling rate {fs} must be positive")));
        }
        Ok(Self { r, g, b, fs })
    }

    /// Builds a trace from per-frame `[r, g, b]` means.
    pub fn from_samples(samples: &[[f64; 3]], fs: f64) -> Result<Self> {
        let r = samples.iter().map(|s| s[0]).collect();
        let g = samples.iter().map(|s| s[1]).collect();
        let b = samples.iter().map(|s| s[2]).collect();
        Self::new(r, g, b, fs)
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Copy of the samples in `range`.
    pub fn slice(&self, range: core::ops::Range<usize>) -> Self {
        Self {
            r: self.r[range.clone()].to_vec(),
            g: self.g[range.clone()].to_vec(),
            b: self.b[range].to_vec(),
            fs: self.fs,
        }
    }
}

/// Divides every channel by its temporal mean.
pub fn normalize_trace(raw: &RgbTrace) -> Result<RgbTrace> {
    if raw.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: raw.len(),
        });
    }
    let scale = |name: &'static str, x: &[f64]| -> Result<Vec<f64>> {
        let m = mean(x);
        if !(m.abs() >= 1e-12) {
            return Err(Error::ZeroMeanChannel(name));
        }
        Ok(x.iter().map(|v| v / m).collect())
    };
    Ok(RgbTrace {
        r: scale("r", &raw.r)?,
        g: scale("g", &raw.g)?,
        b: scale("b", &raw.b)?,
        fs: raw.fs,
    })
}

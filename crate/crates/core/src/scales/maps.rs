use alloc::vec;
use alloc::vec::Vec;

use crate::imaging::RoiMask;

/// Row-major matrix of reals; NaN marks an absent cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueMap {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl ValueMap {
    pub fn absent(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            values: vec![f64::NAN; width * height],
        }
    }

    pub fn from_options(width: usize, height: usize, cells: impl IntoIterator<Item = Option<f64>>) -> Self {
        let values: Vec<f64> = cells.into_iter().map(|c| c.unwrap_or(f64::NAN)).collect();
        assert_eq!(values.len(), width * height);
        Self {
            width,
            height,
            values,
        }
    }

    pub fn get(&self, x: usize, y: usize) -> Option<f64> {
        let v = self.values[y * self.width + x];
        (!v.is_nan()).then_some(v)
    }

    pub fn defined(&self) -> Vec<bool> {
        self.values.iter().map(|v| !v.is_nan()).collect()
    }

    /// Mean of defined cells, optionally restricted to `mask`.
    pub fn mean(&self, mask: Option<&RoiMask>) -> Option<f64> {
        let (mut s, mut n) = (0.0, 0usize);
        for (i, v) in self.values.iter().enumerate() {
            if v.is_nan() || mask.is_some_and(|m| !m.bits()[i]) {
                continue;
            }
            s += v;
            n += 1;
        }
        (n > 0).then(|| s / n as f64)
    }

    /// Population variance of defined cells, optionally restricted to `mask`.
    pub fn variance(&self, mask: Option<&RoiMask>) -> Option<f64> {
        let m = self.mean(mask)?;
        let (mut s, mut n) = (0.0, 0usize);
        for (i, v) in self.values.iter().enumerate() {
            if v.is_nan() || mask.is_some_and(|mk| !mk.bits()[i]) {
                continue;
            }
            s += (v - m) * (v - m);
            n += 1;
        }
        Some(s / n as f64)
    }

    /// Median of defined cells (mean of the middle pair for even counts).
    pub fn median(&self) -> Option<f64> {
        let mut v: Vec<f64> = self.values.iter().copied().filter(|v| !v.is_nan()).collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let n = v.len();
        Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
    }
}

/// Per-pixel maps of one analysis window.
#[derive(Debug, Clone, PartialEq)]
pub struct PerfusionMapSet {
    pub width: usize,
    pub height: usize,
    pub t_start: f64,
    /// Heart frequency of the reference signal that centres every SNR mask.
    pub f_hr_global: f64,
    pub magnitude: ValueMap,
    pub snr_db: ValueMap,
    pub rho_ref: ValueMap,
    pub bpm: ValueMap,
}

impl PerfusionMapSet {
    /// Maps in canonical export order with their names.
    pub fn named_maps(&self) -> [(&'static str, &ValueMap); 4] {
        [
            ("magnitude", &self.magnitude),
            ("snr_db", &self.snr_db),
            ("rho_ref", &self.rho_ref),
            ("bpm", &self.bpm),
        ]
    }
}

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{RgbImage, RoiMask};
use crate::fft::fft2d;
use crate::{Error, Result};

/// Minimum number of mask pixels for a registration attempt.
pub const MIN_MASK_AREA: usize = 64;
/// Peaks weaker than this multiple of the strongest competing peak are
/// treated as unreliable.
pub const MIN_PEAK_RATIO: f64 = 2.0;
/// Standard deviation, in cycles per pixel, of the Gaussian weight applied to
/// the normalized cross-power spectrum. Whitening alone gives noise-dominated
/// high frequencies the same weight as the image structure.
pub const SPECTRAL_SIGMA: f64 = 0.15;
/// Pixels added around the mask's bounding box before cropping. The taper
/// biases peaks toward zero when the shift is a sizable part of the crop.
pub const SEARCH_MARGIN: usize = 8;

/// Translation realigning a moving frame onto the reference frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Registration {
    pub dx: i32,
    pub dy: i32,
    /// Correlation peak over the strongest peak outside its 5×5 neighbourhood.
    pub peak_ratio: f64,
    pub low_confidence: bool,
}

fn luma(img: &RgbImage, x: usize, y: usize) -> f64 {
    let p = img.pixel(x, y);
    0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64
}

fn hann(n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![1.0];
    }
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * core::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
        .collect()
}

fn prepared_crop(
    img: &RgbImage,
    bb: (usize, usize, usize, usize),
    pw: usize,
    ph: usize,
) -> Vec<Complex64> {
    let (x0, y0, x1, y1) = bb;
    let (cw, ch) = (x1 - x0, y1 - y0);
    let mut vals = Vec::with_capacity(cw * ch);
    for y in y0..y1 {
        for x in x0..x1 {
            vals.push(luma(img, x, y));
        }
    }
    let m = vals.iter().sum::<f64>() / vals.len() as f64;
    let (wx, wy) = (hann(cw), hann(ch));
    let mut buf = alloc::vec![Complex64::new(0.0, 0.0); pw * ph];
    for y in 0..ch {
        for x in 0..cw {
            buf[y * pw + x] = Complex64::new((vals[y * cw + x] - m) * wx[x] * wy[y], 0.0);
        }
    }
    buf
}

/// Integer translation estimate by phase correlation over the bounding box
/// of `mask`, widened by [`SEARCH_MARGIN`]. The returned shift, applied with [`shift_image`], maps
/// `moving` back onto `reference`. Unreliable estimates report `(0, 0)`.
pub fn register_translation(reference: &RgbImage, moving: &RgbImage, mask: &RoiMask) -> Result<Registration> {
    if reference.dims() != moving.dims() {
        return Err(Error::DimensionMismatch {
            expected: reference.dims(),
            got: moving.dims(),
        });
    }
    mask.check_dims(reference.dims())?;
    let area = mask.count();
    if area == 0 {
        return Err(Error::EmptyMask);
    }
    if area < MIN_MASK_AREA {
        return Err(Error::TooSmall);
    }
    let bb = mask.bounding_box().ok_or(Error::EmptyMask)?;
    let (w, h) = reference.dims();
    let bb = (
        bb.0.saturating_sub(SEARCH_MARGIN),
        bb.1.saturating_sub(SEARCH_MARGIN),
        (bb.2 + SEARCH_MARGIN).min(w),
        (bb.3 + SEARCH_MARGIN).min(h),
    );
    let (cw, ch) = (bb.2 - bb.0, bb.3 - bb.1);
    let (pw, ph) = (cw.next_power_of_two(), ch.next_power_of_two());

    let mut fr = prepared_crop(reference, bb, pw, ph);
    let mut fm = prepared_crop(moving, bb, pw, ph);
    fft2d(&mut fr, pw, ph, false);
    fft2d(&mut fm, pw, ph, false);
    let freq = |k: usize, n: usize| k.min(n - k) as f64 / n as f64;
    let mut cross: Vec<Complex64> = fr
        .iter()
        .zip(&fm)
        .enumerate()
        .map(|(i, (a, b))| {
            let c = a * b.conj();
            let n = c.norm();
            if n > 1e-12 {
                let (u, v) = (freq(i % pw, pw), freq(i / pw, ph));
                let w = (-(u * u + v * v) / (2.0 * SPECTRAL_SIGMA * SPECTRAL_SIGMA)).exp();
                c * (w / n)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    fft2d(&mut cross, pw, ph, true);

    let corr: Vec<f64> = cross.iter().map(|c| c.re).collect();
    let (mut best, mut best_i) = (f64::NEG_INFINITY, 0usize);
    for (i, &v) in corr.iter().enumerate() {
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let (px, py) = (best_i % pw, best_i / pw);
    let near = |a: usize, b: usize, n: usize| {
        let d = a.abs_diff(b);
        d.min(n - d) <= 2
    };
    let second = corr
        .iter()
        .enumerate()
        .filter(|(i, _)| !(near(i % pw, px, pw) && near(i / pw, py, ph)))
        .map(|(_, &v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let peak_ratio = if best <= 0.0 {
        0.0
    } else if second <= 0.0 {
        f64::INFINITY
    } else {
        best / second
    };
    // With R = F_ref·conj(F_mov) the peak sits at minus the content displacement.
    let wrap = |p: usize, n: usize| if p > n / 2 { p as i32 - n as i32 } else { p as i32 };
    let (sx, sy) = (wrap(px, pw), wrap(py, ph));
    let low_confidence = !(peak_ratio >= MIN_PEAK_RATIO);
    Ok(if low_confidence {
        Registration {
            dx: 0,
            dy: 0,
            peak_ratio,
            low_confidence,
        }
    } else {
        Registration {
            dx: sx,
            dy: sy,
            peak_ratio,
            low_confidence,
        }
    })
}

/// Translates image content by `(dx, dy)`; uncovered pixels replicate the edge.
pub fn shift_image(img: &RgbImage, dx: i32, dy: i32) -> RgbImage {
    let (w, h) = img.dims();
    RgbImage::from_fn(w, h, |x, y| {
        let sx = (x as i64 - dx as i64).clamp(0, w as i64 - 1) as usize;
        let sy = (y as i64 - dy as i64).clamp(0, h as i64 - 1) as usize;
        img.pixel(sx, sy)
    })
}

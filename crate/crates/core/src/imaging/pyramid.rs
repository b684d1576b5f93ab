use alloc::vec;
use alloc::vec::Vec;

use super::{FloatImage, FloatSequence, FrameSequence};
use crate::{Error, Result};

/// Normalized 5-tap Gaussian, σ = 1.
const KERNEL: [f32; 5] = {
    // exp(-k²/2) for k = 0, 1, 2 divided by their symmetric sum.
    let e0 = 1.0f64;
    let e1 = 0.606_530_659_712_633_4;
    let e2 = 0.135_335_283_236_612_7;
    let s = e0 + 2.0 * e1 + 2.0 * e2;
    [(e2 / s) as f32, (e1 / s) as f32, (e0 / s) as f32, (e1 / s) as f32, (e2 / s) as f32]
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PyramidLevel {
    pub level: usize,
    pub width: usize,
    pub height: usize,
}

/// Picks the level whose pixel count is closest to `target_px`; on a tie the
/// level with more pixels wins.
pub fn pyramid_level_for(width: usize, height: usize, target_px: usize) -> Result<PyramidLevel> {
    if width < 2 || height < 2 {
        return Err(Error::TooSmall);
    }
    let mut best = PyramidLevel {
        level: 0,
        width,
        height,
    };
    let dist = |l: &PyramidLevel| (l.width * l.height).abs_diff(target_px);
    let (mut w, mut h, mut level) = (width, height, 0);
    while w >= 2 && h >= 2 {
        w /= 2;
        h /= 2;
        level += 1;
        let cand = PyramidLevel {
            level,
            width: w,
            height: h,
        };
        if dist(&cand) < dist(&best) {
            best = cand;
        }
    }
    Ok(best)
}

fn reflect(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let n = n as isize;
    let period = 2 * (n - 1);
    let mut i = i.rem_euclid(period);
    if i >= n {
        i = period - i;
    }
    i as usize
}

/// One blur-and-decimate step; output is `floor(w/2) × floor(h/2)`.
pub fn downscale_once(img: &FloatImage) -> FloatImage {
    let (w, h) = (img.width, img.height);
    let (ow, oh) = (w / 2, h / 2);
    // Horizontal pass evaluated only at the retained columns.
    let mut tmp = vec![0.0f32; ow * h * 3];
    for y in 0..h {
        let row = &img.data[y * w * 3..(y + 1) * w * 3];
        for ox in 0..ow {
            let cx = 2 * ox as isize;
            let mut acc = [0.0f32; 3];
            for (k, wgt) in KERNEL.iter().enumerate() {
                let sx = reflect(cx + k as isize - 2, w);
                for c in 0..3 {
                    acc[c] += wgt * row[3 * sx + c];
                }
            }
            tmp[(y * ow + ox) * 3..(y * ow + ox) * 3 + 3].copy_from_slice(&acc);
        }
    }
    let mut out = vec![0.0f32; ow * oh * 3];
    for oy in 0..oh {
        let cy = 2 * oy as isize;
        for ox in 0..ow {
            let mut acc = [0.0f32; 3];
            for (k, wgt) in KERNEL.iter().enumerate() {
                let sy = reflect(cy + k as isize - 2, h);
                let i = (sy * ow + ox) * 3;
                for c in 0..3 {
                    acc[c] += wgt * tmp[i + c];
                }
            }
            out[(oy * ow + ox) * 3..(oy * ow + ox) * 3 + 3].copy_from_slice(&acc);
        }
    }
    FloatImage {
        width: ow,
        height: oh,
        data: out,
    }
}

/// Applies `level` downscaling steps to one frame.
pub fn pyramid_frame(img: &FloatImage, level: usize) -> FloatImage {
    let mut cur = img.clone();
    for _ in 0..level {
        cur = downscale_once(&cur);
    }
    cur
}

/// Downscales every frame to the level nearest `target_px` pixels.
pub fn pyramid_downscale(seq: &FrameSequence, target_px: usize) -> Result<(FloatSequence, PyramidLevel)> {
    let lvl = pyramid_level_for(seq.width, seq.height, target_px)?;
    let frames: Vec<FloatImage> = seq
        .frames
        .iter()
        .map(|f| pyramid_frame(&FloatImage::from_rgb(f), lvl.level))
        .collect();
    Ok((
        FloatSequence {
            width: lvl.width,
            height: lvl.height,
            fs: seq.fs,
            frames,
        },
        lvl,
    ))
}

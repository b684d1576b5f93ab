use alloc::vec;
use alloc::vec::Vec;

use super::Frame;
use crate::{Error, Result};

/// Binary per-pixel region of interest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoiMask {
    pub width: usize,
    pub height: usize,
    bits: Vec<bool>,
}

impl RoiMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: (width, height),
                got: (bits.len(), 1),
            });
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![true; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            bits,
        }
    }

    /// Axis-aligned rectangle `[x0, x1) × [y0, y1)`, clipped to the image.
    pub fn rect(width: usize, height: usize, x0: usize, y0: usize, x1: usize, y1: usize) -> Self {
        Self::from_fn(width, height, |x, y| x >= x0 && x < x1 && y >= y0 && y < y1)
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Inclusive-exclusive bounding box `(x0, y0, x1, y1)` of the set pixels.
    pub fn bounding_box(&self) -> Option<(usize, usize, usize, usize)> {
        let mut bb: Option<(usize, usize, usize, usize)> = None;
        for (i, _) in self.bits.iter().enumerate().filter(|(_, &b)| b) {
            let (x, y) = (i % self.width, i / self.width);
            bb = Some(match bb {
                None => (x, y, x + 1, y + 1),
                Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x + 1), y1.max(y + 1)),
            });
        }
        bb
    }

    pub fn and(&self, other: &RoiMask) -> Result<RoiMask> {
        self.check_dims(other.dims())?;
        Ok(Self {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| *a && *b).collect(),
        })
    }

    pub fn and_not(&self, other: &RoiMask) -> Result<RoiMask> {
        self.check_dims(other.dims())?;
        Ok(Self {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| *a && !*b).collect(),
        })
    }

    /// Nearest-neighbour resampling by pixel centres, used to carry a
    /// full-resolution mask down to a pyramid level.
    pub fn resample(&self, width: usize, height: usize) -> RoiMask {
        let sx = self.width as f64 / width as f64;
        let sy = self.height as f64 / height as f64;
        Self::from_fn(width, height, |x, y| {
            let fx = ((x as f64 + 0.5) * sx) as usize;
            let fy = ((y as f64 + 0.5) * sy) as usize;
            self.get(fx.min(self.width - 1), fy.min(self.height - 1))
        })
    }

    pub(crate) fn check_dims(&self, dims: (usize, usize)) -> Result<()> {
        if self.dims() != dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                got: dims,
            });
        }
        Ok(())
    }
}

/// Arithmetic mean of each channel over the set pixels of `mask`.
pub fn mean_rgb_over_mask<F: Frame>(frame: &F, mask: &RoiMask) -> Result<[f64; 3]> {
    mask.check_dims((frame.width(), frame.height()))?;
    let mut acc = [0.0; 3];
    let mut n = 0usize;
    for (i, _) in mask.bits.iter().enumerate().filter(|(_, &b)| b) {
        let p = frame.rgb(i);
        acc[0] += p[0];
        acc[1] += p[1];
        acc[2] += p[2];
        n += 1;
    }
    if n == 0 {
        return Err(Error::EmptyMask);
    }
    let n = n as f64;
    Ok([acc[0] / n, acc[1] / n, acc[2] / n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::RgbImage;
    use proptest::prelude::*;

    #[test]
    fn uniform_frame_full_mask() {
        let f = RgbImage::filled(8, 6, [10, 20, 30]);
        let m = mean_rgb_over_mask(&f, &RoiMask::full(8, 6)).unwrap();
        assert_eq!(m, [10.0, 20.0, 30.0]);
    }

    #[test]
    fn right_half_mask() {
        let f = RgbImage::from_fn(10, 4, |x, _| if x < 5 { [0; 3] } else { [100; 3] });
        let m = mean_rgb_over_mask(&f, &RoiMask::rect(10, 4, 5, 0, 10, 4)).unwrap();
        assert_eq!(m, [100.0; 3]);
    }

    #[test]
    fn empty_and_mismatched_masks() {
        let f = RgbImage::filled(4, 4, [1, 2, 3]);
        assert_eq!(mean_rgb_over_mask(&f, &RoiMask::empty(4, 4)), Err(Error::EmptyMask));
        assert!(matches!(
            mean_rgb_over_mask(&f, &RoiMask::full(5, 4)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bounding_box_and_resample() {
        let m = RoiMask::rect(16, 16, 4, 2, 12, 10);
        assert_eq!(m.bounding_box(), Some((4, 2, 12, 10)));
        let half = m.resample(8, 8);
        assert_eq!(half.bounding_box(), Some((2, 1, 6, 5)));
        assert_eq!(RoiMask::empty(3, 3).bounding_box(), None);
    }

    proptest! {
        #[test]
        fn constant_frame_mean_is_constant(
            c in prop::array::uniform3(0u8..=255),
            bits in prop::collection::vec(any::<bool>(), 48),
        ) {
            prop_assume!(bits.iter().any(|&b| b));
            let f = RgbImage::filled(8, 6, c);
            let m = mean_rgb_over_mask(&f, &RoiMask::new(8, 6, bits).unwrap()).unwrap();
            for k in 0..3 {
                prop_assert!((m[k] - c[k] as f64).abs() < 1e-12);
            }
        }
    }
}

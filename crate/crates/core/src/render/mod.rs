//! Heatmap and timeline rendering into RGB8 images.

mod colormap;

pub use colormap::BLUE_WHITE_RED;

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::imaging::{RgbImage, RoiMask};
use crate::scales::ValueMap;
use crate::{Error, Result};

pub const ABSENT_GRAY: [u8; 3] = [128, 128, 128];
pub const CONTOUR_COLOR: [u8; 3] = [0, 0, 0];

/// Value range mapped onto the colormap.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RangePolicy {
    /// Minimum and maximum of the defined cells.
    #[default]
    Auto,
    Fixed(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Colormap {
    #[default]
    BlueWhiteRed,
}

impl Colormap {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "blue-white-red" | "bwr" => Some(Colormap::BlueWhiteRed),
            _ => None,
        }
    }

    fn table(self) -> &'static [[u8; 3]; 256] {
        match self {
            Colormap::BlueWhiteRed => &BLUE_WHITE_RED,
        }
    }

    /// Colour of `t` in `[0, 1]` (clamped).
    pub fn color(self, t: f64) -> [u8; 3] {
        let i = (t.clamp(0.0, 1.0) * 255.0).round() as usize;
        self.table()[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HeatmapStyle {
    pub range: RangePolicy,
    pub colormap: Colormap,
    /// Integer upscaling factor (nearest neighbour); 0 is treated as 1.
    pub scale: usize,
}

/// Renders `map` with absent cells in gray and, when given, the outline of
/// `contour` (map resolution) in black.
pub fn render_heatmap(map: &ValueMap, style: &HeatmapStyle, contour: Option<&RoiMask>) -> Result<RgbImage> {
    let (w, h) = (map.width, map.height);
    if w == 0 || h == 0 {
        return Err(Error::EmptyMatrix);
    }
    if let Some(c) = contour {
        c.check_dims((w, h))?;
    }
    let (lo, hi) = match style.range {
        RangePolicy::Fixed(lo, hi) => (lo, hi),
        RangePolicy::Auto => map
            .values
            .iter()
            .filter(|v| !v.is_nan())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v))),
    };
    let cell = |x: usize, y: usize| -> [u8; 3] {
        if let Some(c) = contour {
            if c.get(x, y) && on_boundary(c, x, y) {
                return CONTOUR_COLOR;
            }
        }
        match map.get(x, y) {
            None => ABSENT_GRAY,
            Some(v) => {
                let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
                style.colormap.color(t)
            }
        }
    };
    let s = style.scale.max(1);
    Ok(RgbImage::from_fn(w * s, h * s, |x, y| cell(x / s, y / s)))
}

fn on_boundary(m: &RoiMask, x: usize, y: usize) -> bool {
    let (w, h) = m.dims();
    x == 0
        || y == 0
        || x + 1 == w
        || y + 1 == h
        || !m.get(x - 1, y)
        || !m.get(x + 1, y)
        || !m.get(x, y - 1)
        || !m.get(x, y + 1)
}

/// Line plot of `values` (expected in `[0, 1]`, NaN leaves a gap) on a white
/// canvas with a light frame.
pub fn render_timeline_plot(values: &[f64], width: usize, height: usize) -> Result<RgbImage> {
    if values.is_empty() || width < 8 || height < 8 {
        return Err(Error::EmptyMatrix);
    }
    let mut img = RgbImage::filled(width, height, [255, 255, 255]);
    let margin = 4usize;
    let (pw, ph) = (width - 2 * margin, height - 2 * margin);
    for x in margin..width - margin {
        img.set_pixel(x, margin, [200, 200, 200]);
        img.set_pixel(x, height - margin - 1, [200, 200, 200]);
    }
    for y in margin..height - margin {
        img.set_pixel(margin, y, [200, 200, 200]);
        img.set_pixel(width - margin - 1, y, [200, 200, 200]);
    }
    let n = values.len();
    let to_px = |i: usize, v: f64| -> (i64, i64) {
        let fx = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.5 };
        let x = margin as f64 + fx * (pw - 1) as f64;
        let y = margin as f64 + (1.0 - v.clamp(0.0, 1.0)) * (ph - 1) as f64;
        (x.round() as i64, y.round() as i64)
    };
    let pts: Vec<Option<(i64, i64)>> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| (!v.is_nan()).then(|| to_px(i, v)))
        .collect();
    for (k, p) in pts.iter().enumerate() {
        let Some(a) = *p else { continue };
        let b = if k + 1 < n { pts[k + 1].unwrap_or(a) } else { a };
        draw_line(&mut img, a, b, [200, 30, 30]);
    }
    Ok(img)
}

fn draw_line(img: &mut RgbImage, a: (i64, i64), b: (i64, i64), color: [u8; 3]) {
    let (w, h) = img.dims();
    let (mut x, mut y) = a;
    let (dx, dy) = ((b.0 - a.0).abs(), -(b.1 - a.1).abs());
    let (sx, sy) = (if a.0 < b.0 { 1 } else { -1 }, if a.1 < b.1 { 1 } else { -1 });
    let mut err = dx + dy;
    loop {
        if x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h {
            img.set_pixel(x as usize, y as usize, color);
        }
        if x == b.0 && y == b.1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn map(w: usize, h: usize, v: &[f64]) -> ValueMap {
        ValueMap {
            width: w,
            height: h,
            values: v.to_vec(),
        }
    }

    #[test]
    fn checkerboard_hits_range_endpoints() {
        let img = render_heatmap(&map(2, 2, &[0.0, 1.0, 1.0, 0.0]), &HeatmapStyle::default(), None).unwrap();
        assert_eq!(img.pixel(0, 0), [0, 0, 255]);
        assert_eq!(img.pixel(1, 0), [255, 0, 0]);
        assert_eq!(img.pixel(0, 1), [255, 0, 0]);
        assert_eq!(img.pixel(1, 1), [0, 0, 255]);
    }

    #[test]
    fn constant_is_mid_scale() {
        let img = render_heatmap(&map(3, 2, &[4.2; 6]), &HeatmapStyle::default(), None).unwrap();
        let mid = Colormap::BlueWhiteRed.color(0.5);
        assert_eq!(mid, BLUE_WHITE_RED[128]);
        assert!((0..6).all(|i| img.pixel(i % 3, i / 3) == mid));
    }

    #[test]
    fn absent_cell_is_gray() {
        let img = render_heatmap(&map(2, 2, &[0.0, f64::NAN, 1.0, 0.5]), &HeatmapStyle::default(), None).unwrap();
        let grays: Vec<_> = (0..4).filter(|&i| img.pixel(i % 2, i / 2) == ABSENT_GRAY).collect();
        assert_eq!(grays, [1]);
    }

    #[test]
    fn empty_matrix() {
        assert_eq!(render_heatmap(&map(0, 0, &[]), &HeatmapStyle::default(), None), Err(Error::EmptyMatrix));
    }

    #[test]
    fn scale_and_contour() {
        let m = map(4, 4, &[1.0; 16]);
        let style = HeatmapStyle {
            scale: 3,
            ..HeatmapStyle::default()
        };
        let c = RoiMask::rect(4, 4, 0, 0, 4, 4);
        let img = render_heatmap(&m, &style, Some(&c)).unwrap();
        assert_eq!(img.dims(), (12, 12));
        assert_eq!(img.pixel(0, 0), CONTOUR_COLOR);
        let inner = RoiMask::rect(4, 4, 1, 1, 3, 3);
        let img = render_heatmap(&m, &HeatmapStyle::default(), Some(&RoiMask::full(4, 4).and(&inner).unwrap())).unwrap();
        assert_eq!(img.pixel(1, 1), CONTOUR_COLOR);
        assert_eq!(img.pixel(0, 0), Colormap::BlueWhiteRed.color(0.5));
    }

    #[test]
    fn lut_shape() {
        assert_eq!(BLUE_WHITE_RED[0], [0, 0, 255]);
        assert_eq!(BLUE_WHITE_RED[255], [255, 0, 0]);
        for w in BLUE_WHITE_RED.windows(2) {
            assert!(w[0][0] <= w[1][0]);
            assert!(w[0][2] >= w[1][2]);
        }
    }

    #[test]
    fn timeline_plot_draws() {
        let img = render_timeline_plot(&[0.0, 0.5, 1.0, f64::NAN, 0.2], 64, 32).unwrap();
        let red = (0..64 * 32).filter(|&i| img.pixel(i % 64, i / 64) == [200, 30, 30]).count();
        assert!(red > 20);
        assert!(render_timeline_plot(&[], 64, 32).is_err());
    }

    proptest! {
        #[test]
        fn red_channel_monotone(vals in prop::collection::vec(-50.0f64..50.0, 2..40)) {
            let n = vals.len();
            let img = render_heatmap(&map(n, 1, &vals), &HeatmapStyle::default(), None).unwrap();
            for i in 0..n {
                for j in 0..n {
                    if vals[i] < vals[j] {
                        prop_assert!(img.pixel(i, 0)[0] <= img.pixel(j, 0)[0]);
                    }
                }
            }
        }
    }
}

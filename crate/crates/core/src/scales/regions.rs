use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::global::{collect_traces, frame_means, Preprocess};
use super::{check_duration, correlation, window_starts, MetricsTimeline, WindowAnalyzer};
use crate::exec::Executor;
use crate::imaging::{FrameSequence, Registration, RoiMask};
use crate::pad::select_reference_region;
use crate::signal::AnalysisConfig;
use crate::{Error, Result};

pub const LANDMARK_COUNT: usize = 68;

/// 68 facial landmarks in the iBUG ordering, in pixel coordinates with pixel
/// centres at integer positions.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkSet {
    points: Vec<(f64, f64)>,
}

impl LandmarkSet {
    /// Checks the point count and that every point lies inside a
    /// `width × height` frame.
    pub fn new(points: Vec<(f64, f64)>, width: usize, height: usize) -> Result<Self> {
        if points.len() != LANDMARK_COUNT {
            return Err(Error::DegenerateLandmarks(format!(
                "expected {LANDMARK_COUNT} points, got {}",
                points.len()
            )));
        }
        let (wmax, hmax) = (width as f64 - 1.0, height as f64 - 1.0);
        if let Some((i, p)) = points
            .iter()
            .enumerate()
            .find(|(_, (x, y))| !(*x >= 0.0 && *x <= wmax && *y >= 0.0 && *y <= hmax))
        {
            return Err(Error::DegenerateLandmarks(format!(
                "point {i} at ({}, {}) lies outside the {width}x{height} frame",
                p.0, p.1
            )));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    fn p(&self, i: usize) -> (f64, f64) {
        self.points[i]
    }

    /// Horizontal mirror image inside a frame of the given width. Indices are
    /// kept, so subject-left points land on the image's other side.
    pub fn mirrored(&self, width: usize) -> Self {
        let w = width as f64 - 1.0;
        Self {
            points: self.points.iter().map(|&(x, y)| (w - x, y)).collect(),
        }
    }
}

/// Landmarks of an idealized frontal face centred at `(cx, cy)` whose jaw
/// spans `scale` pixels. Test fixture and synthetic-video helper.
pub fn frontal_landmarks(cx: f64, cy: f64, scale: f64) -> Vec<(f64, f64)> {
    use core::f64::consts::PI;
    let mut u: Vec<(f64, f64)> = Vec::with_capacity(LANDMARK_COUNT);
    // Jaw 0..=16, from the subject's right ear around the chin.
    for i in 0..17 {
        let a = PI * i as f64 / 16.0;
        u.push((-0.5 * a.cos(), 0.6 * a.sin()));
    }
    // Brows 17..=21 and 22..=26.
    for k in 0..5 {
        let x = -0.38 + 0.075 * k as f64;
        u.push((x, -0.18 - 0.04 * (PI * k as f64 / 4.0).sin()));
    }
    for k in 0..5 {
        let x = 0.08 + 0.075 * k as f64;
        u.push((x, -0.18 - 0.04 * (PI * k as f64 / 4.0).sin()));
    }
    // Nose bridge 27..=30 and base 31..=35.
    for k in 0..4 {
        u.push((0.0, -0.08 + 0.0667 * k as f64));
    }
    u.extend_from_slice(&[(-0.09, 0.17), (-0.045, 0.19), (0.0, 0.2), (0.045, 0.19), (0.09, 0.17)]);
    // Eyes 36..=41 and 42..=47.
    u.extend_from_slice(&[
        (-0.29, -0.07),
        (-0.23, -0.1),
        (-0.17, -0.1),
        (-0.11, -0.07),
        (-0.17, -0.045),
        (-0.23, -0.045),
        (0.11, -0.07),
        (0.17, -0.1),
        (0.23, -0.1),
        (0.29, -0.07),
        (0.23, -0.045),
        (0.17, -0.045),
    ]);
    // Outer lip 48..=59 and inner lip 60..=67.
    u.extend_from_slice(&[
        (-0.17, 0.33),
        (-0.11, 0.3),
        (-0.04, 0.285),
        (0.0, 0.29),
        (0.04, 0.285),
        (0.11, 0.3),
        (0.17, 0.33),
        (0.11, 0.38),
        (0.04, 0.4),
        (0.0, 0.405),
        (-0.04, 0.4),
        (-0.11, 0.38),
        (-0.14, 0.33),
        (-0.04, 0.315),
        (0.0, 0.315),
        (0.04, 0.315),
        (0.14, 0.33),
        (0.04, 0.35),
        (0.0, 0.35),
        (-0.04, 0.35),
    ]);
    u.into_iter().map(|(x, y)| (cx + scale * x, cy + scale * y)).collect()
}

/// The five analysed facial regions, in canonical order. Left and right are
/// the subject's.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionName {
    RightForehead,
    LeftForehead,
    RightCheek,
    LeftCheek,
    Nose,
}

impl RegionName {
    pub const ALL: [RegionName; 5] = [
        RegionName::RightForehead,
        RegionName::LeftForehead,
        RegionName::RightCheek,
        RegionName::LeftCheek,
        RegionName::Nose,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RegionName::RightForehead => "right-forehead",
            RegionName::LeftForehead => "left-forehead",
            RegionName::RightCheek => "right-cheek",
            RegionName::LeftCheek => "left-cheek",
            RegionName::Nose => "nose",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.as_str() == s)
    }
}

impl core::fmt::Display for RegionName {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How a region polygon is built from the landmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionSource {
    /// Eyebrow points (outer to inner) plus the same points moved towards the
    /// top of the head by [`FOREHEAD_EXTENT`] times the brow–chin distance.
    Forehead(&'static [usize]),
    /// Polygon through the listed landmarks.
    Landmarks(&'static [usize]),
}

pub const FOREHEAD_EXTENT: f64 = 0.6;
const CHIN: usize = 8;
const AREA_MIN: f64 = 25.0;

/// Landmark index sets of the five regions. Mouth, chin and eyes stay outside
/// every polygon.
pub const REGION_TABLE: [(RegionName, RegionSource); 5] = [
    (RegionName::RightForehead, RegionSource::Forehead(&[17, 18, 19, 20, 21])),
    (RegionName::LeftForehead, RegionSource::Forehead(&[26, 25, 24, 23, 22])),
    (RegionName::RightCheek, RegionSource::Landmarks(&[1, 2, 3, 4, 48, 31, 40, 41, 36])),
    (RegionName::LeftCheek, RegionSource::Landmarks(&[15, 14, 13, 12, 54, 35, 47, 46, 45])),
    (RegionName::Nose, RegionSource::Landmarks(&[27, 35, 34, 33, 32, 31])),
];

#[derive(Debug, Clone, PartialEq)]
pub struct RegionSpec {
    pub name: RegionName,
    pub polygon: Vec<(f64, f64)>,
}

/// Shoelace area (absolute value).
pub fn polygon_area(poly: &[(f64, f64)]) -> f64 {
    let n = poly.len();
    let s: f64 = (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum();
    0.5 * s.abs()
}

/// Even–odd point-in-polygon test.
pub fn point_in_polygon(poly: &[(f64, f64)], x: f64, y: f64) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = poly[i];
        let (xj, yj) = poly[j];
        if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Region polygons from one landmark set; fails when any polygon is smaller
/// than 25 px².
pub fn regions_from_landmarks(lm: &LandmarkSet) -> Result<Vec<RegionSpec>> {
    let brow_mid = {
        let (a, b) = (lm.p(21), lm.p(22));
        (0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1))
    };
    let chin = lm.p(CHIN);
    let (vx, vy) = (brow_mid.0 - chin.0, brow_mid.1 - chin.1);
    let (ux, uy) = (FOREHEAD_EXTENT * vx, FOREHEAD_EXTENT * vy);
    REGION_TABLE
        .iter()
        .map(|&(name, src)| {
            let polygon: Vec<(f64, f64)> = match src {
                RegionSource::Forehead(brow) => {
                    let lower = brow.iter().map(|&i| lm.p(i));
                    let upper = brow.iter().rev().map(|&i| {
                        let p = lm.p(i);
                        (p.0 + ux, p.1 + uy)
                    });
                    lower.chain(upper).collect()
                }
                RegionSource::Landmarks(idx) => idx.iter().map(|&i| lm.p(i)).collect(),
            };
            let area = polygon_area(&polygon);
            if !(area >= AREA_MIN) {
                return Err(Error::DegenerateLandmarks(format!(
                    "{name} polygon area {area:.2} px² is below {AREA_MIN} px²"
                )));
            }
            Ok(RegionSpec { name, polygon })
        })
        .collect()
}

/// Pixels whose centre lies inside `poly`.
pub fn rasterize_polygon(poly: &[(f64, f64)], width: usize, height: usize) -> RoiMask {
    let mut m = RoiMask::empty(width, height);
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in poly {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if !(x1 >= 0.0 && y1 >= 0.0) || width == 0 || height == 0 {
        return m;
    }
    let xs = x0.max(0.0).floor() as usize;
    let ys = y0.max(0.0).floor() as usize;
    let xe = (x1.ceil() as usize).min(width - 1);
    let ye = (y1.ceil() as usize).min(height - 1);
    for y in ys..=ye {
        for x in xs..=xe {
            if point_in_polygon(poly, x as f64, y as f64) {
                m.set(x, y, true);
            }
        }
    }
    m
}

/// Rasterized regions; a pixel on a shared boundary goes to the earlier
/// region so the masks stay disjoint.
pub fn region_masks(specs: &[RegionSpec], width: usize, height: usize) -> Vec<RoiMask> {
    let mut taken = RoiMask::empty(width, height);
    specs
        .iter()
        .map(|s| {
            let m = rasterize_polygon(&s.polygon, width, height)
                .and_not(&taken)
                .expect("same dimensions");
            for (i, &b) in m.bits().iter().enumerate() {
                if b {
                    taken.set(i % width, i / width, true);
                }
            }
            m
        })
        .collect()
}

/// Landmarks for a recording: one set reused for every frame, or one per frame.
#[derive(Debug, Clone, PartialEq)]
pub enum LandmarkInput {
    Static(LandmarkSet),
    PerFrame(Vec<LandmarkSet>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionAnalysis {
    /// Timelines in canonical region order.
    pub regions: Vec<(RegionName, MetricsTimeline)>,
    /// Region whose pulse served as correlation reference.
    pub reference: RegionName,
    /// Region polygons of the first frame.
    pub specs: Vec<RegionSpec>,
    pub registrations: Vec<Registration>,
}

impl RegionAnalysis {
    pub fn timeline(&self, name: RegionName) -> Option<&MetricsTimeline> {
        self.regions.iter().find(|(n, _)| *n == name).map(|(_, t)| t)
    }
}

fn union(masks: &[RoiMask]) -> RoiMask {
    let (w, h) = masks[0].dims();
    RoiMask::from_fn(w, h, |x, y| masks.iter().any(|m| m.get(x, y)))
}

/// Sliding-window metrics of each facial region. `rho_ref` correlates every
/// region with the region of highest mean SNR.
pub fn analyze_regions<E: Executor>(
    seq: &FrameSequence,
    landmarks: &LandmarkInput,
    cfg: &AnalysisConfig,
    pre: Preprocess,
    exec: &E,
) -> Result<RegionAnalysis> {
    cfg.validate()?;
    check_duration(seq.len(), seq.fs, cfg)?;
    let (w, h) = (seq.width, seq.height);
    let first = &seq.frames[0];
    let (specs, per_frame) = match landmarks {
        LandmarkInput::Static(lm) => {
            let specs = regions_from_landmarks(lm)?;
            let masks = region_masks(&specs, w, h);
            let search = union(&masks);
            let refs: Vec<&RoiMask> = masks.iter().collect();
            let per = exec.map(seq.len(), |i| frame_means(first, &seq.frames[i], &refs, Some(&search), pre));
            (specs, per)
        }
        LandmarkInput::PerFrame(sets) => {
            if sets.len() != seq.len() {
                return Err(Error::LengthMismatch(sets.len(), seq.len()));
            }
            let specs = regions_from_landmarks(&sets[0])?;
            let search = union(&region_masks(&specs, w, h));
            let per = exec.map(seq.len(), |i| {
                let masks = region_masks(&regions_from_landmarks(&sets[i])?, w, h);
                let refs: Vec<&RoiMask> = masks.iter().collect();
                frame_means(first, &seq.frames[i], &refs, Some(&search), pre)
            });
            (specs, per)
        }
    };
    let (traces, registrations) = collect_traces(per_frame, specs.len(), seq.fs)?;

    let wa = WindowAnalyzer::new(cfg, seq.fs)?;
    let win = wa.window_len();
    let starts = window_starts(seq.len(), seq.fs, cfg);
    let rows = exec.map(starts.len(), |k| -> Result<Vec<_>> {
        let s = starts[k];
        traces
            .iter()
            .map(|tr| {
                let raw = tr.slice(s..s + win);
                let pulse = wa.pulse(&raw)?.samples;
                let m = wa.metrics(s as f64 / seq.fs, &raw, &pulse, None)?;
                Ok((m, pulse))
            })
            .collect()
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;

    let mut regions: Vec<(RegionName, MetricsTimeline)> =
        specs.iter().map(|s| (s.name, MetricsTimeline::default())).collect();
    for row in &rows {
        for (r, (m, _)) in row.iter().enumerate() {
            regions[r].1.entries.push(m.clone());
        }
    }
    let reference = select_reference_region(&regions)?;
    let ref_idx = regions.iter().position(|(n, _)| *n == reference).expect("selected from list");
    for (k, row) in rows.iter().enumerate() {
        let ref_pulse = &row[ref_idx].1;
        for (r, (_, pulse)) in row.iter().enumerate() {
            regions[r].1.entries[k].rho_ref = correlation(pulse, ref_pulse);
        }
    }
    Ok(RegionAnalysis {
        regions,
        reference,
        specs,
        registrations,
    })
}

use alloc::vec::Vec;

use super::MetricsTimeline;

/// Min–max scaling to `[0, 1]`; a constant series maps to 0.5.
pub fn normalize_min_max(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return values.iter().map(|_| 0.5).collect();
    }
    values.iter().map(|v| (v - lo) / (hi - lo)).collect()
}

/// Reperfusion signature of a timeline: the window where the normalized
/// perfusion index peaks.
#[derive(Debug, Clone, PartialEq)]
pub struct ReperfusionEvent {
    pub window: usize,
    /// `t_start` of the peak window in seconds.
    pub t_peak: f64,
    /// Perfusion index per window scaled to `[0, 1]`.
    pub normalized_pi: Vec<f64>,
}

/// Locates the perfusion-index peak. Windows without a PI are skipped; ties
/// go to the earliest window.
pub fn detect_reperfusion(timeline: &MetricsTimeline) -> Option<ReperfusionEvent> {
    let (idx, pi): (Vec<usize>, Vec<f64>) = timeline
        .entries
        .iter()
        .enumerate()
        .filter_map(|(i, e)| e.pi.map(|p| (i, p)))
        .unzip();
    if pi.is_empty() {
        return None;
    }
    let norm = normalize_min_max(&pi);
    let mut best = 0;
    for (k, v) in norm.iter().enumerate() {
        if *v > norm[best] {
            best = k;
        }
    }
    let window = idx[best];
    let mut normalized_pi = alloc::vec![f64::NAN; timeline.len()];
    for (k, &i) in idx.iter().enumerate() {
        normalized_pi[i] = norm[k];
    }
    Some(ReperfusionEvent {
        window,
        t_peak: timeline.entries[window].t_start,
        normalized_pi,
    })
}

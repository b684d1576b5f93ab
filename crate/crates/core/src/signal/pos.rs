use alloc::vec::Vec;

use super::{mean, std_dev, RgbTrace, RppgSignal};

/// The two chrominance planes orthogonal to the skin-tone direction.
#[derive(Debug, Clone, PartialEq)]
pub struct PosPlanes {
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosProjection {
    pub planes: PosPlanes,
    /// Zero-mean pulse signal `h(t)`.
    pub pulse: RppgSignal,
    /// Set when `sigma(S2)` vanished and `h` fell back to `S1`.
    pub degenerate: bool,
}

/// Projects a normalized trace onto the plane orthogonal to skin and fuses
/// both planes with the ratio of their standard deviations.
pub fn pos_project(trace: &RgbTrace) -> PosProjection {
    let s1: Vec<f64> = trace.g.iter().zip(&trace.b).map(|(g, b)| g - b).collect();
    let s2: Vec<f64> = trace
        .r
        .iter()
        .zip(trace.g.iter().zip(&trace.b))
        .map(|(r, (g, b))| g + b - 2.0 * r)
        .collect();

    let sigma2 = std_dev(&s2);
    let degenerate = !(sigma2 >= 1e-12);
    let mut h: Vec<f64> = if degenerate {
        s1.clone()
    } else {
        let alpha = std_dev(&s1) / sigma2;
        s1.iter().zip(&s2).map(|(a, b)| a + alpha * b).collect()
    };
    let m = mean(&h);
    h.iter_mut().for_each(|v| *v -= m);

    PosProjection {
        planes: PosPlanes { s1, s2 },
        pulse: RppgSignal::new(h, trace.fs),
        degenerate,
    }
}

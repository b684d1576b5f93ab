//! Soft-margin SVM with a cubic polynomial kernel, trained by SMO with
//! second-order working-set selection.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

const TAU: f64 = 1e-12;

/// `(gamma·⟨x, y⟩ + coef0)^degree`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Kernel {
    pub degree: u32,
    pub gamma: f64,
    pub coef0: f64,
}

impl Kernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        (self.gamma * dot + self.coef0).powi(self.degree as i32)
    }
}

/// Per-feature standardization fitted on training data.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Scaler {
    pub fn fit(x: &[Vec<f64>]) -> Self {
        let d = x[0].len();
        let n = x.len() as f64;
        let mut mean = vec![0.0; d];
        for row in x {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v / n;
            }
        }
        let mut std = vec![0.0; d];
        for row in x {
            for ((s, v), m) in std.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m) / n;
            }
        }
        std.iter_mut().for_each(|s| *s = s.sqrt());
        Self { mean, std }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            mean: vec![0.0; d],
            std: vec![1.0; d],
        }
    }

    /// Standardized copy of `x`; a feature without spread maps to 0.
    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| if *s > 1e-12 { (v - m) / s } else { 0.0 })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams {
    /// Box constraint.
    pub c: f64,
    /// Kernel scale; `1 / feature_count` when absent.
    pub gamma: Option<f64>,
    pub coef0: f64,
    /// Stopping tolerance on the maximal KKT violation.
    pub tol: f64,
    pub max_iter: usize,
    /// Fit a scaler; otherwise features are used as given.
    pub standardize: bool,
    /// Keep the dual objective after every iteration in [`SmoStats`].
    pub record_objective: bool,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            gamma: None,
            coef0: 1.0,
            tol: 1e-3,
            max_iter: 1_000_000,
            standardize: true,
            record_objective: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SvmModel {
    pub kernel: Kernel,
    pub c: f64,
    pub scaler: Scaler,
    /// Standardized support vectors.
    pub support_vectors: Vec<Vec<f64>>,
    /// `alpha_i · y_i` for each support vector.
    pub coefficients: Vec<f64>,
    pub bias: f64,
}

/// Solver diagnostics on the training set.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoStats {
    pub iterations: usize,
    /// Dual variables of every training sample.
    pub alphas: Vec<f64>,
    /// Labels in ±1 form.
    pub y: Vec<f64>,
    /// Gradient of the minimized objective `½αᵀQα − eᵀα`.
    pub gradient: Vec<f64>,
    /// Dual objective `eᵀα − ½αᵀQα` after each iteration, when recorded.
    pub objective: Vec<f64>,
}

impl SmoStats {
    /// Largest violation `max_{I_up} −y∇f − min_{I_low} −y∇f` of the KKT
    /// conditions.
    pub fn kkt_violation(&self, c: f64) -> f64 {
        let (mut up, mut low) = (f64::NEG_INFINITY, f64::INFINITY);
        for ((a, y), g) in self.alphas.iter().zip(&self.y).zip(&self.gradient) {
            let v = -y * g;
            let in_up = (*y > 0.0 && *a < c) || (*y < 0.0 && *a > 0.0);
            let in_low = (*y > 0.0 && *a > 0.0) || (*y < 0.0 && *a < c);
            if in_up {
                up = up.max(v);
            }
            if in_low {
                low = low.min(v);
            }
        }
        (up - low).max(0.0)
    }
}

impl SvmModel {
    /// Decision value of a standardized feature vector.
    fn decision_std(&self, z: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.coefficients)
            .map(|(sv, c)| c * self.kernel.eval(sv, z))
            .sum::<f64>()
            + self.bias
    }

    pub fn dim(&self) -> usize {
        self.scaler.mean.len()
    }

    /// Label (1 = attack when the decision value is non-negative) and decision value.
    pub fn predict(&self, x: &[f64]) -> Result<(u8, f64)> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: (self.dim(), 1),
                got: (x.len(), 1),
            });
        }
        let d = self.decision_std(&self.scaler.transform(x));
        Ok((u8::from(d >= 0.0), d))
    }

    /// Fits a model on `x` with binary labels `labels` (1 = positive class).
    pub fn train(x: &[Vec<f64>], labels: &[u8], params: &SvmParams) -> Result<(Self, SmoStats)> {
        if x.len() != labels.len() {
            return Err(Error::LengthMismatch(x.len(), labels.len()));
        }
        if x.is_empty() {
            return Err(Error::InsufficientData("no training samples".into()));
        }
        let d = x[0].len();
        if let Some(bad) = x.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: (d, 1),
                got: (bad.len(), 1),
            });
        }
        if x.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InsufficientData("non-finite feature value".into()));
        }
        if labels.iter().all(|&l| l == labels[0]) {
            return Err(Error::SingleClass);
        }
        let scaler = if params.standardize {
            Scaler::fit(x)
        } else {
            Scaler::identity(d)
        };
        let z: Vec<Vec<f64>> = x.iter().map(|r| scaler.transform(r)).collect();
        let kernel = Kernel {
            degree: 3,
            gamma: params.gamma.unwrap_or(1.0 / d as f64),
            coef0: params.coef0,
        };
        let y: Vec<f64> = labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
        let stats = smo(&z, &y, kernel, params)?;
        let bias = -rho(&stats, params.c);
        let (mut svs, mut coefs) = (Vec::new(), Vec::new());
        for (i, &a) in stats.alphas.iter().enumerate() {
            if a > 0.0 {
                svs.push(z[i].clone());
                coefs.push(a * y[i]);
            }
        }
        Ok((
            Self {
                kernel,
                c: params.c,
                scaler,
                support_vectors: svs,
                coefficients: coefs,
                bias,
            },
            stats,
        ))
    }
}

fn smo(z: &[Vec<f64>], y: &[f64], kernel: Kernel, params: &SvmParams) -> Result<SmoStats> {
    let n = z.len();
    let c = params.c;
    // Q_ij = y_i y_j K(x_i, x_j), stored densely.
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = y[i] * y[j] * kernel.eval(&z[i], &z[j]);
            q[i * n + j] = v;
            q[j * n + i] = v;
        }
    }
    let qd: Vec<f64> = (0..n).map(|i| q[i * n + i]).collect();
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut objective = Vec::new();
    let is_upper = |a: f64| a >= c;
    let is_lower = |a: f64| a <= 0.0;

    let mut iter = 0;
    loop {
        // Working set: i maximizes -y∇f over I_up, j minimizes the
        // second-order objective decrease over I_low.
        let (mut gmax, mut gmax_idx) = (f64::NEG_INFINITY, usize::MAX);
        for t in 0..n {
            if y[t] > 0.0 {
                if !is_upper(alpha[t]) && -grad[t] >= gmax {
                    gmax = -grad[t];
                    gmax_idx = t;
                }
            } else if !is_lower(alpha[t]) && grad[t] >= gmax {
                gmax = grad[t];
                gmax_idx = t;
            }
        }
        let i = gmax_idx;
        let (mut gmax2, mut gmin_idx, mut obj_min) = (f64::NEG_INFINITY, usize::MAX, f64::INFINITY);
        if i != usize::MAX {
            let qi = &q[i * n..(i + 1) * n];
            for t in 0..n {
                let (diff, quad) = if y[t] > 0.0 {
                    if is_lower(alpha[t]) {
                        continue;
                    }
                    gmax2 = gmax2.max(grad[t]);
                    (gmax + grad[t], qd[i] + qd[t] - 2.0 * y[i] * qi[t])
                } else {
                    if is_upper(alpha[t]) {
                        continue;
                    }
                    gmax2 = gmax2.max(-grad[t]);
                    (gmax - grad[t], qd[i] + qd[t] + 2.0 * y[i] * qi[t])
                };
                if diff > 0.0 {
                    let obj = -(diff * diff) / if quad > 0.0 { quad } else { TAU };
                    if obj <= obj_min {
                        gmin_idx = t;
                        obj_min = obj;
                    }
                }
            }
        }
        if i == usize::MAX || gmin_idx == usize::MAX || gmax + gmax2 < params.tol {
            break;
        }
        if iter >= params.max_iter {
            return Err(Error::NoConvergence(params.max_iter));
        }
        iter += 1;
        let j = gmin_idx;
        let qij = q[i * n + j];
        let (ai_old, aj_old) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let quad = (qd[i] + qd[j] + 2.0 * qij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (qd[i] + qd[j] - 2.0 * qij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (dai, daj) = (alpha[i] - ai_old, alpha[j] - aj_old);
        let (qi, qj) = (&q[i * n..(i + 1) * n], &q[j * n..(j + 1) * n]);
        for k in 0..n {
            grad[k] += qi[k] * dai + qj[k] * daj;
        }
        if params.record_objective {
            // -f(α) with f = ½αᵀQα − eᵀα = ½ Σ α_k (∇f_k − 1).
            let f: f64 = alpha.iter().zip(&grad).map(|(a, g)| 0.5 * a * (g - 1.0)).sum();
            objective.push(-f);
        }
    }
    Ok(SmoStats {
        iterations: iter,
        alphas: alpha,
        y: y.to_vec(),
        gradient: grad,
        objective,
    })
}

/// Offset `rho` of the decision function `Σ α_i y_i K(x_i, x) − rho`.
fn rho(stats: &SmoStats, c: f64) -> f64 {
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut n_free, mut sum_free) = (0usize, 0.0);
    for ((a, y), g) in stats.alphas.iter().zip(&stats.y).zip(&stats.gradient) {
        let yg = y * g;
        if *a >= c {
            if *y < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if *a <= 0.0 {
            if *y > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    if n_free > 0 {
        sum_free / n_free as f64
    } else {
        0.5 * (ub + lb)
    }
}

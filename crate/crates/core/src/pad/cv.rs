use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::svm::{SvmModel, SvmParams};
use super::{PadSample, LABEL_ATTACK};
use crate::exec::Executor;
use crate::{Error, Result};

/// Binary confusion matrix; rows are actual classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Confusion {
    /// Actual 0, predicted 0.
    pub tn: usize,
    /// Actual 0, predicted 1.
    pub fp: usize,
    /// Actual 1, predicted 0.
    pub fn_: usize,
    /// Actual 1, predicted 1.
    pub tp: usize,
}

impl Confusion {
    pub fn add(&mut self, actual: u8, predicted: u8) {
        match (actual, predicted) {
            (0, 0) => self.tn += 1,
            (0, _) => self.fp += 1,
            (_, 0) => self.fn_ += 1,
            _ => self.tp += 1,
        }
    }

    pub fn merge(&mut self, o: &Confusion) {
        self.tn += o.tn;
        self.fp += o.fp;
        self.fn_ += o.fn_;
        self.tp += o.tp;
    }

    pub fn total(&self) -> usize {
        self.tn + self.fp + self.fn_ + self.tp
    }

    /// Row sums `(actual 0, actual 1)`.
    pub fn row_sums(&self) -> (usize, usize) {
        (self.tn + self.fp, self.fn_ + self.tp)
    }

    pub fn accuracy(&self) -> f64 {
        (self.tn + self.tp) as f64 / self.total() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldReport {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub accuracy: f64,
    pub confusion: Confusion,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CvReport {
    pub folds: Vec<FoldReport>,
    /// Unweighted mean of the fold accuracies.
    pub mean_accuracy: f64,
    /// Pooled over all validation folds.
    pub confusion: Confusion,
}

/// Fold index per sample such that every subject falls into exactly one
/// fold. Subjects are placed largest first into the currently smallest fold.
pub fn subject_folds(subjects: &[&str], folds: usize) -> Result<Vec<usize>> {
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, s) in subjects.iter().enumerate() {
        groups.entry(s).or_default().push(i);
    }
    if folds < 2 || groups.len() < folds {
        return Err(Error::InsufficientData(format!(
            "{} subjects cannot fill {folds} subject-disjoint folds",
            groups.len()
        )));
    }
    let mut order: Vec<(&str, Vec<usize>)> = groups.into_iter().collect();
    order.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(b.0)));
    let mut sizes = vec![0usize; folds];
    let mut assign = vec![0usize; subjects.len()];
    for (_, idx) in order {
        let f = (0..folds).min_by_key(|&f| (sizes[f], f)).expect("folds >= 2");
        sizes[f] += idx.len();
        for i in idx {
            assign[i] = f;
        }
    }
    Ok(assign)
}

/// Subject-disjoint train/test split approaching `train_fraction` of the
/// samples in the training part. Subjects are visited in sorted order and
/// each goes to whichever side is further below its target.
pub fn subject_split(subjects: &[&str], train_fraction: f64) -> Vec<bool> {
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, s) in subjects.iter().enumerate() {
        groups.entry(s).or_default().push(i);
    }
    let total = subjects.len() as f64;
    let (mut n_train, mut n_test) = (0usize, 0usize);
    let mut is_train = vec![false; subjects.len()];
    for (_, idx) in groups {
        let train_gap = train_fraction * total - n_train as f64;
        let test_gap = (1.0 - train_fraction) * total - n_test as f64;
        let to_train = train_gap >= test_gap;
        for &i in &idx {
            is_train[i] = to_train;
        }
        if to_train {
            n_train += idx.len();
        } else {
            n_test += idx.len();
        }
    }
    is_train
}

/// Trains the final model on every sample and reports subject-disjoint
/// k-fold cross-validation. Folds are trained independently on `exec`.
pub fn svm_train<E: Executor>(
    samples: &[PadSample],
    folds: usize,
    params: &SvmParams,
    exec: &E,
) -> Result<(SvmModel, CvReport)> {
    let n_pos = samples.iter().filter(|s| s.label == LABEL_ATTACK).count();
    let n_neg = samples.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    if n_pos < folds || n_neg < folds {
        return Err(Error::InsufficientData(format!(
            "need at least {folds} samples per class, got {n_neg} genuine and {n_pos} attack"
        )));
    }
    let subjects: Vec<&str> = samples.iter().map(|s| s.subject_id.as_str()).collect();
    let assign = subject_folds(&subjects, folds)?;
    let x: Vec<Vec<f64>> = samples.iter().map(|s| s.features.to_vec()).collect();
    let y: Vec<u8> = samples.iter().map(|s| s.label).collect();

    let reports = exec.map(folds, |f| -> Result<FoldReport> {
        let (mut xt, mut yt) = (Vec::new(), Vec::new());
        for i in (0..x.len()).filter(|&i| assign[i] != f) {
            xt.push(x[i].clone());
            yt.push(y[i]);
        }
        let (model, _) = SvmModel::train(&xt, &yt, params)?;
        let mut conf = Confusion::default();
        for i in (0..x.len()).filter(|&i| assign[i] == f) {
            conf.add(y[i], model.predict(&x[i])?.0);
        }
        Ok(FoldReport {
            fold: f,
            n_train: xt.len(),
            n_test: conf.total(),
            accuracy: conf.accuracy(),
            confusion: conf,
        })
    });
    let folds_rep = reports.into_iter().collect::<Result<Vec<_>>>()?;
    let mut pooled = Confusion::default();
    for r in &folds_rep {
        pooled.merge(&r.confusion);
    }
    let mean_accuracy = folds_rep.iter().map(|r| r.accuracy).sum::<f64>() / folds_rep.len() as f64;
    let (model, _) = SvmModel::train(&x, &y, params)?;
    Ok((
        model,
        CvReport {
            folds: folds_rep,
            mean_accuracy,
            confusion: pooled,
        },
    ))
}

/// Per-video decision by majority over its sample labels; a tie counts as an
/// attack.
pub fn video_verdict(labels: &[u8]) -> u8 {
    let attacks = labels.iter().filter(|&&l| l == LABEL_ATTACK).count();
    u8::from(2 * attacks >= labels.len())
}

//! Ambiguous 0-1 loss, the average- and max-prediction hinge surrogates,
//! and their subgradients.
//!
//! Both hinge losses are evaluated as `[1 - margin]_+` from the same margin
//! that decides whether the subgradient is nonzero, so `loss > 0` holds
//! exactly when `margin < 1`.

use crate::error::{Error, Result};
use crate::model::{argmax_in, CandidateLabelSet, GradientMatrix, WeightMatrix};

/// Which surrogate a learner descends on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Surrogate {
    /// Average prediction hinge: mean score over `Y` against the best of `Ȳ`.
    Average,
    /// Max prediction hinge: best score in `Y` against the best of `Ȳ`.
    Max,
}

/// Every score statistic the losses and subgradients need, computed once.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginSummary {
    pub scores: Vec<f64>,
    /// Mean score over `Y`.
    pub mean_in: f64,
    pub max_in: f64,
    pub argmax_in: usize,
    pub max_out: f64,
    pub argmax_out: usize,
}

impl MarginSummary {
    pub fn new(w: &WeightMatrix, x: &[f64], set: &CandidateLabelSet) -> Result<Self> {
        if set.num_classes() != w.num_classes() {
            return Err(Error::InvalidLabelSet(format!(
                "label set built for {} classes, model has {}",
                set.num_classes(),
                w.num_classes()
            )));
        }
        let scores = w.score(x)?;
        Ok(Self::from_scores(scores, set))
    }

    fn from_scores(scores: Vec<f64>, set: &CandidateLabelSet) -> Self {
        // Both sets are nonempty by construction of CandidateLabelSet.
        let in_idx = argmax_in(&scores, set.labels().iter().copied()).expect("nonempty Y");
        let out_idx = argmax_in(&scores, set.complement()).expect("nonempty complement");
        let sum: f64 = set.labels().iter().map(|&k| scores[k]).sum();
        MarginSummary {
            mean_in: sum / set.len() as f64,
            max_in: scores[in_idx],
            argmax_in: in_idx,
            max_out: scores[out_idx],
            argmax_out: out_idx,
            scores,
        }
    }

    /// `(1/|Y|) Σ_{i∈Y} ⟨w_i,x⟩ − max_{j∉Y} ⟨w_j,x⟩`
    pub fn avg_margin(&self) -> f64 {
        self.mean_in - self.max_out
    }

    /// `max_{i∈Y} ⟨w_i,x⟩ − max_{j∉Y} ⟨w_j,x⟩`
    pub fn max_margin(&self) -> f64 {
        self.max_in - self.max_out
    }

    pub fn margin(&self, surrogate: Surrogate) -> f64 {
        match surrogate {
            Surrogate::Average => self.avg_margin(),
            Surrogate::Max => self.max_margin(),
        }
    }

    pub fn loss(&self, surrogate: Surrogate) -> f64 {
        hinge(self.margin(surrogate))
    }
}

fn hinge(margin: f64) -> f64 {
    (1.0 - margin).max(0.0)
}

/// `1` if the prediction falls outside `Y`, else `0`.
pub fn ambiguous_loss(predicted: usize, set: &CandidateLabelSet) -> u8 {
    u8::from(!set.contains(predicted))
}

pub fn aph_loss(w: &WeightMatrix, x: &[f64], set: &CandidateLabelSet) -> Result<f64> {
    Ok(MarginSummary::new(w, x, set)?.loss(Surrogate::Average))
}

pub fn mph_loss(w: &WeightMatrix, x: &[f64], set: &CandidateLabelSet) -> Result<f64> {
    Ok(MarginSummary::new(w, x, set)?.loss(Surrogate::Max))
}

pub fn aph_subgradient(w: &WeightMatrix, x: &[f64], set: &CandidateLabelSet) -> Result<GradientMatrix> {
    subgradient(w, x, set, Surrogate::Average)
}

pub fn mph_subgradient(w: &WeightMatrix, x: &[f64], set: &CandidateLabelSet) -> Result<GradientMatrix> {
    subgradient(w, x, set, Surrogate::Max)
}

pub fn subgradient(
    w: &WeightMatrix,
    x: &[f64],
    set: &CandidateLabelSet,
    surrogate: Surrogate,
) -> Result<GradientMatrix> {
    let summary = MarginSummary::new(w, x, set)?;
    let mut grad = WeightMatrix::zeros(w.dim(), w.num_classes())?;
    for (k, coef) in subgradient_terms(&summary, set, surrogate) {
        for (g, xi) in grad.column_mut(k).iter_mut().zip(x) {
            *g += coef * xi;
        }
    }
    Ok(grad)
}

/// Sparse form of the subgradient: column `k` equals `coef · x` for each
/// returned `(k, coef)`, every other column is zero. Empty when the hinge is
/// inactive.
pub fn subgradient_terms(
    summary: &MarginSummary,
    set: &CandidateLabelSet,
    surrogate: Surrogate,
) -> Vec<(usize, f64)> {
    if summary.margin(surrogate) >= 1.0 {
        return Vec::new();
    }
    match surrogate {
        Surrogate::Average => {
            let share = -1.0 / set.len() as f64;
            let mut terms: Vec<(usize, f64)> = set.labels().iter().map(|&k| (k, share)).collect();
            terms.push((summary.argmax_out, 1.0));
            terms
        }
        Surrogate::Max => vec![(summary.argmax_in, -1.0), (summary.argmax_out, 1.0)],
    }
}

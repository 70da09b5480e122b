//! Online learners over partially labeled streams.
//!
//! All six algorithms share one update path: the Perceptron family takes a
//! fixed step `η` on the surrogate subgradient, the Pegasos family takes a
//! `1/(λt)` step on the regularized objective and projects back onto the
//! ball of radius `1/√λ`. The exact-label baselines are the Avg variants
//! restricted to singleton candidate sets.

use std::fmt;
use std::str::FromStr;

use crate::data::Example;
use crate::error::{Error, Result};
use crate::losses::{ambiguous_loss, subgradient_terms, MarginSummary, Surrogate};
use crate::model::{argmax_in, CandidateLabelSet, WeightMatrix};

pub const DEFAULT_ETA: f64 = 1.0;
pub const DEFAULT_LAMBDA: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    AvgPerceptron,
    MaxPerceptron,
    AvgPegasos,
    MaxPegasos,
    ExactPerceptron,
    ExactPegasos,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::AvgPerceptron,
        Algorithm::MaxPerceptron,
        Algorithm::AvgPegasos,
        Algorithm::MaxPegasos,
        Algorithm::ExactPerceptron,
        Algorithm::ExactPegasos,
    ];

    pub const PARTIAL: [Algorithm; 4] = [
        Algorithm::AvgPerceptron,
        Algorithm::MaxPerceptron,
        Algorithm::AvgPegasos,
        Algorithm::MaxPegasos,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::AvgPerceptron => "avg-perceptron",
            Algorithm::MaxPerceptron => "max-perceptron",
            Algorithm::AvgPegasos => "avg-pegasos",
            Algorithm::MaxPegasos => "max-pegasos",
            Algorithm::ExactPerceptron => "exact-perceptron",
            Algorithm::ExactPegasos => "exact-pegasos",
        }
    }

    pub fn is_pegasos(self) -> bool {
        matches!(
            self,
            Algorithm::AvgPegasos | Algorithm::MaxPegasos | Algorithm::ExactPegasos
        )
    }

    /// Exact-label baselines only accept singleton candidate sets.
    pub fn is_exact(self) -> bool {
        matches!(self, Algorithm::ExactPerceptron | Algorithm::ExactPegasos)
    }

    pub fn surrogate(self) -> Surrogate {
        match self {
            Algorithm::MaxPerceptron | Algorithm::MaxPegasos => Surrogate::Max,
            _ => Surrogate::Average,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                Error::param(format!(
                    "unknown learner '{s}' (expected one of {})",
                    Algorithm::ALL.map(|a| a.name()).join(", ")
                ))
            })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearnerConfig {
    pub algorithm: Algorithm,
    /// Perceptron step size.
    pub eta: f64,
    /// Pegasos regularization strength.
    pub lambda: f64,
    pub num_classes: usize,
    pub dim: usize,
    /// Apply the `(1 - η_t λ)` shrink on zero-loss rounds too, as the
    /// original exact-label Pegasos does. Off by default.
    pub always_shrink: bool,
    /// Negative control: step along `+∇` instead of `-∇`.
    pub break_update: bool,
}

impl LearnerConfig {
    pub fn new(algorithm: Algorithm, dim: usize, num_classes: usize) -> Self {
        LearnerConfig {
            algorithm,
            eta: DEFAULT_ETA,
            lambda: DEFAULT_LAMBDA,
            num_classes,
            dim,
            always_shrink: false,
            break_update: false,
        }
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_always_shrink(mut self, on: bool) -> Self {
        self.always_shrink = on;
        self
    }

    pub fn with_break_update(mut self, on: bool) -> Self {
        self.break_update = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.num_classes < 2 {
            return Err(Error::param(format!(
                "need d >= 1 and K >= 2, got d = {}, K = {}",
                self.dim, self.num_classes
            )));
        }
        if self.algorithm.is_pegasos() {
            if !(self.lambda > 0.0 && self.lambda.is_finite()) {
                return Err(Error::param(format!(
                    "{} needs lambda > 0, got {}",
                    self.algorithm, self.lambda
                )));
            }
        } else if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::param(format!(
                "{} needs eta > 0, got {}",
                self.algorithm, self.eta
            )));
        }
        Ok(())
    }
}

/// Outcome of one online round.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    /// 1-based round index.
    pub t: usize,
    /// Class predicted from `W^t` before the label set was revealed.
    pub predicted: usize,
    pub ambiguous_loss: u8,
    /// 0-1 loss against the hidden true label.
    pub true_loss: u8,
    pub surrogate_loss: f64,
    /// `(λ/2)||W^t||² + L(W^t)`; Pegasos family only.
    pub objective: Option<f64>,
    pub update_applied: bool,
    /// `||W^{t+1}||` after the round.
    pub weight_norm: f64,
}

#[derive(Clone, Debug)]
pub struct Learner {
    config: LearnerConfig,
    weights: WeightMatrix,
    t: usize,
}

impl Learner {
    pub fn new(config: LearnerConfig) -> Result<Self> {
        config.validate()?;
        let weights = WeightMatrix::zeros(config.dim, config.num_classes)?;
        Ok(Learner {
            config,
            weights,
            t: 1,
        })
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    pub fn weights(&self) -> &WeightMatrix {
        &self.weights
    }

    /// Index of the next round (starts at 1).
    pub fn trial(&self) -> usize {
        self.t
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        self.weights.predict(x)
    }

    /// Plays one round: predict, observe `Y`, update.
    pub fn step(&mut self, x: &[f64], set: &CandidateLabelSet, y_true: usize) -> Result<TrialRecord> {
        let algo = self.config.algorithm;
        if algo.is_exact() && !set.is_singleton() {
            return Err(Error::InvalidLabelSet(format!(
                "{algo} requires a singleton label set, got {} labels",
                set.len()
            )));
        }
        if y_true >= self.config.num_classes {
            return Err(Error::InvalidLabelSet(format!(
                "true label {} out of range 1..={}",
                y_true + 1,
                self.config.num_classes
            )));
        }

        let summary = MarginSummary::new(&self.weights, x, set)?;
        let predicted = argmax_in(&summary.scores, 0..self.config.num_classes)?;
        let surrogate = algo.surrogate();
        let loss = summary.loss(surrogate);
        let objective = algo
            .is_pegasos()
            .then(|| 0.5 * self.config.lambda * self.weights.frobenius_norm_sq() + loss);

        let update_applied = loss > 0.0;
        let sign = if self.config.break_update { -1.0 } else { 1.0 };
        let terms = if update_applied {
            subgradient_terms(&summary, set, surrogate)
        } else {
            Vec::new()
        };

        if algo.is_pegasos() {
            let lambda = self.config.lambda;
            let eta_t = 1.0 / (lambda * self.t as f64);
            if update_applied || self.config.always_shrink {
                self.weights.scale(1.0 - eta_t * lambda);
                self.apply(&terms, sign * eta_t, x);
                self.weights.project_in_place(lambda)?;
            }
        } else if update_applied {
            self.apply(&terms, sign * self.config.eta, x);
        }

        let record = TrialRecord {
            t: self.t,
            predicted,
            ambiguous_loss: ambiguous_loss(predicted, set),
            true_loss: u8::from(predicted != y_true),
            surrogate_loss: loss,
            objective,
            update_applied,
            weight_norm: self.weights.frobenius_norm(),
        };
        self.t += 1;
        Ok(record)
    }

    /// `W ← W − step · G` where `G` is given in sparse column form.
    fn apply(&mut self, terms: &[(usize, f64)], step: f64, x: &[f64]) {
        for &(k, coef) in terms {
            for (w, xi) in self.weights.column_mut(k).iter_mut().zip(x) {
                *w -= step * (coef * xi);
            }
        }
    }
}

/// Runs a fresh learner over `stream`. Exact-label learners see `{y}` in
/// place of each example's candidate set.
pub fn run_sequence(config: &LearnerConfig, stream: &[Example]) -> Result<Vec<TrialRecord>> {
    let mut learner = Learner::new(config.clone())?;
    stream
        .iter()
        .map(|ex| {
            if config.algorithm.is_exact() {
                let exact = CandidateLabelSet::singleton(ex.y_true, config.num_classes)?;
                learner.step(&ex.x, &exact, ex.y_true)
            } else {
                learner.step(&ex.x, &ex.labels, ex.y_true)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(labels: &[usize], k: usize) -> CandidateLabelSet {
        CandidateLabelSet::new(labels.iter().map(|l| l - 1), k).unwrap()
    }

    fn cols(w: &WeightMatrix) -> Vec<f64> {
        w.columns().map(|c| c[0]).collect()
    }

    #[test]
    fn init_is_zero_for_every_learner() {
        for algo in Algorithm::ALL {
            let l = Learner::new(LearnerConfig::new(algo, 2, 3).with_lambda(1.0)).unwrap();
            assert!(l.weights().is_zero());
            assert_eq!((l.weights().dim(), l.weights().num_classes()), (2, 3));
            assert_eq!(l.trial(), 1);
        }
    }

    #[test]
    fn invalid_hyperparameters_are_rejected() {
        assert!(Learner::new(LearnerConfig::new(Algorithm::AvgPerceptron, 2, 3).with_eta(0.0)).is_err());
        assert!(Learner::new(LearnerConfig::new(Algorithm::MaxPegasos, 2, 3).with_lambda(-1.0)).is_err());
        assert!(Learner::new(LearnerConfig::new(Algorithm::AvgPegasos, 2, 1)).is_err());
        // eta is irrelevant to Pegasos
        assert!(Learner::new(LearnerConfig::new(Algorithm::AvgPegasos, 2, 3).with_eta(0.0)).is_ok());
    }

    #[test]
    fn avg_perceptron_one_step() {
        let mut l = Learner::new(LearnerConfig::new(Algorithm::AvgPerceptron, 1, 3)).unwrap();
        let rec = l.step(&[2.0], &set(&[2, 3], 3), 1).unwrap();
        assert_eq!(rec.predicted, 0);
        assert_eq!(rec.ambiguous_loss, 1);
        assert_eq!(rec.surrogate_loss, 1.0);
        assert!(rec.update_applied);
        assert_eq!(cols(l.weights()), vec![-2.0, 1.0, 1.0]);
        assert_eq!(l.trial(), 2);
    }

    #[test]
    fn max_perceptron_one_step() {
        let mut l = Learner::new(LearnerConfig::new(Algorithm::MaxPerceptron, 1, 3)).unwrap();
        l.step(&[2.0], &set(&[2, 3], 3), 1).unwrap();
        assert_eq!(cols(l.weights()), vec![-2.0, 2.0, 0.0]);
    }

    #[test]
    fn zero_loss_leaves_weights_alone() {
        for algo in Algorithm::ALL {
            let mut l = Learner::new(LearnerConfig::new(algo, 1, 3).with_lambda(0.5)).unwrap();
            l.weights = WeightMatrix::from_columns(&[vec![1.0], vec![0.0], vec![-0.2]]).unwrap();
            let before = l.weights.clone();
            let rec = l.step(&[2.0], &set(&[1], 3), 0).unwrap();
            assert_eq!(rec.surrogate_loss, 0.0, "{algo}");
            assert!(!rec.update_applied);
            assert_eq!(l.weights, before);
        }
    }

    #[test]
    fn avg_pegasos_one_step() {
        let mut l = Learner::new(LearnerConfig::new(Algorithm::AvgPegasos, 1, 3).with_lambda(0.5)).unwrap();
        let rec = l.step(&[2.0], &set(&[2, 3], 3), 1).unwrap();
        assert_eq!(rec.objective, Some(1.0));
        let factor = 2f64.sqrt() / 24f64.sqrt();
        let expected = [-4.0 * factor, 2.0 * factor, 2.0 * factor];
        for (got, want) in cols(l.weights()).iter().zip(expected) {
            assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        }
        assert!(l.weights().frobenius_norm() <= 2f64.sqrt());
    }

    #[test]
    fn always_shrink_applies_on_zero_loss() {
        let mut l = Learner::new(
            LearnerConfig::new(Algorithm::AvgPegasos, 1, 3)
                .with_lambda(0.5)
                .with_always_shrink(true),
        )
        .unwrap();
        l.t = 4;
        l.weights = WeightMatrix::from_columns(&[vec![1.0], vec![0.0], vec![-0.2]]).unwrap();
        l.step(&[2.0], &set(&[1], 3), 0).unwrap();
        // (1 - 1/4) shrink
        assert_eq!(cols(l.weights()), vec![0.75, 0.0, -0.2 * 0.75]);
    }

    #[test]
    fn exact_learner_rejects_ambiguous_sets() {
        let mut l = Learner::new(LearnerConfig::new(Algorithm::ExactPerceptron, 1, 3)).unwrap();
        assert!(l.step(&[1.0], &set(&[1, 2], 3), 0).is_err());
        assert!(l.step(&[1.0], &set(&[1], 3), 0).is_ok());
    }

    #[test]
    fn algorithm_names_round_trip() {
        for algo in Algorithm::ALL {
            assert_eq!(algo.name().parse::<Algorithm>().unwrap(), algo);
        }
        assert!("perceptron".parse::<Algorithm>().is_err());
    }

    #[test]
    fn empty_stream_gives_no_records() {
        let cfg = LearnerConfig::new(Algorithm::AvgPerceptron, 2, 3);
        assert!(run_sequence(&cfg, &[]).unwrap().is_empty());
    }
}

//! Closed-form mistake and regret bounds, and the empirical quantities they
//! are checked against.

use std::fmt::{self, Write as _};

use crate::data::Example;
use crate::error::{Error, Result};
use crate::learners::TrialRecord;
use crate::losses::{subgradient_terms, MarginSummary, Surrogate};
use crate::model::{euclidean_norm, CandidateLabelSet, WeightMatrix};

/// Tolerance on `||W*|| = 1` for reference matrices.
pub const UNIT_NORM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateKind {
    Average,
    Max,
}

/// Unit-norm `W*` together with the margin it achieves on a stream.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparabilityCertificate {
    pub w_star: WeightMatrix,
    pub gamma: f64,
    pub kind: CertificateKind,
}

impl SeparabilityCertificate {
    /// Measures the margin of `w_star` over `examples`. Fails unless the
    /// matrix has unit norm and the margin is positive.
    pub fn certify(w_star: WeightMatrix, examples: &[Example], kind: CertificateKind) -> Result<Self> {
        check_unit_norm(&w_star)?;
        let gamma = min_margin(&w_star, examples, kind)?;
        if gamma.is_nan() || gamma <= 0.0 {
            return Err(Error::param(format!(
                "stream is not separable by the given matrix (margin {gamma})"
            )));
        }
        Ok(SeparabilityCertificate { w_star, gamma, kind })
    }

    /// Recomputes the margin on `examples`; it must still be at least `gamma`.
    pub fn verify(&self, examples: &[Example]) -> Result<f64> {
        let gamma = min_margin(&self.w_star, examples, self.kind)?;
        if gamma < self.gamma {
            return Err(Error::param(format!(
                "certified margin {} not met, stream margin is {gamma}",
                self.gamma
            )));
        }
        Ok(gamma)
    }
}

fn min_margin(w: &WeightMatrix, examples: &[Example], kind: CertificateKind) -> Result<f64> {
    if examples.is_empty() {
        return Err(Error::param("empty stream"));
    }
    examples.iter().try_fold(f64::INFINITY, |acc, ex| {
        let s = MarginSummary::new(w, &ex.x, &ex.labels)?;
        let m = match kind {
            CertificateKind::Average => s.avg_margin(),
            CertificateKind::Max => s.max_margin(),
        };
        Ok(acc.min(m))
    })
}

fn check_unit_norm(w: &WeightMatrix) -> Result<()> {
    let norm = w.frobenius_norm();
    if (norm - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::param(format!("reference matrix must have unit norm, got {norm}")));
    }
    Ok(())
}

/// `R = max_t ||x^t||`
pub fn stream_radius(examples: &[Example]) -> Result<f64> {
    if examples.is_empty() {
        return Err(Error::param("stream radius of an empty stream"));
    }
    Ok(examples.iter().map(|e| euclidean_norm(&e.x)).fold(0.0, f64::max))
}

/// `c = min_t |Y^t|`
pub fn min_label_set_size(examples: &[Example]) -> Result<usize> {
    examples
        .iter()
        .map(|e| e.labels.len())
        .min()
        .ok_or_else(|| Error::param("label set size of an empty stream"))
}

/// Signed average margin of `w` on one example.
pub fn avg_margin(w: &WeightMatrix, x: &[f64], set: &CandidateLabelSet) -> Result<f64> {
    Ok(MarginSummary::new(w, x, set)?.avg_margin())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem {
    /// Separable mistake bound for Avg Perceptron.
    T1,
    /// Non-separable mistake bound for Avg Perceptron.
    T2,
    /// Regret bound for Avg Pegasos.
    T3,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::T1 => "T1",
            Theorem::T2 => "T2",
            Theorem::T3 => "T3",
        })
    }
}

/// An evaluated bound with every intermediate constant, in evaluation order.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub theorem: Theorem,
    pub bound_value: f64,
    pub constants: Vec<(&'static str, f64)>,
}

impl BoundReport {
    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }

    /// Flat `key=value` record, one entry per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("theorem={}\nbound={}\n", self.theorem, self.bound_value);
        for (name, value) in &self.constants {
            let _ = writeln!(out, "{name}={value}");
        }
        out
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::param(format!("margin gamma must be > 0, got {gamma}")));
    }
    Ok(())
}

/// `2/γ² + (1/c + 1) R²/γ²`
pub fn theorem1_bound(gamma: f64, radius: f64, c: usize) -> Result<BoundReport> {
    check_gamma(gamma)?;
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::param(format!("radius must be >= 0, got {radius}")));
    }
    if c == 0 {
        return Err(Error::param("minimum label set size must be >= 1"));
    }
    let c_f = c as f64;
    let g2 = gamma * gamma;
    let bound = 2.0 / g2 + (1.0 / c_f + 1.0) * radius * radius / g2;
    Ok(BoundReport {
        theorem: Theorem::T1,
        bound_value: bound,
        constants: vec![("gamma", gamma), ("R", radius), ("c", c_f)],
    })
}

/// Non-separable bound against a unit-norm reference `w_ref` at margin
/// `gamma`. Falls back to [`theorem1_bound`] when `w_ref` already attains
/// the margin on every example (`D = 0`).
///
/// `d^t = max{0, γ − avg_margin}`, `D² = Σ (|Y^t| d^t)²`, `K' = 1/c + 1`,
/// `Δ = ((D² + K' D² R²)/K')^{1/4}`, `Z = √(1 + D²/Δ²)`, and the bound is
/// `2Z²/γ² + 2K'(R² + Δ²)/(γ/Z)²`.
pub fn theorem2_bound(examples: &[Example], w_ref: &WeightMatrix, gamma: f64) -> Result<BoundReport> {
    check_gamma(gamma)?;
    check_unit_norm(w_ref)?;
    let radius = stream_radius(examples)?;
    let c = min_label_set_size(examples)?;
    let mut d_sq = 0.0;
    for ex in examples {
        let deviation = (gamma - avg_margin(w_ref, &ex.x, &ex.labels)?).max(0.0);
        let scaled = ex.labels.len() as f64 * deviation;
        d_sq += scaled * scaled;
    }
    let k_const = 1.0 / c as f64 + 1.0;
    if d_sq == 0.0 {
        let t1 = theorem1_bound(gamma, radius, c)?;
        let mut constants = t1.constants;
        constants.extend([("D", 0.0), ("K_const", k_const), ("Delta", 0.0), ("Z", 1.0)]);
        return Ok(BoundReport {
            theorem: Theorem::T2,
            bound_value: t1.bound_value,
            constants,
        });
    }
    let r2 = radius * radius;
    let delta = ((d_sq + k_const * d_sq * r2) / k_const).powf(0.25);
    let delta2 = delta * delta;
    let z2 = 1.0 + d_sq / delta2;
    let z = z2.sqrt();
    let margin_ext = gamma / z;
    let bound = 2.0 * z2 / (gamma * gamma) + 2.0 * k_const * (r2 + delta2) / (margin_ext * margin_ext);
    Ok(BoundReport {
        theorem: Theorem::T2,
        bound_value: bound,
        constants: vec![
            ("gamma", gamma),
            ("R", radius),
            ("c", c as f64),
            ("D", d_sq.sqrt()),
            ("K_const", k_const),
            ("Delta", delta),
            ("Z", z),
        ],
    })
}

/// `G² ln T / (λT)` with `G = √λ + √(1 + 1/c) R`.
pub fn theorem3_bound(lambda: f64, radius: f64, c: usize, rounds: usize) -> Result<BoundReport> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::param(format!("lambda must be > 0, got {lambda}")));
    }
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::param(format!("radius must be >= 0, got {radius}")));
    }
    if c == 0 {
        return Err(Error::param("minimum label set size must be >= 1"));
    }
    if rounds < 2 {
        return Err(Error::param(format!("regret bound needs T >= 2, got {rounds}")));
    }
    let t = rounds as f64;
    let g = lambda.sqrt() + (1.0 + 1.0 / c as f64).sqrt() * radius;
    let log_rate = t.ln() / (lambda * t);
    Ok(BoundReport {
        theorem: Theorem::T3,
        bound_value: g * g * log_rate,
        constants: vec![
            ("lambda", lambda),
            ("R", radius),
            ("c", c as f64),
            ("T", t),
            ("G", g),
            ("lnT_over_lambdaT", log_rate),
        ],
    })
}

/// `(λ/2)||W||² + L_APH(W; x, Y)`
pub fn objective(w: &WeightMatrix, x: &[f64], set: &CandidateLabelSet, lambda: f64) -> Result<f64> {
    let loss = MarginSummary::new(w, x, set)?.loss(Surrogate::Average);
    Ok(0.5 * lambda * w.frobenius_norm_sq() + loss)
}

/// Mean online objective minus the mean objective of `w_star` over the same
/// stream. Negative values are reported as they are.
pub fn empirical_regret(
    records: &[TrialRecord],
    examples: &[Example],
    lambda: f64,
    w_star: &WeightMatrix,
) -> Result<f64> {
    if records.len() != examples.len() {
        return Err(Error::param(format!(
            "{} records for {} examples",
            records.len(),
            examples.len()
        )));
    }
    if records.is_empty() {
        return Err(Error::param("regret of an empty run"));
    }
    let t = records.len() as f64;
    let mut online = 0.0;
    for r in records {
        online += r
            .objective
            .ok_or_else(|| Error::param(format!("record {} carries no objective value", r.t)))?;
    }
    let mut fixed = 0.0;
    for ex in examples {
        fixed += objective(w_star, &ex.x, &ex.labels, lambda)?;
    }
    Ok(online / t - fixed / t)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepSchedule {
    /// `1 / (λ · epoch)`
    InverseEpoch,
    Constant(f64),
}

/// Approximate minimizer of the batch objective over the ball.
#[derive(Clone, Debug)]
pub struct Comparator {
    /// Best iterate seen.
    pub weights: WeightMatrix,
    pub objective: f64,
    /// Best objective so far, once per evaluated iterate (nonincreasing).
    pub trace: Vec<f64>,
    /// `F(W) − ||g||²/(2λ)` at the best iterate: a certified lower bound on
    /// the minimum by strong convexity.
    pub lower_bound: f64,
}

pub const COMPARATOR_EPOCHS: usize = 500;

/// Full-batch projected subgradient descent on
/// `F(W) = (λ/2)||W||² + (1/T) Σ_t L_APH(W; x^t, Y^t)`, started at zero.
pub fn batch_comparator(
    examples: &[Example],
    lambda: f64,
    epochs: usize,
    schedule: StepSchedule,
) -> Result<Comparator> {
    let first = examples.first().ok_or_else(|| Error::param("comparator on an empty stream"))?;
    crate::model::ball_radius(lambda)?;
    let mut w = WeightMatrix::zeros(first.x.len(), first.labels.num_classes())?;
    let mut best: Option<(f64, WeightMatrix, f64)> = None;
    let mut trace = Vec::with_capacity(epochs + 1);
    for epoch in 1..=epochs + 1 {
        let (value, grad) = batch_objective_and_subgradient(&w, examples, lambda)?;
        if best.as_ref().is_none_or(|(b, _, _)| value < *b) {
            best = Some((value, w.clone(), grad.frobenius_norm_sq()));
        }
        trace.push(best.as_ref().expect("set above").0);
        if epoch > epochs {
            break;
        }
        let step = match schedule {
            StepSchedule::InverseEpoch => 1.0 / (lambda * epoch as f64),
            StepSchedule::Constant(s) => s,
        };
        w.add_scaled(-step, &grad);
        w.project_in_place(lambda)?;
    }
    let (objective, weights, grad_sq) = best.expect("at least one evaluation");
    Ok(Comparator {
        weights,
        objective,
        trace,
        lower_bound: objective - grad_sq / (2.0 * lambda),
    })
}

/// Batch objective and one of its subgradients, `λW + mean APH subgradient`.
pub fn batch_objective_and_subgradient(
    w: &WeightMatrix,
    examples: &[Example],
    lambda: f64,
) -> Result<(f64, WeightMatrix)> {
    let t = examples.len() as f64;
    let mut grad = WeightMatrix::zeros(w.dim(), w.num_classes())?;
    let mut loss_sum = 0.0;
    for ex in examples {
        let s = MarginSummary::new(w, &ex.x, &ex.labels)?;
        loss_sum += s.loss(Surrogate::Average);
        for (k, coef) in subgradient_terms(&s, &ex.labels, Surrogate::Average) {
            for (g, xi) in grad.column_mut(k).iter_mut().zip(&ex.x) {
                *g += coef * xi;
            }
        }
    }
    grad.scale(1.0 / t);
    grad.add_scaled(lambda, w);
    Ok((0.5 * lambda * w.frobenius_norm_sq() + loss_sum / t, grad))
}

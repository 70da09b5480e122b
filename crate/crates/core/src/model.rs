//! Dense linear multiclass model.
//!
//! Class indices are 0-based everywhere inside the crate. Files and
//! printed reports use 1-based labels; conversion happens at the I/O edge.

use std::fmt;

use crate::error::{Error, Result};

/// `K` per-class weight vectors of length `d`, stored column-major
/// (column `k` is `data[k * d..(k + 1) * d]`).
#[derive(Clone, PartialEq)]
pub struct WeightMatrix {
    dim: usize,
    num_classes: usize,
    data: Vec<f64>,
}

/// Per-class subgradient of a surrogate loss; same shape as the weights.
pub type GradientMatrix = WeightMatrix;

impl fmt::Debug for WeightMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightMatrix")
            .field("dim", &self.dim)
            .field("num_classes", &self.num_classes)
            .field("columns", &self.columns().collect::<Vec<_>>())
            .finish()
    }
}

impl WeightMatrix {
    pub fn zeros(dim: usize, num_classes: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("feature dimension must be at least 1"));
        }
        if num_classes < 2 {
            return Err(Error::param(format!(
                "need at least 2 classes, got {num_classes}"
            )));
        }
        Ok(WeightMatrix {
            dim,
            num_classes,
            data: vec![0.0; dim * num_classes],
        })
    }

    /// Builds a matrix from its class columns `w_1 … w_K`.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let num_classes = columns.len();
        let dim = columns.first().map_or(0, Vec::len);
        let mut w = Self::zeros(dim, num_classes)?;
        for (k, col) in columns.iter().enumerate() {
            if col.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: col.len(),
                });
            }
            if let Some(v) = col.iter().find(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("weight {v} in class {}", k + 1)));
            }
            w.column_mut(k).copy_from_slice(col);
        }
        Ok(w)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn column(&self, k: usize) -> &[f64] {
        &self.data[k * self.dim..(k + 1) * self.dim]
    }

    pub fn column_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.data[k * self.dim..(k + 1) * self.dim]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// All entries, column-major.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn same_shape(&self, other: &WeightMatrix) -> bool {
        self.dim == other.dim && self.num_classes == other.num_classes
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// `⟨w_k, x⟩` for every class.
    pub fn score(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(self.columns().map(|w| dot(w, x)).collect())
    }

    /// Highest-scoring class; ties go to the lowest index.
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        let scores = self.score(x)?;
        argmax_in(&scores, 0..self.num_classes)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sq().sqrt()
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Frobenius inner product.
    pub fn frobenius_dot(&self, other: &WeightMatrix) -> f64 {
        debug_assert!(self.same_shape(other));
        dot(&self.data, &other.data)
    }

    pub fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|v| *v *= factor);
    }

    pub fn scaled(&self, factor: f64) -> WeightMatrix {
        let mut w = self.clone();
        w.scale(factor);
        w
    }

    /// `self += alpha * other`
    pub fn add_scaled(&mut self, alpha: f64, other: &WeightMatrix) {
        debug_assert!(self.same_shape(other));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    /// Projection onto the ball `{W : ||W|| ≤ 1/√λ}`.
    ///
    /// The result never exceeds the radius in floating point, which makes
    /// the projection exactly idempotent.
    pub fn project_to_ball(&self, lambda: f64) -> Result<WeightMatrix> {
        let mut w = self.clone();
        w.project_in_place(lambda)?;
        Ok(w)
    }

    pub fn project_in_place(&mut self, lambda: f64) -> Result<()> {
        let radius = ball_radius(lambda)?;
        let norm = self.frobenius_norm();
        if norm <= radius {
            return Ok(());
        }
        let original = self.data.clone();
        let mut factor = radius / norm;
        loop {
            for (dst, src) in self.data.iter_mut().zip(&original) {
                *dst = src * factor;
            }
            if self.frobenius_norm() <= radius {
                return Ok(());
            }
            factor = factor.next_down();
        }
    }
}

/// `1/√λ`, the radius of the Pegasos feasible ball.
pub fn ball_radius(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::param(format!("lambda must be > 0, got {lambda}")));
    }
    Ok(1.0 / lambda.sqrt())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn euclidean_norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Smallest index in `set` attaining the maximum of `scores` over `set`.
pub fn argmax_in(scores: &[f64], set: impl IntoIterator<Item = usize>) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for k in set {
        let s = *scores.get(k).ok_or_else(|| {
            Error::InvalidLabelSet(format!(
                "class index {} out of range for {} classes",
                k + 1,
                scores.len()
            ))
        })?;
        match best {
            Some((bk, bs)) if s < bs || (s == bs && k > bk) => {}
            _ => best = Some((k, s)),
        }
    }
    best.map(|(k, _)| k).ok_or(Error::EmptySet)
}

/// Candidate label set `Y` with a nonempty complement.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CandidateLabelSet {
    labels: Vec<usize>,
    num_classes: usize,
}

impl CandidateLabelSet {
    /// `labels` are 0-based class indices; they are sorted on construction.
    pub fn new(labels: impl IntoIterator<Item = usize>, num_classes: usize) -> Result<Self> {
        let mut labels: Vec<usize> = labels.into_iter().collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidLabelSet(format!(
                "duplicate class in {:?}",
                one_based(&labels)
            )));
        }
        if let Some(&k) = labels.iter().find(|&&k| k >= num_classes) {
            return Err(Error::InvalidLabelSet(format!(
                "class {} out of range 1..={num_classes}",
                k + 1
            )));
        }
        if labels.is_empty() {
            return Err(Error::InvalidLabelSet("empty candidate set".into()));
        }
        if labels.len() >= num_classes {
            return Err(Error::InvalidLabelSet(format!(
                "candidate set covers all {num_classes} classes; complement must be nonempty"
            )));
        }
        Ok(CandidateLabelSet {
            labels,
            num_classes,
        })
    }

    pub fn singleton(label: usize, num_classes: usize) -> Result<Self> {
        Self::new([label], num_classes)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn contains(&self, k: usize) -> bool {
        self.labels.binary_search(&k).is_ok()
    }

    /// Classes outside the set, ascending.
    pub fn complement(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_classes).filter(move |k| !self.contains(*k))
    }

    pub fn is_singleton(&self) -> bool {
        self.labels.len() == 1
    }
}

fn one_based(labels: &[usize]) -> Vec<usize> {
    labels.iter().map(|k| k + 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w_1d(cols: &[f64]) -> WeightMatrix {
        WeightMatrix::from_columns(&cols.iter().map(|&c| vec![c]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn score_examples() {
        let w = WeightMatrix::zeros(2, 3).unwrap();
        assert_eq!(w.score(&[1.0, 5.0]).unwrap(), vec![0.0, 0.0, 0.0]);

        let w = w_1d(&[1.0, 0.5, -1.0]);
        assert_eq!(w.score(&[2.0]).unwrap(), vec![2.0, 1.0, -2.0]);

        let eye = WeightMatrix::from_columns(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert_eq!(eye.score(&[3.0, 1.0, 2.0]).unwrap(), vec![3.0, 1.0, 2.0]);
    }

    #[test]
    fn score_rejects_wrong_dimension() {
        let w = WeightMatrix::zeros(2, 3).unwrap();
        match w.score(&[1.0]) {
            Err(Error::DimensionMismatch { expected, actual }) => {
                assert_eq!((expected, actual), (2, 1))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn predict_breaks_ties_low() {
        let w = WeightMatrix::zeros(2, 4).unwrap();
        assert_eq!(w.predict(&[3.0, -1.0]).unwrap(), 0);
        assert_eq!(w_1d(&[1.0, 0.5, -1.0]).predict(&[2.0]).unwrap(), 0);
        assert_eq!(w_1d(&[0.0, 5.0, 5.0]).predict(&[1.0]).unwrap(), 1);
    }

    #[test]
    fn argmax_in_set_examples() {
        let scores = [2.0, 1.0, -2.0];
        assert_eq!(argmax_in(&scores, [1, 2]).unwrap(), 1);
        assert_eq!(argmax_in(&[0.0; 3], [2, 0]).unwrap(), 0);
        assert_eq!(argmax_in(&scores, [2]).unwrap(), 2);
        assert!(matches!(argmax_in(&scores, []), Err(Error::EmptySet)));
        assert!(argmax_in(&scores, [3]).is_err());
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(WeightMatrix::zeros(3, 2).unwrap().frobenius_norm(), 0.0);
        let mut w = WeightMatrix::zeros(2, 2).unwrap();
        w.column_mut(1)[0] = 3.0;
        assert_eq!(w.frobenius_norm(), 3.0);
        let w = WeightMatrix::from_columns(&[vec![3.0, 0.0], vec![0.0, 4.0]]).unwrap();
        assert_eq!(w.frobenius_norm(), 5.0);
    }

    #[test]
    fn projection_examples() {
        let w = WeightMatrix::from_columns(&[vec![1.2, 0.0], vec![0.0, 1.6]]).unwrap();
        assert_eq!(w.frobenius_norm(), 2.0);
        let p = w.project_to_ball(1.0).unwrap();
        assert!((p.frobenius_norm() - 1.0).abs() < 1e-15);
        assert!((p.column(0)[0] - 0.6).abs() < 1e-15);
        assert!((p.column(1)[1] - 0.8).abs() < 1e-15);

        let small = WeightMatrix::from_columns(&[vec![0.3, 0.0], vec![0.0, 0.4]]).unwrap();
        assert_eq!(small.project_to_ball(1.0).unwrap(), small);

        let unit = WeightMatrix::from_columns(&[vec![0.6], vec![0.8]]).unwrap();
        let p = unit.project_to_ball(4.0).unwrap();
        assert!((p.frobenius_norm() - 0.5).abs() < 1e-15);
        assert!(p.frobenius_norm() <= 0.5);

        let zero = WeightMatrix::zeros(2, 2).unwrap();
        assert_eq!(zero.project_to_ball(1e6).unwrap(), zero);
    }

    #[test]
    fn projection_rejects_nonpositive_lambda() {
        let w = WeightMatrix::zeros(1, 2).unwrap();
        assert!(w.project_to_ball(0.0).is_err());
        assert!(w.project_to_ball(-1.0).is_err());
        assert!(w.project_to_ball(f64::NAN).is_err());
    }

    #[test]
    fn label_set_validation() {
        assert!(CandidateLabelSet::new([0, 1], 3).is_ok());
        assert!(CandidateLabelSet::new([0, 1, 2], 3).is_err());
        assert!(CandidateLabelSet::new([], 3).is_err());
        assert!(CandidateLabelSet::new([1, 1], 3).is_err());
        assert!(CandidateLabelSet::new([3], 3).is_err());
        let y = CandidateLabelSet::new([2, 0], 4).unwrap();
        assert_eq!(y.labels(), &[0, 2]);
        assert_eq!(y.complement().collect::<Vec<_>>(), vec![1, 3]);
    }

    #[test]
    fn rejects_degenerate_shapes() {
        assert!(WeightMatrix::zeros(0, 3).is_err());
        assert!(WeightMatrix::zeros(3, 1).is_err());
        assert!(WeightMatrix::from_columns(&[vec![1.0], vec![f64::NAN]]).is_err());
        assert!(WeightMatrix::from_columns(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}

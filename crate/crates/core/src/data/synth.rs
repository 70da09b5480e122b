//! Seeded partial-label synthesis and synthetic stream generators.
//!
//! Every generator draws from a ChaCha8 stream seeded with the spec's
//! 64-bit seed, so output is identical across platforms.

use std::fmt;

use rand::seq::index;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{Dataset, Example, PartialLabelStream};
use crate::bounds::{CertificateKind, SeparabilityCertificate};
use crate::error::{Error, Result};
use crate::losses::MarginSummary;
use crate::model::{CandidateLabelSet, WeightMatrix};

/// Rejection sampling gives up once this many attempts have been made with
/// an acceptance rate below [`ACCEPTANCE_FLOOR`].
pub const ATTEMPT_BUDGET: u64 = 1_000_000;
pub const ACCEPTANCE_FLOOR: f64 = 1e-4;

/// ChaCha stream reserved for label corruption in [`generate_noisy`].
const NOISE_STREAM: u64 = 1;

/// `{y}` plus `s - 1` distractors drawn uniformly without replacement from
/// the other `K - 1` classes.
pub fn draw_candidate_set<R: Rng + ?Sized>(
    rng: &mut R,
    y: usize,
    set_size: usize,
    num_classes: usize,
) -> Result<CandidateLabelSet> {
    check_set_size(set_size, num_classes)?;
    let others = index::sample(rng, num_classes - 1, set_size - 1);
    let labels = std::iter::once(y).chain(others.iter().map(|i| if i < y { i } else { i + 1 }));
    CandidateLabelSet::new(labels, num_classes)
}

fn check_set_size(set_size: usize, num_classes: usize) -> Result<()> {
    if set_size == 0 || set_size >= num_classes {
        return Err(Error::param(format!(
            "set size must lie in [1, K-1] = [1, {}], got {set_size}",
            num_classes.saturating_sub(1)
        )));
    }
    Ok(())
}

/// Builds a partially labeled stream from a fully labeled dataset: each
/// example keeps its true label and gains `s - 1` uniform distractors.
/// With `shuffle`, the example order is permuted first from the same
/// generator.
pub fn synthesize_partial_labels(
    dataset: &Dataset,
    set_size: usize,
    seed: u64,
    shuffle: bool,
) -> Result<PartialLabelStream> {
    check_set_size(set_size, dataset.num_classes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    if shuffle {
        order.shuffle(&mut rng);
    }
    let examples = order
        .into_iter()
        .map(|i| {
            let p = &dataset.points[i];
            Ok(Example {
                x: p.x.clone(),
                labels: draw_candidate_set(&mut rng, p.label, set_size, dataset.num_classes)?,
                y_true: p.label,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PartialLabelStream {
        examples,
        seed,
        set_size,
        num_classes: dataset.num_classes,
        dim: dataset.dim,
        generator: format!("dataset(name={},shuffle={shuffle})", dataset.name),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    FromDataset,
    SeparableSynthetic,
    NoisySynthetic,
}

/// Parameters of a synthetic stream.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisSpec {
    pub kind: GeneratorKind,
    pub num_classes: usize,
    pub dim: usize,
    pub rounds: usize,
    /// Minimum average margin every emitted example has under `W*`.
    pub margin: f64,
    /// Instances are drawn uniformly on the sphere of this radius.
    pub radius: f64,
    pub set_size: usize,
    /// Fraction of examples whose true label is replaced (noisy kind only).
    pub noise: f64,
    pub seed: u64,
}

impl SynthesisSpec {
    pub fn separable(num_classes: usize, dim: usize, rounds: usize, margin: f64, set_size: usize, seed: u64) -> Self {
        SynthesisSpec {
            kind: GeneratorKind::SeparableSynthetic,
            num_classes,
            dim,
            rounds,
            margin,
            radius: 1.0,
            set_size,
            noise: 0.0,
            seed,
        }
    }

    pub fn noisy(mut self, noise: f64) -> Self {
        self.kind = GeneratorKind::NoisySynthetic;
        self.noise = noise;
        self
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_set_size(mut self, set_size: usize) -> Self {
        self.set_size = set_size;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_classes < 2 || self.dim == 0 || self.rounds == 0 {
            return Err(Error::param(format!(
                "need K >= 2, d >= 1, T >= 1; got K = {}, d = {}, T = {}",
                self.num_classes, self.dim, self.rounds
            )));
        }
        check_set_size(self.set_size, self.num_classes)?;
        if !(self.margin > 0.0 && self.margin.is_finite()) {
            return Err(Error::param(format!("margin must be > 0, got {}", self.margin)));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::param(format!("radius must be > 0, got {}", self.radius)));
        }
        if !(0.0..1.0).contains(&self.noise) {
            return Err(Error::param(format!("noise rate must lie in [0, 1), got {}", self.noise)));
        }
        Ok(())
    }
}

impl fmt::Display for SynthesisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            GeneratorKind::FromDataset => "dataset",
            GeneratorKind::SeparableSynthetic => "separable",
            GeneratorKind::NoisySynthetic => "noisy",
        };
        write!(
            f,
            "{kind}(k={},d={},t={},gamma={},radius={},s={},noise={})",
            self.num_classes, self.dim, self.rounds, self.margin, self.radius, self.set_size, self.noise
        )
    }
}

fn standard_normal_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Unit-Frobenius matrix with i.i.d. Gaussian direction.
fn random_unit_matrix(rng: &mut ChaCha8Rng, dim: usize, num_classes: usize) -> Result<WeightMatrix> {
    loop {
        let cols: Vec<Vec<f64>> = (0..num_classes).map(|_| standard_normal_vec(rng, dim)).collect();
        let w = WeightMatrix::from_columns(&cols)?;
        let norm = w.frobenius_norm();
        if norm > 0.0 {
            return Ok(w.scaled(1.0 / norm));
        }
    }
}

fn random_on_sphere(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vec<f64> {
    loop {
        let mut x = standard_normal_vec(rng, dim);
        let norm = crate::model::euclidean_norm(&x);
        if norm > 0.0 {
            x.iter_mut().for_each(|v| *v *= radius / norm);
            return x;
        }
    }
}

struct RawDraw {
    w_star: WeightMatrix,
    examples: Vec<Example>,
}

/// Rejection sampler shared by both synthetic generators.
fn draw_separable(spec: &SynthesisSpec, rng: &mut ChaCha8Rng) -> Result<RawDraw> {
    spec.validate()?;
    let w_star = random_unit_matrix(rng, spec.dim, spec.num_classes)?;
    let mut examples = Vec::with_capacity(spec.rounds);
    let mut attempts: u64 = 0;
    while examples.len() < spec.rounds {
        attempts += 1;
        let x = random_on_sphere(rng, spec.dim, spec.radius);
        let y = w_star.predict(&x)?;
        let labels = draw_candidate_set(rng, y, spec.set_size, spec.num_classes)?;
        if MarginSummary::new(&w_star, &x, &labels)?.avg_margin() >= spec.margin {
            examples.push(Example { x, labels, y_true: y });
        }
        if attempts.is_multiple_of(ATTEMPT_BUDGET) {
            let rate = examples.len() as f64 / attempts as f64;
            if rate < ACCEPTANCE_FLOOR {
                return Err(Error::Generation(format!(
                    "acceptance rate {rate:.2e} after {attempts} attempts for {spec}; \
                     try a smaller margin or set size, or a larger radius"
                )));
            }
        }
    }
    Ok(RawDraw { w_star, examples })
}

/// Average-separable stream with its certificate. The certificate margin is
/// recomputed from the emitted examples and is at least `spec.margin`.
pub fn generate_separable(spec: &SynthesisSpec) -> Result<(PartialLabelStream, SeparabilityCertificate)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let RawDraw { w_star, examples } = draw_separable(spec, &mut rng)?;
    let stream = PartialLabelStream {
        examples,
        seed: spec.seed,
        set_size: spec.set_size,
        num_classes: spec.num_classes,
        dim: spec.dim,
        generator: spec.to_string(),
    };
    let cert = SeparabilityCertificate::certify(w_star, &stream.examples, CertificateKind::Average)?;
    Ok((stream, cert))
}

/// A noisy stream together with the matrix that generated its clean labels.
#[derive(Clone, Debug)]
pub struct NoisyStream {
    pub stream: PartialLabelStream,
    pub w_star: WeightMatrix,
    /// Indices of examples whose true label was replaced.
    pub corrupted: Vec<usize>,
}

/// Like [`generate_separable`], but each accepted example independently
/// has its true label replaced, with probability `spec.noise`, by a
/// uniformly chosen other class, and its candidate set redrawn around the
/// new label. Corruption draws come from a separate ChaCha stream, so a
/// zero noise rate reproduces the separable generator exactly.
pub fn generate_noisy(spec: &SynthesisSpec) -> Result<NoisyStream> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let RawDraw { w_star, mut examples } = draw_separable(spec, &mut rng)?;
    let mut noise_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    noise_rng.set_stream(NOISE_STREAM);
    let mut corrupted = Vec::new();
    if spec.noise > 0.0 {
        for (i, ex) in examples.iter_mut().enumerate() {
            if noise_rng.random::<f64>() < spec.noise {
                let shift = noise_rng.random_range(1..spec.num_classes);
                let y = (ex.y_true + shift) % spec.num_classes;
                ex.labels = draw_candidate_set(&mut noise_rng, y, spec.set_size, spec.num_classes)?;
                ex.y_true = y;
                corrupted.push(i);
            }
        }
    }
    let stream = PartialLabelStream {
        examples,
        seed: spec.seed,
        set_size: spec.set_size,
        num_classes: spec.num_classes,
        dim: spec.dim,
        generator: spec.to_string(),
    };
    Ok(NoisyStream {
        stream,
        w_star,
        corrupted,
    })
}

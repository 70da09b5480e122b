//! Repeated seeded runs, averaged error curves, and bound-conformance
//! campaigns over synthetic grids.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::bounds::{
    self, batch_comparator, empirical_regret, theorem1_bound, theorem2_bound, theorem3_bound, BoundReport,
    StepSchedule, COMPARATOR_EPOCHS,
};
use crate::data::{
    generate_noisy, generate_separable, synthesize_partial_labels, Dataset, Example, GeneratorKind,
    PartialLabelStream, SynthesisSpec,
};
use crate::error::{Error, Result};
use crate::learners::{self, Algorithm, LearnerConfig, DEFAULT_ETA, DEFAULT_LAMBDA};
use crate::model::ball_radius;

pub const DEFAULT_RUNS: usize = 100;

/// Seed offset between successive passes when a dataset is cycled.
const PASS_SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Debug, PartialEq)]
pub enum DataSource {
    /// A fully labeled dataset; candidate sets are drawn per run. With
    /// `shuffle`, the example order is also permuted per run.
    Dataset { dataset: Dataset, shuffle: bool },
    /// A synthetic generator; its `seed` and `set_size` are replaced per run
    /// and per set size.
    Synthetic(SynthesisSpec),
}

impl DataSource {
    pub fn num_classes(&self) -> usize {
        match self {
            DataSource::Dataset { dataset, .. } => dataset.num_classes,
            DataSource::Synthetic(spec) => spec.num_classes,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DataSource::Dataset { dataset, .. } => dataset.dim,
            DataSource::Synthetic(spec) => spec.dim,
        }
    }

    pub fn name(&self) -> String {
        match self {
            DataSource::Dataset { dataset, .. } => dataset.name.clone(),
            DataSource::Synthetic(spec) => match spec.kind {
                GeneratorKind::NoisySynthetic => "synthetic-noisy".to_string(),
                _ => "synthetic-separable".to_string(),
            },
        }
    }

    fn describe(&self) -> String {
        match self {
            DataSource::Dataset { dataset, shuffle } => format!(
                "dataset(name={},n={},k={},d={},shuffle={shuffle},provenance={},content={:016x})",
                dataset.name,
                dataset.len(),
                dataset.num_classes,
                dataset.dim,
                dataset.provenance,
                fnv1a(dataset.snapshot().as_bytes())
            ),
            DataSource::Synthetic(spec) => format!("{spec}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub source: DataSource,
    pub learners: Vec<Algorithm>,
    pub set_sizes: Vec<usize>,
    pub runs: usize,
    /// Rounds per run. `None` means one pass over a dataset, or the
    /// generator's own `rounds` for synthetic sources.
    pub rounds: Option<usize>,
    pub base_seed: u64,
    pub eta: f64,
    pub lambda: f64,
    pub always_shrink: bool,
}

impl ExperimentConfig {
    pub fn new(source: DataSource, learners: Vec<Algorithm>, set_sizes: Vec<usize>) -> Self {
        ExperimentConfig {
            source,
            learners,
            set_sizes,
            runs: DEFAULT_RUNS,
            rounds: None,
            base_seed: 0,
            eta: DEFAULT_ETA,
            lambda: DEFAULT_LAMBDA,
            always_shrink: false,
        }
    }

    pub fn rounds(&self) -> usize {
        self.rounds.unwrap_or(match &self.source {
            DataSource::Dataset { dataset, .. } => dataset.len(),
            DataSource::Synthetic(spec) => spec.rounds,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::param("runs must be at least 1"));
        }
        if self.rounds() == 0 {
            return Err(Error::param("rounds must be at least 1"));
        }
        if self.learners.is_empty() {
            return Err(Error::param("no learners selected"));
        }
        if self.set_sizes.is_empty() {
            return Err(Error::param("no set sizes selected"));
        }
        let k = self.source.num_classes();
        for &s in &self.set_sizes {
            if s == 0 || s >= k {
                return Err(Error::param(format!("set size {s} outside [1, {}] for K = {k}", k - 1)));
            }
        }
        if let DataSource::Synthetic(spec) = &self.source {
            spec.validate()?;
        }
        for &alg in &self.learners {
            self.learner_config(alg).validate()?;
        }
        Ok(())
    }

    pub fn learner_config(&self, algorithm: Algorithm) -> LearnerConfig {
        LearnerConfig::new(algorithm, self.source.dim(), self.source.num_classes())
            .with_eta(self.eta)
            .with_lambda(self.lambda)
            .with_always_shrink(self.always_shrink)
    }

    /// Canonical one-line description; the fingerprint is its hash.
    pub fn describe(&self) -> String {
        let learners: Vec<&str> = self.learners.iter().map(|a| a.name()).collect();
        let sizes: Vec<String> = self.set_sizes.iter().map(|s| s.to_string()).collect();
        format!(
            "source={};learners={};set_sizes={};runs={};rounds={};seed={};eta={};lambda={};always_shrink={}",
            self.source.describe(),
            learners.join("|"),
            sizes.join("|"),
            self.runs,
            self.rounds(),
            self.base_seed,
            self.eta,
            self.lambda,
            self.always_shrink
        )
    }

    pub fn fingerprint(&self) -> u64 {
        fnv1a(self.describe().as_bytes())
    }

    /// The stream seen in run `run` with candidate sets of size `set_size`.
    pub fn stream(&self, set_size: usize, run: usize) -> Result<PartialLabelStream> {
        let seed = self.base_seed.wrapping_add(run as u64);
        let rounds = self.rounds();
        match &self.source {
            DataSource::Dataset { dataset, shuffle } => cycled_stream(dataset, set_size, seed, *shuffle, rounds),
            DataSource::Synthetic(spec) => {
                let mut spec = spec.clone().with_seed(seed).with_set_size(set_size);
                spec.rounds = rounds;
                match spec.kind {
                    GeneratorKind::NoisySynthetic => Ok(generate_noisy(&spec)?.stream),
                    _ => Ok(generate_separable(&spec)?.0),
                }
            }
        }
    }
}

/// Passes over the dataset until `rounds` examples are produced. The first
/// pass uses `seed` as is; later passes are reshuffled with derived seeds.
fn cycled_stream(
    dataset: &Dataset,
    set_size: usize,
    seed: u64,
    shuffle: bool,
    rounds: usize,
) -> Result<PartialLabelStream> {
    let mut stream = synthesize_partial_labels(dataset, set_size, seed, shuffle)?;
    let mut pass = 1u64;
    while stream.examples.len() < rounds {
        let pass_seed = seed.wrapping_add(pass.wrapping_mul(PASS_SEED_STRIDE));
        let more = synthesize_partial_labels(dataset, set_size, pass_seed, true)?;
        stream.examples.extend(more.examples);
        pass += 1;
    }
    stream.examples.truncate(rounds);
    Ok(stream)
}

/// Per-trial cumulative error counts summed over runs. Integer sums make the
/// aggregate independent of how runs are grouped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunTotals {
    pub runs: usize,
    pub true_mistakes: Vec<u64>,
    pub ambiguous_mistakes: Vec<u64>,
}

impl RunTotals {
    pub fn from_records(records: &[learners::TrialRecord]) -> Self {
        let mut true_mistakes = Vec::with_capacity(records.len());
        let mut ambiguous_mistakes = Vec::with_capacity(records.len());
        let (mut tc, mut ac) = (0u64, 0u64);
        for r in records {
            tc += u64::from(r.true_loss);
            ac += u64::from(r.ambiguous_loss);
            true_mistakes.push(tc);
            ambiguous_mistakes.push(ac);
        }
        RunTotals {
            runs: 1,
            true_mistakes,
            ambiguous_mistakes,
        }
    }

    pub fn merge(mut self, other: RunTotals) -> Result<RunTotals> {
        if self.true_mistakes.len() != other.true_mistakes.len() {
            return Err(Error::param(format!(
                "cannot merge runs of length {} and {}",
                self.true_mistakes.len(),
                other.true_mistakes.len()
            )));
        }
        for (a, b) in self.true_mistakes.iter_mut().zip(&other.true_mistakes) {
            *a += b;
        }
        for (a, b) in self.ambiguous_mistakes.iter_mut().zip(&other.ambiguous_mistakes) {
            *a += b;
        }
        self.runs += other.runs;
        Ok(self)
    }

    /// Mean over runs of the cumulative error rate at each trial.
    pub fn true_error(&self) -> Vec<f64> {
        rates(&self.true_mistakes, self.runs)
    }

    pub fn ambiguous_error(&self) -> Vec<f64> {
        rates(&self.ambiguous_mistakes, self.runs)
    }
}

fn rates(sums: &[u64], runs: usize) -> Vec<f64> {
    sums.iter()
        .enumerate()
        .map(|(i, &m)| m as f64 / (runs as f64 * (i + 1) as f64))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorCurve {
    pub learner: Algorithm,
    pub set_size: usize,
    pub true_error: Vec<f64>,
    pub ambiguous_error: Vec<f64>,
    pub runs: usize,
    pub seed: u64,
    pub dataset: String,
    pub fingerprint: u64,
}

impl ErrorCurve {
    pub fn len(&self) -> usize {
        self.true_error.len()
    }

    pub fn is_empty(&self) -> bool {
        self.true_error.is_empty()
    }

    pub fn final_true_error(&self) -> f64 {
        self.true_error.last().copied().unwrap_or(0.0)
    }

    pub fn file_name(&self) -> String {
        format!("{}_s{}.csv", self.learner, self.set_size)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,avg_true_error,avg_ambiguous_error\n");
        for (t, (e, a)) in self.true_error.iter().zip(&self.ambiguous_error).enumerate() {
            let _ = writeln!(out, "{},{e},{a}", t + 1);
        }
        out
    }
}

pub type CurveMap = BTreeMap<(Algorithm, usize), ErrorCurve>;

/// Runs every (learner, set size) pair for `config.runs` seeded runs and
/// averages the cumulative error curves pointwise. All learners in one run
/// see the same stream.
pub fn run_experiment(config: &ExperimentConfig) -> Result<CurveMap> {
    config.validate()?;
    let learners: Vec<LearnerConfig> = config.learners.iter().map(|&a| config.learner_config(a)).collect();
    let fingerprint = config.fingerprint();
    let mut curves = BTreeMap::new();
    for &s in &config.set_sizes {
        let per_run: Vec<Vec<RunTotals>> = (0..config.runs)
            .into_par_iter()
            .map(|run| {
                let stream = config.stream(s, run)?;
                learners
                    .iter()
                    .map(|lc| Ok(RunTotals::from_records(&learners::run_sequence(lc, &stream.examples)?)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        for (i, &alg) in config.learners.iter().enumerate() {
            let runs: Vec<RunTotals> = per_run.iter().map(|r| r[i].clone()).collect();
            let totals = tree_sum(runs)?;
            let curve = ErrorCurve {
                learner: alg,
                set_size: s,
                true_error: totals.true_error(),
                ambiguous_error: totals.ambiguous_error(),
                runs: totals.runs,
                seed: config.base_seed,
                dataset: config.source.name(),
                fingerprint: fnv1a(format!("{fingerprint:016x};learner={alg};s={s}").as_bytes()),
            };
            curves.insert((alg, s), curve);
        }
    }
    Ok(curves)
}

/// Pairwise reduction in a fixed shape, independent of thread count.
pub fn tree_sum(mut items: Vec<RunTotals>) -> Result<RunTotals> {
    if items.is_empty() {
        return Err(Error::param("no runs to aggregate"));
    }
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => a.merge(b)?,
                None => a,
            });
        }
        items = next;
    }
    Ok(items.pop().expect("nonempty"))
}

pub const MANIFEST_HEADER: &str = "file,learner,set_size,runs,T,seed,dataset,fingerprint";

/// Writes one CSV per curve plus `manifest.csv` into `dir` and returns the
/// paths written, manifest last.
pub fn emit_curves(curves: &CurveMap, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut manifest = format!("{MANIFEST_HEADER}\n");
    for curve in curves.values() {
        let name = curve.file_name();
        let path = dir.join(&name);
        fs::write(&path, curve.to_csv()).map_err(|e| Error::io(&path, e))?;
        let _ = writeln!(
            manifest,
            "{name},{},{},{},{},{},{},{:016x}",
            curve.learner,
            curve.set_size,
            curve.runs,
            curve.len(),
            curve.seed,
            curve.dataset,
            curve.fingerprint
        );
        written.push(path);
    }
    let path = dir.join("manifest.csv");
    fs::write(&path, manifest).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(written)
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Instance radius used by the default grids: `2γ√(Kd)`. Smaller radii make
/// rejection sampling at margin `γ` impractically slow.
pub fn calibrated_radius(margin: f64, num_classes: usize, dim: usize) -> f64 {
    2.0 * margin * ((num_classes * dim) as f64).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridSetSize {
    Fixed(usize),
    /// `K - 1` for each class count in the grid.
    AllButOne,
}

impl FromStr for GridSetSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "k-1" | "K-1" => Ok(GridSetSize::AllButOne),
            v => v
                .parse()
                .map(GridSetSize::Fixed)
                .map_err(|_| Error::param(format!("bad set size '{v}' (expected an integer or 'k-1')"))),
        }
    }
}

/// Cartesian grid of synthetic streams.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub classes: Vec<usize>,
    pub dims: Vec<usize>,
    pub set_sizes: Vec<GridSetSize>,
    pub margins: Vec<f64>,
    /// Empty or `[0.0]` for separable cells.
    pub noise: Vec<f64>,
    pub rounds: Vec<usize>,
    pub seeds: usize,
    pub base_seed: u64,
    /// Fixed instance radius; `None` uses [`calibrated_radius`].
    pub radius: Option<f64>,
}

impl Grid {
    /// K ∈ {3,5,10}, d ∈ {5,20}, s ∈ {1,2,K−1}, γ ∈ {0.1,0.5}, T = 5000,
    /// 20 seeds.
    pub fn separable_default() -> Self {
        Grid {
            classes: vec![3, 5, 10],
            dims: vec![5, 20],
            set_sizes: vec![GridSetSize::Fixed(1), GridSetSize::Fixed(2), GridSetSize::AllButOne],
            margins: vec![0.1, 0.5],
            noise: vec![0.0],
            rounds: vec![5000],
            seeds: 20,
            base_seed: 1,
            radius: None,
        }
    }

    /// The separable grid at γ = 0.1 with label noise 0.05, 0.1 and 0.2.
    pub fn noisy_default() -> Self {
        Grid {
            margins: vec![0.1],
            noise: vec![0.05, 0.1, 0.2],
            ..Grid::separable_default()
        }
    }

    /// K = 5, d = 10, s = 2, unit radius, noise 0.1, T ∈ {10³, 10⁴}, 10 seeds.
    pub fn regret_default() -> Self {
        Grid {
            classes: vec![5],
            dims: vec![10],
            set_sizes: vec![GridSetSize::Fixed(2)],
            margins: vec![0.05],
            noise: vec![0.1],
            rounds: vec![1000, 10_000],
            seeds: 10,
            base_seed: 1,
            radius: Some(1.0),
        }
    }

    pub fn cells(&self) -> Result<Vec<SynthesisSpec>> {
        if self.seeds == 0 {
            return Err(Error::param("grid needs at least one seed"));
        }
        let noise = if self.noise.is_empty() { vec![0.0] } else { self.noise.clone() };
        let mut cells = Vec::new();
        for &k in &self.classes {
            let mut sizes = Vec::new();
            for rule in &self.set_sizes {
                let s = match *rule {
                    GridSetSize::Fixed(s) => s,
                    GridSetSize::AllButOne => k.saturating_sub(1),
                };
                if s == 0 || s >= k {
                    return Err(Error::param(format!("set size {s} outside [1, K-1] for K = {k}")));
                }
                if !sizes.contains(&s) {
                    sizes.push(s);
                }
            }
            for &d in &self.dims {
                for &s in &sizes {
                    for &g in &self.margins {
                        for &p in &noise {
                            for &t in &self.rounds {
                                for i in 0..self.seeds {
                                    let radius = self.radius.unwrap_or_else(|| calibrated_radius(g, k, d));
                                    let mut spec = SynthesisSpec::separable(
                                        k,
                                        d,
                                        t,
                                        g,
                                        s,
                                        self.base_seed.wrapping_add(i as u64),
                                    )
                                    .with_radius(radius);
                                    if p > 0.0 {
                                        spec = spec.noisy(p);
                                    }
                                    spec.validate()?;
                                    cells.push(spec);
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(cells)
    }
}

/// Mistakes of one run against a bound.
#[derive(Clone, Debug, PartialEq)]
pub struct MistakeCheck {
    /// Σ L_A over the stream.
    pub mistakes: u64,
    pub updates: u64,
    pub report: BoundReport,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct CampaignRow<T> {
    pub spec: SynthesisSpec,
    /// Extra cell parameter: test margin for noisy cells, λ for regret cells.
    pub param: Option<f64>,
    /// Per-cell failures are kept as messages so the campaign continues.
    pub outcome: std::result::Result<T, String>,
}

impl<T> CampaignRow<T> {
    pub fn passed(&self) -> bool
    where
        T: Passes,
    {
        self.outcome.as_ref().is_ok_and(Passes::passes)
    }
}

pub trait Passes {
    fn passes(&self) -> bool;
}

impl Passes for MistakeCheck {
    fn passes(&self) -> bool {
        self.pass
    }
}

impl Passes for RegretCheck {
    fn passes(&self) -> bool {
        self.pass
    }
}

fn count_mistakes(config: &LearnerConfig, examples: &[Example]) -> Result<(u64, u64)> {
    let records = learners::run_sequence(config, examples)?;
    let mistakes = records.iter().map(|r| u64::from(r.ambiguous_loss)).sum();
    let updates = records.iter().filter(|r| r.update_applied).count() as u64;
    Ok((mistakes, updates))
}

/// Avg Perceptron on certified separable streams against the separable
/// mistake bound, using the certified margin and the stream's own R and c.
/// `break_update` flips the update sign as a negative control.
pub fn mistake_campaign(cells: &[SynthesisSpec], break_update: bool) -> Vec<CampaignRow<MistakeCheck>> {
    cells
        .par_iter()
        .map(|spec| {
            let outcome = (|| -> Result<MistakeCheck> {
                let (stream, cert) = generate_separable(spec)?;
                let ex = &stream.examples;
                let config = LearnerConfig::new(Algorithm::AvgPerceptron, spec.dim, spec.num_classes)
                    .with_break_update(break_update);
                let (mistakes, updates) = count_mistakes(&config, ex)?;
                let report = theorem1_bound(cert.gamma, bounds::stream_radius(ex)?, bounds::min_label_set_size(ex)?)?;
                Ok(MistakeCheck {
                    mistakes,
                    updates,
                    pass: mistakes as f64 <= report.bound_value,
                    report,
                })
            })();
            CampaignRow {
                spec: spec.clone(),
                param: None,
                outcome: outcome.map_err(|e| e.to_string()),
            }
        })
        .collect()
}

/// Avg Perceptron on noisy streams against the non-separable bound computed
/// from the generating `W*`, once per test margin.
pub fn nonseparable_campaign(
    cells: &[SynthesisSpec],
    test_margins: &[f64],
    break_update: bool,
) -> Vec<CampaignRow<MistakeCheck>> {
    cells
        .par_iter()
        .flat_map_iter(|spec| {
            let run = (|| -> Result<_> {
                let noisy = generate_noisy(spec)?;
                let config = LearnerConfig::new(Algorithm::AvgPerceptron, spec.dim, spec.num_classes)
                    .with_break_update(break_update);
                let counts = count_mistakes(&config, &noisy.stream.examples)?;
                Ok((noisy, counts))
            })();
            test_margins
                .iter()
                .map(|&g| {
                    let outcome = match &run {
                        Ok((noisy, (mistakes, updates))) => {
                            theorem2_bound(&noisy.stream.examples, &noisy.w_star, g).map(|report| MistakeCheck {
                                mistakes: *mistakes,
                                updates: *updates,
                                pass: *mistakes as f64 <= report.bound_value,
                                report,
                            })
                        }
                        Err(e) => Err(Error::Generation(e.to_string())),
                    };
                    CampaignRow {
                        spec: spec.clone(),
                        param: Some(g),
                        outcome: outcome.map_err(|e| e.to_string()),
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegretCheck {
    /// Mean online objective minus the comparator's mean objective.
    pub regret: f64,
    pub report: BoundReport,
    pub pass: bool,
    /// max_t ||W^t|| − 1/√λ; never positive when projection works.
    pub max_ball_excess: f64,
    pub comparator_objective: f64,
    /// Regret measured against the comparator's strong-convexity lower
    /// bound instead of its objective; an upper estimate of the true regret.
    pub regret_vs_lower_bound: f64,
}

/// Avg Pegasos against the regret bound, for every cell and every `λ`.
pub fn regret_campaign(cells: &[SynthesisSpec], lambdas: &[f64]) -> Vec<CampaignRow<RegretCheck>> {
    let jobs: Vec<(&SynthesisSpec, f64)> = cells
        .iter()
        .flat_map(|spec| lambdas.iter().map(move |&l| (spec, l)))
        .collect();
    jobs.into_par_iter()
        .map(|(spec, lambda)| {
            let outcome = (|| -> Result<RegretCheck> {
                let stream = match spec.kind {
                    GeneratorKind::NoisySynthetic => generate_noisy(spec)?.stream,
                    _ => generate_separable(spec)?.0,
                };
                let ex = &stream.examples;
                let config = LearnerConfig::new(Algorithm::AvgPegasos, spec.dim, spec.num_classes).with_lambda(lambda);
                let records = learners::run_sequence(&config, ex)?;
                let comparator = batch_comparator(ex, lambda, COMPARATOR_EPOCHS, StepSchedule::InverseEpoch)?;
                let regret = empirical_regret(&records, ex, lambda, &comparator.weights)?;
                let report = theorem3_bound(lambda, bounds::stream_radius(ex)?, bounds::min_label_set_size(ex)?, ex.len())?;
                let radius = ball_radius(lambda)?;
                let max_ball_excess = records
                    .iter()
                    .map(|r| r.weight_norm - radius)
                    .fold(f64::NEG_INFINITY, f64::max);
                let regret_vs_lower_bound = regret + comparator.objective - comparator.lower_bound;
                Ok(RegretCheck {
                    regret,
                    pass: regret <= report.bound_value,
                    report,
                    max_ball_excess,
                    comparator_objective: comparator.objective,
                    regret_vs_lower_bound,
                })
            })();
            CampaignRow {
                spec: spec.clone(),
                param: Some(lambda),
                outcome: outcome.map_err(|e| e.to_string()),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_dataset() -> Dataset {
        let rows = (0..12)
            .map(|i| (vec![i as f64, (i % 3) as f64], format!("c{}", i % 4)))
            .collect();
        Dataset::from_raw("tiny", rows, "test").unwrap()
    }

    #[test]
    fn single_trial_curve() {
        let source = DataSource::Dataset {
            dataset: tiny_dataset(),
            shuffle: false,
        };
        let mut config = ExperimentConfig::new(source, vec![Algorithm::AvgPerceptron], vec![1]);
        config.runs = 1;
        config.rounds = Some(1);
        let curves = run_experiment(&config).unwrap();
        let curve = &curves[&(Algorithm::AvgPerceptron, 1)];
        // zero weights predict class 0; the first example has class 0
        assert_eq!(curve.true_error, vec![0.0]);
        assert_eq!(curve.to_csv().lines().count(), 2);
    }

    #[test]
    fn cycling_reshuffles_later_passes() {
        let ds = tiny_dataset();
        let s = cycled_stream(&ds, 2, 3, false, 30).unwrap();
        assert_eq!(s.examples.len(), 30);
        let first: Vec<_> = s.examples[..12].iter().map(|e| e.x.clone()).collect();
        let orig: Vec<_> = ds.points.iter().map(|p| p.x.clone()).collect();
        assert_eq!(first, orig);
        let second: Vec<_> = s.examples[12..24].iter().map(|e| e.x.clone()).collect();
        assert_ne!(second, orig);
    }

    #[test]
    fn tree_sum_matches_serial_sum() {
        let mk = |v: &[u64]| RunTotals {
            runs: 1,
            true_mistakes: v.to_vec(),
            ambiguous_mistakes: v.to_vec(),
        };
        let items = vec![mk(&[1, 2]), mk(&[0, 1]), mk(&[1, 1]), mk(&[0, 0]), mk(&[1, 2])];
        let total = tree_sum(items).unwrap();
        assert_eq!(total.true_mistakes, vec![3, 6]);
        assert_eq!(total.runs, 5);
        assert!(tree_sum(vec![mk(&[1]), mk(&[1, 2])]).is_err());
        assert!(tree_sum(Vec::new()).is_err());
    }

    #[test]
    fn invalid_configs() {
        let source = DataSource::Dataset {
            dataset: tiny_dataset(),
            shuffle: false,
        };
        let base = ExperimentConfig::new(source, vec![Algorithm::AvgPegasos], vec![2]);
        assert!(base.validate().is_ok());
        let mut c = base.clone();
        c.set_sizes = vec![4];
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.runs = 0;
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.lambda = 0.0;
        assert!(c.validate().is_err());
        let mut c = base;
        c.rounds = Some(0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn grid_dedupes_set_sizes() {
        let mut g = Grid::separable_default();
        g.seeds = 1;
        let cells = g.cells().unwrap();
        // K=3 has s ∈ {1,2}; K=5 and K=10 have three sizes each
        assert_eq!(cells.len(), (2 + 3 + 3) * 2 * 2);
        g.set_sizes = vec![GridSetSize::Fixed(3)];
        assert!(g.cells().is_err());
        assert_eq!("k-1".parse::<GridSetSize>().unwrap(), GridSetSize::AllButOne);
        assert!("x".parse::<GridSetSize>().is_err());
    }

    #[test]
    fn campaign_rows_keep_failures() {
        let bad = SynthesisSpec::separable(3, 2, 10, 50.0, 1, 0);
        let good = SynthesisSpec::separable(3, 2, 50, 0.05, 1, 0).with_radius(1.0);
        let rows = mistake_campaign(&[good, bad], false);
        assert!(rows[0].passed());
        assert!(rows[1].outcome.is_err());
        assert!(!rows[1].passed());
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a(b"a"), 0xaf63dc4c8601ec8c);
    }
}

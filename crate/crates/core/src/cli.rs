//! Command-line front end.
//!
//! Exit codes: 0 success, 1 runtime failure or failed check, 2 usage or
//! configuration error. `--config FILE` reads flat `key=value` lines (keys
//! are long flag names of the subcommand); flags given on the command line
//! override them.

use std::collections::BTreeMap;
use std::ffi::{OsStr, OsString};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{self, avg_margin};
use crate::data::{
    generate_noisy, generate_separable, parse_csv, parse_libsvm, read_stream, read_weights, synthesize_partial_labels,
    write_stream, write_weights, CsvOptions, Dataset, LabelColumn, SynthesisSpec,
};
use crate::error::Error;
use crate::harness::{
    self, calibrated_radius, CampaignRow, DataSource, ExperimentConfig, Grid, GridSetSize, MistakeCheck, RegretCheck,
};
use crate::learners::{Algorithm, DEFAULT_ETA, DEFAULT_LAMBDA};

/// Like `println!`, but a closed stdout (e.g. piped into `head`) is not a
/// panic.
macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

const SUBCOMMANDS: [&str; 5] = ["run", "synth", "bounds-check", "regret-check", "inspect"];

#[derive(Debug, Parser)]
#[command(name = "partial-online", version, about = "Online learning from partially labeled streams")]
#[command(args_override_self = true)]
struct Cli {
    /// Flat key=value file of default flag values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads for runs and grid cells [default: available cores].
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Repeated seeded runs; writes averaged error curves and a manifest.
    Run(RunArgs),
    /// Writes a partially labeled stream.
    Synth(SynthArgs),
    /// Mistake-bound conformance of Avg Perceptron on a synthetic grid.
    BoundsCheck(BoundsArgs),
    /// Regret-bound conformance of Avg Pegasos on a synthetic grid.
    RegretCheck(RegretArgs),
    /// Summary statistics of a stream file.
    Inspect(InspectArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Libsvm,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SyntheticKind {
    Separable,
    Noisy,
}

#[derive(Debug, Args)]
struct DatasetArgs {
    /// Dataset file (libsvm or CSV).
    #[arg(long)]
    data: Option<PathBuf>,

    /// Input format [default: csv for *.csv, libsvm otherwise].
    #[arg(long, value_enum)]
    format: Option<Format>,

    /// CSV label column, 1-based, or "last".
    #[arg(long, default_value = "last")]
    label_col: String,

    /// CSV field delimiter.
    #[arg(long, default_value = ",")]
    delimiter: char,

    /// Keep only the first N rows.
    #[arg(long)]
    max_rows: Option<usize>,

    /// Rescale every feature to [0, 1].
    #[arg(long)]
    scale: bool,
}

#[derive(Debug, Args)]
struct SynthSpecArgs {
    /// Number of classes K.
    #[arg(long, default_value_t = 5)]
    k: usize,

    /// Feature dimension d.
    #[arg(long, default_value_t = 10)]
    d: usize,

    /// Minimum average margin of the generating matrix.
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,

    /// Instance norm [default: 2·gamma·sqrt(K·d)].
    #[arg(long)]
    radius: Option<f64>,

    /// Label-noise rate for noisy streams.
    #[arg(long, default_value_t = 0.1)]
    noise: f64,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["data", "synthetic"])))]
struct RunArgs {
    #[command(flatten)]
    dataset: DatasetArgs,

    /// Use a synthetic generator instead of a dataset.
    #[arg(long, value_enum)]
    synthetic: Option<SyntheticKind>,

    #[command(flatten)]
    spec: SynthSpecArgs,

    /// Comma-separated learner names.
    #[arg(long, value_delimiter = ',', default_value = "avg-perceptron,max-perceptron,avg-pegasos,max-pegasos")]
    learners: Vec<Algorithm>,

    /// Comma-separated candidate set sizes.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    set_sizes: Vec<usize>,

    #[arg(long, default_value_t = harness::DEFAULT_RUNS)]
    runs: usize,

    /// Rounds per run [default: dataset size, or 1000 for synthetic data].
    #[arg(long)]
    rounds: Option<usize>,

    /// Perceptron step size.
    #[arg(long, default_value_t = DEFAULT_ETA)]
    eta: f64,

    /// Pegasos regularization.
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    lambda: f64,

    /// Pegasos shrinks and projects even on zero-loss rounds.
    #[arg(long)]
    always_shrink: bool,

    /// Permute the dataset order in every run.
    #[arg(long)]
    shuffle: bool,

    /// Base seed; run r uses seed + r.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[command(flatten)]
    dataset: DatasetArgs,

    /// Generator for synthetic streams (ignored with --data).
    #[arg(long, value_enum, default_value = "separable", conflicts_with = "data")]
    synthetic: SyntheticKind,

    #[command(flatten)]
    spec: SynthSpecArgs,

    /// Stream length for synthetic streams.
    #[arg(long, default_value_t = 1000, conflicts_with = "data")]
    rounds: usize,

    /// Candidate set size.
    #[arg(long, default_value_t = 2)]
    set_size: usize,

    /// Permute the dataset order first.
    #[arg(long)]
    shuffle: bool,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output stream file.
    #[arg(long)]
    out: PathBuf,

    /// Also write the generating matrix (synthetic streams only).
    #[arg(long, conflicts_with = "data")]
    wstar_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    /// Class counts.
    #[arg(long, value_delimiter = ',', default_value = "3,5,10")]
    k: Vec<usize>,

    /// Dimensions.
    #[arg(long, value_delimiter = ',', default_value = "5,20")]
    d: Vec<usize>,

    /// Set sizes; "k-1" means K−1 for each K.
    #[arg(long, value_delimiter = ',', default_value = "1,2,k-1")]
    set_sizes: Vec<GridSetSize>,

    /// Generation margins [default: 0.1,0.5; 0.1 with --noise].
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<f64>,

    #[arg(long, value_delimiter = ',', default_value = "5000")]
    rounds: Vec<usize>,

    /// Seeds per cell.
    #[arg(long, default_value_t = 20)]
    seeds: usize,

    /// First seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Fixed instance norm [default: 2·gamma·sqrt(K·d)].
    #[arg(long)]
    radius: Option<f64>,

    /// Label-noise rates; switches to the non-separable bound.
    #[arg(long, value_delimiter = ',')]
    noise: Vec<f64>,

    /// Margins at which the non-separable bound is evaluated.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1.0")]
    test_gamma: Vec<f64>,

    /// Flip the update sign (negative control).
    #[arg(long)]
    break_update: bool,
}

#[derive(Debug, Args)]
struct RegretArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.1,1")]
    lambda: Vec<f64>,

    #[arg(long, value_delimiter = ',', default_value = "1000,10000")]
    rounds: Vec<usize>,

    #[arg(long, default_value_t = 10)]
    seeds: usize,

    #[arg(long, default_value_t = 1)]
    seed: u64,

    #[arg(long, default_value_t = 5)]
    k: usize,

    #[arg(long, default_value_t = 10)]
    d: usize,

    #[arg(long, default_value_t = 2)]
    set_size: usize,

    #[arg(long, default_value_t = 0.05)]
    gamma: f64,

    #[arg(long, default_value_t = 1.0)]
    radius: f64,

    #[arg(long, default_value_t = 0.1)]
    noise: f64,
}

#[derive(Debug, Args)]
struct InspectArgs {
    /// Stream file written by `synth`.
    stream: PathBuf,

    /// Weight matrix file; adds margin statistics.
    #[arg(long)]
    wstar: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    fn usage(e: impl ToString) -> Self {
        Failure::Usage(e.to_string())
    }

    fn runtime(e: impl ToString) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match merge_config(args) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return 2;
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let result = pool.install(|| match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Synth(a) => cmd_synth(a),
        Command::BoundsCheck(a) => cmd_bounds_check(a),
        Command::RegretCheck(a) => cmd_regret_check(a),
        Command::Inspect(a) => cmd_inspect(a),
    });
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

/// Expands `--config FILE` into flags inserted right after the subcommand
/// name, so explicit flags that follow take precedence.
fn merge_config(args: Vec<OsString>) -> std::result::Result<Vec<OsString>, String> {
    let mut path = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if a == "--config" {
            path = args.get(i + 1).map(PathBuf::from);
            break;
        }
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
            break;
        }
        i += 1;
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let extra = config_flags(&text)?;
    let Some(pos) = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
    else {
        return Ok(args);
    };
    let mut merged = args[..=pos].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&args[pos + 1..]);
    Ok(merged)
}

fn config_flags(text: &str) -> std::result::Result<Vec<OsString>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" {
            return Err(format!("config line {}: nested config files are not supported", i + 1));
        }
        match value {
            "true" => out.push(OsString::from(format!("--{key}"))),
            "false" => {}
            v => {
                out.push(OsString::from(format!("--{key}")));
                out.push(OsString::from(v));
            }
        }
    }
    Ok(out)
}

fn load_dataset(args: &DatasetArgs, path: &Path) -> std::result::Result<Dataset, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::runtime(Error::io(path, e)))?;
    let name = path
        .file_stem()
        .and_then(OsStr::to_str)
        .unwrap_or("dataset")
        .to_string();
    let format = args.format.unwrap_or_else(|| {
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            Format::Csv
        } else {
            Format::Libsvm
        }
    });
    let label_column = match args.label_col.as_str() {
        "last" => LabelColumn::Last,
        v => match v.parse::<usize>() {
            Ok(j) if j >= 1 => LabelColumn::Index(j - 1),
            _ => return Err(Failure::usage(format!("--label-col must be a 1-based index or 'last', got '{v}'"))),
        },
    };
    if !args.delimiter.is_ascii() {
        return Err(Failure::usage("--delimiter must be a single ASCII character"));
    }
    let ds = match format {
        Format::Libsvm => parse_libsvm(&name, &text),
        Format::Csv => parse_csv(
            &name,
            &text,
            CsvOptions {
                label_column,
                delimiter: args.delimiter as u8,
            },
        ),
    }
    .map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?;
    let ds = match args.max_rows {
        Some(n) => ds.truncated(n),
        None => ds,
    };
    Ok(if args.scale { ds.min_max_scaled() } else { ds })
}

fn synthesis_spec(kind: SyntheticKind, a: &SynthSpecArgs, rounds: usize, s: usize, seed: u64) -> SynthesisSpec {
    let radius = a.radius.unwrap_or_else(|| calibrated_radius(a.gamma, a.k, a.d));
    let spec = SynthesisSpec::separable(a.k, a.d, rounds, a.gamma, s, seed).with_radius(radius);
    match kind {
        SyntheticKind::Separable => spec,
        SyntheticKind::Noisy => spec.noisy(a.noise),
    }
}

fn cmd_run(a: RunArgs) -> CmdResult {
    let source = match (&a.dataset.data, a.synthetic) {
        (Some(path), _) => DataSource::Dataset {
            dataset: load_dataset(&a.dataset, path)?,
            shuffle: a.shuffle,
        },
        (None, Some(kind)) => {
            let s = a.set_sizes.first().copied().unwrap_or(1);
            DataSource::Synthetic(synthesis_spec(kind, &a.spec, a.rounds.unwrap_or(1000), s, a.seed))
        }
        (None, None) => return Err(Failure::usage("one of --data or --synthetic is required")),
    };
    let config = ExperimentConfig {
        runs: a.runs,
        rounds: a.rounds,
        base_seed: a.seed,
        eta: a.eta,
        lambda: a.lambda,
        always_shrink: a.always_shrink,
        ..ExperimentConfig::new(source, a.learners.clone(), a.set_sizes.clone())
    };
    config.validate().map_err(Failure::usage)?;
    let curves = harness::run_experiment(&config).map_err(Failure::runtime)?;
    harness::emit_curves(&curves, &a.out).map_err(Failure::runtime)?;
    let effective = run_config_text(&a, &config);
    let path = a.out.join("run_config.txt");
    fs::write(&path, effective).map_err(|e| Failure::runtime(Error::io(&path, e)))?;

    outln!("learner,set_size,runs,T,final_true_error,final_ambiguous_error");
    for c in curves.values() {
        outln!(
            "{},{},{},{},{:.6},{:.6}",
            c.learner,
            c.set_size,
            c.runs,
            c.len(),
            c.final_true_error(),
            c.ambiguous_error.last().copied().unwrap_or(0.0)
        );
    }
    outln!("wrote {} curve files to {}", curves.len(), a.out.display());
    Ok(0)
}

/// Effective merged configuration, in the same key=value format that
/// `--config` accepts.
fn run_config_text(a: &RunArgs, config: &ExperimentConfig) -> String {
    let mut kv: BTreeMap<&str, String> = BTreeMap::new();
    match &a.dataset.data {
        Some(p) => {
            kv.insert("data", p.display().to_string());
            kv.insert("label-col", a.dataset.label_col.clone());
            kv.insert("delimiter", a.dataset.delimiter.to_string());
            kv.insert("scale", a.dataset.scale.to_string());
            kv.insert("shuffle", a.shuffle.to_string());
            if let Some(f) = a.dataset.format {
                kv.insert("format", format!("{f:?}").to_lowercase());
            }
            if let Some(n) = a.dataset.max_rows {
                kv.insert("max-rows", n.to_string());
            }
        }
        None => {
            if let DataSource::Synthetic(spec) = &config.source {
                let kind = a.synthetic.map(|k| format!("{k:?}").to_lowercase()).unwrap_or_default();
                kv.insert("synthetic", kind);
                kv.insert("k", spec.num_classes.to_string());
                kv.insert("d", spec.dim.to_string());
                kv.insert("gamma", spec.margin.to_string());
                kv.insert("radius", spec.radius.to_string());
                kv.insert("noise", spec.noise.to_string());
            }
        }
    }
    let learners: Vec<&str> = config.learners.iter().map(|l| l.name()).collect();
    let sizes: Vec<String> = config.set_sizes.iter().map(|s| s.to_string()).collect();
    kv.insert("learners", learners.join(","));
    kv.insert("set-sizes", sizes.join(","));
    kv.insert("runs", config.runs.to_string());
    kv.insert("rounds", config.rounds().to_string());
    kv.insert("eta", config.eta.to_string());
    kv.insert("lambda", config.lambda.to_string());
    kv.insert("always-shrink", config.always_shrink.to_string());
    kv.insert("seed", config.base_seed.to_string());
    kv.insert("out", a.out.display().to_string());
    let mut out = format!("# fingerprint={:016x}\n", config.fingerprint());
    for (k, v) in kv {
        let _ = writeln!(out, "{k}={v}");
    }
    out
}

fn cmd_synth(a: SynthArgs) -> CmdResult {
    let stream = match &a.dataset.data {
        Some(path) => {
            let ds = load_dataset(&a.dataset, path)?;
            if a.set_size == 0 || a.set_size >= ds.num_classes {
                return Err(Failure::usage(format!(
                    "--set-size {} outside [1, {}] for K = {}",
                    a.set_size,
                    ds.num_classes - 1,
                    ds.num_classes
                )));
            }
            synthesize_partial_labels(&ds, a.set_size, a.seed, a.shuffle).map_err(Failure::runtime)?
        }
        None => {
            let spec = synthesis_spec(a.synthetic, &a.spec, a.rounds, a.set_size, a.seed);
            spec.validate().map_err(Failure::usage)?;
            let (stream, w_star) = match a.synthetic {
                SyntheticKind::Separable => {
                    let (s, cert) = generate_separable(&spec).map_err(Failure::runtime)?;
                    (s, cert.w_star)
                }
                SyntheticKind::Noisy => {
                    let n = generate_noisy(&spec).map_err(Failure::runtime)?;
                    (n.stream, n.w_star)
                }
            };
            if let Some(p) = &a.wstar_out {
                fs::write(p, write_weights(&w_star)).map_err(|e| Failure::runtime(Error::io(p, e)))?;
            }
            stream
        }
    };
    fs::write(&a.out, write_stream(&stream)).map_err(|e| Failure::runtime(Error::io(&a.out, e)))?;
    outln!("wrote {} examples to {}", stream.len(), a.out.display());
    Ok(0)
}

fn check_positive(name: &str, values: &[f64]) -> std::result::Result<(), Failure> {
    match values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        Some(v) => Err(Failure::usage(format!("--{name} must be positive, got {v}"))),
        None => Ok(()),
    }
}

fn cell_label(spec: &SynthesisSpec) -> String {
    format!(
        "{},{},{},{},{},{},{:.4}",
        spec.num_classes, spec.dim, spec.set_size, spec.margin, spec.rounds, spec.seed, spec.radius
    )
}

fn cmd_bounds_check(a: BoundsArgs) -> CmdResult {
    let noisy = !a.noise.is_empty();
    let margins = if !a.gamma.is_empty() {
        a.gamma.clone()
    } else if noisy {
        Grid::noisy_default().margins
    } else {
        Grid::separable_default().margins
    };
    check_positive("gamma", &margins)?;
    check_positive("test-gamma", &a.test_gamma)?;
    if let Some(r) = a.radius {
        check_positive("radius", &[r])?;
    }
    if let Some(p) = a.noise.iter().find(|p| !(**p >= 0.0 && **p <= 1.0)) {
        return Err(Failure::usage(format!("--noise must lie in [0, 1], got {p}")));
    }
    let grid = Grid {
        classes: a.k.clone(),
        dims: a.d.clone(),
        set_sizes: a.set_sizes.clone(),
        margins,
        noise: a.noise.clone(),
        rounds: a.rounds.clone(),
        seeds: a.seeds,
        base_seed: a.seed,
        radius: a.radius,
    };
    let cells = grid.cells().map_err(Failure::usage)?;
    let rows = if noisy {
        harness::nonseparable_campaign(&cells, &a.test_gamma, a.break_update)
    } else {
        harness::mistake_campaign(&cells, a.break_update)
    };
    outln!("{}", mistake_table(&rows, noisy).trim_end());
    finish(rows.len(), rows.iter().filter(|r| r.passed()).count())
}

fn mistake_table(rows: &[CampaignRow<MistakeCheck>], noisy: bool) -> String {
    let mut out = String::from("K,d,s,gamma,T,seed,R,");
    out.push_str(if noisy { "noise,test_gamma,D," } else { "certified_gamma," });
    out.push_str("mistakes,updates,bound,status\n");
    for row in rows {
        out.push_str(&cell_label(&row.spec));
        out.push(',');
        match &row.outcome {
            Ok(m) => {
                if noisy {
                    let _ = write!(
                        out,
                        "{},{},{:.4},",
                        row.spec.noise,
                        row.param.unwrap_or(0.0),
                        m.report.constant("D").unwrap_or(0.0)
                    );
                } else {
                    let _ = write!(out, "{:.6},", m.report.constant("gamma").unwrap_or(0.0));
                }
                let _ = writeln!(
                    out,
                    "{},{},{:.3},{}",
                    m.mistakes,
                    m.updates,
                    m.report.bound_value,
                    if m.pass { "PASS" } else { "FAIL" }
                );
            }
            Err(e) => {
                let blanks = if noisy { ",,,,,," } else { ",,,," };
                let _ = writeln!(out, "{blanks}ERROR: {}", e.replace(',', ";"));
            }
        }
    }
    out
}

fn cmd_regret_check(a: RegretArgs) -> CmdResult {
    check_positive("lambda", &a.lambda)?;
    check_positive("gamma", &[a.gamma])?;
    check_positive("radius", &[a.radius])?;
    if !(0.0..=1.0).contains(&a.noise) {
        return Err(Failure::usage(format!("--noise must lie in [0, 1], got {}", a.noise)));
    }
    let grid = Grid {
        classes: vec![a.k],
        dims: vec![a.d],
        set_sizes: vec![GridSetSize::Fixed(a.set_size)],
        margins: vec![a.gamma],
        noise: vec![a.noise],
        rounds: a.rounds.clone(),
        seeds: a.seeds,
        base_seed: a.seed,
        radius: Some(a.radius),
    };
    let cells = grid.cells().map_err(Failure::usage)?;
    let rows = harness::regret_campaign(&cells, &a.lambda);
    outln!("{}", regret_table(&rows).trim_end());
    finish(rows.len(), rows.iter().filter(|r| r.passed()).count())
}

fn regret_table(rows: &[CampaignRow<RegretCheck>]) -> String {
    let mut out = String::from(
        "K,d,s,gamma,T,seed,R,lambda,regret,bound,G,lnT_over_lambdaT,ball_excess,regret_vs_lower_bound,status\n",
    );
    for row in rows {
        out.push_str(&cell_label(&row.spec));
        let _ = write!(out, ",{},", row.param.unwrap_or(0.0));
        match &row.outcome {
            Ok(r) => {
                let _ = writeln!(
                    out,
                    "{:.6},{:.6},{:.6},{:.6e},{:.3e},{:.6},{}",
                    r.regret,
                    r.report.bound_value,
                    r.report.constant("G").unwrap_or(0.0),
                    r.report.constant("lnT_over_lambdaT").unwrap_or(0.0),
                    r.max_ball_excess,
                    r.regret_vs_lower_bound,
                    if r.pass { "PASS" } else { "FAIL" }
                );
            }
            Err(e) => {
                let _ = writeln!(out, ",,,,,,ERROR: {}", e.replace(',', ";"));
            }
        }
    }
    out
}

fn finish(total: usize, passed: usize) -> CmdResult {
    outln!("{passed}/{total} cells pass");
    Ok(if passed == total { 0 } else { 1 })
}

fn cmd_inspect(a: InspectArgs) -> CmdResult {
    let text = fs::read_to_string(&a.stream).map_err(|e| Failure::runtime(Error::io(&a.stream, e)))?;
    let stream = read_stream(&text).map_err(|e| Failure::runtime(format!("{}: {e}", a.stream.display())))?;
    let ex = &stream.examples;
    outln!("K={}", stream.num_classes);
    outln!("d={}", stream.dim);
    outln!("T={}", ex.len());
    if ex.is_empty() {
        return Ok(0);
    }
    let c = bounds::min_label_set_size(ex).map_err(Failure::runtime)?;
    let r = bounds::stream_radius(ex).map_err(Failure::runtime)?;
    outln!("c={c}");
    outln!("R={r}");
    let mut hist = vec![0usize; stream.num_classes];
    for e in ex {
        hist[e.y_true] += 1;
    }
    let hist: Vec<String> = hist.iter().enumerate().map(|(k, n)| format!("{}:{n}", k + 1)).collect();
    outln!("label_histogram={}", hist.join(","));
    if let Some(p) = &a.wstar {
        let text = fs::read_to_string(p).map_err(|e| Failure::runtime(Error::io(p, e)))?;
        let w = read_weights(&text).map_err(|e| Failure::runtime(format!("{}: {e}", p.display())))?;
        if w.dim() != stream.dim || w.num_classes() != stream.num_classes {
            return Err(Failure::runtime(format!(
                "weights are {}x{}, stream needs {}x{}",
                w.dim(),
                w.num_classes(),
                stream.dim,
                stream.num_classes
            )));
        }
        let margins = ex
            .iter()
            .map(|e| avg_margin(&w, &e.x, &e.labels))
            .collect::<crate::Result<Vec<f64>>>()
            .map_err(Failure::runtime)?;
        let min = margins.iter().copied().fold(f64::INFINITY, f64::min);
        let max = margins.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = margins.iter().sum::<f64>() / margins.len() as f64;
        let positive = margins.iter().filter(|m| **m > 0.0).count();
        outln!("wstar_norm={}", w.frobenius_norm());
        outln!("margin_min={min}");
        outln!("margin_mean={mean}");
        outln!("margin_max={max}");
        outln!("margin_positive={positive}/{}", margins.len());
    }
    Ok(0)
}

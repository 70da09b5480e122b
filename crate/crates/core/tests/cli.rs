use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use partial_online::bounds::stream_radius;
use partial_online::data::read_stream;

const BIN: &str = env!("CARGO_BIN_EXE_partial-online");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn data_file(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn synthetic_run_writes_one_curve_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out_s = out_dir.to_str().unwrap();
    let args = [
        "run", "--synthetic", "separable", "--k", "5", "--d", "10", "--gamma", "0.2", "--rounds", "2000",
        "--learners", "avg-perceptron", "--set-sizes", "2", "--runs", "10", "--seed", "7", "--out", out_s,
    ];
    let out = run(&args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let curve = fs::read_to_string(out_dir.join("avg-perceptron_s2.csv")).unwrap();
    assert_eq!(curve.lines().count(), 2001);
    assert_eq!(curve.lines().next(), Some("trial,avg_true_error,avg_ambiguous_error"));
    let manifest = fs::read_to_string(out_dir.join("manifest.csv")).unwrap();
    let lines: Vec<&str> = manifest.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("file,learner,set_size,runs,T,seed,dataset"));
    assert!(lines[1].starts_with("avg-perceptron_s2.csv,avg-perceptron,2,10,2000,7,"));

    // second invocation is byte-identical
    let again = dir.path().join("again");
    let mut args2 = args.to_vec();
    let again_s = again.to_str().unwrap();
    *args2.last_mut().unwrap() = again_s;
    assert_eq!(code(&run(&args2)), 0);
    for f in ["avg-perceptron_s2.csv", "manifest.csv"] {
        assert_eq!(fs::read(out_dir.join(f)).unwrap(), fs::read(again.join(f)).unwrap());
    }
}

#[test]
fn run_usage_errors_exit_2() {
    let out = run(&["run", "--synthetic", "separable", "--learners", "avg-perceptron"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--out"));

    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    let out = run(&["run", "--synthetic", "separable", "--k", "5", "--set-sizes", "9", "--out", o]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("set size 9"));

    let out = run(&["run", "--synthetic", "separable", "--data", "x.csv", "--out", o]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&run(&["run", "--out", o])), 2);
    assert_eq!(code(&run(&["run", "--synthetic", "separable", "--out", o, "--bogus"])), 2);
    assert_eq!(code(&run(&["run", "--synthetic", "separable", "--learners", "best", "--out", o])), 2);
    assert_eq!(code(&run(&["run", "--synthetic", "separable", "--lambda", "0", "--out", o])), 2);
}

#[test]
fn missing_dataset_is_a_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    let out = run(&["run", "--data", "/nonexistent/data.csv", "--out", o]);
    assert_eq!(code(&out), 1);
}

#[test]
fn dataset_run_with_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.conf");
    fs::write(
        &cfg,
        format!(
            "# small ecoli run\ndata={}\nset_sizes=2\nruns=4\nlearners=avg-pegasos\nlambda=0.5\nseed=3\n",
            data_file("ecoli.csv")
        ),
    )
    .unwrap();
    let out_dir = dir.path().join("o");
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "run",
        "--lambda",
        "0.05",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let effective = fs::read_to_string(out_dir.join("run_config.txt")).unwrap();
    assert!(effective.contains("lambda=0.05\n"), "{effective}");
    assert!(effective.contains("runs=4\n"));
    assert!(effective.contains("seed=3\n"));
    assert!(effective.contains("rounds=336\n"));
    let manifest = fs::read_to_string(out_dir.join("manifest.csv")).unwrap();
    assert!(manifest.contains("avg-pegasos_s2.csv,avg-pegasos,2,4,336,3,ecoli,"));

    // the echoed config reproduces the run
    let replay = dir.path().join("replay.conf");
    let replay_out = dir.path().join("r");
    fs::write(&replay, effective.replace(out_dir.to_str().unwrap(), replay_out.to_str().unwrap())).unwrap();
    let out = run(&["run", "--config", replay.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(
        fs::read(out_dir.join("avg-pegasos_s2.csv")).unwrap(),
        fs::read(replay_out.join("avg-pegasos_s2.csv")).unwrap()
    );
}

#[test]
fn synth_then_inspect() {
    let dir = tempfile::tempdir().unwrap();
    let stream = dir.path().join("s.csv");
    let wstar = dir.path().join("w.csv");
    let out = run(&[
        "synth", "--k", "6", "--d", "4", "--rounds", "300", "--set-size", "3", "--gamma", "0.1", "--seed", "5",
        "--out", stream.to_str().unwrap(), "--wstar-out", wstar.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = run(&["inspect", stream.to_str().unwrap(), "--wstar", wstar.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let field = |key: &str| -> String {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{key}=")))
            .unwrap_or_else(|| panic!("{key} missing in {text}"))
            .to_string()
    };
    assert_eq!(field("K"), "6");
    assert_eq!(field("d"), "4");
    assert_eq!(field("T"), "300");
    assert_eq!(field("c"), "3");
    let parsed = read_stream(&fs::read_to_string(&stream).unwrap()).unwrap();
    assert_eq!(field("R").parse::<f64>().unwrap(), stream_radius(&parsed.examples).unwrap());
    assert!(field("margin_min").parse::<f64>().unwrap() >= 0.1);
    assert_eq!(field("margin_positive"), "300/300");
    let hist: usize = field("label_histogram")
        .split(',')
        .map(|kv| kv.split_once(':').unwrap().1.parse::<usize>().unwrap())
        .sum();
    assert_eq!(hist, 300);

    // same seed, same bytes
    let stream2 = dir.path().join("s2.csv");
    run(&[
        "synth", "--k", "6", "--d", "4", "--rounds", "300", "--set-size", "3", "--gamma", "0.1", "--seed", "5",
        "--out", stream2.to_str().unwrap(),
    ]);
    assert_eq!(fs::read(&stream).unwrap(), fs::read(&stream2).unwrap());
}

#[test]
fn synth_from_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let stream = dir.path().join("s.csv");
    let out = run(&[
        "synth", "--data", &data_file("dermatology.csv"), "--set-size", "2", "--out", stream.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let parsed = read_stream(&fs::read_to_string(&stream).unwrap()).unwrap();
    assert_eq!((parsed.len(), parsed.num_classes, parsed.dim), (358, 6, 34));
    let out = run(&["synth", "--data", &data_file("dermatology.csv"), "--set-size", "6", "--out", "x"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn inspect_failures() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    assert_eq!(code(&run(&["inspect", empty.to_str().unwrap()])), 1);
    assert_eq!(code(&run(&["inspect", "/nonexistent/stream.csv"])), 1);
    assert_eq!(code(&run(&["inspect"])), 2);
}

#[test]
fn bounds_check_small_grid_and_negative_control() {
    let grid = ["bounds-check", "--k", "4", "--d", "5", "--set-sizes", "1,k-1", "--rounds", "1500", "--seeds", "2"];
    let out = run(&grid);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.starts_with("K,d,s,gamma,T,seed,R,certified_gamma,mistakes,updates,bound,status"));
    assert_eq!(text.matches(",PASS").count(), 8);

    let mut broken = grid.to_vec();
    broken.push("--break-update");
    let out = run(&broken);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains(",FAIL"));

    let mut noisy = grid.to_vec();
    noisy.extend(["--noise", "0.1"]);
    let out = run(&noisy);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("noise,test_gamma,D"));

    assert_eq!(code(&run(&["bounds-check", "--gamma", "0"])), 2);
    assert_eq!(code(&run(&["bounds-check", "--k", "3", "--set-sizes", "3"])), 2);
}

#[test]
fn regret_check_small_grid() {
    let out = run(&["regret-check", "--rounds", "300", "--seeds", "2", "--lambda", "0.5"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    let header = text.lines().next().unwrap();
    assert!(header.contains(",G,") && header.contains("lnT_over_lambdaT"));
    assert_eq!(text.matches(",PASS").count(), 2);
    assert_eq!(code(&run(&["regret-check", "--lambda", "0"])), 2);
    assert_eq!(code(&run(&["regret-check", "--lambda", "-1"])), 2);
}

#[test]
fn help_lists_flags_for_every_subcommand() {
    let expected: &[(&str, &[&str])] = &[
        ("run", &["--data", "--format", "--label-col", "--learners", "--set-sizes", "--runs", "--rounds", "--eta", "--lambda", "--seed", "--out", "--threads", "--config"]),
        ("synth", &["--k", "--d", "--gamma", "--set-size", "--noise", "--seed", "--out"]),
        ("bounds-check", &["--break-update", "--noise", "--gamma", "--seeds"]),
        ("regret-check", &["--lambda", "--rounds", "--seeds"]),
        ("inspect", &["--wstar"]),
    ];
    for (cmd, flags) in expected {
        let out = run(&[cmd, "--help"]);
        assert_eq!(code(&out), 0);
        let text = stdout(&out);
        for f in *flags {
            assert!(text.contains(f), "{cmd} --help lacks {f}");
        }
    }
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&[])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn threads_flag_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for threads in ["1", "3"] {
        let o = dir.path().join(threads);
        let out = run(&[
            "--threads", threads, "run", "--data", &data_file("ecoli.csv"), "--set-sizes", "2,4", "--runs", "12",
            "--out", o.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        outs.push(o);
    }
    for f in ["avg-perceptron_s4.csv", "max-pegasos_s2.csv", "manifest.csv"] {
        assert_eq!(fs::read(outs[0].join(f)).unwrap(), fs::read(outs[1].join(f)).unwrap());
    }
    assert_eq!(code(&run(&["--threads", "0", "inspect", "x"])), 2);
}

//! End-to-end runs of the mmm binary: exit codes, output files, and the
//! determinism contract (same invocation + same seed = same bytes).

use std::path::Path;
use std::process::Command;

use monotone_markov::diagnostics::dkw_band;

fn run_in(dir: &Path, envs: &[(&str, &str)], args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_mmm"))
        .args(args)
        .envs(envs.iter().copied())
        .current_dir(dir)
        .output()
        .expect("mmm binary runs");
    (
        out.status.code().expect("no signal"),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn run(dir: &Path, args: &[&str]) -> (i32, String, String) {
    run_in(dir, &[], args)
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

#[test]
fn same_invocation_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "simulate",
        "--model",
        "wage",
        "--seed",
        "42",
        "--horizon",
        "200",
        "--out",
        "a.csv",
    ];
    let (code, _, _) = run(dir.path(), &args);
    assert_eq!(code, 0);
    let mut again = args;
    again[8] = "b.csv";
    let (code, _, _) = run(dir.path(), &again);
    assert_eq!(code, 0);
    assert_eq!(read(dir.path(), "a.csv"), read(dir.path(), "b.csv"));
    assert_eq!(
        read(dir.path(), "a-jumps.csv"),
        read(dir.path(), "b-jumps.csv")
    );
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "converge",
        "--model",
        "ou",
        "--seed",
        "9",
        "--n-paths",
        "200",
        "--out",
        "one.csv",
    ];
    let (code, _, _) = run_in(dir.path(), &[("MMM_THREADS", "1")], &args);
    assert_eq!(code, 0);
    let mut again = args;
    again[8] = "four.csv";
    let (code, _, _) = run_in(dir.path(), &[("MMM_THREADS", "4")], &again);
    assert_eq!(code, 0);
    assert_eq!(read(dir.path(), "one.csv"), read(dir.path(), "four.csv"));
}

#[test]
fn ou_zero_horizon_writes_a_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run(
        dir.path(),
        &["simulate", "--model", "ou", "--seed", "1", "--horizon", "0"],
    );
    assert_eq!(code, 0);
    let grid = read(dir.path(), "ou-path.csv");
    let lines: Vec<&str> = grid.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "t,x");
    assert!(lines[1].starts_with("0,"));
}

#[test]
fn wage_jump_count_tracks_the_event_rate() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run(
        dir.path(),
        &[
            "simulate",
            "--model",
            "wage",
            "--seed",
            "42",
            "--horizon",
            "1000",
        ],
    );
    assert_eq!(code, 0);
    // Events arrive at rate 0.6, so ~600 jumps; the file adds a header and
    // the t = 0 start row.
    let n_events = read(dir.path(), "wage-path-jumps.csv").lines().count() - 2;
    assert!(
        (450..=750).contains(&n_events),
        "expected ~600 events, got {n_events}"
    );
}

#[test]
fn config_section_header_matches_the_preset() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("wage.toml"), "[wage]\n").unwrap();
    let (code, _, _) = run(
        dir.path(),
        &[
            "simulate",
            "--config",
            "wage.toml",
            "--seed",
            "5",
            "--horizon",
            "100",
            "--out",
            "from-config.csv",
        ],
    );
    assert_eq!(code, 0);
    let (code, _, _) = run(
        dir.path(),
        &[
            "simulate",
            "--model",
            "wage",
            "--seed",
            "5",
            "--horizon",
            "100",
            "--out",
            "from-preset.csv",
        ],
    );
    assert_eq!(code, 0);
    assert_eq!(
        read(dir.path(), "from-config.csv"),
        read(dir.path(), "from-preset.csv")
    );
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "[ou]\nthetaa = 2.0\n").unwrap();
    let (code, _, err) = run(
        dir.path(),
        &[
            "simulate",
            "--config",
            "bad.toml",
            "--seed",
            "1",
            "--horizon",
            "1",
        ],
    );
    assert_eq!(code, 2);
    assert!(
        err.contains("thetaa"),
        "stderr should name the bad key: {err}"
    );
}

#[test]
fn unknown_figure_id_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run(dir.path(), &["figure", "--id", "bogus", "--seed", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown figure id"), "{err}");
}

#[test]
fn tail_with_too_few_events_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run(
        dir.path(),
        &[
            "tail",
            "--model",
            "income-jump",
            "--seed",
            "3",
            "--n-events",
            "40",
        ],
    );
    assert_eq!(code, 4);
}

#[test]
fn check_catches_the_order_reversing_preset() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run(dir.path(), &["check", "--model", "flip", "--seed", "1"]);
    assert_eq!(code, 5);
    assert!(
        out.contains("FAIL"),
        "stdout should report the failure: {out}"
    );
}

#[test]
fn check_wage_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, err) = run(dir.path(), &["check", "--model", "wage", "--seed", "1"]);
    assert_eq!(code, 0, "stdout: {out}\nstderr: {err}");
    assert!(out.contains("all checks passed"));
    assert!(!out.contains("FAIL"));
}

#[test]
fn converge_from_stationary_sits_at_the_noise_floor() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run(
        dir.path(),
        &[
            "converge",
            "--model",
            "ou",
            "--seed",
            "2",
            "--from",
            "stationary",
            "--n-paths",
            "300",
        ],
    );
    assert_eq!(code, 0);
    assert!(out.contains("noise floor"), "{out}");
}

#[test]
fn figure_histograms_agree_across_seeds() {
    let dir = tempfile::tempdir().unwrap();
    for seed in ["11", "12"] {
        let (code, _, err) = run(
            dir.path(),
            &["figure", "--id", "wage", "--seed", seed, "--out-dir", seed],
        );
        assert_eq!(code, 0, "{err}");
    }
    let (n1, cdf1) = histogram_cdf(&read(dir.path(), "11/wage-stationary.csv"));
    let (n2, cdf2) = histogram_cdf(&read(dir.path(), "12/wage-stationary.csv"));
    let beta_hat = 2.0
        * cdf1
            .iter()
            .zip(cdf2.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
    // The histogram samples are successive post-event states, not iid: the
    // chain renews at each destruction, once per ~6 events on average, so
    // the effective sample size is about n / 12.
    let band = 4.0 * dkw_band(n1.min(n2) / 12, 0.999);
    assert!(
        beta_hat <= band,
        "two-seed histogram distance {beta_hat:.4} exceeds {band:.4}"
    );
}

fn histogram_cdf(text: &str) -> (usize, Vec<f64>) {
    let counts: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap())
        .collect();
    let total: f64 = counts.iter().sum();
    let mut acc = 0.0;
    let cdf = counts
        .iter()
        .map(|c| {
            acc += c / total;
            acc
        })
        .collect();
    (total as usize, cdf)
}

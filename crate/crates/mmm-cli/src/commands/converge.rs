//! Distance-to-stationarity curve: CSV plus a terminal summary with the
//! fitted decay and, where the model certifies one, the analytic decay.

use std::path::PathBuf;

use monotone_markov::diagnostics::convergence_curve;
use monotone_markov::prob::EmpiricalDistribution;
use monotone_markov::RandomnessStream;

use crate::csvio;
use crate::model::Model;
use crate::CliError;

pub struct ConvergeOpts {
    pub seed: u64,
    pub from: Option<String>,
    pub checkpoints: Option<String>,
    pub n_paths: usize,
    pub out: Option<PathBuf>,
}

/// Replications behind a `--from stationary` starting sample.
const STATIONARY_START_DRAWS: usize = 10_000;

pub fn run(model: &Model, opts: &ConvergeOpts) -> Result<(), CliError> {
    if matches!(model, Model::Flip) {
        return Err(CliError::Config(
            "preset 'flip' is a counterexample used by `check` only".into(),
        ));
    }
    if opts.n_paths == 0 {
        return Err(CliError::Config("--n-paths must be positive".into()));
    }
    let stream = RandomnessStream::new(opts.seed, 0);
    let sampler = model.sampler().map_err(CliError::config)?;
    let target = model
        .stationary_target(&stream.substream(1))
        .map_err(CliError::run)?;

    let (start, start_label) = match opts.from.as_deref() {
        None => {
            let x = model.default_start();
            (
                EmpiricalDistribution::point_mass(x).map_err(CliError::config)?,
                format!("{x}"),
            )
        }
        Some("stationary") => (
            model
                .stationary_start(STATIONARY_START_DRAWS, &stream.substream(2))
                .map_err(CliError::run)?,
            "stationary".to_string(),
        ),
        Some(raw) => {
            let x: f64 = raw.parse().map_err(|_| {
                CliError::Config(format!(
                    "--from takes a number or 'stationary', got '{raw}'"
                ))
            })?;
            (
                EmpiricalDistribution::point_mass(x).map_err(CliError::config)?,
                format!("{x}"),
            )
        }
    };

    let checkpoints = parse_checkpoints(model, opts)?;
    let report = convergence_curve(
        &sampler,
        &start,
        &checkpoints,
        &target,
        opts.n_paths,
        &stream.substream(3),
    )
    .map_err(CliError::run)?;

    // Bound column: the certified curve where the model has one, the
    // fitted curve otherwise, empty when neither exists.
    let certified = match model {
        Model::Wage(cfg) => cfg.mmc_constants().ok().map(|c| (c.coefficient, c.rate)),
        _ => None,
    };
    let curve = certified.or(report.fit.map(|f| (f.coefficient, f.rate)));
    let out = opts
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}-convergence.csv", model.name())));
    let rows = report.checkpoints.iter().map(|p| {
        let bound = curve
            .map(|(c, a)| format!("{}", c * (-a * p.t).exp()))
            .unwrap_or_default();
        (p.t, p.beta_hat, bound)
    });
    csvio::write_triples(&out, "t,beta_hat,bound", rows)?;

    println!(
        "convergence of {} from {start_label} ({} paths per checkpoint)",
        model.name(),
        opts.n_paths
    );
    for p in &report.checkpoints {
        println!("  t = {:<10} beta = {:.4}", p.t, p.beta_hat);
    }
    match report.fit {
        Some(f) => println!(
            "fitted decay:    C = {:.4}, alpha = {:.4}",
            f.coefficient, f.rate
        ),
        None => println!("no geometric fit (fewer than two checkpoints above the noise floor)"),
    }
    if let Some((c, a)) = certified {
        println!("certified decay: C = {c:.4}, alpha = {a:.4}");
    }
    println!(
        "noise floor {:.4} (4x the 99.9% DKW band at {} paths)",
        report.noise_floor, opts.n_paths
    );
    if report.already_converged {
        println!("start is indistinguishable from the target: curve sits at the noise floor");
    }
    println!(
        "wrote {} checkpoint rows to {}",
        report.checkpoints.len(),
        out.display()
    );
    Ok(())
}

fn parse_checkpoints(model: &Model, opts: &ConvergeOpts) -> Result<Vec<f64>, CliError> {
    let times = match &opts.checkpoints {
        None => model.default_checkpoints(),
        Some(raw) => raw
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Config(format!("bad checkpoint '{}'", s.trim())))
            })
            .collect::<Result<Vec<f64>, CliError>>()?,
    };
    if times.is_empty() {
        return Err(CliError::Config("no checkpoints given".into()));
    }
    for t in &times {
        if !(t.is_finite() && *t >= 0.0) {
            return Err(CliError::Config(format!("bad checkpoint {t}")));
        }
        if model.discrete() && (t - t.round()).abs() > 1e-9 {
            return Err(CliError::Config(format!(
                "model '{}' runs in discrete time: checkpoint {t} is not a whole number of steps",
                model.name()
            )));
        }
    }
    Ok(times)
}

//! One path per invocation: a dense-grid CSV plus a jump-skeleton CSV.
//! Models without jumps still get the skeleton file, header-only, so
//! downstream scripts can treat every model uniformly.

use std::path::{Path, PathBuf};

use monotone_markov::RandomnessStream;

use crate::csvio;
use crate::model::Model;
use crate::CliError;

pub struct SimulateOpts {
    pub seed: u64,
    pub horizon: Option<f64>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
}

const GRID_POINTS: usize = 2001;

type Series = Vec<(f64, f64)>;

pub fn run(model: &Model, opts: &SimulateOpts) -> Result<(), CliError> {
    if matches!(model, Model::Flip) {
        return Err(CliError::Config(
            "preset 'flip' is a counterexample used by `check` only".into(),
        ));
    }
    let grid_path = opts
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}-path.csv", model.name())));
    let jumps_path = with_suffix(&grid_path, "-jumps");
    let x0 = model.default_start();

    let (grid, jumps): (Series, Series) = match model {
        Model::Ou(cfg) => {
            let horizon = require_horizon(model, opts)?;
            let rows = if horizon == 0.0 {
                vec![(0.0, x0)]
            } else {
                let dt = horizon / (GRID_POINTS - 1) as f64;
                let kernel = cfg.exact_kernel(dt).map_err(CliError::config)?;
                let mut rng = RandomnessStream::new(opts.seed, 0);
                let mut x = x0;
                let mut rows = Vec::with_capacity(GRID_POINTS);
                rows.push((0.0, x));
                for i in 1..GRID_POINTS {
                    x = kernel.step(x, &mut rng);
                    rows.push((dt * i as f64, x));
                }
                rows
            };
            (rows, Vec::new())
        }
        Model::Belief(cfg) => {
            let steps = require_steps(model, opts)?;
            let mut rng = RandomnessStream::new(opts.seed, 0);
            let states = cfg
                .kernel()
                .iterate(x0, steps, &mut rng)
                .map_err(CliError::run)?;
            let rows = states
                .iter()
                .enumerate()
                .map(|(i, x)| (i as f64, *x))
                .collect();
            (rows, Vec::new())
        }
        _ => {
            let horizon = require_horizon(model, opts)?;
            let spec = model
                .pdmp_spec()
                .expect("continuous models carry a jump form")
                .map_err(CliError::config)?;
            let mut rng = RandomnessStream::new(opts.seed, 0);
            let path = spec
                .simulate_path(x0, horizon, &mut rng)
                .map_err(CliError::run)?;
            let points = if horizon == 0.0 { 1 } else { GRID_POINTS };
            let grid = path.sample_grid(points).map_err(CliError::run)?;
            // The skeleton already starts with the (0, x0) row.
            let jumps = path
                .times()
                .iter()
                .copied()
                .zip(path.states().iter().copied())
                .collect();
            (grid, jumps)
        }
    };

    let n_grid = csvio::write_series(&grid_path, "t,x", grid)?;
    let n_jumps = csvio::write_series(&jumps_path, "t,x", jumps)?;
    println!(
        "wrote {n_grid} grid rows to {} and {n_jumps} jump rows to {}",
        grid_path.display(),
        jumps_path.display()
    );
    Ok(())
}

fn require_horizon(model: &Model, opts: &SimulateOpts) -> Result<f64, CliError> {
    if opts.steps.is_some() {
        return Err(CliError::Config(format!(
            "model '{}' runs in continuous time: use --horizon, not --steps",
            model.name()
        )));
    }
    let horizon = opts
        .horizon
        .ok_or_else(|| CliError::Config(format!("model '{}' needs --horizon", model.name())))?;
    if !(horizon.is_finite() && horizon >= 0.0) {
        return Err(CliError::Config(format!("bad horizon {horizon}")));
    }
    Ok(horizon)
}

fn require_steps(model: &Model, opts: &SimulateOpts) -> Result<usize, CliError> {
    if opts.horizon.is_some() {
        return Err(CliError::Config(format!(
            "model '{}' runs in discrete time: use --steps, not --horizon",
            model.name()
        )));
    }
    opts.steps
        .ok_or_else(|| CliError::Config(format!("model '{}' needs --steps", model.name())))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    let ext = path
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}{ext}"))
}

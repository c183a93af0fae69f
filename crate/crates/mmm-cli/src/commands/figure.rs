//! Data behind the summary figures: a representative sample path plus the
//! long-run histogram for each figure id. Plain CSV so any plotting tool
//! can pick the files up.

use std::path::PathBuf;

use monotone_markov::models::logodds_to_prob;
use monotone_markov::RandomnessStream;

use crate::csvio::{self, Histogram};
use crate::model::{self, Model};
use crate::CliError;

pub struct FigureOpts {
    pub id: String,
    pub seed: u64,
    pub out_dir: PathBuf,
}

/// Rows kept in the path CSV; the histogram always uses the full run.
const PATH_ROWS: usize = 2_000;
const BURN_IN: usize = 10_000;

pub fn run(opts: &FigureOpts) -> Result<(), CliError> {
    let model = match opts.id.as_str() {
        "wage" | "belief" | "income-jump" | "income-drift" => {
            Model::from_name(&opts.id).map_err(CliError::config)?
        }
        other => {
            return Err(CliError::config(format!(
                "unknown figure id '{other}' (figures: wage, belief, income-jump, income-drift)"
            )))
        }
    };
    std::fs::create_dir_all(&opts.out_dir)?;
    let path_file = opts.out_dir.join(format!("{}-path.csv", opts.id));
    let hist_file = opts.out_dir.join(format!("{}-stationary.csv", opts.id));
    let mut rng = RandomnessStream::new(opts.seed, 0);

    let (rows, hist) = match &model {
        Model::Wage(cfg) => {
            // Event rate 0.6 per unit time, so this horizon gives ~200k
            // events behind the histogram.
            let spec = cfg.jump_spec().map_err(CliError::config)?;
            let path = spec
                .simulate_path(0.0, 333_333.0, &mut rng)
                .map_err(CliError::run)?;
            let rows: Vec<(f64, f64)> = path
                .times()
                .iter()
                .copied()
                .zip(path.states().iter().copied())
                .take(PATH_ROWS)
                .collect();
            let hist = Histogram::build(&path.states()[BURN_IN..], 0.0, cfg.w_bar(), 100);
            (rows, hist)
        }
        Model::Belief(cfg) => {
            let states = cfg
                .kernel()
                .iterate(0.0, 200_000, &mut rng)
                .map_err(CliError::run)?;
            let probs: Vec<f64> = states.iter().map(|&x| logodds_to_prob(x)).collect();
            let rows: Vec<(f64, f64)> = probs
                .iter()
                .take(PATH_ROWS)
                .enumerate()
                .map(|(n, &p)| (n as f64, p))
                .collect();
            let hist = Histogram::build(&probs[BURN_IN..], 0.0, 1.0, 100);
            (rows, hist)
        }
        Model::IncomeJump(cfg) => {
            // Event rate 1.1 per unit time. The histogram is on the income
            // scale e^x, where the tail lives; the path stays in log income.
            let spec = cfg.jump_spec().map_err(CliError::config)?;
            let path = spec
                .simulate_path(model::jump_reset(cfg), 200_000.0, &mut rng)
                .map_err(CliError::run)?;
            let rows: Vec<(f64, f64)> = path
                .times()
                .iter()
                .copied()
                .zip(path.states().iter().copied())
                .take(PATH_ROWS)
                .collect();
            let incomes: Vec<f64> = path.states()[BURN_IN..].iter().map(|x| x.exp()).collect();
            let hist = Histogram::build(&incomes, 1.0, 20.0, 190);
            (rows, hist)
        }
        Model::IncomeDrift(cfg) => {
            // Pure reset: every post-jump state is the reset point, so the
            // sawtooth is exactly the pre/post pair at each event time and
            // the pre-jump states are already independent stationary draws.
            let spec = cfg.spec().map_err(CliError::config)?;
            let x0 = model::drift_reset(cfg);
            let path = spec
                .simulate_path(x0, 200_000.0, &mut rng)
                .map_err(CliError::run)?;
            let pre = path.pre_jump_states();
            let mut rows = vec![(0.0, x0)];
            for (t, p) in path.times()[1..].iter().zip(pre.iter()) {
                rows.push((*t, *p));
                rows.push((*t, x0));
                if rows.len() >= PATH_ROWS {
                    break;
                }
            }
            let incomes: Vec<f64> = pre.iter().map(|x| x.exp()).collect();
            let hist = Histogram::build(&incomes, 1.0, 15.0, 140);
            (rows, hist)
        }
        Model::Ou(_) | Model::Flip => unreachable!("filtered by the id match"),
    };

    let n_rows = csvio::write_series(&path_file, "t,x", rows)?;
    hist.write(&hist_file)?;
    println!(
        "wrote {n_rows} path rows to {} and a {}-bin histogram of {} samples to {}",
        path_file.display(),
        hist.counts.len(),
        hist.total_samples,
        hist_file.display()
    );
    Ok(())
}

//! Hill report for the stationary income tail of the heavy-tailed models.

use monotone_markov::diagnostics::hill_tail_exponent;
use monotone_markov::{Error, RandomnessStream};

use crate::model::{self, Model};
use crate::CliError;

pub struct TailOpts {
    pub seed: u64,
    pub n_events: usize,
}

pub fn run(model: &Model, opts: &TailOpts) -> Result<(), CliError> {
    let mut rng = RandomnessStream::new(opts.seed, 0);
    let incomes: Vec<f64> = match model {
        Model::IncomeJump(cfg) => {
            let kernel = cfg.embedded_kernel().map_err(CliError::config)?;
            let states = kernel
                .iterate(model::jump_reset(cfg), opts.n_events, &mut rng)
                .map_err(CliError::run)?;
            states[1..].iter().map(|x| x.exp()).collect()
        }
        Model::IncomeDrift(cfg) => {
            let spec = cfg.spec().map_err(CliError::config)?;
            // Horizon sized so the jump count comes out near n_events.
            let horizon = opts.n_events as f64 / cfg.lambda();
            let path = spec
                .simulate_path(model::drift_reset(cfg), horizon, &mut rng)
                .map_err(CliError::run)?;
            path.pre_jump_states().iter().map(|x| x.exp()).collect()
        }
        _ => {
            return Err(CliError::Config(format!(
                "tail analysis needs income-jump or income-drift, not '{}'",
                model.name()
            )))
        }
    };

    let est = hill_tail_exponent(&incomes, None, &mut rng).map_err(|e| match e {
        Error::InsufficientTailData(msg) => CliError::Tail(msg),
        other => CliError::run(other),
    })?;

    println!(
        "income tail of {} over {} events (seed {})",
        model.name(),
        opts.n_events,
        opts.seed
    );
    println!(
        "  alpha_hat = {:.4}   95% CI [{:.4}, {:.4}]   k = {} of {} samples",
        est.exponent, est.ci.0, est.ci.1, est.k, est.n
    );
    if let Some(alpha) = model.theoretical_tail() {
        println!("  theoretical alpha = {alpha:.4}");
    }
    Ok(())
}

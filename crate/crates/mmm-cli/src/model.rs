//! Preset registry and the per-model plumbing shared by the subcommands.

use monotone_markov::diagnostics::{ConvergenceTarget, ModelSampler};
use monotone_markov::models::{
    BeliefShockConfig, DriftIncomeConfig, Law, OuConfig, PureJumpIncomeConfig, WageLadderConfig,
};
use monotone_markov::pdmp::PdmpSpec;
use monotone_markov::prob::EmpiricalDistribution;
use monotone_markov::{Error, MarkovKernel, RandomnessStream, Result};

pub const PRESETS: &[&str] = &[
    "wage",
    "belief",
    "income-jump",
    "income-drift",
    "ou",
    "flip",
];

/// Events in the long run backing empirical stationary surrogates.
const SURROGATE_EVENTS: usize = 200_000;
const SURROGATE_BURN_IN: usize = 10_000;

pub enum Model {
    Wage(WageLadderConfig),
    Belief(BeliefShockConfig),
    IncomeJump(PureJumpIncomeConfig),
    IncomeDrift(DriftIncomeConfig),
    Ou(OuConfig),
    /// A kernel that claims to be increasing but reverses order; exists so
    /// `check` has a counterexample that must fail.
    Flip,
}

/// The income presets come from the closed-form constructors, which pin a
/// degenerate reset landing point; config files go through the same
/// constructors, so unwrapping is safe everywhere the CLI holds one.
pub fn jump_reset(cfg: &PureJumpIncomeConfig) -> f64 {
    cfg.reset_point()
        .expect("the pareto form pins the reset point")
}

pub fn drift_reset(cfg: &DriftIncomeConfig) -> f64 {
    cfg.reset_point()
        .expect("the pure-reset form pins the reset point")
}

fn flip_kernel() -> MarkovKernel {
    MarkovKernel::new("flip", true, |x, rng: &mut RandomnessStream| {
        -0.9 * x + 0.2 * (rng.uniform() - 0.5)
    })
}

impl Model {
    pub fn from_name(name: &str) -> std::result::Result<Model, String> {
        match name {
            "wage" => Ok(Model::Wage(WageLadderConfig::standard())),
            "belief" => Ok(Model::Belief(BeliefShockConfig::standard())),
            "income-jump" => Ok(Model::IncomeJump(
                PureJumpIncomeConfig::pareto(1.0, 0.1, 20.0, 0.0)
                    .expect("preset parameters are valid"),
            )),
            "income-drift" => Ok(Model::IncomeDrift(
                DriftIncomeConfig::pure_reset(0.05, 0.15, 0.0)
                    .expect("preset parameters are valid"),
            )),
            "ou" => Ok(Model::Ou(
                OuConfig::new(1.0, 1.0).expect("preset parameters are valid"),
            )),
            "flip" => Ok(Model::Flip),
            other => Err(format!(
                "unknown model '{other}' (presets: {})",
                PRESETS.join(", ")
            )),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::Wage(_) => "wage",
            Model::Belief(_) => "belief",
            Model::IncomeJump(_) => "income-jump",
            Model::IncomeDrift(_) => "income-drift",
            Model::Ou(_) => "ou",
            Model::Flip => "flip",
        }
    }

    /// Discrete-time chains take `--steps`; the others take `--horizon`.
    pub fn discrete(&self) -> bool {
        matches!(self, Model::Belief(_) | Model::Flip)
    }

    pub fn default_start(&self) -> f64 {
        match self {
            Model::Wage(_) | Model::Belief(_) | Model::Flip => 0.0,
            Model::IncomeJump(cfg) => jump_reset(cfg),
            Model::IncomeDrift(cfg) => drift_reset(cfg),
            Model::Ou(_) => 2.0,
        }
    }

    /// Starting interval used by the randomized order checks.
    pub fn start_range(&self) -> (f64, f64) {
        match self {
            Model::Wage(cfg) => (0.0, cfg.w_bar()),
            Model::Belief(_) | Model::Ou(_) => (-3.0, 3.0),
            Model::IncomeJump(cfg) => (jump_reset(cfg), jump_reset(cfg) + 2.0),
            Model::IncomeDrift(cfg) => (drift_reset(cfg), drift_reset(cfg) + 2.0),
            Model::Flip => (-1.0, 1.0),
        }
    }

    pub fn default_checkpoints(&self) -> Vec<f64> {
        match self {
            Model::Wage(_) => vec![0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0],
            Model::Belief(_) => vec![0.0, 5.0, 10.0, 25.0, 50.0, 100.0, 200.0],
            // Resets arrive at rates 0.1 and 0.15, so the income laws need
            // tens of time units to forget the start; the drift law is also
            // capped at x0 + mu t until the cap clears the stationary bulk.
            Model::IncomeJump(_) => vec![0.0, 5.0, 10.0, 20.0, 40.0, 80.0],
            Model::IncomeDrift(_) => vec![0.0, 10.0, 20.0, 40.0, 80.0],
            Model::Ou(_) => vec![0.1, 0.5, 1.0, 2.0, 4.0],
            Model::Flip => vec![],
        }
    }

    /// The natural one-step transition: the event chain for jump models, a
    /// unit time window for the flows.
    pub fn one_step_kernel(&self) -> Result<MarkovKernel> {
        match self {
            Model::Wage(cfg) => Ok(cfg.event_kernel()),
            Model::Belief(cfg) => Ok(cfg.kernel()),
            Model::IncomeJump(cfg) => cfg.embedded_kernel(),
            Model::IncomeDrift(cfg) => cfg.spec()?.time_sampler(1.0),
            Model::Ou(cfg) => cfg.exact_kernel(1.0),
            Model::Flip => Ok(flip_kernel()),
        }
    }

    /// The jump-process form behind `simulate` and `figure`, when one exists.
    pub fn pdmp_spec(&self) -> Option<Result<PdmpSpec>> {
        match self {
            Model::Wage(cfg) => Some(cfg.jump_spec()),
            Model::IncomeJump(cfg) => Some(cfg.jump_spec()),
            Model::IncomeDrift(cfg) => Some(cfg.spec()),
            Model::Belief(_) | Model::Ou(_) | Model::Flip => None,
        }
    }

    pub fn sampler(&self) -> Result<ModelSampler> {
        match self {
            Model::Wage(cfg) => {
                let cfg = cfg.clone();
                Ok(ModelSampler::from_fn("wage", move |x0, t, rng| {
                    cfg.continuous_sampler(t)?.run(x0, 1, rng)
                }))
            }
            Model::Belief(cfg) => Ok(ModelSampler::from_kernel(cfg.kernel())),
            Model::IncomeJump(cfg) => Ok(ModelSampler::from_pdmp(cfg.jump_spec()?)),
            Model::IncomeDrift(cfg) => Ok(ModelSampler::from_pdmp(cfg.spec()?)),
            Model::Ou(cfg) => Ok(cfg.sampler()),
            Model::Flip => Err(Error::InvalidConfig(
                "the flip counterexample has no sampling model".into(),
            )),
        }
    }

    /// Stationary reference for the convergence curve: closed form when the
    /// model has one, otherwise a burned-in long run of the event chain.
    pub fn stationary_target(&self, stream: &RandomnessStream) -> Result<ConvergenceTarget> {
        match self {
            Model::Wage(_) | Model::Belief(_) => {
                Ok(ConvergenceTarget::Empirical(self.long_run(stream)?))
            }
            Model::IncomeJump(cfg) => Ok(ConvergenceTarget::Analytic(cfg.stationary_cdf()?)),
            Model::IncomeDrift(cfg) => Ok(ConvergenceTarget::Analytic(cfg.stationary_cdf()?)),
            Model::Ou(cfg) => Ok(ConvergenceTarget::Analytic(cfg.stationary_cdf())),
            Model::Flip => Err(Error::InvalidConfig(
                "the flip counterexample has no stationary law".into(),
            )),
        }
    }

    /// Draws a starting distribution close to stationarity: exact samples
    /// for the closed-form models, the long-run surrogate otherwise.
    pub fn stationary_start(
        &self,
        n: usize,
        stream: &RandomnessStream,
    ) -> Result<EmpiricalDistribution> {
        let mut rng = stream.substream(0);
        match self {
            Model::Wage(_) | Model::Belief(_) => self.long_run(stream),
            Model::IncomeJump(cfg) => {
                let p = cfg.reset_probability();
                let rate = cfg.income_tail_exponent()?;
                let x0 = jump_reset(cfg);
                let tail = Law::Exponential { rate };
                let draws: Vec<f64> = (0..n)
                    .map(|_| {
                        if rng.uniform() < p {
                            x0
                        } else {
                            x0 + tail.sample(&mut rng)
                        }
                    })
                    .collect();
                EmpiricalDistribution::from_samples(&draws)
            }
            Model::IncomeDrift(cfg) => {
                let law = Law::Exponential {
                    rate: cfg.income_tail_exponent()?,
                };
                let x0 = drift_reset(cfg);
                let draws: Vec<f64> = (0..n).map(|_| x0 + law.sample(&mut rng)).collect();
                EmpiricalDistribution::from_samples(&draws)
            }
            Model::Ou(cfg) => {
                let law = Law::Gaussian {
                    mean: 0.0,
                    sd: cfg.stationary_sd(),
                };
                let draws: Vec<f64> = (0..n).map(|_| law.sample(&mut rng)).collect();
                EmpiricalDistribution::from_samples(&draws)
            }
            Model::Flip => Err(Error::InvalidConfig(
                "the flip counterexample has no stationary law".into(),
            )),
        }
    }

    pub fn theoretical_tail(&self) -> Option<f64> {
        match self {
            Model::IncomeJump(cfg) => cfg.income_tail_exponent().ok(),
            Model::IncomeDrift(cfg) => cfg.income_tail_exponent().ok(),
            _ => None,
        }
    }

    fn long_run(&self, stream: &RandomnessStream) -> Result<EmpiricalDistribution> {
        let kernel = self.one_step_kernel()?;
        let mut rng = stream.substream(9);
        let states = kernel.iterate(self.default_start(), SURROGATE_EVENTS, &mut rng)?;
        EmpiricalDistribution::from_samples(&states[SURROGATE_BURN_IN..])
    }
}

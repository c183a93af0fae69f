//! Stability diagnostics on top of the simulation layers.
//!
//! Monte Carlo tolerances throughout the crate are expressed in units of
//! the Dvoretzky-Kiefer-Wolfowitz band [`dkw_band`]: with probability at
//! least `confidence`, the empirical CDF of `n` independent draws stays
//! uniformly within the band of the truth. Distances between two empirical
//! objects therefore get compared against small multiples of it.

mod convergence;
mod ergodic;
mod mixing;
mod tail;

pub use convergence::{
    asymptotic_contractivity_curve, convergence_curve, ConvergencePoint, ConvergenceReport,
    ConvergenceTarget, GeometricFit,
};
pub use ergodic::{batch_means, running_average, ErgodicSummary};
pub use mixing::{mmc_monte_carlo, order_reversal_survival, MmcCertificate, SurvivalCurve};
pub use tail::{hill_tail_exponent, TailEstimate};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::MarkovKernel;
use crate::pdmp::PdmpSpec;
use crate::rng::RandomnessStream;

/// Two-sided DKW band: the empirical CDF of `n` iid draws deviates from
/// the truth by more than the band with probability at most
/// `1 - confidence`.
pub fn dkw_band(n: usize, confidence: f64) -> f64 {
    assert!(n > 0, "band needs at least one sample");
    assert!(
        (0.0..1.0).contains(&confidence) && confidence > 0.0,
        "confidence must be in (0,1)"
    );
    ((2.0 / (1.0 - confidence)).ln() / (2.0 * n as f64)).sqrt()
}

/// One-sided Hoeffding lower confidence bound for a Bernoulli mean.
pub fn hoeffding_lower(p_hat: f64, n: usize, confidence: f64) -> f64 {
    assert!(n > 0);
    assert!((0.0..1.0).contains(&confidence) && confidence > 0.0);
    p_hat - ((1.0 / (1.0 - confidence)).ln() / (2.0 * n as f64)).sqrt()
}

type SampleFn = Arc<dyn Fn(f64, f64, &mut RandomnessStream) -> Result<f64> + Send + Sync>;

/// Anything that can sample `X_t` given `X_0 = x0`: a PDMP, a discrete
/// chain (integer times), or a closed-form transition law.
#[derive(Clone)]
pub struct ModelSampler {
    name: String,
    sample: SampleFn,
}

impl std::fmt::Debug for ModelSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ModelSampler({})", self.name)
    }
}

impl ModelSampler {
    pub fn from_fn(
        name: impl Into<String>,
        sample: impl Fn(f64, f64, &mut RandomnessStream) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        ModelSampler {
            name: name.into(),
            sample: Arc::new(sample),
        }
    }

    /// Discrete-time chain; checkpoint times must be whole numbers of
    /// steps.
    pub fn from_kernel(kernel: MarkovKernel) -> Self {
        let name = kernel.name().to_string();
        ModelSampler::from_fn(name, move |x0, t, rng| {
            let steps = t.round();
            if !t.is_finite() || t < 0.0 || (t - steps).abs() > 1e-9 {
                return Err(Error::InvalidInput(format!(
                    "discrete chain sampled at non-integer time {t}"
                )));
            }
            kernel.run(x0, steps as usize, rng)
        })
    }

    /// Continuous-time sampling through the PDMP simulator.
    pub fn from_pdmp(spec: PdmpSpec) -> Self {
        let name = spec.name().to_string();
        ModelSampler::from_fn(name, move |x0, t, rng| {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::InvalidInput(format!("bad sample time {t}")));
            }
            spec.time_sampler(t)?.run(x0, 1, rng)
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sample_at(&self, x0: f64, t: f64, rng: &mut RandomnessStream) -> Result<f64> {
        (self.sample)(x0, t, rng)
    }
}

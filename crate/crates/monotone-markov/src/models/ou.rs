//! Ornstein-Uhlenbeck process, exactly sampled.
//!
//! `X_t = e^{-theta t} x + sigma_t Z` with
//! `sigma_t = sigma sqrt((1 - e^{-2 theta t}) / (2 theta))`, so transition
//! laws are available in closed form at every horizon. The model exists to
//! calibrate the simulation-based diagnostics against exact answers.

use rand_distr::{Distribution, StandardNormal};

use crate::diagnostics::ModelSampler;
use crate::error::{Error, Result};
use crate::kernel::MarkovKernel;
use crate::prob::AnalyticCdf;

#[derive(Clone, Copy, Debug)]
pub struct OuConfig {
    theta: f64,
    sigma: f64,
}

impl OuConfig {
    pub fn new(theta: f64, sigma: f64) -> Result<Self> {
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "mean reversion must be positive, got {theta}"
            )));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "volatility must be positive, got {sigma}"
            )));
        }
        Ok(OuConfig { theta, sigma })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Transition noise scale after elapsed time `t`; 0 at `t = 0`,
    /// increasing to the stationary scale.
    pub fn sd_at(&self, t: f64) -> f64 {
        self.sigma * ((1.0 - (-2.0 * self.theta * t).exp()) / (2.0 * self.theta)).sqrt()
    }

    pub fn stationary_sd(&self) -> f64 {
        self.sigma / (2.0 * self.theta).sqrt()
    }

    /// Kernel drawing `X_t` given `X_0 = x` in one exact step.
    pub fn exact_kernel(&self, t: f64) -> Result<MarkovKernel> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidInput(format!("bad horizon {t}")));
        }
        let decay = (-self.theta * t).exp();
        let sd = self.sd_at(t);
        Ok(MarkovKernel::new(format!("ou@{t}"), true, move |x, rng| {
            let z: f64 = StandardNormal.sample(rng);
            decay * x + sd * z
        }))
    }

    /// Law of `X_t` given `X_0 = x0`: Gaussian, degenerate at `t = 0`.
    pub fn exact_cdf(&self, x0: f64, t: f64) -> Result<AnalyticCdf> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidInput(format!("bad horizon {t}")));
        }
        Ok(AnalyticCdf::normal(
            (-self.theta * t).exp() * x0,
            self.sd_at(t),
        ))
    }

    pub fn stationary_cdf(&self) -> AnalyticCdf {
        AnalyticCdf::normal(0.0, self.stationary_sd())
    }

    /// Continuous-time sampler for the convergence diagnostics.
    pub fn sampler(&self) -> ModelSampler {
        let cfg = *self;
        ModelSampler::from_fn("ou", move |x0, t, rng| {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::InvalidInput(format!("bad sample time {t}")));
            }
            let z: f64 = StandardNormal.sample(rng);
            Ok((-cfg.theta * t).exp() * x0 + cfg.sd_at(t) * z)
        })
    }
}

//! Log income with deterministic growth and reset jumps.
//!
//! Between jumps the state follows `dx/dt = g(x)`; at rate `lambda` it is
//! replaced by `h(x) + zeta`. Constant drift with memoryless resets is the
//! tractable benchmark: by the renewal structure the stationary state is
//! the reset point plus drift times an Exp(lambda) age, so
//! `X - x0 ~ Exp(lambda / mu)` and income `Y = e^X` has a Pareto tail of
//! exponent `lambda / mu`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::models::{Law, ResetMap};
use crate::pdmp::{flow_from_ode, PdmpSpec, Shock};
use crate::prob::AnalyticCdf;
use crate::rng::RandomnessStream;

/// Drift field for the between-jump flow.
#[derive(Clone)]
pub enum Drift {
    Constant(f64),
    /// Numerically integrated; the [`DriftIncomeConfig::spec`] constructor checks the resulting
    /// semi-flow and rejects fields whose solutions blow up on the probe
    /// window.
    Custom {
        name: String,
        g: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        ode_tol: f64,
    },
}

impl std::fmt::Debug for Drift {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Drift::Constant(mu) => write!(f, "Drift::Constant({mu})"),
            Drift::Custom { name, ode_tol, .. } => {
                write!(f, "Drift::Custom({name}, tol {ode_tol})")
            }
        }
    }
}

impl Drift {
    pub fn from_fn(
        name: impl Into<String>,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Drift::Custom {
            name: name.into(),
            g: Arc::new(g),
            ode_tol: 1e-10,
        }
    }

    pub fn constant_rate(&self) -> Option<f64> {
        match self {
            Drift::Constant(mu) => Some(*mu),
            Drift::Custom { .. } => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DriftIncomeConfig {
    drift: Drift,
    lambda: f64,
    reset: Law,
    h: ResetMap,
}

impl DriftIncomeConfig {
    pub fn new(drift: Drift, lambda: f64, reset: Law, h: ResetMap) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "jump rate must be positive, got {lambda}"
            )));
        }
        if let Drift::Constant(mu) = drift {
            if !mu.is_finite() {
                return Err(Error::InvalidConfig(format!("bad drift rate {mu}")));
            }
        }
        reset.validate()?;
        Ok(DriftIncomeConfig {
            drift,
            lambda,
            reset,
            h,
        })
    }

    /// The standard configuration: constant drift 0.05, jump rate 0.15,
    /// memoryless resets with centered Gaussian innovations of standard
    /// deviation 0.3.
    pub fn standard() -> Self {
        Self::new(
            Drift::Constant(0.05),
            0.15,
            Law::Gaussian { mean: 0.0, sd: 0.3 },
            ResetMap::constant(0.0),
        )
        .expect("standard configuration is valid")
    }

    /// Constant drift with every reset landing exactly at `x0`; the case
    /// with a closed-form stationary law.
    pub fn pure_reset(mu: f64, lambda: f64, x0: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "pure-reset form needs positive drift, got {mu}"
            )));
        }
        Self::new(
            Drift::Constant(mu),
            lambda,
            Law::Point { value: 0.0 },
            ResetMap::constant(x0),
        )
    }

    pub fn drift(&self) -> &Drift {
        &self.drift
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn reset_law(&self) -> &Law {
        &self.reset
    }

    pub fn reset_map(&self) -> &ResetMap {
        &self.h
    }

    /// Where resets land when they forget the state entirely.
    pub fn reset_point(&self) -> Option<f64> {
        match (self.h.constant_value(), self.reset.point_value()) {
            (Some(c), Some(v)) => Some(c + v),
            _ => None,
        }
    }

    /// Process form. Constant drift gets the exact flow `x + mu t`; custom
    /// drift is integrated and the resulting semi-flow is validated before
    /// being accepted.
    pub fn spec(&self) -> Result<PdmpSpec> {
        let reset = self.reset.clone();
        let reset_pair = self.reset.clone();
        let h = self.h.clone();
        let sample = move |rng: &mut RandomnessStream| Shock {
            selector: 0.0,
            mark: reset.sample(rng),
        };
        let jump = move |x: f64, shock: Shock| h.eval(x) + shock.mark;
        let spec = match &self.drift {
            Drift::Constant(mu) => {
                let mu = *mu;
                PdmpSpec::new(
                    "drift-income",
                    move |x, t| x + mu * t,
                    self.lambda,
                    sample,
                    jump,
                    true,
                    true,
                )?
            }
            Drift::Custom { name, g, ode_tol } => {
                let g = g.clone();
                let flow = flow_from_ode(move |x| g(x), *ode_tol);
                let spec = PdmpSpec::new(
                    format!("drift-income({name})"),
                    move |x, t| flow(x, t),
                    self.lambda,
                    sample,
                    jump,
                    true,
                    true,
                )?;
                // Integrated flows are only trusted after the semi-flow
                // and monotonicity spot checks pass.
                let mut probe_rng = RandomnessStream::new(0x0de_70e5, 0);
                spec.validate(&mut probe_rng, 200)?;
                spec
            }
        };
        Ok(spec.with_paired_shock(move |_shared, own_a, own_b| {
            (
                Shock {
                    selector: 0.0,
                    mark: reset_pair.sample(own_a),
                },
                Shock {
                    selector: 0.0,
                    mark: reset_pair.sample(own_b),
                },
            )
        }))
    }

    /// Closed-form stationary law for constant positive drift with point
    /// resets: `x0` plus drift times an exponential age, i.e.
    /// Exp(lambda / mu) above `x0`.
    pub fn stationary_cdf(&self) -> Result<AnalyticCdf> {
        let (mu, x0) = self.closed_form_parameters()?;
        Ok(AnalyticCdf::exponential(self.lambda / mu, x0))
    }

    /// Pareto exponent `lambda / mu` of stationary income `Y = e^X` in the
    /// pure-reset case.
    pub fn income_tail_exponent(&self) -> Result<f64> {
        let (mu, _) = self.closed_form_parameters()?;
        Ok(self.lambda / mu)
    }

    fn closed_form_parameters(&self) -> Result<(f64, f64)> {
        match (self.drift.constant_rate(), self.reset_point()) {
            (Some(mu), Some(x0)) if mu > 0.0 => Ok((mu, x0)),
            _ => Err(Error::InvalidConfig(
                "closed form needs constant positive drift and point resets".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{dkw_band, hill_tail_exponent};
    use crate::parallel::try_replicate;
    use crate::prob::kolmogorov_distance;
    use crate::prob::EmpiricalDistribution;

    #[test]
    fn config_validation() {
        assert!(DriftIncomeConfig::new(
            Drift::Constant(0.05),
            0.0,
            Law::Point { value: 0.0 },
            ResetMap::constant(0.0)
        )
        .is_err());
        assert!(DriftIncomeConfig::pure_reset(0.0, 0.15, 0.0).is_err());
        assert!(DriftIncomeConfig::pure_reset(-0.05, 0.15, 0.0).is_err());
        let cfg = DriftIncomeConfig::standard();
        // Gaussian resets have no closed form here.
        assert!(cfg.stationary_cdf().is_err());
        assert!((cfg.lambda() - 0.15).abs() < 1e-15);
    }

    #[test]
    fn standard_spec_is_valid_and_monotone() {
        let spec = DriftIncomeConfig::standard().spec().unwrap();
        assert!(spec.is_monotone());
        let mut rng = RandomnessStream::new(12, 0);
        spec.validate(&mut rng, 200).unwrap();
    }

    #[test]
    fn integrated_constant_drift_matches_the_exact_flow() {
        let exact = DriftIncomeConfig::standard().spec().unwrap();
        let via_ode = DriftIncomeConfig::new(
            Drift::from_fn("const", |_| 0.05),
            0.15,
            Law::Gaussian { mean: 0.0, sd: 0.3 },
            ResetMap::constant(0.0),
        )
        .unwrap()
        .spec()
        .unwrap();
        for (x, t) in [(0.0, 1.0), (-2.0, 7.5), (3.0, 20.0)] {
            let a = exact.flow(x, t);
            let b = via_ode.flow(x, t);
            assert!((a - b).abs() < 1e-8, "flow({x},{t}): {a} vs {b}");
        }
    }

    #[test]
    fn exploding_drift_is_rejected() {
        let cfg = DriftIncomeConfig::new(
            Drift::from_fn("quadratic", |x| x * x),
            0.15,
            Law::Point { value: 0.0 },
            ResetMap::constant(0.0),
        )
        .unwrap();
        assert!(matches!(cfg.spec(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn pre_jump_states_follow_the_renewal_law() {
        // Pre-jump states are x0 + mu E_n with E_n the iid waiting times,
        // i.e. exactly Exp(lambda / mu) above x0. No burn-in argument is
        // needed; the law is exact from the first jump.
        let cfg = DriftIncomeConfig::pure_reset(0.05, 0.15, 0.0).unwrap();
        let spec = cfg.spec().unwrap();
        let mut rng = RandomnessStream::new(314, 0);
        let path = spec.simulate_path(0.0, 40_000.0, &mut rng).unwrap();
        let pre = path.pre_jump_states();
        assert!(pre.len() > 4000, "only {} jumps", pre.len());
        let emp = EmpiricalDistribution::from_samples(&pre).unwrap();
        let d = kolmogorov_distance(&emp, &cfg.stationary_cdf().unwrap());
        assert!(d <= 2.0 * dkw_band(pre.len(), 0.999), "distance {d}");
    }

    #[test]
    fn stationary_income_tail_is_pareto_three() {
        let cfg = DriftIncomeConfig::pure_reset(0.05, 0.15, 0.0).unwrap();
        assert!((cfg.income_tail_exponent().unwrap() - 3.0).abs() < 1e-15);
        let spec = cfg.spec().unwrap();
        let stream = RandomnessStream::new(606, 0);
        // Sample the stationary law by running far past burn-in: the
        // chance of seeing no reset in 60 time units is e^{-9}.
        let sampler = spec.time_sampler(60.0).unwrap();
        let n = 8000;
        let states = try_replicate(n, |i| {
            let mut rng = stream.substream(i as u64);
            sampler.run(0.0, 1, &mut rng)
        })
        .unwrap();
        let emp = EmpiricalDistribution::from_samples(&states).unwrap();
        let d = kolmogorov_distance(&emp, &cfg.stationary_cdf().unwrap());
        assert!(d <= 2.0 * dkw_band(n, 0.999), "distance {d}");
        // Incomes Y = e^X are exactly Pareto(3), so Hill with a generous
        // cutoff recovers the exponent without bias.
        let incomes: Vec<f64> = states.iter().map(|x| x.exp()).collect();
        let mut hill_rng = RandomnessStream::new(607, 0);
        let est = hill_tail_exponent(&incomes, Some(800), &mut hill_rng).unwrap();
        assert!(
            (est.exponent - 3.0).abs() < 0.3,
            "Hill estimate {} for exponent 3",
            est.exponent
        );
    }

    #[test]
    fn zero_drift_reduces_to_the_pure_jump_reset_chain() {
        // With g = 0 the flow is frozen, so post-jump states are iid
        // draws of h(x_prev) + zeta = zeta; the embedded chain is the
        // reset chain itself.
        let cfg = DriftIncomeConfig::new(
            Drift::Constant(0.0),
            0.5,
            Law::Gaussian { mean: 0.0, sd: 1.0 },
            ResetMap::constant(0.0),
        )
        .unwrap();
        let spec = cfg.spec().unwrap();
        let kernel = spec.embedded_kernel();
        let mut rng = RandomnessStream::new(9, 9);
        let states = &kernel.iterate(5.0, 4000, &mut rng).unwrap()[1..];
        let emp = EmpiricalDistribution::from_samples(states).unwrap();
        let d = kolmogorov_distance(&emp, &AnalyticCdf::normal(0.0, 1.0));
        assert!(d <= 2.0 * dkw_band(states.len(), 0.999), "distance {d}");
    }
}

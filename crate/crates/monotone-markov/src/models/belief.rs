//! Log-odds belief dynamics with occasional resets.
//!
//! An observer tracks a binary hypothesis through Gaussian signals with
//! means `mu_high` (true) and `mu_low` (false) and common scale `sigma`,
//! with the high state in force. Working in log-odds, each signal adds the
//! log likelihood ratio `xi = (mu_high - mu_low)(Z - mu_mid) / sigma^2`,
//! which has positive mean `(mu_high - mu_low)^2 / (2 sigma^2)`. With
//! probability `rho` the belief is instead re-anchored by a draw from the
//! reset kernel. Resets keep the chain from drifting off to certainty.

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::kernel::MarkovKernel;
use crate::models::Law;
use crate::rng::RandomnessStream;

/// Belief in probability space from log-odds.
pub fn logodds_to_prob(eta: f64) -> f64 {
    1.0 / (1.0 + (-eta).exp())
}

/// Log-odds from a probability in (0, 1).
pub fn prob_to_logodds(pi: f64) -> Result<f64> {
    if !(pi > 0.0 && pi < 1.0) {
        return Err(Error::InvalidInput(format!(
            "probability {pi} outside (0, 1)"
        )));
    }
    Ok((pi / (1.0 - pi)).ln())
}

#[derive(Clone, Debug)]
pub struct BeliefShockConfig {
    mu_high: f64,
    mu_low: f64,
    sigma: f64,
    reset_prob: f64,
    reset_kernel: MarkovKernel,
}

impl BeliefShockConfig {
    /// General form: any reset kernel on log-odds space. The update is
    /// monotone exactly when the reset kernel is.
    pub fn new(
        mu_high: f64,
        mu_low: f64,
        sigma: f64,
        reset_prob: f64,
        reset_kernel: MarkovKernel,
    ) -> Result<Self> {
        if !(mu_high.is_finite() && mu_low.is_finite() && mu_high > mu_low) {
            return Err(Error::InvalidConfig(format!(
                "signal means must satisfy mu_high > mu_low, got {mu_high} and {mu_low}"
            )));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "signal scale must be positive, got {sigma}"
            )));
        }
        if !(0.0..=1.0).contains(&reset_prob) {
            return Err(Error::InvalidConfig(format!(
                "reset probability {reset_prob} outside [0, 1]"
            )));
        }
        Ok(BeliefShockConfig {
            mu_high,
            mu_low,
            sigma,
            reset_prob,
            reset_kernel,
        })
    }

    /// Resets drawn iid from the given law, ignoring the current belief.
    pub fn with_iid_resets(
        mu_high: f64,
        mu_low: f64,
        sigma: f64,
        reset_prob: f64,
        reset_law: Law,
    ) -> Result<Self> {
        reset_law.validate()?;
        Self::new(
            mu_high,
            mu_low,
            sigma,
            reset_prob,
            reset_law.iid_kernel("belief-reset"),
        )
    }

    /// The standard configuration: means 0.3 and 0, unit signal scale,
    /// reset probability 0.04, resets iid normal with standard deviation
    /// 0.5 in log-odds space.
    pub fn standard() -> Self {
        Self::with_iid_resets(0.3, 0.0, 1.0, 0.04, Law::Gaussian { mean: 0.0, sd: 0.5 })
            .expect("standard configuration is valid")
    }

    pub fn mu_high(&self) -> f64 {
        self.mu_high
    }

    pub fn mu_low(&self) -> f64 {
        self.mu_low
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn reset_prob(&self) -> f64 {
        self.reset_prob
    }

    /// Mean log-likelihood-ratio increment under the high state,
    /// `(mu_high - mu_low)^2 / (2 sigma^2)`.
    pub fn drift(&self) -> f64 {
        let gap = self.mu_high - self.mu_low;
        gap * gap / (2.0 * self.sigma * self.sigma)
    }

    /// One belief update: reset with probability `reset_prob`, otherwise
    /// add the log likelihood ratio of a fresh signal.
    pub fn kernel(&self) -> MarkovKernel {
        let rho = self.reset_prob;
        let gap = self.mu_high - self.mu_low;
        let mu_mid = 0.5 * (self.mu_high + self.mu_low);
        let (mu_high, sig) = (self.mu_high, self.sigma);
        let reset = self.reset_kernel.clone();
        let reset_pair = self.reset_kernel.clone();
        let llr = move |rng: &mut RandomnessStream| {
            let z: f64 = StandardNormal.sample(rng);
            let signal = mu_high + sig * z;
            gap * (signal - mu_mid) / (sig * sig)
        };
        let llr_pair = llr;
        MarkovKernel::new(
            "belief",
            self.reset_kernel.monotone_by_construction(),
            move |eta, rng| {
                if rng.uniform() < rho {
                    reset.step(eta, rng)
                } else {
                    eta + llr(rng)
                }
            },
        )
        .with_paired_step(move |x, y, shared, own_a, own_b| {
            if shared.uniform() < rho {
                (reset_pair.step(x, own_a), reset_pair.step(y, own_b))
            } else {
                (x + llr_pair(own_a), y + llr_pair(own_b))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::dkw_band;
    use crate::kernel::monotone_coupling_violation;
    use crate::prob::{kolmogorov_distance, tightness_profile};
    use crate::prob::{AnalyticCdf, EmpiricalDistribution};

    #[test]
    fn logodds_transform_round_trips() {
        assert_eq!(logodds_to_prob(0.0), 0.5);
        assert!((logodds_to_prob(3.0f64.ln()) - 0.75).abs() < 1e-15);
        assert!((prob_to_logodds(0.75).unwrap() - 3.0f64.ln()).abs() < 1e-15);
        let mut rng = RandomnessStream::new(1, 0);
        for _ in 0..100 {
            let eta = 20.0 * rng.uniform() - 10.0;
            let back = prob_to_logodds(logodds_to_prob(eta)).unwrap();
            assert!((back - eta).abs() < 1e-9, "{eta} round-tripped to {back}");
        }
        assert!(prob_to_logodds(0.0).is_err());
        assert!(prob_to_logodds(1.0).is_err());
        assert!(prob_to_logodds(-0.2).is_err());
    }

    #[test]
    fn standard_drift_value() {
        let cfg = BeliefShockConfig::standard();
        assert!((cfg.drift() - 0.045).abs() < 1e-15);
    }

    #[test]
    fn no_resets_gives_a_positive_drift_walk() {
        let cfg = BeliefShockConfig::with_iid_resets(0.3, 0.0, 1.0, 0.0, Law::Point { value: 0.0 })
            .unwrap();
        let kernel = cfg.kernel();
        let mut rng = RandomnessStream::new(17, 0);
        let n = 20_000;
        let path = kernel.iterate(0.0, n, &mut rng).unwrap();
        let mean_step = path[n] / n as f64;
        // Increment sd is 0.3, so four standard errors is about 0.0085.
        assert!(
            (mean_step - 0.045).abs() < 4.0 * 0.3 / (n as f64).sqrt(),
            "mean increment {mean_step}"
        );
    }

    #[test]
    fn always_resetting_reproduces_the_reset_law() {
        let cfg = BeliefShockConfig::with_iid_resets(
            0.3,
            0.0,
            1.0,
            1.0,
            Law::Gaussian { mean: 0.0, sd: 0.5 },
        )
        .unwrap();
        let kernel = cfg.kernel();
        let mut rng = RandomnessStream::new(23, 1);
        let n = 10_000;
        let states = &kernel.iterate(5.0, n, &mut rng).unwrap()[1..];
        let emp = EmpiricalDistribution::from_samples(states).unwrap();
        let d = kolmogorov_distance(&emp, &AnalyticCdf::normal(0.0, 0.5));
        assert!(d <= 2.0 * dkw_band(n, 0.999), "distance {d}");
    }

    #[test]
    fn update_is_monotone_under_shared_noise() {
        let cfg = BeliefShockConfig::standard();
        let kernel = cfg.kernel();
        assert!(kernel.monotone_by_construction());
        let stream = RandomnessStream::new(3, 7);
        for starts in [(-4.0, -1.0), (-1.0, 0.0), (0.0, 2.5)] {
            let violation = monotone_coupling_violation(&kernel, starts, 40, 50, &stream).unwrap();
            assert!(violation.is_none(), "order broke at {violation:?}");
        }
    }

    #[test]
    fn state_dependent_monotone_resets_are_accepted() {
        // Resets that shrink the belief toward zero: eta/2 plus noise.
        let q = MarkovKernel::new("shrink", true, |eta, rng| {
            let z: f64 = StandardNormal.sample(rng);
            0.5 * eta + 0.1 * z
        });
        let cfg = BeliefShockConfig::new(0.3, 0.0, 1.0, 0.5, q).unwrap();
        let kernel = cfg.kernel();
        let stream = RandomnessStream::new(29, 0);
        let violation = monotone_coupling_violation(&kernel, (-2.0, 2.0), 30, 50, &stream).unwrap();
        assert!(violation.is_none());
    }

    #[test]
    fn beliefs_stay_tight_despite_the_drift() {
        // Resets every ~25 steps cancel the 0.045-per-step drift; the law
        // of the chain stays inside a fixed window at all horizons.
        let cfg = BeliefShockConfig::standard();
        let kernel = cfg.kernel();
        let stream = RandomnessStream::new(99, 0);
        let n_paths = 400usize;
        let mut laws = Vec::new();
        for (j, &t) in [100usize, 200, 400].iter().enumerate() {
            let finals = crate::parallel::try_replicate(n_paths, |i| {
                let mut rng = stream.substream((j * n_paths + i) as u64);
                kernel.run(-6.0, t, &mut rng)
            })
            .unwrap();
            laws.push(EmpiricalDistribution::from_samples(&finals).unwrap());
        }
        let profile = tightness_profile(&laws, &[0.01]).unwrap();
        let (lo, hi) = profile[0].1;
        assert!(hi - lo < 15.0, "99% interval [{lo}, {hi}] keeps growing");
        assert!(lo < 0.0 && hi > 0.0);
    }

    #[test]
    fn config_validation() {
        let q = Law::Point { value: 0.0 };
        assert!(BeliefShockConfig::with_iid_resets(0.0, 0.0, 1.0, 0.5, q.clone()).is_err());
        assert!(BeliefShockConfig::with_iid_resets(0.3, 0.0, 0.0, 0.5, q.clone()).is_err());
        assert!(BeliefShockConfig::with_iid_resets(0.3, 0.0, 1.0, 1.5, q).is_err());
    }
}

//! Mixing certificates from simulation.
//!
//! Two complementary diagnostics. The first lower-bounds the probability
//! that chains started from the two ends of an order interval cross a
//! pivot within a fixed window, which certifies geometric ergodicity for
//! monotone kernels. The second tracks how long an initial ordering of a
//! coupled pair survives.

use crate::diagnostics::hoeffding_lower;
use crate::error::{Error, Result};
use crate::kernel::{order_reversal_time, CouplingMode, MarkovKernel, OrderReversal};
use crate::parallel::try_replicate;
use crate::rng::RandomnessStream;

/// Monte Carlo certificate that a monotone kernel mixes.
///
/// `up_estimate` is the observed frequency of `{X_u >= pivot}` from the
/// lower start, `down_estimate` of `{X_u <= pivot}` from the upper start.
/// `eps_lower` is the product of one-sided 99% Hoeffding lower bounds on
/// the two probabilities, so it holds jointly with confidence at least
/// 98%. A strictly positive `eps_lower` certifies a geometric mixing
/// rate; see [`MmcCertificate::contraction_factor`].
#[derive(Clone, Copy, Debug)]
pub struct MmcCertificate {
    pub up_estimate: f64,
    pub down_estimate: f64,
    pub eps_lower: f64,
    pub certified: bool,
    pub trials: usize,
    pub window: usize,
}

impl MmcCertificate {
    /// Per-window contraction factor `1 - eps_lower` implied by the
    /// certificate. Distances between distributions on the order interval
    /// shrink by at least this factor every `window` steps.
    pub fn contraction_factor(&self) -> f64 {
        1.0 - self.eps_lower
    }

    /// Certified geometric decay rate per unit window,
    /// `ln(1 / (1 - eps_lower)) / window`.
    pub fn decay_rate(&self) -> f64 {
        -(-self.eps_lower).ln_1p() / self.window as f64
    }
}

/// Estimate the minorization constant of a monotone kernel on the order
/// interval `[a, b]` by simulation.
///
/// Runs `n_trials` independent pairs of chains for `window` steps, one
/// from each endpoint, and records how often the chain from `a` ends at
/// or above `pivot` and the chain from `b` at or below it. Each event
/// having positive probability is exactly the condition under which the
/// interval collapses geometrically.
pub fn mmc_monte_carlo(
    kernel: &MarkovKernel,
    a: f64,
    b: f64,
    pivot: f64,
    window: usize,
    n_trials: usize,
    stream: &RandomnessStream,
) -> Result<MmcCertificate> {
    if !(a <= b) {
        return Err(Error::InvalidInput(format!(
            "interval endpoints out of order: a = {a}, b = {b}"
        )));
    }
    if !(a <= pivot && pivot <= b) {
        return Err(Error::InvalidInput(format!(
            "pivot {pivot} outside [{a}, {b}]"
        )));
    }
    if window == 0 || n_trials == 0 {
        return Err(Error::InvalidInput(
            "window and trial count must be positive".into(),
        ));
    }

    let outcomes = try_replicate(n_trials, |i| {
        let mut up_rng = stream.substream(2 * i as u64);
        let mut down_rng = stream.substream(2 * i as u64 + 1);
        let x_up = kernel.run(a, window, &mut up_rng)?;
        let x_down = kernel.run(b, window, &mut down_rng)?;
        Ok((x_up >= pivot, x_down <= pivot))
    })?;

    let ups = outcomes.iter().filter(|(u, _)| *u).count();
    let downs = outcomes.iter().filter(|(_, d)| *d).count();
    let up_estimate = ups as f64 / n_trials as f64;
    let down_estimate = downs as f64 / n_trials as f64;

    let up_lower = hoeffding_lower(up_estimate, n_trials, 0.99);
    let down_lower = hoeffding_lower(down_estimate, n_trials, 0.99);
    let eps_lower = (up_lower * down_lower).max(0.0);

    Ok(MmcCertificate {
        up_estimate,
        down_estimate,
        eps_lower,
        certified: eps_lower > 0.0,
        trials: n_trials,
        window,
    })
}

/// Empirical survival curve of the event "the initial ordering of a
/// coupled pair is still intact after k steps".
#[derive(Clone, Debug)]
pub struct SurvivalCurve {
    /// `survival[k]` estimates P(ordering intact after k steps);
    /// `survival[0] = 1` unless the pair starts equal.
    pub survival: Vec<f64>,
    /// Optional per-step bound `c`: overlay of `(1 - c)^k`.
    pub bound: Option<Vec<f64>>,
    pub reps: usize,
    /// Reversal times observed, capped at `max_steps` for pairs whose
    /// ordering outlived the horizon.
    pub reversal_steps: Vec<usize>,
}

impl SurvivalCurve {
    /// Binomial standard error of the survival estimate at step `k`.
    pub fn stderr(&self, k: usize) -> f64 {
        let p = self.survival[k];
        (p * (1.0 - p) / self.reps as f64).sqrt()
    }
}

/// Estimate how long the ordering `x_lo <= x_hi` survives under a
/// coupling of two copies of `kernel`.
///
/// Runs `n_reps` coupled pairs up to `max_steps` and records the first
/// step at which the ordering reverses. `bound_per_step`, if given, must
/// be a per-step reversal probability lower bound `c`; the curve then
/// carries the overlay `(1 - c)^k` for comparison.
#[allow(clippy::too_many_arguments)]
pub fn order_reversal_survival(
    kernel: &MarkovKernel,
    x_lo: f64,
    x_hi: f64,
    mode: CouplingMode,
    max_steps: usize,
    n_reps: usize,
    stream: &RandomnessStream,
    bound_per_step: Option<f64>,
) -> Result<SurvivalCurve> {
    if n_reps == 0 || max_steps == 0 {
        return Err(Error::InvalidInput(
            "need at least one rep and one step".into(),
        ));
    }
    if let Some(c) = bound_per_step {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::InvalidInput(format!(
                "per-step bound {c} outside [0, 1]"
            )));
        }
    }

    let reversal_steps = try_replicate(n_reps, |i| {
        let sub = stream.substream(i as u64);
        match order_reversal_time(kernel, x_hi, x_lo, mode, max_steps, &sub)? {
            OrderReversal::AtStep(k) => Ok(k),
            OrderReversal::Exceeded { horizon } => Ok(horizon + 1),
        }
    })?;

    let mut survival = vec![0.0; max_steps + 1];
    for k in 0..=max_steps {
        let alive = reversal_steps.iter().filter(|&&r| r > k).count();
        survival[k] = alive as f64 / n_reps as f64;
    }
    let bound = bound_per_step.map(|c| (0..=max_steps).map(|k| (1.0 - c).powi(k as i32)).collect());

    let capped = reversal_steps
        .into_iter()
        .map(|r| r.min(max_steps))
        .collect();

    Ok(SurvivalCurve {
        survival,
        bound,
        reps: n_reps,
        reversal_steps: capped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    fn ar1(slope: f64) -> MarkovKernel {
        MarkovKernel::new(
            format!("ar1-{slope}"),
            true,
            move |x, rng: &mut RandomnessStream| {
                let z: f64 = StandardNormal.sample(rng);
                slope * x + z
            },
        )
    }

    #[test]
    fn ar1_certificate_matches_gaussian_tails() {
        // One step of x' = 0.5 x + Z from a = -1 lands >= 0 with
        // probability P(Z >= 0.5) and from b = 1 lands <= 0 with the same
        // probability, about 0.3085.
        let kernel = ar1(0.5);
        let stream = RandomnessStream::new(42, 9);
        let cert = mmc_monte_carlo(&kernel, -1.0, 1.0, 0.0, 1, 40_000, &stream).unwrap();
        assert!(cert.certified);
        assert!(
            (cert.up_estimate - 0.3085).abs() < 0.01,
            "up estimate {}",
            cert.up_estimate
        );
        assert!(
            (cert.down_estimate - 0.3085).abs() < 0.01,
            "down estimate {}",
            cert.down_estimate
        );
        // The certified product sits below the true product but not by
        // much at this sample size.
        let truth = 0.3085 * 0.3085;
        assert!(cert.eps_lower > 0.5 * truth && cert.eps_lower < truth);
        assert!(cert.contraction_factor() < 1.0);
        assert!(cert.decay_rate() > 0.0);
    }

    #[test]
    fn hopeless_pivot_is_not_certified() {
        // Pivot far outside the reachable range in one step: both
        // frequencies are 0 and the Hoeffding bound clamps at 0.
        let kernel = ar1(0.5);
        let stream = RandomnessStream::new(7, 0);
        let cert = mmc_monte_carlo(&kernel, -30.0, 30.0, 30.0, 1, 500, &stream).unwrap();
        assert!(!cert.certified);
        assert_eq!(cert.eps_lower, 0.0);
    }

    #[test]
    fn certificate_input_validation() {
        let kernel = ar1(0.5);
        let stream = RandomnessStream::new(0, 0);
        assert!(mmc_monte_carlo(&kernel, 1.0, -1.0, 0.0, 1, 10, &stream).is_err());
        assert!(mmc_monte_carlo(&kernel, -1.0, 1.0, 2.0, 1, 10, &stream).is_err());
        assert!(mmc_monte_carlo(&kernel, -1.0, 1.0, 0.0, 0, 10, &stream).is_err());
    }

    #[test]
    fn shared_noise_survival_never_decays_for_monotone_kernels() {
        let kernel = ar1(0.5);
        let stream = RandomnessStream::new(3, 1);
        let curve = order_reversal_survival(
            &kernel,
            -2.0,
            2.0,
            CouplingMode::SharedNoise,
            30,
            200,
            &stream,
            None,
        )
        .unwrap();
        assert!(curve.survival.iter().all(|&s| s == 1.0));
    }

    #[test]
    fn independent_survival_tracks_a_per_step_bound() {
        // Independent copies of the slope-0 kernel reverse each step with
        // probability P(Z1 > Z2) = 1/2 regardless of state, so survival
        // is exactly (1/2)^k in expectation.
        let kernel = ar1(0.0);
        let stream = RandomnessStream::new(11, 4);
        let curve = order_reversal_survival(
            &kernel,
            -1.0,
            1.0,
            CouplingMode::Independent,
            10,
            4000,
            &stream,
            Some(0.5),
        )
        .unwrap();
        let bound = curve.bound.as_ref().unwrap();
        assert_eq!(curve.survival[0], 1.0);
        assert_eq!(bound[0], 1.0);
        for k in 1..=6 {
            let se = curve.stderr(k).max(1e-3);
            assert!(
                (curve.survival[k] - bound[k]).abs() < 4.0 * se,
                "step {k}: survival {} vs bound {}",
                curve.survival[k],
                bound[k]
            );
        }
    }

    #[test]
    fn survival_is_monotone_nonincreasing() {
        let kernel = ar1(0.3);
        let stream = RandomnessStream::new(100, 2);
        let curve = order_reversal_survival(
            &kernel,
            0.0,
            0.5,
            CouplingMode::Independent,
            20,
            500,
            &stream,
            None,
        )
        .unwrap();
        for k in 1..curve.survival.len() {
            assert!(curve.survival[k] <= curve.survival[k - 1]);
        }
        assert_eq!(curve.reversal_steps.len(), 500);
    }
}

//! Power-law tail estimation.

use crate::error::{Error, Result};
use crate::rng::RandomnessStream;

const BOOTSTRAP_RESAMPLES: usize = 200;
const MIN_EXCEEDANCES: usize = 10;

/// Hill estimate of a Pareto tail exponent.
#[derive(Clone, Copy, Debug)]
pub struct TailEstimate {
    pub exponent: f64,
    /// Order statistics used.
    pub k: usize,
    /// Positive samples available.
    pub n: usize,
    /// Bootstrap percentile interval (2.5%, 97.5%) over resampled
    /// log-excesses.
    pub ci: (f64, f64),
}

/// Hill estimator on the top `k` order statistics of the positive part of
/// `samples`. With `k = None` the default is `floor(n^(2/3))` capped at
/// `n / 10`. Requires at least [`MIN_EXCEEDANCES`] usable exceedances.
pub fn hill_tail_exponent(
    samples: &[f64],
    k: Option<usize>,
    rng: &mut RandomnessStream,
) -> Result<TailEstimate> {
    let mut xs: Vec<f64> = samples
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > 0.0)
        .collect();
    let n = xs.len();
    if n < MIN_EXCEEDANCES + 1 {
        return Err(Error::InsufficientTailData(format!("{n} positive samples")));
    }
    let k = match k {
        Some(k) => k,
        // powf can land a hair under an exact integer (1000^(2/3) comes
        // out 99.999...), so nudge before truncating.
        None => (((n as f64).powf(2.0 / 3.0) + 1e-9).floor() as usize).min(n / 10),
    };
    if k < MIN_EXCEEDANCES {
        return Err(Error::InsufficientTailData(format!(
            "k = {k}, need at least {MIN_EXCEEDANCES}"
        )));
    }
    if k > n / 10 {
        return Err(Error::InsufficientTailData(format!(
            "k = {k} exceeds a tenth of the {n} positive samples"
        )));
    }

    // Sort descending; threshold is the (k+1)-th largest value.
    xs.sort_by(|a, b| b.total_cmp(a));
    let threshold = xs[k];
    if threshold <= 0.0 {
        return Err(Error::InsufficientTailData("threshold not positive".into()));
    }
    let log_excess: Vec<f64> = xs[..k].iter().map(|x| (x / threshold).ln()).collect();
    let total: f64 = log_excess.iter().sum();
    if total <= 0.0 {
        return Err(Error::InsufficientTailData(
            "all top order statistics tie with the threshold".into(),
        ));
    }
    let exponent = k as f64 / total;

    // Percentile bootstrap over the k log-excesses.
    let mut boot: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            let mut s = 0.0;
            for _ in 0..k {
                let idx = (rng.uniform() * k as f64) as usize;
                s += log_excess[idx.min(k - 1)];
            }
            if s > 0.0 {
                k as f64 / s
            } else {
                f64::INFINITY
            }
        })
        .collect();
    boot.sort_by(f64::total_cmp);
    let pick = |q: f64| {
        boot[((q * (BOOTSTRAP_RESAMPLES - 1) as f64).round() as usize).min(BOOTSTRAP_RESAMPLES - 1)]
    };

    Ok(TailEstimate {
        exponent,
        k,
        n,
        ci: (pick(0.025), pick(0.975)),
    })
}

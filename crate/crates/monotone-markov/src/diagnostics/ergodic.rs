//! Time averages along a single trajectory.

use crate::error::{Error, Result};
use crate::prob::MonotoneObservable;

/// Running averages of `h` along the path after discarding `burn_in`
/// states; entry `k` averages the first `k + 1` kept states.
pub fn running_average(states: &[f64], h: &MonotoneObservable, burn_in: usize) -> Result<Vec<f64>> {
    if burn_in >= states.len() {
        return Err(Error::InvalidInput(format!(
            "burn-in {burn_in} swallows the whole path of length {}",
            states.len()
        )));
    }
    let kept = &states[burn_in..];
    let mut out = Vec::with_capacity(kept.len());
    let mut acc = 0.0;
    for (k, &x) in kept.iter().enumerate() {
        acc += h.eval(x);
        out.push(acc / (k + 1) as f64);
    }
    Ok(out)
}

/// Final time average with a batch-means standard error.
#[derive(Clone, Copy, Debug)]
pub struct ErgodicSummary {
    pub mean: f64,
    /// Standard error of the mean from `batches` batch means; honest for
    /// correlated draws once batches are much longer than the mixing time.
    pub stderr: f64,
    pub batches: usize,
    /// States that entered the average.
    pub count: usize,
}

/// Splits the post-burn-in path into `n_batches` equal batches (dropping
/// the remainder) and reports the overall mean together with the spread of
/// the batch means.
pub fn batch_means(
    states: &[f64],
    h: &MonotoneObservable,
    burn_in: usize,
    n_batches: usize,
) -> Result<ErgodicSummary> {
    if burn_in >= states.len() {
        return Err(Error::InvalidInput(format!(
            "burn-in {burn_in} swallows the whole path of length {}",
            states.len()
        )));
    }
    if n_batches < 2 {
        return Err(Error::InvalidInput("need at least two batches".into()));
    }
    let kept = &states[burn_in..];
    let batch_len = kept.len() / n_batches;
    if batch_len == 0 {
        return Err(Error::InvalidInput(format!(
            "{} states cannot fill {n_batches} batches",
            kept.len()
        )));
    }
    let used = batch_len * n_batches;
    let mut batch_means = Vec::with_capacity(n_batches);
    for b in 0..n_batches {
        let chunk = &kept[b * batch_len..(b + 1) * batch_len];
        batch_means.push(chunk.iter().map(|&x| h.eval(x)).sum::<f64>() / batch_len as f64);
    }
    let mean = batch_means.iter().sum::<f64>() / n_batches as f64;
    let var = batch_means
        .iter()
        .map(|m| (m - mean) * (m - mean))
        .sum::<f64>()
        / (n_batches as f64 - 1.0);
    Ok(ErgodicSummary {
        mean,
        stderr: (var / n_batches as f64).sqrt(),
        batches: n_batches,
        count: used,
    })
}

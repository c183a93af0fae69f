//! Data-parallel replication with a sequential fallback.
//!
//! All batch work in the crate funnels through [`replicate`] and
//! [`try_replicate`]. With the `parallel` feature (default) the closures run
//! on the rayon pool; without it they run in a plain loop. Work items only
//! see their own index and derive their own randomness from it, so the two
//! paths produce identical results. [`replicate_serial`] is always the plain
//! loop, which the benchmarks use as the comparison baseline.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::Result;

/// Applies `f` to each index in `0..n`, collecting results in index order.
pub fn replicate<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        replicate_serial(n, f)
    }
}

/// Fallible version of [`replicate`]; the first error wins.
pub fn try_replicate<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sequential reference implementation, independent of feature flags.
pub fn replicate_serial<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

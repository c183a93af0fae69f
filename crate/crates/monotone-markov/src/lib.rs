//! Simulation and stability diagnostics for monotone Markov models on the
//! real line.
//!
//! The crate has five layers:
//!
//! * [`prob`]: one-dimensional distributions (empirical and analytic), the
//!   Kolmogorov and Bhattacharya distances, stochastic dominance checks and
//!   tightness profiles.
//! * [`rng`] and [`kernel`]: reproducible counter-based randomness streams
//!   and Markov kernels given by step samplers, with the couplings used to
//!   study order preservation and order reversal.
//! * [`pdmp`]: piecewise deterministic Markov processes built from a flow,
//!   a constant jump rate, a shock sampler and a jump map, together with
//!   their embedded chains.
//! * [`models`]: concrete model families (wage ladder, belief shocks, two
//!   income processes, Ornstein-Uhlenbeck) wired into the kernel and PDMP
//!   machinery.
//! * [`diagnostics`]: convergence curves in the Bhattacharya metric,
//!   ergodic averages, Hill tail estimates, mixing certificates and order
//!   reversal survival curves.
//!
//! Everything is deterministic given a master seed. Batch operations run in
//! parallel through rayon when the `parallel` feature (on by default) is
//! enabled, and fall back to sequential loops otherwise; results are
//! bit-identical either way.

pub mod diagnostics;
pub mod error;
pub mod kernel;
pub mod models;
pub mod parallel;
pub mod pdmp;
pub mod prob;
pub mod rng;

pub use error::{Error, Result};
pub use kernel::{CouplingMode, MarkovKernel, OrderReversal};
pub use prob::{AnalyticCdf, Cdf, EmpiricalDistribution, MonotoneObservable};
pub use rng::RandomnessStream;

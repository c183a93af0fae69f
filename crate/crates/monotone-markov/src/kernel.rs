//! Markov kernels as step samplers, with couplings.
//!
//! A [`MarkovKernel`] wraps a sampler `(state, rng) -> state` together with
//! a declared monotonicity flag and, for event-driven kernels, an optional
//! paired sampler that advances two chains off a shared event clock while
//! their shock values stay independent. Couplings come in three modes:
//!
//! * [`CouplingMode::SharedNoise`]: both chains read an identical copy of
//!   the same stream. For kernels whose sampler is nondecreasing in the
//!   state at every fixed draw, this coupling preserves pathwise order.
//! * [`CouplingMode::Independent`]: the chains use unrelated substreams.
//! * [`CouplingMode::SharedClockIndependentShocks`]: event times (and any
//!   other shared event data the kernel designates) come from a common
//!   stream, shock values from private ones. This is the coupling under
//!   which order reversal of an initially ordered pair is tracked.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::parallel;
use crate::prob::EmpiricalDistribution;
use crate::rng::RandomnessStream;

type StepFn = dyn Fn(f64, &mut RandomnessStream) -> f64 + Send + Sync;

/// Paired sampler signature: `(x, y, shared, own_x, own_y) -> (x', y')`.
type PairedStepFn = dyn Fn(f64, f64, &mut RandomnessStream, &mut RandomnessStream, &mut RandomnessStream) -> (f64, f64)
    + Send
    + Sync;

/// How two chains driven by the same kernel share randomness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CouplingMode {
    SharedNoise,
    Independent,
    SharedClockIndependentShocks,
}

impl CouplingMode {
    fn label(&self) -> &'static str {
        match self {
            CouplingMode::SharedNoise => "SharedNoise",
            CouplingMode::Independent => "Independent",
            CouplingMode::SharedClockIndependentShocks => "SharedClockIndependentShocks",
        }
    }
}

/// A time-homogeneous Markov kernel on the real line.
#[derive(Clone)]
pub struct MarkovKernel {
    name: String,
    monotone_by_construction: bool,
    state_space: Option<(f64, f64)>,
    step: Arc<StepFn>,
    paired_step: Option<Arc<PairedStepFn>>,
}

impl std::fmt::Debug for MarkovKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MarkovKernel")
            .field("name", &self.name)
            .field("monotone_by_construction", &self.monotone_by_construction)
            .field("state_space", &self.state_space)
            .field("paired", &self.paired_step.is_some())
            .finish()
    }
}

impl MarkovKernel {
    /// Wraps a step sampler. Set `monotone_by_construction` only when the
    /// sampler is nondecreasing in the state for every fixed realization of
    /// the randomness; the shared-noise coupling checks lean on it.
    pub fn new(
        name: impl Into<String>,
        monotone_by_construction: bool,
        step: impl Fn(f64, &mut RandomnessStream) -> f64 + Send + Sync + 'static,
    ) -> Self {
        MarkovKernel {
            name: name.into(),
            monotone_by_construction,
            state_space: None,
            step: Arc::new(step),
            paired_step: None,
        }
    }

    /// Declares the state space; `iterate` then treats any excursion
    /// outside `[lo, hi]` as a model error.
    pub fn with_state_space(mut self, lo: f64, hi: f64) -> Self {
        self.state_space = Some((lo, hi));
        self
    }

    /// Attaches the paired event sampler enabling
    /// [`CouplingMode::SharedClockIndependentShocks`].
    pub fn with_paired_step(
        mut self,
        paired: impl Fn(
                f64,
                f64,
                &mut RandomnessStream,
                &mut RandomnessStream,
                &mut RandomnessStream,
            ) -> (f64, f64)
            + Send
            + Sync
            + 'static,
    ) -> Self {
        self.paired_step = Some(Arc::new(paired));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn monotone_by_construction(&self) -> bool {
        self.monotone_by_construction
    }

    pub fn supports_shared_clock(&self) -> bool {
        self.paired_step.is_some()
    }

    pub fn step(&self, x: f64, rng: &mut RandomnessStream) -> f64 {
        (self.step)(x, rng)
    }

    fn check_state(&self, x: f64, step: usize) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::NonFiniteState { step });
        }
        if let Some((lo, hi)) = self.state_space {
            if x < lo || x > hi {
                return Err(Error::StateOutOfRange {
                    step,
                    value: x,
                    lo,
                    hi,
                });
            }
        }
        Ok(())
    }

    /// Runs the chain `steps` times from `x0`, returning all states
    /// including the start (`steps + 1` values).
    pub fn iterate(&self, x0: f64, steps: usize, rng: &mut RandomnessStream) -> Result<Vec<f64>> {
        self.check_state(x0, 0)?;
        let mut path = Vec::with_capacity(steps + 1);
        path.push(x0);
        let mut x = x0;
        for k in 1..=steps {
            x = self.step(x, rng);
            self.check_state(x, k)?;
            path.push(x);
        }
        Ok(path)
    }

    /// Final state only; avoids building the path vector.
    pub fn run(&self, x0: f64, steps: usize, rng: &mut RandomnessStream) -> Result<f64> {
        self.check_state(x0, 0)?;
        let mut x = x0;
        for k in 1..=steps {
            x = self.step(x, rng);
            self.check_state(x, k)?;
        }
        Ok(x)
    }

    /// Pushes a distribution through `steps` applications of the kernel by
    /// iterating each sample point independently. Point `i` draws from
    /// `stream.substream(i)`, so the result is independent of evaluation
    /// order and identical under the sequential fallback. Weights carry
    /// over unchanged.
    pub fn push_forward(
        &self,
        dist: &EmpiricalDistribution,
        steps: usize,
        stream: &RandomnessStream,
    ) -> Result<EmpiricalDistribution> {
        let points = dist.points();
        let moved = parallel::try_replicate(points.len(), |i| {
            let mut rng = stream.substream(i as u64);
            self.run(points[i], steps, &mut rng)
        })?;
        EmpiricalDistribution::from_weighted(moved, dist.weights().to_vec())
    }
}

/// Advances two chains for `steps` steps under the requested coupling.
/// Returns the two trajectories, each of length `steps + 1`.
///
/// For `SharedClockIndependentShocks` both kernels must be the same
/// event-driven kernel (the pair sampler defines the joint move).
pub fn coupled_paths(
    kernel_a: &MarkovKernel,
    kernel_b: &MarkovKernel,
    x0a: f64,
    x0b: f64,
    mode: CouplingMode,
    steps: usize,
    stream: &RandomnessStream,
) -> Result<(Vec<f64>, Vec<f64>)> {
    kernel_a.check_state(x0a, 0)?;
    kernel_b.check_state(x0b, 0)?;
    let mut path_a = Vec::with_capacity(steps + 1);
    let mut path_b = Vec::with_capacity(steps + 1);
    path_a.push(x0a);
    path_b.push(x0b);

    match mode {
        CouplingMode::SharedNoise => {
            // Identical draw sequences: each chain consumes its own copy of
            // the same stream.
            let mut rng_a = stream.substream(0);
            let mut rng_b = rng_a.clone();
            let (mut x, mut y) = (x0a, x0b);
            for k in 1..=steps {
                x = kernel_a.step(x, &mut rng_a);
                y = kernel_b.step(y, &mut rng_b);
                kernel_a.check_state(x, k)?;
                kernel_b.check_state(y, k)?;
                path_a.push(x);
                path_b.push(y);
            }
        }
        CouplingMode::Independent => {
            let mut rng_a = stream.substream(1);
            let mut rng_b = stream.substream(2);
            let (mut x, mut y) = (x0a, x0b);
            for k in 1..=steps {
                x = kernel_a.step(x, &mut rng_a);
                y = kernel_b.step(y, &mut rng_b);
                kernel_a.check_state(x, k)?;
                kernel_b.check_state(y, k)?;
                path_a.push(x);
                path_b.push(y);
            }
        }
        CouplingMode::SharedClockIndependentShocks => {
            let paired =
                kernel_a
                    .paired_step
                    .as_ref()
                    .ok_or_else(|| Error::UnsupportedCoupling {
                        kernel: kernel_a.name.clone(),
                        mode: mode.label(),
                    })?;
            if kernel_b.name != kernel_a.name || kernel_b.paired_step.is_none() {
                return Err(Error::UnsupportedCoupling {
                    kernel: kernel_b.name.clone(),
                    mode: mode.label(),
                });
            }
            let mut shared = stream.substream(0);
            let mut own_a = stream.substream(1);
            let mut own_b = stream.substream(2);
            let (mut x, mut y) = (x0a, x0b);
            for k in 1..=steps {
                let (nx, ny) = paired(x, y, &mut shared, &mut own_a, &mut own_b);
                x = nx;
                y = ny;
                kernel_a.check_state(x, k)?;
                kernel_b.check_state(y, k)?;
                path_a.push(x);
                path_b.push(y);
            }
        }
    }
    Ok((path_a, path_b))
}

/// When an initially ordered pair first reverses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderReversal {
    /// First step `k` at which the chain started high sits at or below the
    /// chain started low. Step 0 means the starts already coincide.
    AtStep(usize),
    /// No reversal within the horizon.
    Exceeded { horizon: usize },
}

impl OrderReversal {
    pub fn reversed_by(&self, k: usize) -> bool {
        match self {
            OrderReversal::AtStep(s) => *s <= k,
            OrderReversal::Exceeded { .. } => false,
        }
    }
}

/// Runs the coupling from `x_hi >= x_lo` and reports the first step at
/// which the upper chain falls to or below the lower chain.
pub fn order_reversal_time(
    kernel: &MarkovKernel,
    x_hi: f64,
    x_lo: f64,
    mode: CouplingMode,
    horizon: usize,
    stream: &RandomnessStream,
) -> Result<OrderReversal> {
    if !(x_lo <= x_hi) {
        return Err(Error::InvalidInput(format!(
            "starts must satisfy x_lo <= x_hi, got {x_lo} > {x_hi}"
        )));
    }
    if x_hi <= x_lo {
        return Ok(OrderReversal::AtStep(0));
    }
    // Streams mirror coupled_paths so the two entry points agree.
    let (hi_path, lo_path) = coupled_paths(kernel, kernel, x_hi, x_lo, mode, horizon, stream)?;
    for k in 1..=horizon {
        if hi_path[k] <= lo_path[k] {
            return Ok(OrderReversal::AtStep(k));
        }
    }
    Ok(OrderReversal::Exceeded { horizon })
}

/// Spot check that the shared-noise coupling preserves order for a kernel
/// declared monotone. Returns the first violation found, if any.
pub fn monotone_coupling_violation(
    kernel: &MarkovKernel,
    starts: (f64, f64),
    steps: usize,
    trials: usize,
    stream: &RandomnessStream,
) -> Result<Option<(usize, f64, f64)>> {
    let (lo, hi) = starts;
    if !(lo <= hi) {
        return Err(Error::InvalidInput(format!(
            "starts must be ordered, got ({lo}, {hi})"
        )));
    }
    for trial in 0..trials {
        let sub = stream.substream(trial as u64);
        let (path_hi, path_lo) = coupled_paths(
            kernel,
            kernel,
            hi,
            lo,
            CouplingMode::SharedNoise,
            steps,
            &sub,
        )?;
        for k in 0..=steps {
            if path_hi[k] < path_lo[k] {
                return Ok(Some((k, path_lo[k], path_hi[k])));
            }
        }
    }
    Ok(None)
}

//! Piecewise deterministic Markov processes.
//!
//! A process is specified by a deterministic semi-flow, a constant jump
//! rate, a shock sampler and a jump map. Between jumps the state follows
//! the flow; at Poisson event times the state is replaced by
//! `jump(flow(state, elapsed), shock)`. Paths are stored as jump skeletons
//! (times and post-jump states); values between jumps are reconstructed
//! through the flow, making trajectories right-continuous with left limits.
//!
//! Draws occur in a fixed order (waiting time, then shock, repeated), and a
//! path remembers the first waiting time that overshot its horizon, so
//! extending a path consumes exactly the draws a single longer run would
//! have.

use std::sync::Arc;

use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};
use crate::kernel::MarkovKernel;
use crate::rng::RandomnessStream;

/// A single jump's randomness: a uniform branch selector for kernels with
/// several jump types, plus the shock mark fed to the jump map. Models with
/// one jump type ignore the selector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Shock {
    pub selector: f64,
    pub mark: f64,
}

pub type FlowFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type ShockSampler = Arc<dyn Fn(&mut RandomnessStream) -> Shock + Send + Sync>;
/// Draws a coupled pair of shocks: event data both chains must agree on
/// comes from the first stream, private randomness from the other two.
pub type PairedShockSampler = Arc<
    dyn Fn(&mut RandomnessStream, &mut RandomnessStream, &mut RandomnessStream) -> (Shock, Shock)
        + Send
        + Sync,
>;
pub type JumpMap = Arc<dyn Fn(f64, Shock) -> f64 + Send + Sync>;

/// Full specification of a piecewise deterministic process.
#[derive(Clone)]
pub struct PdmpSpec {
    name: String,
    flow: FlowFn,
    jump_rate: f64,
    shock: ShockSampler,
    paired_shock: Option<PairedShockSampler>,
    jump: JumpMap,
    flow_monotone: bool,
    jump_monotone: bool,
}

impl std::fmt::Debug for PdmpSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PdmpSpec")
            .field("name", &self.name)
            .field("jump_rate", &self.jump_rate)
            .field("flow_monotone", &self.flow_monotone)
            .field("jump_monotone", &self.jump_monotone)
            .finish()
    }
}

impl PdmpSpec {
    /// Builds a spec and verifies `flow(x, 0) = x` on probe points. The
    /// monotonicity flags declare that the flow (in the state, for each
    /// elapsed time) and the jump map (in the state, for each shock) are
    /// nondecreasing.
    pub fn new(
        name: impl Into<String>,
        flow: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        jump_rate: f64,
        shock: impl Fn(&mut RandomnessStream) -> Shock + Send + Sync + 'static,
        jump: impl Fn(f64, Shock) -> f64 + Send + Sync + 'static,
        flow_monotone: bool,
        jump_monotone: bool,
    ) -> Result<Self> {
        if !jump_rate.is_finite() || jump_rate <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "jump rate must be positive, got {jump_rate}"
            )));
        }
        let spec = PdmpSpec {
            name: name.into(),
            flow: Arc::new(flow),
            jump_rate,
            shock: Arc::new(shock),
            paired_shock: None,
            jump: Arc::new(jump),
            flow_monotone,
            jump_monotone,
        };
        for &x in &[-3.0, 0.0, 0.5, 7.0] {
            let fx = (spec.flow)(x, 0.0);
            if !((fx - x).abs() <= 1e-9 * (1.0 + x.abs())) {
                return Err(Error::InvalidConfig(format!(
                    "flow({x}, 0) = {fx}, expected the identity"
                )));
            }
        }
        Ok(spec)
    }

    /// Overrides the coupled shock sampler used by the shared-clock
    /// coupling. Without this, coupled chains draw fully independent
    /// shocks from their private streams.
    pub fn with_paired_shock(
        mut self,
        paired: impl Fn(
                &mut RandomnessStream,
                &mut RandomnessStream,
                &mut RandomnessStream,
            ) -> (Shock, Shock)
            + Send
            + Sync
            + 'static,
    ) -> Self {
        self.paired_shock = Some(Arc::new(paired));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn jump_rate(&self) -> f64 {
        self.jump_rate
    }

    pub fn is_monotone(&self) -> bool {
        self.flow_monotone && self.jump_monotone
    }

    pub fn flow(&self, x: f64, t: f64) -> f64 {
        (self.flow)(x, t)
    }

    pub fn sample_shock(&self, rng: &mut RandomnessStream) -> Shock {
        (self.shock)(rng)
    }

    pub fn apply_jump(&self, x: f64, shock: Shock) -> f64 {
        (self.jump)(x, shock)
    }

    /// Spot checks the semi-flow law `flow(flow(x,s),t) = flow(x,s+t)` and
    /// the declared monotonicity on random probes. Model constructors call
    /// this for numerically integrated flows.
    pub fn validate(&self, rng: &mut RandomnessStream, probes: usize) -> Result<()> {
        for _ in 0..probes {
            let x = 4.0 * rng.uniform() - 2.0;
            let s = 2.0 * rng.uniform();
            let t = 2.0 * rng.uniform();
            let glued = self.flow(self.flow(x, s), t);
            let direct = self.flow(x, s + t);
            // Written so that NaN from a diverging integrator also fails.
            if !((glued - direct).abs() <= 1e-9 * (1.0 + direct.abs())) {
                return Err(Error::InvalidConfig(format!(
                    "semi-flow law broken at x={x}, s={s}, t={t}: {glued} vs {direct}"
                )));
            }
            if self.flow_monotone {
                let y = x + rng.uniform();
                if !(self.flow(x, s) <= self.flow(y, s) + 1e-12) {
                    return Err(Error::InvalidConfig(format!(
                        "flow declared monotone but reverses order at x={x}, y={y}, t={s}"
                    )));
                }
            }
            if self.jump_monotone {
                let y = x + rng.uniform();
                let shock = self.sample_shock(rng);
                if !(self.apply_jump(x, shock) <= self.apply_jump(y, shock) + 1e-12) {
                    return Err(Error::InvalidConfig(format!(
                        "jump map declared monotone but reverses order at x={x}, y={y}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Simulates the jump skeleton on `[0, horizon]`.
    pub fn simulate_path(
        &self,
        x0: f64,
        horizon: f64,
        rng: &mut RandomnessStream,
    ) -> Result<PdmpPath> {
        if !horizon.is_finite() || horizon < 0.0 {
            return Err(Error::InvalidInput(format!("bad horizon {horizon}")));
        }
        if !x0.is_finite() {
            return Err(Error::NonFiniteState { step: 0 });
        }
        let mut path = PdmpPath {
            spec: self.clone(),
            times: vec![0.0],
            states: vec![x0],
            horizon: 0.0,
            pending_jump: 0.0 + exp_draw(self.jump_rate, rng),
        };
        path.extend_to(horizon, rng)?;
        Ok(path)
    }

    /// The post-jump chain `Z_{n+1} = jump(flow(Z_n, E), shock)` with
    /// `E ~ Exp(rate)`. Shared-clock coupling draws the waiting time from
    /// the common stream and shocks from the private ones (or from the
    /// spec's paired sampler when it has one).
    pub fn embedded_kernel(&self) -> MarkovKernel {
        let spec = self.clone();
        let step_spec = self.clone();
        let kernel = MarkovKernel::new(
            format!("{}-embedded", self.name),
            self.is_monotone(),
            move |z, rng| {
                let e = exp_draw(step_spec.jump_rate, rng);
                let shock = step_spec.sample_shock(rng);
                step_spec.apply_jump(step_spec.flow(z, e), shock)
            },
        );
        kernel.with_paired_step(move |x, y, shared, own_a, own_b| {
            let e = exp_draw(spec.jump_rate, shared);
            let (sa, sb) = match &spec.paired_shock {
                Some(p) => p(shared, own_a, own_b),
                None => (spec.sample_shock(own_a), spec.sample_shock(own_b)),
            };
            (
                spec.apply_jump(spec.flow(x, e), sa),
                spec.apply_jump(spec.flow(y, e), sb),
            )
        })
    }

    /// Kernel sampling `X_t` given `X_0 = x`: one step simulates the
    /// process over a window of length `t`. `t = 0` is the identity.
    pub fn time_sampler(&self, t: f64) -> Result<MarkovKernel> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidInput(format!("bad window length {t}")));
        }
        let spec = self.clone();
        let paired_spec = self.clone();
        let kernel = MarkovKernel::new(
            format!("{}@{}", self.name, t),
            self.is_monotone(),
            move |x, rng| sample_window(&spec, x, t, rng),
        );
        Ok(kernel.with_paired_step(move |x, y, shared, own_a, own_b| {
            // Both chains see the same Poisson clock over the window.
            let spec = &paired_spec;
            let (mut cx, mut cy) = (x, y);
            let mut now = 0.0;
            loop {
                let e = exp_draw(spec.jump_rate, shared);
                if now + e > t {
                    break;
                }
                now += e;
                let (sa, sb) = match &spec.paired_shock {
                    Some(p) => p(shared, own_a, own_b),
                    None => (spec.sample_shock(own_a), spec.sample_shock(own_b)),
                };
                cx = spec.apply_jump(spec.flow(cx, e), sa);
                cy = spec.apply_jump(spec.flow(cy, e), sb);
            }
            let left = t - now;
            (spec.flow(cx, left), spec.flow(cy, left))
        }))
    }
}

/// Runs one window of length `t` without storing the skeleton.
fn sample_window(spec: &PdmpSpec, x0: f64, t: f64, rng: &mut RandomnessStream) -> f64 {
    let mut x = x0;
    let mut now = 0.0;
    loop {
        let e = exp_draw(spec.jump_rate, rng);
        if now + e > t {
            return spec.flow(x, t - now);
        }
        now += e;
        let shock = spec.sample_shock(rng);
        x = spec.apply_jump(spec.flow(x, e), shock);
    }
}

fn exp_draw(rate: f64, rng: &mut RandomnessStream) -> f64 {
    Exp::new(rate).expect("positive rate").sample(rng)
}

/// Jump skeleton of a simulated path: event times (starting at 0) and the
/// state right after each event. Values between events come from the flow.
#[derive(Clone, Debug)]
pub struct PdmpPath {
    spec: PdmpSpec,
    times: Vec<f64>,
    states: Vec<f64>,
    horizon: f64,
    /// First event time beyond the horizon; its waiting time has been
    /// drawn, its shock has not.
    pending_jump: f64,
}

impl PdmpPath {
    /// Event times, first entry 0.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Post-event states, aligned with [`Self::times`]; first entry is the
    /// initial condition.
    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Number of jumps inside the horizon.
    pub fn jump_count(&self) -> usize {
        self.times.len() - 1
    }

    /// State at time `t`, right-continuous: at an event time this is the
    /// post-jump value.
    pub fn state_at(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::TimeOutOfRange {
                t,
                horizon: self.horizon,
            });
        }
        let idx = self.times.partition_point(|&s| s <= t) - 1;
        Ok(self.spec.flow(self.states[idx], t - self.times[idx]))
    }

    /// State just before each event (the flow evaluated over the full
    /// waiting time). For a process observed at its own Poisson event
    /// times these draws follow the time-stationary law once the chain has
    /// settled.
    pub fn pre_jump_states(&self) -> Vec<f64> {
        (1..self.times.len())
            .map(|i| {
                self.spec
                    .flow(self.states[i - 1], self.times[i] - self.times[i - 1])
            })
            .collect()
    }

    /// Continues the simulation out to `new_horizon`, consuming draws
    /// exactly as an uninterrupted run would have.
    pub fn extend_to(&mut self, new_horizon: f64, rng: &mut RandomnessStream) -> Result<()> {
        if !new_horizon.is_finite() || new_horizon < self.horizon {
            return Err(Error::InvalidInput(format!(
                "horizon must grow, got {new_horizon} after {}",
                self.horizon
            )));
        }
        while self.pending_jump <= new_horizon {
            let arrival = self.pending_jump;
            let prev_time = *self.times.last().unwrap();
            let prev_state = *self.states.last().unwrap();
            let shock = self.spec.sample_shock(rng);
            let next = self
                .spec
                .apply_jump(self.spec.flow(prev_state, arrival - prev_time), shock);
            if !next.is_finite() {
                return Err(Error::NonFiniteState {
                    step: self.times.len(),
                });
            }
            self.times.push(arrival);
            self.states.push(next);
            self.pending_jump = arrival + exp_draw(self.spec.jump_rate, rng);
        }
        self.horizon = new_horizon;
        Ok(())
    }

    /// Dense samples `(t, X_t)` on an equally spaced grid of `n` points
    /// covering `[0, horizon]`.
    pub fn sample_grid(&self, n: usize) -> Result<Vec<(f64, f64)>> {
        if n == 0 {
            return Err(Error::InvalidInput("empty grid".into()));
        }
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let t = if n == 1 {
                0.0
            } else {
                self.horizon * i as f64 / (n - 1) as f64
            };
            out.push((t, self.state_at(t)?));
        }
        Ok(out)
    }
}

/// Builds a semi-flow by integrating `dx/dt = g(x)` with adaptive
/// step-doubling RK4 to absolute tolerance `abs_tol` per evaluation.
pub fn flow_from_ode(g: impl Fn(f64) -> f64 + Send + Sync + 'static, abs_tol: f64) -> FlowFn {
    let g = Arc::new(g);
    Arc::new(move |x0: f64, t: f64| {
        if t <= 0.0 {
            return x0;
        }
        let rk4 = |x: f64, h: f64| -> f64 {
            let k1 = g(x);
            let k2 = g(x + 0.5 * h * k1);
            let k3 = g(x + 0.5 * h * k2);
            let k4 = g(x + h * k3);
            x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        };
        let mut x = x0;
        let mut remaining = t;
        let mut h = t / 16.0;
        while remaining > 0.0 {
            if !x.is_finite() {
                return f64::NAN;
            }
            let step = h.min(remaining);
            let full = rk4(x, step);
            let half = rk4(rk4(x, 0.5 * step), 0.5 * step);
            let err = (half - full).abs() / 15.0;
            let allowed = abs_tol * step / t;
            if !err.is_finite() {
                // Solution escaping to infinity; shrinking the step will
                // not save it.
                return f64::NAN;
            }
            if err <= allowed || step < 1e-12 * t {
                // Local extrapolation: the two half steps plus the
                // Richardson correction.
                x = half + (half - full) / 15.0;
                remaining -= step;
                if err > 0.0 {
                    h = (0.9 * step * (allowed / err).powf(0.2)).clamp(step / 4.0, step * 4.0);
                } else {
                    h = step * 4.0;
                }
            } else {
                h = (0.9 * step * (allowed / err).powf(0.2)).max(step / 4.0);
            }
        }
        x
    })
}

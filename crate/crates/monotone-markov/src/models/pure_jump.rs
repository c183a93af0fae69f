//! Pure-jump log income: upward shocks, occasional resets, no drift.
//!
//! Log income sits still between events. Events arrive at rate
//! `lambda_shock + lambda_reset`; a shock (probability
//! `q = lambda_shock / (lambda_shock + lambda_reset)`) adds a positive
//! increment, a reset (probability `p = 1 - q`) moves the state to
//! `h(x) + zeta`. When `h` is constant, resets wipe the memory and the
//! stationary law comes out in closed form: an atom at the reset point
//! plus an exponential tail of rate `p * theta` for Exp(theta) shocks,
//! which makes income `Y = e^X` Pareto.

use crate::error::{Error, Result};
use crate::kernel::MarkovKernel;
use crate::models::{Law, ResetMap};
use crate::pdmp::{PdmpSpec, Shock};
use crate::prob::AnalyticCdf;
use crate::rng::RandomnessStream;

#[derive(Clone, Debug)]
pub struct PureJumpIncomeConfig {
    lambda_shock: f64,
    lambda_reset: f64,
    shock: Law,
    reset: Law,
    h: ResetMap,
}

impl PureJumpIncomeConfig {
    pub fn new(
        lambda_shock: f64,
        lambda_reset: f64,
        shock: Law,
        reset: Law,
        h: ResetMap,
    ) -> Result<Self> {
        if !(lambda_shock.is_finite() && lambda_shock > 0.0)
            || !(lambda_reset.is_finite() && lambda_reset > 0.0)
        {
            return Err(Error::InvalidConfig(format!(
                "event rates must be positive, got shock {lambda_shock}, reset {lambda_reset}"
            )));
        }
        shock.validate()?;
        reset.validate()?;
        if !shock.strictly_positive() {
            return Err(Error::InvalidConfig(format!(
                "income shocks must be positive, law {} is not",
                shock.label()
            )));
        }
        Ok(PureJumpIncomeConfig {
            lambda_shock,
            lambda_reset,
            shock,
            reset,
            h,
        })
    }

    /// The standard configuration: shock rate 1.0, reset rate 0.1,
    /// Exp(20) shocks (a mean raise of 5% in log income), centered
    /// Gaussian resets with standard deviation 0.3, memoryless resets.
    pub fn standard() -> Self {
        Self::new(
            1.0,
            0.1,
            Law::Exponential { rate: 20.0 },
            Law::Gaussian { mean: 0.0, sd: 0.3 },
            ResetMap::constant(0.0),
        )
        .expect("standard configuration is valid")
    }

    /// The specialization with a closed-form Pareto income tail: resets
    /// land exactly at `x0`, shocks are Exp(theta).
    pub fn pareto(lambda_shock: f64, lambda_reset: f64, theta: f64, x0: f64) -> Result<Self> {
        Self::new(
            lambda_shock,
            lambda_reset,
            Law::Exponential { rate: theta },
            Law::Point { value: 0.0 },
            ResetMap::constant(x0),
        )
    }

    pub fn lambda_shock(&self) -> f64 {
        self.lambda_shock
    }

    pub fn lambda_reset(&self) -> f64 {
        self.lambda_reset
    }

    pub fn shock_law(&self) -> &Law {
        &self.shock
    }

    pub fn reset_law(&self) -> &Law {
        &self.reset
    }

    pub fn reset_map(&self) -> &ResetMap {
        &self.h
    }

    pub fn total_rate(&self) -> f64 {
        self.lambda_shock + self.lambda_reset
    }

    /// `p`: the chance an event is a reset.
    pub fn reset_probability(&self) -> f64 {
        self.lambda_reset / self.total_rate()
    }

    /// `q = 1 - p`: the chance an event is a shock.
    pub fn shock_probability(&self) -> f64 {
        self.lambda_shock / self.total_rate()
    }

    /// Where resets land when they forget the state entirely; `Some` only
    /// for constant `h` and degenerate reset law.
    pub fn reset_point(&self) -> Option<f64> {
        match (self.h.constant_value(), self.reset.point_value()) {
            (Some(c), Some(v)) => Some(c + v),
            _ => None,
        }
    }

    /// Jump process form: identity flow, shared event clock, a uniform
    /// selector deciding shock vs reset.
    pub fn jump_spec(&self) -> Result<PdmpSpec> {
        let p = self.reset_probability();
        let (shock_law, reset_law) = (self.shock.clone(), self.reset.clone());
        let (shock_pair, reset_pair) = (self.shock.clone(), self.reset.clone());
        let h = self.h.clone();
        let sample = move |rng: &mut RandomnessStream| {
            let selector = rng.uniform();
            let mark = if selector < p {
                reset_law.sample(rng)
            } else {
                shock_law.sample(rng)
            };
            Shock { selector, mark }
        };
        let spec = PdmpSpec::new(
            "pure-jump-income",
            |x, _t| x,
            self.total_rate(),
            sample,
            move |x, shock| {
                if shock.selector < p {
                    h.eval(x) + shock.mark
                } else {
                    x + shock.mark
                }
            },
            true,
            true,
        )?;
        Ok(spec.with_paired_shock(move |shared, own_a, own_b| {
            let selector = shared.uniform();
            let (ma, mb) = if selector < p {
                (reset_pair.sample(own_a), reset_pair.sample(own_b))
            } else {
                (shock_pair.sample(own_a), shock_pair.sample(own_b))
            };
            (Shock { selector, mark: ma }, Shock { selector, mark: mb })
        }))
    }

    /// The post-event chain of the jump process.
    pub fn embedded_kernel(&self) -> Result<MarkovKernel> {
        Ok(self.jump_spec()?.embedded_kernel())
    }

    /// Closed-form stationary law, available when resets land at a fixed
    /// point and shocks are exponential: an atom of mass `p` at the reset
    /// point `x0` and `F(x) = 1 - q e^{-p theta (x - x0)}` above it.
    pub fn stationary_cdf(&self) -> Result<AnalyticCdf> {
        let (x0, theta) = self.closed_form_parameters()?;
        let p = self.reset_probability();
        let q = 1.0 - p;
        let rate = p * theta;
        Ok(AnalyticCdf::from_fn(
            format!("pure-jump stationary (atom {p} at {x0}, tail rate {rate})"),
            move |c| {
                if c < x0 {
                    0.0
                } else {
                    1.0 - q * (-rate * (c - x0)).exp()
                }
            },
            (x0, x0 + 40.0 / rate),
            vec![(x0, p)],
        ))
    }

    /// Pareto exponent of stationary income `Y = e^X`:
    /// `p * theta = lambda_reset theta / (lambda_shock + lambda_reset)`.
    pub fn income_tail_exponent(&self) -> Result<f64> {
        let (_, theta) = self.closed_form_parameters()?;
        Ok(self.reset_probability() * theta)
    }

    fn closed_form_parameters(&self) -> Result<(f64, f64)> {
        match (self.reset_point(), self.shock.exponential_rate()) {
            (Some(x0), Some(theta)) => Ok((x0, theta)),
            _ => Err(Error::InvalidConfig(
                "closed form needs point resets and exponential shocks".into(),
            )),
        }
    }

    /// Lower bound on the per-event probability that a coupled pair with
    /// shared event types loses its strict ordering: resets arrive with
    /// probability `p` and cross whenever the fresh reset draws bridge the
    /// span of `h`. `None` when the reset law has no usable difference
    /// tail.
    pub fn reversal_bound_per_event(&self) -> Option<f64> {
        let span = self.h.span();
        let cross = match &self.reset {
            Law::Point { .. } => {
                if span <= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Law::Gaussian { sd, .. } => {
                if *sd == 0.0 {
                    if span <= 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    // zeta' - zeta is centered Gaussian with sd sqrt(2) sd.
                    let scaled = span / (sd * std::f64::consts::SQRT_2);
                    let n = statrs::distribution::Normal::new(0.0, 1.0).unwrap();
                    1.0 - statrs::distribution::ContinuousCDF::cdf(&n, scaled)
                }
            }
            // Difference of two Exp(rate) draws is Laplace:
            // P(zeta' - zeta >= s) = e^{-rate s} / 2 for s >= 0.
            Law::Exponential { rate } => 0.5 * (-rate * span).exp(),
            _ => return None,
        };
        Some(self.reset_probability() * cross)
    }
}

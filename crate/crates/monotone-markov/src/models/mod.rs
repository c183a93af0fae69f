//! Concrete model families.
//!
//! Each submodule packages one model: a validated config, the kernels or
//! process specs built from it, and whatever closed-form reference
//! quantities the model admits (stationary laws, tail exponents, mixing
//! constants). Shared here are the scalar sampling laws configs are
//! assembled from and the bounded increasing reset maps the income models
//! use.

pub mod belief;
pub mod drift;
pub mod ou;
pub mod pure_jump;
pub mod wage;

pub use belief::{logodds_to_prob, prob_to_logodds, BeliefShockConfig};
pub use drift::{Drift, DriftIncomeConfig};
pub use ou::OuConfig;
pub use pure_jump::PureJumpIncomeConfig;
pub use wage::{MmcConstants, MmcWindow, WageLadderConfig};

use std::sync::Arc;

use rand_distr::{Beta, Distribution, Exp, StandardNormal};

use crate::error::{Error, Result};
use crate::kernel::MarkovKernel;
use crate::prob::AnalyticCdf;
use crate::rng::RandomnessStream;
use statrs::distribution::ContinuousCDF;

/// A scalar law a model config can draw from. The closed-form variants
/// also expose their CDFs and means, which the analytic reference
/// quantities need; `Custom` gives up on those.
#[derive(Clone)]
pub enum Law {
    Point {
        value: f64,
    },
    Gaussian {
        mean: f64,
        sd: f64,
    },
    Exponential {
        rate: f64,
    },
    /// `shift + scale * Beta(alpha, beta)`.
    ScaledBeta {
        alpha: f64,
        beta: f64,
        shift: f64,
        scale: f64,
    },
    Custom {
        name: String,
        sampler: Arc<dyn Fn(&mut RandomnessStream) -> f64 + Send + Sync>,
    },
}

impl std::fmt::Debug for Law {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Law({})", self.label())
    }
}

impl Law {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Law::Point { value } => value.is_finite(),
            Law::Gaussian { mean, sd } => mean.is_finite() && sd.is_finite() && *sd >= 0.0,
            Law::Exponential { rate } => rate.is_finite() && *rate > 0.0,
            Law::ScaledBeta {
                alpha,
                beta,
                shift,
                scale,
            } => *alpha > 0.0 && *beta > 0.0 && shift.is_finite() && *scale > 0.0,
            Law::Custom { .. } => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("bad law {}", self.label())))
        }
    }

    pub fn label(&self) -> String {
        match self {
            Law::Point { value } => format!("point({value})"),
            Law::Gaussian { mean, sd } => format!("normal({mean},{sd})"),
            Law::Exponential { rate } => format!("exp({rate})"),
            Law::ScaledBeta {
                alpha,
                beta,
                shift,
                scale,
            } => format!("{shift}+{scale}*beta({alpha},{beta})"),
            Law::Custom { name, .. } => name.clone(),
        }
    }

    pub fn sample(&self, rng: &mut RandomnessStream) -> f64 {
        match self {
            Law::Point { value } => *value,
            Law::Gaussian { mean, sd } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + sd * z
            }
            Law::Exponential { rate } => Exp::new(*rate).expect("positive rate").sample(rng),
            Law::ScaledBeta {
                alpha,
                beta,
                shift,
                scale,
            } => {
                let b: f64 = Beta::new(*alpha, *beta)
                    .expect("positive shape parameters")
                    .sample(rng);
                shift + scale * b
            }
            Law::Custom { sampler, .. } => sampler(rng),
        }
    }

    /// Closed-form CDF where one exists.
    pub fn cdf(&self) -> Option<AnalyticCdf> {
        match self {
            Law::Point { value } => Some(AnalyticCdf::point_mass(*value)),
            Law::Gaussian { mean, sd } => Some(AnalyticCdf::normal(*mean, *sd)),
            Law::Exponential { rate } => Some(AnalyticCdf::exponential(*rate, 0.0)),
            Law::ScaledBeta {
                alpha,
                beta,
                shift,
                scale,
            } => {
                let b = statrs::distribution::Beta::new(*alpha, *beta)
                    .expect("positive shape parameters");
                let (shift, scale) = (*shift, *scale);
                Some(AnalyticCdf::from_fn(
                    self.label(),
                    move |c| b.cdf((c - shift) / scale),
                    (shift, shift + scale),
                    Vec::new(),
                ))
            }
            Law::Custom { .. } => None,
        }
    }

    pub fn mean(&self) -> Option<f64> {
        match self {
            Law::Point { value } => Some(*value),
            Law::Gaussian { mean, .. } => Some(*mean),
            Law::Exponential { rate } => Some(1.0 / rate),
            Law::ScaledBeta {
                alpha,
                beta,
                shift,
                scale,
            } => Some(shift + scale * alpha / (alpha + beta)),
            Law::Custom { .. } => None,
        }
    }

    pub fn point_value(&self) -> Option<f64> {
        match self {
            Law::Point { value } => Some(*value),
            Law::Gaussian { mean, sd } if *sd == 0.0 => Some(*mean),
            _ => None,
        }
    }

    pub fn exponential_rate(&self) -> Option<f64> {
        match self {
            Law::Exponential { rate } => Some(*rate),
            _ => None,
        }
    }

    /// Whether every draw is strictly positive. `Custom` laws are taken at
    /// the caller's word.
    pub fn strictly_positive(&self) -> bool {
        match self {
            Law::Point { value } => *value > 0.0,
            Law::Gaussian { mean, sd } => *sd == 0.0 && *mean > 0.0,
            Law::Exponential { .. } => true,
            Law::ScaledBeta { shift, .. } => *shift >= 0.0,
            Law::Custom { .. } => true,
        }
    }

    /// State-ignoring kernel drawing fresh from the law each step. Trivially
    /// monotone; under the shared-clock coupling both chains keep their own
    /// draws.
    pub fn iid_kernel(&self, name: impl Into<String>) -> MarkovKernel {
        let law = self.clone();
        let paired = self.clone();
        MarkovKernel::new(name, true, move |_x, rng| law.sample(rng)).with_paired_step(
            move |_x, _y, _shared, own_a, own_b| (paired.sample(own_a), paired.sample(own_b)),
        )
    }
}

type MapFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Bounded nondecreasing reset map. Bounds are declared, not inferred;
/// construction spot-checks them (and monotonicity) on a probe grid and
/// refuses maps that escape.
#[derive(Clone)]
pub struct ResetMap {
    name: String,
    eval: MapFn,
    lower: f64,
    upper: f64,
    constant: Option<f64>,
}

impl std::fmt::Debug for ResetMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ResetMap")
            .field("name", &self.name)
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("constant", &self.constant)
            .finish()
    }
}

impl ResetMap {
    pub fn constant(value: f64) -> Self {
        ResetMap {
            name: format!("const({value})"),
            eval: Arc::new(move |_| value),
            lower: value,
            upper: value,
            constant: Some(value),
        }
    }

    pub fn new(
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let name = name.into();
        if !(lower.is_finite() && upper.is_finite() && lower <= upper) {
            return Err(Error::InvalidConfig(format!(
                "reset map {name}: bad bounds [{lower}, {upper}]"
            )));
        }
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=400 {
            let x = -100.0 + i as f64 * 0.5;
            let y = eval(x);
            if y < lower - 1e-12 || y > upper + 1e-12 {
                return Err(Error::InvalidConfig(format!(
                    "reset map {name}: value {y} at {x} escapes [{lower}, {upper}]"
                )));
            }
            if y < prev - 1e-12 {
                return Err(Error::InvalidConfig(format!(
                    "reset map {name}: decreasing at {x}"
                )));
            }
            prev = y;
        }
        Ok(ResetMap {
            name,
            eval: Arc::new(eval),
            lower,
            upper,
            constant: None,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    /// `sup h - inf h`; reversal bounds depend on it.
    pub fn span(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn constant_value(&self) -> Option<f64> {
        self.constant
    }
}

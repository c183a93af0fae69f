//! One-dimensional distributions and observables.
//!
//! Two concrete representations share the [`Cdf`] interface: weighted
//! [`EmpiricalDistribution`]s produced by simulation, and closed-form
//! [`AnalyticCdf`]s used as comparison targets. Distances and dominance
//! checks live in [`metrics`] and work on any `Cdf` pair.

mod metrics;

pub use metrics::{
    bhattacharya_distance, kolmogorov_distance, sd_dominated, tightness_profile, Dominance,
    DOMINANCE_TOL,
};

use std::sync::Arc;

use rand_distr::Distribution;
use statrs::distribution::ContinuousCDF;

use crate::error::{Error, Result};
use crate::rng::RandomnessStream;

/// Weight mass must match 1 to within this before a distribution is usable.
pub const WEIGHT_TOL: f64 = 1e-12;

/// Right-continuous distribution function on the real line.
pub trait Cdf {
    /// P(X <= c).
    fn cdf(&self, c: f64) -> f64;

    /// Left limit P(X < c).
    fn cdf_left(&self, c: f64) -> f64;

    /// Points where the CDF jumps (sample points or atoms). Suprema of CDF
    /// differences against a monotone opponent are attained here.
    fn jump_points(&self) -> Vec<f64>;

    /// Effective range of the continuous part, if any. `None` means purely
    /// atomic, so jump points alone carry all information.
    fn grid_range(&self) -> Option<(f64, f64)>;
}

/// A sorted, weighted sample treated as a probability distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalDistribution {
    points: Vec<f64>,
    weights: Vec<f64>,
    /// cum[i] = total weight of points[0..=i].
    cum: Vec<f64>,
}

impl EmpiricalDistribution {
    /// Equal-weight distribution on `samples`.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidDistribution("empty sample".into()));
        }
        let w = 1.0 / samples.len() as f64;
        Self::from_weighted(samples.to_vec(), vec![w; samples.len()])
    }

    /// Weighted distribution; weights must be nonnegative and sum to 1
    /// within [`WEIGHT_TOL`]. Points are sorted, weights follow their point.
    pub fn from_weighted(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidDistribution("empty sample".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidDistribution(format!("non-finite point {p}")));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidDistribution(format!("bad weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        // Linear summation of n terms carries O(n * eps) rounding even for
        // exact uniform weights, so the gate scales with the input size.
        let tol = WEIGHT_TOL.max(2.0 * points.len() as f64 * f64::EPSILON);
        if (total - 1.0).abs() > tol {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, expected 1"
            )));
        }

        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].total_cmp(&points[b]));
        let points: Vec<f64> = order.iter().map(|&i| points[i]).collect();
        let weights: Vec<f64> = order.iter().map(|&i| weights[i]).collect();

        let mut cum = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in &weights {
            acc += w;
            cum.push(acc);
        }
        Ok(EmpiricalDistribution {
            points,
            weights,
            cum,
        })
    }

    /// Point mass at `x`.
    pub fn point_mass(x: f64) -> Result<Self> {
        Self::from_weighted(vec![x], vec![1.0])
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn min(&self) -> f64 {
        self.points[0]
    }

    pub fn max(&self) -> f64 {
        *self.points.last().unwrap()
    }

    pub fn mean(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| x * w)
            .sum()
    }

    /// Total weight at exactly `x`.
    pub fn mass_at(&self, x: f64) -> f64 {
        self.cdf(x) - self.cdf_left(x)
    }

    /// Smallest point with at least mass `p` below or at it.
    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        let idx = self.cum.partition_point(|&c| c < p);
        self.points[idx.min(self.points.len() - 1)]
    }

    /// Inverse-CDF draw.
    pub fn sample(&self, rng: &mut RandomnessStream) -> f64 {
        self.quantile(rng.uniform())
    }

    /// Maps every point through `f`, keeping weights. Fails on non-finite
    /// images.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mapped: Vec<f64> = self.points.iter().map(|&x| f(x)).collect();
        Self::from_weighted(mapped, self.weights.clone())
    }

    /// Serializes as `value,weight` CSV with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,weight\n");
        for (x, w) in self.points.iter().zip(&self.weights) {
            out.push_str(&format!("{x},{w}\n"));
        }
        out
    }

    /// Parses the `value,weight` format written by [`Self::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with("value")) {
                continue;
            }
            let mut fields = line.split(',');
            let (Some(v), Some(w)) = (fields.next(), fields.next()) else {
                return Err(Error::InvalidDistribution(format!(
                    "line {}: expected value,weight",
                    lineno + 1
                )));
            };
            let parse = |s: &str| {
                s.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidDistribution(format!("line {}: bad number '{s}'", lineno + 1))
                })
            };
            points.push(parse(v)?);
            weights.push(parse(w)?);
        }
        Self::from_weighted(points, weights)
    }
}

impl Cdf for EmpiricalDistribution {
    fn cdf(&self, c: f64) -> f64 {
        let k = self.points.partition_point(|&p| p <= c);
        if k == 0 {
            0.0
        } else {
            self.cum[k - 1]
        }
    }

    fn cdf_left(&self, c: f64) -> f64 {
        let k = self.points.partition_point(|&p| p < c);
        if k == 0 {
            0.0
        } else {
            self.cum[k - 1]
        }
    }

    fn jump_points(&self) -> Vec<f64> {
        self.points.clone()
    }

    fn grid_range(&self) -> Option<(f64, f64)> {
        None
    }
}

type CdfFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Closed-form distribution function, possibly with atoms.
#[derive(Clone)]
pub struct AnalyticCdf {
    name: String,
    /// Full right-continuous CDF, atoms included.
    eval: CdfFn,
    atoms: Vec<(f64, f64)>,
    /// Range containing essentially all continuous mass; sup searches
    /// refine over it.
    range: (f64, f64),
}

impl std::fmt::Debug for AnalyticCdf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnalyticCdf")
            .field("name", &self.name)
            .field("atoms", &self.atoms)
            .field("range", &self.range)
            .finish()
    }
}

impl AnalyticCdf {
    /// Wraps an arbitrary right-continuous CDF. `range` should cover all
    /// but a negligible sliver of the continuous mass. Atoms, if any, are
    /// listed separately so left limits come out right.
    pub fn from_fn(
        name: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        range: (f64, f64),
        atoms: Vec<(f64, f64)>,
    ) -> Self {
        AnalyticCdf {
            name: name.into(),
            eval: Arc::new(eval),
            atoms,
            range,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Normal law; `sd = 0` degenerates to a point mass.
    pub fn normal(mean: f64, sd: f64) -> Self {
        if sd == 0.0 {
            return Self::point_mass(mean);
        }
        let n = statrs::distribution::Normal::new(mean, sd).expect("finite mean, positive sd");
        AnalyticCdf::from_fn(
            format!("normal({mean},{sd})"),
            move |c| n.cdf(c),
            (mean - 10.0 * sd, mean + 10.0 * sd),
            Vec::new(),
        )
    }

    /// Exponential law with the given rate, shifted to start at `origin`.
    pub fn exponential(rate: f64, origin: f64) -> Self {
        AnalyticCdf::from_fn(
            format!("exp(rate={rate}) from {origin}"),
            move |c| {
                if c < origin {
                    0.0
                } else {
                    1.0 - (-rate * (c - origin)).exp()
                }
            },
            (origin, origin + 40.0 / rate),
            Vec::new(),
        )
    }

    pub fn uniform(lo: f64, hi: f64) -> Self {
        AnalyticCdf::from_fn(
            format!("uniform({lo},{hi})"),
            move |c| ((c - lo) / (hi - lo)).clamp(0.0, 1.0),
            (lo, hi),
            Vec::new(),
        )
    }

    pub fn point_mass(x: f64) -> Self {
        AnalyticCdf::from_fn(
            format!("point({x})"),
            move |c| if c >= x { 1.0 } else { 0.0 },
            (x, x),
            vec![(x, 1.0)],
        )
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }
}

impl Cdf for AnalyticCdf {
    fn cdf(&self, c: f64) -> f64 {
        (self.eval)(c)
    }

    fn cdf_left(&self, c: f64) -> f64 {
        let mass: f64 = self
            .atoms
            .iter()
            .filter(|(a, _)| *a == c)
            .map(|(_, m)| m)
            .sum();
        (self.eval)(c) - mass
    }

    fn jump_points(&self) -> Vec<f64> {
        self.atoms.iter().map(|(a, _)| *a).collect()
    }

    fn grid_range(&self) -> Option<(f64, f64)> {
        if self.range.0 < self.range.1 {
            Some(self.range)
        } else {
            None
        }
    }
}

type ObservableFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A bounded nondecreasing test function with |h| <= 1.
///
/// Monotonicity and the bound are the caller's promise; [`Self::checked`]
/// spot-verifies both on a grid for functions built at runtime.
#[derive(Clone)]
pub struct MonotoneObservable {
    name: String,
    eval: ObservableFn,
}

impl MonotoneObservable {
    pub fn new(name: impl Into<String>, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        MonotoneObservable {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    /// Builds the observable after verifying |h| <= 1 and monotonicity on
    /// `probes` points spanning `range`.
    pub fn checked(
        name: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        range: (f64, f64),
        probes: usize,
    ) -> Result<Self> {
        let name = name.into();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..probes {
            let x = range.0 + (range.1 - range.0) * i as f64 / (probes - 1).max(1) as f64;
            let v = eval(x);
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::InvalidInput(format!(
                    "observable '{name}' takes value {v} at {x}, outside [-1, 1]"
                )));
            }
            if v < prev {
                return Err(Error::InvalidInput(format!(
                    "observable '{name}' decreases at {x}"
                )));
            }
            prev = v;
        }
        Ok(MonotoneObservable::new(name, eval))
    }

    /// The extreme ray observable h(x) = 2*1{x >= c} - 1.
    pub fn indicator_above(c: f64) -> Self {
        MonotoneObservable::new(
            format!("ray({c})"),
            move |x| {
                if x >= c {
                    1.0
                } else {
                    -1.0
                }
            },
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// Expectation under an empirical distribution.
    pub fn mean_under(&self, dist: &EmpiricalDistribution) -> f64 {
        dist.points()
            .iter()
            .zip(dist.weights())
            .map(|(x, w)| self.eval(*x) * w)
            .sum()
    }
}

impl std::fmt::Debug for MonotoneObservable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MonotoneObservable({})", self.name)
    }
}

/// Convenience sampler for tests and oracles: draws from any rand_distr
/// distribution through a [`RandomnessStream`].
pub fn draw<D: Distribution<f64>>(dist: &D, rng: &mut RandomnessStream) -> f64 {
    dist.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empirical_sorts_and_accumulates() {
        let d =
            EmpiricalDistribution::from_weighted(vec![2.0, 0.0, 1.0], vec![0.2, 0.5, 0.3]).unwrap();
        assert_eq!(d.points(), &[0.0, 1.0, 2.0]);
        assert_eq!(d.weights(), &[0.5, 0.3, 0.2]);
        assert!((d.cdf(1.0) - 0.8).abs() < 1e-15);
        assert!((d.cdf_left(1.0) - 0.5).abs() < 1e-15);
        assert_eq!(d.cdf(-0.5), 0.0);
        assert_eq!(d.cdf(5.0), d.cum.last().copied().unwrap());
    }

    #[test]
    fn empirical_rejects_bad_input() {
        assert!(EmpiricalDistribution::from_samples(&[]).is_err());
        assert!(EmpiricalDistribution::from_weighted(vec![0.0], vec![0.9]).is_err());
        assert!(EmpiricalDistribution::from_weighted(vec![f64::NAN], vec![1.0]).is_err());
        assert!(EmpiricalDistribution::from_weighted(vec![0.0], vec![-1.0]).is_err());
        assert!(EmpiricalDistribution::from_weighted(vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn weights_on_duplicate_points_stack() {
        let d = EmpiricalDistribution::from_weighted(vec![1.0, 1.0, 2.0], vec![0.25, 0.25, 0.5])
            .unwrap();
        assert!((d.mass_at(1.0) - 0.5).abs() < 1e-15);
        assert!((d.cdf(1.0) - 0.5).abs() < 1e-15);
        assert_eq!(d.cdf_left(1.0), 0.0);
    }

    #[test]
    fn quantile_inverts_cdf_on_grid() {
        let d = EmpiricalDistribution::from_samples(&[3.0, 1.0, 2.0, 4.0]).unwrap();
        assert_eq!(d.quantile(0.0), 1.0);
        assert_eq!(d.quantile(0.25), 1.0);
        assert_eq!(d.quantile(0.26), 2.0);
        assert_eq!(d.quantile(1.0), 4.0);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut rng = RandomnessStream::new(5, 0);
        let pts: Vec<f64> = (0..50).map(|_| rng.uniform() * 1e3 - 500.0).collect();
        let d = EmpiricalDistribution::from_samples(&pts).unwrap();
        let back = EmpiricalDistribution::from_csv(&d.to_csv()).unwrap();
        assert_eq!(d, back, "value,weight text should round-trip bit-exactly");
    }

    #[test]
    fn analytic_point_mass_has_left_limit_zero() {
        let p = AnalyticCdf::point_mass(2.0);
        assert_eq!(p.cdf(2.0), 1.0);
        assert_eq!(p.cdf_left(2.0), 0.0);
        assert_eq!(p.cdf(1.999), 0.0);
    }

    #[test]
    fn checked_observable_rejects_bad_functions() {
        assert!(MonotoneObservable::checked("too big", |x| 2.0 * x, (-2.0, 2.0), 33).is_err());
        assert!(MonotoneObservable::checked("decreasing", |x| -x / 10.0, (-1.0, 1.0), 33).is_err());
        assert!(MonotoneObservable::checked("tanh", |x| x.tanh(), (-8.0, 8.0), 65).is_ok());
    }
}

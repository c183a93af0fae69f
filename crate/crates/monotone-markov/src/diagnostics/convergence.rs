//! Distance-to-target curves over time.

use crate::diagnostics::{dkw_band, ModelSampler};
use crate::error::{Error, Result};
use crate::parallel;
use crate::prob::{bhattacharya_distance, AnalyticCdf, Cdf, EmpiricalDistribution};
use crate::rng::RandomnessStream;

/// What the pushed-forward law is compared against.
#[derive(Clone, Debug)]
pub enum ConvergenceTarget {
    Analytic(AnalyticCdf),
    /// Typically a long-run surrogate for an unknown stationary law.
    Empirical(EmpiricalDistribution),
}

impl ConvergenceTarget {
    fn as_cdf(&self) -> &dyn Cdf {
        match self {
            ConvergenceTarget::Analytic(a) => a,
            ConvergenceTarget::Empirical(e) => e,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ConvergencePoint {
    pub t: f64,
    pub beta_hat: f64,
}

/// Least-squares fit of `beta_hat ~ coefficient * exp(-rate * t)`.
#[derive(Clone, Copy, Debug)]
pub struct GeometricFit {
    pub coefficient: f64,
    pub rate: f64,
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub checkpoints: Vec<ConvergencePoint>,
    /// Fitted on checkpoints above the noise floor; `None` when fewer than
    /// two rise above it.
    pub fit: Option<GeometricFit>,
    /// DKW band at the replication count used for each empirical law.
    pub mc_band: f64,
    /// Checkpoints at or below `4 * mc_band` are excluded from the fit.
    pub noise_floor: f64,
    /// Every checkpoint sat below the noise floor.
    pub already_converged: bool,
}

/// Simulates `n_paths` independent trajectories from `start` and measures
/// the distance to `target` at each checkpoint time. Replication `i` of
/// checkpoint `j` draws from `stream.substream(j).substream(i)`, so
/// results do not depend on scheduling.
pub fn convergence_curve(
    model: &ModelSampler,
    start: &EmpiricalDistribution,
    checkpoints: &[f64],
    target: &ConvergenceTarget,
    n_paths: usize,
    stream: &RandomnessStream,
) -> Result<ConvergenceReport> {
    let laws = push_forward_laws(model, start, checkpoints, n_paths, stream)?;
    let mc_band = dkw_band(n_paths, 0.999);
    let noise_floor = 4.0 * mc_band;

    let checkpoints: Vec<ConvergencePoint> = checkpoints
        .iter()
        .zip(&laws)
        .map(|(&t, law)| ConvergencePoint {
            t,
            beta_hat: bhattacharya_distance(law, target.as_cdf()),
        })
        .collect();

    let usable: Vec<&ConvergencePoint> = checkpoints
        .iter()
        .filter(|p| p.beta_hat > noise_floor)
        .collect();
    let already_converged = usable.is_empty();
    let fit = if usable.len() >= 2 {
        Some(fit_geometric(&usable))
    } else {
        None
    };

    Ok(ConvergenceReport {
        checkpoints,
        fit,
        mc_band,
        noise_floor,
        already_converged,
    })
}

/// Distance between the push-forwards of two starting laws at each
/// checkpoint. Under an order-mixing model this decays no slower than the
/// coupling bound regardless of the pair chosen.
pub fn asymptotic_contractivity_curve(
    model: &ModelSampler,
    start_a: &EmpiricalDistribution,
    start_b: &EmpiricalDistribution,
    checkpoints: &[f64],
    n_paths: usize,
    stream: &RandomnessStream,
) -> Result<Vec<ConvergencePoint>> {
    let laws_a = push_forward_laws(model, start_a, checkpoints, n_paths, &stream.substream(1))?;
    let laws_b = push_forward_laws(model, start_b, checkpoints, n_paths, &stream.substream(2))?;
    Ok(checkpoints
        .iter()
        .zip(laws_a.iter().zip(&laws_b))
        .map(|(&t, (a, b))| ConvergencePoint {
            t,
            beta_hat: bhattacharya_distance(a, b),
        })
        .collect())
}

/// Empirical law of `X_t` for each checkpoint `t`, each from `n_paths`
/// fresh replications started at independent draws from `start`.
fn push_forward_laws(
    model: &ModelSampler,
    start: &EmpiricalDistribution,
    checkpoints: &[f64],
    n_paths: usize,
    stream: &RandomnessStream,
) -> Result<Vec<EmpiricalDistribution>> {
    if checkpoints.is_empty() {
        return Err(Error::InvalidInput("empty checkpoint grid".into()));
    }
    if n_paths == 0 {
        return Err(Error::InvalidInput("need at least one path".into()));
    }
    for t in checkpoints {
        if !t.is_finite() || *t < 0.0 {
            return Err(Error::InvalidInput(format!("bad checkpoint {t}")));
        }
    }
    checkpoints
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let chk_stream = stream.substream(j as u64);
            let samples = parallel::try_replicate(n_paths, |i| {
                let mut rng = chk_stream.substream(i as u64);
                let x0 = start.sample(&mut rng);
                model.sample_at(x0, t, &mut rng)
            })?;
            EmpiricalDistribution::from_samples(&samples)
        })
        .collect()
}

fn fit_geometric(points: &[&ConvergencePoint]) -> GeometricFit {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.t).sum();
    let sy: f64 = points.iter().map(|p| p.beta_hat.ln()).sum();
    let sxx: f64 = points.iter().map(|p| p.t * p.t).sum();
    let sxy: f64 = points.iter().map(|p| p.t * p.beta_hat.ln()).sum();
    let denom = n * sxx - sx * sx;
    let slope = if denom.abs() < 1e-30 {
        0.0
    } else {
        (n * sxy - sx * sy) / denom
    };
    let intercept = (sy - slope * sx) / n;
    GeometricFit {
        coefficient: intercept.exp(),
        rate: -slope,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::MarkovKernel;
    use rand_distr::{Distribution, Normal};

    fn ar1(phi: f64) -> MarkovKernel {
        let noise = Normal::new(0.0, 1.0).unwrap();
        MarkovKernel::new(format!("ar1({phi})"), true, move |x, rng| {
            phi * x + noise.sample(rng)
        })
    }

    #[test]
    fn curve_decays_toward_known_stationary_law() {
        // AR(1) with slope 1/2: stationary N(0, 1/(1-1/4)) = N(0, 4/3).
        // Start at 2.0 so the fitted checkpoints sit in the geometric
        // regime; a start far out saturates the distance at 2 and the
        // plateau would corrupt the log-linear fit.
        let model = ModelSampler::from_kernel(ar1(0.5));
        let target = ConvergenceTarget::Analytic(AnalyticCdf::normal(0.0, (4.0f64 / 3.0).sqrt()));
        let start = EmpiricalDistribution::point_mass(2.0).unwrap();
        let stream = RandomnessStream::new(100, 0);
        let report = convergence_curve(
            &model,
            &start,
            &[1.0, 2.0, 3.0, 8.0],
            &target,
            4000,
            &stream,
        )
        .unwrap();
        let betas: Vec<f64> = report.checkpoints.iter().map(|p| p.beta_hat).collect();
        assert!(
            betas[0] > 0.5 && betas[0] < 1.0,
            "one step in, still far: {}",
            betas[0]
        );
        assert!(betas[3] < 0.1, "after 8 halvings the chain is near target");
        let fit = report.fit.expect("early checkpoints are far from target");
        // Distance halves per step like the mean: rate near ln 2.
        assert!(
            (fit.rate - std::f64::consts::LN_2).abs() < 0.2,
            "fitted rate {} too far from ln 2",
            fit.rate
        );
        assert!(!report.already_converged);
    }

    #[test]
    fn stationary_start_reports_already_converged() {
        let model = ModelSampler::from_kernel(ar1(0.5));
        let sd = (4.0f64 / 3.0).sqrt();
        let target_dist = Normal::new(0.0, sd).unwrap();
        let mut rng = RandomnessStream::new(7, 0);
        let samples: Vec<f64> = (0..4000).map(|_| target_dist.sample(&mut rng)).collect();
        let start = EmpiricalDistribution::from_samples(&samples).unwrap();
        let report = convergence_curve(
            &model,
            &start,
            &[0.0, 1.0, 2.0],
            &ConvergenceTarget::Analytic(AnalyticCdf::normal(0.0, sd)),
            4000,
            &RandomnessStream::new(8, 0),
        )
        .unwrap();
        assert!(report.already_converged);
        assert!(report.fit.is_none());
    }

    #[test]
    fn empty_or_negative_checkpoints_are_rejected() {
        let model = ModelSampler::from_kernel(ar1(0.5));
        let start = EmpiricalDistribution::point_mass(0.0).unwrap();
        let target = ConvergenceTarget::Analytic(AnalyticCdf::normal(0.0, 1.0));
        let stream = RandomnessStream::new(0, 0);
        assert!(convergence_curve(&model, &start, &[], &target, 10, &stream).is_err());
        assert!(convergence_curve(&model, &start, &[-1.0], &target, 10, &stream).is_err());
    }

    #[test]
    fn contractivity_curve_decays_for_distinct_starts() {
        let model = ModelSampler::from_kernel(ar1(0.5));
        let a = EmpiricalDistribution::point_mass(-10.0).unwrap();
        let b = EmpiricalDistribution::point_mass(10.0).unwrap();
        let curve = asymptotic_contractivity_curve(
            &model,
            &a,
            &b,
            &[0.0, 2.0, 6.0, 10.0],
            4000,
            &RandomnessStream::new(55, 0),
        )
        .unwrap();
        assert!((curve[0].beta_hat - 2.0).abs() < 1e-9);
        assert!(curve[3].beta_hat < 0.2);
        assert!(curve[1].beta_hat > curve[3].beta_hat);
    }
}

//! Distances, dominance and tightness on the real line.
//!
//! The central quantity is the sup distance between distribution functions.
//! For the metric induced by bounded increasing test functions, the
//! one-dimensional reduction is exact: the supremum over that class is
//! attained on indicator rays, so the metric equals twice the Kolmogorov
//! distance. `bhattacharya_matches_ray_oracle` below guards this identity
//! against an independent evaluation of the ray observables.

use crate::error::{Error, Result};
use crate::prob::{Cdf, EmpiricalDistribution};

/// Dominance violations below this are treated as floating-point noise.
pub const DOMINANCE_TOL: f64 = 1e-12;

/// Initial grid size for sup searches between two continuous CDFs.
const GRID_INITIAL: usize = 4096;
/// Zoom grid size per refinement round.
const GRID_REFINE: usize = 64;
/// Refinement stops once a round improves the sup by less than this.
const GRID_IMPROVEMENT_TOL: f64 = 1e-10;
const GRID_MAX_ROUNDS: usize = 60;

/// Kolmogorov (sup-CDF) distance.
///
/// Exact when at least one side is purely atomic: against a monotone
/// opponent the supremum of |F - G| is attained at a jump point limit, so
/// evaluating both one-sided limits at every jump of both inputs suffices.
/// When both sides have continuous parts the jump candidates are combined
/// with an adaptive grid over the joint effective range, refined until the
/// improvement falls below 1e-10.
pub fn kolmogorov_distance(a: &dyn Cdf, b: &dyn Cdf) -> f64 {
    let mut best = 0.0f64;
    for c in a.jump_points().into_iter().chain(b.jump_points()) {
        best = best
            .max((a.cdf(c) - b.cdf(c)).abs())
            .max((a.cdf_left(c) - b.cdf_left(c)).abs());
    }
    if let (Some(ra), Some(rb)) = (a.grid_range(), b.grid_range()) {
        let diff = |c: f64| (a.cdf(c) - b.cdf(c)).abs();
        best = best.max(grid_supremum(&diff, ra.0.min(rb.0), ra.1.max(rb.1)));
    }
    best
}

/// Distance induced by nondecreasing test functions bounded by 1. On the
/// real line it equals twice the Kolmogorov distance; values lie in [0, 2].
pub fn bhattacharya_distance(a: &dyn Cdf, b: &dyn Cdf) -> f64 {
    2.0 * kolmogorov_distance(a, b)
}

/// Outcome of a first-order stochastic dominance check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Dominance {
    Holds,
    /// Worst violation: at `at`, the supposedly dominated side has CDF
    /// `gap` below the other side.
    FailsAt {
        at: f64,
        gap: f64,
    },
}

impl Dominance {
    pub fn holds(&self) -> bool {
        matches!(self, Dominance::Holds)
    }
}

/// Checks `lower` <= `upper` in first-order stochastic dominance, i.e.
/// F_lower(c) >= F_upper(c) everywhere. Violations within
/// [`DOMINANCE_TOL`] are ignored; on failure the witness point with the
/// largest gap is reported. The gap is attained at the witness itself
/// except when it only appears as a left limit there, so right-value
/// witnesses win ties.
pub fn sd_dominated(lower: &dyn Cdf, upper: &dyn Cdf) -> Dominance {
    let mut worst_gap = 0.0f64;
    let mut worst_at = f64::NAN;
    let mut consider = |c: f64, gap: f64| {
        if gap > worst_gap {
            worst_gap = gap;
            worst_at = c;
        }
    };
    let jumps: Vec<f64> = lower
        .jump_points()
        .into_iter()
        .chain(upper.jump_points())
        .collect();
    for &c in &jumps {
        consider(c, upper.cdf(c) - lower.cdf(c));
    }
    for &c in &jumps {
        consider(c, upper.cdf_left(c) - lower.cdf_left(c));
    }
    if let (Some(ra), Some(rb)) = (lower.grid_range(), upper.grid_range()) {
        let lo = ra.0.min(rb.0);
        let hi = ra.1.max(rb.1);
        let gap_fn = |c: f64| upper.cdf(c) - lower.cdf(c);
        let (c, gap) = grid_argmax(&gap_fn, lo, hi);
        consider(c, gap);
    }
    if worst_gap > DOMINANCE_TOL {
        Dominance::FailsAt {
            at: worst_at,
            gap: worst_gap,
        }
    } else {
        Dominance::Holds
    }
}

/// For each level eps, the narrowest interval [a, b] with endpoints among
/// the pooled sample points such that every family member puts mass at
/// least 1 - eps on it. Endpoints are exact order statistics of the pooled
/// sample; no interpolation.
pub fn tightness_profile(
    family: &[EmpiricalDistribution],
    levels: &[f64],
) -> Result<Vec<(f64, (f64, f64))>> {
    if family.is_empty() {
        return Err(Error::InvalidInput("empty family".into()));
    }
    if levels.is_empty() {
        return Err(Error::InvalidInput("no levels given".into()));
    }
    for eps in levels {
        if !(*eps > 0.0 && *eps < 1.0) {
            return Err(Error::InvalidInput(format!("level {eps} outside (0,1)")));
        }
    }

    let mut pooled: Vec<f64> = family.iter().flat_map(|d| d.points().to_vec()).collect();
    pooled.sort_by(f64::total_cmp);
    pooled.dedup();

    let feasible = |a: f64, b: f64, need: f64| {
        family
            .iter()
            .all(|d| d.cdf(b) - d.cdf_left(a) >= need - 1e-12)
    };

    let mut out = Vec::with_capacity(levels.len());
    for &eps in levels {
        let need = 1.0 - eps;
        // Two pointers: as the left endpoint moves right the smallest
        // feasible right endpoint can only move right.
        let mut j = 0usize;
        let mut best: Option<(f64, f64)> = None;
        for i in 0..pooled.len() {
            if j < i {
                j = i;
            }
            while j < pooled.len() && !feasible(pooled[i], pooled[j], need) {
                j += 1;
            }
            if j == pooled.len() {
                break;
            }
            let width = pooled[j] - pooled[i];
            if best.is_none() || width < best.unwrap().1 - best.unwrap().0 {
                best = Some((pooled[i], pooled[j]));
            }
        }
        // [min, max] always carries full mass, so a feasible window exists.
        let interval = best.expect("pooled extremes are always feasible");
        out.push((eps, interval));
    }
    Ok(out)
}

fn grid_supremum(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    grid_argmax(f, lo, hi).1
}

/// Coarse scan followed by zooming around the running argmax until the
/// value stops improving.
fn grid_argmax(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    if !(hi > lo) {
        return (lo, f(lo));
    }
    let scan = |a: f64, b: f64, n: usize| -> (f64, f64) {
        let mut arg = a;
        let mut best = f64::NEG_INFINITY;
        for i in 0..=n {
            let x = a + (b - a) * i as f64 / n as f64;
            let v = f(x);
            if v > best {
                best = v;
                arg = x;
            }
        }
        (arg, best)
    };

    let (mut arg, mut best) = scan(lo, hi, GRID_INITIAL);
    let mut half_width = (hi - lo) / GRID_INITIAL as f64;
    for _ in 0..GRID_MAX_ROUNDS {
        let (a, b) = (arg - half_width, arg + half_width);
        let (new_arg, new_best) = scan(a, b, GRID_REFINE);
        let improvement = new_best - best;
        if new_best > best {
            best = new_best;
            arg = new_arg;
        }
        half_width /= GRID_REFINE as f64 / 2.0;
        if improvement < GRID_IMPROVEMENT_TOL {
            break;
        }
    }
    (arg, best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::AnalyticCdf;
    use crate::rng::RandomnessStream;
    use statrs::distribution::{ContinuousCDF, Normal};

    /// Independent evaluation of the increasing-test-function distance on
    /// the ray observables h_c(x) = 2*1{x >= c} - 1, c over pooled points.
    /// Plain summation, no CDF machinery.
    fn beta_ray_oracle(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
        let expect = |d: &EmpiricalDistribution, c: f64| -> f64 {
            d.points()
                .iter()
                .zip(d.weights())
                .map(|(&x, &w)| w * if x >= c { 1.0 } else { -1.0 })
                .sum()
        };
        let mut best = 0.0f64;
        for &c in a.points().iter().chain(b.points()) {
            best = best.max((expect(a, c) - expect(b, c)).abs());
        }
        best
    }

    fn random_empirical(
        rng: &mut RandomnessStream,
        n: usize,
        weighted: bool,
    ) -> EmpiricalDistribution {
        let pts: Vec<f64> = (0..n).map(|_| rng.uniform() * 20.0 - 10.0).collect();
        if weighted {
            let raw: Vec<f64> = (0..n).map(|_| rng.uniform() + 0.05).collect();
            let total: f64 = raw.iter().sum();
            let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
            EmpiricalDistribution::from_weighted(pts, w).unwrap()
        } else {
            EmpiricalDistribution::from_samples(&pts).unwrap()
        }
    }

    #[test]
    fn bhattacharya_matches_ray_oracle() {
        let mut rng = RandomnessStream::new(2024, 0);
        for trial in 0..200 {
            let n = 1 + (rng.uniform() * 60.0) as usize;
            let m = 1 + (rng.uniform() * 60.0) as usize;
            let a = random_empirical(&mut rng, n, trial % 2 == 0);
            let b = random_empirical(&mut rng, m, trial % 3 == 0);
            let beta = bhattacharya_distance(&a, &b);
            let oracle = beta_ray_oracle(&a, &b);
            assert!(
                (beta - oracle).abs() <= 1e-12,
                "trial {trial}: metric {beta} vs ray oracle {oracle}"
            );
        }
    }

    #[test]
    fn metric_axioms_hold_on_random_triples() {
        let mut rng = RandomnessStream::new(77, 0);
        for _ in 0..100 {
            let a = random_empirical(&mut rng, 25, true);
            let b = random_empirical(&mut rng, 40, false);
            let c = random_empirical(&mut rng, 10, true);
            assert_eq!(bhattacharya_distance(&a, &a), 0.0);
            assert_eq!(bhattacharya_distance(&a, &b), bhattacharya_distance(&b, &a));
            let ab = bhattacharya_distance(&a, &b);
            let bc = bhattacharya_distance(&b, &c);
            let ac = bhattacharya_distance(&a, &c);
            assert!(ac <= ab + bc + 1e-12, "triangle: {ac} > {ab} + {bc}");
            assert!((0.0..=2.0 + 1e-12).contains(&ab));
        }
    }

    #[test]
    fn point_masses_at_distinct_points_are_maximally_apart() {
        let d0 = EmpiricalDistribution::point_mass(0.0).unwrap();
        let d1 = EmpiricalDistribution::point_mass(1.0).unwrap();
        assert_eq!(kolmogorov_distance(&d0, &d1), 1.0);
        assert_eq!(bhattacharya_distance(&d0, &d1), 2.0);

        let a0 = AnalyticCdf::point_mass(0.0);
        let a1 = AnalyticCdf::point_mass(1.0);
        assert_eq!(bhattacharya_distance(&a0, &a1), 2.0);
        assert_eq!(bhattacharya_distance(&d0, &a0), 0.0);
    }

    #[test]
    fn interleaved_samples_have_exact_distance() {
        let a = EmpiricalDistribution::from_samples(&[0.0, 2.0, 4.0]).unwrap();
        let b = EmpiricalDistribution::from_samples(&[1.0, 3.0, 5.0]).unwrap();
        assert!((kolmogorov_distance(&a, &b) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn shifted_normals_match_closed_form() {
        let a = AnalyticCdf::normal(0.0, 1.0);
        let b = AnalyticCdf::normal(0.5, 1.0);
        // Sup of |PHI(c) - PHI(c - 1/2)| sits at the midpoint c = 1/4.
        let phi = Normal::new(0.0, 1.0).unwrap();
        let expected = 2.0 * (2.0 * phi.cdf(0.25) - 1.0);
        assert!((expected - 0.394_825_302_731_694_8).abs() < 1e-12);
        let beta = bhattacharya_distance(&a, &b);
        assert!(
            (beta - expected).abs() < 1e-8,
            "grid search found {beta}, closed form {expected}"
        );
    }

    #[test]
    fn dominance_examples() {
        let d0 = EmpiricalDistribution::point_mass(0.0).unwrap();
        let d1 = EmpiricalDistribution::point_mass(1.0).unwrap();
        assert!(sd_dominated(&d0, &d1).holds());
        assert!(!sd_dominated(&d1, &d0).holds());
        assert!(sd_dominated(&d0, &d0).holds());

        let n0 = AnalyticCdf::normal(0.0, 1.0);
        let n1 = AnalyticCdf::normal(1.0, 1.0);
        assert!(sd_dominated(&n0, &n1).holds());
        assert!(!sd_dominated(&n1, &n0).holds());

        // CDFs crossing: neither direction holds, witness reported.
        let spread = EmpiricalDistribution::from_samples(&[0.0, 2.0]).unwrap();
        let mid = EmpiricalDistribution::point_mass(1.0).unwrap();
        match sd_dominated(&spread, &mid) {
            Dominance::FailsAt { at, gap } => {
                assert_eq!(at, 1.0);
                assert!((gap - 0.5).abs() < 1e-15);
            }
            Dominance::Holds => panic!("crossing CDFs reported as dominated"),
        }
        assert!(!sd_dominated(&mid, &spread).holds());
    }

    #[test]
    fn mutual_dominance_means_zero_distance() {
        // Same distribution assembled two ways: split atoms vs merged atoms.
        let mut rng = RandomnessStream::new(31, 0);
        for _ in 0..50 {
            let base = random_empirical(&mut rng, 20, true);
            let mut pts = Vec::new();
            let mut wts = Vec::new();
            for (&x, &w) in base.points().iter().zip(base.weights()) {
                let share = rng.uniform() * w;
                pts.push(x);
                wts.push(share);
                pts.push(x);
                wts.push(w - share);
            }
            let split = EmpiricalDistribution::from_weighted(pts, wts).unwrap();
            assert!(sd_dominated(&base, &split).holds());
            assert!(sd_dominated(&split, &base).holds());
            assert!(kolmogorov_distance(&base, &split) <= 1e-12);
        }
    }

    /// Order interval endpoints by coordinatewise min/max of sorted samples
    /// bound the metric from outside: if l <= phi, psi <= u pointwise in
    /// distribution, then beta(phi, psi) <= beta(l, u).
    #[test]
    fn distance_respects_order_interval_bounds() {
        let mut rng = RandomnessStream::new(99, 0);
        for trial in 0..100 {
            let n = 5 + (rng.uniform() * 50.0) as usize;
            let mut xs: Vec<f64> = (0..n).map(|_| rng.uniform() * 8.0 - 4.0).collect();
            let mut ys: Vec<f64> = (0..n).map(|_| rng.uniform() * 8.0 - 4.0).collect();
            xs.sort_by(f64::total_cmp);
            ys.sort_by(f64::total_cmp);
            let lo: Vec<f64> = xs.iter().zip(&ys).map(|(a, b)| a.min(*b)).collect();
            let hi: Vec<f64> = xs.iter().zip(&ys).map(|(a, b)| a.max(*b)).collect();

            let phi = EmpiricalDistribution::from_samples(&xs).unwrap();
            let psi = EmpiricalDistribution::from_samples(&ys).unwrap();
            let l = EmpiricalDistribution::from_samples(&lo).unwrap();
            let u = EmpiricalDistribution::from_samples(&hi).unwrap();

            assert!(sd_dominated(&l, &phi).holds() && sd_dominated(&phi, &u).holds());
            assert!(sd_dominated(&l, &psi).holds() && sd_dominated(&psi, &u).holds());

            let inner = bhattacharya_distance(&phi, &psi);
            let outer = bhattacharya_distance(&l, &u);
            assert!(
                inner <= outer + 1e-12,
                "trial {trial}: inner {inner} > outer {outer}"
            );
        }
    }

    #[test]
    fn tightness_of_point_mass_is_degenerate() {
        let d = EmpiricalDistribution::point_mass(0.0).unwrap();
        let prof = tightness_profile(&[d], &[0.1]).unwrap();
        assert_eq!(prof, vec![(0.1, (0.0, 0.0))]);
    }

    #[test]
    fn tightness_at_tiny_level_spans_the_sample() {
        let mut rng = RandomnessStream::new(11, 0);
        let pts: Vec<f64> = (0..200).map(|_| rng.uniform()).collect();
        let d = EmpiricalDistribution::from_samples(&pts).unwrap();
        let lo = d.min();
        let hi = d.max();
        let prof = tightness_profile(&[d], &[1e-9]).unwrap();
        assert_eq!(prof[0].1, (lo, hi));
    }

    #[test]
    fn tightness_shrinks_as_level_grows() {
        let mut rng = RandomnessStream::new(12, 0);
        let pts: Vec<f64> = (0..500).map(|_| rng.uniform() * 2.0 - 1.0).collect();
        let d = EmpiricalDistribution::from_samples(&pts).unwrap();
        let prof = tightness_profile(&[d], &[0.01, 0.1, 0.5]).unwrap();
        let widths: Vec<f64> = prof.iter().map(|(_, (a, b))| b - a).collect();
        assert!(widths[0] >= widths[1] && widths[1] >= widths[2]);
    }

    #[test]
    fn tightness_rejects_bad_input() {
        let d = EmpiricalDistribution::point_mass(0.0).unwrap();
        assert!(tightness_profile(&[], &[0.1]).is_err());
        assert!(tightness_profile(std::slice::from_ref(&d), &[]).is_err());
        assert!(tightness_profile(&[d], &[0.0]).is_err());
    }
}

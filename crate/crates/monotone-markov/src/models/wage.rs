//! Wage ladder with job destruction.
//!
//! Between events a worker's wage sits still. Events arrive at rate
//! `delta + lambda_offer`; an event is a destruction with probability
//! `delta / (delta + lambda_offer)`, redrawing the wage from the
//! destruction kernel, and an outside offer otherwise, moving the wage to
//! the max of the current wage and the offer. The resulting event chain is
//! monotone whenever both ingredient kernels are, and admits an explicit
//! minorization window that certifies geometric mixing.

use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::kernel::MarkovKernel;
use crate::models::Law;
use crate::pdmp::{PdmpSpec, Shock};
use crate::rng::RandomnessStream;

/// Minorization window: within one time unit, `n` straight destructions
/// land the wage at or below `w_hat` with probability at least
/// `e^{-(delta+lambda)} delta^n / n! * eps`, where `eps` is the chance a
/// single destruction redraw falls at or below `w_hat`.
#[derive(Clone, Copy, Debug)]
pub struct MmcWindow {
    pub w_hat: f64,
    pub n: u32,
    pub eps: f64,
}

/// Certified mixing constants derived from a minorization window.
#[derive(Clone, Copy, Debug)]
pub struct MmcConstants {
    /// Two-sided small-set mass `kappa`.
    pub kappa: f64,
    /// Distance prefactor `2 / (1 - kappa)`.
    pub coefficient: f64,
    /// Geometric decay rate per unit time, `ln(1 / (1 - kappa))`.
    pub rate: f64,
}

#[derive(Clone, Debug)]
pub struct WageLadderConfig {
    delta: f64,
    lambda_offer: f64,
    w_bar: f64,
    q_u: MarkovKernel,
    q_e: MarkovKernel,
    destruction_law: Option<Law>,
    offer_law: Option<Law>,
    mmc: Option<MmcWindow>,
}

impl WageLadderConfig {
    /// Wage ladder with iid destruction redraws and iid offers. Keeping
    /// the laws around makes the analytic extras (exact `eps`, the
    /// jump-process representation) available.
    pub fn from_laws(
        delta: f64,
        lambda_offer: f64,
        destruction: Law,
        offer: Law,
        w_bar: f64,
    ) -> Result<Self> {
        destruction.validate()?;
        offer.validate()?;
        let q_u = destruction.iid_kernel("wage-destruction");
        let q_e = offer.iid_kernel("wage-offer");
        let mut cfg = Self::from_kernels(delta, lambda_offer, q_u, q_e, w_bar)?;
        cfg.destruction_law = Some(destruction);
        cfg.offer_law = Some(offer);
        Ok(cfg)
    }

    /// Fully general form: destruction and offer draws may depend on the
    /// current wage. Both kernels must map `[0, w_bar]` into itself;
    /// violations surface as state-range errors when chains run.
    pub fn from_kernels(
        delta: f64,
        lambda_offer: f64,
        q_u: MarkovKernel,
        q_e: MarkovKernel,
        w_bar: f64,
    ) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) || !(lambda_offer.is_finite() && lambda_offer > 0.0)
        {
            return Err(Error::InvalidConfig(format!(
                "event rates must be positive, got destruction {delta}, offer {lambda_offer}"
            )));
        }
        if !(w_bar.is_finite() && w_bar > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "wage ceiling must be positive, got {w_bar}"
            )));
        }
        Ok(WageLadderConfig {
            delta,
            lambda_offer,
            w_bar,
            q_u,
            q_e,
            destruction_law: None,
            offer_law: None,
            mmc: None,
        })
    }

    /// The standard configuration: destruction rate 0.1, offer rate 0.5,
    /// destruction redraws from Beta(2,8), offers from 0.5 + 0.5 Beta(8,2)
    /// on the unit wage interval, with the minorization window at 0.5 and
    /// its exact single-destruction mass 502/512.
    pub fn standard() -> Self {
        let destruction = Law::ScaledBeta {
            alpha: 2.0,
            beta: 8.0,
            shift: 0.0,
            scale: 1.0,
        };
        let offer = Law::ScaledBeta {
            alpha: 8.0,
            beta: 2.0,
            shift: 0.5,
            scale: 0.5,
        };
        Self::from_laws(0.1, 0.5, destruction, offer, 1.0)
            .and_then(|cfg| cfg.with_analytic_mmc(0.5, 1))
            .expect("standard configuration is valid")
    }

    /// Declares a minorization window with an externally supplied `eps`.
    pub fn with_mmc(mut self, w_hat: f64, n: u32, eps: f64) -> Result<Self> {
        if !(0.0..=self.w_bar).contains(&w_hat) {
            return Err(Error::InvalidConfig(format!(
                "window level {w_hat} outside [0, {}]",
                self.w_bar
            )));
        }
        if n == 0 {
            return Err(Error::InvalidConfig(
                "window needs at least one destruction".into(),
            ));
        }
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "single-destruction mass {eps} outside (0, 1]"
            )));
        }
        self.mmc = Some(MmcWindow { w_hat, n, eps });
        Ok(self)
    }

    /// Computes `eps` exactly from the destruction law's CDF. Only
    /// available when the config was built from laws with closed forms.
    pub fn with_analytic_mmc(self, w_hat: f64, n: u32) -> Result<Self> {
        let cdf = self
            .destruction_law
            .as_ref()
            .and_then(Law::cdf)
            .ok_or_else(|| {
                Error::InvalidConfig(
                    "destruction law has no closed-form CDF; use with_mmc or estimate_eps".into(),
                )
            })?;
        let eps = crate::prob::Cdf::cdf(&cdf, w_hat);
        self.with_mmc(w_hat, n, eps)
    }

    /// Monte Carlo stand-in for a missing closed form: the frequency of
    /// destruction redraws from the worst start `w_bar` landing at or
    /// below `w_hat`, with a one-sided 99% lower confidence bound. Use the
    /// bound as `eps` to keep the certificate honest.
    pub fn estimate_eps(
        &self,
        w_hat: f64,
        trials: usize,
        stream: &RandomnessStream,
    ) -> Result<(f64, f64)> {
        if trials == 0 {
            return Err(Error::InvalidInput("need at least one trial".into()));
        }
        let hits = crate::parallel::try_replicate(trials, |i| {
            let mut rng = stream.substream(i as u64);
            Ok(self.q_u.step(self.w_bar, &mut rng) <= w_hat)
        })?
        .into_iter()
        .filter(|h| *h)
        .count();
        let p_hat = hits as f64 / trials as f64;
        Ok((
            p_hat,
            crate::diagnostics::hoeffding_lower(p_hat, trials, 0.99).max(0.0),
        ))
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn lambda_offer(&self) -> f64 {
        self.lambda_offer
    }

    pub fn w_bar(&self) -> f64 {
        self.w_bar
    }

    pub fn mmc_window(&self) -> Option<MmcWindow> {
        self.mmc
    }

    pub fn destruction_law(&self) -> Option<&Law> {
        self.destruction_law.as_ref()
    }

    pub fn offer_law(&self) -> Option<&Law> {
        self.offer_law.as_ref()
    }

    /// Total event rate `delta + lambda_offer`.
    pub fn event_rate(&self) -> f64 {
        self.delta + self.lambda_offer
    }

    /// Probability an event is a destruction.
    pub fn destruction_probability(&self) -> f64 {
        self.delta / self.event_rate()
    }

    /// One event: destruction redraw with probability
    /// `delta / (delta + lambda_offer)`, otherwise the max of the current
    /// wage and a fresh offer.
    pub fn event_kernel(&self) -> MarkovKernel {
        let p_dest = self.destruction_probability();
        let (q_u, q_e) = (self.q_u.clone(), self.q_e.clone());
        let monotone = q_u.monotone_by_construction() && q_e.monotone_by_construction();
        let (pu, pe) = (self.q_u.clone(), self.q_e.clone());
        MarkovKernel::new("wage-event", monotone, move |w, rng| {
            if rng.uniform() < p_dest {
                q_u.step(w, rng)
            } else {
                w.max(q_e.step(w, rng))
            }
        })
        .with_state_space(0.0, self.w_bar)
        .with_paired_step(move |x, y, shared, own_a, own_b| {
            if shared.uniform() < p_dest {
                (pu.step(x, own_a), pu.step(y, own_b))
            } else {
                (x.max(pe.step(x, own_a)), y.max(pe.step(y, own_b)))
            }
        })
    }

    /// Kernel whose single step samples the wage after `t` units of
    /// calendar time: a Poisson((delta+lambda) t) number of events.
    pub fn continuous_sampler(&self, t: f64) -> Result<MarkovKernel> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidInput(format!("bad window length {t}")));
        }
        let mean_events = self.event_rate() * t;
        let p_dest = self.destruction_probability();
        let (q_u, q_e) = (self.q_u.clone(), self.q_e.clone());
        let monotone = q_u.monotone_by_construction() && q_e.monotone_by_construction();
        let (pu, pe) = (self.q_u.clone(), self.q_e.clone());
        Ok(
            MarkovKernel::new(format!("wage@{t}"), monotone, move |w, rng| {
                let mut x = w;
                for _ in 0..poisson_count(mean_events, rng) {
                    if rng.uniform() < p_dest {
                        x = q_u.step(x, rng);
                    } else {
                        x = x.max(q_e.step(x, rng));
                    }
                }
                x
            })
            .with_state_space(0.0, self.w_bar)
            .with_paired_step(move |x, y, shared, own_a, own_b| {
                let (mut cx, mut cy) = (x, y);
                for _ in 0..poisson_count(mean_events, shared) {
                    if shared.uniform() < p_dest {
                        cx = pu.step(cx, own_a);
                        cy = pu.step(cy, own_b);
                    } else {
                        cx = cx.max(pe.step(cx, own_a));
                        cy = cy.max(pe.step(cy, own_b));
                    }
                }
                (cx, cy)
            }),
        )
    }

    /// Event-clock jump process equivalent to the kernels above. Needs the
    /// iid-law form, since its shocks are drawn without seeing the state.
    pub fn jump_spec(&self) -> Result<PdmpSpec> {
        let (dest, offer) = match (&self.destruction_law, &self.offer_law) {
            (Some(d), Some(o)) => (d.clone(), o.clone()),
            _ => {
                return Err(Error::InvalidConfig(
                    "jump-process form needs iid destruction and offer laws".into(),
                ))
            }
        };
        let p_dest = self.destruction_probability();
        let (dest_pair, offer_pair) = (dest.clone(), offer.clone());
        let sample = move |rng: &mut RandomnessStream| {
            let selector = rng.uniform();
            let mark = if selector < p_dest {
                dest.sample(rng)
            } else {
                offer.sample(rng)
            };
            Shock { selector, mark }
        };
        let spec = PdmpSpec::new(
            "wage",
            |x, _t| x,
            self.event_rate(),
            sample,
            move |w, shock| {
                if shock.selector < p_dest {
                    shock.mark
                } else {
                    w.max(shock.mark)
                }
            },
            true,
            true,
        )?;
        Ok(spec.with_paired_shock(move |shared, own_a, own_b| {
            let selector = shared.uniform();
            let (ma, mb) = if selector < p_dest {
                (dest_pair.sample(own_a), dest_pair.sample(own_b))
            } else {
                (offer_pair.sample(own_a), offer_pair.sample(own_b))
            };
            (Shock { selector, mark: ma }, Shock { selector, mark: mb })
        }))
    }

    /// Mixing constants from the declared minorization window:
    /// `kappa = e^{-(delta+lambda)} (delta ^ lambda_min)^n / n! * eps`
    /// with `delta ^ lambda_min` the smaller of the two rates, then the
    /// distance prefactor `2 / (1 - kappa)` and decay rate
    /// `ln(1 / (1 - kappa))` per unit time.
    pub fn mmc_constants(&self) -> Result<MmcConstants> {
        let window = self.mmc.ok_or_else(|| {
            Error::InvalidConfig("no minorization window declared; call with_mmc first".into())
        })?;
        let min_rate = self.delta.min(self.lambda_offer);
        let factorial: f64 = (1..=window.n).map(f64::from).product();
        let kappa =
            (-self.event_rate()).exp() * min_rate.powi(window.n as i32) / factorial * window.eps;
        assert!(
            kappa > 0.0 && kappa < 1.0,
            "small-set mass {kappa} outside (0,1)"
        );
        Ok(MmcConstants {
            kappa,
            coefficient: 2.0 / (1.0 - kappa),
            rate: -(-kappa).ln_1p(),
        })
    }
}

fn poisson_count(mean: f64, rng: &mut RandomnessStream) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let draw: f64 = Poisson::new(mean).expect("positive mean").sample(rng);
    draw as u64
}

/// Deterministic ladder max used in tests and examples: the best of `n`
/// offers dominates the `n`-th offer pathwise.
pub fn offer_ladder_kernel(offer: Law) -> MarkovKernel {
    let o = offer.clone();
    MarkovKernel::new("offer-ladder", true, move |w, rng| w.max(o.sample(rng))).with_paired_step({
        let o = offer;
        move |x, y, _shared, own_a, own_b| (x.max(o.sample(own_a)), y.max(o.sample(own_b)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{dkw_band, mmc_monte_carlo};
    use crate::prob::bhattacharya_distance;
    use crate::prob::EmpiricalDistribution;

    #[test]
    fn standard_eps_is_the_exact_binomial_value() {
        // P{Beta(2,8) <= 1/2} = P{Bin(9, 1/2) >= 2} = 502/512.
        let cfg = WageLadderConfig::standard();
        let window = cfg.mmc_window().unwrap();
        assert!(
            (window.eps - 502.0 / 512.0).abs() < 1e-12,
            "eps = {}",
            window.eps
        );
        assert_eq!(window.n, 1);
        assert_eq!(window.w_hat, 0.5);
    }

    #[test]
    fn standard_mixing_constants() {
        let cfg = WageLadderConfig::standard();
        let c = cfg.mmc_constants().unwrap();
        // kappa = e^{-0.6} * 0.1 * 502/512.
        let expected = (-0.6f64).exp() * 0.1 * (502.0 / 512.0);
        assert!((c.kappa - expected).abs() < 1e-15);
        assert!((c.kappa - 0.0538).abs() < 1e-4, "kappa = {}", c.kappa);
        assert!(
            (c.coefficient - 2.1137).abs() < 1e-4,
            "C = {}",
            c.coefficient
        );
        assert!((c.rate - 0.0553).abs() < 1e-4, "rate = {}", c.rate);
        assert!((c.coefficient - 2.0 / (1.0 - c.kappa)).abs() < 1e-15);
    }

    #[test]
    fn symmetric_single_destruction_window() {
        // delta = lambda, n = 1, eps = 1 collapses to kappa = delta e^{-2 delta}.
        let d = 0.3;
        let cfg = WageLadderConfig::from_laws(
            d,
            d,
            Law::Point { value: 0.0 },
            Law::Point { value: 1.0 },
            1.0,
        )
        .unwrap()
        .with_mmc(0.5, 1, 1.0)
        .unwrap();
        let c = cfg.mmc_constants().unwrap();
        assert!((c.kappa - d * (-2.0 * d).exp()).abs() < 1e-15);
    }

    #[test]
    fn point_offers_absorb_at_the_ceiling_between_destructions() {
        let cfg = WageLadderConfig::from_laws(
            0.1,
            0.5,
            Law::Point { value: 0.3 },
            Law::Point { value: 1.0 },
            1.0,
        )
        .unwrap();
        let kernel = cfg.event_kernel();
        let mut rng = RandomnessStream::new(21, 0);
        let path = kernel.iterate(0.7, 200, &mut rng).unwrap();
        assert!(path.iter().all(|w| [0.7, 0.3, 1.0].contains(w)));
        assert!(path.contains(&1.0));
        assert!(path.contains(&0.3));
        // Once at the ceiling, only a destruction moves the wage.
        for w in path.windows(2) {
            if w[0] == 1.0 {
                assert!(w[1] == 1.0 || w[1] == 0.3);
            }
        }
    }

    #[test]
    fn ladder_max_dominates_single_offers_pathwise() {
        let offer = Law::ScaledBeta {
            alpha: 8.0,
            beta: 2.0,
            shift: 0.5,
            scale: 0.5,
        };
        let ladder = offer_ladder_kernel(offer.clone());
        for seed in 0..20 {
            let mut ladder_rng = RandomnessStream::new(900, seed);
            let mut single_rng = ladder_rng.clone();
            let climbed = ladder.run(0.0, 8, &mut ladder_rng).unwrap();
            let mut last = 0.0;
            for _ in 0..8 {
                last = offer.sample(&mut single_rng);
            }
            assert!(climbed >= last, "ladder {climbed} below last offer {last}");
        }
    }

    #[test]
    fn zero_window_sampler_is_the_identity() {
        let cfg = WageLadderConfig::standard();
        let k = cfg.continuous_sampler(0.0).unwrap();
        let mut rng = RandomnessStream::new(0, 0);
        assert_eq!(k.step(0.42, &mut rng), 0.42);
    }

    #[test]
    fn unit_window_event_count_has_the_right_void_probability() {
        // From wage 0 every event moves the state almost surely, so
        // staying at 0 over one time unit means no event arrived:
        // probability e^{-0.6}.
        let cfg = WageLadderConfig::standard();
        let k = cfg.continuous_sampler(1.0).unwrap();
        let stream = RandomnessStream::new(77, 1);
        let trials = 20_000;
        let stuck = crate::parallel::replicate(trials, |i| {
            let mut rng = stream.substream(i as u64);
            k.step(0.0, &mut rng) == 0.0
        })
        .into_iter()
        .filter(|s| *s)
        .count();
        let freq = stuck as f64 / trials as f64;
        let p = (-0.6f64).exp();
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((freq - p).abs() < 4.0 * se, "void frequency {freq} vs {p}");
    }

    #[test]
    fn poisson_window_matches_the_jump_process_law() {
        // Two constructions of the same transition law: Poisson event
        // count vs exponential event clock.
        let cfg = WageLadderConfig::standard();
        let t = 2.5;
        let window = cfg.continuous_sampler(t).unwrap();
        let spec = cfg.jump_spec().unwrap();
        let clock = spec.time_sampler(t).unwrap();
        let n = 4000;
        let stream = RandomnessStream::new(5150, 0);
        let a: Vec<f64> = crate::parallel::try_replicate(n, |i| {
            let mut rng = stream.substream(i as u64);
            window.run(0.2, 1, &mut rng)
        })
        .unwrap();
        let b: Vec<f64> = crate::parallel::try_replicate(n, |i| {
            let mut rng = stream.substream((n + i) as u64);
            clock.run(0.2, 1, &mut rng)
        })
        .unwrap();
        let da = EmpiricalDistribution::from_samples(&a).unwrap();
        let db = EmpiricalDistribution::from_samples(&b).unwrap();
        let d = bhattacharya_distance(&da, &db);
        assert!(
            d <= 4.0 * dkw_band(n, 0.999),
            "distance {d} between the two constructions"
        );
    }

    #[test]
    fn minorization_frequencies_beat_their_analytic_bounds() {
        // Within one time unit: exactly one destruction landing at or
        // below 0.5 pins the down move (chance >= e^{-0.6} * 0.1 * eps);
        // exactly one offer pins the up move, since offers never fall
        // below 0.5 (chance >= e^{-0.6} * 0.5).
        let cfg = WageLadderConfig::standard();
        let k = cfg.continuous_sampler(1.0).unwrap();
        let stream = RandomnessStream::new(424242, 0);
        let trials = 20_000;
        let cert = mmc_monte_carlo(&k, 0.0, 1.0, 0.5, 1, trials, &stream).unwrap();
        let eps = cfg.mmc_window().unwrap().eps;
        let down_bound = (-0.6f64).exp() * 0.1 * eps;
        let up_bound = (-0.6f64).exp() * 0.5;
        let se = |p: f64| (p * (1.0 - p) / trials as f64).sqrt();
        assert!(
            cert.down_estimate >= down_bound - 3.0 * se(down_bound),
            "down {} below bound {down_bound}",
            cert.down_estimate
        );
        assert!(
            cert.up_estimate >= up_bound - 3.0 * se(up_bound),
            "up {} below bound {up_bound}",
            cert.up_estimate
        );
        assert!(cert.certified);
    }

    #[test]
    fn eps_estimate_brackets_the_exact_value() {
        let cfg = WageLadderConfig::standard();
        let stream = RandomnessStream::new(31337, 2);
        let (p_hat, lower) = cfg.estimate_eps(0.5, 20_000, &stream).unwrap();
        let exact = 502.0 / 512.0;
        assert!((p_hat - exact).abs() < 0.005, "estimate {p_hat}");
        assert!(lower <= p_hat);
        assert!(lower > exact - 0.02);
    }

    #[test]
    fn config_validation() {
        let law = Law::Point { value: 0.5 };
        assert!(WageLadderConfig::from_laws(0.0, 0.5, law.clone(), law.clone(), 1.0).is_err());
        assert!(WageLadderConfig::from_laws(0.1, -0.5, law.clone(), law.clone(), 1.0).is_err());
        assert!(WageLadderConfig::from_laws(0.1, 0.5, law.clone(), law.clone(), 0.0).is_err());
        let cfg = WageLadderConfig::from_laws(0.1, 0.5, law.clone(), law, 1.0).unwrap();
        assert!(cfg.clone().with_mmc(2.0, 1, 0.5).is_err());
        assert!(cfg.clone().with_mmc(0.5, 0, 0.5).is_err());
        assert!(cfg.clone().with_mmc(0.5, 1, 0.0).is_err());
        assert!(cfg.mmc_constants().is_err());
        // Kernel-built configs have no closed-form eps.
        let q = MarkovKernel::new("flat", true, |_x, rng| rng.uniform());
        let general = WageLadderConfig::from_kernels(0.1, 0.5, q.clone(), q, 1.0).unwrap();
        assert!(general.with_analytic_mmc(0.5, 1).is_err());
    }

    #[test]
    fn out_of_range_kernels_surface_as_state_errors() {
        let q = MarkovKernel::new("escape", true, |_x, _rng| 2.0);
        let cfg = WageLadderConfig::from_kernels(0.1, 0.5, q.clone(), q, 1.0).unwrap();
        let kernel = cfg.event_kernel();
        let mut rng = RandomnessStream::new(8, 8);
        assert!(matches!(
            kernel.run(0.5, 50, &mut rng),
            Err(Error::StateOutOfRange { .. })
        ));
    }
}

//! Stability checks for one model: exact order preservation under shared
//! noise, the minorization certificate, order-reversal survival against its
//! theoretical bound, and tightness of the checkpoint laws. A failed check
//! exits with code 5.

use monotone_markov::diagnostics::{mmc_monte_carlo, order_reversal_survival};
use monotone_markov::kernel::monotone_coupling_violation;
use monotone_markov::prob::{tightness_profile, EmpiricalDistribution};
use monotone_markov::{CouplingMode, RandomnessStream};

use crate::model::Model;
use crate::CliError;

const ORDER_TRIALS: u64 = 200;
const ORDER_STEPS: usize = 30;
const MMC_TRIALS: usize = 5_000;
const REVERSAL_REPS: usize = 2_000;
const REVERSAL_STEPS: usize = 20;
const TIGHTNESS_PATHS: usize = 2_000;
/// Mass-outside levels: the 90% and 99% concentration windows.
const TIGHTNESS_LEVELS: [f64; 2] = [0.1, 0.01];

pub fn run(model: &Model, seed: u64) -> Result<(), CliError> {
    let stream = RandomnessStream::new(seed, 0);
    let mut failed: Vec<&'static str> = Vec::new();

    check_order(model, &stream, &mut failed)?;
    if let Model::Wage(_) = model {
        check_minorization(model, &stream, &mut failed)?;
    }
    check_reversal(model, &stream, &mut failed)?;
    if !matches!(model, Model::Flip) {
        check_tightness(model, &stream, &mut failed)?;
    }

    if failed.is_empty() {
        println!("all checks passed");
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!(
            "failed: {}",
            failed.join(", ")
        )))
    }
}

/// Order preservation under shared noise is a sure event for an increasing
/// kernel; one crossing convicts the kernel.
fn check_order(
    model: &Model,
    stream: &RandomnessStream,
    failed: &mut Vec<&'static str>,
) -> Result<(), CliError> {
    let kernel = model.one_step_kernel().map_err(CliError::config)?;
    let (lo, hi) = model.start_range();
    for trial in 0..ORDER_TRIALS {
        let trial_stream = stream.substream(1_000 + trial);
        let mut r = trial_stream.substream(0);
        let a = lo + (hi - lo) * r.uniform();
        let b = lo + (hi - lo) * r.uniform();
        let (x_lo, x_hi) = if a <= b { (a, b) } else { (b, a) };
        let violation = monotone_coupling_violation(
            &kernel,
            (x_lo, x_hi),
            ORDER_STEPS,
            1,
            &trial_stream.substream(1),
        )
        .map_err(CliError::run)?;
        if let Some((step, lo_val, hi_val)) = violation {
            println!(
                "check monotone-coupling: FAIL - starts ({x_lo:.4}, {x_hi:.4}) crossed at step {step}: upper path {hi_val:.4} fell below lower path {lo_val:.4}"
            );
            failed.push("monotone-coupling");
            return Ok(());
        }
    }
    println!(
        "check monotone-coupling: PASS - order held in {ORDER_TRIALS} shared-noise runs of {ORDER_STEPS} steps"
    );
    Ok(())
}

fn check_minorization(
    model: &Model,
    stream: &RandomnessStream,
    failed: &mut Vec<&'static str>,
) -> Result<(), CliError> {
    let Model::Wage(cfg) = model else {
        return Ok(());
    };
    let window_kernel = cfg.continuous_sampler(1.0).map_err(CliError::config)?;
    let pivot = cfg.w_bar() / 2.0;
    let cert = mmc_monte_carlo(
        &window_kernel,
        0.0,
        cfg.w_bar(),
        pivot,
        1,
        MMC_TRIALS,
        &stream.substream(2),
    )
    .map_err(CliError::run)?;
    if cert.certified {
        println!(
            "check minorization: PASS - crossing rates {:.4} (up) x {:.4} (down) certify eps >= {:.4} per unit window at 98% confidence",
            cert.up_estimate, cert.down_estimate, cert.eps_lower
        );
    } else {
        println!(
            "check minorization: FAIL - crossing rates {:.4} x {:.4} do not separate from zero at {} trials",
            cert.up_estimate, cert.down_estimate, cert.trials
        );
        failed.push("minorization");
    }
    if let Ok(constants) = cfg.mmc_constants() {
        println!(
            "  analytic destruction-channel constant: kappa = {:.4} per unit window",
            constants.kappa
        );
    }
    Ok(())
}

fn check_reversal(
    model: &Model,
    stream: &RandomnessStream,
    failed: &mut Vec<&'static str>,
) -> Result<(), CliError> {
    let (bound, why) = match model {
        Model::Wage(cfg) => (
            cfg.destruction_probability() * 0.5,
            "shared destruction events, independent marks",
        ),
        Model::IncomeJump(cfg) => match cfg.reversal_bound_per_event() {
            Some(b) => (b, "shared reset events"),
            None => return Ok(()),
        },
        _ => return Ok(()),
    };
    let kernel = model.one_step_kernel().map_err(CliError::config)?;
    let (lo, hi) = model.start_range();
    let x_lo = lo + 0.2 * (hi - lo);
    let x_hi = lo + 0.8 * (hi - lo);
    let curve = order_reversal_survival(
        &kernel,
        x_lo,
        x_hi,
        CouplingMode::SharedClockIndependentShocks,
        REVERSAL_STEPS,
        REVERSAL_REPS,
        &stream.substream(3),
        Some(bound),
    )
    .map_err(CliError::run)?;
    let bounds = curve.bound.as_ref().expect("overlay was requested");
    let mut worst = f64::NEG_INFINITY;
    for k in 1..=REVERSAL_STEPS {
        worst = worst.max(curve.survival[k] - bounds[k] - 3.0 * curve.stderr(k));
    }
    if worst <= 0.0 {
        println!(
            "check order-reversal: PASS - survival stays under (1 - {bound:.4})^k + 3se across {REVERSAL_STEPS} events ({why})"
        );
    } else {
        println!("check order-reversal: FAIL - survival exceeds the bound by {worst:.4}");
        failed.push("order-reversal");
    }
    Ok(())
}

/// The per-checkpoint concentration windows should stop growing once the
/// law is near stationary; compare the last two checkpoints at each level.
fn check_tightness(
    model: &Model,
    stream: &RandomnessStream,
    failed: &mut Vec<&'static str>,
) -> Result<(), CliError> {
    let sampler = model.sampler().map_err(CliError::config)?;
    let times: Vec<f64> = model
        .default_checkpoints()
        .into_iter()
        .filter(|t| *t > 0.0)
        .collect();
    let x0 = model.default_start();
    let mut family = Vec::with_capacity(times.len());
    for (j, t) in times.iter().enumerate() {
        let sub = stream.substream(4).substream(j as u64);
        let mut draws = Vec::with_capacity(TIGHTNESS_PATHS);
        for i in 0..TIGHTNESS_PATHS {
            let mut r = sub.substream(i as u64);
            draws.push(sampler.sample_at(x0, *t, &mut r).map_err(CliError::run)?);
        }
        family.push(EmpiricalDistribution::from_samples(&draws).map_err(CliError::run)?);
    }

    let mut widths: Vec<Vec<f64>> = Vec::new();
    for law in &family {
        let profile = tightness_profile(std::slice::from_ref(law), &TIGHTNESS_LEVELS)
            .map_err(CliError::run)?;
        widths.push(profile.iter().map(|(_, (a, b))| b - a).collect());
    }
    let pooled = tightness_profile(&family, &TIGHTNESS_LEVELS).map_err(CliError::run)?;

    let mut stable = true;
    let last = widths.len() - 1;
    for (li, _) in TIGHTNESS_LEVELS.iter().enumerate() {
        if widths.len() >= 2 && widths[last][li] > 1.3 * widths[last - 1][li] + 1e-9 {
            stable = false;
        }
    }
    for (li, (eps, (a, b))) in pooled.iter().enumerate() {
        let per_time: Vec<String> = widths.iter().map(|w| format!("{:.3}", w[li])).collect();
        println!(
            "  {:.0}% window: [{a:.4}, {b:.4}] pooled; widths by checkpoint: {}",
            100.0 * (1.0 - eps),
            per_time.join(" -> ")
        );
    }
    if stable {
        println!(
            "check tightness: PASS - concentration windows stabilized over t = {times:?} ({TIGHTNESS_PATHS} paths each)"
        );
    } else {
        println!("check tightness: FAIL - windows still widening at the final checkpoint");
        failed.push("tightness");
    }
    Ok(())
}

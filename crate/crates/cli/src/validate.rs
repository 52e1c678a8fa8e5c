//! Seeded cross-solver equivalence suites.

use enaqt::closed_form::{efficiency_cf, rate_cf};
use enaqt::full::{brute_force_eta_tau, transport_full};
use enaqt::reduced::{self, reduce_density_matrix, ReducedVector};
use enaqt::sampling::{log_uniform, random_density_matrix, SeedableRng, SeededRng};
use enaqt::{Error, NetworkParams};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{load, ValidateConfig};
use crate::format::{emit, json};
use crate::{CliError, Options};

pub const DEFAULT_SEED: u64 = 20_130_901;

#[derive(Debug, Serialize)]
struct Suite {
    name: &'static str,
    draws: usize,
    max_error: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct Summary {
    seed: u64,
    pass: bool,
    suites: Vec<Suite>,
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Worst error over draws; any solver error counts as an infinite error.
fn suite<T: Sync>(name: &'static str, tolerance: f64, draws: &[T], f: impl Fn(&T) -> enaqt::Result<f64> + Sync) -> Suite {
    let max_error = draws
        .par_iter()
        .map(|d| f(d).unwrap_or(f64::INFINITY))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max);
    Suite { name, draws: draws.len(), max_error, tolerance, pass: max_error <= tolerance }
}

fn params(rng: &mut SeededRng, n: usize, rates: (f64, f64), detuning: f64) -> NetworkParams {
    NetworkParams::from_detuning(
        n,
        1.0,
        rng.gen_range(-detuning..=detuning),
        log_uniform(rng, rates.0, rates.1),
        log_uniform(rng, rates.0, rates.1),
        log_uniform(rng, rates.0, rates.1),
    )
}

fn run_suites(seed: u64, cfg: &ValidateConfig) -> Summary {
    let mut rng = SeededRng::seed_from_u64(seed);

    let wide: Vec<(NetworkParams, usize)> = (0..cfg.closed_form_draws)
        .map(|_| {
            let n = rng.gen_range(2..=50);
            let s = rng.gen_range(1..n);
            (params(&mut rng, n, (1e-3, 1e3), 1e3), s)
        })
        .collect();
    let mixed: Vec<_> = (0..cfg.full_draws)
        .map(|_| {
            let n = rng.gen_range(2..=10);
            (params(&mut rng, n, (1e-2, 1e2), 100.0), random_density_matrix(&mut rng, n))
        })
        .collect();
    let gentle: Vec<_> = (0..cfg.brute_force_draws)
        .map(|_| {
            let n = rng.gen_range(2..=6);
            (params(&mut rng, n, (0.2, 5.0), 10.0), random_density_matrix(&mut rng, n))
        })
        .collect();

    let superposition = |&(p, s): &(NetworkParams, usize)| reduced::transport(&p, &ReducedVector::superposition(s));
    let mut suites = vec![
        suite("closed_form_vs_reduced_efficiency", 1e-10, &wide, |d| {
            Ok(rel(efficiency_cf(&d.0, d.1)?, superposition(d)?.efficiency))
        }),
        suite("closed_form_vs_reduced_rate", 1e-10, &wide, |d| {
            Ok(rel(rate_cf(&d.0, d.1)?, superposition(d)?.rate.unwrap_or(f64::NAN)))
        }),
        suite("reduced_conservation", 1e-10, &wide, |d| {
            let r = superposition(d)?;
            Ok((r.efficiency + r.decay_loss.unwrap_or(f64::NAN) - 1.0).abs())
        }),
        suite("full_vs_reduced", 1e-8, &mixed, |(p, rho)| {
            let full = transport_full(p, rho)?;
            let red = reduced::transport(p, &reduce_density_matrix(rho))?;
            let tau = rel(full.transfer_time.unwrap_or(f64::NAN), red.transfer_time.unwrap_or(f64::NAN));
            Ok(rel(full.efficiency, red.efficiency).max(tau))
        }),
        suite("brute_force_vs_resolvent", 1e-6, &gentle, |(p, rho)| {
            let brute = brute_force_eta_tau(p, rho, 1e-10)?;
            let exact = transport_full(p, rho)?;
            let tau = rel(brute.transfer_time.unwrap_or(f64::NAN), exact.transfer_time.unwrap_or(f64::NAN));
            Ok(rel(brute.efficiency, exact.efficiency).max(tau))
        }),
    ];
    // nothing absorbs: every solver must refuse rather than return a number
    let dead = NetworkParams::from_detuning(6, 1.0, 0.5, 0.0, 0.0, 0.3);
    let refusals = [
        efficiency_cf(&dead, 1).err(),
        reduced::transport(&dead, &ReducedVector::superposition(1)).err(),
        transport_full(&dead, &enaqt::model::superposition_projector(6, 1)).err(),
    ];
    let expected = refusals.iter().all(|e| {
        matches!(e, Some(Error::SingularGenerator { .. } | Error::DegenerateDenominator(_) | Error::Invalid(_)))
    });
    suites.push(Suite {
        name: "no_absorption_is_rejected",
        draws: refusals.len(),
        max_error: if expected { 0.0 } else { f64::INFINITY },
        tolerance: 0.0,
        pass: expected,
    });

    let pass = suites.iter().all(|s| s.pass);
    Summary { seed, pass, suites }
}

pub fn run(opts: &Options) -> Result<(), CliError> {
    let cfg: ValidateConfig = match &opts.config {
        Some(path) => load(path)?,
        None => ValidateConfig::default(),
    };
    let seed = opts.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let summary = run_suites(seed, &cfg);
    emit(opts.out.as_deref(), &json(&summary))?;
    if summary.pass {
        Ok(())
    } else {
        let failed: Vec<_> = summary.suites.iter().filter(|s| !s.pass).map(|s| s.name).collect();
        Err(CliError::Validation(failed.join(", ")))
    }
}

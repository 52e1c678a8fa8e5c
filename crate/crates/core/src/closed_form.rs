//! Analytic efficiency and transfer rate for an equal-weight superposition
//! of `s` non-trap sites, their limiting forms, and the optimal trapping and
//! dephasing rates.
//!
//! With `Δ` the detuning,
//!
//! ```text
//! η = 1 / (α₁ + α₂ Δ²/J²)        R = η/τ = 2κ / (β₁ + β₂ Δ²/J²)
//! ```
//!
//! The limiting forms are written out separately rather than obtained by
//! substituting into the general coefficients, so each can be checked
//! against the other.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{InitialCondition, NetworkParams, Source, TransportResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffCoefficients {
    pub alpha1: f64,
    pub alpha2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateCoefficients {
    pub beta1: f64,
    pub beta2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalConditions {
    /// `λ_opt / κ_opt`
    pub c_ratio: f64,
    pub kappa_opt: f64,
    pub lambda_opt: f64,
    pub rate_opt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherentRate {
    /// Rate at the given trapping rate.
    pub rate: f64,
    /// Trapping rate maximizing the coherent rate.
    pub kappa_star: f64,
    pub rate_max: f64,
}

fn check(params: &NetworkParams, s: usize) -> Result<()> {
    let mut v = params.violations();
    v.extend(InitialCondition::SymmetricSuperposition { s }.violations(params.n_sites));
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::Invalid(v))
    }
}

fn dephasing_denominator(params: &NetworkParams, s: usize) -> Result<f64> {
    let d = params.dephasing_rate + 2.0 * s as f64 * params.decay_rate;
    if d > 0.0 {
        Ok(d)
    } else {
        Err(Error::DegenerateDenominator("λ + 2sΓ = 0"))
    }
}

/// General `α₁`, `α₂`.
pub fn alpha_coeffs(params: &NetworkParams, s: usize) -> Result<EffCoefficients> {
    check(params, s)?;
    let d = dephasing_denominator(params, s)?;
    let NetworkParams { coupling: j, trap_rate: k, decay_rate: g, dephasing_rate: l, .. } = *params;
    if k <= 0.0 {
        return Err(Error::DegenerateDenominator("κ = 0"));
    }
    let n = params.n_sites as f64;
    let j2 = j * j;
    let alpha1 = (l * (k + n * g) + 2.0 * (n - 1.0) * g * (k + 2.0 * g)) / (k * d)
        + g * (k + g) * (l + 2.0 * g) * (k + l + 2.0 * g) / (j2 * k * d);
    let alpha2 = g * (k + g) * (l + 2.0 * g) / (k * (k + l + 2.0 * g) * d);
    Ok(EffCoefficients { alpha1, alpha2 })
}

pub fn efficiency_from(coeffs: EffCoefficients, params: &NetworkParams) -> f64 {
    let ratio = params.detuning() / params.coupling;
    1.0 / (coeffs.alpha1 + coeffs.alpha2 * ratio * ratio)
}

pub fn efficiency_cf(params: &NetworkParams, s: usize) -> Result<f64> {
    Ok(efficiency_from(alpha_coeffs(params, s)?, params))
}

/// General `β₁`, `β₂`.
pub fn beta_coeffs(params: &NetworkParams, s: usize) -> Result<RateCoefficients> {
    check(params, s)?;
    let d = dephasing_denominator(params, s)?;
    let NetworkParams { coupling: j, trap_rate: k, decay_rate: g, dephasing_rate: l, .. } = *params;
    let n = params.n_sites as f64;
    let s = s as f64;
    let j2 = j * j;
    let kl = k + l + 2.0 * g;
    let beta1 = (2.0 * (n - s - 1.0) * k * l + n * l * l + 8.0 * (n - 1.0) * g * (l + s * g)) / (d * d)
        + g * ((k + g) * (2.0 * k + 4.0 * l + 8.0 * g) + (l + 2.0 * g) * kl) / (j2 * d)
        + l * (l + 2.0 * g) * (k + g) * kl / (j2 * d * d);
    let beta2 = l * (l + 2.0 * g) * (k + g) / (kl * d * d)
        + 2.0 * g * k * (k + g) / (kl * kl * d)
        + g * (l + 2.0 * g) / (kl * d);
    Ok(RateCoefficients { beta1, beta2 })
}

pub fn rate_from(coeffs: RateCoefficients, params: &NetworkParams) -> f64 {
    let ratio = params.detuning() / params.coupling;
    2.0 * params.trap_rate / (coeffs.beta1 + coeffs.beta2 * ratio * ratio)
}

pub fn rate_cf(params: &NetworkParams, s: usize) -> Result<f64> {
    Ok(rate_from(beta_coeffs(params, s)?, params))
}

/// `τ = η / R`.
pub fn transfer_time_cf(params: &NetworkParams, s: usize) -> Result<f64> {
    Ok(efficiency_cf(params, s)? / rate_cf(params, s)?)
}

/// Efficiency, transfer time and rate from the analytic expressions. The
/// decay loss is the complement of the efficiency.
pub fn transport_cf(params: &NetworkParams, s: usize) -> Result<TransportResult> {
    let eta = efficiency_cf(params, s)?;
    let rate = rate_cf(params, s)?;
    Ok(TransportResult {
        efficiency: eta,
        transfer_time: Some(eta / rate),
        rate: Some(rate),
        decay_loss: Some(1.0 - eta),
        source: Source::ClosedForm,
    })
}

/// `α₁`, `α₂` at `λ = 0`.
pub fn alpha_no_dephasing(params: &NetworkParams, s: usize) -> Result<EffCoefficients> {
    check(params, s)?;
    let NetworkParams { coupling: j, trap_rate: k, decay_rate: g, .. } = *params;
    if k <= 0.0 {
        return Err(Error::DegenerateDenominator("κ = 0"));
    }
    let n = params.n_sites as f64;
    let s = s as f64;
    let r = g / k;
    Ok(EffCoefficients {
        alpha1: (n - 1.0) / s * (1.0 + 2.0 * r) + k * g / (s * j * j) * (1.0 + r) * (1.0 + 2.0 * r),
        alpha2: g / (s * k) * (1.0 + r) / (1.0 + 2.0 * r),
    })
}

/// `α₁`, `α₂` at `Γ = 0`, any `λ > 0`.
pub fn alpha_no_decay() -> EffCoefficients {
    EffCoefficients { alpha1: 1.0, alpha2: 0.0 }
}

/// `η = s/(N−1)`: the `λ = 0` efficiency in the limit `Γ → 0`.
pub fn efficiency_coherent_limit(n_sites: usize, s: usize) -> f64 {
    s as f64 / (n_sites as f64 - 1.0)
}

/// `α₁`, `α₂` for two sites starting on the non-trap site. `n_sites` is
/// ignored.
pub fn alpha_two_site(params: &NetworkParams) -> Result<EffCoefficients> {
    params.check()?;
    let NetworkParams { coupling: j, trap_rate: k, decay_rate: g, dephasing_rate: l, .. } = *params;
    if k <= 0.0 {
        return Err(Error::DegenerateDenominator("κ = 0"));
    }
    Ok(EffCoefficients {
        alpha1: (k + 2.0 * g) / k + g * (k + g) * (k + l + 2.0 * g) / (j * j * k),
        alpha2: g * (k + g) / (k * (k + l + 2.0 * g)),
    })
}

/// `β₁`, `β₂` at `λ = 0`.
pub fn beta_no_dephasing(params: &NetworkParams, s: usize) -> Result<RateCoefficients> {
    check(params, s)?;
    let NetworkParams { coupling: j, trap_rate: k, decay_rate: g, .. } = *params;
    if k <= 0.0 {
        return Err(Error::DegenerateDenominator("κ = 0"));
    }
    let n = params.n_sites as f64;
    let s = s as f64;
    let r = g / k;
    Ok(RateCoefficients {
        beta1: 2.0 * (n - 1.0) / s + k * k / (s * j * j) * (1.0 + 6.0 * r + 6.0 * r * r),
        beta2: (1.0 + 2.0 * r + 2.0 * r * r) / (s * (1.0 + 2.0 * r).powi(2)),
    })
}

/// `β₁`, `β₂` at `Γ = 0`; requires `λ > 0`.
pub fn beta_no_decay(params: &NetworkParams, s: usize) -> Result<RateCoefficients> {
    check(params, s)?;
    let NetworkParams { coupling: j, trap_rate: k, dephasing_rate: l, .. } = *params;
    if l <= 0.0 {
        return Err(Error::DegenerateDenominator("λ = 0"));
    }
    let n = params.n_sites as f64;
    let s = s as f64;
    Ok(RateCoefficients {
        beta1: 2.0 * (n - s - 1.0) * k / l + n + k * (k + l) / (j * j),
        beta2: k / (k + l),
    })
}

/// Rate at `λ = 0` in the limit `Γ → 0`, and its maximum over `κ`.
pub fn coherent_rate(params: &NetworkParams, s: usize) -> CoherentRate {
    let n = params.n_sites as f64;
    let s = s as f64;
    let j2 = params.coupling * params.coupling;
    let delta = params.detuning();
    let k = params.trap_rate;
    let rate = 2.0 * s * k / (2.0 * (n - 1.0) + (delta * delta + k * k) / j2);
    let kappa_star = (2.0 * (n - 1.0) * j2 + delta * delta).sqrt();
    CoherentRate { rate, kappa_star, rate_max: s * j2 / kappa_star }
}

/// `η ≈ 1/(1 + 2Γ/R₀)` with `R₀` the rate at `Γ = 0`. Without dephasing
/// `R₀` is the coherent rate.
pub fn weak_decay_efficiency(params: &NetworkParams, s: usize) -> Result<f64> {
    check(params, s)?;
    let gamma = params.decay_rate;
    if gamma == 0.0 {
        return Ok(1.0);
    }
    let lossless = params.with_decay_rate(0.0);
    let r0 = if params.dephasing_rate > 0.0 {
        rate_cf(&lossless, s)?
    } else {
        coherent_rate(&lossless, s).rate
    };
    if r0 == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (1.0 + 2.0 * gamma / r0))
}

/// Efficiency at the coherent optimum `λ = 0`, `s = N−1`,
/// `κ = √(2(N−1)J² + Δ²)`.
pub fn coherent_efficiency_max(n_sites: usize, coupling: f64, detuning: f64, decay_rate: f64) -> f64 {
    let params = NetworkParams::from_detuning(n_sites, coupling, detuning, 0.0, 0.0, 0.0);
    let rate_max = coherent_rate(&params, n_sites - 1).rate_max;
    1.0 / (1.0 + 2.0 * decay_rate / rate_max)
}

/// Simultaneous stationary point of the lossless single-site rate in
/// `(κ, λ)`.
pub fn enaqt_optimum(n_sites: usize, coupling: f64, detuning: f64) -> OptimalConditions {
    let n = n_sites as f64;
    let j2 = coupling * coupling;
    let d2 = detuning * detuning;
    let c = (2.0 * (n - 2.0) / n).sqrt();
    let kappa_opt = (n * j2 + d2 / ((1.0 + c) * (1.0 + c))).sqrt();
    OptimalConditions {
        c_ratio: c,
        kappa_opt,
        lambda_opt: c * kappa_opt,
        rate_opt: j2 / ((1.0 + c) * (1.0 + c) * n * j2 + d2).sqrt(),
    }
}

/// Residuals of `∂R₀/∂κ = 0` and `∂R₀/∂λ = 0`:
/// `NJ²/κ² − 1 + Δ²/(κ+λ)²` and `2(N−2)J²/λ² − 1 + Δ²/(κ+λ)²`.
pub fn stationarity_residuals(n_sites: usize, coupling: f64, detuning: f64, kappa: f64, lambda: f64) -> (f64, f64) {
    let n = n_sites as f64;
    let j2 = coupling * coupling;
    let tail = detuning * detuning / ((kappa + lambda) * (kappa + lambda));
    (n * j2 / (kappa * kappa) - 1.0 + tail, 2.0 * (n - 2.0) * j2 / (lambda * lambda) - 1.0 + tail)
}

/// Root of the `κ` condition as `λ → 0`.
pub fn kappa_root_small_dephasing(n_sites: usize, coupling: f64, detuning: f64) -> f64 {
    (n_sites as f64 * coupling * coupling + detuning * detuning).sqrt()
}

/// Root of the `λ` condition as `κ → 0`.
pub fn lambda_root_small_trapping(n_sites: usize, coupling: f64, detuning: f64) -> f64 {
    (2.0 * (n_sites as f64 - 2.0) * coupling * coupling + detuning * detuning).sqrt()
}

//! Exact five-variable reduction of the network dynamics.
//!
//! Because every non-trap site is equivalent, the trap population `ρ_NN`,
//! the summed coherence with the trap `A_N = Σ_j ρ_jN = X + iY`, the sum of
//! all density-matrix elements `Σ`, and the trace `T` evolve as a closed
//! linear system `v' = M v`. Efficiency and transfer time follow from
//! resolvent solves against `M`, trajectories from `exp(M t)`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{expm_scaled, RefinedSolver};
use crate::model::{DensityMatrix, InitialCondition, NetworkParams, Source, TransportResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedVector {
    pub rho_nn: f64,
    /// `Re A_N`
    pub x: f64,
    /// `Im A_N`
    pub y: f64,
    /// Sum of all density-matrix elements.
    pub sigma: f64,
    /// Trace of the density matrix.
    pub t: f64,
}

impl ReducedVector {
    pub fn to_array(self) -> [f64; 5] {
        [self.rho_nn, self.x, self.y, self.sigma, self.t]
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Self { rho_nn: v[0], x: v[1], y: v[2], sigma: v[3], t: v[4] }
    }

    /// Reduced vector of the equal-weight superposition of `s` non-trap sites.
    pub fn superposition(s: usize) -> Self {
        Self { rho_nn: 0.0, x: 0.0, y: 0.0, sigma: s as f64, t: 1.0 }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Aggregates `(ρ_NN, Re A_N, Im A_N, Σ_jk ρ_jk, Tr ρ)` of a density matrix,
/// with the last site as the trap.
pub fn reduce_density_matrix(rho: &DensityMatrix) -> ReducedVector {
    let n = rho.nrows();
    let trap = n - 1;
    let a_n = rho.column(trap).sum();
    ReducedVector {
        rho_nn: rho[(trap, trap)].re,
        x: a_n.re,
        y: a_n.im,
        sigma: rho.sum().re,
        t: rho.trace().re,
    }
}

/// Maps a validated initial condition to its reduced vector.
pub fn reduced_initial_vector(init: &InitialCondition, n_sites: usize) -> Result<ReducedVector> {
    let v = init.violations(n_sites);
    if !v.is_empty() {
        return Err(Error::Invalid(v));
    }
    Ok(match init {
        InitialCondition::SymmetricSuperposition { s } => ReducedVector::superposition(*s),
        InitialCondition::DensityMatrix(rho) => reduce_density_matrix(rho),
    })
}

/// The 5×5 generator, rows and columns ordered `(ρ_NN, X, Y, Σ, T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedGenerator {
    pub m: DMatrix<f64>,
}

pub fn build_generator(params: &NetworkParams) -> ReducedGenerator {
    let NetworkParams { coupling: j, trap_energy: eps, trap_rate: kappa, decay_rate: gamma, dephasing_rate: lambda, .. } =
        *params;
    let n = params.n_sites as f64;
    let coh = lambda + 2.0 * gamma + kappa;
    let shift = j * n - eps;
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(5, 5, &[
        -2.0 * (gamma + kappa), 0.0,           2.0 * j,     0.0,                       0.0,
        -(kappa - lambda),      -coh,          shift,       0.0,                       0.0,
        -eps,                   -shift,        -coh,        j,                         0.0,
        0.0,                    -2.0 * kappa,  -2.0 * eps,  -(lambda + 2.0 * gamma),   lambda,
        -2.0 * kappa,           0.0,           0.0,         0.0,                       -2.0 * gamma,
    ]);
    ReducedGenerator { m }
}

impl ReducedGenerator {
    /// Real parts of the eigenvalues.
    pub fn eigenvalue_real_parts(&self) -> Vec<f64> {
        self.m.complex_eigenvalues().iter().map(|z| z.re).collect()
    }
}

/// Efficiency `η = −2κ [M⁻¹v₀]_ρNN` and mean transfer time
/// `τ = (2κ/η) [M⁻²v₀]_ρNN`, plus the decay loss `−2Γ [M⁻¹v₀]_T`.
pub fn transport(params: &NetworkParams, v0: &ReducedVector) -> Result<TransportResult> {
    params.check()?;
    let gen = build_generator(params);
    let solver = RefinedSolver::new(&gen.m)?;
    let kappa = params.trap_rate;
    let w = solver.solve(&v0.to_array());
    let efficiency = -2.0 * kappa * w[0];
    let decay_loss = -2.0 * params.decay_rate * w[4];
    let transfer_time = if kappa > 0.0 && efficiency != 0.0 {
        let u = solver.solve(&w);
        Some(2.0 * kappa / efficiency * u[0])
    } else {
        None
    };
    Ok(TransportResult::new(efficiency, transfer_time, Some(decay_loss), Source::Reduced))
}

fn check_times(times: &[f64]) -> Result<()> {
    if let Some(&t0) = times.first() {
        if !(t0 >= 0.0) {
            return Err(Error::InvalidTimes(format!("first time {t0} is negative")));
        }
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidTimes("times must be finite".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidTimes("times must be ascending".into()));
    }
    Ok(())
}

/// `v(t_k) = exp(M t_k) v₀` for each requested time.
pub fn trajectory(params: &NetworkParams, v0: &ReducedVector, times: &[f64]) -> Result<Vec<ReducedVector>> {
    params.check()?;
    check_times(times)?;
    let m = build_generator(params).m;
    let v = DVector::from_column_slice(&v0.to_array());
    Ok(times
        .iter()
        .map(|&t| {
            if t == 0.0 {
                *v0
            } else {
                ReducedVector::from_slice((expm_scaled(&m, t) * &v).as_slice())
            }
        })
        .collect())
}

/// Reduced state together with the probability absorbed by the trap and
/// lost to decay up to that time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AccumulatedState {
    pub state: ReducedVector,
    pub trapped: f64,
    pub decayed: f64,
}

/// Generator augmented with `trapped' = 2κ ρ_NN` and `decayed' = 2Γ T`.
fn augmented_generator(params: &NetworkParams) -> DMatrix<f64> {
    let m = build_generator(params).m;
    let mut a = DMatrix::zeros(7, 7);
    a.view_mut((0, 0), (5, 5)).copy_from(&m);
    a[(5, 0)] = 2.0 * params.trap_rate;
    a[(6, 4)] = 2.0 * params.decay_rate;
    a
}

pub fn accumulated_trajectory(
    params: &NetworkParams,
    v0: &ReducedVector,
    times: &[f64],
) -> Result<Vec<AccumulatedState>> {
    params.check()?;
    check_times(times)?;
    let a = augmented_generator(params);
    let mut x0 = [0.0; 7];
    x0[..5].copy_from_slice(&v0.to_array());
    let x0 = DVector::from_column_slice(&x0);
    Ok(times
        .iter()
        .map(|&t| {
            let x = if t == 0.0 { x0.clone() } else { expm_scaled(&a, t) * &x0 };
            AccumulatedState {
                state: ReducedVector::from_slice(&x.as_slice()[..5]),
                trapped: x[5],
                decayed: x[6],
            }
        })
        .collect())
}

/// `2κ ∫₀^t_max ρ_NN dt`, from the exponential of the augmented system.
pub fn accumulated_eta(params: &NetworkParams, v0: &ReducedVector, t_max: f64) -> Result<f64> {
    if t_max == 0.0 || params.trap_rate == 0.0 {
        return Ok(0.0);
    }
    let out = accumulated_trajectory(params, v0, &[t_max])?;
    Ok(out[0].trapped)
}

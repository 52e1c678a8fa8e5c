//! Full N-site Lindblad dynamics, with no use of the network symmetry.
//!
//! The density matrix is vectorized column-major over `(j, k)` and split
//! into real and imaginary halves, so the Lindblad generator becomes one
//! real `2N² × 2N²` matrix.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result, Violation};
use crate::linalg::{dopri5, expm_scaled, RefinedSolver, Tolerances};
use crate::model::{Complex64, DensityMatrix, InitialCondition, NetworkParams, Source, TransportResult};
use crate::reduced::{reduce_density_matrix, ReducedVector};

pub const DEFAULT_DIMENSION_CAP: usize = 40;

/// Brute-force integration stops once the remaining trace drops below this.
const TRACE_EXHAUSTED: f64 = 1e-12;
/// Remaining trace tolerated at the integration horizon.
const TRACE_HORIZON: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Superoperator {
    n: usize,
    matrix: DMatrix<f64>,
}

impl Superoperator {
    pub fn n_sites(&self) -> usize {
        self.n
    }

    /// The real `2N² × 2N²` generator.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        let v = DVector::from_vec(vectorize(rho));
        devectorize(self.n, (&self.matrix * v).as_slice())
    }
}

/// Stacks `(Re ρ, Im ρ)`, each column-major over `(j, k)`.
pub fn vectorize(rho: &DensityMatrix) -> Vec<f64> {
    let n2 = rho.len();
    let mut out = vec![0.0; 2 * n2];
    for (p, z) in rho.iter().enumerate() {
        out[p] = z.re;
        out[n2 + p] = z.im;
    }
    out
}

pub fn devectorize(n: usize, v: &[f64]) -> DensityMatrix {
    let n2 = n * n;
    DMatrix::from_fn(n, n, |j, k| {
        let p = j + k * n;
        Complex64::new(v[p], v[n2 + p])
    })
}

/// Combined dephasing, decay and trapping rate `Λ_jk` damping element `ρ_jk`.
pub fn damping_rate(params: &NetworkParams, j: usize, k: usize) -> f64 {
    let trap = params.n_sites - 1;
    let dephasing = if j == k { 0.0 } else { params.dephasing_rate };
    let trapping = (usize::from(j == trap) + usize::from(k == trap)) as f64 * params.trap_rate;
    dephasing + 2.0 * params.decay_rate + trapping
}

pub fn build_superoperator(params: &NetworkParams) -> Result<Superoperator> {
    build_superoperator_capped(params, DEFAULT_DIMENSION_CAP)
}

/// Encodes `ρ̇_jk = −i(ε_j−ε_k)ρ_jk − iJ Σ_ℓ(ρ_ℓk − ρ_jℓ) − Λ_jk ρ_jk`.
pub fn build_superoperator_capped(params: &NetworkParams, cap: usize) -> Result<Superoperator> {
    params.check()?;
    let n = params.n_sites;
    if n > cap {
        return Err(Error::DimensionCap { n, cap });
    }
    let n2 = n * n;
    let j_c = params.coupling;
    let energy = |site: usize| if site == n - 1 { params.trap_energy } else { 0.0 };
    let idx = |j: usize, k: usize| j + k * n;
    let mut m = DMatrix::<f64>::zeros(2 * n2, 2 * n2);

    // −i c ρ_q contributes +c Im ρ_q to Re ρ̇_p and −c Re ρ_q to Im ρ̇_p
    let coherent = |m: &mut DMatrix<f64>, p: usize, q: usize, c: f64| {
        m[(p, n2 + q)] += c;
        m[(n2 + p, q)] -= c;
    };
    for k in 0..n {
        for j in 0..n {
            let p = idx(j, k);
            let de = energy(j) - energy(k);
            if de != 0.0 {
                coherent(&mut m, p, p, de);
            }
            for l in 0..n {
                coherent(&mut m, p, idx(l, k), j_c);
                coherent(&mut m, p, idx(j, l), -j_c);
            }
            let lam = damping_rate(params, j, k);
            m[(p, p)] -= lam;
            m[(n2 + p, n2 + p)] -= lam;
        }
    }
    Ok(Superoperator { n, matrix: m })
}

fn check_rho(rho0: &DensityMatrix, n: usize) -> Result<()> {
    let v = InitialCondition::DensityMatrix(rho0.clone()).violations(n);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::Invalid(v))
    }
}

/// `ρ(t_k)` for each requested time, by propagating with `exp(L Δt)`.
pub fn evolve(params: &NetworkParams, rho0: &DensityMatrix, times: &[f64]) -> Result<Vec<DensityMatrix>> {
    let sup = build_superoperator(params)?;
    check_rho(rho0, params.n_sites)?;
    if times.first().is_some_and(|&t| !(t >= 0.0)) || times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidTimes("times must be non-negative and ascending".into()));
    }
    let mut state = DVector::from_vec(vectorize(rho0));
    let mut now = 0.0;
    let mut cached: Option<(f64, DMatrix<f64>)> = None;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let dt = t - now;
        if dt > 0.0 {
            let reuse = matches!(&cached, Some((h, _)) if (h - dt).abs() <= 1e-14 * dt);
            if !reuse {
                cached = Some((dt, expm_scaled(sup.matrix(), dt)));
            }
            let (_, prop) = cached.as_ref().unwrap();
            state = prop * state;
            now = t;
        }
        out.push(devectorize(params.n_sites, state.as_slice()));
    }
    Ok(out)
}

/// Resolvent efficiency and transfer time of the full generator.
pub fn transport_full(params: &NetworkParams, rho0: &DensityMatrix) -> Result<TransportResult> {
    let sup = build_superoperator(params)?;
    check_rho(rho0, params.n_sites)?;
    let n = params.n_sites;
    let nn = (n - 1) + (n - 1) * n;
    let solver = RefinedSolver::new(sup.matrix())?;
    let kappa = params.trap_rate;
    let w = solver.solve(&vectorize(rho0));
    let efficiency = -2.0 * kappa * w[nn];
    let trace_integral: f64 = (0..n).map(|j| w[j + j * n]).sum();
    let decay_loss = -2.0 * params.decay_rate * trace_integral;
    let transfer_time = if kappa > 0.0 && efficiency != 0.0 {
        let u = solver.solve(&w);
        Some(2.0 * kappa / efficiency * u[nn])
    } else {
        None
    };
    Ok(TransportResult::new(efficiency, transfer_time, Some(decay_loss), Source::Full))
}

/// Right-hand side of the Lindblad equation assembled from the effective
/// Hamiltonian and projector jump operators, independent of
/// [`build_superoperator`].
struct LindbladRhs {
    n: usize,
    h_eff: DensityMatrix,
    dephasing: f64,
}

impl LindbladRhs {
    fn new(params: &NetworkParams) -> Self {
        let n = params.n_sites;
        let trap = n - 1;
        let h_eff = DMatrix::from_fn(n, n, |j, k| {
            if j != k {
                Complex64::new(params.coupling, 0.0)
            } else {
                let eps = if j == trap { params.trap_energy } else { 0.0 };
                let loss = params.decay_rate + if j == trap { params.trap_rate } else { 0.0 };
                Complex64::new(eps, -loss)
            }
        });
        Self { n, h_eff, dephasing: params.dephasing_rate }
    }

    fn eval(&self, rho: &DensityMatrix) -> DensityMatrix {
        let i = Complex64::new(0.0, 1.0);
        let h_rho = &self.h_eff * rho;
        let rho_h = rho * self.h_eff.adjoint();
        let mut out = (h_rho - rho_h) * (-i);
        // Σ_j L_j ρ L_j − ½{L_j², ρ} = diag(ρ) − ρ for projectors L_j = |j⟩⟨j|
        for j in 0..self.n {
            for k in 0..self.n {
                if j != k {
                    out[(j, k)] -= rho[(j, k)] * self.dephasing;
                }
            }
        }
        out
    }
}

/// Efficiency and transfer time by direct time integration of the
/// Lindblad equation with the accumulators `2κ∫ρ_NN dt`, `2κ∫t ρ_NN dt`
/// and `2Γ∫Tr ρ dt`.
pub fn brute_force_eta_tau(params: &NetworkParams, rho0: &DensityMatrix, rel_tol: f64) -> Result<TransportResult> {
    params.check()?;
    check_rho(rho0, params.n_sites)?;
    if !params.has_absorption() {
        return Err(Error::Invalid(vec![Violation::NoAbsorption]));
    }
    let n = params.n_sites;
    let n2 = n * n;
    let trap = n - 1;
    let kappa = params.trap_rate;
    let gamma = params.decay_rate;
    let rhs = LindbladRhs::new(params);

    let slowest = [2.0 * gamma, 2.0 * kappa / n as f64]
        .into_iter()
        .filter(|r| *r > 0.0)
        .fold(f64::INFINITY, f64::min);
    let t_cap = 1e3 / slowest;

    let mut y0 = vectorize(rho0);
    y0.extend([0.0, 0.0, 0.0]);
    let trace_of = |y: &[f64]| (0..n).map(|j| y[j + j * n]).sum::<f64>();

    let out = dopri5(
        |t, y, dy| {
            let rho = devectorize(n, y);
            let d = rhs.eval(&rho);
            for (p, z) in d.iter().enumerate() {
                dy[p] = z.re;
                dy[n2 + p] = z.im;
            }
            let pop = y[trap + trap * n];
            dy[2 * n2] = 2.0 * kappa * pop;
            dy[2 * n2 + 1] = 2.0 * kappa * t * pop;
            dy[2 * n2 + 2] = 2.0 * gamma * trace_of(y);
        },
        0.0,
        &y0,
        t_cap,
        Tolerances { rtol: rel_tol, atol: 1e-13 },
        |_, y| trace_of(y) < TRACE_EXHAUSTED,
    );
    let remaining = trace_of(&out.y);
    if !out.stopped && remaining > TRACE_HORIZON {
        return Err(Error::HorizonExceeded { t_cap, trace: remaining });
    }
    let m0 = out.y[2 * n2];
    let m1 = out.y[2 * n2 + 1];
    let transfer_time = if m0 > 0.0 { Some(m1 / m0) } else { None };
    Ok(TransportResult::new(m0, transfer_time, Some(out.y[2 * n2 + 2]), Source::BruteForce))
}

pub fn reduce_state(rho: &DensityMatrix) -> ReducedVector {
    reduce_density_matrix(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{hermiticity_deviation, superposition_projector};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn localized(n: usize, site: usize) -> DensityMatrix {
        let mut rho = DensityMatrix::zeros(n, n);
        rho[(site, site)] = c(1.0, 0.0);
        rho
    }

    fn mixed_test_state(n: usize) -> DensityMatrix {
        // a fixed full-rank, coherent state
        let psi: Vec<Complex64> = (0..n).map(|j| c(1.0 + j as f64, 0.5 - 0.3 * j as f64)).collect();
        let pure = DMatrix::from_fn(n, n, |j, k| psi[j] * psi[k].conj());
        let mix = pure + DensityMatrix::identity(n, n) * c(2.0, 0.0);
        let tr = mix.trace();
        mix / tr
    }

    #[test]
    fn two_site_coherent_seed() {
        let p = NetworkParams { n_sites: 2, coupling: 0.7, trap_energy: 0.0, trap_rate: 0.0, decay_rate: 0.0, dephasing_rate: 0.0 };
        let sup = build_superoperator(&p).unwrap();
        let d = sup.apply(&localized(2, 0));
        // ρ̇_12 = −iJ(ρ_22 − ρ_11) = iJ
        assert!((d[(0, 1)] - c(0.0, 0.7)).norm() < 1e-15);
        assert!(d[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn damping_rates() {
        let p = NetworkParams::from_detuning(5, 1.0, 0.0, 0.8, 0.1, 0.6);
        assert!((damping_rate(&p, 4, 4) - (0.2 + 1.6)).abs() < 1e-15);
        assert!((damping_rate(&p, 1, 2) - (0.6 + 0.2)).abs() < 1e-15);
        assert!((damping_rate(&p, 2, 2) - 0.2).abs() < 1e-15);
        assert!((damping_rate(&p, 1, 4) - (0.6 + 0.2 + 0.8)).abs() < 1e-15);
    }

    #[test]
    fn dimension_cap() {
        let p = NetworkParams::from_detuning(41, 1.0, 0.0, 1.0, 0.1, 0.1);
        assert!(matches!(build_superoperator(&p), Err(Error::DimensionCap { n: 41, cap: 40 })));
        assert!(build_superoperator_capped(&p.clone(), 41).is_ok());
    }

    #[test]
    fn superoperator_matches_direct_rhs() {
        let p = NetworkParams::from_detuning(5, 1.2, -0.7, 0.9, 0.05, 0.4);
        let rho = mixed_test_state(5);
        let a = build_superoperator(&p).unwrap().apply(&rho);
        let b = LindbladRhs::new(&p).eval(&rho);
        assert!((a - b).iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn preserves_hermiticity_and_trace_channel() {
        let p = NetworkParams::from_detuning(6, 1.0, 2.5, 1.3, 0.2, 0.9);
        let sup = build_superoperator(&p).unwrap();
        let rho = mixed_test_state(6);
        let d = sup.apply(&rho);
        assert!(hermiticity_deviation(&d) < 1e-12);
        let expect = -2.0 * p.decay_rate * rho.trace().re - 2.0 * p.trap_rate * rho[(5, 5)].re;
        assert!((d.trace().re - expect).abs() < 1e-12);
    }

    #[test]
    fn evolve_starts_at_rho0_and_keeps_trace_without_loss() {
        let p = NetworkParams::from_detuning(5, 1.0, 1.0, 0.0, 0.0, 0.7);
        let rho0 = mixed_test_state(5);
        let out = evolve(&p, &rho0, &[0.0, 0.3, 0.6, 0.9, 5.0]).unwrap();
        assert_eq!(out[0], rho0);
        for rho in &out {
            assert!((rho.trace().re - 1.0).abs() < 1e-10);
            assert!(hermiticity_deviation(rho) < 1e-10);
        }
    }

    #[test]
    fn reduce_state_examples() {
        let n = 6;
        let mixed = DensityMatrix::identity(n, n) / c(n as f64, 0.0);
        let v = reduce_state(&mixed);
        let inv = 1.0 / n as f64;
        assert!(v.max_abs_diff(&ReducedVector { rho_nn: inv, x: inv, y: 0.0, sigma: 1.0, t: 1.0 }) < 1e-15);
        let v = reduce_state(&superposition_projector(n, 3));
        assert!(v.max_abs_diff(&ReducedVector::superposition(3)) < 1e-15);
        let v = reduce_state(&localized(n, n - 1));
        assert_eq!(v.to_array(), [1.0, 1.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn no_decay_full_efficiency() {
        let p = NetworkParams::from_detuning(4, 1.0, 1.5, 0.6, 0.0, 0.3);
        let r = transport_full(&p, &localized(4, 0)).unwrap();
        assert!((r.efficiency - 1.0).abs() < 1e-10);
        assert_eq!(r.source, Source::Full);
    }

    #[test]
    fn singular_without_absorption() {
        let p = NetworkParams::from_detuning(4, 1.0, 1.5, 0.0, 0.0, 0.3);
        assert!(matches!(transport_full(&p, &localized(4, 0)), Err(Error::SingularGenerator { .. })));
        assert!(brute_force_eta_tau(&p, &localized(4, 0), 1e-10).is_err());
    }

    #[test]
    fn brute_force_zero_trap_rate() {
        let p = NetworkParams::from_detuning(3, 1.0, 0.5, 0.0, 0.5, 0.2);
        let r = brute_force_eta_tau(&p, &localized(3, 0), 1e-10).unwrap();
        assert_eq!(r.efficiency, 0.0);
        assert_eq!(r.transfer_time, None);
        assert!((r.decay_loss.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn brute_force_matches_resolvent() {
        let p = NetworkParams::from_detuning(4, 1.0, 0.8, 1.1, 0.05, 0.7);
        let rho0 = mixed_test_state(4);
        let a = transport_full(&p, &rho0).unwrap();
        let b = brute_force_eta_tau(&p, &rho0, 1e-10).unwrap();
        assert!(((a.efficiency - b.efficiency) / a.efficiency).abs() < 1e-6);
        let (ta, tb) = (a.transfer_time.unwrap(), b.transfer_time.unwrap());
        assert!(((ta - tb) / ta).abs() < 1e-6);
    }
}

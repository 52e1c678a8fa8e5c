//! Physical parameters and initial conditions of a fully connected network
//! with one trapping site.
//!
//! Sites are numbered `0..n` internally; the trapping site is the last one,
//! `n - 1`. All energies and rates share one unit (ħ = 1), conventionally
//! the coupling `J`.

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

pub type Complex64 = Complex<f64>;
pub type DensityMatrix = DMatrix<Complex64>;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const EIGEN_TOL: f64 = -1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    pub n_sites: usize,
    /// Uniform site-to-site coupling `J`.
    pub coupling: f64,
    /// Energy `ε_N` of the trapping site; all other sites sit at zero.
    pub trap_energy: f64,
    /// Trapping rate `κ`.
    pub trap_rate: f64,
    /// Excitation decay rate `Γ`, identical on every site.
    pub decay_rate: f64,
    /// Pure-dephasing rate `λ`, identical on every site.
    pub dephasing_rate: f64,
}

impl NetworkParams {
    /// Parameters with the trap energy fixed by a detuning
    /// `Δ = ε_N − J(N−2)` instead of directly.
    pub fn from_detuning(
        n_sites: usize,
        coupling: f64,
        detuning: f64,
        trap_rate: f64,
        decay_rate: f64,
        dephasing_rate: f64,
    ) -> Self {
        Self {
            n_sites,
            coupling,
            trap_energy: detuning + coupling * (n_sites as f64 - 2.0),
            trap_rate,
            decay_rate,
            dephasing_rate,
        }
    }

    /// `Δ = ε_N − J(N−2)`: mismatch between the trap level and the
    /// symmetric manifold of the other sites.
    pub fn detuning(&self) -> f64 {
        self.trap_energy - self.coupling * (self.n_sites as f64 - 2.0)
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.trap_energy = detuning + self.coupling * (self.n_sites as f64 - 2.0);
        self
    }

    pub fn with_trap_rate(mut self, kappa: f64) -> Self {
        self.trap_rate = kappa;
        self
    }

    pub fn with_decay_rate(mut self, gamma: f64) -> Self {
        self.decay_rate = gamma;
        self
    }

    pub fn with_dephasing_rate(mut self, lambda: f64) -> Self {
        self.dephasing_rate = lambda;
        self
    }

    /// Structural invariants only. The κ = Γ = 0 case is left to the
    /// solvers, which report it as a singular generator.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.n_sites < 2 {
            out.push(Violation::TooFewSites(self.n_sites));
        }
        let named = [
            ("J", self.coupling),
            ("ε_N", self.trap_energy),
            ("κ", self.trap_rate),
            ("Γ", self.decay_rate),
            ("λ", self.dephasing_rate),
        ];
        for (name, value) in named {
            if !value.is_finite() {
                out.push(Violation::NonFinite(name));
            }
        }
        if self.coupling.is_finite() && self.coupling <= 0.0 {
            out.push(Violation::NonPositiveCoupling(self.coupling));
        }
        for (name, value) in &named[2..] {
            if *value < 0.0 {
                out.push(Violation::NegativeRate { name, value: *value });
            }
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(v))
        }
    }

    pub fn has_absorption(&self) -> bool {
        self.trap_rate > 0.0 || self.decay_rate > 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// Equal-weight pure superposition of the first `s` non-trap sites.
    SymmetricSuperposition { s: usize },
    DensityMatrix(DensityMatrix),
}

impl InitialCondition {
    pub fn violations(&self, n_sites: usize) -> Vec<Violation> {
        match self {
            InitialCondition::SymmetricSuperposition { s } => {
                if *s >= 1 && *s < n_sites {
                    vec![]
                } else {
                    vec![Violation::SuperpositionSize { s: *s, n: n_sites }]
                }
            }
            InitialCondition::DensityMatrix(rho) => density_matrix_violations(rho, n_sites),
        }
    }

    /// The density matrix this condition describes.
    pub fn to_density_matrix(&self, n_sites: usize) -> DensityMatrix {
        match self {
            InitialCondition::SymmetricSuperposition { s } => superposition_projector(n_sites, *s),
            InitialCondition::DensityMatrix(rho) => rho.clone(),
        }
    }
}

/// `|ψ⟩⟨ψ|` with `|ψ⟩ = (|1⟩ + … + |s⟩)/√s`.
pub fn superposition_projector(n_sites: usize, s: usize) -> DensityMatrix {
    let w = Complex64::new(1.0 / s as f64, 0.0);
    DMatrix::from_fn(n_sites, n_sites, |j, k| {
        if j < s && k < s {
            w
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn density_matrix_violations(rho: &DensityMatrix, n_sites: usize) -> Vec<Violation> {
    if rho.nrows() != n_sites || rho.ncols() != n_sites {
        return vec![Violation::DimensionMismatch {
            expected: n_sites,
            found: rho.nrows().max(rho.ncols()),
        }];
    }
    let mut out = Vec::new();
    if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        out.push(Violation::NonFinite("ρ₀"));
        return out;
    }
    let dev = hermiticity_deviation(rho);
    if dev > HERMITIAN_TOL {
        out.push(Violation::NotHermitian(dev));
        return out;
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        out.push(Violation::TraceNotUnit(tr.re));
    }
    let min_ev = min_eigenvalue(rho);
    if min_ev < EIGEN_TOL {
        out.push(Violation::NegativeEigenvalue(min_ev));
    }
    out
}

pub fn hermiticity_deviation(rho: &DensityMatrix) -> f64 {
    let n = rho.nrows();
    let mut dev = 0.0_f64;
    for j in 0..n {
        for k in j..n {
            dev = dev.max((rho[(j, k)] - rho[(k, j)].conj()).norm());
        }
    }
    dev
}

/// Smallest eigenvalue of the Hermitian part of `rho`.
pub fn min_eigenvalue(rho: &DensityMatrix) -> f64 {
    let herm = (rho + rho.adjoint()).scale(0.5);
    herm.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Every violated invariant of `params` and `init`, plus the no-absorption
/// case in which no probability ever leaves the excited manifold.
pub fn validate(params: &NetworkParams, init: &InitialCondition) -> Vec<Violation> {
    let mut out = params.violations();
    if params.n_sites >= 1 {
        out.extend(init.violations(params.n_sites));
    }
    if !params.has_absorption() {
        out.push(Violation::NoAbsorption);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Full,
    Reduced,
    ClosedForm,
    BruteForce,
}

/// Long-time transport figures of merit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransportResult {
    /// Total probability absorbed by the trap.
    pub efficiency: f64,
    /// Mean trapping time; `None` when nothing is ever trapped.
    pub transfer_time: Option<f64>,
    /// `efficiency / transfer_time`.
    pub rate: Option<f64>,
    /// Probability lost to excitation decay.
    pub decay_loss: Option<f64>,
    pub source: Source,
}

impl TransportResult {
    pub(crate) fn new(efficiency: f64, transfer_time: Option<f64>, decay_loss: Option<f64>, source: Source) -> Self {
        let transfer_time = transfer_time.filter(|t| t.is_finite());
        Self {
            efficiency,
            transfer_time,
            rate: transfer_time.map(|t| efficiency / t),
            decay_loss,
            source,
        }
    }
}

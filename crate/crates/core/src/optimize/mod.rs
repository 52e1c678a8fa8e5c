//! Parameter sweeps and multistart searches over the trapping/dephasing
//! rate plane.

mod nelder_mead;
mod search;
mod sweep;

use serde::{Deserialize, Serialize};

use crate::closed_form::transport_cf;
use crate::error::{Error, Result};
use crate::full::{brute_force_eta_tau, transport_full};
use crate::model::{superposition_projector, InitialCondition, NetworkParams, TransportResult};
use crate::reduced::{self, ReducedVector};

pub use nelder_mead::{minimize, Bounds, NelderMeadOptions, NelderMeadResult};
pub use search::{
    maximize, maximize_with_seeds, seed_grid, verify_optimum, AnalyticComparison, Domain, MaximizeOptions,
    OptimumReport, VerifyReport,
};
pub use sweep::{sweep, Axis, AxisParam, Spacing, SweepRow, SweepSpec, SweepTable};

/// Relative tolerance of the brute-force integrator when it backs a sweep.
pub const BRUTE_FORCE_RTOL: f64 = 1e-10;

/// Route used to evaluate transport at a parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    #[default]
    ClosedForm,
    Reduced,
    Full,
    #[serde(alias = "brute")]
    BruteForce,
}

impl Solver {
    /// Transport for the equal-weight superposition of `s` non-trap sites.
    pub fn transport(self, params: &NetworkParams, s: usize) -> Result<TransportResult> {
        match self {
            Solver::ClosedForm => transport_cf(params, s),
            Solver::Reduced => {
                check_inputs(params, s)?;
                reduced::transport(params, &ReducedVector::superposition(s))
            }
            Solver::Full => {
                check_inputs(params, s)?;
                transport_full(params, &superposition_projector(params.n_sites, s))
            }
            Solver::BruteForce => {
                check_inputs(params, s)?;
                brute_force_eta_tau(params, &superposition_projector(params.n_sites, s), BRUTE_FORCE_RTOL)
            }
        }
    }
}

fn check_inputs(params: &NetworkParams, s: usize) -> Result<()> {
    let mut violations = params.violations();
    violations.extend(InitialCondition::SymmetricSuperposition { s }.violations(params.n_sites));
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Invalid(violations))
    }
}

/// Figure of merit targeted by a search. Transfer time is minimized; the
/// others are maximized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    #[default]
    Efficiency,
    Rate,
    TransferTime,
}

impl Objective {
    pub fn value(self, result: &TransportResult) -> Option<f64> {
        let v = match self {
            Objective::Efficiency => Some(result.efficiency),
            Objective::Rate => result.rate,
            Objective::TransferTime => result.transfer_time,
        };
        v.filter(|x| x.is_finite())
    }

    /// Larger is better.
    pub(crate) fn score(self, value: f64) -> f64 {
        match self {
            Objective::TransferTime => -value,
            _ => value,
        }
    }
}

use std::fmt;

use thiserror::Error;

/// A single violated parameter or initial-condition invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    TooFewSites(usize),
    NonPositiveCoupling(f64),
    NegativeRate { name: &'static str, value: f64 },
    NonFinite(&'static str),
    SuperpositionSize { s: usize, n: usize },
    DimensionMismatch { expected: usize, found: usize },
    NotHermitian(f64),
    TraceNotUnit(f64),
    NegativeEigenvalue(f64),
    NoAbsorption,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewSites(n) => write!(f, "N must be at least 2 (got {n})"),
            Violation::NonPositiveCoupling(j) => write!(f, "J must be positive (got {j})"),
            Violation::NegativeRate { name, value } => {
                write!(f, "{name} must be non-negative (got {value})")
            }
            Violation::NonFinite(name) => write!(f, "{name} must be finite"),
            Violation::SuperpositionSize { s, n } => {
                write!(f, "s must satisfy 1 ≤ s ≤ N−1 (got s={s}, N={n})")
            }
            Violation::DimensionMismatch { expected, found } => write!(
                f,
                "density matrix must be {expected}×{expected} (got {found}×{found})"
            ),
            Violation::NotHermitian(dev) => {
                write!(f, "density matrix is not Hermitian (max deviation {dev:e})")
            }
            Violation::TraceNotUnit(tr) => write!(f, "density matrix trace must be 1 (got {tr})"),
            Violation::NegativeEigenvalue(ev) => {
                write!(f, "density matrix has a negative eigenvalue ({ev:e})")
            }
            Violation::NoAbsorption => {
                write!(f, "no absorption: η undefined (κ = Γ = 0)")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("generator is singular (reciprocal condition {rcond:e})")]
    SingularGenerator { rcond: f64 },
    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(&'static str),
    #[error("N = {n} exceeds the full-superoperator cap of {cap}")]
    DimensionCap { n: usize, cap: usize },
    #[error("integration horizon {t_cap:e} reached with trace {trace:e} remaining")]
    HorizonExceeded { t_cap: f64, trace: f64 },
    #[error("optimizer did not converge after {iterations} iterations")]
    NonConvergent { iterations: usize },
    #[error("invalid time grid: {0}")]
    InvalidTimes(String),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

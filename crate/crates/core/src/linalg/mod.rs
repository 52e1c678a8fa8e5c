//! Dense numerical kernels shared by the reduced and full solvers.

pub mod expm;
pub mod lu;
pub mod ode;

pub use expm::{expm, expm_scaled};
pub use lu::{Lu, RefinedSolver, SINGULAR_RCOND};
pub use ode::{dopri5, Tolerances};

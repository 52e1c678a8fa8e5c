//! Transport of a single excitation on the fully connected network with a
//! trapping site, uniform excitation decay, and pure dephasing.
//!
//! Four independent routes compute the same figures of merit:
//!
//! * [`full`]: the complete `N`-site Lindblad generator, solved by dense LU
//!   or integrated in time.
//! * [`reduced`]: the exact five-variable reduction of the same dynamics.
//! * [`closed_form`]: analytic efficiency, rate, limits, and optimal
//!   trapping/dephasing rates.
//! * [`optimize`]: sweeps and Nelder–Mead searches over the rate plane.

pub mod closed_form;
pub mod error;
pub mod full;
pub mod linalg;
pub mod model;
pub mod optimize;
pub mod reduced;
pub mod sampling;

pub use error::{Error, Result, Violation};
pub use model::{DensityMatrix, InitialCondition, NetworkParams, Source, TransportResult};
pub use reduced::ReducedVector;

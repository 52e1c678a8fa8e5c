//! Seeded random parameter and density-matrix draws for the cross-checks.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::model::{Complex64, DensityMatrix, NetworkParams};

pub use rand_chacha::ChaCha8Rng as SeededRng;
pub use rand::SeedableRng;

pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..=hi.ln())).exp()
}

/// Ranges for one random network draw, in units of `J = 1`.
#[derive(Debug, Clone, Copy)]
pub struct ParamRanges {
    pub n_sites: (usize, usize),
    /// Log-uniform bounds shared by κ, Γ and λ.
    pub rates: (f64, f64),
    /// Uniform bounds on the detuning.
    pub detuning: (f64, f64),
}

impl ParamRanges {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> NetworkParams {
        let n = rng.gen_range(self.n_sites.0..=self.n_sites.1);
        let (lo, hi) = self.rates;
        let kappa = log_uniform(rng, lo, hi);
        let gamma = log_uniform(rng, lo, hi);
        let lambda = log_uniform(rng, lo, hi);
        let delta = rng.gen_range(self.detuning.0..=self.detuning.1);
        NetworkParams::from_detuning(n, 1.0, delta, kappa, gamma, lambda)
    }
}

/// `G G† / Tr(G G†)` for a complex Gaussian `G`: full rank, generic
/// coherences.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DensityMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    let mut rho = rho / tr;
    // exact Hermitian symmetry and real diagonal
    for j in 0..n {
        rho[(j, j)].im = 0.0;
        for k in 0..j {
            rho[(j, k)] = rho[(k, j)].conj();
        }
    }
    rho
}

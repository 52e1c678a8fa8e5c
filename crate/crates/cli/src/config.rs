//! JSON run configurations. Unknown keys are rejected.

use std::path::Path;

use enaqt::model::Complex64;
use enaqt::optimize::{Axis, Domain, Objective, Solver};
use enaqt::{DensityMatrix, InitialCondition, NetworkParams};
use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::CliError;

fn one() -> f64 {
    1.0
}

fn default_s() -> usize {
    1
}

/// Network parameters. Exactly one of `detuning` and `trap_energy` may be
/// given; with neither the detuning is zero.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub n_sites: usize,
    #[serde(default = "one")]
    pub coupling: f64,
    pub detuning: Option<f64>,
    pub trap_energy: Option<f64>,
    #[serde(default)]
    pub trap_rate: f64,
    #[serde(default)]
    pub decay_rate: f64,
    #[serde(default)]
    pub dephasing_rate: f64,
}

impl NetworkConfig {
    pub fn params(&self) -> Result<NetworkParams, CliError> {
        let base = NetworkParams {
            n_sites: self.n_sites,
            coupling: self.coupling,
            trap_energy: 0.0,
            trap_rate: self.trap_rate,
            decay_rate: self.decay_rate,
            dephasing_rate: self.dephasing_rate,
        };
        let params = match (self.detuning, self.trap_energy) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("give either detuning or trap_energy, not both".into()))
            }
            (None, Some(e)) => NetworkParams { trap_energy: e, ..base },
            (d, None) => base.with_detuning(d.unwrap_or(0.0)),
        };
        let v = params.violations();
        if v.is_empty() {
            Ok(params)
        } else {
            Err(CliError::Config(enaqt::Error::Invalid(v).to_string()))
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub network: NetworkConfig,
    #[serde(default = "default_s")]
    pub s: usize,
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub objective: Objective,
    pub solver: Option<Solver>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum DomainConfig {
    Square(f64),
    Box(Domain),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    pub network: NetworkConfig,
    #[serde(default = "default_s")]
    pub s: usize,
    #[serde(default)]
    pub objective: Objective,
    /// Search box; defaults to `[0, 100 J]²`.
    pub domain: Option<DomainConfig>,
    pub solver: Option<Solver>,
    /// Also compare the lossless single-site rate optimum with the analytic one.
    #[serde(default)]
    pub verify: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateConfig {
    pub seed: Option<u64>,
    #[serde(default = "defaults::closed_form_draws")]
    pub closed_form_draws: usize,
    #[serde(default = "defaults::full_draws")]
    pub full_draws: usize,
    #[serde(default = "defaults::brute_force_draws")]
    pub brute_force_draws: usize,
}

mod defaults {
    pub fn closed_form_draws() -> usize {
        500
    }
    pub fn full_draws() -> usize {
        60
    }
    pub fn brute_force_draws() -> usize {
        8
    }
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self {
            seed: None,
            closed_form_draws: defaults::closed_form_draws(),
            full_draws: defaults::full_draws(),
            brute_force_draws: defaults::brute_force_draws(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixConfig {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConfig {
    /// Equal-weight superposition of the first `s` non-trap sites.
    Superposition(usize),
    DensityMatrix(MatrixConfig),
}

impl InitialConfig {
    pub fn condition(&self, n: usize) -> Result<InitialCondition, CliError> {
        let init = match self {
            InitialConfig::Superposition(s) => InitialCondition::SymmetricSuperposition { s: *s },
            InitialConfig::DensityMatrix(m) => InitialCondition::DensityMatrix(m.matrix(n)?),
        };
        let v = init.violations(n);
        if v.is_empty() {
            Ok(init)
        } else {
            Err(CliError::Config(enaqt::Error::Invalid(v).to_string()))
        }
    }
}

impl MatrixConfig {
    fn matrix(&self, n: usize) -> Result<DensityMatrix, CliError> {
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !shape_ok(&self.re) || self.im.as_ref().is_some_and(|im| !shape_ok(im)) {
            return Err(CliError::Config(format!("density_matrix must be {n}×{n}")));
        }
        Ok(DMatrix::from_fn(n, n, |j, k| {
            let im = self.im.as_ref().map_or(0.0, |m| m[j][k]);
            Complex64::new(self.re[j][k], im)
        }))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TimesConfig {
    List(Vec<f64>),
    Grid(TimeGrid),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    #[serde(default)]
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl TimesConfig {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        let v = match self {
            TimesConfig::List(v) => v.clone(),
            TimesConfig::Grid(g) => {
                if g.count < 2 || !(g.stop > g.start) {
                    return Err(CliError::Config("time grid needs stop > start and count ≥ 2".into()));
                }
                let h = (g.stop - g.start) / (g.count - 1) as f64;
                (0..g.count)
                    .map(|i| if i + 1 == g.count { g.stop } else { g.start + i as f64 * h })
                    .collect()
            }
        };
        if v.is_empty() {
            return Err(CliError::Config("at least one time is required".into()));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub network: NetworkConfig,
    pub initial: InitialConfig,
    pub times: TimesConfig,
    /// Add the trap population from the full superoperator.
    #[serde(default)]
    pub full: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitsConfig {
    pub network: NetworkConfig,
    #[serde(default = "default_s")]
    pub s: usize,
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

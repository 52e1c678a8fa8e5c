use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Objective, Solver};
use crate::error::{Error, Result, Violation};
use crate::model::{InitialCondition, NetworkParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisParam {
    Kappa,
    Lambda,
    Gamma,
    /// Detuning; the trap energy follows so that `ε_N − J(N−2)` hits the value.
    Delta,
    Coupling,
    TrapEnergy,
}

impl AxisParam {
    pub fn name(self) -> &'static str {
        match self {
            AxisParam::Kappa => "kappa",
            AxisParam::Lambda => "lambda",
            AxisParam::Gamma => "gamma",
            AxisParam::Delta => "delta",
            AxisParam::Coupling => "coupling",
            AxisParam::TrapEnergy => "trap_energy",
        }
    }

    fn apply(self, params: NetworkParams, value: f64) -> NetworkParams {
        match self {
            AxisParam::Kappa => params.with_trap_rate(value),
            AxisParam::Lambda => params.with_dephasing_rate(value),
            AxisParam::Gamma => params.with_decay_rate(value),
            AxisParam::Delta => params.with_detuning(value),
            AxisParam::Coupling => NetworkParams { coupling: value, ..params },
            AxisParam::TrapEnergy => NetworkParams { trap_energy: value, ..params },
        }
    }

    fn is_rate(self) -> bool {
        matches!(self, AxisParam::Kappa | AxisParam::Lambda | AxisParam::Gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: AxisParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Axis {
    pub fn new(param: AxisParam, min: f64, max: f64, count: usize, spacing: Spacing) -> Self {
        Self { param, min, max, count, spacing }
    }

    /// A one-point axis pinned at `value`.
    pub fn point(param: AxisParam, value: f64) -> Self {
        Self::new(param, value, value, 1, Spacing::Linear)
    }

    fn check(&self) -> Result<()> {
        let name = self.param.name();
        let bad = |msg: String| Err(Error::InvalidSweep(format!("axis {name}: {msg}")));
        if !(self.min.is_finite() && self.max.is_finite()) {
            return bad("bounds must be finite".into());
        }
        match self.count {
            0 => return bad("count must be at least 1".into()),
            1 if self.min != self.max => return bad("a single-point axis needs min = max".into()),
            1 => {}
            _ if self.min >= self.max => return bad(format!("min {} must be below max {}", self.min, self.max)),
            _ => {}
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return bad("log spacing needs a positive minimum".into());
        }
        if self.param.is_rate() && self.min < 0.0 {
            return bad("rates must be non-negative".into());
        }
        if self.param == AxisParam::Coupling && self.min <= 0.0 {
            return bad("coupling must be positive".into());
        }
        Ok(())
    }

    /// Grid values; endpoints are exact.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == self.count - 1 {
                    return self.max;
                }
                let u = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + u * (self.max - self.min),
                    Spacing::Log => (self.min.ln() + u * (self.max / self.min).ln()).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub template: NetworkParams,
    /// Number of non-trap sites in the initial superposition.
    pub s: usize,
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub objective: Objective,
    #[serde(default)]
    pub solver: Solver,
}

impl SweepSpec {
    pub fn check(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::InvalidSweep(format!("expected 1 or 2 axes, got {}", self.axes.len())));
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(Error::InvalidSweep(format!("axis {} repeated", self.axes[0].param.name())));
        }
        for axis in &self.axes {
            axis.check()?;
        }
        let mut v = self.template.violations();
        v.extend(InitialCondition::SymmetricSuperposition { s: self.s }.violations(self.template.n_sites));
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(v))
        }
    }

    /// Parameters at grid coordinates given in axis order. Coupling is set
    /// before detuning so the detuning is relative to the cell's coupling.
    pub fn params_at(&self, coords: &[f64]) -> NetworkParams {
        let mut order: Vec<usize> = (0..self.axes.len()).collect();
        order.sort_by_key(|&i| self.axes[i].param != AxisParam::Coupling);
        order
            .into_iter()
            .fold(self.template, |p, i| self.axes[i].param.apply(p, coords[i]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub coords: Vec<f64>,
    /// NaN when missing.
    pub efficiency: f64,
    /// NaN when missing or undefined.
    pub transfer_time: f64,
    /// NaN when missing or undefined.
    pub rate: f64,
    /// Some figure of merit is unavailable here: the point is degenerate
    /// for the solver, or nothing is trapped so τ and R are undefined.
    pub missing: bool,
}

impl SweepRow {
    pub fn objective(&self, objective: Objective) -> f64 {
        match objective {
            Objective::Efficiency => self.efficiency,
            Objective::Rate => self.rate,
            Objective::TransferTime => self.transfer_time,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub axis_names: Vec<&'static str>,
    pub objective: Objective,
    /// Row-major over the axes: the last axis varies fastest.
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Best non-missing row for the table's objective; first wins on ties.
    pub fn best(&self) -> Option<&SweepRow> {
        let obj = self.objective;
        self.rows
            .iter()
            .filter(|r| r.objective(obj).is_finite())
            .fold(None, |acc: Option<&SweepRow>, r| match acc {
                Some(b) if obj.score(b.objective(obj)) >= obj.score(r.objective(obj)) => Some(b),
                _ => Some(r),
            })
    }
}

fn is_missing_point(err: &Error) -> bool {
    match err {
        Error::DegenerateDenominator(_) | Error::SingularGenerator { .. } => true,
        Error::Invalid(v) => v.iter().all(|x| *x == Violation::NoAbsorption),
        _ => false,
    }
}

/// Evaluates every grid cell. Degenerate cells become missing rows; any
/// other solver error aborts the sweep.
pub fn sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.check()?;
    let grids: Vec<Vec<f64>> = spec.axes.iter().map(Axis::values).collect();
    let inner = grids.get(1).map_or(1, Vec::len);
    let total = grids[0].len() * inner;

    let rows = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut coords = vec![grids[0][idx / inner]];
            if let Some(g) = grids.get(1) {
                coords.push(g[idx % inner]);
            }
            let params = spec.params_at(&coords);
            match spec.solver.transport(&params, spec.s) {
                Ok(r) => Ok(SweepRow {
                    coords,
                    efficiency: r.efficiency,
                    transfer_time: r.transfer_time.unwrap_or(f64::NAN),
                    rate: r.rate.unwrap_or(f64::NAN),
                    missing: r.transfer_time.is_none() || r.rate.is_none(),
                }),
                Err(e) if is_missing_point(&e) => Ok(SweepRow {
                    coords,
                    efficiency: f64::NAN,
                    transfer_time: f64::NAN,
                    rate: f64::NAN,
                    missing: true,
                }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SweepTable {
        axis_names: spec.axes.iter().map(|a| a.param.name()).collect(),
        objective: spec.objective,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::transport_cf;

    fn fig2a() -> NetworkParams {
        NetworkParams::from_detuning(20, 1.0, 100.0, 44.0, 0.01, 56.0)
    }

    fn spec(axes: Vec<Axis>) -> SweepSpec {
        SweepSpec { template: fig2a(), s: 1, axes, objective: Objective::Efficiency, solver: Solver::ClosedForm }
    }

    #[test]
    fn axis_values() {
        let lin = Axis::new(AxisParam::Kappa, 0.0, 1.0, 5, Spacing::Linear).values();
        assert_eq!(lin, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let log = Axis::new(AxisParam::Kappa, 0.1, 100.0, 4, Spacing::Log).values();
        for (a, b) in log.iter().zip([0.1, 1.0, 10.0, 100.0]) {
            assert!((a - b).abs() < 1e-12 * b);
        }
        assert_eq!(log[3], 100.0);
    }

    #[test]
    fn invalid_specs() {
        let bad = [
            vec![],
            vec![Axis::point(AxisParam::Kappa, 1.0); 3],
            vec![Axis::new(AxisParam::Kappa, 2.0, 1.0, 3, Spacing::Linear)],
            vec![Axis::new(AxisParam::Kappa, 1.0, 2.0, 1, Spacing::Linear)],
            vec![Axis::new(AxisParam::Kappa, 0.0, 2.0, 3, Spacing::Log)],
            vec![Axis::new(AxisParam::Gamma, -1.0, 2.0, 3, Spacing::Linear)],
            vec![Axis::point(AxisParam::Kappa, 1.0), Axis::point(AxisParam::Kappa, 2.0)],
        ];
        for axes in bad {
            assert!(matches!(sweep(&spec(axes.clone())), Err(Error::InvalidSweep(_))), "{axes:?}");
        }
        let s = SweepSpec { s: 20, ..spec(vec![Axis::point(AxisParam::Kappa, 1.0)]) };
        assert!(matches!(sweep(&s), Err(Error::Invalid(_))));
    }

    #[test]
    fn single_point_matches_direct_call() {
        let t = sweep(&spec(vec![Axis::point(AxisParam::Lambda, 56.0)])).unwrap();
        assert_eq!(t.rows.len(), 1);
        let direct = transport_cf(&fig2a(), 1).unwrap();
        assert_eq!(t.rows[0].efficiency, direct.efficiency);
        assert_eq!(t.rows[0].rate, direct.rate.unwrap());
    }

    #[test]
    fn row_major_order() {
        let t = sweep(&spec(vec![
            Axis::new(AxisParam::Lambda, 1.0, 3.0, 3, Spacing::Linear),
            Axis::new(AxisParam::Kappa, 10.0, 20.0, 2, Spacing::Linear),
        ]))
        .unwrap();
        let coords: Vec<_> = t.rows.iter().map(|r| (r.coords[0], r.coords[1])).collect();
        assert_eq!(coords, vec![(1.0, 10.0), (1.0, 20.0), (2.0, 10.0), (2.0, 20.0), (3.0, 10.0), (3.0, 20.0)]);
        let direct = transport_cf(&fig2a().with_dephasing_rate(2.0).with_trap_rate(20.0), 1).unwrap();
        assert_eq!(t.rows[3].efficiency, direct.efficiency);
        assert_eq!(t.axis_names, vec!["lambda", "kappa"]);
    }

    #[test]
    fn degenerate_cells_are_missing() {
        let s = SweepSpec {
            template: fig2a().with_decay_rate(0.0),
            ..spec(vec![Axis::new(AxisParam::Lambda, 0.0, 1.0, 2, Spacing::Linear)])
        };
        let t = sweep(&s).unwrap();
        assert!(t.rows[0].missing && t.rows[0].efficiency.is_nan());
        assert!(!t.rows[1].missing);
        assert_eq!(t.best().unwrap().coords, vec![1.0]);
    }

    #[test]
    fn reduced_solver_agrees() {
        let axes = vec![
            Axis::new(AxisParam::Lambda, 0.5, 80.0, 4, Spacing::Log),
            Axis::new(AxisParam::Kappa, 0.5, 80.0, 3, Spacing::Log),
        ];
        let cf = sweep(&spec(axes.clone())).unwrap();
        let red = sweep(&SweepSpec { solver: Solver::Reduced, ..spec(axes) }).unwrap();
        for (a, b) in cf.rows.iter().zip(&red.rows) {
            assert!(((a.efficiency - b.efficiency) / a.efficiency).abs() < 1e-10);
            assert!(((a.rate - b.rate) / a.rate).abs() < 1e-10);
        }
    }

    #[test]
    fn fig2a_surface_maximum() {
        let axes = vec![
            Axis::new(AxisParam::Lambda, 0.1, 100.0, 60, Spacing::Log),
            Axis::new(AxisParam::Kappa, 0.1, 100.0, 60, Spacing::Log),
        ];
        let t = sweep(&spec(axes)).unwrap();
        let best = t.best().unwrap();
        assert!((best.efficiency - 0.33).abs() < 0.005, "{}", best.efficiency);
    }

    #[test]
    fn decay_sweep_is_monotone() {
        let s = SweepSpec {
            template: fig2a().with_trap_rate(50.0).with_dephasing_rate(50.0),
            ..spec(vec![Axis::new(AxisParam::Gamma, 1e-4, 10.0, 40, Spacing::Log)])
        };
        let t = sweep(&s).unwrap();
        assert!(t.rows.windows(2).all(|w| w[1].efficiency < w[0].efficiency));
    }

    #[test]
    fn detuning_axis_peaks_at_zero() {
        let s = spec(vec![Axis::new(AxisParam::Delta, -50.0, 50.0, 21, Spacing::Linear)]);
        let t = sweep(&s).unwrap();
        assert_eq!(t.best().unwrap().coords, vec![0.0]);
        assert_eq!(spec(vec![]).params_at(&[]), fig2a());
    }

    #[test]
    fn coupling_applied_before_detuning() {
        let s = spec(vec![Axis::point(AxisParam::Delta, 5.0), Axis::point(AxisParam::Coupling, 2.0)]);
        let p = s.params_at(&[5.0, 2.0]);
        assert_eq!(p.coupling, 2.0);
        assert!((p.detuning() - 5.0).abs() < 1e-12);
    }
}

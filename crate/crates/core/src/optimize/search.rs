use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::nelder_mead::{minimize, Bounds, NelderMeadOptions};
use super::{Objective, Solver};
use crate::closed_form::{enaqt_optimum, stationarity_residuals, OptimalConditions};
use crate::error::{Error, Result, Violation};
use crate::model::NetworkParams;

/// Search box `[0, lambda_max] × [0, kappa_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    pub lambda_max: f64,
    pub kappa_max: f64,
}

impl Domain {
    pub fn square(bound: f64) -> Self {
        Self { lambda_max: bound, kappa_max: bound }
    }

    /// `[0, 100 J]²`.
    pub fn for_coupling(coupling: f64) -> Self {
        Self::square(100.0 * coupling)
    }

    fn bounds(&self) -> Bounds {
        Bounds { lower: vec![0.0, 0.0], upper: vec![self.lambda_max, self.kappa_max] }
    }

    fn edge_tolerance(&self) -> f64 {
        1e-6 * self.lambda_max.max(self.kappa_max)
    }

    pub fn on_boundary(&self, lambda: f64, kappa: f64) -> bool {
        let tol = self.edge_tolerance();
        lambda <= tol || kappa <= tol || lambda >= self.lambda_max - tol || kappa >= self.kappa_max - tol
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MaximizeOptions {
    pub solver: Solver,
    /// Seeds per axis; seeds sit at the centres of a `grid × grid` tiling.
    pub grid: usize,
    pub nelder_mead: NelderMeadOptions,
    /// Candidates within this much of the best objective count as tied.
    pub tie_tolerance: f64,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        Self { solver: Solver::ClosedForm, grid: 5, nelder_mead: NelderMeadOptions::default(), tie_tolerance: 1e-9 }
    }
}

/// Relative deviations of a numeric lossless-rate optimum from the
/// analytic stationary point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticComparison {
    pub analytic: OptimalConditions,
    pub kappa_rel_delta: f64,
    pub lambda_rel_delta: f64,
    pub rate_rel_delta: f64,
}

impl AnalyticComparison {
    fn new(analytic: OptimalConditions, lambda: f64, kappa: f64, rate: f64) -> Self {
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        Self {
            analytic,
            kappa_rel_delta: rel(kappa, analytic.kappa_opt),
            lambda_rel_delta: rel(lambda, analytic.lambda_opt),
            rate_rel_delta: rel(rate, analytic.rate_opt),
        }
    }

    pub fn max_rel_delta(&self) -> f64 {
        self.kappa_rel_delta.max(self.lambda_rel_delta).max(self.rate_rel_delta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimumReport {
    pub objective: Objective,
    pub lambda: f64,
    pub kappa: f64,
    pub value: f64,
    pub boundary_flag: bool,
    pub domain: Domain,
    /// Best objective among the seed points.
    pub best_seed_value: f64,
    pub starts: usize,
    pub iterations: usize,
    /// Present for the lossless single-site rate.
    pub analytic: Option<AnalyticComparison>,
}

/// Seed points at the centres of a `grid × grid` tiling, as `(λ, κ)`.
pub fn seed_grid(domain: &Domain, grid: usize) -> Vec<(f64, f64)> {
    let g = grid as f64;
    let mut out = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        for j in 0..grid {
            out.push(((i as f64 + 0.5) / g * domain.lambda_max, (j as f64 + 0.5) / g * domain.kappa_max));
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    lambda: f64,
    kappa: f64,
    score: f64,
    iterations: usize,
    converged: bool,
}

struct Problem<'a> {
    template: &'a NetworkParams,
    s: usize,
    objective: Objective,
    solver: Solver,
}

impl Problem<'_> {
    /// Larger is better; failed evaluations score `−∞`.
    fn score(&self, lambda: f64, kappa: f64) -> f64 {
        let params = self.template.with_dephasing_rate(lambda).with_trap_rate(kappa);
        self.solver
            .transport(&params, self.s)
            .ok()
            .and_then(|r| self.objective.value(&r))
            .map_or(f64::NEG_INFINITY, |v| self.objective.score(v))
    }
}

/// One-dimensional search along an edge of the box. `fixed` is `(axis, value)`
/// with axis 0 for λ and 1 for κ.
fn edge_search(problem: &Problem<'_>, domain: &Domain, fixed: (usize, f64), opts: &MaximizeOptions) -> Candidate {
    let free_max = if fixed.0 == 0 { domain.kappa_max } else { domain.lambda_max };
    let point = |x: f64| if fixed.0 == 0 { (fixed.1, x) } else { (x, fixed.1) };
    let g = opts.grid as f64;
    let start = (0..opts.grid)
        .map(|i| (i as f64 + 0.5) / g * free_max)
        .map(|x| {
            let (l, k) = point(x);
            (x, problem.score(l, k))
        })
        .fold((0.5 * free_max, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let bounds = Bounds { lower: vec![0.0], upper: vec![free_max] };
    let r = minimize(
        |x| {
            let (l, k) = point(x[0]);
            -problem.score(l, k)
        },
        &[start.0],
        &bounds,
        opts.nelder_mead,
    );
    let (lambda, kappa) = point(r.x[0]);
    Candidate { lambda, kappa, score: -r.f, iterations: r.iterations, converged: r.converged }
}

/// Maximizes the objective over the `(λ, κ)` box with the default seed grid.
pub fn maximize(
    template: &NetworkParams,
    s: usize,
    objective: Objective,
    domain: Domain,
    opts: &MaximizeOptions,
) -> Result<OptimumReport> {
    maximize_with_seeds(template, s, objective, domain, opts, &seed_grid(&domain, opts.grid))
}

/// Multistart Nelder–Mead from the given `(λ, κ)` seeds, plus explicit
/// searches along the four edges and the four corners. Starts converging to
/// the same optimum are merged; distinct optima tied to within
/// `tie_tolerance` resolve to the smallest `(λ, κ)`.
pub fn maximize_with_seeds(
    template: &NetworkParams,
    s: usize,
    objective: Objective,
    domain: Domain,
    opts: &MaximizeOptions,
    seeds: &[(f64, f64)],
) -> Result<OptimumReport> {
    if !(domain.lambda_max > 0.0 && domain.kappa_max > 0.0) {
        return Err(Error::InvalidSweep("search domain must have positive extent".into()));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidSweep("no seeds".into()));
    }
    let mut v = template.violations();
    v.extend(crate::model::InitialCondition::SymmetricSuperposition { s }.violations(template.n_sites));
    if !v.is_empty() {
        return Err(Error::Invalid(v));
    }

    let problem = Problem { template, s, objective, solver: opts.solver };
    let bounds = domain.bounds();
    let best_seed_value = seeds.iter().map(|&(l, k)| problem.score(l, k)).fold(f64::NEG_INFINITY, f64::max);

    let mut candidates: Vec<Candidate> = seeds
        .par_iter()
        .map(|&(l, k)| {
            let r = minimize(|x| -problem.score(x[0], x[1]), &[l, k], &bounds, opts.nelder_mead);
            Candidate { lambda: r.x[0], kappa: r.x[1], score: -r.f, iterations: r.iterations, converged: r.converged }
        })
        .collect();

    let edges = [(0, 0.0), (0, domain.lambda_max), (1, 0.0), (1, domain.kappa_max)];
    candidates.extend(edges.par_iter().map(|&e| edge_search(&problem, &domain, e, opts)).collect::<Vec<_>>());
    for (l, k) in [(0.0, 0.0), (0.0, domain.kappa_max), (domain.lambda_max, 0.0), (domain.lambda_max, domain.kappa_max)] {
        candidates.push(Candidate { lambda: l, kappa: k, score: problem.score(l, k), iterations: 0, converged: true });
    }

    candidates.retain(|c| c.score > f64::NEG_INFINITY);
    if candidates.is_empty() {
        return Err(Error::InvalidSweep("objective undefined everywhere on the search domain".into()));
    }
    candidates.sort_by(|a, b| {
        b.score.total_cmp(&a.score).then(a.lambda.total_cmp(&b.lambda)).then(a.kappa.total_cmp(&b.kappa))
    });

    let merge_radius = 1e-3 * domain.lambda_max.max(domain.kappa_max);
    let mut optima: Vec<Candidate> = Vec::new();
    for c in &candidates {
        let same = optima.iter().any(|o| (o.lambda - c.lambda).hypot(o.kappa - c.kappa) <= merge_radius);
        if !same {
            optima.push(*c);
        }
    }
    let top = optima[0].score;
    let chosen = optima
        .iter()
        .filter(|o| o.score >= top - opts.tie_tolerance)
        .min_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.kappa.total_cmp(&b.kappa)))
        .copied()
        .expect("top optimum is always tied with itself");

    if !chosen.converged {
        return Err(Error::NonConvergent { iterations: chosen.iterations });
    }

    let value = objective.score(chosen.score);
    let analytic = (objective == Objective::Rate && s == 1 && template.decay_rate == 0.0 && template.n_sites >= 3)
        .then(|| {
            let a = enaqt_optimum(template.n_sites, template.coupling, template.detuning());
            AnalyticComparison::new(a, chosen.lambda, chosen.kappa, value)
        });

    Ok(OptimumReport {
        objective,
        lambda: chosen.lambda,
        kappa: chosen.kappa,
        value,
        boundary_flag: domain.on_boundary(chosen.lambda, chosen.kappa),
        domain,
        best_seed_value: objective.score(best_seed_value),
        starts: seeds.len(),
        iterations: candidates.iter().map(|c| c.iterations).sum(),
        analytic,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub n_sites: usize,
    pub coupling: f64,
    pub detuning: f64,
    pub optimum: OptimumReport,
    pub comparison: AnalyticComparison,
    /// Stationarity residuals at the numeric optimum.
    pub residuals_numeric: (f64, f64),
    /// Stationarity residuals at the analytic optimum.
    pub residuals_analytic: (f64, f64),
}

/// Relative simplex tolerance used when checking the analytic optimum.
const VERIFY_XTOL: f64 = 1e-10;

/// Numerically maximizes the lossless single-site rate and compares with
/// the analytic optimum. The search box is `[0, 100 J]²`, widened when the
/// detuning pushes the optimum further out.
pub fn verify_optimum(n_sites: usize, coupling: f64, detuning: f64) -> Result<VerifyReport> {
    if n_sites < 3 {
        return Err(Error::Invalid(vec![Violation::TooFewSites(n_sites)]));
    }
    let template = NetworkParams::from_detuning(n_sites, coupling, detuning, 1.0, 0.0, 1.0);
    template.check()?;
    let scale = 3.0 * ((n_sites as f64).sqrt() * coupling + detuning.abs());
    let domain = Domain::square((100.0 * coupling).max(scale));
    let opts = MaximizeOptions {
        nelder_mead: NelderMeadOptions { xtol_rel: VERIFY_XTOL, ..Default::default() },
        ..Default::default()
    };
    let optimum = maximize(&template, 1, Objective::Rate, domain, &opts)?;
    let comparison = optimum.analytic.expect("lossless single-site rate always carries the analytic comparison");
    let a = comparison.analytic;
    Ok(VerifyReport {
        n_sites,
        coupling,
        detuning,
        residuals_numeric: stationarity_residuals(n_sites, coupling, detuning, optimum.kappa, optimum.lambda),
        residuals_analytic: stationarity_residuals(n_sites, coupling, detuning, a.kappa_opt, a.lambda_opt),
        optimum,
        comparison,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig(n: usize, delta: f64, gamma: f64) -> NetworkParams {
        NetworkParams::from_detuning(n, 1.0, delta, 1.0, gamma, 1.0)
    }

    #[test]
    fn seed_grid_centres() {
        let seeds = seed_grid(&Domain::square(100.0), 5);
        assert_eq!(seeds.len(), 25);
        assert_eq!(seeds[0], (10.0, 10.0));
        assert_eq!(seeds[24], (90.0, 90.0));
    }

    #[test]
    fn fig2a_optimum() {
        let r = maximize(&fig(20, 100.0, 0.01), 1, Objective::Efficiency, Domain::square(100.0), &Default::default())
            .unwrap();
        assert!((r.value - 0.33).abs() < 0.005, "{r:?}");
        assert!((r.lambda - 56.0).abs() < 2.0 && (r.kappa - 44.0).abs() < 2.0, "{r:?}");
        assert!(!r.boundary_flag);
        assert!(r.value >= r.best_seed_value);
    }

    #[test]
    fn coherent_superposition_optimum_on_edge() {
        let r = maximize(&fig(20, 100.0, 0.01), 19, Objective::Efficiency, Domain::square(100.0), &Default::default())
            .unwrap();
        assert!(r.boundary_flag);
        assert_eq!(r.lambda, 0.0);
        assert!((r.kappa - 100.0).abs() < 1e-6);
        assert!((r.value - 0.9).abs() < 0.01, "{r:?}");
    }

    #[test]
    fn lossless_rate_matches_analytic() {
        let r = verify_optimum(20, 1.0, 0.0).unwrap();
        assert!((r.optimum.kappa - 4.47).abs() < 1e-2 && (r.optimum.lambda - 6.00).abs() < 1e-2);
        assert!(r.comparison.max_rel_delta() < 1e-6, "{:?}", r.comparison);
        assert!(r.residuals_analytic.0.abs() < 1e-10 && r.residuals_analytic.1.abs() < 1e-10);
    }

    #[test]
    fn verify_requires_three_sites() {
        assert!(matches!(verify_optimum(2, 1.0, 0.0), Err(Error::Invalid(_))));
    }

    #[test]
    fn seed_order_invariance() {
        let p = fig(10, 25.0, 0.05);
        let domain = Domain::square(100.0);
        let opts = MaximizeOptions::default();
        let seeds = seed_grid(&domain, 5);
        let mut reversed = seeds.clone();
        reversed.reverse();
        let a = maximize_with_seeds(&p, 1, Objective::Efficiency, domain, &opts, &seeds).unwrap();
        let b = maximize_with_seeds(&p, 1, Objective::Efficiency, domain, &opts, &reversed).unwrap();
        assert!((a.lambda - b.lambda).abs() <= 1e-6 * a.lambda.max(1.0));
        assert!((a.kappa - b.kappa).abs() <= 1e-6 * a.kappa.max(1.0));
        assert!((a.value - b.value).abs() <= 1e-12);
    }

    #[test]
    fn transfer_time_is_minimized() {
        let p = fig(10, 0.0, 0.0).with_dephasing_rate(1.0);
        let r = maximize(&p, 1, Objective::TransferTime, Domain::square(50.0), &Default::default()).unwrap();
        let nearby = Solver::ClosedForm
            .transport(&p.with_dephasing_rate(r.lambda * 1.1).with_trap_rate(r.kappa * 0.9), 1)
            .unwrap();
        assert!(r.value <= nearby.transfer_time.unwrap());
    }

    #[test]
    fn reduced_solver_agrees_with_closed_form() {
        let p = fig(8, 10.0, 0.02);
        let domain = Domain::square(50.0);
        let a = maximize(&p, 2, Objective::Efficiency, domain, &Default::default()).unwrap();
        let opts = MaximizeOptions { solver: Solver::Reduced, ..Default::default() };
        let b = maximize(&p, 2, Objective::Efficiency, domain, &opts).unwrap();
        assert!((a.value - b.value).abs() < 1e-9);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let opts = MaximizeOptions {
            nelder_mead: NelderMeadOptions { max_iterations: 2, ..Default::default() },
            ..Default::default()
        };
        let r = maximize(&fig(20, 100.0, 0.01), 1, Objective::Efficiency, Domain::square(100.0), &opts);
        assert!(matches!(r, Err(Error::NonConvergent { .. })), "{r:?}");
    }
}

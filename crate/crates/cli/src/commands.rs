use enaqt::closed_form as cf;
use enaqt::full::evolve;
use enaqt::optimize::{self, Domain, MaximizeOptions, SweepSpec};
use enaqt::reduced::{accumulated_trajectory, reduced_initial_vector};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{load, DomainConfig, LimitsConfig, OptimizeConfig, SweepConfig, TrajectoryConfig};
use crate::format::{csv_row, emit, json as to_json};
use crate::{CliError, Options};

pub fn sweep(opts: &Options) -> Result<(), CliError> {
    let cfg: SweepConfig = load(opts.config_path()?)?;
    let spec = SweepSpec {
        template: cfg.network.params()?,
        s: cfg.s,
        axes: cfg.axes,
        objective: cfg.objective,
        solver: opts.solver.or(cfg.solver).unwrap_or_default(),
    };
    let table = optimize::sweep(&spec)?;
    let mut out = table.axis_names.join(",");
    out.push_str(",eta,tau,rate,missing\n");
    for row in &table.rows {
        let values = row.coords.iter().copied().chain([row.efficiency, row.transfer_time, row.rate]);
        out.push_str(&csv_row(values));
        out.push_str(if row.missing { ",1\n" } else { ",0\n" });
    }
    emit(opts.out.as_deref(), &out)
}

#[derive(Serialize)]
struct OptimizeOutput {
    network: enaqt::NetworkParams,
    s: usize,
    solver: optimize::Solver,
    optimum: optimize::OptimumReport,
    verify: Option<optimize::VerifyReport>,
}

pub fn optimize(opts: &Options) -> Result<(), CliError> {
    let cfg: OptimizeConfig = load(opts.config_path()?)?;
    let params = cfg.network.params()?;
    let domain = match cfg.domain {
        None => Domain::for_coupling(params.coupling),
        Some(DomainConfig::Square(b)) => Domain::square(b),
        Some(DomainConfig::Box(d)) => d,
    };
    let solver = opts.solver.or(cfg.solver).unwrap_or_default();
    let search = MaximizeOptions { solver, ..Default::default() };
    let optimum = optimize::maximize(&params, cfg.s, cfg.objective, domain, &search)?;
    let verify = if cfg.verify {
        Some(optimize::verify_optimum(params.n_sites, params.coupling, params.detuning())?)
    } else {
        None
    };
    let report = OptimizeOutput { network: params, s: cfg.s, solver, optimum, verify };
    emit(opts.out.as_deref(), &to_json(&report))
}

pub fn trajectory(opts: &Options) -> Result<(), CliError> {
    let cfg: TrajectoryConfig = load(opts.config_path()?)?;
    let params = cfg.network.params()?;
    let n = params.n_sites;
    let init = cfg.initial.condition(n)?;
    let times = cfg.times.values()?;
    let v0 = reduced_initial_vector(&init, n)?;
    let states = accumulated_trajectory(&params, &v0, &times)?;
    let full = if cfg.full { Some(evolve(&params, &init.to_density_matrix(n), &times)?) } else { None };

    let mut out = String::from("t,rho_nn,x,y,sigma,trace,eta_accumulated,decay_accumulated");
    out.push_str(if full.is_some() { ",rho_nn_full\n" } else { "\n" });
    for (k, (t, a)) in times.iter().zip(&states).enumerate() {
        let v = a.state;
        let mut fields = vec![*t, v.rho_nn, v.x, v.y, v.sigma, v.t, a.trapped, a.decayed];
        if let Some(f) = &full {
            fields.push(f[k][(n - 1, n - 1)].re);
        }
        out.push_str(&csv_row(fields));
        out.push('\n');
    }
    emit(opts.out.as_deref(), &out)
}

fn entry<T: Serialize>(r: enaqt::Result<T>) -> Value {
    match r {
        Ok(v) => serde_json::to_value(v).expect("limit values serialize"),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

pub fn limits(opts: &Options) -> Result<(), CliError> {
    let cfg: LimitsConfig = load(opts.config_path()?)?;
    let p = cfg.network.params()?;
    let s = cfg.s;
    let init_violations = enaqt::InitialCondition::SymmetricSuperposition { s }.violations(p.n_sites);
    if !init_violations.is_empty() {
        return Err(enaqt::Error::Invalid(init_violations).into());
    }
    let (n, j, delta) = (p.n_sites, p.coupling, p.detuning());
    let na = || -> enaqt::Result<()> { Err(enaqt::Error::InvalidSweep("needs N ≥ 3".into())) };
    let two_site: Value = if n == 2 { entry(cf::alpha_two_site(&p)) } else { json!({ "error": "needs N = 2" }) };
    let optimum = if n >= 3 { entry(Ok(cf::enaqt_optimum(n, j, delta))) } else { entry(na()) };
    let residuals = if n >= 3 && p.trap_rate > 0.0 && p.dephasing_rate > 0.0 {
        entry(Ok(cf::stationarity_residuals(n, j, delta, p.trap_rate, p.dephasing_rate)))
    } else {
        json!({ "error": "needs N ≥ 3, κ > 0 and λ > 0" })
    };
    let report = json!({
        "network": p,
        "s": s,
        "detuning": delta,
        "alpha": entry(cf::alpha_coeffs(&p, s)),
        "beta": entry(cf::beta_coeffs(&p, s)),
        "efficiency": entry(cf::efficiency_cf(&p, s)),
        "rate": entry(cf::rate_cf(&p, s)),
        "transfer_time": entry(cf::transfer_time_cf(&p, s)),
        "alpha_no_dephasing": entry(cf::alpha_no_dephasing(&p, s)),
        "beta_no_dephasing": entry(cf::beta_no_dephasing(&p, s)),
        "alpha_no_decay": entry(Ok(cf::alpha_no_decay())),
        "beta_no_decay": entry(cf::beta_no_decay(&p, s)),
        "efficiency_coherent_limit": cf::efficiency_coherent_limit(n, s),
        "alpha_two_site": two_site,
        "coherent_rate": entry(Ok(cf::coherent_rate(&p, s))),
        "weak_decay_efficiency": entry(cf::weak_decay_efficiency(&p, s)),
        "coherent_efficiency_max": cf::coherent_efficiency_max(n, j, delta, p.decay_rate),
        "enaqt_optimum": optimum,
        "stationarity_residuals": residuals,
        "kappa_root_small_dephasing": cf::kappa_root_small_dephasing(n, j, delta),
        "lambda_root_small_trapping": cf::lambda_root_small_trapping(n, j, delta),
    });
    emit(opts.out.as_deref(), &to_json(&report))
}

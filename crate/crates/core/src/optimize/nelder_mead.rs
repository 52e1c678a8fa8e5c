//! Box-constrained Nelder–Mead minimization. Trial points are projected
//! onto the box.

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    /// Converged once the simplex diameter is at most
    /// `xtol_rel·‖x_best‖ + xtol_abs`.
    pub xtol_rel: f64,
    pub xtol_abs: f64,
    pub max_iterations: usize,
    /// Initial simplex edge as a fraction of each box side.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { xtol_rel: 1e-6, xtol_abs: 1e-12, max_iterations: 10_000, initial_step: 0.05 }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    fn project(&self, x: &mut [f64]) {
        for ((v, lo), hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(*lo, *hi);
        }
    }
}

fn combine(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    // a + t (b − a)
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Minimizes `f` from `x0`. Non-finite values are treated as `+∞`.
pub fn minimize<F>(mut f: F, x0: &[f64], bounds: &Bounds, opts: NelderMeadOptions) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut start = x0.to_vec();
    bounds.project(&mut start);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let f0 = eval(&start);
    simplex.push((start.clone(), f0));
    for i in 0..dim {
        let side = bounds.upper[i] - bounds.lower[i];
        let step = opts.initial_step * if side.is_finite() && side > 0.0 { side } else { 1.0 };
        let mut v = start.clone();
        v[i] = if v[i] + step <= bounds.upper[i] { v[i] + step } else { v[i] - step };
        bounds.project(&mut v);
        let fv = eval(&v);
        simplex.push((v, fv));
    }

    let mut iterations = 0;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &simplex[0].0;
        let diameter = simplex[1..].iter().map(|(v, _)| distance(v, best)).fold(0.0, f64::max);
        let norm = best.iter().map(|v| v * v).sum::<f64>().sqrt();
        if diameter <= opts.xtol_rel * norm + opts.xtol_abs {
            let (x, f) = simplex.swap_remove(0);
            return NelderMeadResult { x, f, iterations, evaluations, converged: true };
        }
        if iterations >= opts.max_iterations {
            let (x, f) = simplex.swap_remove(0);
            return NelderMeadResult { x, f, iterations, evaluations, converged: false };
        }
        iterations += 1;

        let mut centroid = vec![0.0; dim];
        for (v, _) in &simplex[..dim] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / dim as f64;
            }
        }
        let (worst, f_worst) = simplex[dim].clone();
        let f_best = simplex[0].1;
        let f_second = simplex[dim - 1].1;

        let mut reflected = combine(&centroid, &worst, -1.0);
        bounds.project(&mut reflected);
        let f_r = eval(&reflected);

        if f_r < f_best {
            let mut expanded = combine(&centroid, &worst, -2.0);
            bounds.project(&mut expanded);
            let f_e = eval(&expanded);
            simplex[dim] = if f_e < f_r { (expanded, f_e) } else { (reflected, f_r) };
            continue;
        }
        if f_r < f_second {
            simplex[dim] = (reflected, f_r);
            continue;
        }
        let (contracted, f_c, accept) = if f_r < f_worst {
            let c = combine(&centroid, &reflected, 0.5);
            let fc = eval(&c);
            let ok = fc <= f_r;
            (c, fc, ok)
        } else {
            let c = combine(&centroid, &worst, 0.5);
            let fc = eval(&c);
            let ok = fc < f_worst;
            (c, fc, ok)
        };
        if accept {
            simplex[dim] = (contracted, f_c);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            let v = combine(&anchor, &entry.0, 0.5);
            let fv = eval(&v);
            *entry = (v, fv);
        }
    }
}

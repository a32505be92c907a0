//! Nelder-Mead simplex minimisation with box constraints handled by a smooth
//! change of variables.

/// Maps an unconstrained coordinate onto a bounded parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    /// x = lo + (hi - lo) · logistic(u)
    Logistic { lo: f64, hi: f64 },
    /// x = offset + exp(ln lo + (ln hi - ln lo) · logistic(u)), for lo > 0.
    LogLogistic { lo: f64, hi: f64, offset: f64 },
}

fn logistic(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

fn logit(t: f64) -> f64 {
    (t / (1.0 - t)).ln()
}

/// Keeps initial points away from the saturated ends of the logistic.
const INTERIOR: f64 = 1e-9;

impl Transform {
    pub fn to_param(&self, u: f64) -> f64 {
        match *self {
            Transform::Logistic { lo, hi } => lo + (hi - lo) * logistic(u),
            Transform::LogLogistic { lo, hi, offset } => {
                let (a, b) = (lo.ln(), hi.ln());
                offset + (a + (b - a) * logistic(u)).exp().clamp(lo, hi)
            }
        }
    }

    /// Inverse of [`Transform::to_param`]; values outside the box are pulled inside.
    pub fn to_unbounded(&self, x: f64) -> f64 {
        let t = match *self {
            Transform::Logistic { lo, hi } => (x - lo) / (hi - lo),
            Transform::LogLogistic { lo, hi, offset } => {
                let y = (x - offset).max(lo * (1.0 + INTERIOR));
                (y.ln() - lo.ln()) / (hi.ln() - lo.ln())
            }
        };
        logit(t.clamp(INTERIOR, 1.0 - INTERIOR))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Edge length of the starting simplex, in unconstrained coordinates.
    pub initial_step: f64,
    /// Stop when max f - min f over the simplex falls below this.
    pub f_tol: f64,
    /// Or when every vertex is within this distance (sup norm) of the best one.
    pub x_tol: f64,
    /// Iteration budget shared across restarts.
    pub max_iter: usize,
    /// Restarts from the best point after convergence, to escape collapsed simplices.
    pub restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            initial_step: 0.3,
            f_tol: 1e-11,
            x_tol: 1e-10,
            max_iter: 2000,
            restarts: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimises `f` from `x0`. Non-finite values are treated as +∞.
pub fn nelder_mead(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], opts: &NelderMeadOptions) -> Minimum {
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

    let mut best_x = x0.to_vec();
    let mut best_v = eval(&best_x);
    let mut iterations = 0;
    let mut converged = false;

    for attempt in 0..=opts.restarts {
        let run = simplex_run(&mut eval, &best_x, best_v, opts, opts.max_iter - iterations);
        iterations += run.iterations;
        let improvement = best_v - run.value;
        let improved = run.value < best_v;
        if improved {
            best_x = run.x;
            best_v = run.value;
        }
        converged = run.converged;
        // A restart that cannot improve by more than the tolerance confirms the optimum.
        if attempt > 0 && improvement.abs() <= opts.f_tol {
            break;
        }
        if !run.converged || iterations >= opts.max_iter {
            break;
        }
    }

    Minimum { x: best_x, value: best_v, evaluations, iterations, converged }
}

/// Refines a minimum with Newton steps on central-difference derivatives, over
/// the coordinates in `free`. A step is kept only if it lowers `f`; the
/// refinement stops at the first step that does not, or where the Hessian is
/// not positive definite.
pub fn newton_polish(mut f: impl FnMut(&[f64]) -> f64, min: &mut Minimum, free: &[usize]) {
    const H: f64 = 1e-4;
    const MAX_STEPS: usize = 20;
    const MAX_HALVINGS: usize = 12;
    const MAX_STEP: f64 = 2.0;
    let m = free.len();
    if m == 0 || !min.value.is_finite() {
        return;
    }
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        f(x)
    };
    let shifted = |x: &[f64], moves: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for &(i, d) in moves {
            y[i] += d;
        }
        y
    };
    for _ in 0..MAX_STEPS {
        let (x0, f0) = (min.x.clone(), min.value);
        let mut grad = vec![0.0; m];
        let mut hess = vec![vec![0.0; m]; m];
        let mut plus = vec![0.0; m];
        let mut minus = vec![0.0; m];
        for (a, &i) in free.iter().enumerate() {
            plus[a] = eval(&shifted(&x0, &[(i, H)]));
            minus[a] = eval(&shifted(&x0, &[(i, -H)]));
            grad[a] = (plus[a] - minus[a]) / (2.0 * H);
            hess[a][a] = (plus[a] - 2.0 * f0 + minus[a]) / (H * H);
        }
        for a in 0..m {
            for b in a + 1..m {
                let (i, j) = (free[a], free[b]);
                let pp = eval(&shifted(&x0, &[(i, H), (j, H)]));
                let pm = eval(&shifted(&x0, &[(i, H), (j, -H)]));
                let mp = eval(&shifted(&x0, &[(i, -H), (j, H)]));
                let mm = eval(&shifted(&x0, &[(i, -H), (j, -H)]));
                hess[a][b] = (pp - pm - mp + mm) / (4.0 * H * H);
                hess[b][a] = hess[a][b];
            }
        }
        let finite = grad.iter().chain(hess.iter().flatten()).all(|v| v.is_finite());
        let Some(mut step) = finite.then(|| cholesky_solve(&hess, &grad)).flatten() else {
            break;
        };
        let norm = step.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if norm > MAX_STEP {
            step.iter_mut().for_each(|v| *v *= MAX_STEP / norm);
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let moves: Vec<(usize, f64)> = free.iter().zip(&step).map(|(&i, &d)| (i, -t * d)).collect();
            let x = shifted(&x0, &moves);
            let v = eval(&x);
            if v < f0 {
                min.x = x;
                min.value = v;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted || f0 - min.value <= 1e-15 * f0.abs().max(1.0) {
            break;
        }
    }
    min.evaluations += evaluations;
}

/// Solves `a x = b` for symmetric positive definite `a`; `None` if it is not.
fn cholesky_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let sum: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - sum;
                if d <= 0.0 || !d.is_finite() {
                    return None;
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - sum) / l[j][j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        y[i] = (b[i] - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>()) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (y[i] - (i + 1..n).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
    }
    Some(x)
}

struct Run {
    x: Vec<f64>,
    value: f64,
    iterations: usize,
    converged: bool,
}

fn simplex_run(
    eval: &mut impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    f0: f64,
    opts: &NelderMeadOptions,
    budget: usize,
) -> Run {
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let dim = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), f0));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        let v = eval(&x);
        simplex.push((x, v));
    }

    let mut iterations = 0;
    let mut converged = false;
    let point = |c: &[f64], w: &[f64], t: f64| -> Vec<f64> {
        c.iter().zip(w).map(|(ci, wi)| ci + t * (wi - ci)).collect()
    };

    while iterations < budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let f_spread = simplex[dim].1 - simplex[0].1;
        let x_spread = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if (f_spread.is_finite() && f_spread <= opts.f_tol) || x_spread <= opts.x_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let worst = simplex[dim].0.clone();
        let f_worst = simplex[dim].1;
        let f_best = simplex[0].1;
        let f_second = simplex[dim - 1].1;

        let xr = point(&centroid, &worst, -REFLECT);
        let fr = eval(&xr);
        if fr < f_best {
            let xe = point(&centroid, &worst, -EXPAND);
            let fe = eval(&xe);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second {
            simplex[dim] = (xr, fr);
            continue;
        }
        // Contraction, outside or inside.
        let (xc, fc) = if fr < f_worst {
            let xc = point(&centroid, &xr, CONTRACT);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = point(&centroid, &worst, CONTRACT);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < fr.min(f_worst) {
            simplex[dim] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let xs = point(&best, &vertex.0, SHRINK);
            let fs = eval(&xs);
            *vertex = (xs, fs);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Run { x, value, iterations, converged }
}

//! Maximum-likelihood fitting of the base families and the exhaustive k-scan
//! for their zero-inflated variants.
//!
//! For each candidate k (the number of ones attributed to inflation) the base
//! family is fitted to the data with k ones removed, and the truncated
//! log-likelihood is converted to the full-data zero-inflated log-likelihood
//! with p = k/N. The k with the largest converted log-likelihood wins.

use rayon::prelude::*;

use crate::distributions::special::ln_normal_interval;
use crate::distributions::{bounds, DlnParams, Family, FamilyParams, HookedParams};
use crate::error::{Error, Result};
use crate::evaluation::{aic, ks_statistic, ModelComparison, ModelKind, TIE_TOLERANCE};
use crate::ingest::CountDataset;
use crate::optimize::{nelder_mead, newton_polish, NelderMeadOptions, Transform};
use crate::zero_inflation::{zi_loglik_from_truncated_ln, ZeroInflatedModel};

/// Scale applied to `initial_step` when a fit starts from a neighbouring k's optimum.
const WARM_STEP_SCALE: f64 = 0.2;

/// A parameter whose logistic coordinate is within this of 0 or 1 sits on the box edge.
const BOUNDARY_MARGIN: f64 = 1e-4;

/// A warm-started fit this close to the box edge is checked against a cold start,
/// since the warm path can stay on a branch that has stopped being the optimum.
const WARM_RECHECK_MARGIN: f64 = 1e-3;

/// Fits this close to the box edge are also tried with the coordinate pinned to it.
const EDGE_POLISH_MARGIN: f64 = 1e-2;

/// Unconstrained coordinate whose logistic image is exactly 0 or 1.
const EDGE_COORDINATE: f64 = 800.0;

/// Hooked cold starts: an 8 x 8 log-spaced grid over (α - 1, B).
const GRID_SIZE: usize = 8;
const GRID_ALPHA_MINUS_ONE: (f64, f64) = (0.05, 20.0);
const GRID_B: (f64, f64) = (0.01, 1e4);

/// How the k-scan of [`fit_zero_inflated`] is run.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Step between scanned k values; 1 scans every k in 0..=r.
    pub stride: u64,
    /// After a strided scan, scan every k within one stride of the best one.
    pub refine: bool,
    /// Start each k's fit from the previous k's optimum. Forces a serial scan.
    pub warm_start: bool,
    /// Run independent fits on the rayon pool.
    pub parallel: bool,
    pub optimizer: NelderMeadOptions,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            stride: 1,
            refine: false,
            warm_start: true,
            parallel: false,
            optimizer: NelderMeadOptions::default(),
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.stride == 0 {
            return Err(Error::usage("stride must be at least 1"));
        }
        if self.optimizer.max_iter == 0 {
            return Err(Error::usage("optimizer needs a positive iteration budget"));
        }
        Ok(())
    }

    /// True when every k in 0..=r is fitted.
    pub fn is_exhaustive(&self) -> bool {
        self.stride == 1
    }
}

/// One fitted model on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Fitted model; p = 0 and k = 0 for the non-inflated fits.
    pub model: ZeroInflatedModel,
    pub zero_inflated: bool,
    /// Natural-log likelihood of the full dataset.
    pub loglik: f64,
    pub n_params: u32,
    pub aic: f64,
    pub ks: f64,
    pub converged: bool,
    /// Objective evaluations spent, summed over the k-scan for inflated fits.
    pub evaluations: u64,
    pub n_total: u64,
    pub r: u64,
    pub diagnostics: Vec<String>,
}

impl FitResult {
    pub fn kind(&self) -> ModelKind {
        ModelKind::new(self.model.family(), self.zero_inflated)
    }

    pub fn family(&self) -> Family {
        self.model.family()
    }

    fn assemble(
        data: &CountDataset,
        model: ZeroInflatedModel,
        zero_inflated: bool,
        loglik: f64,
        converged: bool,
        evaluations: u64,
        diagnostics: Vec<String>,
    ) -> Result<Self> {
        let n_params = if zero_inflated { 3 } else { 2 };
        Ok(FitResult {
            ks: ks_statistic(data, &model)?,
            model,
            zero_inflated,
            loglik,
            n_params,
            aic: aic(loglik, n_params),
            converged,
            evaluations,
            n_total: data.n_total(),
            r: data.ones(),
            diagnostics,
        })
    }
}

/// The dataset in the form the objective needs: distinct values with counts,
/// plus precomputed log interval ends for the discretised lognormal.
struct Prepared {
    values: Vec<f64>,
    counts: Vec<f64>,
    /// Index of value 1 in `values`, if present (it is always first).
    has_one: bool,
    /// Sorted distinct ln(v ± 0.5).
    ln_edges: Vec<f64>,
    /// Per value: indices of ln(v - 0.5) and ln(v + 0.5) in `ln_edges`.
    edge_idx: Vec<(usize, usize)>,
    ln_values: Vec<f64>,
}

impl Prepared {
    fn new(data: &CountDataset) -> Self {
        let hist = data.histogram();
        let values: Vec<f64> = hist.iter().map(|&(v, _)| v as f64).collect();
        let counts: Vec<f64> = hist.iter().map(|&(_, c)| c as f64).collect();
        let mut ln_edges: Vec<f64> = Vec::with_capacity(2 * values.len());
        let mut edge_idx = Vec::with_capacity(values.len());
        for &v in &values {
            let lo = (v - 0.5).ln();
            let hi = (v + 0.5).ln();
            let lo_idx = match ln_edges.last() {
                Some(&last) if last == lo => ln_edges.len() - 1,
                _ => {
                    ln_edges.push(lo);
                    ln_edges.len() - 1
                }
            };
            ln_edges.push(hi);
            edge_idx.push((lo_idx, ln_edges.len() - 1));
        }
        Prepared {
            has_one: hist.first().is_some_and(|&(v, _)| v == 1),
            ln_values: values.iter().map(|v| v.ln()).collect(),
            values,
            counts,
            ln_edges,
            edge_idx,
        }
    }

    fn count(&self, i: usize, ones: f64) -> f64 {
        if i == 0 && self.has_one {
            ones
        } else {
            self.counts[i]
        }
    }

    /// Base-family log-likelihood with the count of ones replaced by `ones`.
    fn loglik(&self, params: &FamilyParams, ones: f64, scratch: &mut Vec<(f64, f64)>) -> f64 {
        match params {
            FamilyParams::Hooked(p) => {
                let (alpha, b) = (p.alpha(), p.b());
                let ln_norm = p.ln_norm();
                let mut total = 0.0;
                let mut n = 0.0;
                for i in 0..self.values.len() {
                    let c = self.count(i, ones);
                    if c == 0.0 {
                        continue;
                    }
                    n += c;
                    total += c * (b + self.values[i]).ln();
                }
                n * ln_norm - alpha * total
            }
            FamilyParams::Dln(p) => self.dln_loglik(p, ones, scratch),
        }
    }

    fn dln_loglik(&self, p: &DlnParams, ones: f64, scratch: &mut Vec<(f64, f64)>) -> f64 {
        let (mu, sigma) = (p.mu(), p.sigma());
        let ln_norm = p.ln_norm();
        // (Φ(z), 1 - Φ(z)) at every edge, each taken from the tail where it is small.
        scratch.clear();
        scratch.extend(self.ln_edges.iter().map(|&e| {
            let z = (e - mu) / sigma;
            if z < 0.0 {
                let lower = 0.5 * libm::erfc(-z * std::f64::consts::FRAC_1_SQRT_2);
                (lower, 1.0 - lower)
            } else {
                let upper = 0.5 * libm::erfc(z * std::f64::consts::FRAC_1_SQRT_2);
                (1.0 - upper, upper)
            }
        }));
        let mut total = 0.0;
        let mut n = 0.0;
        for (i, &(lo, hi)) in self.edge_idx.iter().enumerate() {
            let c = self.count(i, ones);
            if c == 0.0 {
                continue;
            }
            n += c;
            let (cdf_lo, sf_lo) = scratch[lo];
            let (cdf_hi, sf_hi) = scratch[hi];
            let z_lo = (self.ln_edges[lo] - mu) / sigma;
            let z_hi = (self.ln_edges[hi] - mu) / sigma;
            let mass = if z_lo + z_hi < 0.0 { cdf_hi - cdf_lo } else { sf_lo - sf_hi };
            let ln_mass = if mass > 1e-280 {
                mass.ln()
            } else {
                ln_normal_interval(z_lo, z_hi)
            };
            total += c * ln_mass;
        }
        total - n * ln_norm
    }

    fn n_distinct_with(&self, ones: f64) -> usize {
        (0..self.values.len()).filter(|&i| self.count(i, ones) > 0.0).count()
    }

    /// Weighted mean and standard deviation of ln x.
    fn log_moments(&self, ones: f64) -> (f64, f64) {
        let mut n = 0.0;
        let mut s1 = 0.0;
        for i in 0..self.values.len() {
            let c = self.count(i, ones);
            n += c;
            s1 += c * self.ln_values[i];
        }
        let mean = s1 / n;
        let mut s2 = 0.0;
        for i in 0..self.values.len() {
            let c = self.count(i, ones);
            s2 += c * (self.ln_values[i] - mean).powi(2);
        }
        (mean, (s2 / n).sqrt())
    }
}

fn transforms(family: Family) -> [Transform; 2] {
    match family {
        Family::DiscretisedLognormal => [
            Transform::Logistic { lo: bounds::MU.0, hi: bounds::MU.1 },
            Transform::LogLogistic { lo: bounds::SIGMA.0, hi: bounds::SIGMA.1, offset: 0.0 },
        ],
        Family::HookedPowerLaw => [
            Transform::LogLogistic {
                lo: bounds::ALPHA.0 - 1.0,
                hi: bounds::ALPHA.1 - 1.0,
                offset: 1.0,
            },
            Transform::LogLogistic { lo: bounds::B.0, hi: bounds::B.1, offset: 0.0 },
        ],
    }
}

fn params_from(family: Family, u: &[f64]) -> Option<FamilyParams> {
    let [t0, t1] = transforms(family);
    FamilyParams::from_pair(family, t0.to_param(u[0]), t1.to_param(u[1])).ok()
}

fn unbounded_from(params: &FamilyParams) -> [f64; 2] {
    let [t0, t1] = transforms(params.family());
    let (a, b) = params.pair();
    [t0.to_unbounded(a), t1.to_unbounded(b)]
}

fn logistic_near_edge(u: f64, margin: f64) -> bool {
    let t = 1.0 / (1.0 + (-u).exp());
    t < margin || t > 1.0 - margin
}

fn near_boundary(u: f64) -> bool {
    logistic_near_edge(u, BOUNDARY_MARGIN)
}

/// Fit of the base family to the data with some ones removed.
#[derive(Debug, Clone)]
struct TruncatedFit {
    params: FamilyParams,
    /// Log-likelihood of the truncated data.
    loglik: f64,
    evaluations: u64,
    converged: bool,
    diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
enum Start {
    Cold,
    Warm(FamilyParams),
}

fn cold_start(prep: &Prepared, family: Family, ones: f64) -> (FamilyParams, u64) {
    match family {
        Family::DiscretisedLognormal => {
            let (mean, sd) = prep.log_moments(ones);
            let mu = mean.clamp(bounds::MU.0 + 1.0, bounds::MU.1 - 1.0);
            let sigma = sd.clamp(0.05, bounds::SIGMA.1 / 2.0);
            (DlnParams::new(mu, sigma).expect("clamped into bounds").into(), 0)
        }
        Family::HookedPowerLaw => {
            let mut scratch = Vec::new();
            let grid = |(lo, hi): (f64, f64), i: usize| {
                (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (GRID_SIZE - 1) as f64).exp()
            };
            let mut best: Option<(f64, FamilyParams)> = None;
            for i in 0..GRID_SIZE {
                for j in 0..GRID_SIZE {
                    let alpha = 1.0 + grid(GRID_ALPHA_MINUS_ONE, i);
                    let b = grid(GRID_B, j);
                    let p: FamilyParams = HookedParams::new(alpha, b).expect("grid inside bounds").into();
                    let ll = prep.loglik(&p, ones, &mut scratch);
                    if best.as_ref().is_none_or(|(v, _)| ll > *v) {
                        best = Some((ll, p));
                    }
                }
            }
            (best.expect("non-empty grid").1, (GRID_SIZE * GRID_SIZE) as u64)
        }
    }
}

fn fit_truncated(
    prep: &Prepared,
    family: Family,
    ones: u64,
    start: Start,
    opts: &NelderMeadOptions,
) -> TruncatedFit {
    let ones = ones as f64;
    let (init, grid_evals) = match start {
        Start::Cold => cold_start(prep, family, ones),
        Start::Warm(p) => (p, 0),
    };
    let mut local = *opts;
    if matches!(start, Start::Warm(_)) {
        local.initial_step *= WARM_STEP_SCALE;
    }
    let mut scratch = Vec::with_capacity(prep.ln_edges.len());
    let objective = |u: &[f64]| match params_from(family, u) {
        Some(p) => -prep.loglik(&p, ones, &mut scratch),
        None => f64::INFINITY,
    };
    let mut objective = objective;
    let u0 = unbounded_from(&init);
    let mut min = nelder_mead(&mut objective, &u0, &local);
    // The logistic map flattens near the box edge, so the simplex stalls short of
    // it. Pin such coordinates to the edge and optimise the rest.
    for i in 0..min.x.len() {
        if logistic_near_edge(min.x[i], EDGE_POLISH_MARGIN) {
            let pinned = EDGE_COORDINATE.copysign(min.x[i]);
            let free = 1 - i;
            let mut line = |v: &[f64]| {
                let mut u = [0.0; 2];
                u[i] = pinned;
                u[free] = v[0];
                objective(&u)
            };
            let polished = nelder_mead(&mut line, &[min.x[free]], &local);
            min.evaluations += polished.evaluations;
            min.iterations += polished.iterations;
            if polished.value < min.value {
                min.x[i] = pinned;
                min.x[free] = polished.x[0];
                min.value = polished.value;
            }
        }
    }
    let free: Vec<usize> = (0..min.x.len()).filter(|&i| min.x[i].abs() < EDGE_COORDINATE).collect();
    newton_polish(&mut objective, &mut min, &free);
    let params = params_from(family, &min.x).unwrap_or(init);

    let mut diagnostics = Vec::new();
    if !min.converged {
        diagnostics.push(format!("optimizer stopped after {} iterations without converging", min.iterations));
    }
    let names = match family {
        Family::DiscretisedLognormal => ["mu", "sigma"],
        Family::HookedPowerLaw => ["alpha", "B"],
    };
    let mut at_boundary = false;
    for (u, name) in min.x.iter().zip(names) {
        if near_boundary(*u) {
            at_boundary = true;
            diagnostics.push(format!("{name} is at the edge of its search range"));
        }
    }
    let degenerate = prep.n_distinct_with(ones) < 2;
    if degenerate {
        diagnostics.push("fewer than two distinct values: the maximum-likelihood estimate is degenerate".into());
    }
    let fit = TruncatedFit {
        params,
        loglik: -min.value,
        evaluations: min.evaluations as u64 + grid_evals,
        converged: min.converged && !at_boundary && !degenerate,
        diagnostics,
    };
    let recheck = !min.converged || min.x.iter().any(|&u| logistic_near_edge(u, WARM_RECHECK_MARGIN));
    if matches!(start, Start::Warm(_)) && recheck {
        let mut cold = fit_truncated(prep, family, ones as u64, Start::Cold, opts);
        cold.evaluations += fit.evaluations;
        if cold.loglik > fit.loglik {
            return cold;
        }
        return TruncatedFit { evaluations: cold.evaluations, ..fit };
    }
    fit
}

/// Fits the base family (no inflation) by maximum likelihood.
pub fn fit_base(data: &CountDataset, family: Family) -> Result<FitResult> {
    fit_base_with(data, family, &NelderMeadOptions::default())
}

pub fn fit_base_with(data: &CountDataset, family: Family, opts: &NelderMeadOptions) -> Result<FitResult> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let prep = Prepared::new(data);
    let fit = fit_truncated(&prep, family, data.ones(), Start::Cold, opts);
    base_result(data, fit)
}

fn base_result(data: &CountDataset, fit: TruncatedFit) -> Result<FitResult> {
    FitResult::assemble(
        data,
        ZeroInflatedModel::non_inflated(fit.params),
        false,
        fit.loglik,
        fit.converged,
        fit.evaluations,
        fit.diagnostics,
    )
}

/// One scanned k.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfilePoint {
    pub k: u64,
    /// Full-data zero-inflated log-likelihood at p = k/N.
    pub loglik: f64,
    /// Base parameters fitted with k ones removed.
    pub params: FamilyParams,
    pub converged: bool,
}

/// The selected zero-inflated fit plus every k that was evaluated, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroInflationScan {
    pub result: FitResult,
    pub profile: Vec<ProfilePoint>,
}

/// Fits the zero-inflated variant of `family` by scanning k.
pub fn fit_zero_inflated(data: &CountDataset, family: Family, config: &SearchConfig) -> Result<FitResult> {
    scan_zero_inflated(data, family, config).map(|s| s.result)
}

/// Like [`fit_zero_inflated`] but also returns the log-likelihood profile over k.
pub fn scan_zero_inflated(data: &CountDataset, family: Family, config: &SearchConfig) -> Result<ZeroInflationScan> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let prep = Prepared::new(data);
    scan_with(data, &prep, family, config, None)
}

struct Evaluated {
    point: ProfilePoint,
    evaluations: u64,
    diagnostics: Vec<String>,
}

fn evaluate_k(
    data: &CountDataset,
    prep: &Prepared,
    family: Family,
    k: u64,
    start: Start,
    opts: &NelderMeadOptions,
) -> Evaluated {
    let fit = fit_truncated(prep, family, data.ones() - k, start, opts);
    evaluated_from(data, k, fit)
}

fn evaluated_from(data: &CountDataset, k: u64, fit: TruncatedFit) -> Evaluated {
    let ln_f1 = fit.params.ln_pmf_with_norm(1, fit.params.ln_norm());
    let loglik = if ln_f1 < 0.0 {
        zi_loglik_from_truncated_ln(fit.loglik, ln_f1, k, data.ones(), data.n_total())
            .unwrap_or(f64::NEG_INFINITY)
    } else {
        f64::NEG_INFINITY
    };
    Evaluated {
        point: ProfilePoint { k, loglik, params: fit.params, converged: fit.converged },
        evaluations: fit.evaluations,
        diagnostics: fit.diagnostics,
    }
}

fn scan_with(
    data: &CountDataset,
    prep: &Prepared,
    family: Family,
    config: &SearchConfig,
    k0: Option<TruncatedFit>,
) -> Result<ZeroInflationScan> {
    let r = data.ones();
    let k_max = r.min(data.n_total() - 1);
    let s = config.stride;
    let mut grid: Vec<u64> = (0..=k_max).step_by(s as usize).collect();
    if grid.last() != Some(&k_max) {
        grid.push(k_max);
    }

    let mut evaluated: Vec<Evaluated> = Vec::with_capacity(grid.len());
    let mut remaining: &[u64] = &grid;
    if let Some(fit) = k0 {
        evaluated.push(evaluated_from(data, 0, fit));
        remaining = &grid[1..];
    }
    run_points(data, prep, family, config, remaining, &mut evaluated);

    if s > 1 && config.refine {
        let coarse_best = select_best(&evaluated).point.k;
        let lo = coarse_best.saturating_sub(s - 1);
        let hi = (coarse_best + s - 1).min(k_max);
        let extra: Vec<u64> = (lo..=hi).filter(|k| !grid.contains(k)).collect();
        run_points(data, prep, family, config, &extra, &mut evaluated);
        evaluated.sort_by_key(|e| e.point.k);
    }

    let best = select_best(&evaluated);
    let evaluations = evaluated.iter().map(|e| e.evaluations).sum();
    let mut diagnostics = best.diagnostics.clone();
    let peaks = local_maxima(&evaluated);
    if peaks > 1 {
        diagnostics.push(format!("log-likelihood profile over k has {peaks} local maxima"));
    }
    let model = ZeroInflatedModel::with_removed_ones(best.point.params, best.point.k, data.n_total())?;
    let result = FitResult::assemble(
        data,
        model,
        true,
        best.point.loglik,
        best.point.converged,
        evaluations,
        diagnostics,
    )?;
    Ok(ZeroInflationScan {
        result,
        profile: evaluated.into_iter().map(|e| e.point).collect(),
    })
}

/// Fits every k in `ks` (ascending), appending to `done`. Warm starts take the
/// parameters of the nearest k already in `done`.
fn run_points(
    data: &CountDataset,
    prep: &Prepared,
    family: Family,
    config: &SearchConfig,
    ks: &[u64],
    done: &mut Vec<Evaluated>,
) {
    let opts = &config.optimizer;
    if config.warm_start {
        for &k in ks {
            let start = done
                .iter()
                .min_by_key(|e| (e.point.k.abs_diff(k), e.point.k))
                .map_or(Start::Cold, |e| Start::Warm(e.point.params));
            done.push(evaluate_k(data, prep, family, k, start, opts));
        }
    } else if config.parallel {
        let fits: Vec<Evaluated> = ks
            .par_iter()
            .map(|&k| evaluate_k(data, prep, family, k, Start::Cold, opts))
            .collect();
        done.extend(fits);
    } else {
        done.extend(ks.iter().map(|&k| evaluate_k(data, prep, family, k, Start::Cold, opts)));
    }
}

/// Highest log-likelihood, scanning k upwards; a later k must win by more than
/// the tie tolerance.
fn select_best(evaluated: &[Evaluated]) -> &Evaluated {
    let mut order: Vec<&Evaluated> = evaluated.iter().collect();
    order.sort_by_key(|e| e.point.k);
    let mut best = order[0];
    for e in &order[1..] {
        if e.point.loglik > best.point.loglik + TIE_TOLERANCE {
            best = e;
        }
    }
    best
}

fn local_maxima(evaluated: &[Evaluated]) -> usize {
    let mut ll: Vec<(u64, f64)> = evaluated.iter().map(|e| (e.point.k, e.point.loglik)).collect();
    ll.sort_by_key(|&(k, _)| k);
    (0..ll.len())
        .filter(|&i| {
            let left = i == 0 || ll[i].1 > ll[i - 1].1 + TIE_TOLERANCE;
            let right = i + 1 == ll.len() || ll[i].1 > ll[i + 1].1 + TIE_TOLERANCE;
            left && right
        })
        .count()
}

/// Fits all four models and picks the AIC winner.
pub fn fit_all_models(data: &CountDataset, config: &SearchConfig) -> Result<ModelComparison> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let prep = Prepared::new(data);
    let pair = |family: Family| -> Result<(FitResult, FitResult)> {
        let base = fit_truncated(&prep, family, data.ones(), Start::Cold, &config.optimizer);
        let base_fit = base_result(data, base.clone())?;
        let scan = scan_with(data, &prep, family, config, Some(base))?;
        Ok((base_fit, scan.result))
    };
    let (dln, hooked) = if config.parallel {
        rayon::join(|| pair(Family::DiscretisedLognormal), || pair(Family::HookedPowerLaw))
    } else {
        (pair(Family::DiscretisedLognormal), pair(Family::HookedPowerLaw))
    };
    let (dln, zidl) = dln?;
    let (hooked, zihp) = hooked?;
    ModelComparison::from_results(vec![dln, zidl, hooked, zihp])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::log_likelihood;

    fn data(v: &[u64]) -> CountDataset {
        CountDataset::from_shifted(v.to_vec()).unwrap()
    }

    #[test]
    fn prepared_loglik_matches_pointwise() {
        let d = data(&[1, 1, 1, 2, 3, 3, 7, 20, 21, 150]);
        let prep = Prepared::new(&d);
        let mut scratch = Vec::new();
        for params in [
            FamilyParams::from_pair(Family::DiscretisedLognormal, 1.2, 0.9).unwrap(),
            FamilyParams::from_pair(Family::DiscretisedLognormal, 9.0, 0.3).unwrap(),
            FamilyParams::from_pair(Family::HookedPowerLaw, 2.4, 6.0).unwrap(),
        ] {
            for ones in [0u64, 2, 3] {
                let fast = prep.loglik(&params, ones as f64, &mut scratch);
                let mut counts: Vec<u64> = d.counts().iter().copied().filter(|&c| c != 1).collect();
                counts.extend(std::iter::repeat_n(1, ones as usize));
                let slow: f64 = counts.iter().map(|&c| params.ln_pmf(c).unwrap()).sum();
                assert!((fast - slow).abs() < 1e-9 * slow.abs().max(1.0), "{params:?} {fast} {slow}");
            }
        }
    }

    #[test]
    fn base_fit_beats_nearby_points() {
        let d = data(&[1, 1, 2, 2, 2, 3, 4, 4, 6, 9, 13, 30]);
        for family in [Family::DiscretisedLognormal, Family::HookedPowerLaw] {
            let fit = fit_base(&d, family).unwrap();
            assert_eq!(fit.n_params, 2);
            let (a, b) = fit.model.base().pair();
            for (da, db) in [(0.01, 0.0), (-0.01, 0.0), (0.0, 0.01), (0.0, -0.01)] {
                if let Ok(p) = FamilyParams::from_pair(family, a + da * a.abs().max(1.0), b + db * b.abs().max(1.0)) {
                    let ll = log_likelihood(&d, &ZeroInflatedModel::non_inflated(p)).unwrap();
                    assert!(ll <= fit.loglik + 1e-9, "{family:?}");
                }
            }
        }
    }

    #[test]
    fn identical_values_flagged_degenerate() {
        let d = data(&[6; 40]);
        let fit = fit_base(&d, Family::DiscretisedLognormal).unwrap();
        assert!(!fit.converged);
        assert!(fit.diagnostics.iter().any(|m| m.contains("degenerate")));
    }

    #[test]
    fn empty_dataset_errors() {
        let d = data(&[]);
        assert!(matches!(fit_base(&d, Family::HookedPowerLaw), Err(Error::EmptyDataset)));
        assert!(fit_zero_inflated(&d, Family::HookedPowerLaw, &SearchConfig::default()).is_err());
    }

    #[test]
    fn no_ones_matches_base_fit() {
        let d = data(&[2, 3, 3, 4, 5, 8, 8, 9, 12, 20, 33]);
        for family in [Family::DiscretisedLognormal, Family::HookedPowerLaw] {
            let base = fit_base(&d, family).unwrap();
            let zi = fit_zero_inflated(&d, family, &SearchConfig::default()).unwrap();
            assert_eq!(zi.model.base(), base.model.base());
            assert_eq!(zi.loglik, base.loglik);
            assert_eq!(zi.ks, base.ks);
            assert_eq!(zi.model.k(), 0);
        }
    }

    #[test]
    fn zero_stride_rejected() {
        let cfg = SearchConfig { stride: 0, ..Default::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn aic_field_consistent() {
        let d = data(&[1, 1, 1, 1, 2, 3, 5, 8, 13]);
        let fit = fit_zero_inflated(&d, Family::DiscretisedLognormal, &SearchConfig::default()).unwrap();
        assert_eq!(fit.aic, 2.0 * 3.0 - 2.0 * fit.loglik);
        assert!(fit.model.k() <= d.ones());
        assert_eq!(fit.model.p() * d.n_total() as f64, fit.model.k() as f64);
    }
}

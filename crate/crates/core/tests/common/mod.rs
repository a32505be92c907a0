//! Independent reference computations shared by the integration tests. None of
//! these call into the closed forms they are used to check.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zicount::distributions::FamilyParams;
use zicount::zero_inflation::zi_cdf;
use zicount::{CountDataset, ZeroInflatedModel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Adaptive Simpson quadrature with Richardson extrapolation.
pub fn integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        // Below a few ulps of the panel value further splitting only adds rounding noise.
        let floor = 4.0 * f64::EPSILON * (left + right).abs();
        if depth == 0 || delta.abs() <= 15.0 * tol.max(floor) {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Quadrature to a relative accuracy: a fixed composite pass sizes the
/// integral, then the adaptive pass runs to `rel` times that size.
pub fn integrate_rel(f: &impl Fn(f64) -> f64, a: f64, b: f64, rel: f64) -> f64 {
    const PANELS: usize = 4096;
    let h = (b - a) / PANELS as f64;
    let size: f64 = (0..PANELS)
        .map(|i| {
            let x = a + i as f64 * h;
            h / 6.0 * (f(x) + 4.0 * f(x + 0.5 * h) + f(x + h))
        })
        .sum();
    integrate(f, a, b, rel * size.abs())
}

/// Density of the continuous lognormal.
pub fn lognormal_pdf(x: f64, mu: f64, sigma: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let z = (x.ln() - mu) / sigma;
    (-0.5 * z * z).exp() / (x * sigma * (2.0 * std::f64::consts::PI).sqrt())
}

/// Discretised lognormal pmf by quadrature: ∫_{n-½}^{n+½} pdf / ∫_{½}^{∞} pdf.
/// The normaliser is integrated on the log scale, where the density is Gaussian,
/// out to 40σ beyond the mean.
pub fn dln_pmf_quadrature(n: u64, mu: f64, sigma: f64) -> f64 {
    let gauss = |t: f64| {
        let z = (t - mu) / sigma;
        (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
    };
    let (from, to) = (0.5f64.ln(), mu + 40.0 * sigma);
    // Split at the mean so the peak is never straddled by a coarse panel.
    let norm = if from < mu {
        integrate_rel(&gauss, from, mu, 1e-14) + integrate_rel(&gauss, mu, to, 1e-14)
    } else {
        integrate_rel(&gauss, from, to.max(from), 1e-14)
    };
    let mass = integrate_rel(&|x| lognormal_pdf(x, mu, sigma), n as f64 - 0.5, n as f64 + 0.5, 1e-14);
    mass / norm
}

/// Σ_{m≥0} (q + m)^-s by direct summation of `terms` terms, plus the integral
/// tail from the midpoint q + terms - ½.
pub fn hurwitz_direct(s: f64, q: f64, terms: u64) -> f64 {
    let mut sum = 0.0;
    // Summed smallest first.
    for m in (0..terms).rev() {
        sum += (q + m as f64).powf(-s);
    }
    sum + (q + terms as f64 - 0.5).powf(1.0 - s) / (s - 1.0)
}

/// Σ ln(p·[x = 1] + (1 - p) f(x)) straight from the mixture definition.
pub fn direct_zi_loglik(data: &[u64], base: &FamilyParams, p: f64) -> f64 {
    data.iter()
        .map(|&x| {
            let f = base.pmf(x).unwrap();
            let point = if x == 1 { p } else { 0.0 };
            (point + (1.0 - p) * f).ln()
        })
        .sum()
}

/// Base log-likelihood of `data` with `k` of its ones removed.
pub fn truncated_loglik(data: &[u64], base: &FamilyParams, k: u64) -> f64 {
    let mut skip = k;
    let mut total = 0.0;
    for &x in data {
        if x == 1 && skip > 0 {
            skip -= 1;
            continue;
        }
        total += base.ln_pmf(x).unwrap();
    }
    total
}

/// max over n in 1..=max(data) of |#{x ≤ n}/N - zi_cdf(n)|, counting afresh at each n.
pub fn brute_force_ks(data: &[u64], model: &ZeroInflatedModel) -> f64 {
    let max = *data.iter().max().unwrap();
    let n_total = data.len() as f64;
    let mut sup: f64 = 0.0;
    for n in 1..=max {
        let below = data.iter().filter(|&&x| x <= n).count();
        sup = sup.max((below as f64 / n_total - zi_cdf(n, model).unwrap()).abs());
    }
    sup
}

/// Small random dataset: `len` values, a share of them ones, the rest in 2..=hi.
pub fn random_small_dataset(rng: &mut impl Rng, len: usize, hi: u64) -> Vec<u64> {
    let ones_share: f64 = rng.random_range(0.0..0.6);
    (0..len)
        .map(|_| if rng.random::<f64>() < ones_share { 1 } else { rng.random_range(2..=hi) })
        .collect()
}

pub fn random_params(rng: &mut impl Rng, hooked: bool) -> FamilyParams {
    use zicount::distributions::Family;
    if hooked {
        let alpha = rng.random_range(1.1..6.0);
        let b = 10f64.powf(rng.random_range(-3.0..3.0));
        FamilyParams::from_pair(Family::HookedPowerLaw, alpha, b).unwrap()
    } else {
        let mu = rng.random_range(-1.0..4.0);
        let sigma = rng.random_range(0.2..3.0);
        FamilyParams::from_pair(Family::DiscretisedLognormal, mu, sigma).unwrap()
    }
}

pub fn dataset(values: &[u64]) -> CountDataset {
    CountDataset::from_shifted(values.to_vec()).unwrap()
}

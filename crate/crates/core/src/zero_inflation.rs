//! Zero inflation: a proportion p of observations is a predetermined 1 (a raw
//! zero), the rest follow the base family f.
//!
//! ```text
//! f(n, p) = (1 - p) f(n)          n > 1
//!         = p + (1 - p) f(1)      n = 1
//! ```
//!
//! The fitting procedure removes k of the r ones, fits f to what is left, and
//! converts that truncated log-likelihood into the full-data log-likelihood of
//! the mixture with p = k/N (see [`zi_loglik_from_truncated`]).

use crate::distributions::{check_support, Family, FamilyParams};
use crate::error::{Error, Result};

/// A base-family distribution mixed with a point mass at 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroInflatedModel {
    base: FamilyParams,
    p: f64,
    k: u64,
}

impl ZeroInflatedModel {
    /// The base model itself (p = 0, k = 0).
    pub fn non_inflated(base: impl Into<FamilyParams>) -> Self {
        ZeroInflatedModel { base: base.into(), p: 0.0, k: 0 }
    }

    /// A mixture with an arbitrary inflation probability. `k` is left at 0
    /// because no dataset is attached.
    pub fn with_probability(base: impl Into<FamilyParams>, p: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::domain(format!("inflation probability must be in [0, 1), got {p}")));
        }
        Ok(ZeroInflatedModel { base: base.into(), p, k: 0 })
    }

    /// The mixture selected by removing `k` ones from a dataset of size `n_total`.
    pub fn with_removed_ones(base: impl Into<FamilyParams>, k: u64, n_total: u64) -> Result<Self> {
        let p = mle_p_for_k(k, n_total)?;
        Ok(ZeroInflatedModel { base: base.into(), p, k })
    }

    pub fn base(&self) -> &FamilyParams {
        &self.base
    }

    pub fn family(&self) -> Family {
        self.base.family()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// ln P(X = n) given the base normaliser.
    #[inline]
    pub(crate) fn ln_pmf_with_norm(&self, n: u64, ln_norm: f64) -> f64 {
        let ln_f = self.base.ln_pmf_with_norm(n, ln_norm);
        if self.p == 0.0 {
            ln_f
        } else if n == 1 {
            ln_mix_one(self.p, ln_f)
        } else {
            (-self.p).ln_1p() + ln_f
        }
    }

    pub fn ln_pmf(&self, n: u64) -> Result<f64> {
        check_support(n)?;
        Ok(self.ln_pmf_with_norm(n, self.base.ln_norm()))
    }

    pub(crate) fn cdf_unchecked(&self, n: u64) -> f64 {
        if n == 1 {
            return self.ln_pmf_with_norm(1, self.base.ln_norm()).exp();
        }
        // p + (1 - p) F(n) = 1 - (1 - p) S(n)
        let ln_sf = (-self.p).ln_1p() + self.base.ln_sf_unchecked(n);
        -ln_sf.exp_m1()
    }
}

/// ln(p + (1 - p) e^{ln_f1}).
fn ln_mix_one(p: f64, ln_f1: f64) -> f64 {
    if p == 0.0 {
        return ln_f1;
    }
    let a = p.ln();
    let b = (-p).ln_1p() + ln_f1;
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

pub fn zi_pmf(n: u64, model: &ZeroInflatedModel) -> Result<f64> {
    model.ln_pmf(n).map(f64::exp)
}

/// p + (1 - p) F(n).
pub fn zi_cdf(n: u64, model: &ZeroInflatedModel) -> Result<f64> {
    check_support(n)?;
    Ok(model.cdf_unchecked(n))
}

/// Maximum-likelihood inflation probability when k of N observations are removed.
pub fn mle_p_for_k(k: u64, n_total: u64) -> Result<f64> {
    if k >= n_total {
        return Err(Error::domain(format!(
            "cannot attribute k = {k} of N = {n_total} observations to inflation"
        )));
    }
    Ok(k as f64 / n_total as f64)
}

/// Converts a base-family log-likelihood on the dataset with k ones removed
/// into the zero-inflated log-likelihood on the full dataset, with p = k/N:
///
/// ```text
/// trunc - (r - k) ln f1 + (N - r) ln(1 - k/N) + r ln(k/N + (1 - k/N) f1)
/// ```
///
/// `f1` is the base pmf at 1 under the parameters fitted to the truncated data.
pub fn zi_loglik_from_truncated(
    trunc_loglik: f64,
    f1: f64,
    k: u64,
    r: u64,
    n_total: u64,
) -> Result<f64> {
    if !(f1 > 0.0 && f1 < 1.0) {
        return Err(Error::domain(format!("f1 must lie in (0, 1), got {f1}")));
    }
    zi_loglik_from_truncated_ln(trunc_loglik, f1.ln(), k, r, n_total)
}

/// Same as [`zi_loglik_from_truncated`] with f1 supplied as ln f1, which keeps
/// precision when f1 underflows.
pub fn zi_loglik_from_truncated_ln(
    trunc_loglik: f64,
    ln_f1: f64,
    k: u64,
    r: u64,
    n_total: u64,
) -> Result<f64> {
    if k > r {
        return Err(Error::domain(format!("k = {k} exceeds the ones count r = {r}")));
    }
    if r > n_total {
        return Err(Error::domain(format!("ones count r = {r} exceeds N = {n_total}")));
    }
    if !(ln_f1 < 0.0) {
        return Err(Error::domain(format!("ln f1 must be negative, got {ln_f1}")));
    }
    let p = mle_p_for_k(k, n_total)?;
    if k == 0 {
        return Ok(trunc_loglik);
    }
    let kept_ones = (r - k) as f64;
    let others = (n_total - r) as f64;
    Ok(trunc_loglik - kept_ones * ln_f1
        + others * (-p).ln_1p()
        + r as f64 * ln_mix_one(p, ln_f1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{DlnParams, HookedParams};

    fn dln(mu: f64, sigma: f64) -> FamilyParams {
        DlnParams::new(mu, sigma).unwrap().into()
    }

    #[test]
    fn degenerate_mixture_is_base() {
        let base = dln(2.5, 1.2);
        let m = ZeroInflatedModel::non_inflated(base);
        for n in 1..40 {
            assert_eq!(zi_pmf(n, &m).unwrap(), base.pmf(n).unwrap());
        }
    }

    #[test]
    fn extra_mass_at_one_is_p() {
        let base = dln(0.5, 1.0);
        let m = ZeroInflatedModel::with_probability(base, 0.3).unwrap();
        let f1 = base.pmf(1).unwrap();
        let diff = zi_pmf(1, &m).unwrap() - 0.7 * f1;
        assert!((diff - 0.3).abs() < 1e-15);
    }

    #[test]
    fn mass_moves_towards_one() {
        let base: FamilyParams = HookedParams::new(2.5, 3.0).unwrap().into();
        let m = ZeroInflatedModel::with_probability(base, 0.2).unwrap();
        for n in 2..100 {
            assert!(zi_pmf(n, &m).unwrap() < base.pmf(n).unwrap());
        }
    }

    #[test]
    fn cdf_starts_at_pmf_and_dominates_p() {
        let m = ZeroInflatedModel::with_probability(dln(2.5, 1.2), 0.15).unwrap();
        assert!((zi_cdf(1, &m).unwrap() - zi_pmf(1, &m).unwrap()).abs() < 1e-15);
        for n in 1..200 {
            assert!(zi_cdf(n, &m).unwrap() >= 0.15);
        }
    }

    #[test]
    fn invalid_probability_rejected() {
        assert!(ZeroInflatedModel::with_probability(dln(0.0, 1.0), 1.0).is_err());
        assert!(ZeroInflatedModel::with_probability(dln(0.0, 1.0), -0.1).is_err());
    }

    #[test]
    fn mle_p_examples() {
        assert_eq!(mle_p_for_k(0, 100).unwrap(), 0.0);
        assert_eq!(mle_p_for_k(7, 100).unwrap(), 0.07);
        let p = mle_p_for_k(1570, 4848).unwrap();
        assert!((p - 0.323_844_884_488_448_8).abs() < 1e-15);
        assert!(mle_p_for_k(100, 100).is_err());
    }

    #[test]
    fn no_inflation_returns_truncated_loglik_exactly() {
        let v = zi_loglik_from_truncated(-123.456, 0.37, 0, 12, 50).unwrap();
        assert_eq!(v, -123.456);
    }

    #[test]
    fn conversion_errors() {
        assert!(zi_loglik_from_truncated(-1.0, 0.3, 5, 4, 10).is_err());
        assert!(zi_loglik_from_truncated(-1.0, 1.0, 1, 4, 10).is_err());
        assert!(zi_loglik_from_truncated(-1.0, 0.0, 1, 4, 10).is_err());
        assert!(zi_loglik_from_truncated(-1.0, 0.3, 10, 10, 10).is_err());
    }

    #[test]
    fn ln_mix_is_stable_when_f1_underflows() {
        let v = ln_mix_one(0.25, -2000.0);
        assert!((v - 0.25f64.ln()).abs() < 1e-15);
    }
}

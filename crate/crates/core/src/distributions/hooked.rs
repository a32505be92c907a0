//! Hooked (shifted) power law on the shifted support n >= 1:
//! f(n) = A (B + n)^(-α), with A = 1 / ζ(α, B + 1).

use super::special::ln_hurwitz_zeta;
use super::check_support;
use crate::error::{Error, Result};

/// Exponent α and shift B of the hooked power law. B is in the shifted-support
/// convention; [`HookedParams::b_unshifted`] gives the value for data without
/// the +1 shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HookedParams {
    alpha: f64,
    b: f64,
}

impl HookedParams {
    pub fn new(alpha: f64, b: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 1.0) {
            return Err(Error::domain(format!(
                "hooked power law needs alpha > 1, got {alpha}"
            )));
        }
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::domain(format!("hooked power law needs B > 0, got {b}")));
        }
        Ok(HookedParams { alpha, b })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// B in the shifted convention (support starts at 1).
    pub fn b(&self) -> f64 {
        self.b
    }

    /// B for the same distribution written on unshifted counts n >= 0.
    pub fn b_unshifted(&self) -> f64 {
        self.b + 1.0
    }

    /// ln A.
    pub fn ln_norm(&self) -> f64 {
        -ln_hurwitz_zeta(self.alpha, self.b + 1.0)
    }

    /// ln f(n) for n >= 1, with the normaliser supplied by the caller.
    #[inline]
    pub(crate) fn ln_pmf_with_norm(&self, n: u64, ln_norm: f64) -> f64 {
        ln_norm - self.alpha * (self.b + n as f64).ln()
    }

    pub(crate) fn ln_pmf_unchecked(&self, n: u64) -> f64 {
        self.ln_pmf_with_norm(n, self.ln_norm())
    }

    /// ln P(X > n) = ln ζ(α, B + n + 1) - ln ζ(α, B + 1).
    pub(crate) fn ln_sf_unchecked(&self, n: u64) -> f64 {
        ln_hurwitz_zeta(self.alpha, self.b + n as f64 + 1.0) + self.ln_norm()
    }

    pub(crate) fn cdf_unchecked(&self, n: u64) -> f64 {
        if n == 1 {
            return self.ln_pmf_unchecked(1).exp();
        }
        -(self.ln_sf_unchecked(n).exp_m1())
    }

    /// Upper bound on P(X > n): A ∫_n^∞ (B + x)^(-α) dx = A (B + n)^(1-α) / (α - 1).
    pub fn tail_bound(&self, n: u64) -> f64 {
        let ln = self.ln_norm() + (1.0 - self.alpha) * (self.b + n as f64).ln()
            - (self.alpha - 1.0).ln();
        ln.exp().min(1.0)
    }
}

/// Normalising constant A = 1 / Σ_{n≥1} (B + n)^(-α).
pub fn hooked_norm(params: &HookedParams) -> f64 {
    params.ln_norm().exp()
}

pub fn hooked_pmf(n: u64, params: &HookedParams) -> Result<f64> {
    check_support(n)?;
    Ok(params.ln_pmf_unchecked(n).exp())
}

pub fn hooked_ln_pmf(n: u64, params: &HookedParams) -> Result<f64> {
    check_support(n)?;
    Ok(params.ln_pmf_unchecked(n))
}

/// P(X <= n) = Σ_{m=1}^{n} f(m), evaluated in closed form through the zeta tail.
pub fn hooked_cdf(n: u64, params: &HookedParams) -> Result<f64> {
    check_support(n)?;
    Ok(params.cdf_unchecked(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_non_convergent_params() {
        assert!(HookedParams::new(1.0, 2.0).is_err());
        assert!(HookedParams::new(0.5, 2.0).is_err());
        assert!(HookedParams::new(2.0, 0.0).is_err());
        assert!(HookedParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn norm_for_alpha3_b2_is_zeta3_minus_first_two_terms() {
        // Σ_{n≥1} (2 + n)^-3 = ζ(3) - 1 - 1/8
        let zeta3 = 1.202_056_903_159_594_3;
        let p = HookedParams::new(3.0, 2.0).unwrap();
        let a = hooked_norm(&p);
        assert!((1.0 / a - (zeta3 - 1.125)).abs() < 1e-14);
    }

    #[test]
    fn tiny_b_approaches_zeta2() {
        let p = HookedParams::new(2.0, 1e-9).unwrap();
        let expected = PI * PI / 6.0;
        assert!((1.0 / hooked_norm(&p) - expected).abs() < 1e-8);
    }

    #[test]
    fn zero_is_outside_support() {
        let p = HookedParams::new(3.0, 2.0).unwrap();
        assert!(hooked_pmf(0, &p).is_err());
        assert!(hooked_cdf(0, &p).is_err());
    }

    #[test]
    fn pmf_strictly_decreasing() {
        let p = HookedParams::new(2.3, 15.0).unwrap();
        let mut prev = hooked_pmf(1, &p).unwrap();
        for n in 2..500 {
            let cur = hooked_pmf(n, &p).unwrap();
            assert!(cur < prev);
            prev = cur;
        }
    }

    #[test]
    fn cdf_first_step_and_increments() {
        let p = HookedParams::new(3.0, 2.0).unwrap();
        let c1 = hooked_cdf(1, &p).unwrap();
        assert!((c1 - hooked_pmf(1, &p).unwrap()).abs() < 1e-15);
        for n in 2..50 {
            let d = hooked_cdf(n, &p).unwrap() - hooked_cdf(n - 1, &p).unwrap();
            assert!((d - hooked_pmf(n, &p).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn b_conventions_differ_by_one() {
        let p = HookedParams::new(3.0, 19.4).unwrap();
        assert_eq!(p.b_unshifted(), 20.4);
    }
}

//! Discretised lognormal: the lognormal density integrated over [n - 0.5, n + 0.5]
//! for each positive integer n, renormalised by the mass above 0.5.

use super::check_support;
use super::special::{ln_normal_band, ln_normal_sf, normal_sf};
use crate::error::{Error, Result};

const LN_HALF: f64 = -std::f64::consts::LN_2;

/// Location μ and scale σ of the underlying lognormal, in log units of shifted counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DlnParams {
    mu: f64,
    sigma: f64,
}

impl DlnParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::domain(format!("lognormal mu must be finite, got {mu}")));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::domain(format!(
                "lognormal sigma must be > 0, got {sigma}"
            )));
        }
        Ok(DlnParams { mu, sigma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    #[inline]
    fn z(&self, x: f64) -> f64 {
        (x.ln() - self.mu) / self.sigma
    }

    /// ln A where A = 1 - Φ((ln 0.5 - μ)/σ).
    pub fn ln_norm(&self) -> f64 {
        ln_normal_sf((LN_HALF - self.mu) / self.sigma)
    }

    #[inline]
    pub(crate) fn ln_pmf_with_norm(&self, n: u64, ln_norm: f64) -> f64 {
        let lo = self.z(n as f64 - 0.5);
        // The width ln((n + ½)/(n - ½))/σ taken directly keeps narrow far-tail intervals accurate.
        let width = (1.0 / (n as f64 - 0.5)).ln_1p() / self.sigma;
        ln_normal_band(lo, width) - ln_norm
    }

    pub(crate) fn ln_pmf_unchecked(&self, n: u64) -> f64 {
        self.ln_pmf_with_norm(n, self.ln_norm())
    }

    /// ln P(X > n) = ln Φc(z(n + 0.5)) - ln A.
    pub(crate) fn ln_sf_unchecked(&self, n: u64) -> f64 {
        ln_normal_sf(self.z(n as f64 + 0.5)) - self.ln_norm()
    }

    pub(crate) fn cdf_unchecked(&self, n: u64) -> f64 {
        if n == 1 {
            return self.ln_pmf_unchecked(1).exp();
        }
        -(self.ln_sf_unchecked(n).exp_m1())
    }

    /// Upper bound on P(X > n) from the Chernoff bound Φc(z) <= exp(-z²/2)/2
    /// for z >= 0; 1 otherwise.
    pub fn tail_bound(&self, n: u64) -> f64 {
        let z = self.z(n as f64 + 0.5);
        if z <= 0.0 {
            return 1.0;
        }
        (0.5 * (-0.5 * z * z).exp() / self.ln_norm().exp()).min(1.0)
    }
}

/// Normalising constant A = ∫_{0.5}^∞ lognormal-pdf(x; μ, σ) dx.
pub fn dln_norm(params: &DlnParams) -> f64 {
    normal_sf((LN_HALF - params.mu) / params.sigma)
}

pub fn dln_pmf(n: u64, params: &DlnParams) -> Result<f64> {
    check_support(n)?;
    Ok(params.ln_pmf_unchecked(n).exp())
}

pub fn dln_ln_pmf(n: u64, params: &DlnParams) -> Result<f64> {
    check_support(n)?;
    Ok(params.ln_pmf_unchecked(n))
}

/// P(X <= n) = [Φ(z(n + 0.5)) - Φ(z(0.5))] / A, evaluated as 1 - Φc(z(n + 0.5)) / A.
pub fn dln_cdf(n: u64, params: &DlnParams) -> Result<f64> {
    check_support(n)?;
    Ok(params.cdf_unchecked(n))
}

//! The two base families on the shifted support n >= 1.

pub mod dln;
pub mod hooked;
pub mod special;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use dln::{dln_cdf, dln_ln_pmf, dln_norm, dln_pmf, DlnParams};
pub use hooked::{hooked_cdf, hooked_ln_pmf, hooked_norm, hooked_pmf, HookedParams};
pub use special::{hurwitz_zeta, ln_hurwitz_zeta, normal_cdf};

use crate::error::{Error, Result};

/// Parameter box searched by the optimizer. Open lower bounds are approached
/// but never reached.
pub mod bounds {
    pub const ALPHA: (f64, f64) = (1.0001, 50.0);
    pub const B: (f64, f64) = (1e-6, 1e6);
    pub const SIGMA: (f64, f64) = (1e-4, 20.0);
    pub const MU: (f64, f64) = (-20.0, 20.0);
}

pub(crate) fn check_support(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::domain("support starts at n = 1 (counts are shifted by +1)"))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "dln")]
    DiscretisedLognormal,
    #[serde(rename = "hooked")]
    HookedPowerLaw,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::DiscretisedLognormal => f.write_str("dln"),
            Family::HookedPowerLaw => f.write_str("hooked"),
        }
    }
}

/// Parameters of either base family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyParams {
    Dln(DlnParams),
    Hooked(HookedParams),
}

impl From<DlnParams> for FamilyParams {
    fn from(p: DlnParams) -> Self {
        FamilyParams::Dln(p)
    }
}

impl From<HookedParams> for FamilyParams {
    fn from(p: HookedParams) -> Self {
        FamilyParams::Hooked(p)
    }
}

impl FamilyParams {
    pub fn family(&self) -> Family {
        match self {
            FamilyParams::Dln(_) => Family::DiscretisedLognormal,
            FamilyParams::Hooked(_) => Family::HookedPowerLaw,
        }
    }

    /// Build from the family's two parameters in order (μ, σ) or (α, B).
    pub fn from_pair(family: Family, first: f64, second: f64) -> Result<Self> {
        match family {
            Family::DiscretisedLognormal => DlnParams::new(first, second).map(Into::into),
            Family::HookedPowerLaw => HookedParams::new(first, second).map(Into::into),
        }
    }

    /// (μ, σ) or (α, B_shifted).
    pub fn pair(&self) -> (f64, f64) {
        match self {
            FamilyParams::Dln(p) => (p.mu(), p.sigma()),
            FamilyParams::Hooked(p) => (p.alpha(), p.b()),
        }
    }

    pub fn ln_norm(&self) -> f64 {
        match self {
            FamilyParams::Dln(p) => p.ln_norm(),
            FamilyParams::Hooked(p) => p.ln_norm(),
        }
    }

    #[inline]
    pub(crate) fn ln_pmf_with_norm(&self, n: u64, ln_norm: f64) -> f64 {
        match self {
            FamilyParams::Dln(p) => p.ln_pmf_with_norm(n, ln_norm),
            FamilyParams::Hooked(p) => p.ln_pmf_with_norm(n, ln_norm),
        }
    }

    pub fn ln_pmf(&self, n: u64) -> Result<f64> {
        check_support(n)?;
        Ok(self.ln_pmf_with_norm(n, self.ln_norm()))
    }

    pub fn pmf(&self, n: u64) -> Result<f64> {
        self.ln_pmf(n).map(f64::exp)
    }

    /// pmf(1), pmf(2), ... with the normaliser evaluated once.
    pub fn pmf_iter(&self) -> impl Iterator<Item = f64> + '_ {
        let ln_norm = self.ln_norm();
        (1..).map(move |n| self.ln_pmf_with_norm(n, ln_norm).exp())
    }

    pub fn cdf(&self, n: u64) -> Result<f64> {
        check_support(n)?;
        Ok(match self {
            FamilyParams::Dln(p) => p.cdf_unchecked(n),
            FamilyParams::Hooked(p) => p.cdf_unchecked(n),
        })
    }

    /// ln P(X > n).
    pub fn ln_sf(&self, n: u64) -> Result<f64> {
        check_support(n)?;
        Ok(self.ln_sf_unchecked(n))
    }

    pub(crate) fn ln_sf_unchecked(&self, n: u64) -> f64 {
        match self {
            FamilyParams::Dln(p) => p.ln_sf_unchecked(n),
            FamilyParams::Hooked(p) => p.ln_sf_unchecked(n),
        }
    }

    /// Explicit upper bound on P(X > n), nonincreasing in n.
    pub fn tail_bound(&self, n: u64) -> f64 {
        match self {
            FamilyParams::Dln(p) => p.tail_bound(n),
            FamilyParams::Hooked(p) => p.tail_bound(n),
        }
    }
}

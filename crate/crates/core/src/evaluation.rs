//! Log-likelihood, AIC, the Kolmogorov-Smirnov statistic and the four-model
//! comparison.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::Family;
use crate::error::{Error, Result};
use crate::fitting::FitResult;
use crate::ingest::CountDataset;
use crate::zero_inflation::ZeroInflatedModel;

/// Log-likelihoods closer than this count as tied.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Below this maximum value K-S evaluates every integer in 1..=max; above it
/// only the ends of each run of constant empirical CDF (where the sup of a
/// monotone difference is attained).
const KS_FULL_SCAN_LIMIT: u64 = 1_000_000;

/// The four models, in declared order. Ties are broken towards the earlier one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "DLN")]
    Dln,
    #[serde(rename = "ZIDL")]
    Zidl,
    #[serde(rename = "Hooked")]
    Hooked,
    #[serde(rename = "ZIHP")]
    Zihp,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Dln, ModelKind::Zidl, ModelKind::Hooked, ModelKind::Zihp];

    pub fn new(family: Family, zero_inflated: bool) -> Self {
        match (family, zero_inflated) {
            (Family::DiscretisedLognormal, false) => ModelKind::Dln,
            (Family::DiscretisedLognormal, true) => ModelKind::Zidl,
            (Family::HookedPowerLaw, false) => ModelKind::Hooked,
            (Family::HookedPowerLaw, true) => ModelKind::Zihp,
        }
    }

    pub fn family(self) -> Family {
        match self {
            ModelKind::Dln | ModelKind::Zidl => Family::DiscretisedLognormal,
            ModelKind::Hooked | ModelKind::Zihp => Family::HookedPowerLaw,
        }
    }

    pub fn is_zero_inflated(self) -> bool {
        matches!(self, ModelKind::Zidl | ModelKind::Zihp)
    }

    pub fn n_params(self) -> u32 {
        if self.is_zero_inflated() {
            3
        } else {
            2
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Dln => "DLN",
            ModelKind::Zidl => "ZIDL",
            ModelKind::Hooked => "Hooked",
            ModelKind::Zihp => "ZIHP",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::usage(format!("unknown model '{s}' (expected DLN, ZIDL, Hooked or ZIHP)")))
    }
}

/// Σ ln f(x_i, p) over the dataset.
pub fn log_likelihood(data: &CountDataset, model: &ZeroInflatedModel) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let ln_norm = model.base().ln_norm();
    Ok(data
        .histogram()
        .iter()
        .map(|&(v, c)| c as f64 * model.ln_pmf_with_norm(v, ln_norm))
        .sum())
}

/// 2·n_params - 2·loglik.
pub fn aic(loglik: f64, n_params: u32) -> f64 {
    2.0 * n_params as f64 - 2.0 * loglik
}

/// True when the zero-inflated log-likelihood beats the base one by more than
/// the one-parameter AIC penalty.
pub fn is_improvement(zi_loglik: f64, base_loglik: f64) -> bool {
    zi_loglik - base_loglik > 1.0
}

/// sup_n |F_emp(n) - F_model(n)| over the integers 1..=max(data).
pub fn ks_statistic(data: &CountDataset, model: &ZeroInflatedModel) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n_total = data.n_total() as f64;
    let hist = data.histogram();
    let mut sup: f64 = 0.0;
    let mut below = 0u64;
    let mut visit = |n: u64, below: u64| {
        let emp = below as f64 / n_total;
        let d = (emp - model.cdf_unchecked(n)).abs();
        if d > sup {
            sup = d;
        }
    };

    if data.max() <= KS_FULL_SCAN_LIMIT {
        let mut next = hist.iter().peekable();
        for n in 1..=data.max() {
            if let Some(&&(v, c)) = next.peek() {
                if v == n {
                    below += c;
                    next.next();
                }
            }
            visit(n, below);
        }
    } else {
        for (i, &(v, c)) in hist.iter().enumerate() {
            if i == 0 && v > 1 {
                visit(1, 0);
                visit(v - 1, 0);
            }
            below += c;
            visit(v, below);
            if let Some(&(next_v, _)) = hist.get(i + 1) {
                if next_v > v + 1 {
                    visit(next_v - 1, below);
                }
            }
        }
    }
    Ok(sup.clamp(0.0, 1.0))
}

/// The four fits for one dataset and the AIC verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelComparison {
    /// In [`ModelKind::ALL`] order.
    pub results: Vec<FitResult>,
    pub winner: ModelKind,
    /// ZIDL beats DLN by more than 1 in log-likelihood.
    pub zidl_improves: bool,
    /// ZIHP beats Hooked by more than 1 in log-likelihood.
    pub zihp_improves: bool,
    /// Set when the winner was decided by declared order among tied models.
    pub tie_note: Option<String>,
}

impl ModelComparison {
    /// `results` must hold one fit per model kind, in any order.
    pub fn from_results(mut results: Vec<FitResult>) -> Result<Self> {
        results.sort_by_key(|r| r.kind());
        let kinds: Vec<ModelKind> = results.iter().map(FitResult::kind).collect();
        if kinds != ModelKind::ALL {
            return Err(Error::usage(format!("expected one fit per model, got {kinds:?}")));
        }
        let min_aic = results.iter().map(|r| r.aic).fold(f64::INFINITY, f64::min);
        let argmin = results.iter().position(|r| r.aic == min_aic).unwrap_or(0);
        // Earliest model whose log-likelihood ties the argmin's with equal parameter count.
        let best = &results[argmin];
        let winner_idx = results
            .iter()
            .position(|r| {
                r.n_params == best.n_params && (r.loglik - best.loglik).abs() <= TIE_TOLERANCE
            })
            .unwrap_or(argmin);
        let tied: Vec<ModelKind> = results
            .iter()
            .filter(|r| r.n_params == best.n_params && (r.loglik - best.loglik).abs() <= TIE_TOLERANCE)
            .map(FitResult::kind)
            .collect();
        let tie_note = (tied.len() > 1).then(|| {
            let names: Vec<&str> = tied.iter().map(|k| k.as_str()).collect();
            format!("tie within {TIE_TOLERANCE:e} log-likelihood among {}; declared order picks {}", names.join(", "), tied[0])
        });
        Ok(ModelComparison {
            zidl_improves: is_improvement(results[1].loglik, results[0].loglik),
            zihp_improves: is_improvement(results[3].loglik, results[2].loglik),
            winner: results[winner_idx].kind(),
            tie_note,
            results,
        })
    }

    pub fn get(&self, kind: ModelKind) -> &FitResult {
        &self.results[kind as usize]
    }

    pub fn winner_result(&self) -> &FitResult {
        self.get(self.winner)
    }

    pub fn improves(&self, family: Family) -> bool {
        match family {
            Family::DiscretisedLognormal => self.zidl_improves,
            Family::HookedPowerLaw => self.zihp_improves,
        }
    }
}

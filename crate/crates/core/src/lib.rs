//! Discrete heavy-tailed models for count data.
//!
//! Fits four models to (citation) count datasets: the discretised lognormal,
//! the hooked power law, and the zero-inflated variant of each. Models are
//! compared by AIC and described by the Kolmogorov-Smirnov statistic. All
//! models live on *shifted* counts: every raw count has 1 added on ingest, so
//! raw zeros become ones and the support starts at 1.
//!
//! The crate is organised bottom-up:
//!
//! - [`distributions`]: pmf, cdf and normalisers of the two base families.
//! - [`zero_inflation`]: the mixture with a point mass at 1, and conversion of
//!   a truncated-data log-likelihood into a full-data one.
//! - [`fitting`]: Nelder-Mead maximum likelihood and the k-scan over inflated ones.
//! - [`evaluation`]: log-likelihood, AIC, K-S, and the four-model comparison.
//! - [`sampling`]: reproducible synthetic corpora.
//! - [`ingest`]: loading, shifting, summarising and journal filtering.
//! - [`report`]: table rows, CDF curves and the JSON result schema.

pub mod distributions;
pub mod error;
pub mod evaluation;
pub mod fitting;
pub mod ingest;
pub mod optimize;
pub mod report;
pub mod sampling;
pub mod zero_inflation;

pub use distributions::{DlnParams, Family, FamilyParams, HookedParams};
pub use error::{Error, Result};
pub use evaluation::{ModelComparison, ModelKind};
pub use fitting::{FitResult, SearchConfig};
pub use ingest::{CountDataset, RawCounts};
pub use zero_inflation::ZeroInflatedModel;

//! JSON records, table rows and CDF curves written by the command-line tool.
//!
//! Every number in a table row or curve is computed from a [`FitRecord`], so a
//! saved JSON file is enough to reproduce any report.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distributions::{DlnParams, FamilyParams, HookedParams};
use crate::error::{Error, Result};
use crate::evaluation::{ModelComparison, ModelKind};
use crate::fitting::FitResult;
use crate::ingest::CountDataset;
use crate::zero_inflation::ZeroInflatedModel;

/// Fitted parameters. Hooked B is given on the shifted support (n >= 1) used
/// for fitting and on the raw support (n >= 0), where it is one larger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamsRecord {
    Dln { mu: f64, sigma: f64 },
    Hooked { alpha: f64, b_shifted: f64, b_unshifted: f64 },
}

impl From<&FamilyParams> for ParamsRecord {
    fn from(p: &FamilyParams) -> Self {
        match p {
            FamilyParams::Dln(d) => ParamsRecord::Dln { mu: d.mu(), sigma: d.sigma() },
            FamilyParams::Hooked(h) => ParamsRecord::Hooked {
                alpha: h.alpha(),
                b_shifted: h.b(),
                b_unshifted: h.b_unshifted(),
            },
        }
    }
}

impl ParamsRecord {
    pub fn to_params(&self) -> Result<FamilyParams> {
        Ok(match *self {
            ParamsRecord::Dln { mu, sigma } => DlnParams::new(mu, sigma)?.into(),
            ParamsRecord::Hooked { alpha, b_shifted, .. } => HookedParams::new(alpha, b_shifted)?.into(),
        })
    }
}

/// Serialised form of a [`FitResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub model: ModelKind,
    pub params: ParamsRecord,
    pub p: f64,
    pub k: u64,
    pub n_total: u64,
    pub r: u64,
    pub loglik: f64,
    pub aic: f64,
    pub ks: f64,
    pub converged: bool,
    pub evaluations: u64,
    /// Always true: the model describes counts with 1 added.
    #[serde(default = "default_shifted")]
    pub shifted: bool,
    #[serde(default)]
    pub diagnostics: Vec<String>,
}

fn default_shifted() -> bool {
    true
}

impl From<&FitResult> for FitRecord {
    fn from(f: &FitResult) -> Self {
        FitRecord {
            model: f.kind(),
            params: f.model.base().into(),
            p: f.model.p(),
            k: f.model.k(),
            n_total: f.n_total,
            r: f.r,
            loglik: f.loglik,
            aic: f.aic,
            ks: f.ks,
            converged: f.converged,
            evaluations: f.evaluations,
            shifted: true,
            diagnostics: f.diagnostics.clone(),
        }
    }
}

impl FitRecord {
    /// Rebuilds the fitted model. Records that do not use the shifted support are rejected.
    pub fn to_model(&self) -> Result<ZeroInflatedModel> {
        if !self.shifted {
            return Err(Error::usage(
                "model was fitted to unshifted counts; this tool works on counts + 1",
            ));
        }
        let base = self.params.to_params()?;
        if base.family() != self.model.family() {
            return Err(Error::usage(format!("parameters do not match model {}", self.model)));
        }
        if !self.model.is_zero_inflated() {
            return Ok(ZeroInflatedModel::non_inflated(base));
        }
        if self.k > 0 && self.n_total > 0 {
            ZeroInflatedModel::with_removed_ones(base, self.k, self.n_total)
        } else {
            ZeroInflatedModel::with_probability(base, self.p)
        }
    }
}

/// Output of the `fit` command: the base fit, then the inflated one if requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOutput {
    pub results: Vec<FitRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    #[serde(rename = "ZIDL")]
    pub zidl: bool,
    #[serde(rename = "ZIHP")]
    pub zihp: bool,
}

/// Output of the `compare` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub results: Vec<FitRecord>,
    pub winner: ModelKind,
    pub improvement: Improvement,
    pub tie_note: Option<String>,
}

impl From<&ModelComparison> for ComparisonRecord {
    fn from(c: &ModelComparison) -> Self {
        ComparisonRecord {
            results: c.results.iter().map(FitRecord::from).collect(),
            winner: c.winner,
            improvement: Improvement { zidl: c.zidl_improves, zihp: c.zihp_improves },
            tie_note: c.tie_note.clone(),
        }
    }
}

/// Any of the JSON files the tool writes, for reading a model back.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ModelFile {
    Comparison(ComparisonRecord),
    Fits(FitOutput),
    Single(FitRecord),
}

impl ModelFile {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// The record for `kind`, or by default the comparison winner / the last fit.
    pub fn select(&self, kind: Option<ModelKind>) -> Result<&FitRecord> {
        let records: &[FitRecord] = match self {
            ModelFile::Comparison(c) => &c.results,
            ModelFile::Fits(f) => &f.results,
            ModelFile::Single(r) => std::slice::from_ref(r),
        };
        let wanted = match (kind, self) {
            (Some(k), _) => Some(k),
            (None, ModelFile::Comparison(c)) => Some(c.winner),
            (None, _) => None,
        };
        match wanted {
            Some(k) => records
                .iter()
                .find(|r| r.model == k)
                .ok_or_else(|| Error::usage(format!("model file has no {k} fit"))),
            None => records.last().ok_or_else(|| Error::usage("model file has no fits")),
        }
    }
}

/// One row of the fit table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub label: String,
    pub model: ModelKind,
    pub articles: u64,
    /// round(100 k / N), halves away from zero.
    pub uncitable_pct: i64,
    /// 100 k / r: the share of uncited articles attributed to inflation.
    pub uncitable_of_uncited_pct: f64,
    /// r - k.
    pub uncited: u64,
    pub param1: f64,
    pub param2: f64,
    /// Hooked B on the raw support; absent for the lognormal.
    pub b_unshifted: Option<f64>,
    pub ks: f64,
    pub loglik: f64,
}

impl ReportRow {
    pub fn new(label: &str, rec: &FitRecord) -> Self {
        let (param1, param2, b_unshifted) = match rec.params {
            ParamsRecord::Dln { mu, sigma } => (mu, sigma, None),
            ParamsRecord::Hooked { alpha, b_shifted, b_unshifted } => (alpha, b_shifted, Some(b_unshifted)),
        };
        let pct = |num: u64, den: u64| if den == 0 { 0.0 } else { 100.0 * num as f64 / den as f64 };
        ReportRow {
            label: label.to_string(),
            model: rec.model,
            articles: rec.n_total,
            uncitable_pct: pct(rec.k, rec.n_total).round() as i64,
            uncitable_of_uncited_pct: pct(rec.k, rec.r),
            uncited: rec.r - rec.k,
            param1,
            param2,
            b_unshifted,
            ks: rec.ks,
            loglik: rec.loglik,
        }
    }
}

/// Renders rows as a fixed-width table: K-S to 3 decimals, log-likelihood to 1.
pub fn render_table(rows: &[ReportRow]) -> String {
    let mut out = format!(
        "{:<20} {:<7} {:>9} {:>10} {:>8} {:>10} {:>12} {:>12} {:>6} {:>14}\n",
        "label", "model", "articles", "uncitable%", "uncited", "param1", "param2", "B_unshifted", "ks", "loglik"
    );
    for r in rows {
        let b = r.b_unshifted.map_or_else(|| "-".to_string(), |b| format!("{b:.4}"));
        out.push_str(&format!(
            "{:<20} {:<7} {:>9} {:>10} {:>8} {:>10.4} {:>12.4} {:>12} {:>6.3} {:>14.1}\n",
            r.label, r.model.as_str(), r.articles, r.uncitable_pct, r.uncited, r.param1, r.param2, b, r.ks, r.loglik
        ));
    }
    out
}

/// Empirical and fitted CDF at every n in 1..=max(data).
#[derive(Debug, Clone, PartialEq)]
pub struct CdfCurve {
    pub model: ModelKind,
    pub params: ParamsRecord,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub n: u64,
    pub empirical: f64,
    pub fitted: f64,
}

impl CdfCurve {
    pub fn new(data: &CountDataset, model: &ZeroInflatedModel) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let n_total = data.n_total() as f64;
        let mut hist = data.histogram().iter().peekable();
        let mut below = 0u64;
        let points = (1..=data.max())
            .map(|n| {
                if let Some(&&(v, c)) = hist.peek() {
                    if v == n {
                        below += c;
                        hist.next();
                    }
                }
                CurvePoint { n, empirical: below as f64 / n_total, fitted: model.cdf_unchecked(n) }
            })
            .collect();
        Ok(CdfCurve {
            model: ModelKind::new(model.family(), model.p() > 0.0),
            params: model.base().into(),
            points,
        })
    }

    pub fn max_difference(&self) -> f64 {
        self.points
            .iter()
            .map(|p| (p.empirical - p.fitted).abs())
            .fold(0.0, f64::max)
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["n", "empirical", "fitted"])?;
        for p in &self.points {
            wtr.write_record([p.n.to_string(), p.empirical.to_string(), p.fitted.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Writes to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn to_json(value: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

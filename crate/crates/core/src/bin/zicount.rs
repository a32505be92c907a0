//! Command-line front end: fit, compare, curves, simulate, filter.
//!
//! Exit status: 0 on success, 1 when a fit did not converge cleanly
//! (degenerate data, parameter at a bound, iteration budget), 2 on bad input.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use zicount::distributions::{Family, FamilyParams};
use zicount::evaluation::ModelKind;
use zicount::fitting::{fit_all_models, fit_base, fit_zero_inflated, SearchConfig};
use zicount::ingest::{filter_journals, CountDataset, InputFormat};
use zicount::report::{
    render_table, to_json, write_atomic, CdfCurve, ComparisonRecord, FitOutput, FitRecord, ModelFile,
    ParamsRecord, ReportRow,
};
use zicount::sampling::{sample_with, JournalLayout, Magazine, SyntheticSpec};
use zicount::{Error, Result, ZeroInflatedModel};

#[derive(Parser)]
#[command(name = "zicount", version, about = "Zero-inflated models for citation counts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one family, optionally with its zero-inflated variant.
    Fit(FitArgs),
    /// Fit all four models and pick the lowest AIC.
    Compare(CompareArgs),
    /// Empirical and fitted CDF over 1..=max as CSV.
    Curves(CurvesArgs),
    /// Generate a synthetic dataset.
    Simulate(SimulateArgs),
    /// Drop journals whose cited share is below a threshold.
    Filter(FilterArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Plain,
    Csv,
}

impl From<FormatArg> for InputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Plain => InputFormat::Plain,
            FormatArg::Csv => InputFormat::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Dln,
    Hooked,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Dln => Family::DiscretisedLognormal,
            FamilyArg::Hooked => Family::HookedPowerLaw,
        }
    }
}

#[derive(Args)]
struct InputArgs {
    /// Counts file (raw, unshifted).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "plain")]
    format: FormatArg,
}

impl InputArgs {
    fn load(&self) -> Result<CountDataset> {
        CountDataset::load(&self.input, self.format.into())
    }
}

#[derive(Args)]
struct SearchArgs {
    /// Scan every N-th k.
    #[arg(long, default_value_t = 1)]
    stride: u64,
    /// After a strided scan, rescan within one stride of the best k.
    #[arg(long)]
    refine: bool,
    /// Accepted for interface symmetry; fits are deterministic and do not use it.
    #[arg(long)]
    seed: Option<u64>,
    /// Fit every k from the cold start instead of the previous k's optimum.
    #[arg(long)]
    no_warm_start: bool,
    /// Run independent fits concurrently.
    #[arg(long, conflicts_with = "serial")]
    parallel: bool,
    /// Run everything on one thread (the default).
    #[arg(long)]
    serial: bool,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            stride: self.stride,
            refine: self.refine,
            warm_start: !self.no_warm_start,
            parallel: self.parallel,
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Also fit the zero-inflated variant.
    #[arg(long)]
    zero_inflated: bool,
    #[command(flatten)]
    search: SearchArgs,
    /// JSON output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Label for the table rows (defaults to the input file stem).
    #[arg(long)]
    label: Option<String>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    label: Option<String>,
}

#[derive(Args)]
struct CurvesArgs {
    #[command(flatten)]
    input: InputArgs,
    /// JSON written by fit or compare.
    #[arg(long)]
    model_file: PathBuf,
    /// Which fit to use (DLN, ZIDL, Hooked, ZIHP); defaults to the winner or the last fit.
    #[arg(long)]
    model: Option<ModelKind>,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// DLN, ZIDL, Hooked or ZIHP.
    #[arg(long)]
    model: ModelKind,
    /// Lognormal mu (log scale of counts + 1).
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Hooked B on the shifted support (counts + 1).
    #[arg(long)]
    b: Option<f64>,
    /// Inflation probability for ZIDL and ZIHP.
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Deal articles to this many journals (csv output gains a journal column).
    #[arg(long)]
    journals: Option<u64>,
    /// Add a magazine journal, ARTICLES:Q, where Q in [0.9, 1] is its share of ones. Repeatable.
    #[arg(long, value_parser = parse_magazine)]
    magazine: Vec<Magazine>,
    #[arg(long, value_enum, default_value = "plain")]
    format: FormatArg,
    #[arg(long)]
    parallel: bool,
    /// Dataset output path.
    #[arg(long)]
    out: PathBuf,
    /// Ground-truth JSON path (defaults to OUT.truth.json).
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct FilterArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Minimum cited percentage a journal needs to be kept.
    #[arg(long)]
    threshold: f64,
    /// Filtered csv output path.
    #[arg(long)]
    out: PathBuf,
    /// Removal report JSON path; stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn parse_magazine(s: &str) -> std::result::Result<Magazine, String> {
    let (a, q) = s.split_once(':').ok_or("expected ARTICLES:Q")?;
    Ok(Magazine {
        articles: a.parse().map_err(|e| format!("articles: {e}"))?,
        q: q.parse().map_err(|e| format!("q: {e}"))?,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Curves(a) => cmd_curves(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Filter(a) => cmd_filter(a),
    };
    match outcome {
        Ok(Status::Clean) => ExitCode::SUCCESS,
        Ok(Status::Warned) => ExitCode::from(1),
        Err(e) => {
            eprintln!("zicount: {e}");
            ExitCode::from(2)
        }
    }
}

enum Status {
    Clean,
    Warned,
}

fn status_of<'a>(records: impl IntoIterator<Item = &'a FitRecord>) -> Status {
    let mut status = Status::Clean;
    for r in records {
        if !r.converged {
            status = Status::Warned;
            for d in &r.diagnostics {
                eprintln!("warning: {}: {d}", r.model);
            }
        }
    }
    status
}

fn label_for(label: &Option<String>, input: &Path) -> String {
    label.clone().unwrap_or_else(|| {
        input.file_stem().map_or_else(|| "data".into(), |s| s.to_string_lossy().into_owned())
    })
}

/// JSON goes to `out` (and the table to stdout) or, with no `out`, JSON to
/// stdout and the table to stderr.
fn emit(out: &Option<PathBuf>, json: &str, table: &str) -> Result<()> {
    match out {
        Some(path) => {
            write_atomic(path, json.as_bytes())?;
            print!("{table}");
        }
        None => {
            print!("{json}");
            eprint!("{table}");
        }
    }
    Ok(())
}

fn cmd_fit(a: FitArgs) -> Result<Status> {
    let data = a.input.load()?;
    let config = a.search.config();
    config.validate()?;
    let family: Family = a.family.into();
    let mut results = vec![fit_base(&data, family)?];
    if a.zero_inflated {
        results.push(fit_zero_inflated(&data, family, &config)?);
    }
    let output = FitOutput { results: results.iter().map(FitRecord::from).collect() };
    let label = label_for(&a.label, &a.input.input);
    let rows: Vec<ReportRow> = output.results.iter().map(|r| ReportRow::new(&label, r)).collect();
    emit(&a.out, &to_json(&output)?, &render_table(&rows))?;
    Ok(status_of(&output.results))
}

fn cmd_compare(a: CompareArgs) -> Result<Status> {
    let data = a.input.load()?;
    let comparison = fit_all_models(&data, &a.search.config())?;
    let record = ComparisonRecord::from(&comparison);
    let label = label_for(&a.label, &a.input.input);
    let rows: Vec<ReportRow> = record.results.iter().map(|r| ReportRow::new(&label, r)).collect();
    let mut table = render_table(&rows);
    table.push_str(&format!(
        "winner: {} (ZIDL improves: {}, ZIHP improves: {})\n",
        record.winner, record.improvement.zidl, record.improvement.zihp
    ));
    if let Some(note) = &record.tie_note {
        table.push_str(&format!("note: {note}\n"));
    }
    emit(&a.out, &to_json(&record)?, &table)?;
    Ok(status_of(&record.results))
}

fn cmd_curves(a: CurvesArgs) -> Result<Status> {
    let data = a.input.load()?;
    let file = ModelFile::read(&a.model_file)?;
    let record = file.select(a.model)?;
    if record.n_total != data.n_total() || record.r != data.ones() {
        eprintln!(
            "warning: model was fitted to N = {}, r = {}; input has N = {}, r = {}",
            record.n_total,
            record.r,
            data.n_total(),
            data.ones()
        );
    }
    let curve = CdfCurve::new(&data, &record.to_model()?)?;
    let mut buf = Vec::new();
    curve.write_csv(&mut buf)?;
    match &a.out {
        Some(path) => write_atomic(path, &buf)?,
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(Status::Clean)
}

fn cmd_simulate(a: SimulateArgs) -> Result<Status> {
    let family = a.model.family();
    let missing = |name: &str| Error::Usage(format!("--{name} is required for {}", a.model));
    let base = match family {
        Family::DiscretisedLognormal => FamilyParams::from_pair(
            family,
            a.mu.ok_or_else(|| missing("mu"))?,
            a.sigma.ok_or_else(|| missing("sigma"))?,
        ),
        Family::HookedPowerLaw => FamilyParams::from_pair(
            family,
            a.alpha.ok_or_else(|| missing("alpha"))?,
            a.b.ok_or_else(|| missing("b"))?,
        ),
    }
    .map_err(|e| Error::Usage(e.to_string()))?;
    if !a.model.is_zero_inflated() && a.p != 0.0 {
        return Err(Error::Usage(format!("--p needs a zero-inflated model, not {}", a.model)));
    }
    let model = ZeroInflatedModel::with_probability(base, a.p).map_err(|e| Error::Usage(e.to_string()))?;
    let journals = match (a.journals, a.magazine.is_empty()) {
        (None, true) => None,
        (j, _) => Some(JournalLayout { regular_journals: j.unwrap_or(1), magazines: a.magazine.clone() }),
    };
    let spec = SyntheticSpec { model, n: a.n, seed: a.seed, journals };
    let data = sample_with(&spec, a.parallel)?;

    let mut buf = Vec::new();
    match a.format {
        FormatArg::Plain => data.write_plain(&mut buf)?,
        FormatArg::Csv => data.write_csv(&mut buf)?,
    }
    write_atomic(&a.out, &buf)?;

    let truth = serde_json::json!({
        "model": a.model,
        "params": ParamsRecord::from(&base),
        "p": a.p,
        "n": a.n,
        "seed": a.seed,
        "n_total": data.n_total(),
        "r": data.ones(),
        "shifted": true,
        "magazines": a.magazine.iter().map(|m| serde_json::json!({"articles": m.articles, "q": m.q})).collect::<Vec<_>>(),
    });
    let truth_path = a.truth.clone().unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".truth.json");
        p.into()
    });
    write_atomic(truth_path, to_json(&truth)?.as_bytes())?;
    Ok(Status::Clean)
}

fn cmd_filter(a: FilterArgs) -> Result<Status> {
    let data = a.input.load()?;
    if data.labels().is_none() {
        return Err(Error::Usage("filter needs csv input with a journal column".into()));
    }
    let (kept, report) = filter_journals(&data, a.threshold)?;
    let mut buf = Vec::new();
    kept.write_csv(&mut buf)?;
    write_atomic(&a.out, &buf)?;
    let json = to_json(&report)?;
    match &a.report {
        Some(path) => write_atomic(path, json.as_bytes())?,
        None => print!("{json}"),
    }
    eprintln!(
        "removed {} journals ({} articles, {} uncited); kept {} articles",
        report.removed.len(),
        report.removed_articles,
        report.removed_uncited,
        report.retained_articles
    );
    Ok(Status::Clean)
}

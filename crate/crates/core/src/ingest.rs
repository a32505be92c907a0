//! Loading count data, the +1 shift, summaries and the journal threshold filter.
//!
//! Raw counts (citations, possibly 0) live in [`RawCounts`]. [`RawCounts::shift`]
//! consumes them and yields a [`CountDataset`] whose entries are all >= 1; there
//! is no way to shift a `CountDataset` again.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    /// One nonnegative integer per line.
    Plain,
    /// Header row with a required `citations` column and optional `journal` column.
    Csv,
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(InputFormat::Plain),
            "csv" => Ok(InputFormat::Csv),
            other => Err(Error::usage(format!("unknown format '{other}' (expected plain or csv)"))),
        }
    }
}

/// Unshifted counts as read from a file, with optional per-entry journal labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawCounts {
    counts: Vec<u64>,
    labels: Option<Vec<String>>,
}

impl RawCounts {
    pub fn new(counts: Vec<u64>) -> Self {
        RawCounts { counts, labels: None }
    }

    pub fn with_labels(counts: Vec<u64>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != counts.len() {
            return Err(Error::usage(format!(
                "{} labels for {} counts",
                labels.len(),
                counts.len()
            )));
        }
        Ok(RawCounts { counts, labels: Some(labels) })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Adds 1 to every count.
    pub fn shift(self) -> Result<CountDataset> {
        let counts = self
            .counts
            .into_iter()
            .map(|c| {
                c.checked_add(1)
                    .ok_or_else(|| Error::domain("count too large to shift"))
            })
            .collect::<Result<Vec<_>>>()?;
        CountDataset::build(counts, self.labels)
    }

    pub fn read(reader: impl Read, format: InputFormat) -> Result<Self> {
        match format {
            InputFormat::Plain => read_plain(reader),
            InputFormat::Csv => read_csv(reader),
        }
    }
}

fn parse_count(token: &str, line: usize) -> Result<u64> {
    let token = token.trim();
    token.parse::<u64>().map_err(|_| {
        let message = if token.parse::<i64>().is_ok() {
            format!("negative count '{token}'")
        } else {
            format!("not a nonnegative integer: '{token}'")
        };
        Error::Parse { line, message }
    })
}

fn read_plain(reader: impl Read) -> Result<RawCounts> {
    let mut counts = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let line = line.strip_prefix('\u{feff}').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        counts.push(parse_count(line, idx + 1)?);
    }
    if counts.is_empty() {
        return Err(Error::Parse { line: 0, message: "empty input".into() });
    }
    Ok(RawCounts::new(counts))
}

fn read_csv(reader: impl Read) -> Result<RawCounts> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.trim().trim_start_matches('\u{feff}') == name);
    let cite_col = find("citations").ok_or_else(|| Error::Parse {
        line: 1,
        message: "missing required column 'citations'".into(),
    })?;
    let journal_col = find("journal");

    let mut counts = Vec::new();
    let mut labels = journal_col.map(|_| Vec::new());
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = record.get(cite_col).ok_or_else(|| Error::Parse {
            line,
            message: "row has no citations field".into(),
        })?;
        counts.push(parse_count(field, line)?);
        if let (Some(col), Some(labels)) = (journal_col, labels.as_mut()) {
            labels.push(record.get(col).unwrap_or("").trim().to_string());
        }
    }
    if counts.is_empty() {
        return Err(Error::Parse { line: 0, message: "empty input".into() });
    }
    Ok(RawCounts { counts, labels })
}

/// Shifted counts (every entry >= 1) with cached size N, ones count r and a
/// sorted value histogram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountDataset {
    counts: Vec<u64>,
    labels: Option<Vec<String>>,
    ones: u64,
    histogram: Vec<(u64, u64)>,
}

impl CountDataset {
    fn build(counts: Vec<u64>, labels: Option<Vec<String>>) -> Result<Self> {
        if let Some(pos) = counts.iter().position(|&c| c == 0) {
            return Err(Error::domain(format!(
                "shifted dataset entry {pos} is 0; shifted counts start at 1"
            )));
        }
        if let Some(l) = &labels {
            if l.len() != counts.len() {
                return Err(Error::usage("label count does not match data size"));
            }
        }
        let mut sorted = counts.clone();
        sorted.sort_unstable();
        let mut histogram: Vec<(u64, u64)> = Vec::new();
        for v in sorted {
            match histogram.last_mut() {
                Some((value, count)) if *value == v => *count += 1,
                _ => histogram.push((v, 1)),
            }
        }
        let ones = histogram.first().filter(|(v, _)| *v == 1).map_or(0, |&(_, c)| c);
        Ok(CountDataset { counts, labels, ones, histogram })
    }

    /// Wraps counts that are already shifted.
    pub fn from_shifted(counts: Vec<u64>) -> Result<Self> {
        Self::build(counts, None)
    }

    pub fn from_shifted_labelled(counts: Vec<u64>, labels: Vec<String>) -> Result<Self> {
        Self::build(counts, Some(labels))
    }

    pub fn load(path: impl AsRef<Path>, format: InputFormat) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        RawCounts::read(file, format)?.shift()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// N.
    pub fn n_total(&self) -> u64 {
        self.counts.len() as u64
    }

    /// r, the number of entries equal to 1 (raw zeros).
    pub fn ones(&self) -> u64 {
        self.ones
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn max(&self) -> u64 {
        self.histogram.last().map_or(0, |&(v, _)| v)
    }

    /// Distinct values in ascending order with their multiplicities.
    pub fn histogram(&self) -> &[(u64, u64)] {
        &self.histogram
    }

    /// The original unshifted counts.
    pub fn raw_counts(&self) -> Vec<u64> {
        self.counts.iter().map(|c| c - 1).collect()
    }

    pub fn to_raw(&self) -> RawCounts {
        RawCounts { counts: self.raw_counts(), labels: self.labels.clone() }
    }

    /// Writes the unshifted counts one per line.
    pub fn write_plain(&self, mut w: impl Write) -> Result<()> {
        for c in &self.counts {
            writeln!(w, "{}", c - 1)?;
        }
        Ok(())
    }

    /// Writes unshifted counts as csv with a `citations` column, plus `journal`
    /// when labels are present.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        match &self.labels {
            Some(labels) => {
                wtr.write_record(["citations", "journal"])?;
                for (c, l) in self.counts.iter().zip(labels) {
                    wtr.write_record([(c - 1).to_string().as_str(), l.as_str()])?;
                }
            }
            None => {
                wtr.write_record(["citations"])?;
                for c in &self.counts {
                    wtr.write_record([(c - 1).to_string()])?;
                }
            }
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Dataset summary on the raw (unshifted) scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub n_total: u64,
    pub uncited: u64,
    pub max: u64,
    pub mean: f64,
    pub median: f64,
}

pub fn summarize(data: &CountDataset) -> Result<Summary> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = data.n_total();
    let total: f64 = data.histogram().iter().map(|&(v, c)| (v - 1) as f64 * c as f64).sum();
    Ok(Summary {
        n_total: n,
        uncited: data.ones(),
        max: data.max() - 1,
        mean: total / n as f64,
        median: median_of_histogram(data.histogram(), n) - 1.0,
    })
}

fn median_of_histogram(hist: &[(u64, u64)], n: u64) -> f64 {
    // 0-based order statistics at (n-1)/2 and n/2.
    let nth = |target: u64| {
        let mut seen = 0;
        for &(v, c) in hist {
            seen += c;
            if seen > target {
                return v as f64;
            }
        }
        unreachable!("order statistic beyond dataset")
    };
    (nth((n - 1) / 2) + nth(n / 2)) / 2.0
}

/// One journal removed by [`filter_journals`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JournalRemoval {
    pub journal: String,
    pub articles: u64,
    pub uncited: u64,
    pub cited_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterReport {
    pub threshold_percent: f64,
    pub removed: Vec<JournalRemoval>,
    pub removed_articles: u64,
    pub removed_uncited: u64,
    pub retained_articles: u64,
}

/// Removes every article of each journal whose cited share (raw count > 0) is
/// below `t_percent`. Articles with an empty label are never removed.
pub fn filter_journals(data: &CountDataset, t_percent: f64) -> Result<(CountDataset, FilterReport)> {
    let labels = data
        .labels()
        .ok_or_else(|| Error::usage("journal filtering needs journal labels"))?;
    if !(0.0..=100.0).contains(&t_percent) {
        return Err(Error::usage(format!("threshold must be in [0, 100], got {t_percent}")));
    }

    // (articles, uncited) per journal in first-appearance order.
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut tallies: Vec<(&str, u64, u64)> = Vec::new();
    for (label, &c) in labels.iter().zip(data.counts()) {
        if label.is_empty() {
            continue;
        }
        let i = *index.entry(label.as_str()).or_insert_with(|| {
            tallies.push((label.as_str(), 0, 0));
            tallies.len() - 1
        });
        tallies[i].1 += 1;
        if c == 1 {
            tallies[i].2 += 1;
        }
    }

    let mut removed = Vec::new();
    let mut drop: HashSet<&str> = HashSet::new();
    for &(journal, articles, uncited) in &tallies {
        let cited_fraction = (articles - uncited) as f64 / articles as f64;
        if 100.0 * cited_fraction < t_percent {
            drop.insert(journal);
            removed.push(JournalRemoval {
                journal: journal.to_string(),
                articles,
                uncited,
                cited_fraction,
            });
        }
    }

    let mut counts = Vec::with_capacity(data.counts().len());
    let mut kept_labels = Vec::with_capacity(data.counts().len());
    for (label, &c) in labels.iter().zip(data.counts()) {
        if !drop.contains(label.as_str()) {
            counts.push(c);
            kept_labels.push(label.clone());
        }
    }
    let report = FilterReport {
        threshold_percent: t_percent,
        removed_articles: removed.iter().map(|r| r.articles).sum(),
        removed_uncited: removed.iter().map(|r| r.uncited).sum(),
        retained_articles: counts.len() as u64,
        removed,
    };
    Ok((CountDataset::build(counts, Some(kept_labels))?, report))
}

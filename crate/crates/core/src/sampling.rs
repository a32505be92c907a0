//! Random generation from the four models.
//!
//! Draws come from ChaCha8 streams: the seed picks the key and every block of
//! [`BLOCK`] draws gets its own stream id, so a block can be generated
//! independently of the others and serial and parallel runs agree bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distributions::FamilyParams;
use crate::error::{Error, Result};
use crate::ingest::CountDataset;
use crate::zero_inflation::ZeroInflatedModel;

/// Draws per PRNG stream.
pub const BLOCK: u64 = 4096;

/// Inverse-CDF search stops here; the mass beyond it is returned as this value.
pub const MAX_DRAW: u64 = 1_000_000_000;

/// Stream ids at and above this are used for magazine journals.
const MAGAZINE_STREAM_BASE: u64 = 1 << 40;

/// Largest precomputed survival table a [`Sampler`] builds.
const TABLE_LIMIT: u64 = 1 << 16;

/// A journal whose articles are 1 with probability `q` and base-model draws otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Magazine {
    pub articles: u64,
    pub q: f64,
}

/// Journal structure for labelled corpora. Regular articles are dealt to
/// `regular_journals` journals in turn; magazines are appended after them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct JournalLayout {
    pub regular_journals: u64,
    pub magazines: Vec<Magazine>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub model: ZeroInflatedModel,
    /// Number of draws from `model` (magazine articles come on top).
    pub n: u64,
    pub seed: u64,
    pub journals: Option<JournalLayout>,
}

impl SyntheticSpec {
    pub fn new(model: ZeroInflatedModel, n: u64, seed: u64) -> Self {
        SyntheticSpec { model, n, seed, journals: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::usage("sample count must be at least 1"));
        }
        if let Some(layout) = &self.journals {
            if layout.regular_journals == 0 {
                return Err(Error::usage("need at least one regular journal"));
            }
            for m in &layout.magazines {
                if !(0.9..=1.0).contains(&m.q) {
                    return Err(Error::usage(format!("magazine q must be in [0.9, 1], got {}", m.q)));
                }
                if m.articles == 0 {
                    return Err(Error::usage("magazine needs at least one article"));
                }
            }
        }
        Ok(())
    }
}

/// Smallest n ≥ 1 with CDF(n) ≥ u, found by exponential then binary search.
/// Returns [`MAX_DRAW`] if the CDF has not reached u by then.
pub fn inverse_cdf_draw(u: f64, params: &FamilyParams) -> u64 {
    let target = (-u).ln_1p();
    let reached = |n: u64| params.ln_sf_unchecked(n) <= target;
    search_from(1, &reached)
}

/// Search over n ≥ `lo`, given that CDF(lo - 1) < u.
fn search_from(lo: u64, reached: &impl Fn(u64) -> bool) -> u64 {
    if reached(lo) {
        return lo;
    }
    // Invariant: !reached(below), reached(above) or above == MAX_DRAW.
    let mut below = lo;
    let mut step = 1;
    let mut above = loop {
        let probe = below.saturating_add(step).min(MAX_DRAW);
        if probe == MAX_DRAW || reached(probe) {
            break probe;
        }
        below = probe;
        step *= 2;
    };
    if above == MAX_DRAW && !reached(MAX_DRAW) {
        return MAX_DRAW;
    }
    while above - below > 1 {
        let mid = below + (above - below) / 2;
        if reached(mid) {
            above = mid;
        } else {
            below = mid;
        }
    }
    above
}

/// Inverse-CDF sampler with the survival function tabulated over the bulk of
/// the distribution. Gives the same draws as [`inverse_cdf_draw`].
#[derive(Debug, Clone)]
pub struct Sampler {
    model: ZeroInflatedModel,
    /// ln S(n) for n = 1..=len, decreasing.
    ln_sf: Vec<f64>,
}

impl Sampler {
    pub fn new(model: ZeroInflatedModel) -> Self {
        let base = *model.base();
        let mut ln_sf = Vec::new();
        for n in 1..=TABLE_LIMIT {
            let v = base.ln_sf_unchecked(n);
            ln_sf.push(v);
            // 1 - u is at least 2^-53 for u drawn from [0, 1).
            if v < -40.0 {
                break;
            }
        }
        Sampler { model, ln_sf }
    }

    pub fn model(&self) -> &ZeroInflatedModel {
        &self.model
    }

    pub fn base_draw(&self, u: f64) -> u64 {
        let target = (-u).ln_1p();
        // First index whose ln S is at or below the target.
        let idx = self.ln_sf.partition_point(|&v| v > target);
        if idx < self.ln_sf.len() {
            return idx as u64 + 1;
        }
        let base = self.model.base();
        search_from(self.ln_sf.len() as u64 + 1, &|n| base.ln_sf_unchecked(n) <= target)
    }

    /// One draw: 1 with probability p, otherwise a base-family draw.
    pub fn draw(&self, rng: &mut impl Rng) -> u64 {
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        if u1 < self.model.p() {
            1
        } else {
            self.base_draw(u2)
        }
    }

    /// Draws `count` values from stream `stream` of the generator keyed by `seed`.
    pub fn draw_stream(&self, seed: u64, stream: u64, count: u64) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        (0..count).map(|_| self.draw(&mut rng)).collect()
    }
}

/// Generates the dataset described by `spec`.
pub fn sample(spec: &SyntheticSpec) -> Result<CountDataset> {
    sample_with(spec, false)
}

/// Like [`sample`], optionally generating blocks on the rayon pool. The output
/// does not depend on `parallel`.
pub fn sample_with(spec: &SyntheticSpec, parallel: bool) -> Result<CountDataset> {
    spec.validate()?;
    let sampler = Sampler::new(spec.model);
    let blocks = spec.n.div_ceil(BLOCK);
    let block = |b: u64| sampler.draw_stream(spec.seed, b, BLOCK.min(spec.n - b * BLOCK));
    let counts: Vec<u64> = if parallel {
        (0..blocks).into_par_iter().flat_map_iter(block).collect()
    } else {
        (0..blocks).flat_map(block).collect()
    };

    let Some(layout) = &spec.journals else {
        return CountDataset::from_shifted(counts);
    };
    let width = layout.regular_journals.max(layout.magazines.len() as u64).to_string().len();
    let mut labels: Vec<String> = (0..spec.n)
        .map(|i| format!("J{:0width$}", i % layout.regular_journals + 1))
        .collect();
    let mut counts = counts;
    let base_only = Sampler::new(ZeroInflatedModel::non_inflated(*spec.model.base()));
    for (j, m) in layout.magazines.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(MAGAZINE_STREAM_BASE + j as u64);
        for _ in 0..m.articles {
            let u1: f64 = rng.random();
            let u2: f64 = rng.random();
            counts.push(if u1 < m.q { 1 } else { base_only.base_draw(u2) });
            labels.push(format!("M{:0width$}", j + 1));
        }
    }
    CountDataset::from_shifted_labelled(counts, labels)
}

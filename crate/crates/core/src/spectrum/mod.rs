//! Truncated length spectra of spine graphs and their finite covers.
//!
//! Geodesics are unoriented: a class and its inverse are one geodesic.
//! Boundary cuffs are included. Non-primitive powers are included unless
//! [`EnumerationParams::primitive_only`] is set.

mod cover;
mod enumerate;
mod limit;

use serde::{Deserialize, Serialize};

use crate::groups::{Elem, GroupError};
use crate::holonomy::HolonomyError;

pub use cover::{direct_cover_spectrum, seam_crossing_spectrum, transplant_cover_spectrum};
pub use enumerate::enumerate_geodesics;
pub use limit::{limit_consistency_check, separation, snap, LimitReport};

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("cutoff must be positive and finite, got {0}")]
    InvalidCutoff(f64),
    #[error("invalid enumeration parameters: {0}")]
    InvalidParams(String),
    #[error("cutoffs differ: {0} vs {1}")]
    CutoffMismatch(f64, f64),
    #[error("t = {t} lies beyond the cutoff {cutoff}")]
    BeyondCutoff { t: f64, cutoff: f64 },
    #[error("spectrum cutoff {cutoff} does not reach {needed}")]
    ShortCutoff { cutoff: f64, needed: f64 },
    #[error("spectrum is incomplete")]
    Incomplete,
    #[error("surface is not a double")]
    NotDoubled,
    #[error(transparent)]
    Holonomy(#[from] HolonomyError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

pub type Result<T, E = SpectrumError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationParams {
    /// R₀: a prefix is pruned once it moves the basepoint further than
    /// `L + 2·R₀`.
    pub slack: f64,
    /// Merge radius for lengths.
    pub tolerance: f64,
    /// Largest BFS depth explored from each start vertex.
    pub max_depth: usize,
    /// Largest number of ball elements kept per start vertex.
    pub node_budget: usize,
    pub primitive_only: bool,
}

impl Default for EnumerationParams {
    fn default() -> Self {
        EnumerationParams { slack: 6.0, tolerance: 1e-9, max_depth: 400, node_budget: 4_000_000, primitive_only: false }
    }
}

impl EnumerationParams {
    pub(crate) fn check(&self) -> Result<()> {
        if !(self.slack >= 0.0 && self.slack.is_finite()) {
            return Err(SpectrumError::InvalidParams(format!("slack must be non-negative, got {}", self.slack)));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1e-3) {
            return Err(SpectrumError::InvalidParams(format!("tolerance must lie in (0, 1e-3), got {}", self.tolerance)));
        }
        if self.max_depth == 0 || self.node_budget == 0 {
            return Err(SpectrumError::InvalidParams("depth and node budgets must be positive".into()));
        }
        Ok(())
    }
}

/// One closed geodesic (a free homotopy class up to inversion).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicRecord {
    pub length: f64,
    /// Canonical word, readable form.
    pub word: String,
    /// Canonical word as edge ids; for a power, the word of its root.
    pub edges: Vec<u32>,
    pub primitive: bool,
    /// `k` for the `k`-th power of a primitive geodesic, 1 otherwise.
    pub power: usize,
    /// Index of the primitive root in the same record list.
    pub root: Option<usize>,
    /// Monodromy of the canonical word.
    pub monodromy: Elem,
    /// Name of the least element in the conjugacy class of `monodromy`.
    pub monodromy_class: String,
    /// Set when the geodesic crosses a fold seam of a double.
    pub crosses_fold: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub length: f64,
    pub multiplicity: usize,
}

/// Lengths `≤ cutoff` with multiplicities. Lengths closer than
/// `tolerance` are one entry, carrying the least of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthSpectrum {
    pub cutoff: f64,
    pub tolerance: f64,
    pub complete: bool,
    pub entries: Vec<SpectrumEntry>,
}

impl LengthSpectrum {
    pub fn from_lengths(cutoff: f64, tolerance: f64, complete: bool, lengths: impl IntoIterator<Item = f64>) -> Self {
        let mut ls: Vec<f64> = lengths.into_iter().filter(|&l| l <= cutoff).collect();
        ls.sort_by(f64::total_cmp);
        let mut entries: Vec<SpectrumEntry> = Vec::new();
        let mut last = f64::NEG_INFINITY;
        for l in ls {
            match entries.last_mut() {
                Some(e) if l - last <= tolerance => e.multiplicity += 1,
                _ => entries.push(SpectrumEntry { length: l, multiplicity: 1 }),
            }
            last = l;
        }
        LengthSpectrum { cutoff, tolerance, complete, entries }
    }

    pub fn from_records(cutoff: f64, tolerance: f64, complete: bool, records: &[GeodesicRecord]) -> Self {
        Self::from_lengths(cutoff, tolerance, complete, records.iter().map(|r| r.length))
    }

    /// Distinct lengths, increasing.
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.length).collect()
    }

    pub fn total(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Multiplicity of the entry within `tolerance` of `length`, or 0.
    pub fn multiplicity_of(&self, length: f64) -> usize {
        self.entries.iter().find(|e| (e.length - length).abs() <= self.tolerance).map_or(0, |e| e.multiplicity)
    }

    /// Drops entries above `cutoff`.
    pub fn truncated(&self, cutoff: f64) -> LengthSpectrum {
        LengthSpectrum {
            cutoff,
            tolerance: self.tolerance,
            complete: self.complete,
            entries: self.entries.iter().copied().filter(|e| e.length <= cutoff).collect(),
        }
    }
}

/// Records and spectrum from one enumeration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Enumeration {
    pub records: Vec<GeodesicRecord>,
    pub spectrum: LengthSpectrum,
    pub stats: EnumerationStats,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnumerationStats {
    /// Ball elements over all start vertices.
    pub nodes: usize,
    /// Deepest BFS layer reached.
    pub depth: usize,
    /// Some start vertex ran out of node budget.
    pub budget_exhausted: bool,
    /// Every start vertex passed the saturation rule.
    pub saturated: bool,
    /// Every point of the surface lies this close to a basepoint lift;
    /// the pruning bound is sound once the slack reaches it.
    pub cover_radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityMismatch {
    pub length: f64,
    pub first: usize,
    pub second: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDiff {
    pub only_in_first: Vec<SpectrumEntry>,
    pub only_in_second: Vec<SpectrumEntry>,
    pub multiplicity_mismatches: Vec<MultiplicityMismatch>,
}

impl SpectrumDiff {
    pub fn is_empty(&self) -> bool {
        self.only_in_first.is_empty() && self.only_in_second.is_empty() && self.multiplicity_mismatches.is_empty()
    }
}

/// Multiset difference of two spectra. Entries are matched greedily in
/// increasing order when they lie within `tol` of each other.
pub fn compare_spectra(a: &LengthSpectrum, b: &LengthSpectrum, tol: f64) -> Result<SpectrumDiff> {
    if (a.cutoff - b.cutoff).abs() > 1e-12 * a.cutoff.abs().max(1.0) {
        return Err(SpectrumError::CutoffMismatch(a.cutoff, b.cutoff));
    }
    let mut diff = SpectrumDiff::default();
    let (mut i, mut j) = (0, 0);
    while i < a.entries.len() && j < b.entries.len() {
        let (x, y) = (a.entries[i], b.entries[j]);
        if (x.length - y.length).abs() <= tol {
            if x.multiplicity != y.multiplicity {
                diff.multiplicity_mismatches.push(MultiplicityMismatch {
                    length: x.length,
                    first: x.multiplicity,
                    second: y.multiplicity,
                });
            }
            i += 1;
            j += 1;
        } else if x.length < y.length {
            diff.only_in_first.push(x);
            i += 1;
        } else {
            diff.only_in_second.push(y);
            j += 1;
        }
    }
    diff.only_in_first.extend_from_slice(&a.entries[i..]);
    diff.only_in_second.extend_from_slice(&b.entries[j..]);
    Ok(diff)
}

/// `N(t)`: geodesics of length at most `t`, with multiplicity.
pub fn counting_function(s: &LengthSpectrum, t: f64) -> Result<usize> {
    if t > s.cutoff {
        return Err(SpectrumError::BeyondCutoff { t, cutoff: s.cutoff });
    }
    Ok(s.entries.iter().take_while(|e| e.length <= t).map(|e| e.multiplicity).sum())
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    length: String,
    multiplicity: usize,
    primitive: bool,
    word: &'a str,
    monodromy_class: &'a str,
}

/// CSV export, one row per record. Each row carries the multiplicity of
/// the spectrum entry its length belongs to.
pub fn spectrum_csv(records: &[GeodesicRecord], spectrum: &LengthSpectrum) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(CsvRow {
            length: format!("{:.12}", r.length),
            multiplicity: spectrum.multiplicity_of(r.length),
            primitive: r.primitive,
            word: &r.word,
            monodromy_class: &r.monodromy_class,
        })?;
    }
    if records.is_empty() {
        w.write_record(["length", "multiplicity", "primitive", "word", "monodromy_class"])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

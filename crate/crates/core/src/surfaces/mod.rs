//! Pants-level surface descriptions.
//!
//! A [`GluingGraphSurface`] is a list of pairs of pants, each with three
//! cuff slots, plus seams pairing slots. Every slot is either glued by
//! exactly one seam or left as boundary. Seams carry a twist (signed, in
//! length units) and an optional monodromy label (a group element index);
//! unlabeled seams are internal to a vertex copy and carry the identity.
//!
//! Twist convention: a positive twist on seam `(a, b, t)` is a left twist
//! of length `t` as seen from slot `a`. A twist equal to the cuff length is
//! a full Dehn twist.

mod collar;
mod gluing;
mod template;

pub use collar::{collar_width, forced_disjoint, short_disjointness_bound, CollarError};
pub use gluing::{cayley_surface, double, schreier_surface};
pub use template::{build_template, MarkerGroup, VertexTemplate};

use serde::{Deserialize, Serialize};

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("invalid template parameters: {0}")]
    InvalidParameters(String),
    #[error("generating set does not match the template: {0}")]
    LabelMismatch(String),
    #[error("surface is closed; nothing to double")]
    Closed,
    #[error(transparent)]
    Group(#[from] crate::groups::GroupError),
}

pub type Result<T, E = SurfaceError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SlotRef {
    pub pants: usize,
    pub slot: usize,
}

impl SlotRef {
    pub fn new(pants: usize, slot: usize) -> Self {
        SlotRef { pants, slot }
    }
}

/// What a cuff is in the vertex-template construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CuffRole {
    /// Internal curve `curve` of the template pants decomposition, with an
    /// optional `η_{i,k}` designation `(i, k)`.
    Internal { curve: usize, marker: Option<(usize, usize)> },
    /// `γ_s` (`bar = false`) or `γ̄_s` (`bar = true`) for generator index `generator`.
    Generator { generator: usize, bar: bool },
    /// The outer boundary `γ` of length ε.
    Outer,
    /// No template meaning.
    Plain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cuff {
    pub id: usize,
    pub length: f64,
    pub role: CuffRole,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pants {
    pub id: usize,
    /// Cuff ids for slots 0, 1, 2.
    pub cuffs: [usize; 3],
    /// Vertex copy (coset index) this pants belongs to.
    pub copy: usize,
    /// Index of the pants inside the vertex template, if any.
    pub template_pants: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seam {
    pub a: SlotRef,
    pub b: SlotRef,
    pub twist: f64,
    /// Monodromy label (group element index); `None` means identity.
    pub label: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_name: Option<String>,
}

/// Parameters the surface was built from, used by validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateMeta {
    pub delta: f64,
    pub epsilon: f64,
    /// λ table: one entry per template curve (internal curves first, then
    /// one per generator).
    pub lambda: Vec<f64>,
    pub genset: Vec<String>,
}

/// Data recorded by [`double`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleInfo {
    /// Pants involution swapping the two copies.
    pub involution: Vec<usize>,
    /// Seams along the former boundary.
    pub fold_seams: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluingGraphSurface {
    pub pants: Vec<Pants>,
    pub cuffs: Vec<Cuff>,
    pub seams: Vec<Seam>,
    pub boundary: Vec<SlotRef>,
    #[serde(default)]
    pub copies: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<TemplateMeta>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub double: Option<DoubleInfo>,
}

impl GluingGraphSurface {
    /// A single pair of pants with the given cuff lengths, all boundary.
    pub fn pants(lengths: [f64; 3]) -> Self {
        GluingGraphSurface {
            pants: vec![Pants { id: 0, cuffs: [0, 1, 2], copy: 0, template_pants: None }],
            cuffs: (0..3).map(|i| Cuff { id: i, length: lengths[i], role: CuffRole::Plain }).collect(),
            seams: Vec::new(),
            boundary: (0..3).map(|i| SlotRef::new(0, i)).collect(),
            copies: 1,
            template: None,
            double: None,
        }
    }

    pub fn cuff(&self, s: SlotRef) -> &Cuff {
        &self.cuffs[self.pants[s.pants].cuffs[s.slot]]
    }

    pub fn length(&self, s: SlotRef) -> f64 {
        self.cuff(s).length
    }

    pub fn euler_characteristic(&self) -> i64 {
        -(self.pants.len() as i64)
    }

    /// Genus from `χ = 2 − 2g − b`; `None` if the counts are inconsistent.
    pub fn genus(&self) -> Option<usize> {
        let twice = 2 + self.pants.len() as i64 - self.boundary.len() as i64;
        (twice >= 0 && twice % 2 == 0).then_some((twice / 2) as usize)
    }

    /// For each slot, the seam gluing it (if any).
    pub fn slot_seams(&self) -> Vec<[Option<usize>; 3]> {
        let mut out = vec![[None; 3]; self.pants.len()];
        for (i, s) in self.seams.iter().enumerate() {
            out[s.a.pants][s.a.slot] = Some(i);
            out[s.b.pants][s.b.slot] = Some(i);
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

/// Outcome of [`validate_surface`]; an empty violation list means valid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SurfaceReport {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl SurfaceReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

const LENGTH_MATCH_TOL: f64 = 1e-12;

pub fn validate_surface(s: &GluingGraphSurface) -> SurfaceReport {
    let mut r = SurfaceReport::default();
    let np = s.pants.len();
    if np == 0 {
        r.violations.push("surface has no pants".into());
        return r;
    }
    for p in &s.pants {
        if p.cuffs.iter().any(|&c| c >= s.cuffs.len()) {
            r.violations.push(format!("pants {} references a missing cuff", p.id));
            return r;
        }
        if p.cuffs[0] == p.cuffs[1] || p.cuffs[1] == p.cuffs[2] || p.cuffs[0] == p.cuffs[2] {
            r.violations.push(format!("pants {} repeats a cuff", p.id));
        }
    }
    for c in &s.cuffs {
        if !(c.length > 0.0 && c.length.is_finite()) {
            r.violations.push(format!("cuff {} has non-positive length {}", c.id, c.length));
        }
    }
    let mut uses = vec![[0usize; 3]; np];
    let mut mark = |slot: SlotRef, r: &mut SurfaceReport| {
        if slot.pants >= np || slot.slot >= 3 {
            r.violations.push(format!("slot {slot:?} does not exist"));
            return false;
        }
        uses[slot.pants][slot.slot] += 1;
        true
    };
    for (i, seam) in s.seams.iter().enumerate() {
        let ok = mark(seam.a, &mut r) & mark(seam.b, &mut r);
        if !ok {
            continue;
        }
        if seam.a == seam.b {
            r.violations.push(format!("seam {i} glues a slot to itself"));
        }
        let (la, lb) = (s.length(seam.a), s.length(seam.b));
        if (la - lb).abs() > LENGTH_MATCH_TOL * la.max(lb).max(1.0) {
            r.violations.push(format!("seam {i} glues lengths {la} and {lb}"));
        }
        if !seam.twist.is_finite() {
            r.violations.push(format!("seam {i} has a non-finite twist"));
        }
    }
    for &b in &s.boundary {
        mark(b, &mut r);
    }
    for (p, u) in uses.iter().enumerate() {
        for (slot, &n) in u.iter().enumerate() {
            match n {
                1 => {}
                0 => r.violations.push(format!("slot ({p},{slot}) is neither glued nor boundary")),
                _ => r.violations.push(format!("slot ({p},{slot}) is used {n} times")),
            }
        }
    }
    // Connectivity of the pants adjacency graph.
    let mut seen = vec![false; np];
    let mut stack = vec![0];
    seen[0] = true;
    let adj = {
        let mut adj = vec![Vec::new(); np];
        for seam in &s.seams {
            if seam.a.pants < np && seam.b.pants < np {
                adj[seam.a.pants].push(seam.b.pants);
                adj[seam.b.pants].push(seam.a.pants);
            }
        }
        adj
    };
    while let Some(p) = stack.pop() {
        for &q in &adj[p] {
            if !seen[q] {
                seen[q] = true;
                stack.push(q);
            }
        }
    }
    if seen.iter().any(|&x| !x) {
        r.violations.push("pants adjacency graph is disconnected".into());
    }
    if s.genus().is_none() {
        r.violations.push("Euler characteristic is inconsistent with the boundary count".into());
    }
    if let Some(meta) = &s.template {
        check_template_meta(s, meta, &mut r);
    }
    r
}

fn check_template_meta(s: &GluingGraphSurface, meta: &TemplateMeta, r: &mut SurfaceReport) {
    let bound = short_disjointness_bound();
    if !(meta.delta > 0.0 && meta.delta < meta.epsilon) {
        r.violations.push(format!("need 0 < delta < epsilon, got {} and {}", meta.delta, meta.epsilon));
    }
    if meta.delta >= bound {
        r.violations.push(format!("delta {} is not below arcsinh(1) = {bound}", meta.delta));
    }
    if meta.epsilon >= 2.0 * bound {
        r.violations.push(format!("epsilon {} is not below 2·arcsinh(1)", meta.epsilon));
    } else if meta.epsilon >= bound {
        r.warnings.push(format!("epsilon {} is not below arcsinh(1)", meta.epsilon));
    }
    for (k, &l) in meta.lambda.iter().enumerate() {
        if !(l > 0.0 && l < meta.delta) {
            r.violations.push(format!("lambda[{k}] = {l} is outside (0, delta)"));
        }
    }
    let mut sorted = meta.lambda.clone();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| (w[1] - w[0]).abs() <= LENGTH_MATCH_TOL) {
        r.violations.push("lambda is not injective".into());
    }
    let n_internal = meta.lambda.len().saturating_sub(meta.genset.len());
    for c in &s.cuffs {
        let expected = match c.role {
            CuffRole::Internal { curve, .. } => meta.lambda.get(curve).copied(),
            CuffRole::Generator { generator, .. } => meta.lambda.get(n_internal + generator).copied(),
            CuffRole::Outer => Some(meta.epsilon),
            CuffRole::Plain => None,
        };
        if let Some(e) = expected {
            if (e - c.length).abs() > LENGTH_MATCH_TOL {
                r.violations.push(format!("cuff {} has length {} but the template says {e}", c.id, c.length));
            }
        }
    }
}

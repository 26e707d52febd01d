//! Configuration graphs of short curves.
//!
//! Nodes are the curves of a pants decomposition shorter than `δ` (seams
//! and short boundary cuffs), labeled by length, η marker and whether the
//! curve touches a boundary pants. Two nodes are joined for every pants in
//! which both appear as cuffs; the edge records which kind of slot each
//! side occupies, so `γ_s` and `γ̄_s` sides of a generator seam stay
//! distinguishable.
//!
//! These are graph-level statements. Whether the automorphism group of the
//! graph equals the isometry group of the surface is not checked here.

mod search;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::surfaces::{validate_surface, CuffRole, GluingGraphSurface, SlotRef};

pub use search::{are_isomorphic, automorphism_group, stabilizer, AutomorphismGroup, LabeledIsomorphism};

/// Largest graph accepted by the searches.
pub const MAX_NODES: usize = 10_000;

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum FingerprintError {
    #[error("surface failed validation: {0}")]
    InvalidSurface(String),
    #[error("delta must be positive and finite, got {0}")]
    InvalidDelta(f64),
    #[error("graph has {nodes} nodes, more than the limit {limit}")]
    TooLarge { nodes: usize, limit: usize },
    #[error("search budget of {0} branches exhausted")]
    Budget(usize),
    #[error("node {0} does not exist")]
    NoSuchNode(usize),
}

pub type Result<T, E = FingerprintError> = std::result::Result<T, E>;

/// Kind of pants slot a curve occupies on one side of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideKind {
    Internal,
    Generator,
    GeneratorBar,
    Outer,
    Plain,
}

impl From<CuffRole> for SideKind {
    fn from(role: CuffRole) -> Self {
        match role {
            CuffRole::Internal { .. } => SideKind::Internal,
            CuffRole::Generator { bar: false, .. } => SideKind::Generator,
            CuffRole::Generator { bar: true, .. } => SideKind::GeneratorBar,
            CuffRole::Outer => SideKind::Outer,
            CuffRole::Plain => SideKind::Plain,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveNode {
    pub id: usize,
    pub length: f64,
    /// Seam realizing the curve, or `None` for a boundary cuff.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seam: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<SlotRef>,
    /// `η_{i,k}` designation `(i, k)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marker: Option<(usize, usize)>,
    /// The curve is a cuff of a pants that also has a boundary cuff.
    pub boundary_adjacent: bool,
    /// Vertex copy of the first side.
    pub copy: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveEdge {
    pub a: usize,
    pub b: usize,
    pub pants: usize,
    pub sides: (SideKind, SideKind),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationGraph {
    pub delta: f64,
    pub nodes: Vec<CurveNode>,
    pub edges: Vec<CurveEdge>,
}

/// Node and edge counts that every isomorphism preserves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphInvariants {
    pub labels: Vec<f64>,
    pub degrees: Vec<usize>,
    pub markers: BTreeMap<String, usize>,
    pub boundary_adjacent: usize,
    pub edges: usize,
}

/// Curves of `s` shorter than `delta`, joined when they bound a common pants.
pub fn configuration_graph(s: &GluingGraphSurface, delta: f64) -> Result<ConfigurationGraph> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(FingerprintError::InvalidDelta(delta));
    }
    let report = validate_surface(s);
    if !report.is_valid() {
        return Err(FingerprintError::InvalidSurface(report.violations.join("; ")));
    }
    let has_boundary: Vec<bool> = {
        let mut v = vec![false; s.pants.len()];
        for b in &s.boundary {
            v[b.pants] = true;
        }
        v
    };
    let marker_of = |slot: SlotRef| match s.cuff(slot).role {
        CuffRole::Internal { marker, .. } => marker,
        _ => None,
    };
    let mut node_at: BTreeMap<SlotRef, usize> = BTreeMap::new();
    let mut nodes = Vec::new();
    for (i, seam) in s.seams.iter().enumerate() {
        let length = s.length(seam.a);
        if length >= delta {
            continue;
        }
        let id = nodes.len();
        node_at.insert(seam.a, id);
        node_at.insert(seam.b, id);
        nodes.push(CurveNode {
            id,
            length,
            seam: Some(i),
            boundary: None,
            marker: marker_of(seam.a).or(marker_of(seam.b)),
            boundary_adjacent: has_boundary[seam.a.pants] || has_boundary[seam.b.pants],
            copy: s.pants[seam.a.pants].copy,
        });
    }
    for &b in &s.boundary {
        let length = s.length(b);
        if length >= delta {
            continue;
        }
        let id = nodes.len();
        node_at.insert(b, id);
        // Its own pants is a boundary pants; only another boundary cuff there counts.
        let others = s.boundary.iter().any(|&o| o.pants == b.pants && o != b);
        nodes.push(CurveNode {
            id,
            length,
            seam: None,
            boundary: Some(b),
            marker: marker_of(b),
            boundary_adjacent: others,
            copy: s.pants[b.pants].copy,
        });
    }
    let mut edges = Vec::new();
    for p in 0..s.pants.len() {
        for j in 0..3 {
            for k in j + 1..3 {
                let (sj, sk) = (SlotRef::new(p, j), SlotRef::new(p, k));
                if let (Some(&a), Some(&b)) = (node_at.get(&sj), node_at.get(&sk)) {
                    let sides = (SideKind::from(s.cuff(sj).role), SideKind::from(s.cuff(sk).role));
                    edges.push(CurveEdge { a, b, pants: p, sides });
                }
            }
        }
    }
    Ok(ConfigurationGraph { delta, nodes, edges })
}

impl ConfigurationGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node lengths in increasing order.
    pub fn label_multiset(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.nodes.iter().map(|n| n.length).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Neighbors of every node with the sides seen from that node. A loop
    /// edge appears twice, once from each side.
    pub fn adjacency(&self) -> Vec<Vec<(usize, (SideKind, SideKind))>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.a].push((e.b, e.sides));
            adj[e.b].push((e.a, (e.sides.1, e.sides.0)));
        }
        adj
    }

    pub fn invariants(&self) -> GraphInvariants {
        let mut degrees: Vec<usize> = self.adjacency().iter().map(Vec::len).collect();
        degrees.sort_unstable();
        let mut markers = BTreeMap::new();
        for n in &self.nodes {
            if let Some((i, k)) = n.marker {
                *markers.entry(format!("eta({i},{k})")).or_insert(0) += 1;
            }
        }
        GraphInvariants {
            labels: self.label_multiset(),
            degrees,
            markers,
            boundary_adjacent: self.nodes.iter().filter(|n| n.boundary_adjacent).count(),
            edges: self.edges.len(),
        }
    }

    /// Edges as a sorted list of `(a, b, sides)` with `a ≤ b`.
    pub(crate) fn normalized_edges(&self, map: impl Fn(usize) -> usize) -> Vec<(usize, usize, SideKind, SideKind)> {
        let mut v: Vec<_> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (map(e.a), map(e.b));
                let (x, y) = e.sides;
                if a < b || (a == b && x <= y) {
                    (a, b, x, y)
                } else {
                    (b, a, y, x)
                }
            })
            .collect();
        v.sort_unstable();
        v
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

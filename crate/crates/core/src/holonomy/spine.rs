use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::groups::{CosetSpace, Elem, FiniteGroup};
use crate::surfaces::{validate_surface, GluingGraphSurface, SlotRef};

use super::pants::PantsFrame;
use super::{length_from_excess, translation_length, DdMatrix, HolonomyError, HolonomyMatrix, Isometry, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Double,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EdgeKind {
    /// Crossing seam `seam`, from slot `a` to slot `b` when `forward`.
    Seam { seam: usize, forward: bool },
    /// Loop around cuff `slot` of `pants`, inverted when `inverse`.
    Cuff { pants: usize, slot: usize, inverse: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpineEdge {
    pub src: usize,
    pub dst: usize,
    /// Holonomy in basepoint-centred frames: `B_src^{-1} E B_dst`.
    pub matrix: Isometry,
    pub label: Elem,
    pub reverse: usize,
    pub kind: EdgeKind,
    /// Sheet of the source vertex in a fiber-product cover.
    pub sheet: usize,
    /// Set on the former boundary seams of a double.
    pub fold: bool,
}

/// Graph with one vertex per pants (per sheet, for covers) whose closed
/// paths carry holonomy and monodromy.
///
/// Every seam gives a pair of edges and every cuff slot a pair of loops.
/// These generate π₁ with the pants and seam relations; a subset of the
/// edges, the *free* edges, generates it freely when the surface has
/// boundary. `expansion(e)` is the reduced word in free edges equal to `e`.
#[derive(Debug, Clone)]
pub struct SpineGraph {
    group: Arc<FiniteGroup>,
    vertices: usize,
    edges: Vec<SpineEdge>,
    free: Vec<bool>,
    expansions: Vec<Vec<u32>>,
    /// For closed surfaces: the relator left over after elimination.
    relator: Option<Vec<u32>>,
    /// Forward loop edge of each slot.
    slot_loops: Vec<[usize; 3]>,
    cuff_lengths: Vec<[f64; 3]>,
    base_vertex: Vec<usize>,
    /// Slots `(vertex, slot)` on either side of a fold seam.
    fold_slots: Vec<(usize, usize)>,
    cover_radius: f64,
    sheet_count: usize,
    precision: Precision,
}

const W: Isometry = Isometry::new(0.0, -1.0, 1.0, 0.0);

/// Builds the spine of a validated surface.
///
/// Seam `(a, b, t)` from pants `X` to pants `Y` has holonomy
/// `N_a · W · T(t) · N_b^{-1}` with `W: z ↦ −1/z` and `T(t): z ↦ e^t z`,
/// so the canonical foot on `b` lands at signed distance `−t` along the
/// oriented cuff `a`: a positive twist is a left twist seen from `a`.
pub fn assemble_spine(s: &GluingGraphSurface, group: Option<Arc<FiniteGroup>>, precision: Precision) -> Result<SpineGraph> {
    let report = validate_surface(s);
    if !report.is_valid() {
        return Err(HolonomyError::InvalidSurface(report.violations));
    }
    let labeled = s.seams.iter().any(|x| x.label.is_some());
    let group = match group {
        Some(g) => g,
        None if labeled => return Err(HolonomyError::MissingGroup),
        None => Arc::new(FiniteGroup::cyclic(1).expect("trivial group")),
    };
    if let Some(bad) = s.seams.iter().filter_map(|x| x.label).find(|&l| l >= group.order()) {
        return Err(HolonomyError::LabelOutOfRange(bad));
    }
    let np = s.pants.len();
    let lengths: Vec<[f64; 3]> = (0..np).map(|p| [0, 1, 2].map(|k| s.length(SlotRef::new(p, k)))).collect();
    let frames: Vec<PantsFrame> = lengths.iter().map(|&l| PantsFrame::new(l)).collect::<Result<_>>()?;
    let mut fold = vec![false; s.seams.len()];
    let mut fold_slots = Vec::new();
    if let Some(d) = &s.double {
        for &i in &d.fold_seams {
            fold[i] = true;
            let seam = &s.seams[i];
            fold_slots.push((seam.a.pants, seam.a.slot));
            fold_slots.push((seam.b.pants, seam.b.slot));
        }
    }

    let id = group.identity();
    let mut edges = Vec::with_capacity(2 * s.seams.len() + 6 * np);
    for (i, seam) in s.seams.iter().enumerate() {
        let (x, y) = (seam.a.pants, seam.b.pants);
        let na = frames[x].normal[seam.a.slot];
        let nb = frames[y].normal[seam.b.slot];
        let e = na.mul(&W).mul(&Isometry::translation(seam.twist)).mul(&nb.inverse());
        let m = frames[x].basepoint.inverse().mul(&e).mul(&frames[y].basepoint);
        let label = seam.label.unwrap_or(id);
        let base = edges.len();
        edges.push(SpineEdge {
            src: x,
            dst: y,
            matrix: m,
            label,
            reverse: base + 1,
            kind: EdgeKind::Seam { seam: i, forward: true },
            sheet: 0,
            fold: fold[i],
        });
        edges.push(SpineEdge {
            src: y,
            dst: x,
            matrix: m.inverse(),
            label: group.inv(label),
            reverse: base,
            kind: EdgeKind::Seam { seam: i, forward: false },
            sheet: 0,
            fold: fold[i],
        });
    }
    let mut slot_loops = vec![[0; 3]; np];
    for (p, f) in frames.iter().enumerate() {
        for k in 0..3 {
            let m = f.basepoint.inverse().mul(&f.cuffs[k]).mul(&f.basepoint);
            let base = edges.len();
            slot_loops[p][k] = base;
            for (inverse, matrix) in [(false, m), (true, m.inverse())] {
                edges.push(SpineEdge {
                    src: p,
                    dst: p,
                    matrix,
                    label: id,
                    reverse: if inverse { base } else { base + 1 },
                    kind: EdgeKind::Cuff { pants: p, slot: k, inverse },
                    sheet: 0,
                    fold: false,
                });
            }
        }
    }

    let slot_seam = s.slot_seams();
    let (free, expansions, relator) = eliminate(s, &slot_seam, &edges, &slot_loops);
    Ok(SpineGraph {
        group,
        vertices: np,
        edges,
        free,
        expansions,
        relator,
        slot_loops,
        cuff_lengths: lengths,
        base_vertex: (0..np).collect(),
        fold_slots,
        cover_radius: frames.iter().map(PantsFrame::cover_radius).fold(0.0, f64::max),
        sheet_count: 1,
        precision,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Relation {
    Root,
    Pants(usize),
    Seam(usize),
}

/// Tietze elimination: a BFS over the graph whose vertices are the
/// relations (plus a root joined to every boundary slot) and whose edges
/// are the slots. Each relation eliminates the slot it was reached by.
fn eliminate(
    s: &GluingGraphSurface,
    slot_seam: &[[Option<usize>; 3]],
    edges: &[SpineEdge],
    slot_loops: &[[usize; 3]],
) -> (Vec<bool>, Vec<Vec<u32>>, Option<Vec<u32>>) {
    let np = s.pants.len();
    let slots_of = |r: Relation| -> Vec<SlotRef> {
        match r {
            Relation::Root => s.boundary.clone(),
            Relation::Pants(p) => (0..3).map(|k| SlotRef::new(p, k)).collect(),
            Relation::Seam(i) => vec![s.seams[i].a, s.seams[i].b],
        }
    };
    let other_end = |r: Relation, slot: SlotRef| -> Relation {
        let outer = match slot_seam[slot.pants][slot.slot] {
            Some(i) => Relation::Seam(i),
            None => Relation::Root,
        };
        if r == Relation::Pants(slot.pants) {
            outer
        } else {
            Relation::Pants(slot.pants)
        }
    };
    let closed = s.boundary.is_empty();
    let root = if closed { Relation::Pants(0) } else { Relation::Root };
    let idx = |r: Relation| match r {
        Relation::Root => 0,
        Relation::Pants(p) => 1 + p,
        Relation::Seam(i) => 1 + np + i,
    };
    let mut visited = vec![false; 1 + np + s.seams.len()];
    // None: undecided, Some(None): free, Some(Some(r)): eliminated by r.
    let mut status: Vec<[Option<Option<Relation>>; 3]> = vec![[None; 3]; np];
    let mut queue = VecDeque::from([root]);
    visited[idx(root)] = true;
    while let Some(r) = queue.pop_front() {
        for slot in slots_of(r) {
            if status[slot.pants][slot.slot].is_some() {
                continue;
            }
            let next = other_end(r, slot);
            if visited[idx(next)] {
                status[slot.pants][slot.slot] = Some(None);
            } else {
                visited[idx(next)] = true;
                status[slot.pants][slot.slot] = Some(Some(next));
                queue.push_back(next);
            }
        }
    }

    let mut free = vec![false; edges.len()];
    for (e, edge) in edges.iter().enumerate() {
        free[e] = match edge.kind {
            EdgeKind::Seam { .. } => true,
            EdgeKind::Cuff { pants, slot, .. } => status[pants][slot] == Some(None),
        };
    }
    let mut memo: Vec<[Option<Vec<u32>>; 3]> = vec![[None, None, None]; np];
    let mut expansions = vec![Vec::new(); edges.len()];
    for p in 0..np {
        for k in 0..3 {
            let w = expand_slot(SlotRef::new(p, k), s, &status, slot_loops, edges, &mut memo);
            let e = slot_loops[p][k];
            expansions[e + 1] = invert(&w, edges);
            expansions[e] = w;
        }
    }
    for (e, edge) in edges.iter().enumerate() {
        if let EdgeKind::Seam { .. } = edge.kind {
            expansions[e] = vec![e as u32];
        }
    }
    let relator = closed.then(|| {
        let mut w = Vec::new();
        for k in 0..3 {
            w.extend_from_slice(&expansions[slot_loops[0][k]]);
        }
        reduce(&w, edges)
    });
    (free, expansions, relator)
}

fn expand_slot(
    slot: SlotRef,
    s: &GluingGraphSurface,
    status: &[[Option<Option<Relation>>; 3]],
    slot_loops: &[[usize; 3]],
    edges: &[SpineEdge],
    memo: &mut Vec<[Option<Vec<u32>>; 3]>,
) -> Vec<u32> {
    if let Some(w) = &memo[slot.pants][slot.slot] {
        return w.clone();
    }
    let (p, k) = (slot.pants, slot.slot);
    let w = match status[p][k].expect("every slot is classified") {
        None => vec![slot_loops[p][k] as u32],
        Some(Relation::Pants(_)) => {
            // c_k = c_{k+2}^{-1} c_{k+1}^{-1}
            let a = expand_slot(SlotRef::new(p, (k + 2) % 3), s, status, slot_loops, edges, memo);
            let b = expand_slot(SlotRef::new(p, (k + 1) % 3), s, status, slot_loops, edges, memo);
            let mut w = invert(&a, edges);
            w.extend(invert(&b, edges));
            reduce(&w, edges)
        }
        Some(Relation::Seam(i)) => {
            // E c_b E^{-1} = c_a^{-1}, E the forward seam edge.
            let seam = &s.seams[i];
            let forward = (2 * i) as u32;
            let backward = forward + 1;
            let (other, first, last) = if seam.a == slot { (seam.b, forward, backward) } else { (seam.a, backward, forward) };
            let inner = expand_slot(other, s, status, slot_loops, edges, memo);
            let mut w = vec![first];
            w.extend(invert(&inner, edges));
            w.push(last);
            reduce(&w, edges)
        }
        Some(Relation::Root) => unreachable!("the root eliminates nothing"),
    };
    memo[p][k] = Some(w.clone());
    w
}

pub(crate) fn invert(w: &[u32], edges: &[SpineEdge]) -> Vec<u32> {
    w.iter().rev().map(|&e| edges[e as usize].reverse as u32).collect()
}

/// Free reduction: cancels adjacent `e, reverse(e)` pairs.
pub(crate) fn reduce(w: &[u32], edges: &[SpineEdge]) -> Vec<u32> {
    let mut out: Vec<u32> = Vec::with_capacity(w.len());
    for &e in w {
        match out.last() {
            Some(&last) if edges[last as usize].reverse == e as usize => {
                out.pop();
            }
            _ => out.push(e),
        }
    }
    out
}

impl SpineGraph {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[SpineEdge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &SpineEdge {
        &self.edges[e]
    }

    pub fn is_free(&self, e: usize) -> bool {
        self.free[e]
    }

    pub fn expansion(&self, e: usize) -> &[u32] {
        &self.expansions[e]
    }

    /// Some surface relation survives elimination, i.e. the surface is closed.
    pub fn relator(&self) -> Option<&[u32]> {
        self.relator.as_deref()
    }

    pub fn is_closed(&self) -> bool {
        self.relator.is_some()
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    pub fn sheet_count(&self) -> usize {
        self.sheet_count
    }

    /// Pants index underlying vertex `v`.
    pub fn base_vertex(&self, v: usize) -> usize {
        self.base_vertex[v]
    }

    /// Forward loop edge around slot `k` of vertex `v`.
    pub fn slot_loop(&self, v: usize, k: usize) -> usize {
        self.slot_loops[v][k]
    }

    pub fn cuff_length(&self, v: usize, k: usize) -> f64 {
        self.cuff_lengths[v][k]
    }

    /// Every point of the surface has a lift within this distance of the
    /// basepoint of some vertex.
    pub fn cover_radius(&self) -> f64 {
        self.cover_radius
    }

    pub fn fold_slots(&self) -> &[(usize, usize)] {
        &self.fold_slots
    }

    /// Outgoing edges of every vertex, in id order.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.vertices];
        for (e, edge) in self.edges.iter().enumerate() {
            adj[edge.src].push(e as u32);
        }
        adj
    }

    /// Matrix and monodromy of a path, multiplied in path order.
    pub fn path_eval(&self, path: &[usize]) -> Result<(Isometry, Elem)> {
        let mut m = Isometry::IDENTITY;
        let mut g = self.group.identity();
        for (i, &e) in path.iter().enumerate() {
            let edge = self.edges.get(e).ok_or(HolonomyError::UnknownEdge(e))?;
            if i > 0 && self.edges[path[i - 1]].dst != edge.src {
                return Err(HolonomyError::NotConsecutive(i));
            }
            m = m.mul(&edge.matrix);
            g = self.group.mul(g, edge.label);
        }
        Ok((m, g))
    }

    /// Like [`path_eval`](Self::path_eval) for words of `u32` edge ids.
    pub fn word_eval(&self, word: &[u32]) -> Result<(Isometry, Elem)> {
        let path: Vec<usize> = word.iter().map(|&e| e as usize).collect();
        self.path_eval(&path)
    }

    pub fn invert_word(&self, w: &[u32]) -> Vec<u32> {
        invert(w, &self.edges)
    }

    pub fn reduce_word(&self, w: &[u32]) -> Vec<u32> {
        reduce(w, &self.edges)
    }

    /// Largest deviation between a slot's prescribed length and the
    /// translation length of its loop edge.
    pub fn cuff_length_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for v in 0..self.vertices {
            for k in 0..3 {
                let l = translation_length(&self.edges[self.slot_loops[v][k]].matrix).unwrap_or(0.0);
                worst = worst.max((l - self.cuff_lengths[v][k]).abs());
            }
        }
        worst
    }

    /// Largest length error when each cuff loop is evaluated through its
    /// free-word expansion, which exercises every pants and seam relation.
    /// Products run in the spine's precision.
    pub fn relation_error(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for v in 0..self.vertices {
            for k in 0..3 {
                let w = &self.expansions[self.slot_loops[v][k]];
                let excess = match self.precision {
                    Precision::Double => self.word_product::<Isometry>(w)?.trace_excess(),
                    Precision::Extended => self.word_product::<DdMatrix>(w)?.trace_excess(),
                };
                let l = length_from_excess(excess, 0.0).ok_or(HolonomyError::NotHyperbolic)?;
                worst = worst.max((l - self.cuff_lengths[v][k]).abs());
            }
        }
        Ok(worst)
    }

    /// Matrix product along a word in the requested precision.
    pub fn word_product<M: HolonomyMatrix>(&self, w: &[u32]) -> Result<M> {
        let mut m = M::from_isometry(&Isometry::IDENTITY);
        for (i, &e) in w.iter().enumerate() {
            let edge = self.edges.get(e as usize).ok_or(HolonomyError::UnknownEdge(e as usize))?;
            if i > 0 && self.edges[w[i - 1] as usize].dst != edge.src {
                return Err(HolonomyError::NotConsecutive(i));
            }
            m = m.mul(&M::from_isometry(&edge.matrix));
        }
        Ok(m)
    }

    /// Text form of a word, e.g. `s3 c0.1' s3'` (`'` marks inverses).
    pub fn word_name(&self, w: &[u32]) -> String {
        let names: Vec<String> = w.iter().map(|&e| self.edge_name(e as usize)).collect();
        names.join(" ")
    }

    pub fn edge_name(&self, e: usize) -> String {
        let edge = &self.edges[e];
        let sheet = if self.sheet_count > 1 { format!("@{}", edge.sheet) } else { String::new() };
        match edge.kind {
            EdgeKind::Seam { seam, forward } => format!("s{seam}{sheet}{}", if forward { "" } else { "'" }),
            EdgeKind::Cuff { pants, slot, inverse } => format!("c{pants}.{slot}{sheet}{}", if inverse { "'" } else { "" }),
        }
    }

    /// Free edges leaving `v`, in id order.
    pub fn free_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(|&e| self.free[e])
    }

    /// Reassigns monodromy: `label(e)` for every free edge; other edges get
    /// the product along their expansion.
    pub fn relabeled(&self, group: Arc<FiniteGroup>, mut label: impl FnMut(usize) -> Elem) -> Result<SpineGraph> {
        let mut out = self.clone();
        out.group = group;
        for e in 0..out.edges.len() {
            if out.free[e] {
                let rev = out.edges[e].reverse;
                if rev < e && out.free[rev] {
                    continue;
                }
                let l = label(e);
                if l >= out.group.order() {
                    return Err(HolonomyError::LabelOutOfRange(l));
                }
                out.edges[e].label = l;
                out.edges[rev].label = out.group.inv(l);
            }
        }
        for e in 0..out.edges.len() {
            if !out.free[e] {
                let l = out.expansions[e].iter().fold(out.group.identity(), |acc, &f| out.group.mul(acc, out.edges[f as usize].label));
                out.edges[e].label = l;
            }
        }
        Ok(out)
    }

    /// Fiber product with the coset graph: vertex `(v, c)` has id
    /// `v·n + c`; edge `(e, c)` runs from `(src, c)` to `(dst, c·label)`.
    pub fn cover(&self, cosets: &CosetSpace) -> Result<SpineGraph> {
        if !Arc::ptr_eq(cosets.subgroup().group(), &self.group) && **cosets.subgroup().group() != *self.group {
            return Err(HolonomyError::GroupMismatch);
        }
        let n = cosets.len();
        if self.sheet_count != 1 {
            return Err(HolonomyError::GroupMismatch);
        }
        let cover_edge = |e: usize, c: usize| e * n + c;
        let mut edges = Vec::with_capacity(self.edges.len() * n);
        for edge in &self.edges {
            for c in 0..n {
                let d = cosets.act(c, edge.label);
                edges.push(SpineEdge {
                    src: edge.src * n + c,
                    dst: edge.dst * n + d,
                    reverse: cover_edge(edge.reverse, d),
                    sheet: c,
                    ..edge.clone()
                });
            }
        }
        let lift = |w: &[u32], mut c: usize| -> Vec<u32> {
            w.iter()
                .map(|&f| {
                    let id = cover_edge(f as usize, c) as u32;
                    c = cosets.act(c, self.edges[f as usize].label);
                    id
                })
                .collect()
        };
        let mut free = Vec::with_capacity(edges.len());
        let mut expansions = Vec::with_capacity(edges.len());
        for (e, edge) in self.edges.iter().enumerate() {
            let _ = edge;
            for c in 0..n {
                free.push(self.free[e]);
                expansions.push(lift(&self.expansions[e], c));
            }
        }
        let relator = self.relator.as_ref().map(|r| lift(r, 0));
        let slot_loops = (0..self.vertices * n).map(|v| self.slot_loops[v / n].map(|e| cover_edge(e, v % n))).collect();
        let cuff_lengths = (0..self.vertices * n).map(|v| self.cuff_lengths[v / n]).collect();
        let base_vertex = (0..self.vertices * n).map(|v| self.base_vertex[v / n]).collect();
        let fold_slots = self.fold_slots.iter().flat_map(|&(v, k)| (0..n).map(move |c| (v * n + c, k))).collect();
        Ok(SpineGraph {
            group: self.group.clone(),
            vertices: self.vertices * n,
            edges,
            free,
            expansions,
            relator,
            slot_loops,
            cuff_lengths,
            base_vertex,
            fold_slots,
            cover_radius: self.cover_radius,
            sheet_count: n,
            precision: self.precision,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{coset_space, named_subgroups, Subgroup};
    use crate::surfaces::{build_template, cayley_surface, double, Seam};

    #[test]
    fn single_pants_recovers_cuffs() {
        let s = GluingGraphSurface::pants([1.0, 1.2, 1.4]);
        let sp = assemble_spine(&s, None, Precision::Double).unwrap();
        assert_eq!(sp.vertex_count(), 1);
        assert_eq!(sp.free_edges().count(), 4);
        assert!(sp.cuff_length_error() < 1e-10);
        assert!(!sp.is_closed());
    }

    #[test]
    fn path_eval_basics() {
        let s = GluingGraphSurface::pants([1.0, 1.2, 1.4]);
        let sp = assemble_spine(&s, None, Precision::Double).unwrap();
        let (m, g) = sp.path_eval(&[]).unwrap();
        assert_eq!((m, g), (Isometry::IDENTITY, sp.group().identity()));
        for e in 0..sp.edges().len() {
            let r = sp.edge(e).reverse;
            assert_eq!(sp.edge(r).reverse, e);
            let (m, _) = sp.path_eval(&[e, r]).unwrap();
            assert!(m.distance_pm(&Isometry::IDENTITY) < 1e-12);
        }
    }

    #[test]
    fn cayley_z3_recovers_all_lengths() {
        let g = Arc::new(FiniteGroup::cyclic(3).unwrap());
        let t = build_template(3, 0.5, 0.8, 4, &[]).unwrap();
        let s = cayley_surface(&g, &[0, 1, 2], &t).unwrap();
        let sp = assemble_spine(&s, Some(g.clone()), Precision::Double).unwrap();
        assert!(sp.cuff_length_error() < 1e-8);
        assert!(sp.relation_error().unwrap() < 1e-6);
        // Free rank is 1 − χ.
        let free_pairs = sp.free_edges().count() / 2;
        assert_eq!(free_pairs as i64 - sp.vertex_count() as i64 + 1, 1 + s.pants.len() as i64);
        let ext = assemble_spine(&s, Some(g), Precision::Extended).unwrap();
        assert!(ext.relation_error().unwrap() < 1e-6);
    }

    #[test]
    fn seam_edges_conjugate_cuffs() {
        let g = Arc::new(FiniteGroup::cyclic(3).unwrap());
        let t = build_template(3, 0.5, 0.8, 4, &[]).unwrap();
        let mut s = cayley_surface(&g, &[0, 1, 2], &t).unwrap();
        s.seams[0].twist = 0.37;
        let sp = assemble_spine(&s, Some(g), Precision::Double).unwrap();
        for (i, seam) in s.seams.iter().enumerate() {
            let e = sp.edge(2 * i).matrix;
            let ca = sp.edge(sp.slot_loop(seam.a.pants, seam.a.slot)).matrix;
            let cb = sp.edge(sp.slot_loop(seam.b.pants, seam.b.slot)).matrix;
            let lhs = e.mul(&cb).mul(&e.inverse());
            assert!(lhs.distance_pm(&ca.inverse()) < 1e-9, "seam {i}");
        }
    }

    #[test]
    fn monodromy_of_a_seam_loop() {
        let g = Arc::new(FiniteGroup::cyclic(3).unwrap());
        let t = build_template(1, 0.5, 0.8, 4, &[]).unwrap();
        let s = crate::surfaces::schreier_surface(&Subgroup::whole(&g), &[1], &t).unwrap();
        let sp = assemble_spine(&s, Some(g.clone()), Precision::Double).unwrap();
        let (_, h) = sp.path_eval(&[0]).unwrap();
        assert_eq!(h, 1);
    }

    fn two_pants(twist: f64) -> GluingGraphSurface {
        let mut s = GluingGraphSurface::pants([1.0, 1.2, 1.4]);
        let t = GluingGraphSurface::pants([1.0, 0.9, 0.8]);
        s.pants.push(crate::surfaces::Pants { id: 1, cuffs: [3, 4, 5], copy: 0, template_pants: None });
        for (i, c) in t.cuffs.iter().enumerate() {
            s.cuffs.push(crate::surfaces::Cuff { id: 3 + i, ..c.clone() });
        }
        s.boundary = vec![SlotRef::new(0, 1), SlotRef::new(0, 2), SlotRef::new(1, 1), SlotRef::new(1, 2)];
        s.seams.push(Seam { a: SlotRef::new(0, 0), b: SlotRef::new(1, 0), twist, label: None, label_name: None });
        s
    }

    fn length(sp: &SpineGraph, path: &[usize]) -> f64 {
        translation_length(&sp.path_eval(path).unwrap().0).unwrap()
    }

    #[test]
    fn twist_by_full_length_keeps_cuff_and_crossing_traces() {
        let sp0 = assemble_spine(&two_pants(0.3), None, Precision::Double).unwrap();
        let sp1 = assemble_spine(&two_pants(1.3), None, Precision::Double).unwrap();
        assert!(sp0.cuff_length_error() < 1e-12);
        assert!(sp1.cuff_length_error() < 1e-12);
        // A full twist multiplies the seam edge by the cuff element, so the
        // same geodesic gains one inserted cuff loop.
        let w0 = [sp0.slot_loop(0, 1), 0, sp0.slot_loop(1, 1), 1];
        let cb = sp1.slot_loop(1, 0);
        let w1 = [sp1.slot_loop(0, 1), 0, cb + 1, sp1.slot_loop(1, 1), cb, 1];
        let (l0, l1) = (length(&sp0, &w0), length(&sp1, &w1));
        assert!((l0 - l1).abs() < 1e-9, "{l0} vs {l1}");
        assert!((l0 - length(&sp1, &w0)).abs() > 1e-3);
    }

    /// Shortest length over `c_x^k · path[0] · c_y^j · path[1]`, |k|,|j| ≤ 3.
    fn shortest_with_twists(sp: &SpineGraph, path: [usize; 2], x: usize, y: usize) -> f64 {
        let mut best = f64::MAX;
        for k in -3i32..=3 {
            for j in -3i32..=3 {
                let mut w = Vec::new();
                w.extend(std::iter::repeat(if k > 0 { x } else { x + 1 }).take(k.unsigned_abs() as usize));
                w.push(path[0]);
                w.extend(std::iter::repeat(if j > 0 { y } else { y + 1 }).take(j.unsigned_abs() as usize));
                w.push(path[1]);
                best = best.min(length(sp, &w));
            }
        }
        best
    }

    #[test]
    fn double_of_pants_is_closed_and_symmetric() {
        let p = GluingGraphSurface::pants([1.0, 1.2, 1.4]);
        let d = double(&p).unwrap();
        let sp = assemble_spine(&d, None, Precision::Double).unwrap();
        assert!(sp.is_closed());
        assert!(sp.cuff_length_error() < 1e-12);
        let (m, _) = sp.word_eval(sp.relator().unwrap()).unwrap();
        assert!(m.distance_pm(&Isometry::IDENTITY) < 1e-9);
        // The shortest geodesic crossing folds 0 and 1 once each is the
        // doubled perpendicular between those cuffs.
        let fold = |k: usize| 2 * d.double.as_ref().unwrap().fold_seams[k];
        let path = [fold(0), sp.edge(fold(1)).reverse];
        let (x, y) = (sp.slot_loop(0, 0), sp.slot_loop(1, 2));
        let want = 2.0 * super::super::pants::cuff_distance_cosh(1.0, 1.2, 1.4).acosh();
        assert!((shortest_with_twists(&sp, path, x, y) - want).abs() < 1e-9);
        // Moving every fold twist by ±ℓ/4 gives mirror-image surfaces.
        let shifted = |frac: f64| {
            let mut d2 = d.clone();
            for &f in &d.double.as_ref().unwrap().fold_seams {
                d2.seams[f].twist += frac * d.length(d.seams[f].a);
            }
            let sp2 = assemble_spine(&d2, None, Precision::Double).unwrap();
            shortest_with_twists(&sp2, path, x, y)
        };
        let (lo, hi) = (shifted(-0.25), shifted(0.25));
        assert!((lo - hi).abs() < 1e-9 && lo > want + 1e-3);
    }

    #[test]
    fn mirror_copy_has_mirrored_internal_twists() {
        for twist in [0.0, 0.3, -0.45] {
            let d = double(&two_pants(twist)).unwrap();
            let sp = assemble_spine(&d, None, Precision::Double).unwrap();
            // Seam 0 in copy A and its mirror, seam 1, in copy B. Mirroring
            // reverses cuff orientations, so the loops are inverted.
            let wa = [sp.slot_loop(0, 1), 0, sp.slot_loop(1, 1), 1];
            let wb = [sp.slot_loop(2, 2) + 1, 2, sp.slot_loop(3, 2) + 1, 3];
            assert!((length(&sp, &wa) - length(&sp, &wb)).abs() < 1e-9, "twist {twist}");
        }
    }

    #[test]
    fn fiber_product_cover() {
        let h = Arc::new(FiniteGroup::holomorph_z8());
        let (h1, _) = named_subgroups(&h).unwrap();
        let s = GluingGraphSurface::pants([1.0, 1.2, 1.4]);
        let sp = assemble_spine(&s, None, Precision::Double).unwrap();
        let a = h.element_by_name("(3,0)").unwrap();
        let b = h.element_by_name("(1,1)").unwrap();
        let mut gens = vec![a, b].into_iter();
        let free_loops: Vec<usize> = sp.free_edges().filter(|&e| matches!(sp.edge(e).kind, EdgeKind::Cuff { inverse: false, .. })).collect();
        let lab = sp.relabeled(h.clone(), |e| if free_loops.contains(&e) { gens.next().unwrap() } else { h.identity() });
        let lab = lab.unwrap();
        let cs = coset_space(&h1);
        let cover = lab.cover(&cs).unwrap();
        assert_eq!(cover.vertex_count(), 8);
        for e in 0..cover.edges().len() {
            let edge = cover.edge(e);
            assert_eq!(cover.edge(edge.reverse).reverse, e);
            assert_eq!(cover.edge(edge.reverse).src, edge.dst);
            let w = cover.expansion(e);
            let (m, _) = cover.word_eval(w).unwrap();
            assert!(m.distance_pm(&edge.matrix) < 1e-9);
            if !w.is_empty() {
                assert_eq!(cover.edge(w[0] as usize).src, edge.src);
                assert_eq!(cover.edge(*w.last().unwrap() as usize).dst, edge.dst);
            }
        }
    }
}

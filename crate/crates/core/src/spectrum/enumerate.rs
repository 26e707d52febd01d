use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::groups::{conjugacy_classes, Elem};
use crate::holonomy::{length_from_excess, DdMatrix, HolonomyMatrix, Isometry, Precision, SpineGraph};

use super::{Enumeration, EnumerationParams, EnumerationStats, GeodesicRecord, LengthSpectrum, Result, SpectrumError};

const EXCESS_TOL: f64 = 1e-12;
/// Grid step for the orbit-point index, in `log y`.
const CELL: f64 = 0.25;
/// Two orbit points are equal when `cosh d − 1` is below this.
const SAME_POINT: f64 = 1e-9;
/// Boundary points closer than this (in angle) are equal.
const ANGLE_TOL: f64 = 1e-7;
/// Lengths closer than this may belong to one class.
const LENGTH_TOL: f64 = 1e-7;

/// A path from the start vertex, stored as a parent link.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BallNode {
    parent: u32,
    edge: u32,
    vertex: u32,
    depth: u32,
    iso: Isometry,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    node: u32,
    length: f64,
}

/// Pruned BFS ball around one start vertex.
pub(crate) struct Ball {
    start: usize,
    nodes: Vec<BallNode>,
    candidates: Vec<Candidate>,
    saturated: bool,
    exhausted: bool,
    depth: usize,
}

impl Ball {
    fn path(&self, mut n: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.nodes[n as usize].depth as usize);
        while n != 0 {
            let node = &self.nodes[n as usize];
            out.push(node.edge);
            n = node.parent;
        }
        out.reverse();
        out
    }
}

/// Orbit points `M·i` per end vertex, bucketed on a grid that is uniform
/// in the hyperbolic metric.
#[derive(Default)]
struct PointIndex {
    cells: HashMap<(u32, i64, i64), Vec<u32>>,
    points: Vec<(f64, f64)>,
}

impl PointIndex {
    fn cell(x: f64, row: i64) -> i64 {
        (x / (CELL * (row as f64 * CELL).exp())).floor() as i64
    }

    /// Inserts unless an equal point at `vertex` is already present.
    fn insert(&mut self, vertex: u32, (x, y): (f64, f64)) -> bool {
        let row = (y.ln() / CELL).floor() as i64;
        for r in row - 1..=row + 1 {
            let c = Self::cell(x, r);
            for k in c - 1..=c + 1 {
                if let Some(ids) = self.cells.get(&(vertex, r, k)) {
                    for &id in ids {
                        let (qx, qy) = self.points[id as usize];
                        if ((x - qx).powi(2) + (y - qy).powi(2)) / (2.0 * y * qy) < SAME_POINT {
                            return false;
                        }
                    }
                }
            }
        }
        let id = self.points.len() as u32;
        self.points.push((x, y));
        self.cells.entry((vertex, row, Self::cell(x, row))).or_default().push(id);
        true
    }
}

fn explore<M: HolonomyMatrix>(sp: &SpineGraph, adj: &[Vec<u32>], start: usize, cutoff: f64, p: &EnumerationParams) -> Ball {
    let radius_cosh = (cutoff + 2.0 * p.slack).cosh();
    let edges = sp.edges();
    let steps: Vec<M> = edges.iter().map(|e| M::from_isometry(&e.matrix)).collect();
    let mut nodes = vec![BallNode { parent: 0, edge: u32::MAX, vertex: start as u32, depth: 0, iso: Isometry::IDENTITY }];
    let mut mats = vec![M::from_isometry(&Isometry::IDENTITY)];
    let mut index = PointIndex::default();
    index.insert(start as u32, (0.0, 1.0));
    let mut candidates = Vec::new();
    let (mut layer, mut depth, mut last_hit) = (0..1, 0usize, 0usize);
    let (mut saturated, mut exhausted) = (false, false);
    loop {
        if layer.is_empty() {
            saturated = true;
            break;
        }
        if depth >= p.max_depth {
            saturated = depth >= last_hit + 2;
            break;
        }
        let next = nodes.len();
        for n in layer.clone() {
            let node = nodes[n];
            for &e in &adj[node.vertex as usize] {
                if n > 0 && edges[node.edge as usize].reverse == e as usize {
                    continue;
                }
                let edge = &edges[e as usize];
                let m = mats[n].mul(&steps[e as usize]);
                if m.cosh_displacement() > radius_cosh {
                    continue;
                }
                let iso = m.to_isometry();
                if !index.insert(edge.dst as u32, iso.apply((0.0, 1.0))) {
                    continue;
                }
                let id = nodes.len() as u32;
                nodes.push(BallNode { parent: n as u32, edge: e, vertex: edge.dst as u32, depth: depth as u32 + 1, iso });
                mats.push(m);
                if edge.dst == start {
                    if let Some(l) = length_from_excess(m.trace_excess(), EXCESS_TOL).filter(|&l| l <= cutoff) {
                        candidates.push(Candidate { node: id, length: l });
                        last_hit = depth + 1;
                    }
                }
            }
            if nodes.len() > p.node_budget {
                exhausted = true;
                break;
            }
        }
        if exhausted {
            break;
        }
        layer = next..nodes.len();
        depth += 1;
    }
    Ball { start, nodes, candidates, saturated, exhausted, depth }
}

/// Strips `e … reverse(e)` from the two ends of a closed path.
fn cyclic_reduce(sp: &SpineGraph, w: &[u32]) -> Vec<u32> {
    let w = sp.reduce_word(w);
    let (mut i, mut j) = (0, w.len());
    while j - i >= 2 && sp.edge(w[i] as usize).reverse == w[j - 1] as usize {
        i += 1;
        j -= 1;
    }
    w[i..j].to_vec()
}

/// Least rotation of `w` or its inverse, and the least period of `w`.
fn canonical(sp: &SpineGraph, w: &[u32]) -> (Vec<u32>, usize) {
    let n = w.len();
    let period = (1..=n).find(|&p| n % p == 0 && (0..n).all(|i| w[i] == w[(i + p) % n])).unwrap_or(n);
    let inv = sp.invert_word(w);
    let mut best: Option<Vec<u32>> = None;
    for word in [w, &inv[..]] {
        for r in 0..n {
            let rot: Vec<u32> = word[r..].iter().chain(&word[..r]).copied().collect();
            if best.as_ref().is_none_or(|b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    (best.unwrap_or_default(), period)
}

/// A primitive class ready to be turned into records.
#[derive(Debug, Clone)]
pub(crate) struct Primitive {
    pub length: f64,
    pub edges: Vec<u32>,
    pub word: String,
    pub monodromy: Elem,
    pub crosses_fold: bool,
}

fn word_label(sp: &SpineGraph, w: &[u32]) -> Elem {
    let g = sp.group();
    w.iter().fold(g.identity(), |acc, &e| g.mul(acc, sp.edge(e as usize).label))
}

pub(crate) fn balls(sp: &SpineGraph, cutoff: f64, params: &EnumerationParams) -> Result<Vec<Ball>> {
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(SpectrumError::InvalidCutoff(cutoff));
    }
    params.check()?;
    let adj = sp.adjacency();
    Ok((0..sp.vertex_count())
        .into_par_iter()
        .map(|s| match sp.precision() {
            Precision::Double => explore::<Isometry>(sp, &adj, s, cutoff, params),
            Precision::Extended => explore::<DdMatrix>(sp, &adj, s, cutoff, params),
        })
        .collect())
}

fn stats_of(sp: &SpineGraph, balls: &[Ball]) -> EnumerationStats {
    EnumerationStats {
        cover_radius: sp.cover_radius(),
        nodes: balls.iter().map(|b| b.nodes.len()).sum(),
        depth: balls.iter().map(|b| b.depth).max().unwrap_or(0),
        budget_exhausted: balls.iter().any(|b| b.exhausted),
        saturated: balls.iter().all(|b| b.saturated),
    }
}

/// Primitive classes of a surface with boundary: the canonical form of a
/// class is its cyclically reduced word in the free edges, so classes
/// found from different start vertices merge exactly.
fn bordered_primitives(sp: &SpineGraph, balls: &[Ball]) -> Vec<Primitive> {
    let per_ball: Vec<Vec<(Vec<u32>, u32, f64)>> = balls
        .par_iter()
        .map(|ball| {
            let mut out = Vec::new();
            for c in &ball.candidates {
                let path = ball.path(c.node);
                let free: Vec<u32> = path.iter().flat_map(|&e| sp.expansion(e as usize).iter().copied()).collect();
                let (word, period) = canonical(sp, &cyclic_reduce(sp, &free));
                if period == word.len() {
                    out.push((word, ball.nodes[c.node as usize].depth, c.length));
                }
            }
            out
        })
        .collect();
    // Keep the shortest path of each class: its matrix is the most accurate.
    let mut classes: BTreeMap<Vec<u32>, (u32, f64)> = BTreeMap::new();
    for (word, depth, length) in per_ball.into_iter().flatten() {
        match classes.get(&word) {
            Some(&(d, _)) if d <= depth => {}
            _ => {
                classes.insert(word, (depth, length));
            }
        }
    }
    classes
        .into_iter()
        .map(|(edges, (_, length))| Primitive {
            length,
            word: sp.word_name(&edges),
            monodromy: word_label(sp, &edges),
            edges,
            crosses_fold: false,
        })
        .collect()
}

/// Boundary angles of the axis of a hyperbolic element, as seen from `i`.
fn axis_angles(m: &Isometry) -> Option<[f64; 2]> {
    let (v, w) = m.fixed_vectors()?;
    Some([angle(v), angle(w)])
}

fn angle((x, y): (f64, f64)) -> f64 {
    (2.0 * y.atan2(x)).rem_euclid(std::f64::consts::TAU)
}

fn move_angle(m: &Isometry, t: f64) -> f64 {
    let (x, y) = ((t / 2.0).cos(), (t / 2.0).sin());
    angle((m.a * x + m.b * y, m.c * x + m.d * y))
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(std::f64::consts::TAU - d)
}

fn same_axis(a: [f64; 2], b: [f64; 2]) -> bool {
    (angle_gap(a[0], b[0]) < ANGLE_TOL && angle_gap(a[1], b[1]) < ANGLE_TOL)
        || (angle_gap(a[0], b[1]) < ANGLE_TOL && angle_gap(a[1], b[0]) < ANGLE_TOL)
}

/// `cosh` of the distance from `i` to the geodesic with these endpoints.
fn axis_cosh_distance(a: [f64; 2]) -> f64 {
    1.0 / ((a[0] - a[1]).abs() / 2.0).sin().max(1e-300)
}

/// The geodesics with endpoints `a` and `b` cross transversally.
fn crosses(a: [f64; 2], b: [f64; 2]) -> bool {
    if [a[0], a[1]].iter().any(|&x| angle_gap(x, b[0]) < ANGLE_TOL || angle_gap(x, b[1]) < ANGLE_TOL) {
        return false;
    }
    let (lo, hi) = (a[0].min(a[1]), a[0].max(a[1]));
    let inside = |t: f64| lo < t && t < hi;
    inside(b[0]) != inside(b[1])
}

/// A primitive axis through the ball around `start`.
#[derive(Debug, Clone)]
struct AxisRep {
    ball: usize,
    node: u32,
    length: f64,
    ends: [f64; 2],
    dist: f64,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Primitive classes of a closed surface. Candidates at one start vertex
/// sharing an axis are one geodesic and its powers; lifts seen from
/// different start vertices are matched by conjugating with ball elements.
fn closed_primitives(sp: &SpineGraph, balls: &[Ball], fold_check: bool) -> Vec<Primitive> {
    // Every class has a lift this close to some basepoint; farther lifts
    // add nothing.
    let radius = sp.cover_radius() + 1e-6;
    let mut reps: Vec<AxisRep> = Vec::new();
    let mut by_vertex: Vec<Vec<usize>> = vec![Vec::new(); balls.len()];
    for (b, ball) in balls.iter().enumerate() {
        let mut order: Vec<&Candidate> = ball.candidates.iter().collect();
        order.sort_by(|x, y| x.length.total_cmp(&y.length).then(x.node.cmp(&y.node)));
        let mut local: Vec<usize> = Vec::new();
        for c in order {
            let Some(ends) = axis_angles(&ball.nodes[c.node as usize].iso) else { continue };
            let dist = axis_cosh_distance(ends).acosh();
            if dist > radius {
                continue;
            }
            // Shorter elements come first, so a match is a root of `c`.
            if local.iter().any(|&r| same_axis(reps[r].ends, ends)) {
                continue;
            }
            local.push(reps.len());
            reps.push(AxisRep {
                ball: b,
                node: c.node,
                length: c.length,
                ends,
                dist,
            });
        }
        by_vertex[ball.start] = local;
    }

    let mut parent: Vec<usize> = (0..reps.len()).collect();
    let links: Vec<Vec<(usize, usize)>> = balls
        .par_iter()
        .map(|ball| {
            let here = &by_vertex[ball.start];
            let Some(reach) = here.iter().map(|&r| reps[r].dist).reduce(f64::max) else { return Vec::new() };
            let mut out = Vec::new();
            for node in &ball.nodes {
                let disp = node.iso.displacement();
                for &g in &by_vertex[node.vertex as usize] {
                    let rg = &reps[g];
                    if disp > rg.dist + reach + rg.length / 2.0 + 0.5 {
                        continue;
                    }
                    let ends = rg.ends.map(|t| move_angle(&node.iso, t));
                    let dist = axis_cosh_distance(ends).acosh();
                    for &h in here {
                        let rh = &reps[h];
                        if h != g
                            && (rh.length - rg.length).abs() < LENGTH_TOL
                            && (rh.dist - dist).abs() < 1e-5
                            && same_axis(rh.ends, ends)
                        {
                            out.push((h, g));
                        }
                    }
                }
            }
            out
        })
        .collect();
    for (h, g) in links.into_iter().flatten() {
        let (x, y) = (find(&mut parent, h), find(&mut parent, g));
        if x != y {
            parent[x.max(y)] = x.min(y);
        }
    }

    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for r in 0..reps.len() {
        classes.entry(find(&mut parent, r)).or_default().push(r);
    }
    let loops: Vec<(usize, [f64; 2], f64, f64)> = sp
        .fold_slots()
        .iter()
        .filter_map(|&(v, k)| {
            let m = sp.edge(sp.slot_loop(v, k)).matrix;
            let ends = axis_angles(&m)?;
            Some((v, ends, axis_cosh_distance(ends).acosh(), sp.cuff_length(v, k)))
        })
        .collect();

    classes
        .into_values()
        .map(|members| {
            let word_of = |r: usize| {
                let rep = &reps[r];
                let w = cyclic_reduce(sp, &balls[rep.ball].path(rep.node));
                canonical(sp, &w).0
            };
            let edges = members.iter().map(|&r| word_of(r)).min_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b))).unwrap_or_default();
            let best = *members
                .iter()
                .min_by_key(|&&r| (balls[reps[r].ball].nodes[reps[r].node as usize].depth, r))
                .expect("class has a member");
            let rep = &reps[best];
            let crosses_fold = fold_check && {
                let ball = &balls[rep.ball];
                ball.nodes.iter().any(|node| {
                    let disp = node.iso.displacement();
                    loops.iter().any(|&(v, ends, d, l)| {
                        v == node.vertex as usize
                            && disp <= rep.dist + rep.length / 2.0 + l / 2.0 + d + 0.5
                            && crosses(rep.ends, ends.map(|t| move_angle(&node.iso, t)))
                    })
                })
            };
            Primitive {
                length: rep.length,
                word: sp.word_name(&edges),
                monodromy: word_label(sp, &edges),
                edges,
                crosses_fold,
            }
        })
        .collect()
}

pub(crate) fn primitives(sp: &SpineGraph, balls: &[Ball], fold_check: bool) -> Vec<Primitive> {
    if sp.is_closed() {
        closed_primitives(sp, balls, fold_check)
    } else {
        bordered_primitives(sp, balls)
    }
}

/// Records for primitives and, unless `primitive_only`, their powers up to
/// `cutoff`, sorted by length and then word.
pub(crate) fn finish(
    sp_group: &std::sync::Arc<crate::groups::FiniteGroup>,
    prims: Vec<Primitive>,
    cutoff: f64,
    params: &EnumerationParams,
    complete: bool,
    stats: EnumerationStats,
) -> Enumeration {
    let classes = conjugacy_classes(sp_group);
    let class_name = |g: Elem| sp_group.name(classes.classes()[classes.class_of(g)].representative);
    let mut records: Vec<(usize, GeodesicRecord)> = Vec::new();
    for (i, p) in prims.iter().enumerate() {
        let max_power = if params.primitive_only { 1 } else { (cutoff / p.length).floor().max(1.0) as usize };
        for k in 1..=max_power {
            let length = k as f64 * p.length;
            if length > cutoff {
                break;
            }
            let monodromy = sp_group.pow(p.monodromy, k);
            records.push((
                i,
                GeodesicRecord {
                    length,
                    word: if k == 1 { p.word.clone() } else { format!("({})^{k}", p.word) },
                    edges: p.edges.clone(),
                    primitive: k == 1,
                    power: k,
                    root: None,
                    monodromy,
                    monodromy_class: class_name(monodromy),
                    crosses_fold: p.crosses_fold,
                },
            ));
        }
    }
    records.sort_by(|(_, a), (_, b)| a.length.total_cmp(&b.length).then_with(|| a.word.cmp(&b.word)));
    let mut root_pos = vec![usize::MAX; prims.len()];
    for (pos, (i, r)) in records.iter().enumerate() {
        if r.primitive {
            root_pos[*i] = pos;
        }
    }
    let records: Vec<GeodesicRecord> = records
        .into_iter()
        .map(|(i, mut r)| {
            if !r.primitive {
                r.root = Some(root_pos[i]);
            }
            r
        })
        .collect();
    let spectrum = LengthSpectrum::from_records(cutoff, params.tolerance, complete, &records);
    Enumeration { records, spectrum, stats }
}

/// All closed geodesics of length at most `cutoff`.
///
/// From each vertex a BFS over seam crossings and cuff loops collects the
/// group elements moving the basepoint by at most `cutoff + 2·slack`;
/// closed ones short enough are candidates. `complete` is set when every
/// ball was exhausted, or when the depth cap was reached but the last two
/// layers added no candidate; no node budget ran out; and the slack is at
/// least the spine's cover radius, so every geodesic has a lift moving
/// some basepoint by at most `cutoff + 2·slack`.
pub fn enumerate_geodesics(sp: &SpineGraph, cutoff: f64, params: &EnumerationParams) -> Result<Enumeration> {
    enumerate_inner(sp, cutoff, params, false)
}

pub(crate) fn enumerate_inner(sp: &SpineGraph, cutoff: f64, params: &EnumerationParams, fold_check: bool) -> Result<Enumeration> {
    let balls = balls(sp, cutoff, params)?;
    let stats = stats_of(sp, &balls);
    let complete = stats.saturated && !stats.budget_exhausted && params.slack >= stats.cover_radius;
    let prims = primitives(sp, &balls, fold_check);
    Ok(finish(sp.group(), prims, cutoff, params, complete, stats))
}

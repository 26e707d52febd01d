use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ConfigurationGraph, FingerprintError, Result, MAX_NODES};

/// Labels closer than this are the same label.
const LABEL_TOL: f64 = 1e-12;
const BRANCH_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledIsomorphism {
    /// `mapping[v]` is the image of node `v`.
    pub mapping: Vec<usize>,
    /// Labels, markers and edges were checked on the final bijection.
    pub certified: bool,
}

/// All automorphisms, sorted, identity first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomorphismGroup {
    pub elements: Vec<LabeledIsomorphism>,
}

impl AutomorphismGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn orbit(&self, node: usize) -> Vec<usize> {
        let mut o: Vec<usize> = self.elements.iter().map(|a| a.mapping[node]).collect();
        o.sort_unstable();
        o.dedup();
        o
    }

    pub fn stabilizer(&self, node: usize) -> Vec<LabeledIsomorphism> {
        self.elements.iter().filter(|a| a.mapping[node] == node).cloned().collect()
    }

    /// Contains the identity and is closed under composition and inverse.
    pub fn is_group(&self) -> bool {
        let perms: std::collections::BTreeSet<&[usize]> = self.elements.iter().map(|a| a.mapping.as_slice()).collect();
        let Some(first) = self.elements.first() else { return false };
        let n = first.mapping.len();
        if !perms.contains((0..n).collect::<Vec<_>>().as_slice()) {
            return false;
        }
        self.elements.iter().all(|a| {
            let mut inv = vec![0; n];
            for (v, &w) in a.mapping.iter().enumerate() {
                inv[w] = v;
            }
            perms.contains(inv.as_slice())
                && self.elements.iter().all(|b| {
                    let ab: Vec<usize> = (0..n).map(|v| a.mapping[b.mapping[v]]).collect();
                    perms.contains(ab.as_slice())
                })
        })
    }
}

type Adj = Vec<Vec<(usize, u8, u8)>>;

struct Side<'a> {
    graph: &'a ConfigurationGraph,
    adj: Adj,
}

impl<'a> Side<'a> {
    fn new(graph: &'a ConfigurationGraph) -> Result<Self> {
        if graph.len() > MAX_NODES {
            return Err(FingerprintError::TooLarge { nodes: graph.len(), limit: MAX_NODES });
        }
        let adj = graph
            .adjacency()
            .into_iter()
            .map(|l| l.into_iter().map(|(w, (x, y))| (w, x as u8, y as u8)).collect())
            .collect();
        Ok(Side { graph, adj })
    }
}

/// Initial colors from (length class, marker, boundary flag), numbered
/// consistently across all given graphs.
fn initial_colors(sides: &[&Side]) -> Vec<Vec<u32>> {
    let mut lengths: Vec<f64> = sides.iter().flat_map(|s| s.graph.nodes.iter().map(|n| n.length)).collect();
    lengths.sort_by(f64::total_cmp);
    let mut reps: Vec<f64> = Vec::new();
    for l in lengths {
        if reps.last().map_or(true, |&r| l - r > LABEL_TOL) {
            reps.push(l);
        }
    }
    let class = |l: f64| reps.partition_point(|&r| r < l - LABEL_TOL) as u32;
    let keys: Vec<Vec<_>> = sides
        .iter()
        .map(|s| s.graph.nodes.iter().map(|n| (class(n.length), n.marker, n.boundary_adjacent)).collect())
        .collect();
    let mut table = BTreeMap::new();
    for k in keys.iter().flatten() {
        table.insert(*k, 0u32);
    }
    for (i, v) in table.values_mut().enumerate() {
        *v = i as u32;
    }
    keys.iter().map(|ks| ks.iter().map(|k| table[k]).collect()).collect()
}

/// Joint colour refinement until the number of colours stops growing.
fn refine(sides: &[&Side], colors: &mut [Vec<u32>]) {
    let mut count = distinct(colors);
    loop {
        let sigs: Vec<Vec<(u32, Vec<(u32, u8, u8)>)>> = sides
            .iter()
            .zip(colors.iter())
            .map(|(s, c)| {
                (0..c.len())
                    .map(|v| {
                        let mut n: Vec<(u32, u8, u8)> = s.adj[v].iter().map(|&(w, x, y)| (c[w], x, y)).collect();
                        n.sort_unstable();
                        (c[v], n)
                    })
                    .collect()
            })
            .collect();
        let mut table: BTreeMap<&(u32, Vec<(u32, u8, u8)>), u32> = BTreeMap::new();
        for s in sigs.iter().flatten() {
            table.insert(s, 0);
        }
        for (i, v) in table.values_mut().enumerate() {
            *v = i as u32;
        }
        let next = table.len();
        for (c, sg) in colors.iter_mut().zip(&sigs) {
            for (x, s) in c.iter_mut().zip(sg) {
                *x = table[s];
            }
        }
        if next == count {
            return;
        }
        count = next;
    }
}

fn distinct(colors: &[Vec<u32>]) -> usize {
    let mut all: Vec<u32> = colors.iter().flatten().copied().collect();
    all.sort_unstable();
    all.dedup();
    all.len()
}

fn histogram(c: &[u32]) -> Vec<u32> {
    let mut h = c.to_vec();
    h.sort_unstable();
    h
}

fn verify(g1: &ConfigurationGraph, g2: &ConfigurationGraph, map: &[usize]) -> bool {
    if g1.len() != g2.len() || map.len() != g1.len() {
        return false;
    }
    let mut hit = vec![false; g2.len()];
    for (v, &w) in map.iter().enumerate() {
        if w >= g2.len() || std::mem::replace(&mut hit[w], true) {
            return false;
        }
        let (a, b) = (&g1.nodes[v], &g2.nodes[w]);
        if (a.length - b.length).abs() > LABEL_TOL || a.marker != b.marker || a.boundary_adjacent != b.boundary_adjacent {
            return false;
        }
    }
    g1.normalized_edges(|v| map[v]) == g2.normalized_edges(|v| v)
}

struct Search<'a> {
    a: &'a Side<'a>,
    b: &'a Side<'a>,
    find_all: bool,
    branches: usize,
    found: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn run(&mut self, ca: Vec<u32>, cb: Vec<u32>) -> Result<()> {
        self.branches += 1;
        if self.branches > BRANCH_BUDGET {
            return Err(FingerprintError::Budget(BRANCH_BUDGET));
        }
        if histogram(&ca) != histogram(&cb) {
            return Ok(());
        }
        let mut cells: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (v, &c) in ca.iter().enumerate() {
            cells.entry(c).or_default().push(v);
        }
        // Smallest non-singleton cell; ties go to the lowest colour.
        let target = cells.iter().filter(|(_, m)| m.len() > 1).min_by_key(|(c, m)| (m.len(), **c));
        let Some((&color, members)) = target else {
            let mut at = vec![0; cb.len()];
            for (w, &c) in cb.iter().enumerate() {
                at[c as usize] = w;
            }
            let map: Vec<usize> = ca.iter().map(|&c| at[c as usize]).collect();
            if verify(self.a.graph, self.b.graph, &map) {
                self.found.push(map);
            }
            return Ok(());
        };
        let v = members[0];
        let fresh = ca.len().max(cb.len()) as u32;
        for w in (0..cb.len()).filter(|&w| cb[w] == color) {
            let mut colors = [ca.clone(), cb.clone()];
            colors[0][v] = fresh;
            colors[1][w] = fresh;
            refine(&[self.a, self.b], &mut colors);
            let [na, nb] = colors;
            self.run(na, nb)?;
            if !self.find_all && !self.found.is_empty() {
                break;
            }
        }
        Ok(())
    }
}

fn search(g1: &ConfigurationGraph, g2: &ConfigurationGraph, find_all: bool) -> Result<Vec<Vec<usize>>> {
    let (a, b) = (Side::new(g1)?, Side::new(g2)?);
    if g1.len() != g2.len() || g1.edges.len() != g2.edges.len() {
        return Ok(Vec::new());
    }
    let mut colors = initial_colors(&[&a, &b]);
    refine(&[&a, &b], &mut colors);
    let [ca, cb]: [Vec<u32>; 2] = colors.try_into().expect("two colourings");
    let mut s = Search { a: &a, b: &b, find_all, branches: 0, found: Vec::new() };
    s.run(ca, cb)?;
    Ok(s.found)
}

/// Every label-, marker- and edge-preserving permutation of `g`, found by
/// individualization and colour refinement.
pub fn automorphism_group(g: &ConfigurationGraph) -> Result<AutomorphismGroup> {
    let mut perms = search(g, g, true)?;
    perms.sort_unstable();
    let id: Vec<usize> = (0..g.len()).collect();
    if let Some(p) = perms.iter().position(|m| *m == id) {
        let idp = perms.remove(p);
        perms.insert(0, idp);
    }
    Ok(AutomorphismGroup { elements: perms.into_iter().map(|mapping| LabeledIsomorphism { mapping, certified: true }).collect() })
}

/// A structure-preserving bijection `g1 → g2`, or `None` when the
/// exhaustive search finds none.
pub fn are_isomorphic(g1: &ConfigurationGraph, g2: &ConfigurationGraph) -> Result<Option<LabeledIsomorphism>> {
    if g1.invariants() != g2.invariants() {
        return Ok(None);
    }
    Ok(search(g1, g2, false)?.into_iter().next().map(|mapping| LabeledIsomorphism { mapping, certified: true }))
}

/// Automorphisms of `g` fixing `node`.
pub fn stabilizer(g: &ConfigurationGraph, node: usize) -> Result<Vec<LabeledIsomorphism>> {
    if node >= g.len() {
        return Err(FingerprintError::NoSuchNode(node));
    }
    Ok(automorphism_group(g)?.stabilizer(node))
}

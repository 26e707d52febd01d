use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CuffRole, Result, SurfaceError};

/// Generator indices `(a, b)` of `ι_i(h1)` and `ι_i(h2)` for one factor `i`.
///
/// The template then contains pants `{γ_a, γ̄_a, η_{i,1}}`,
/// `{γ_b, γ̄_b, η_{i,2}}` and `{η_{i,1}, η_{i,2}, η_{i,3}}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkerGroup {
    pub first: usize,
    pub second: usize,
}

/// A planar pants decomposition of the `(2n+1)`-holed sphere with
/// boundary `γ_s, γ̄_s` for each of `n` generators plus the outer `γ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexTemplate {
    pub genset_size: usize,
    pub delta: f64,
    pub epsilon: f64,
    pub seed: u64,
    /// Slot roles of each template pants.
    pub pants: Vec<[CuffRole; 3]>,
    /// λ: internal curves `0..2n-2`, then one value per generator.
    pub lambda: Vec<f64>,
    pub markers: Vec<MarkerGroup>,
}

impl VertexTemplate {
    pub fn internal_curve_count(&self) -> usize {
        self.lambda.len() - self.genset_size
    }

    pub fn generator_length(&self, s: usize) -> f64 {
        self.lambda[self.internal_curve_count() + s]
    }

    pub fn length_of(&self, role: CuffRole) -> f64 {
        match role {
            CuffRole::Internal { curve, .. } => self.lambda[curve],
            CuffRole::Generator { generator, .. } => self.generator_length(generator),
            CuffRole::Outer | CuffRole::Plain => self.epsilon,
        }
    }

    /// Pairs of template slots `((pants, slot), (pants, slot))` sharing an
    /// internal curve, indexed by curve.
    pub fn internal_seams(&self) -> Vec<((usize, usize), (usize, usize))> {
        let mut ends: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.internal_curve_count()];
        for (p, slots) in self.pants.iter().enumerate() {
            for (k, role) in slots.iter().enumerate() {
                if let CuffRole::Internal { curve, .. } = role {
                    ends[*curve].push((p, k));
                }
            }
        }
        ends.into_iter().map(|e| (e[0], e[1])).collect()
    }

    /// Template slot holding `γ_s` (or `γ̄_s`).
    pub fn generator_slot(&self, s: usize, bar: bool) -> (usize, usize) {
        self.find(CuffRole::Generator { generator: s, bar })
    }

    pub fn outer_slot(&self) -> (usize, usize) {
        self.find(CuffRole::Outer)
    }

    fn find(&self, role: CuffRole) -> (usize, usize) {
        for (p, slots) in self.pants.iter().enumerate() {
            if let Some(k) = slots.iter().position(|r| *r == role) {
                return (p, k);
            }
        }
        unreachable!("template is missing {role:?}")
    }
}

/// Builds the vertex template for `n` generators.
///
/// Each generator gets a leaf pants `{γ_s, γ̄_s, c_s}`; marker pairs are
/// joined first, then the remaining open curves are joined pairwise in
/// queue order until only the outer curve is left. λ takes the values
/// `δ(1/2 + k/(4m))`, `k = 1..m`, jittered by at most `δ/(16m)` and assigned
/// to curves by a seeded shuffle.
pub fn build_template(n: usize, delta: f64, epsilon: f64, seed: u64, markers: &[MarkerGroup]) -> Result<VertexTemplate> {
    if n == 0 {
        return Err(SurfaceError::InvalidParameters("generating set is empty".into()));
    }
    if !(delta > 0.0 && delta < epsilon && epsilon.is_finite()) {
        return Err(SurfaceError::InvalidParameters(format!("need 0 < delta < epsilon, got {delta} and {epsilon}")));
    }
    let mut used = vec![false; n];
    for m in markers {
        for s in [m.first, m.second] {
            if s >= n || std::mem::replace(&mut used[s], true) {
                return Err(SurfaceError::InvalidParameters(format!("marker generator {s} is out of range or reused")));
            }
        }
    }

    // Open curve: (pants, slot) waiting for its second side.
    let mut pants: Vec<[CuffRole; 3]> = (0..n)
        .map(|s| {
            [
                CuffRole::Generator { generator: s, bar: false },
                CuffRole::Generator { generator: s, bar: true },
                CuffRole::Plain,
            ]
        })
        .collect();
    let mut open: VecDeque<(usize, usize)> = VecDeque::new();
    let mut next_curve = 0;
    let mut close = |pants: &mut Vec<[CuffRole; 3]>, (p, k): (usize, usize), marker: Option<(usize, usize)>| {
        let role = CuffRole::Internal { curve: next_curve, marker };
        next_curve += 1;
        pants[p][k] = role;
        role
    };
    for (i, m) in markers.iter().enumerate() {
        let a = close(&mut pants, (m.first, 2), Some((i, 1)));
        let b = close(&mut pants, (m.second, 2), Some((i, 2)));
        pants.push([a, b, CuffRole::Plain]);
        open.push_back((pants.len() - 1, 2));
    }
    let pending: Vec<usize> = (0..n).filter(|&s| !used[s]).collect();
    let mut queue: VecDeque<(usize, usize)> = pending.iter().map(|&s| (s, 2)).collect();
    queue.extend(open);
    // η_{i,3} keeps its marker when it is closed later.
    let marker_of = |p: usize| -> Option<(usize, usize)> { (p >= n).then(|| (p - n, 3)).filter(|(i, _)| *i < markers.len()) };
    while queue.len() > 1 {
        let x = queue.pop_front().unwrap();
        let y = queue.pop_front().unwrap();
        let a = close(&mut pants, x, marker_of(x.0).filter(|_| x.1 == 2));
        let b = close(&mut pants, y, marker_of(y.0).filter(|_| y.1 == 2));
        pants.push([a, b, CuffRole::Plain]);
        queue.push_back((pants.len() - 1, 2));
    }
    let (p, k) = queue.pop_front().unwrap();
    pants[p][k] = CuffRole::Outer;
    debug_assert_eq!(pants.len(), 2 * n - 1);

    let m = 3 * n - 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = delta / (16.0 * m as f64);
    let mut lambda: Vec<f64> = (1..=m)
        .map(|k| delta * (0.5 + k as f64 / (4.0 * m as f64)) + rng.gen_range(-jitter..=jitter))
        .collect();
    lambda.shuffle(&mut rng);

    Ok(VertexTemplate { genset_size: n, delta, epsilon, seed, pants, lambda, markers: markers.to_vec() })
}

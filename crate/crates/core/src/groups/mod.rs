//! Exact finite-group arithmetic backed by multiplication tables.
//!
//! A [`FiniteGroup`] is a direct product of one or more table groups. Single
//! table groups store their full Cayley table; direct powers keep the factor
//! tables and multiply componentwise, so `H^n` never materializes an
//! `|H|^n x |H|^n` table. Elements are plain indices `0..order`, encoded in
//! mixed radix with the first factor most significant.

mod classes;
mod cosets;
mod lattice;
mod subgroup;

pub use classes::{conjugacy_classes, ConjugacyClass, ConjugacyClasses};
pub use cosets::{
    coset_space, cycle_type, permutation_characters_agree, transplantation_certificate,
    CosetSpace, TransplantationCertificate,
};
pub use lattice::{
    all_subgroups, double_coset_index_check, gassmann_partition, DoubleCosetCheck, GassmannClass,
};
pub use subgroup::{
    is_almost_conjugate, k_subgroup, named_subgroups, normal_core, product_subgroup,
    GassmannReport, Subgroup,
};

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// Group element, an index into `0..order`.
pub type Elem = usize;

/// Largest order a single table group may have.
pub const TABLE_BUDGET: usize = 2048;
/// Largest order a direct power may have.
pub const POWER_BUDGET: usize = 10_000_000;
/// Largest order accepted by subgroup enumeration.
pub const SUBGROUP_ENUMERATION_BUDGET: usize = 256;

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum GroupError {
    #[error("group table is invalid: {0}")]
    InvalidTable(String),
    #[error("group of order {order} exceeds the budget of {budget}")]
    BudgetExceeded { order: usize, budget: usize },
    #[error("set is not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("subgroups belong to different parent groups")]
    MismatchedParents,
    #[error("unknown element name {0:?}")]
    UnknownElement(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
}

pub type Result<T, E = GroupError> = std::result::Result<T, E>;

/// One factor: a group given by its full Cayley table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Table {
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    identity: usize,
    names: Vec<String>,
}

impl Table {
    fn new(order: usize, mul: Vec<u32>, names: Vec<String>) -> Result<Self> {
        if order == 0 {
            return Err(GroupError::InvalidTable("empty group".into()));
        }
        if order > TABLE_BUDGET {
            return Err(GroupError::BudgetExceeded { order, budget: TABLE_BUDGET });
        }
        if mul.len() != order * order || names.len() != order {
            return Err(GroupError::InvalidTable("table dimensions do not match order".into()));
        }
        if mul.iter().any(|&x| x as usize >= order) {
            return Err(GroupError::InvalidTable("entry out of range".into()));
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| mul[e * order + x] as usize == x && mul[x * order + e] as usize == x))
            .ok_or_else(|| GroupError::InvalidTable("no identity element".into()))?;
        let mut inv = vec![0u32; order];
        for a in 0..order {
            let b = (0..order)
                .find(|&b| mul[a * order + b] as usize == identity)
                .ok_or_else(|| GroupError::InvalidTable(format!("element {a} has no inverse")))?;
            if mul[b * order + a] as usize != identity {
                return Err(GroupError::InvalidTable(format!("element {a} has no two-sided inverse")));
            }
            inv[a] = b as u32;
        }
        let table = Table { order, mul, inv, identity, names };
        table.check_latin()?;
        Ok(table)
    }

    fn check_latin(&self) -> Result<()> {
        let n = self.order;
        let mut seen = vec![usize::MAX; n];
        for a in 0..n {
            for b in 0..n {
                let c = self.mul[a * n + b] as usize;
                if seen[c] == a {
                    return Err(GroupError::InvalidTable(format!("row {a} is not a permutation")));
                }
                seen[c] = a;
            }
        }
        let mut seen = vec![usize::MAX; n];
        for b in 0..n {
            for a in 0..n {
                let c = self.mul[a * n + b] as usize;
                if seen[c] == b {
                    return Err(GroupError::InvalidTable(format!("column {b} is not a permutation")));
                }
                seen[c] = b;
            }
        }
        Ok(())
    }

    #[inline]
    fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }
}

/// A finite group: a direct product of table groups (usually just one).
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    factors: Vec<Arc<Table>>,
    order: usize,
    identity: Elem,
    label: String,
    name_index: Option<HashMap<String, Elem>>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
            && self.factors.len() == other.factors.len()
            && self
                .factors
                .iter()
                .zip(&other.factors)
                .all(|(a, b)| Arc::ptr_eq(a, b) || a == b)
    }
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (order {})", self.label, self.order)
    }
}

impl FiniteGroup {
    /// Builds a group from a full multiplication table `mul[a * n + b] = a * b`.
    pub fn from_table(label: impl Into<String>, mul: Vec<u32>, names: Vec<String>) -> Result<Self> {
        let order = names.len();
        let table = Table::new(order, mul, names)?;
        Ok(Self::from_factors(label.into(), vec![Arc::new(table)]))
    }

    fn from_factors(label: String, factors: Vec<Arc<Table>>) -> Self {
        let order = factors.iter().map(|t| t.order).product();
        let mut group = FiniteGroup { factors, order, identity: 0, label, name_index: None };
        group.identity = group.encode(&group.factors.iter().map(|t| t.identity).collect::<Vec<_>>());
        if order <= 1 << 16 {
            let index = (0..order).map(|g| (group.name(g), g)).collect();
            group.name_index = Some(index);
        }
        group
    }

    /// `(Z/8Z)^* ⋉ Z/8Z` with `(a,b)·(a',b') = (aa', ab' + b)`, order 32.
    pub fn holomorph_z8() -> Self {
        const UNITS: [u32; 4] = [1, 3, 5, 7];
        let elems: Vec<(u32, u32)> =
            UNITS.iter().flat_map(|&a| (0..8).map(move |b| (a, b))).collect();
        let index = |(a, b): (u32, u32)| {
            let ai = UNITS.iter().position(|&u| u == a).unwrap();
            ai * 8 + b as usize
        };
        let n = elems.len();
        let mut mul = vec![0u32; n * n];
        for (i, &(a, b)) in elems.iter().enumerate() {
            for (j, &(a2, b2)) in elems.iter().enumerate() {
                mul[i * n + j] = index(((a * a2) % 8, (a * b2 + b) % 8)) as u32;
            }
        }
        let names = elems.iter().map(|(a, b)| format!("({a},{b})")).collect();
        Self::from_table("holomorph_z8", mul, names).expect("holomorph table is a group")
    }

    /// Cyclic group `Z/nZ`; element `k` is named `"k"`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(GroupError::InvalidArgument("cyclic group needs n >= 1".into()));
        }
        if n > TABLE_BUDGET {
            return Err(GroupError::BudgetExceeded { order: n, budget: TABLE_BUDGET });
        }
        let mul = (0..n * n).map(|k| ((k / n + k % n) % n) as u32).collect();
        let names = (0..n).map(|k| k.to_string()).collect();
        Self::from_table(format!("cyclic({n})"), mul, names)
    }

    /// Symmetric group on `n` letters. Permutations are listed in
    /// lexicographic order of their one-line notation, so index 0 is the
    /// identity; composition is `(p·q)(x) = q(p(x))` (apply `p` first).
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(GroupError::InvalidArgument("symmetric group needs n >= 1".into()));
        }
        let order: usize = (1..=n).product();
        if order > TABLE_BUDGET {
            return Err(GroupError::BudgetExceeded { order, budget: TABLE_BUDGET });
        }
        let mut perms = Vec::with_capacity(order);
        let mut current: Vec<usize> = (0..n).collect();
        loop {
            perms.push(current.clone());
            if !next_permutation(&mut current) {
                break;
            }
        }
        let index: HashMap<Vec<usize>, usize> =
            perms.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let mut mul = vec![0u32; order * order];
        for (i, p) in perms.iter().enumerate() {
            for (j, q) in perms.iter().enumerate() {
                let r: Vec<usize> = (0..n).map(|x| q[p[x]]).collect();
                mul[i * order + j] = index[&r] as u32;
            }
        }
        let names = perms
            .iter()
            .map(|p| format!("[{}]", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")))
            .collect();
        Self::from_table(format!("symmetric({n})"), mul, names)
    }

    /// Componentwise product `G^n`. Powers of powers flatten.
    pub fn direct_power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(GroupError::InvalidArgument("direct power needs n >= 1".into()));
        }
        let order = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(self.order));
        match order {
            Some(o) if o <= POWER_BUDGET => {}
            _ => {
                return Err(GroupError::BudgetExceeded {
                    order: order.unwrap_or(usize::MAX),
                    budget: POWER_BUDGET,
                })
            }
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let factors = (0..n).flat_map(|_| self.factors.iter().cloned()).collect();
        Ok(Self::from_factors(format!("{}^{}", self.label, n), factors))
    }

    /// Quotient by a normal subgroup, as a table group on the cosets.
    pub fn quotient(&self, normal: &Subgroup) -> Result<Self> {
        if !normal.is_normal() {
            return Err(GroupError::InvalidArgument("quotient needs a normal subgroup".into()));
        }
        let cs = coset_space(normal);
        let n = cs.len();
        let mut mul = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                mul[a * n + b] = cs.coset_of(self.mul(cs.representative(a), cs.representative(b))) as u32;
            }
        }
        let names = (0..n).map(|c| format!("K{}", self.name(cs.representative(c)))).collect();
        Self::from_table(format!("{}/K", self.label), mul, names)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> Elem {
        self.identity
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of table factors (1 unless this is a direct power).
    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.order
    }

    fn digits(&self, mut g: Elem) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (slot, t) in out.iter_mut().zip(&self.factors).rev() {
            *slot = g % t.order;
            g /= t.order;
        }
        out
    }

    fn encode(&self, digits: &[usize]) -> Elem {
        digits.iter().zip(&self.factors).fold(0, |acc, (&d, t)| acc * t.order + d)
    }

    /// Component `i` of `g` as an element of the `i`-th factor.
    pub fn component(&self, g: Elem, i: usize) -> Elem {
        self.digits(g)[i]
    }

    /// Builds an element of a direct power from its components.
    pub fn from_components(&self, components: &[Elem]) -> Result<Elem> {
        if components.len() != self.factors.len()
            || components.iter().zip(&self.factors).any(|(&c, t)| c >= t.order)
        {
            return Err(GroupError::InvalidArgument("component list does not fit the group".into()));
        }
        Ok(self.encode(components))
    }

    /// The inclusion of the `i`-th factor (0-based): `h ↦ (e,…,h,…,e)`.
    pub fn embed(&self, i: usize, h: Elem) -> Result<Elem> {
        let mut digits: Vec<usize> = self.factors.iter().map(|t| t.identity).collect();
        if i >= digits.len() || h >= self.factors[i].order {
            return Err(GroupError::InvalidArgument(format!("cannot embed {h} in factor {i}")));
        }
        digits[i] = h;
        Ok(self.encode(&digits))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if let [t] = self.factors.as_slice() {
            return t.mul(a, b);
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let prod: Vec<usize> =
            da.iter().zip(&db).zip(&self.factors).map(|((&x, &y), t)| t.mul(x, y)).collect();
        self.encode(&prod)
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        if let [t] = self.factors.as_slice() {
            return t.inv[a] as usize;
        }
        let d: Vec<usize> =
            self.digits(a).iter().zip(&self.factors).map(|(&x, t)| t.inv[x] as usize).collect();
        self.encode(&d)
    }

    /// `g h g^{-1}`.
    pub fn conjugate(&self, h: Elem, g: Elem) -> Elem {
        self.mul(self.mul(g, h), self.inv(g))
    }

    pub fn pow(&self, g: Elem, k: usize) -> Elem {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, g))
    }

    pub fn element_order(&self, g: Elem) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn name(&self, g: Elem) -> String {
        if let [t] = self.factors.as_slice() {
            return t.names[g].clone();
        }
        let parts: Vec<&str> = self
            .digits(g)
            .iter()
            .zip(&self.factors)
            .map(|(&d, t)| t.names[d].as_str())
            .collect();
        format!("({})", parts.join(","))
    }

    /// Looks up an element by its display name (whitespace-insensitive).
    pub fn element_by_name(&self, name: &str) -> Result<Elem> {
        let key: String = name.chars().filter(|c| !c.is_whitespace()).collect();
        let normalize = |s: &str| s.chars().filter(|c| !c.is_whitespace()).collect::<String>();
        if let Some(index) = &self.name_index {
            if let Some(&g) = index.get(name) {
                return Ok(g);
            }
            return index
                .iter()
                .filter(|(n, _)| normalize(n) == key)
                .map(|(_, &g)| g)
                .min()
                .ok_or_else(|| GroupError::UnknownElement(name.to_string()));
        }
        self.elements()
            .find(|&g| normalize(&self.name(g)) == key)
            .ok_or_else(|| GroupError::UnknownElement(name.to_string()))
    }

    /// Checks identity, inverse and associativity laws. Exhaustive for order
    /// ≤ 64, sampled (deterministically) above.
    pub fn check_axioms(&self) -> Result<()> {
        let e = self.identity;
        for g in self.elements() {
            if self.mul(e, g) != g || self.mul(g, e) != g {
                return Err(GroupError::InvariantViolated(format!("identity law fails at {g}")));
            }
            if self.mul(g, self.inv(g)) != e || self.mul(self.inv(g), g) != e {
                return Err(GroupError::InvariantViolated(format!("inverse law fails at {g}")));
            }
        }
        let triple_ok = |a, b, c| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c));
        if self.order <= 64 {
            for a in self.elements() {
                for b in self.elements() {
                    for c in self.elements() {
                        if !triple_ok(a, b, c) {
                            return Err(GroupError::InvariantViolated(format!(
                                "associativity fails at ({a},{b},{c})"
                            )));
                        }
                    }
                }
            }
        } else {
            // LCG sampling keeps this dependency-free and reproducible.
            let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
            let mut next = || {
                state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
                (state >> 33) as usize % self.order
            };
            for _ in 0..20_000 {
                let (a, b, c) = (next(), next(), next());
                if !triple_ok(a, b, c) {
                    return Err(GroupError::InvariantViolated(format!(
                        "associativity fails at ({a},{b},{c})"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_inverse(g: &FiniteGroup, a: Elem) -> Elem {
        g.elements().find(|&b| g.mul(a, b) == g.identity()).unwrap()
    }

    #[test]
    fn holomorph_basics() {
        let h = FiniteGroup::holomorph_z8();
        assert_eq!(h.order(), 32);
        assert_eq!(h.name(h.identity()), "(1,0)");
        let a = h.element_by_name("(3,0)").unwrap();
        let b = h.element_by_name("(5,4)").unwrap();
        assert_eq!(h.name(h.mul(a, b)), "(7,4)");
        let x = h.element_by_name("(3,4)").unwrap();
        assert_eq!(brute_inverse(&h, x), x);
        assert_eq!(h.inv(x), x);
        h.check_axioms().unwrap();
    }

    #[test]
    fn powers_are_componentwise() {
        let h = FiniteGroup::holomorph_z8();
        let h2 = h.direct_power(2).unwrap();
        assert_eq!(h2.order(), 1024);
        assert_eq!(h2.name(h2.identity()), "((1,0),(1,0))");
        let h1 = h.direct_power(1).unwrap();
        assert_eq!(h1, h);
        for a in h.elements() {
            for b in h.elements() {
                assert_eq!(h1.mul(a, b), h.mul(a, b));
            }
        }
        let x = h2.element_by_name("((3,4),(5,1))").unwrap();
        let y = h2.element_by_name("((5,0),(3,2))").unwrap();
        let (x0, x1) = (h2.component(x, 0), h2.component(x, 1));
        let (y0, y1) = (h2.component(y, 0), h2.component(y, 1));
        let xy = h2.mul(x, y);
        assert_eq!(h2.component(xy, 0), h.mul(x0, y0));
        assert_eq!(h2.component(xy, 1), h.mul(x1, y1));
        h2.check_axioms().unwrap();
    }

    #[test]
    fn power_budget_is_enforced() {
        let h = FiniteGroup::holomorph_z8();
        assert!(matches!(h.direct_power(5), Err(GroupError::BudgetExceeded { .. })));
        assert!(h.direct_power(4).is_ok());
    }

    #[test]
    fn symmetric_and_cyclic() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        assert_eq!(s3.order(), 6);
        assert_eq!(s3.identity(), 0);
        s3.check_axioms().unwrap();
        let c8 = FiniteGroup::cyclic(8).unwrap();
        assert_eq!(c8.element_order(c8.element_by_name("2").unwrap()), 4);
        assert!(FiniteGroup::symmetric(8).is_err());
    }

    #[test]
    fn broken_tables_are_rejected() {
        let mul = vec![0, 1, 1, 1];
        let names = vec!["a".to_string(), "b".to_string()];
        assert!(FiniteGroup::from_table("bad", mul, names).is_err());
    }
}

use std::sync::Arc;

use super::{conjugacy_classes, Elem, FiniteGroup, GroupError, Result};

/// A subgroup, stored as the sorted list of its members.
#[derive(Debug, Clone)]
pub struct Subgroup {
    group: Arc<FiniteGroup>,
    members: Vec<Elem>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members && same_group(&self.group, &other.group)
    }
}

impl Eq for Subgroup {}

pub(crate) fn same_group(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Subgroup {
    /// Validates that `members` is a subgroup of `group`.
    pub fn from_members(group: &Arc<FiniteGroup>, members: impl IntoIterator<Item = Elem>) -> Result<Self> {
        let mut members: Vec<Elem> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if members.iter().any(|&m| m >= group.order()) {
            return Err(GroupError::NotASubgroup("element out of range".into()));
        }
        let sub = Subgroup { group: group.clone(), members };
        sub.check()?;
        Ok(sub)
    }

    /// Subgroup generated by `gens`.
    pub fn generated_by(group: &Arc<FiniteGroup>, gens: &[Elem]) -> Self {
        let mut inside = vec![false; group.order()];
        let mut members = vec![group.identity()];
        inside[group.identity()] = true;
        let mut i = 0;
        while i < members.len() {
            let x = members[i];
            for &s in gens {
                let y = group.mul(x, s);
                if !inside[y] {
                    inside[y] = true;
                    members.push(y);
                }
            }
            i += 1;
        }
        members.sort_unstable();
        Subgroup { group: group.clone(), members }
    }

    pub fn whole(group: &Arc<FiniteGroup>) -> Self {
        Subgroup { group: group.clone(), members: group.elements().collect() }
    }

    pub fn trivial(group: &Arc<FiniteGroup>) -> Self {
        Subgroup { group: group.clone(), members: vec![group.identity()] }
    }

    /// Builds a subgroup from display names of its elements.
    pub fn from_names(group: &Arc<FiniteGroup>, names: &[impl AsRef<str>]) -> Result<Self> {
        let members = names
            .iter()
            .map(|n| group.element_by_name(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_members(group, members)
    }

    fn check(&self) -> Result<()> {
        let g = &self.group;
        if !self.contains(g.identity()) {
            return Err(GroupError::NotASubgroup("identity missing".into()));
        }
        for &a in &self.members {
            if !self.contains(g.inv(a)) {
                return Err(GroupError::NotASubgroup(format!("not closed under inverse at {}", g.name(a))));
            }
            for &b in &self.members {
                if !self.contains(g.mul(a, b)) {
                    return Err(GroupError::NotASubgroup(format!(
                        "{}·{} = {} is missing",
                        g.name(a),
                        g.name(b),
                        g.name(g.mul(a, b))
                    )));
                }
            }
        }
        if g.order() % self.order() != 0 {
            return Err(GroupError::NotASubgroup("order does not divide group order".into()));
        }
        Ok(())
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn members(&self) -> &[Elem] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn index(&self) -> usize {
        self.group.order() / self.members.len()
    }

    pub fn contains(&self, g: Elem) -> bool {
        self.members.binary_search(&g).is_ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&m| other.contains(m))
    }

    pub fn names(&self) -> Vec<String> {
        self.members.iter().map(|&m| self.group.name(m)).collect()
    }

    /// Sorted members of `g K g^{-1}`.
    pub fn conjugate_by(&self, g: Elem) -> Vec<Elem> {
        let mut out: Vec<Elem> = self.members.iter().map(|&k| self.group.conjugate(k, g)).collect();
        out.sort_unstable();
        out
    }

    pub fn is_normal(&self) -> bool {
        self.group.elements().all(|g| self.members.iter().all(|&k| self.contains(self.group.conjugate(k, g))))
    }

    pub fn intersection(&self, other: &Subgroup) -> Result<Subgroup> {
        if !same_group(&self.group, &other.group) {
            return Err(GroupError::MismatchedParents);
        }
        let members = self.members.iter().copied().filter(|&m| other.contains(m)).collect();
        Ok(Subgroup { group: self.group.clone(), members })
    }

    /// Finds `g` with `g A g^{-1} = B` by brute force over all conjugators.
    pub fn conjugator_to(&self, other: &Subgroup) -> Result<Option<Elem>> {
        if !same_group(&self.group, &other.group) {
            return Err(GroupError::MismatchedParents);
        }
        if self.order() != other.order() {
            return Ok(None);
        }
        Ok(self.group.elements().find(|&g| self.members.iter().all(|&k| other.contains(self.group.conjugate(k, g)))))
    }
}

/// The order-4 subgroups `H1 = {(1,0),(3,0),(5,0),(7,0)}` and
/// `H2 = {(1,0),(3,4),(5,4),(7,0)}` of the order-32 holomorph of `Z/8Z`.
pub fn named_subgroups(h: &Arc<FiniteGroup>) -> Result<(Subgroup, Subgroup)> {
    let h1 = Subgroup::from_names(h, &["(1,0)", "(3,0)", "(5,0)", "(7,0)"])?;
    let h2 = Subgroup::from_names(h, &["(1,0)", "(3,4)", "(5,4)", "(7,0)"])?;
    Ok((h1, h2))
}

/// `F_1 × … × F_n` inside `power`, where factor `i` lives in the `i`-th
/// block of table factors.
pub fn product_subgroup(power: &Arc<FiniteGroup>, factors: &[Subgroup]) -> Result<Subgroup> {
    let mut offset = 0;
    for f in factors {
        let k = f.group.factors.len();
        let block = power.factors.get(offset..offset + k).ok_or(GroupError::MismatchedParents)?;
        if !block.iter().zip(&f.group.factors).all(|(a, b)| Arc::ptr_eq(a, b) || a == b) {
            return Err(GroupError::MismatchedParents);
        }
        offset += k;
    }
    if offset != power.factors.len() {
        return Err(GroupError::MismatchedParents);
    }
    let mut members = vec![Vec::<usize>::new()];
    for f in factors {
        let mut next = Vec::with_capacity(members.len() * f.order());
        for prefix in &members {
            for &m in &f.members {
                let mut d = prefix.clone();
                d.extend(f.group.digits(m));
                next.push(d);
            }
        }
        members = next;
    }
    let mut members: Vec<Elem> = members.iter().map(|d| power.encode(d)).collect();
    members.sort_unstable();
    Ok(Subgroup { group: power.clone(), members })
}

/// `K_i = A × … × A × B × A × … × A` with `B` in slot `i` (1-based).
pub fn k_subgroup(power: &Arc<FiniteGroup>, a: &Subgroup, b: &Subgroup, i: usize) -> Result<Subgroup> {
    let n = power.factors.len() / a.group.factors.len().max(1);
    if i == 0 || i > n {
        return Err(GroupError::InvalidArgument(format!("slot {i} outside 1..={n}")));
    }
    let factors: Vec<Subgroup> = (1..=n).map(|j| if j == i { b.clone() } else { a.clone() }).collect();
    product_subgroup(power, &factors)
}

/// Largest normal subgroup of the parent group contained in `k`: the
/// intersection of all conjugates of `k`.
pub fn normal_core(k: &Subgroup) -> Subgroup {
    let g = &k.group;
    let mut inside: Vec<bool> = (0..g.order()).map(|x| k.contains(x)).collect();
    for c in g.elements() {
        for m in k.members.iter() {
            if inside[*m] && !k.contains(g.conjugate(*m, g.inv(c))) {
                inside[*m] = false;
            }
        }
    }
    let members = k.members.iter().copied().filter(|&m| inside[m]).collect();
    Subgroup { group: g.clone(), members }
}

#[derive(Debug, Clone)]
pub struct GassmannReport {
    pub pair: (Subgroup, Subgroup),
    pub almost_conjugate: bool,
    pub conjugate: bool,
    /// `(class representative, |C ∩ A|, |C ∩ B|)` for every class.
    pub per_class_counts: Vec<(Elem, usize, usize)>,
    pub shared_core: Option<Subgroup>,
}

/// Compares class-intersection counts of two subgroups and tests
/// conjugacy by brute force.
pub fn is_almost_conjugate(a: &Subgroup, b: &Subgroup) -> Result<GassmannReport> {
    if !same_group(&a.group, &b.group) {
        return Err(GroupError::MismatchedParents);
    }
    let classes = conjugacy_classes(&a.group);
    let ca = classes.count_vector(a);
    let cb = classes.count_vector(b);
    let per_class_counts: Vec<(Elem, usize, usize)> = classes
        .classes()
        .iter()
        .zip(ca.iter().zip(&cb))
        .map(|(c, (&x, &y))| (c.representative, x, y))
        .collect();
    let almost_conjugate = ca == cb;
    let conjugate = almost_conjugate && a.conjugator_to(b)?.is_some();
    let (core_a, core_b) = (normal_core(a), normal_core(b));
    let shared_core = (core_a == core_b).then_some(core_a);
    Ok(GassmannReport { pair: (a.clone(), b.clone()), almost_conjugate, conjugate, per_class_counts, shared_core })
}

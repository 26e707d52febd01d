use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use super::subgroup::same_group;
use super::{
    conjugacy_classes, normal_core, Elem, FiniteGroup, GroupError, Result, Subgroup,
    SUBGROUP_ENUMERATION_BUDGET,
};

/// Every subgroup of `g`, sorted by (order, members).
///
/// Starts from the cyclic subgroups and closes the list under joins with
/// cyclic subgroups; every subgroup is reached because it is the join of
/// the cyclic subgroups of its elements.
pub fn all_subgroups(g: &Arc<FiniteGroup>) -> Result<Vec<Subgroup>> {
    if g.order() > SUBGROUP_ENUMERATION_BUDGET {
        return Err(GroupError::BudgetExceeded { order: g.order(), budget: SUBGROUP_ENUMERATION_BUDGET });
    }
    let mut cyclic: Vec<(Elem, Subgroup)> = Vec::new();
    let mut seen: HashSet<Vec<Elem>> = HashSet::new();
    for x in g.elements() {
        let s = Subgroup::generated_by(g, &[x]);
        if seen.insert(s.members().to_vec()) {
            cyclic.push((x, s));
        }
    }
    let mut found: Vec<(Vec<Elem>, Subgroup)> =
        cyclic.iter().map(|(x, s)| (vec![*x], s.clone())).collect();
    let mut i = 0;
    while i < found.len() {
        let (gens, s) = found[i].clone();
        for (x, c) in &cyclic {
            if c.is_subset_of(&s) {
                continue;
            }
            let mut next = gens.clone();
            next.push(*x);
            let joined = Subgroup::generated_by(g, &next);
            if seen.insert(joined.members().to_vec()) {
                found.push((next, joined));
            }
        }
        i += 1;
    }
    let mut out: Vec<Subgroup> = found.into_iter().map(|(_, s)| s).collect();
    out.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.members().cmp(b.members())));
    Ok(out)
}

/// One almost-conjugacy class of subgroups with its shared data.
#[derive(Debug, Clone)]
pub struct GassmannClass {
    pub members: Vec<Subgroup>,
    pub order: usize,
    pub index: usize,
    pub core: Subgroup,
}

/// Partitions all subgroups into almost-conjugacy classes and checks that
/// each class shares order, index and normal core.
pub fn gassmann_partition(g: &Arc<FiniteGroup>) -> Result<Vec<GassmannClass>> {
    let subgroups = all_subgroups(g)?;
    let classes = conjugacy_classes(g);
    let mut buckets: BTreeMap<Vec<usize>, Vec<Subgroup>> = BTreeMap::new();
    for s in subgroups {
        buckets.entry(classes.count_vector(&s)).or_default().push(s);
    }
    let mut out: Vec<GassmannClass> = buckets
        .into_values()
        .map(|members| {
            let first = &members[0];
            for m in &members[1..] {
                if m.order() != first.order() || m.index() != first.index() {
                    return Err(GroupError::InvariantViolated("almost-conjugate subgroups differ in order".into()));
                }
            }
            let core = normal_core(first);
            if members[1..].iter().any(|m| normal_core(m) != core) {
                return Err(GroupError::InvariantViolated("almost-conjugate subgroups differ in core".into()));
            }
            Ok(GassmannClass { order: first.order(), index: first.index(), core, members })
        })
        .collect::<Result<_>>()?;
    out.sort_by(|a, b| a.order.cmp(&b.order).then_with(|| a.members[0].members().cmp(b.members[0].members())));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleCosetCheck {
    /// `[G:H]`.
    pub index: usize,
    /// `[S : S ∩ gHg^{-1}]` for each double coset `SgH`.
    pub terms: Vec<usize>,
}

impl DoubleCosetCheck {
    pub fn holds(&self) -> bool {
        self.terms.iter().sum::<usize>() == self.index
    }
}

/// Evaluates both sides of `[G:H] = Σ_{SgH} [S : S ∩ gHg^{-1}]`.
pub fn double_coset_index_check(h: &Subgroup, s: &Subgroup) -> Result<DoubleCosetCheck> {
    if !same_group(h.group(), s.group()) {
        return Err(GroupError::MismatchedParents);
    }
    let g = h.group();
    let mut covered = vec![false; g.order()];
    let mut terms = Vec::new();
    for x in g.elements() {
        if covered[x] {
            continue;
        }
        for &a in s.members() {
            let ax = g.mul(a, x);
            for &b in h.members() {
                covered[g.mul(ax, b)] = true;
            }
        }
        let conj = h.conjugate_by(x);
        let inter = s.members().iter().filter(|m| conj.binary_search(m).is_ok()).count();
        terms.push(s.order() / inter);
    }
    Ok(DoubleCosetCheck { index: h.index(), terms })
}

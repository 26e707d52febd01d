use super::subgroup::same_group;
use super::{Elem, GroupError, Result, Subgroup};

/// Right cosets `K\G` with the right action `Kx ↦ Kxg`.
#[derive(Debug, Clone)]
pub struct CosetSpace {
    subgroup: Subgroup,
    coset_of: Vec<u32>,
    representatives: Vec<Elem>,
}

impl CosetSpace {
    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    /// Minimal element of coset `c`.
    pub fn representative(&self, c: usize) -> Elem {
        self.representatives[c]
    }

    pub fn coset_of(&self, x: Elem) -> usize {
        self.coset_of[x] as usize
    }

    /// Index of the coset `K` itself.
    pub fn base_coset(&self) -> usize {
        self.coset_of(self.subgroup.group().identity())
    }

    /// Members of coset `c`, sorted.
    pub fn coset(&self, c: usize) -> Vec<Elem> {
        let g = self.subgroup.group();
        let x = self.representatives[c];
        let mut out: Vec<Elem> = self.subgroup.members().iter().map(|&k| g.mul(k, x)).collect();
        out.sort_unstable();
        out
    }

    /// `Kx · g = Kxg`.
    pub fn act(&self, c: usize, g: Elem) -> usize {
        let group = self.subgroup.group();
        self.coset_of(group.mul(self.representatives[c], g))
    }

    /// The permutation of cosets induced by `g`.
    pub fn permutation(&self, g: Elem) -> Vec<usize> {
        (0..self.len()).map(|c| self.act(c, g)).collect()
    }
}

pub fn coset_space(k: &Subgroup) -> CosetSpace {
    let g = k.group();
    let mut coset_of = vec![u32::MAX; g.order()];
    let mut representatives = Vec::with_capacity(k.index());
    for x in g.elements() {
        if coset_of[x] != u32::MAX {
            continue;
        }
        let id = representatives.len() as u32;
        representatives.push(x);
        for &m in k.members() {
            coset_of[g.mul(m, x)] = id;
        }
    }
    CosetSpace { subgroup: k.clone(), coset_of, representatives }
}

/// Sorted cycle lengths of the permutation `g` induces on the cosets.
pub fn cycle_type(g: Elem, cs: &CosetSpace) -> Vec<usize> {
    let perm = cs.permutation(g);
    let mut seen = vec![false; perm.len()];
    let mut lengths = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut c = start;
        while !seen[c] {
            seen[c] = true;
            c = perm[c];
            len += 1;
        }
        lengths.push(len);
    }
    lengths.sort_unstable();
    lengths
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransplantationCertificate {
    pub holds: bool,
    /// First element whose cycle types differ, with both cycle types.
    pub witness: Option<(Elem, Vec<usize>, Vec<usize>)>,
}

/// True iff every element has the same cycle type on `K1\G` and `K2\G`.
pub fn transplantation_certificate(k1: &Subgroup, k2: &Subgroup) -> Result<TransplantationCertificate> {
    if !same_group(k1.group(), k2.group()) {
        return Err(GroupError::MismatchedParents);
    }
    let (c1, c2) = (coset_space(k1), coset_space(k2));
    for g in k1.group().elements() {
        let (t1, t2) = (cycle_type(g, &c1), cycle_type(g, &c2));
        if t1 != t2 {
            return Ok(TransplantationCertificate { holds: false, witness: Some((g, t1, t2)) });
        }
    }
    Ok(TransplantationCertificate { holds: true, witness: None })
}

/// Compares permutation characters `g ↦ #{x : x g x^{-1} ∈ K} / |K|`
/// without building coset spaces.
pub fn permutation_characters_agree(k1: &Subgroup, k2: &Subgroup) -> Result<bool> {
    if !same_group(k1.group(), k2.group()) {
        return Err(GroupError::MismatchedParents);
    }
    let g = k1.group();
    let fixed = |k: &Subgroup, h: Elem| {
        g.elements().filter(|&x| k.contains(g.conjugate(h, x))).count() / k.order()
    };
    Ok(g.elements().all(|h| fixed(k1, h) == fixed(k2, h)))
}

#[cfg(test)]
mod tests {
    use super::super::{named_subgroups, FiniteGroup};
    use super::*;
    use std::sync::Arc;

    #[test]
    fn right_action_and_partition() {
        let h = Arc::new(FiniteGroup::holomorph_z8());
        let (h1, _) = named_subgroups(&h).unwrap();
        let cs = coset_space(&h1);
        assert_eq!(cs.len(), 8);
        let mut all: Vec<Elem> = (0..cs.len()).flat_map(|c| cs.coset(c)).collect();
        all.sort_unstable();
        assert_eq!(all, h.elements().collect::<Vec<_>>());
        for c in 0..cs.len() {
            for a in h.elements() {
                for b in h.elements().step_by(5) {
                    assert_eq!(cs.act(cs.act(c, a), b), cs.act(c, h.mul(a, b)));
                }
            }
        }
        let whole = coset_space(&Subgroup::whole(&h));
        assert_eq!(whole.len(), 1);
        assert!(h.elements().all(|g| whole.act(0, g) == 0));
    }

    #[test]
    fn cycle_types_on_the_gassmann_pair() {
        let h = Arc::new(FiniteGroup::holomorph_z8());
        let (h1, h2) = named_subgroups(&h).unwrap();
        let (c1, c2) = (coset_space(&h1), coset_space(&h2));
        assert_eq!(cycle_type(h.element_by_name("(7,0)").unwrap(), &c1), vec![1, 1, 2, 2, 2]);
        assert_eq!(cycle_type(h.identity(), &c1), vec![1; 8]);
        // Fixed points of (3,0): brute-force count of x with x(3,0)x^{-1} in the subgroup.
        let g = h.element_by_name("(3,0)").unwrap();
        let brute = |k: &Subgroup| h.elements().filter(|&x| k.contains(h.conjugate(g, x))).count() / k.order();
        assert_eq!(brute(&h1), 2);
        assert_eq!(brute(&h2), 2);
        assert_eq!(cycle_type(g, &c1).iter().filter(|&&l| l == 1).count(), 2);
        assert_eq!(cycle_type(g, &c2).iter().filter(|&&l| l == 1).count(), 2);
    }

    #[test]
    fn certificate() {
        let h = Arc::new(FiniteGroup::holomorph_z8());
        let (h1, h2) = named_subgroups(&h).unwrap();
        assert!(transplantation_certificate(&h1, &h2).unwrap().holds);
        assert!(transplantation_certificate(&h1, &h1).unwrap().holds);
        let t = Subgroup::from_names(&h, &["(1,0)", "(1,2)", "(1,4)", "(1,6)"]).unwrap();
        let cert = transplantation_certificate(&h1, &t).unwrap();
        assert!(!cert.holds);
        let (w, a, b) = cert.witness.unwrap();
        assert_ne!(a, b);
        assert_eq!(cycle_type(w, &coset_space(&h1)), a);
        assert!(permutation_characters_agree(&h1, &h2).unwrap());
        assert!(!permutation_characters_agree(&h1, &t).unwrap());
    }
}

use super::{Elem, FiniteGroup, Subgroup, Table};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyClass {
    /// Minimal element index in the class.
    pub representative: Elem,
    pub members: Vec<Elem>,
}

/// Partition of a group into conjugacy classes, sorted by representative.
#[derive(Debug, Clone)]
pub struct ConjugacyClasses {
    classes: Vec<ConjugacyClass>,
    class_of: Vec<usize>,
}

impl ConjugacyClasses {
    pub fn classes(&self) -> &[ConjugacyClass] {
        &self.classes
    }

    pub fn class_of(&self, g: Elem) -> usize {
        self.class_of[g]
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// `|C ∩ K|` for each class `C`, in class order.
    pub fn count_vector(&self, k: &Subgroup) -> Vec<usize> {
        let mut counts = vec![0; self.classes.len()];
        for &m in k.members() {
            counts[self.class_of[m]] += 1;
        }
        counts
    }
}

fn table_classes(t: &Table) -> (usize, Vec<usize>) {
    let n = t.order;
    let mut class_of = vec![usize::MAX; n];
    let mut count = 0;
    for g in 0..n {
        if class_of[g] != usize::MAX {
            continue;
        }
        for x in 0..n {
            let c = t.mul(t.mul(x, g), t.inv[x] as usize);
            class_of[c] = count;
        }
        count += 1;
    }
    (count, class_of)
}

/// Conjugacy classes; for direct powers these are products of factor classes.
pub fn conjugacy_classes(g: &FiniteGroup) -> ConjugacyClasses {
    let per_factor: Vec<(usize, Vec<usize>)> = g.factors.iter().map(|t| table_classes(t)).collect();
    let mut raw = vec![0usize; g.order()];
    for (x, slot) in raw.iter_mut().enumerate() {
        *slot = g
            .digits(x)
            .iter()
            .zip(&per_factor)
            .fold(0, |acc, (&d, (count, map))| acc * count + map[d]);
    }
    // Renumber by first appearance, which is the minimal member.
    let mut renumber = std::collections::HashMap::new();
    let mut classes: Vec<ConjugacyClass> = Vec::new();
    let mut class_of = vec![0; g.order()];
    for x in g.elements() {
        let id = *renumber.entry(raw[x]).or_insert_with(|| {
            classes.push(ConjugacyClass { representative: x, members: Vec::new() });
            classes.len() - 1
        });
        classes[id].members.push(x);
        class_of[x] = id;
    }
    ConjugacyClasses { classes, class_of }
}

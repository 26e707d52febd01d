use std::sync::Arc;

use crate::groups::{coset_space, Elem, FiniteGroup, Subgroup};

use super::{
    Cuff, DoubleInfo, GluingGraphSurface, Pants, Result, Seam, SlotRef, SurfaceError, TemplateMeta,
    VertexTemplate,
};

/// Surface over the Cayley graph of `g`: one template copy per element.
pub fn cayley_surface(g: &Arc<FiniteGroup>, genset: &[Elem], template: &VertexTemplate) -> Result<GluingGraphSurface> {
    schreier_surface(&Subgroup::trivial(g), genset, template)
}

/// Surface over the Schreier graph of `K\G`: one template copy per right
/// coset, with `γ_s` of copy `Kx` glued to `γ̄_s` of copy `Kxs`. Seams
/// between copies carry the generator as monodromy label; seams inside a
/// copy are unlabeled. All twists are zero.
pub fn schreier_surface(k: &Subgroup, genset: &[Elem], template: &VertexTemplate) -> Result<GluingGraphSurface> {
    let g = k.group();
    if genset.len() != template.genset_size {
        return Err(SurfaceError::LabelMismatch(format!(
            "{} generators for a template built for {}",
            genset.len(),
            template.genset_size
        )));
    }
    if let Some(&bad) = genset.iter().find(|&&s| s >= g.order()) {
        return Err(SurfaceError::LabelMismatch(format!("generator index {bad} is not in the group")));
    }
    let cosets = coset_space(k);
    let copies = cosets.len();
    let per_copy = template.pants.len();
    let slot = |copy: usize, (p, s): (usize, usize)| SlotRef::new(copy * per_copy + p, s);

    let mut pants = Vec::with_capacity(copies * per_copy);
    let mut cuffs = Vec::with_capacity(3 * copies * per_copy);
    for copy in 0..copies {
        for (t, roles) in template.pants.iter().enumerate() {
            let id = pants.len();
            for (s, &role) in roles.iter().enumerate() {
                cuffs.push(Cuff { id: 3 * id + s, length: template.length_of(role), role });
            }
            pants.push(Pants { id, cuffs: [3 * id, 3 * id + 1, 3 * id + 2], copy, template_pants: Some(t) });
        }
    }

    let internal = template.internal_seams();
    let mut seams = Vec::with_capacity(copies * (internal.len() + genset.len()));
    for copy in 0..copies {
        for &(a, b) in &internal {
            seams.push(Seam { a: slot(copy, a), b: slot(copy, b), twist: 0.0, label: None, label_name: None });
        }
    }
    for copy in 0..copies {
        for (s, &h) in genset.iter().enumerate() {
            let target = cosets.act(copy, h);
            seams.push(Seam {
                a: slot(copy, template.generator_slot(s, false)),
                b: slot(target, template.generator_slot(s, true)),
                twist: 0.0,
                label: Some(h),
                label_name: Some(g.name(h)),
            });
        }
    }
    let outer = template.outer_slot();
    let boundary = (0..copies).map(|c| slot(c, outer)).collect();

    Ok(GluingGraphSurface {
        pants,
        cuffs,
        seams,
        boundary,
        copies,
        template: Some(TemplateMeta {
            delta: template.delta,
            epsilon: template.epsilon,
            lambda: template.lambda.clone(),
            genset: genset.iter().map(|&h| g.name(h)).collect(),
        }),
        double: None,
    })
}

/// Mirror slot order used for the second copy of a double.
const MIRROR: [usize; 3] = [0, 2, 1];

/// Glues `s` to its mirror image along every boundary cuff.
///
/// The mirror copy lists each pants' slots in reversed cyclic order. The
/// canonical zero-twist foot of a cuff is the foot of the perpendicular to
/// the cyclically next cuff, and reversing the slot order moves it to the
/// opposite point of the cuff. So fold seams get twist `ℓ/2` (the
/// reflection gluing), and a mirrored internal seam gets `−t − ℓ`: the
/// negated twist, corrected by the half-turn moves on both sides.
pub fn double(s: &GluingGraphSurface) -> Result<GluingGraphSurface> {
    if s.boundary.is_empty() {
        return Err(SurfaceError::Closed);
    }
    let np = s.pants.len();
    let nc = s.cuffs.len();
    let mirror = |r: SlotRef| SlotRef::new(r.pants + np, MIRROR[r.slot]);

    let mut pants = s.pants.clone();
    let mut cuffs = s.cuffs.clone();
    for p in &s.pants {
        let c = p.cuffs;
        pants.push(Pants {
            id: p.id + np,
            cuffs: [c[MIRROR[0]] + nc, c[MIRROR[1]] + nc, c[MIRROR[2]] + nc],
            copy: p.copy + s.copies.max(1),
            template_pants: p.template_pants,
        });
    }
    for c in &s.cuffs {
        cuffs.push(Cuff { id: c.id + nc, ..c.clone() });
    }
    let mut seams = s.seams.clone();
    for seam in &s.seams {
        seams.push(Seam { a: mirror(seam.a), b: mirror(seam.b), twist: -seam.twist - s.length(seam.a), ..seam.clone() });
    }
    let mut fold_seams = Vec::with_capacity(s.boundary.len());
    for &b in &s.boundary {
        fold_seams.push(seams.len());
        seams.push(Seam { a: b, b: mirror(b), twist: s.length(b) / 2.0, label: None, label_name: None });
    }
    let involution = (0..2 * np).map(|i| if i < np { i + np } else { i - np }).collect();
    Ok(GluingGraphSurface {
        pants,
        cuffs,
        seams,
        boundary: Vec::new(),
        copies: 2 * s.copies.max(1),
        template: s.template.clone(),
        double: Some(DoubleInfo { involution, fold_seams }),
    })
}

#[cfg(test)]
mod tests {
    use super::super::{build_template, validate_surface};
    use super::*;
    use crate::groups::named_subgroups;

    fn z3() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(3).unwrap())
    }

    #[test]
    fn cayley_of_z3() {
        let g = z3();
        let t = build_template(3, 0.5, 0.8, 11, &[]).unwrap();
        let s = cayley_surface(&g, &[0, 1, 2], &t).unwrap();
        assert_eq!(s.pants.len(), 15);
        assert_eq!(s.seams.iter().filter(|x| x.label.is_some()).count(), 9);
        assert_eq!(s.boundary.len(), 3);
        assert_eq!(s.genus(), Some(7));
        let r = validate_surface(&s);
        assert!(r.is_valid(), "{:?}", r.violations);
        assert!(s.boundary.iter().all(|&b| s.length(b) == 0.8));
    }

    #[test]
    fn trivial_group_self_seams() {
        let g = Arc::new(FiniteGroup::cyclic(1).unwrap());
        let t = build_template(2, 0.5, 0.8, 0, &[]).unwrap();
        let s = cayley_surface(&g, &[0, 0], &t).unwrap();
        assert_eq!(s.copies, 1);
        let labeled: Vec<_> = s.seams.iter().filter(|x| x.label.is_some()).collect();
        assert_eq!(labeled.len(), 2);
        assert!(labeled.iter().all(|x| x.a.pants / 3 == x.b.pants / 3));
        assert!(validate_surface(&s).is_valid());
    }

    #[test]
    fn schreier_quotients() {
        let h = Arc::new(FiniteGroup::holomorph_z8());
        let (h1, _) = named_subgroups(&h).unwrap();
        let gens = [h.element_by_name("(3,0)").unwrap(), h.element_by_name("(1,1)").unwrap()];
        let t = build_template(2, 0.5, 0.8, 5, &[]).unwrap();
        let s = schreier_surface(&h1, &gens, &t).unwrap();
        assert_eq!(s.copies, 8);
        assert_eq!(s.boundary.len(), 8);
        assert!(validate_surface(&s).is_valid());
        let base = schreier_surface(&Subgroup::whole(&h), &gens, &t).unwrap();
        assert_eq!(base.copies, 1);
        assert_eq!(
            cayley_surface(&h, &gens, &t).unwrap(),
            schreier_surface(&Subgroup::trivial(&h), &gens, &t).unwrap()
        );
    }

    #[test]
    fn label_mismatch() {
        let g = z3();
        let t = build_template(3, 0.5, 0.8, 0, &[]).unwrap();
        assert!(matches!(cayley_surface(&g, &[0, 1], &t), Err(SurfaceError::LabelMismatch(_))));
        assert!(matches!(cayley_surface(&g, &[0, 1, 7], &t), Err(SurfaceError::LabelMismatch(_))));
    }

    #[test]
    fn non_injective_lambda_is_reported() {
        let g = z3();
        let mut t = build_template(3, 0.5, 0.8, 0, &[]).unwrap();
        t.lambda[1] = t.lambda[0];
        let s = cayley_surface(&g, &[0, 1, 2], &t).unwrap();
        let r = validate_surface(&s);
        assert!(r.violations.iter().any(|v| v.contains("injective")));
    }

    #[test]
    fn doubling() {
        let p = GluingGraphSurface::pants([1.0, 1.2, 1.4]);
        let d = double(&p).unwrap();
        assert_eq!(d.genus(), Some(2));
        assert!(d.boundary.is_empty());
        assert!(validate_surface(&d).is_valid());
        let info = d.double.as_ref().unwrap();
        assert_eq!(info.involution, vec![1, 0]);
        assert_eq!(info.fold_seams.len(), 3);
        assert!(matches!(double(&d), Err(SurfaceError::Closed)));

        let g = z3();
        let t = build_template(3, 0.5, 0.8, 2, &[]).unwrap();
        let s = cayley_surface(&g, &[0, 1, 2], &t).unwrap();
        let d = double(&s).unwrap();
        assert_eq!(d.euler_characteristic(), 2 * s.euler_characteristic());
        assert!(validate_surface(&d).is_valid());
        for (i, &j) in d.double.as_ref().unwrap().involution.iter().enumerate() {
            let mut a: Vec<f64> = d.pants[i].cuffs.iter().map(|&c| d.cuffs[c].length).collect();
            let mut b: Vec<f64> = d.pants[j].cuffs.iter().map(|&c| d.cuffs[c].length).collect();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn json_round_trip() {
        let g = z3();
        let t = build_template(3, 0.5, 0.8, 2, &[]).unwrap();
        let s = cayley_surface(&g, &[0, 1, 2], &t).unwrap();
        let back = GluingGraphSurface::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back, s);
    }
}

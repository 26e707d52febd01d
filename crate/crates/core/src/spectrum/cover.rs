use crate::groups::{coset_space, cycle_type, Subgroup};
use crate::holonomy::SpineGraph;

use super::enumerate::{enumerate_inner, finish, Primitive};
use super::{Enumeration, EnumerationParams, EnumerationStats, LengthSpectrum, Result, SpectrumError};

/// Cover spectrum by transplantation: a primitive base geodesic of length
/// `ℓ` with monodromy `g` lifts to one primitive geodesic of length `kℓ`
/// for every `k`-cycle of `g` on `K\G`.
pub fn transplant_cover_spectrum(base: &Enumeration, k: &Subgroup, cutoff: f64) -> Result<Enumeration> {
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(SpectrumError::InvalidCutoff(cutoff));
    }
    if !base.spectrum.complete {
        return Err(SpectrumError::Incomplete);
    }
    if base.spectrum.cutoff < cutoff {
        return Err(SpectrumError::ShortCutoff { cutoff: base.spectrum.cutoff, needed: cutoff });
    }
    let g = k.group();
    let cosets = coset_space(k);
    let mut prims = Vec::new();
    for r in base.records.iter().filter(|r| r.primitive) {
        for c in cycle_type(r.monodromy, &cosets) {
            let length = c as f64 * r.length;
            if length > cutoff {
                continue;
            }
            prims.push(Primitive {
                length,
                edges: r.edges.repeat(c),
                word: if c == 1 { r.word.clone() } else { format!("({})^{c}", r.word) },
                monodromy: g.pow(r.monodromy, c),
                crosses_fold: r.crosses_fold,
            });
        }
    }
    let params = EnumerationParams { tolerance: base.spectrum.tolerance, ..EnumerationParams::default() };
    Ok(finish(g, prims, cutoff, &params, true, EnumerationStats { saturated: true, ..base.stats.clone() }))
}

/// Cover spectrum by enumerating on the fiber product of the spine with
/// the coset graph of `K`.
pub fn direct_cover_spectrum(sp: &SpineGraph, k: &Subgroup, cutoff: f64, params: &EnumerationParams) -> Result<Enumeration> {
    let cover = sp.cover(&coset_space(k))?;
    enumerate_inner(&cover, cutoff, params, false)
}

/// Geodesics of a double that cross a fold seam transversally. Lengths
/// are those on the double; no orthogeodesic bookkeeping is applied.
pub fn seam_crossing_spectrum(sp: &SpineGraph, cutoff: f64, params: &EnumerationParams) -> Result<Enumeration> {
    if sp.fold_slots().is_empty() {
        return Err(SpectrumError::NotDoubled);
    }
    let all = enumerate_inner(sp, cutoff, params, true)?;
    let mut new_index = vec![None; all.records.len()];
    let mut records = Vec::new();
    for (i, r) in all.records.iter().enumerate() {
        if r.crosses_fold {
            new_index[i] = Some(records.len());
            records.push(r.clone());
        }
    }
    for r in &mut records {
        r.root = r.root.and_then(|i| new_index[i]);
    }
    let spectrum = LengthSpectrum::from_records(cutoff, all.spectrum.tolerance, all.spectrum.complete, &records);
    Ok(Enumeration { records, spectrum, stats: all.stats })
}

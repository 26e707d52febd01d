use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{compare_spectra, LengthSpectrum, Result, SpectrumError};

/// Least gap between consecutive distinct values `≤ 2L`; infinite with at
/// most one such value. Every interval of this length inside `[0, 2L]`
/// then holds at most one spectrum value.
///
/// The spectrum must be complete up to `2L` unless `allow_incomplete`.
pub fn separation(s: &LengthSpectrum, l: f64, allow_incomplete: bool) -> Result<f64> {
    if !allow_incomplete {
        if !s.complete {
            return Err(SpectrumError::Incomplete);
        }
        if s.cutoff < 2.0 * l {
            return Err(SpectrumError::ShortCutoff { cutoff: s.cutoff, needed: 2.0 * l });
        }
    }
    let values: Vec<f64> = s.entries.iter().map(|e| e.length).filter(|&v| v <= 2.0 * l).collect();
    Ok(values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min))
}

/// The spectrum value strictly within `eps/2` of `measured`, if any.
pub fn snap(measured: f64, s: &LengthSpectrum, eps: f64) -> Option<f64> {
    let mut hits = s.entries.iter().map(|e| e.length).filter(|v| (measured - v).abs() < eps / 2.0);
    let v = hits.next()?;
    hits.next().is_none().then_some(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub consistent: bool,
    /// Separation used for snapping.
    pub epsilon: f64,
    /// Every spectrum of the sequence agrees with the reference.
    pub spectra_agree: bool,
    /// Per measured sequence: snapped limit and the first index from which
    /// the snapped value is constant.
    pub limits: Vec<Option<(f64, usize)>>,
    /// Number of measured curves converging to each value, with the
    /// reference multiplicity.
    pub counts: Vec<(f64, usize, usize)>,
    /// Every value's count equals its reference multiplicity.
    pub multiplicities_match: bool,
}

/// Checks the limit argument for an isospectral sequence `Y_k → Y`.
///
/// Each entry of `curve_lengths` is the sequence `ℓ_{Y_k}(γ)` of one
/// curve; its last term stands for `ℓ_Y(γ)`. A sequence passes when its
/// snapped values are eventually constant at `v` and its last term lies
/// within the reference tolerance of `v`. The check fails if any spectrum
/// differs from the reference or more curves converge to a value than its
/// multiplicity allows.
pub fn limit_consistency_check(
    spectra: &[LengthSpectrum],
    reference: &LengthSpectrum,
    curve_lengths: &[Vec<f64>],
) -> LimitReport {
    let spectra_agree = spectra
        .iter()
        .all(|s| compare_spectra(s, reference, reference.tolerance).map(|d| d.is_empty()).unwrap_or(false));
    let epsilon = separation(reference, reference.cutoff / 2.0, true).unwrap_or(0.0);
    let limits: Vec<Option<(f64, usize)>> = curve_lengths
        .iter()
        .map(|seq| {
            let last = *seq.last()?;
            let v = snap(last, reference, epsilon)?;
            if (last - v).abs() > reference.tolerance {
                return None;
            }
            let mut k0 = seq.len() - 1;
            while k0 > 0 && snap(seq[k0 - 1], reference, epsilon) == Some(v) {
                k0 -= 1;
            }
            Some((v, k0))
        })
        .collect();
    let mut tally: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for &(v, _) in limits.iter().flatten() {
        tally.entry(v.to_bits()).or_insert((v, 0)).1 += 1;
    }
    let mut counts: Vec<(f64, usize, usize)> =
        tally.into_values().map(|(v, n)| (v, n, reference.multiplicity_of(v))).collect();
    counts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let within = counts.iter().all(|&(_, n, m)| n <= m);
    let multiplicities_match = counts.iter().all(|&(_, n, m)| n == m);
    LimitReport {
        consistent: spectra_agree && limits.iter().all(Option::is_some) && within,
        epsilon,
        spectra_agree,
        limits,
        counts,
        multiplicities_match,
    }
}

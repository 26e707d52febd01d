/// Raised for non-positive or non-finite curve lengths.
#[derive(thiserror::Error, Debug, Clone, Copy, PartialEq)]
#[error("collar width needs a positive finite length, got {0}")]
pub struct CollarError(pub f64);

/// Half-width `arcsinh(1 / sinh(ℓ/2))` of the embedded collar around a
/// simple closed geodesic of length `ℓ`.
pub fn collar_width(length: f64) -> Result<f64, CollarError> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(CollarError(length));
    }
    Ok((1.0 / (length / 2.0).sinh()).asinh())
}

/// Simple closed geodesics of length at most `arcsinh(1)` are pairwise
/// disjoint.
pub fn short_disjointness_bound() -> f64 {
    1f64.asinh()
}

/// True when two curves of these lengths are forced to be disjoint.
pub fn forced_disjoint(a: f64, b: f64) -> bool {
    let bound = short_disjointness_bound();
    a <= bound && b <= bound
}

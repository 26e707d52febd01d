use super::{HolonomyError, Isometry, Result};

/// Cuff elements `(A, B, C)` of a pair of pants with `A·B·C = I`.
///
/// `A = diag(e^{ℓ1/2}, e^{-ℓ1/2})`; `B` is solved from `tr B = 2cosh(ℓ2/2)`
/// and `tr AB = −2cosh(ℓ3/2)`. In the frame where any one of the three
/// translates from `0` to `∞`, the other two axes lie in `Re z > 0`, so
/// every cuff has the pants on its right.
pub fn pants_holonomy(l1: f64, l2: f64, l3: f64) -> Result<(Isometry, Isometry, Isometry)> {
    for l in [l1, l2, l3] {
        if !(l > 0.0 && l.is_finite()) {
            return Err(HolonomyError::NonPositiveLength(l));
        }
    }
    let (a2, a3) = ((l2 / 2.0).cosh(), (l3 / 2.0).cosh());
    let u = (l1 / 2.0).exp();
    let a = Isometry::diagonal(u);
    let p = -(a3 + a2 / u) / (l1 / 2.0).sinh();
    let s = 2.0 * a2 - p;
    let b = Isometry::new(p, 1.0, p * s - 1.0, s);
    let c = a.mul(&b).inverse();
    Ok((a, b, c))
}

/// Right-angled hexagon relation: `cosh` of the distance between the
/// axes of cuffs 1 and 2 when cuff 3 is the third side.
pub fn cuff_distance_cosh(l1: f64, l2: f64, l3: f64) -> f64 {
    ((l3 / 2.0).cosh() + (l1 / 2.0).cosh() * (l2 / 2.0).cosh()) / ((l1 / 2.0).sinh() * (l2 / 2.0).sinh())
}

/// Local geometry of one pair of pants: cuff elements, normalizing frames
/// and a basepoint.
#[derive(Debug, Clone)]
pub struct PantsFrame {
    pub lengths: [f64; 3],
    pub cuffs: [Isometry; 3],
    /// `N_k` with `N_k^{-1} C_k N_k = ±diag(μ, 1/μ)`, `μ > 1`, and `N_k(i)`
    /// the foot on cuff `k` of the perpendicular to cuff `k+1`.
    pub normal: [Isometry; 3],
    /// Maps `i` to the midpoint of the perpendicular between cuffs 0 and 1.
    pub basepoint: Isometry,
}

impl PantsFrame {
    pub fn new(lengths: [f64; 3]) -> Result<Self> {
        let (a, b, c) = pants_holonomy(lengths[0], lengths[1], lengths[2])?;
        let cuffs = [a, b, c];
        let mut normal = [Isometry::IDENTITY; 3];
        for k in 0..3 {
            normal[k] = normal_frame(&cuffs[k], &cuffs[(k + 1) % 3])?;
        }
        let d01 = cuff_distance_cosh(lengths[0], lengths[1], lengths[2]).acosh();
        let s = d01 / 2.0;
        let basepoint = normal[0].mul(&Isometry::moving_i_to(s.tanh(), 1.0 / s.cosh()));
        Ok(PantsFrame { lengths, cuffs, normal, basepoint })
    }

    /// Largest distance from the basepoint to a vertex of the right-angled
    /// hexagon cut out by the three cuff axes. Every point of the pants
    /// has a lift within this distance of the basepoint.
    pub fn cover_radius(&self) -> f64 {
        let o = self.basepoint.apply((0.0, 1.0));
        let dist = |(x, y): (f64, f64)| (1.0 + ((x - o.0).powi(2) + (y - o.1).powi(2)) / (2.0 * y * o.1)).acosh();
        let mut worst = 0.0f64;
        for k in 0..3 {
            let n = self.normal[k];
            let prev = n.inverse().mul(&self.cuffs[(k + 2) % 3]).mul(&n);
            let height = match prev.fixed_points() {
                Some((Some(p), Some(q))) => (p * q).abs().sqrt(),
                _ => 1.0,
            };
            worst = worst.max(dist(n.apply((0.0, 1.0)))).max(dist(n.apply((0.0, height))));
        }
        worst
    }
}

/// Frame sending `0 → ∞` to the axis of `x` in its translation direction,
/// scaled so `i` lands on the foot of the perpendicular towards `next`.
fn normal_frame(x: &Isometry, next: &Isometry) -> Result<Isometry> {
    let (p1, p2) = x.fixed_vectors().ok_or(HolonomyError::NotHyperbolic)?;
    let mut n = Isometry::new(p1.0, p2.0, p1.1, p2.1);
    if n.det() < 0.0 {
        n = Isometry::new(p1.0, -p2.0, p1.1, -p2.1);
    }
    let n = n.normalized().ok_or(HolonomyError::NotHyperbolic)?;
    let local = n.inverse().mul(next).mul(&n);
    let (e1, e2) = local.fixed_points().ok_or(HolonomyError::NotHyperbolic)?;
    let (e1, e2) = (e1.ok_or(HolonomyError::Degenerate)?, e2.ok_or(HolonomyError::Degenerate)?);
    if !(e1 > 0.0 && e2 > 0.0) {
        return Err(HolonomyError::Degenerate);
    }
    Ok(n.mul(&Isometry::diagonal((e1 * e2).powf(0.25))))
}

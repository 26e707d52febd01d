use serde::{Deserialize, Serialize};

/// Default trace tolerance for classification.
pub const TRACE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsometryKind {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// A 2×2 real matrix acting on the upper half-plane by Möbius maps.
/// Row-major `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Isometry { a, b, c, d }
    }

    pub fn diagonal(x: f64) -> Self {
        Isometry::new(x, 0.0, 0.0, 1.0 / x)
    }

    /// Translation by `t` along the imaginary axis, `z ↦ e^t z`.
    pub fn translation(t: f64) -> Self {
        Isometry::diagonal((t / 2.0).exp())
    }

    /// Some isometry taking `i` to `x + iy`.
    pub fn moving_i_to(x: f64, y: f64) -> Self {
        let r = y.sqrt();
        Isometry::new(r, x / r, 0.0, 1.0 / r)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn mul(&self, o: &Isometry) -> Isometry {
        Isometry::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    /// Inverse assuming determinant one.
    pub fn inverse(&self) -> Isometry {
        Isometry::new(self.d, -self.b, -self.c, self.a)
    }

    /// Rescales to determinant one; `None` for non-positive determinant.
    pub fn normalized(&self) -> Option<Isometry> {
        let det = self.det();
        if !(det > 0.0) {
            return None;
        }
        let s = 1.0 / det.sqrt();
        Some(Isometry::new(self.a * s, self.b * s, self.c * s, self.d * s))
    }

    pub fn neg(&self) -> Isometry {
        Isometry::new(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn classify(&self, tol: f64) -> IsometryKind {
        let t = self.trace().abs();
        if t > 2.0 + tol {
            IsometryKind::Hyperbolic
        } else if t < 2.0 - tol {
            IsometryKind::Elliptic
        } else if self.max_distance_to_pm_identity() <= tol.sqrt() {
            IsometryKind::Identity
        } else {
            IsometryKind::Parabolic
        }
    }

    fn max_distance_to_pm_identity(&self) -> f64 {
        let s = if self.trace() >= 0.0 { 1.0 } else { -1.0 };
        [(self.a - s).abs(), self.b.abs(), self.c.abs(), (self.d - s).abs()].into_iter().fold(0.0, f64::max)
    }

    /// Entry-wise distance to `±other`.
    pub fn distance_pm(&self, o: &Isometry) -> f64 {
        let plus = [(self.a - o.a).abs(), (self.b - o.b).abs(), (self.c - o.c).abs(), (self.d - o.d).abs()];
        let minus = [(self.a + o.a).abs(), (self.b + o.b).abs(), (self.c + o.c).abs(), (self.d + o.d).abs()];
        let m = |v: [f64; 4]| v.into_iter().fold(0.0, f64::max);
        m(plus).min(m(minus))
    }

    /// `cosh d(i, M·i)`.
    pub fn cosh_displacement(&self) -> f64 {
        (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d) / 2.0
    }

    pub fn displacement(&self) -> f64 {
        self.cosh_displacement().max(1.0).acosh()
    }

    /// Image of `x + iy`.
    pub fn apply(&self, (x, y): (f64, f64)) -> (f64, f64) {
        // (az + b)/(cz + d) with z = x + iy.
        let (nr, ni) = (self.a * x + self.b, self.a * y);
        let (dr, di) = (self.c * x + self.d, self.c * y);
        let den = dr * dr + di * di;
        ((nr * dr + ni * di) / den, (ni * dr - nr * di) / den)
    }

    /// Image of a boundary point; `None` stands for `∞`.
    pub fn apply_boundary(&self, x: Option<f64>) -> Option<f64> {
        match x {
            None => (self.c != 0.0).then(|| self.a / self.c),
            Some(x) => {
                let den = self.c * x + self.d;
                (den != 0.0).then(|| (self.a * x + self.b) / den)
            }
        }
    }

    /// Eigenvectors `(attracting, repelling)` of a hyperbolic element as
    /// homogeneous coordinates `(x, y)` of boundary points `x/y`.
    pub fn fixed_vectors(&self) -> Option<((f64, f64), (f64, f64))> {
        let (a, b, c, d) = if self.trace() >= 0.0 {
            (self.a, self.b, self.c, self.d)
        } else {
            (-self.a, -self.b, -self.c, -self.d)
        };
        let t = a + d;
        if t <= 2.0 {
            return None;
        }
        let disc = ((t - 2.0) * (t + 2.0)).sqrt();
        let big = (t + disc) / 2.0;
        let small = 1.0 / big;
        // Eigenvector for eigenvalue μ: (b, μ - a) or (μ - d, c); the
        // longer one is the better conditioned.
        let vector = |mu: f64| {
            let (x1, y1) = (b, mu - a);
            let (x2, y2) = (mu - d, c);
            if x1.hypot(y1) >= x2.hypot(y2) {
                (x1, y1)
            } else {
                (x2, y2)
            }
        };
        Some((vector(big), vector(small)))
    }

    /// Fixed points `(attracting, repelling)` of a hyperbolic element, with
    /// `None` for `∞`.
    pub fn fixed_points(&self) -> Option<(Option<f64>, Option<f64>)> {
        let (v, w) = self.fixed_vectors()?;
        let point = |(x, y): (f64, f64)| (y != 0.0).then(|| x / y);
        Some((point(v), point(w)))
    }
}

/// `2·arccosh(|tr|/2)` for hyperbolic `m`, else `None`.
pub fn translation_length(m: &Isometry) -> Option<f64> {
    length_from_trace(m.trace(), TRACE_TOL)
}

/// Stable `2·arccosh(|t|/2)` for `|t| > 2 + tol`.
pub fn length_from_trace(t: f64, tol: f64) -> Option<f64> {
    let t = t.abs();
    (t > 2.0 + tol).then(|| 2.0 * (((t - 2.0) * (t + 2.0)).sqrt() / 2.0).asinh())
}

/// Double-double number `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

/// Matrix product kernel shared by the double and double-double paths.
pub trait HolonomyMatrix: Copy + Send + Sync {
    fn from_isometry(m: &Isometry) -> Self;
    fn to_isometry(&self) -> Isometry;
    fn mul(&self, o: &Self) -> Self;
    /// `|tr| − 2`, computed in the matrix's own precision.
    fn trace_excess(&self) -> f64;
    fn cosh_displacement(&self) -> f64;
}

impl HolonomyMatrix for Isometry {
    fn from_isometry(m: &Isometry) -> Self {
        *m
    }
    fn to_isometry(&self) -> Isometry {
        *self
    }
    fn mul(&self, o: &Self) -> Self {
        Isometry::mul(self, o)
    }
    fn trace_excess(&self) -> f64 {
        self.trace().abs() - 2.0
    }
    fn cosh_displacement(&self) -> f64 {
        Isometry::cosh_displacement(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DdMatrix(pub [Dd; 4]);

impl HolonomyMatrix for DdMatrix {
    fn from_isometry(m: &Isometry) -> Self {
        DdMatrix([Dd::from_f64(m.a), Dd::from_f64(m.b), Dd::from_f64(m.c), Dd::from_f64(m.d)])
    }
    fn to_isometry(&self) -> Isometry {
        let [a, b, c, d] = self.0;
        Isometry::new(a.to_f64(), b.to_f64(), c.to_f64(), d.to_f64())
    }
    fn mul(&self, o: &Self) -> Self {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        DdMatrix([a.mul(e).add(b.mul(g)), a.mul(f).add(b.mul(h)), c.mul(e).add(d.mul(g)), c.mul(f).add(d.mul(h))])
    }
    fn trace_excess(&self) -> f64 {
        let t = self.0[0].add(self.0[3]);
        let t = if t.hi < 0.0 { t.neg() } else { t };
        t.add(Dd::from_f64(-2.0)).to_f64()
    }
    fn cosh_displacement(&self) -> f64 {
        self.to_isometry().cosh_displacement()
    }
}

/// Translation length from `|tr| − 2`.
pub fn length_from_excess(excess: f64, tol: f64) -> Option<f64> {
    (excess > tol).then(|| 2.0 * ((excess * (excess + 4.0)).sqrt() / 2.0).asinh())
}

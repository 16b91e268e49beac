//! Hyperboloid model of the hyperbolic plane inside ℝ^{2,1}.
//!
//! The ambient space carries the bilinear form
//! `⟨x,y⟩ = -x0*y0 + x1*y1 + x2*y2` and the plane is realized as the set of
//! unit timelike future-pointing vectors. Geodesics are encoded by unit
//! spacelike normals, ideal points by null rays, and isometries by matrices
//! of `SO0(2,1)` kept in lockstep with their `SL(2,R)` half-plane
//! counterparts.
//!
//! Orientation conventions, fixed once and used everywhere:
//! * the volume form satisfies `dV(e0,e1,e2) = +1`;
//! * an oriented geodesic with ordered ideal endpoints `(a, b)` has unit
//!   normal `n = (a ⊠ b)/‖a ⊠ b‖`, which points to the *right* of the
//!   direction of travel `a → b`;
//! * the signed distance of a point to an oriented geodesic is
//!   `sinh d = ⟨p, n⟩`, positive on the right side;
//! * the counterclockwise angle `α` from a tangent `u` to a tangent `w` at a
//!   point `p` obeys `cos α = ⟨u,w⟩`, `sin α = -dV(p,u,w)`, matching the
//!   standard orientation of the upper half-plane under [`HPoint::to_half_plane`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for algebraic identities (a handful of flops).
pub const TOL_ALGEBRAIC: f64 = 1e-12;
/// Tolerance for derived geometric quantities (longer formula chains).
pub const TOL_GEOMETRIC: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum MinkowskiError {
    #[error("ideal endpoints are proportional, no geodesic through them")]
    ProportionalEndpoints,
    #[error("vector is not null within tolerance (inner = {0})")]
    NotNull(f64),
    #[error("vector is not a unit spacelike normal (inner = {0})")]
    NotUnitSpacelike(f64),
    #[error("vector is not a point of the hyperboloid (inner = {inner}, x0 = {x0})")]
    NotHyperboloidPoint { inner: f64, x0: f64 },
    #[error("point must lie in the open upper half-plane (im = {0})")]
    NotInterior(f64),
}

/// A vector of ℝ^{2,1} with signature (−,+,+).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiVector {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
}

impl MinkowskiVector {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);
    pub const E0: Self = Self::new(1.0, 0.0, 0.0);
    pub const E1: Self = Self::new(0.0, 1.0, 0.0);
    pub const E2: Self = Self::new(0.0, 0.0, 1.0);

    pub const fn new(x0: f64, x1: f64, x2: f64) -> Self {
        Self { x0, x1, x2 }
    }

    pub fn scale(self, c: f64) -> Self {
        Self::new(c * self.x0, c * self.x1, c * self.x2)
    }

    pub fn add(self, o: Self) -> Self {
        Self::new(self.x0 + o.x0, self.x1 + o.x1, self.x2 + o.x2)
    }

    pub fn sub(self, o: Self) -> Self {
        Self::new(self.x0 - o.x0, self.x1 - o.x1, self.x2 - o.x2)
    }

    /// Euclidean sup-norm, used only for tolerances and error reporting.
    pub fn sup_norm(self) -> f64 {
        self.x0.abs().max(self.x1.abs()).max(self.x2.abs())
    }

    /// Causal character within [`TOL_ALGEBRAIC`] relative to the vector size.
    pub fn causal_character(self) -> CausalCharacter {
        let q = inner(self, self);
        let scale = 1.0 + self.sup_norm().powi(2);
        if q < -TOL_ALGEBRAIC * scale {
            CausalCharacter::Timelike
        } else if q > TOL_ALGEBRAIC * scale {
            CausalCharacter::Spacelike
        } else {
            CausalCharacter::Null
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalCharacter {
    Timelike,
    Spacelike,
    Null,
}

/// The bilinear form `⟨x,y⟩ = -x0*y0 + x1*y1 + x2*y2`.
pub fn inner(x: MinkowskiVector, y: MinkowskiVector) -> f64 {
    -x.x0 * y.x0 + x.x1 * y.x1 + x.x2 * y.x2
}

/// Minkowski cross product, defined by `⟨x ⊠ y, z⟩ = dV(x,y,z)` with
/// `dV(e0,e1,e2) = +1`. Satisfies
/// `(x⊠y)⊠z = ⟨y,z⟩x − ⟨x,z⟩y` and
/// `⟨x⊠y, x⊠y⟩ = ⟨x,y⟩² − ⟨x,x⟩⟨y,y⟩`.
pub fn cross(x: MinkowskiVector, y: MinkowskiVector) -> MinkowskiVector {
    MinkowskiVector::new(
        -(x.x1 * y.x2 - x.x2 * y.x1),
        x.x2 * y.x0 - x.x0 * y.x2,
        x.x0 * y.x1 - x.x1 * y.x0,
    )
}

/// Volume form `dV(x,y,z) = ⟨x ⊠ y, z⟩`.
pub fn volume_form(x: MinkowskiVector, y: MinkowskiVector, z: MinkowskiVector) -> f64 {
    inner(cross(x, y), z)
}

/// A point of the hyperboloid: `⟨p,p⟩ = −1`, `p0 > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint(MinkowskiVector);

impl HPoint {
    /// Base point, the image of `i` in the half-plane model.
    pub const BASE: HPoint = HPoint(MinkowskiVector::E0);

    pub fn try_new(v: MinkowskiVector) -> Result<Self, MinkowskiError> {
        let q = inner(v, v);
        if (q + 1.0).abs() > TOL_ALGEBRAIC * (1.0 + v.sup_norm().powi(2)) || v.x0 <= 0.0 {
            return Err(MinkowskiError::NotHyperboloidPoint { inner: q, x0: v.x0 });
        }
        Ok(HPoint(v))
    }

    /// Rescales a timelike future-pointing vector onto the hyperboloid.
    pub fn normalize(v: MinkowskiVector) -> Result<Self, MinkowskiError> {
        let q = inner(v, v);
        if q >= 0.0 || v.x0 <= 0.0 {
            return Err(MinkowskiError::NotHyperboloidPoint { inner: q, x0: v.x0 });
        }
        Ok(HPoint(v.scale(1.0 / (-q).sqrt())))
    }

    pub fn vector(self) -> MinkowskiVector {
        self.0
    }

    /// Hyperbolic distance `d(p,q) = arcosh(−⟨p,q⟩)`.
    pub fn distance(self, other: HPoint) -> f64 {
        let c = -inner(self.0, other.0);
        if c <= 1.0 {
            0.0
        } else {
            c.acosh()
        }
    }

    /// Unit tangent at `self` pointing toward `other` (distinct points).
    pub fn direction_to(self, other: HPoint) -> MinkowskiVector {
        let c = -inner(self.0, other.0);
        // q = p cosh d + t sinh d  =>  t = (q - p cosh d)/sinh d
        let sh = (c * c - 1.0).max(0.0).sqrt();
        other.0.sub(self.0.scale(c)).scale(1.0 / sh)
    }

    /// Geodesic step: the point at distance `t` from `self` along the unit
    /// tangent `dir`.
    pub fn flow(self, dir: MinkowskiVector, t: f64) -> HPoint {
        HPoint(self.0.scale(t.cosh()).add(dir.scale(t.sinh())))
    }

    /// Conversion to the upper half-plane, `(1,0,0) ↦ i`.
    pub fn to_half_plane(self) -> (f64, f64) {
        let MinkowskiVector { x0, x1, x2 } = self.0;
        let v = 1.0 / (x0 - x1);
        (x2 * v, v)
    }

    /// Conversion from the upper half-plane (`im > 0`).
    pub fn from_half_plane(re: f64, im: f64) -> Result<Self, MinkowskiError> {
        if !(im > 0.0) {
            return Err(MinkowskiError::NotInterior(im));
        }
        let n = re * re + im * im;
        Ok(HPoint(MinkowskiVector::new(
            (n + 1.0) / (2.0 * im),
            (n - 1.0) / (2.0 * im),
            re / im,
        )))
    }
}

/// An ideal point stored as a null ray, normalized with `x0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdealPoint(MinkowskiVector);

impl IdealPoint {
    pub fn try_new(v: MinkowskiVector) -> Result<Self, MinkowskiError> {
        let q = inner(v, v);
        if q.abs() > TOL_ALGEBRAIC * (1.0 + v.sup_norm().powi(2)) {
            return Err(MinkowskiError::NotNull(q));
        }
        if v.x0.abs() < f64::EPSILON {
            return Err(MinkowskiError::NotNull(q));
        }
        Ok(IdealPoint(v.scale(1.0 / v.x0)))
    }

    /// Ideal point of the half-plane boundary; pass `f64::INFINITY` for ∞.
    pub fn from_boundary_coordinate(u: f64) -> Self {
        if u.is_infinite() {
            IdealPoint(MinkowskiVector::new(1.0, 1.0, 0.0))
        } else {
            let n = u * u + 1.0;
            IdealPoint(MinkowskiVector::new(1.0, (u * u - 1.0) / n, 2.0 * u / n))
        }
    }

    /// Half-plane boundary coordinate (`None` for the point at infinity).
    pub fn boundary_coordinate(self) -> Option<f64> {
        let MinkowskiVector { x0, x1, x2 } = self.0;
        let d = x0 - x1;
        if d.abs() < 1e-14 * (x0.abs() + x1.abs()) {
            None
        } else {
            Some(x2 / d)
        }
    }

    pub fn vector(self) -> MinkowskiVector {
        self.0
    }

    pub fn approx_eq(self, other: IdealPoint, tol: f64) -> bool {
        self.0.sub(other.0).sup_norm() <= tol
    }
}

/// An oriented complete geodesic, `γ = {x ∈ ℍ : ⟨x, n⟩ = 0}` for a unit
/// spacelike normal `n`. The normal points to the right of the direction of
/// travel from the first ideal endpoint to the second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientedGeodesic {
    normal: MinkowskiVector,
}

impl OrientedGeodesic {
    pub fn try_from_normal(n: MinkowskiVector) -> Result<Self, MinkowskiError> {
        let q = inner(n, n);
        if (q - 1.0).abs() > TOL_ALGEBRAIC * (1.0 + n.sup_norm().powi(2)) {
            return Err(MinkowskiError::NotUnitSpacelike(q));
        }
        Ok(OrientedGeodesic { normal: n })
    }

    /// Rescales a spacelike vector to a unit normal.
    pub fn from_spacelike(n: MinkowskiVector) -> Result<Self, MinkowskiError> {
        let q = inner(n, n);
        if q <= 0.0 {
            return Err(MinkowskiError::NotUnitSpacelike(q));
        }
        Ok(OrientedGeodesic { normal: n.scale(1.0 / q.sqrt()) })
    }

    /// Oriented geodesic through ordered ideal endpoints, `n = (a⊠b)/‖a⊠b‖`.
    pub fn from_endpoints(a: IdealPoint, b: IdealPoint) -> Result<Self, MinkowskiError> {
        let c = cross(a.vector(), b.vector());
        let q = inner(c, c);
        if q <= TOL_ALGEBRAIC {
            return Err(MinkowskiError::ProportionalEndpoints);
        }
        Ok(OrientedGeodesic { normal: c.scale(1.0 / q.sqrt()) })
    }

    pub fn normal(self) -> MinkowskiVector {
        self.normal
    }

    pub fn reversed(self) -> Self {
        OrientedGeodesic { normal: self.normal.scale(-1.0) }
    }

    /// Ordered ideal endpoints `(start, end)`.
    ///
    /// For a point `p` on the geodesic with forward unit tangent `t`, the
    /// endpoints are the null rays `p ∓ t` (start behind, end ahead).
    pub fn endpoints(self) -> (IdealPoint, IdealPoint) {
        let p = self.closest_to_base();
        let t = self.forward_tangent_at(p);
        let start = IdealPoint::try_new(p.vector().sub(t)).expect("null by construction");
        let end = IdealPoint::try_new(p.vector().add(t)).expect("null by construction");
        (start, end)
    }

    /// Deterministic reference point on the geodesic (the point closest to
    /// the base point), used to anchor arclength parametrizations.
    pub fn reference_point(self) -> HPoint {
        self.closest_to_base()
    }

    /// The point of the geodesic closest to the base point `(1,0,0)`.
    fn closest_to_base(self) -> HPoint {
        let b = MinkowskiVector::E0;
        let s = inner(b, self.normal);
        // project the base point off the normal direction and renormalize
        let v = b.sub(self.normal.scale(s));
        HPoint::normalize(v).expect("projection of a timelike vector is timelike")
    }

    /// Unit tangent of the geodesic at a point `p` on it, in the direction of
    /// travel. With the right-pointing normal convention this is `n ⊠ p`.
    pub fn forward_tangent_at(self, p: HPoint) -> MinkowskiVector {
        cross(self.normal, p.vector())
    }

    /// Signed distance of a point to the geodesic: `sinh d = ⟨p, n⟩`,
    /// positive on the right side of the orientation.
    pub fn signed_distance(self, p: HPoint) -> f64 {
        inner(p.vector(), self.normal).asinh()
    }

    /// `sinh` of the signed distance, `⟨p, n⟩`.
    pub fn sinh_distance(self, p: HPoint) -> f64 {
        inner(p.vector(), self.normal)
    }

    /// Whether two geodesics cross transversally: `|⟨n1,n2⟩| < 1`.
    pub fn crosses(self, other: OrientedGeodesic) -> bool {
        inner(self.normal, other.normal).abs() < 1.0
    }

    /// Transverse intersection of two geodesics together with the cosine of
    /// the counterclockwise angle from `self` to `other` at the crossing.
    /// Returns `None` for disjoint, asymptotic or equal geodesics.
    pub fn intersect(self, other: OrientedGeodesic) -> Option<(HPoint, f64)> {
        let c = inner(self.normal, other.normal);
        if c.abs() >= 1.0 {
            return None;
        }
        let p = cross(self.normal, other.normal);
        let q = inner(p, p);
        if q >= 0.0 {
            return None;
        }
        let p = if p.x0 > 0.0 { p } else { p.scale(-1.0) };
        let point = HPoint(p.scale(1.0 / (-q).sqrt()));
        let u = self.forward_tangent_at(point);
        let w = other.forward_tangent_at(point);
        Some((point, angle_ccw_mod_pi(point, u, w).0))
    }

    /// Distance between two disjoint geodesics, `arcosh |⟨n1,n2⟩|`;
    /// zero if they meet.
    pub fn distance_to(self, other: OrientedGeodesic) -> f64 {
        let c = inner(self.normal, other.normal).abs();
        if c <= 1.0 {
            0.0
        } else {
            c.acosh()
        }
    }

    /// Common perpendicular of two disjoint geodesics: the oriented geodesic
    /// through both feet, plus the feet themselves `(foot on self, foot on other)`.
    pub fn common_perpendicular(
        self,
        other: OrientedGeodesic,
    ) -> Option<(OrientedGeodesic, HPoint, HPoint)> {
        let c = inner(self.normal, other.normal);
        if c.abs() <= 1.0 {
            return None;
        }
        let axis = cross(self.normal, other.normal);
        let perp = OrientedGeodesic::from_spacelike(axis).ok()?;
        // foot on self: on both self and perp
        let f1 = cross(self.normal, perp.normal);
        let f2 = cross(other.normal, perp.normal);
        let foot = |v: MinkowskiVector| {
            let q = inner(v, v);
            let v = if v.x0 > 0.0 { v } else { v.scale(-1.0) };
            HPoint(v.scale(1.0 / (-q).sqrt()))
        };
        Some((perp, foot(f1), foot(f2)))
    }

    /// Arclength parameter of a point `q` on the geodesic relative to the
    /// anchor `p` (also on it), positive in the direction of travel.
    pub fn arc_parameter(self, p: HPoint, q: HPoint) -> f64 {
        let t = self.forward_tangent_at(p);
        inner(q.vector(), t).asinh()
    }

    /// The point at arclength parameter `s` from `p` along the geodesic.
    pub fn point_at(self, p: HPoint, s: f64) -> HPoint {
        p.flow(self.forward_tangent_at(p), s)
    }
}

/// Counterclockwise angle from tangent `u` to tangent `w` at `p`, reduced
/// modulo π to `(0, π)` so that it is independent of the orientations of the
/// two lines: returns `(cos θ, sin θ)` with `sin θ > 0`.
///
/// The unreduced signed angle has `cos α = ⟨u,w⟩` and `sin α = −dV(p,u,w)`.
pub fn angle_ccw_mod_pi(p: HPoint, u: MinkowskiVector, w: MinkowskiVector) -> (f64, f64) {
    let ca = inner(u, w);
    let sa = -volume_form(p.vector(), u, w);
    if sa >= 0.0 {
        (ca, sa)
    } else {
        (-ca, -sa)
    }
}

/// The infinitesimal generator of the hyperbolic translations with the given
/// geodesic as oriented axis: under the identification of the Lie algebra
/// with ℝ^{2,1} via `v ↦ v ⊠ ·`, it is the unit normal itself.
/// `exp(t · v)` translates by `t` from the start endpoint toward the end.
pub fn generator_v(g: OrientedGeodesic) -> MinkowskiVector {
    g.normal()
}

/// 3×3 matrix acting on ℝ^{2,1}, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn apply(&self, v: MinkowskiVector) -> MinkowskiVector {
        let m = &self.0;
        MinkowskiVector::new(
            m[0][0] * v.x0 + m[0][1] * v.x1 + m[0][2] * v.x2,
            m[1][0] * v.x0 + m[1][1] * v.x1 + m[1][2] * v.x2,
            m[2][0] * v.x0 + m[2][1] * v.x1 + m[2][2] * v.x2,
        )
    }

    pub fn mul(&self, o: &Mat3) -> Mat3 {
        let mut r = [[0.0; 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        Mat3(r)
    }

    pub fn from_columns(c0: MinkowskiVector, c1: MinkowskiVector, c2: MinkowskiVector) -> Mat3 {
        Mat3([[c0.x0, c1.x0, c2.x0], [c0.x1, c1.x1, c2.x1], [c0.x2, c1.x2, c2.x2]])
    }

    /// Deviation from preserving the Minkowski form, `max |⟨Mei,Mej⟩ − ⟨ei,ej⟩|`.
    pub fn form_residual(&self) -> f64 {
        let cols = [
            self.apply(MinkowskiVector::E0),
            self.apply(MinkowskiVector::E1),
            self.apply(MinkowskiVector::E2),
        ];
        let eta = [[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let mut r: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                r = r.max((inner(cols[i], cols[j]) - eta[i][j]).abs());
            }
        }
        r
    }
}

/// Exponential of the Lie algebra element `v ⊠ ·` for a unit spacelike `v`:
/// `exp(t v̂) = I + sinh t · v̂ + (cosh t − 1) · v̂²`.
pub fn exp_generator(v: MinkowskiVector, t: f64) -> Mat3 {
    let vh = |y: MinkowskiVector| cross(v, y);
    let sh = t.sinh();
    let ch1 = t.cosh() - 1.0;
    let col = |e: MinkowskiVector| {
        let v1 = vh(e);
        let v2 = vh(v1);
        e.add(v1.scale(sh)).add(v2.scale(ch1))
    };
    Mat3::from_columns(col(MinkowskiVector::E0), col(MinkowskiVector::E1), col(MinkowskiVector::E2))
}

/// 2×2 real matrix of determinant one acting on the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Mat2 {
        Mat2 { a, b, c, d }
    }

    /// Translation by `t` along the imaginary axis (axis 0 → ∞).
    pub fn translation(t: f64) -> Mat2 {
        Mat2::new((t / 2.0).exp(), 0.0, 0.0, (-t / 2.0).exp())
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn inverse(&self) -> Mat2 {
        let det = self.det();
        Mat2::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn neg(&self) -> Mat2 {
        Mat2::new(-self.a, -self.b, -self.c, -self.d)
    }

    /// Renormalizes the determinant to one (drift control in long products).
    pub fn renormalize(&self) -> Mat2 {
        let s = 1.0 / self.det().abs().sqrt();
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// Möbius action on the half-plane.
    pub fn apply_half_plane(&self, re: f64, im: f64) -> (f64, f64) {
        let den = (self.c * re + self.d).powi(2) + (self.c * im).powi(2);
        (
            ((self.a * re + self.b) * (self.c * re + self.d) + self.a * self.c * im * im) / den,
            self.det() * im / den,
        )
    }

    /// Action on a boundary coordinate (`None` encodes ∞).
    pub fn apply_boundary(&self, u: Option<f64>) -> Option<f64> {
        match u {
            Some(u) => {
                let den = self.c * u + self.d;
                if den.abs() < 1e-300 {
                    None
                } else {
                    Some((self.a * u + self.b) / den)
                }
            }
            None => {
                if self.c.abs() < 1e-300 {
                    None
                } else {
                    Some(self.a / self.c)
                }
            }
        }
    }

    /// The corresponding element of `SO0(2,1)` through the equivariant
    /// identification of ℝ^{2,1} with symmetric 2×2 matrices
    /// `x ↦ [[x0+x1, x2], [x2, x0−x1]]`, on which `A` acts by `S ↦ A S Aᵀ`.
    pub fn to_so21(&self) -> Mat3 {
        let act = |x: MinkowskiVector| {
            let (s00, s01, s11) = (x.x0 + x.x1, x.x2, x.x0 - x.x1);
            // A S A^T for A = [[a,b],[c,d]]
            let (a, b, c, d) = (self.a, self.b, self.c, self.d);
            let t00 = a * (a * s00 + b * s01) + b * (a * s01 + b * s11);
            let t01 = c * (a * s00 + b * s01) + d * (a * s01 + b * s11);
            let t11 = c * (c * s00 + d * s01) + d * (c * s01 + d * s11);
            MinkowskiVector::new((t00 + t11) / 2.0, (t00 - t11) / 2.0, t01)
        };
        Mat3::from_columns(act(MinkowskiVector::E0), act(MinkowskiVector::E1), act(MinkowskiVector::E2))
    }
}

/// An isometry of the hyperbolic plane maintained in both models: the 2×2
/// half-plane matrix (up to sign) and its 3×3 hyperboloid image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    pub half_plane: Mat2,
    pub hyperboloid: Mat3,
}

impl Isometry {
    pub const IDENTITY: Isometry =
        Isometry { half_plane: Mat2::IDENTITY, hyperboloid: Mat3::IDENTITY };

    pub fn from_mat2(m: Mat2) -> Isometry {
        let m = m.renormalize();
        Isometry { half_plane: m, hyperboloid: m.to_so21() }
    }

    pub fn mul(&self, o: &Isometry) -> Isometry {
        // derive the 3×3 from the renormalized 2×2 product: keeps the two
        // views in exact lockstep and the form preserved to relative precision
        Isometry::from_mat2(self.half_plane.mul(&o.half_plane))
    }

    pub fn inverse(&self) -> Isometry {
        Isometry::from_mat2(self.half_plane.inverse())
    }

    pub fn apply_point(&self, p: HPoint) -> HPoint {
        let v = self.hyperboloid.apply(p.vector());
        // renormalize against rounding drift
        HPoint::normalize(v).expect("isometry preserves the hyperboloid")
    }

    pub fn apply_vector(&self, v: MinkowskiVector) -> MinkowskiVector {
        self.hyperboloid.apply(v)
    }

    pub fn apply_geodesic(&self, g: OrientedGeodesic) -> OrientedGeodesic {
        let n = self.hyperboloid.apply(g.normal());
        OrientedGeodesic::from_spacelike(n).expect("isometry preserves spacelike vectors")
    }

    pub fn apply_ideal(&self, p: IdealPoint) -> IdealPoint {
        IdealPoint::try_new(self.hyperboloid.apply(p.vector())).expect("isometry preserves null rays")
    }

    /// Classification by half-plane trace: hyperbolic iff `|tr| > 2`.
    pub fn is_hyperbolic(&self) -> bool {
        self.half_plane.trace().abs() > 2.0 + 1e-12
    }

    /// Translation length of a hyperbolic isometry, `2 arcosh(|tr|/2)`.
    pub fn translation_length(&self) -> Option<f64> {
        let t = self.half_plane.trace().abs() / 2.0;
        if t > 1.0 {
            Some(2.0 * t.acosh())
        } else {
            None
        }
    }

    /// Oriented axis of a hyperbolic isometry, from the repelling toward the
    /// attracting fixed point.
    ///
    /// The normal comes from the traceless part of the 2×2 matrix: under the
    /// identification of ℝ^{2,1} with symmetric matrices, `X ↦ X·J` with
    /// `J = [[0,−1],[1,0]]` intertwines conjugation with the isometric
    /// action, and the traceless part of a hyperbolic element is its own
    /// conjugation-invariant. This avoids the ill-conditioned fixed-point
    /// coordinates of nearly-parallel null rays.
    pub fn axis(&self) -> Option<OrientedGeodesic> {
        let m = self.half_plane;
        if m.trace().abs() <= 2.0 + 1e-12 {
            return None;
        }
        let half_tr = m.trace() / 2.0;
        // traceless part X = A − (tr/2)·I, then S = X·J symmetric
        let (s00, s01, s11) = (m.b, -(m.a - half_tr), -m.c);
        let v = MinkowskiVector::new((s00 + s11) / 2.0, (s00 - s11) / 2.0, s01);
        let g = OrientedGeodesic::from_spacelike(v).ok()?;
        // orient toward the attracting fixed point: the isometry moves axis
        // points forward along it
        let q = g.reference_point();
        let moved = self.apply_point(q);
        let dir = q.direction_to(moved);
        if inner(g.forward_tangent_at(q), dir) >= 0.0 {
            Some(g)
        } else {
            Some(g.reversed())
        }
    }

    /// Attracting and repelling fixed points of a hyperbolic isometry.
    pub fn fixed_points(&self) -> Option<(IdealPoint, IdealPoint)> {
        let axis = self.axis()?;
        let (rep, attr) = axis.endpoints();
        Some((attr, rep))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {a} ≈ {b} (tol {tol})");
    }

    #[test]
    fn inner_signature() {
        assert_close(inner(MinkowskiVector::E0, MinkowskiVector::E0), -1.0, 0.0);
        assert_close(inner(MinkowskiVector::E1, MinkowskiVector::E1), 1.0, 0.0);
        let x = MinkowskiVector::new(1.0, 1.0, 0.0);
        let y = MinkowskiVector::new(1.0, 0.0, 1.0);
        assert_close(inner(x, y), -1.0, 0.0);
    }

    #[test]
    fn cross_basics() {
        let x = MinkowskiVector::new(0.3, -1.2, 2.0);
        assert_close(cross(x, x).sup_norm(), 0.0, 0.0);
        let e1xe2 = cross(MinkowskiVector::E1, MinkowskiVector::E2);
        assert_close(e1xe2.x0, -1.0, 0.0);
        assert_close(e1xe2.x1, 0.0, 0.0);
        assert_close(e1xe2.x2, 0.0, 0.0);
        assert_close(volume_form(MinkowskiVector::E0, MinkowskiVector::E1, MinkowskiVector::E2), 1.0, 0.0);
    }

    #[test]
    fn geodesic_from_endpoints_axis() {
        let a = IdealPoint::from_boundary_coordinate(0.0);
        let b = IdealPoint::from_boundary_coordinate(f64::INFINITY);
        let g = OrientedGeodesic::from_endpoints(a, b).unwrap();
        // imaginary axis oriented upward has normal e2
        assert!(g.normal().sub(MinkowskiVector::E2).sup_norm() < 1e-12);
        let swapped = OrientedGeodesic::from_endpoints(b, a).unwrap();
        assert!(swapped.normal().add(g.normal()).sup_norm() < 1e-12);

        let a = IdealPoint::try_new(MinkowskiVector::new(1.0, 1.0, 0.0)).unwrap();
        let b = IdealPoint::try_new(MinkowskiVector::new(1.0, -1.0, 0.0)).unwrap();
        let g = OrientedGeodesic::from_endpoints(a, b).unwrap();
        assert_close(inner(g.normal(), g.normal()), 1.0, 1e-12);
        assert_close(g.normal().x0.abs(), 0.0, 1e-12);
        assert_close(g.normal().x1.abs(), 0.0, 1e-12);
        assert_close(g.normal().x2.abs(), 1.0, 1e-12);
    }

    #[test]
    fn proportional_endpoints_rejected() {
        let a = IdealPoint::from_boundary_coordinate(2.0);
        assert!(OrientedGeodesic::from_endpoints(a, a).is_err());
    }

    #[test]
    fn distance_point_to_geodesic() {
        let axis = OrientedGeodesic::from_endpoints(
            IdealPoint::from_boundary_coordinate(0.0),
            IdealPoint::from_boundary_coordinate(f64::INFINITY),
        )
        .unwrap();
        // point on the geodesic
        let p = HPoint::from_half_plane(0.0, 3.7).unwrap();
        assert_close(axis.signed_distance(p), 0.0, 1e-12);
        // 1 + i against the imaginary axis: tanh d = cos(π/4)
        let q = HPoint::from_half_plane(1.0, 1.0).unwrap();
        let d = axis.signed_distance(q);
        assert_close(d.tanh(), (std::f64::consts::FRAC_PI_4).cos(), 1e-12);
        assert!(d > 0.0, "right side of the upward axis is positive");
    }

    #[test]
    fn half_plane_round_trip_and_base() {
        let p = HPoint::from_half_plane(0.0, 1.0).unwrap();
        assert!(p.vector().sub(MinkowskiVector::E0).sup_norm() < 1e-15);
        let q = HPoint::from_half_plane(2.0, 3.0).unwrap();
        let (re, im) = q.to_half_plane();
        assert_close(re, 2.0, 1e-12);
        assert_close(im, 3.0, 1e-12);
        // d(i, 2i) = ln 2 both ways
        let a = HPoint::from_half_plane(0.0, 1.0).unwrap();
        let b = HPoint::from_half_plane(0.0, 2.0).unwrap();
        assert_close(a.distance(b), std::f64::consts::LN_2, 1e-12);
    }

    #[test]
    fn intersect_perpendicular() {
        let g1 = OrientedGeodesic::from_endpoints(
            IdealPoint::from_boundary_coordinate(0.0),
            IdealPoint::from_boundary_coordinate(f64::INFINITY),
        )
        .unwrap();
        let g2 = OrientedGeodesic::from_endpoints(
            IdealPoint::from_boundary_coordinate(-1.0),
            IdealPoint::from_boundary_coordinate(1.0),
        )
        .unwrap();
        let (p, cos_theta) = g1.intersect(g2).unwrap();
        assert!(p.vector().sub(MinkowskiVector::E0).sup_norm() < 1e-12);
        assert_close(cos_theta, 0.0, 1e-12);
        assert!(g1.intersect(g1).is_none());
    }

    #[test]
    fn generator_translates_axis() {
        let g = OrientedGeodesic::from_endpoints(
            IdealPoint::from_boundary_coordinate(-0.7),
            IdealPoint::from_boundary_coordinate(2.1),
        )
        .unwrap();
        let v = generator_v(g);
        for t in [0.1, 1.0, 2.0] {
            let m = exp_generator(v, t);
            let (a, b) = g.endpoints();
            let fa = m.apply(a.vector());
            let fb = m.apply(b.vector());
            // fixed ideal points (projectively)
            let ra = IdealPoint::try_new(fa).unwrap();
            let rb = IdealPoint::try_new(fb).unwrap();
            assert!(ra.approx_eq(a, 1e-9));
            assert!(rb.approx_eq(b, 1e-9));
            assert!(m.form_residual() < 1e-12);
        }
        // t = 0 is the identity
        let id = exp_generator(v, 0.0);
        assert!(id.mul(&Mat3::IDENTITY).0 == Mat3::IDENTITY.0);
        // translation length via a point on the axis
        let (_perp, foot, _) = g
            .common_perpendicular(
                OrientedGeodesic::from_endpoints(
                    IdealPoint::from_boundary_coordinate(5.0),
                    IdealPoint::from_boundary_coordinate(9.0),
                )
                .unwrap(),
            )
            .unwrap();
        let t = 1.3;
        let m = exp_generator(v, t);
        let moved = HPoint::normalize(m.apply(foot.vector())).unwrap();
        assert_close(foot.distance(moved), t, 1e-9);
    }

    #[test]
    fn mat2_translation_length_and_conversion() {
        // diag(e, e^{-1}) has translation length 2
        let m = Mat2::new(std::f64::consts::E, 0.0, 0.0, 1.0 / std::f64::consts::E);
        let iso = Isometry::from_mat2(m);
        assert_close(iso.translation_length().unwrap(), 2.0, 1e-12);
        // conversion is equivariant on points
        let z = HPoint::from_half_plane(0.3, 0.8).unwrap();
        let (mre, mim) = m.apply_half_plane(0.3, 0.8);
        let lhs = iso.apply_point(z);
        let rhs = HPoint::from_half_plane(mre, mim).unwrap();
        assert!(lhs.vector().sub(rhs.vector()).sup_norm() < 1e-10);
    }

    #[test]
    fn axis_orientation_matches_translation() {
        let m = Mat2::translation(1.4); // axis 0 → ∞
        let iso = Isometry::from_mat2(m);
        let axis = iso.axis().unwrap();
        let (start, end) = axis.endpoints();
        assert!(start.approx_eq(IdealPoint::from_boundary_coordinate(0.0), 1e-9));
        assert!(end.approx_eq(IdealPoint::from_boundary_coordinate(f64::INFINITY), 1e-9));
        let (attr, rep) = iso.fixed_points().unwrap();
        assert!(attr.approx_eq(IdealPoint::from_boundary_coordinate(f64::INFINITY), 1e-9));
        assert!(rep.approx_eq(IdealPoint::from_boundary_coordinate(0.0), 1e-9));
    }

    #[test]
    fn ccw_angle_convention() {
        // at i: "right" (+1 direction) is e2, "up" (+i direction) is e1;
        // counterclockwise from right to up is +π/2
        let p = HPoint::BASE;
        let (c, s) = angle_ccw_mod_pi(p, MinkowskiVector::E2, MinkowskiVector::E1);
        assert_close(c, 0.0, 1e-15);
        assert_close(s, 1.0, 1e-15);
    }

    fn arbitrary_vector() -> impl Strategy<Value = MinkowskiVector> {
        ((-3.0..3.0f64), (-3.0..3.0f64), (-3.0..3.0f64))
            .prop_map(|(a, b, c)| MinkowskiVector::new(a, b, c))
    }

    proptest! {
        #[test]
        fn cross_identities(x in arbitrary_vector(), y in arbitrary_vector(), z in arbitrary_vector()) {
            let scale = x.sup_norm().max(y.sup_norm()).max(z.sup_norm()).max(1.0).powi(3);
            // ⟨x, y⊠z⟩ = ⟨z, x⊠y⟩
            prop_assert!((inner(x, cross(y, z)) - inner(z, cross(x, y))).abs() <= 1e-12 * scale);
            // (x⊠y)⊠z = ⟨y,z⟩x − ⟨x,z⟩y
            let lhs = cross(cross(x, y), z);
            let rhs = x.scale(inner(y, z)).sub(y.scale(inner(x, z)));
            prop_assert!(lhs.sub(rhs).sup_norm() <= 1e-12 * scale);
            // ⟨x⊠y,x⊠y⟩ = ⟨x,y⟩² − ⟨x,x⟩⟨y,y⟩
            let c = cross(x, y);
            prop_assert!((inner(c, c) - (inner(x, y).powi(2) - inner(x, x) * inner(y, y))).abs() <= 1e-12 * scale * scale.cbrt());
        }

        #[test]
        fn isometry_commutes_with_conversion(
            t in 0.1..2.0f64, s in -1.5..1.5f64, re in -2.0..2.0f64, im in 0.2..3.0f64
        ) {
            let m = Mat2::translation(t).mul(&Mat2::new(s.cosh(), s.sinh(), s.sinh(), s.cosh()));
            let iso = Isometry::from_mat2(m);
            let p = HPoint::from_half_plane(re, im).unwrap();
            let (mre, mim) = m.apply_half_plane(re, im);
            let via_model = HPoint::from_half_plane(mre, mim).unwrap();
            let scale = via_model.vector().sup_norm().max(1.0);
            prop_assert!(iso.apply_point(p).vector().sub(via_model.vector()).sup_norm() <= 1e-10 * scale);
        }

        #[test]
        fn distance_isometry_invariant(
            t in -1.0..1.0f64, s in -1.0..1.0f64, re in -2.0..2.0f64, im in 0.2..3.0f64,
            a in -3.0..(-0.5f64), b in 0.5..3.0f64
        ) {
            let iso = Isometry::from_mat2(
                Mat2::translation(t).mul(&Mat2::new(s.cosh(), s.sinh(), s.sinh(), s.cosh())));
            let p = HPoint::from_half_plane(re, im).unwrap();
            let g = OrientedGeodesic::from_endpoints(
                IdealPoint::from_boundary_coordinate(a),
                IdealPoint::from_boundary_coordinate(b),
            ).unwrap();
            let d1 = g.signed_distance(p);
            let d2 = iso.apply_geodesic(g).signed_distance(iso.apply_point(p));
            prop_assert!((d1 - d2).abs() <= 1e-10);
        }
    }
}

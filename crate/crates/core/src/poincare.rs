//! Poincare-sphere geometry and the Pancharatnam phase.
//!
//! The Stokes mapping is `S = (|h|^2 - |v|^2, 2 Re(h* v), 2 Im(h* v))`, which
//! puts `|H>` at `+S1`, `|D>` at `+S2` and `(1, i)/sqrt(2)` at the north pole.
//!
//! Solid angles are signed so that, with this mapping,
//!
//! ```text
//! arg(<a|b><b|c><c|a>) = -solid_angle(a, b, c) / 2   (mod 2 pi)
//! ```
//!
//! holds exactly. Concretely the sign is positive when the vertices run
//! clockwise as seen from outside the sphere. For `(L, H, D)` the triangle
//! is one octant, `solid_angle = +pi/2` and the phase is `-pi/4`.

use crate::error::{Error, Result};
use crate::jones::{inner_product, PolarizationState};
use crate::wrap_angle;

/// A point on the unit Poincare sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincarePoint {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl PoincarePoint {
    pub const fn new(s1: f64, s2: f64, s3: f64) -> Self {
        Self { s1, s2, s3 }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.s1 * other.s1 + self.s2 * other.s2 + self.s3 * other.s3
    }

    pub fn cross(&self, other: &Self) -> Self {
        Self::new(
            self.s2 * other.s3 - self.s3 * other.s2,
            self.s3 * other.s1 - self.s1 * other.s3,
            self.s1 * other.s2 - self.s2 * other.s1,
        )
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Latitude in radians, positive toward `+S3`.
    pub fn latitude(&self) -> f64 {
        self.s3.atan2(self.s1.hypot(self.s2))
    }

    /// Longitude in radians measured from `+S1` toward `+S2`.
    pub fn longitude(&self) -> f64 {
        self.s2.atan2(self.s1)
    }
}

/// Signed solid angle of a geodesic triangle, in steradians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SolidAngle(f64);

impl SolidAngle {
    pub fn steradians(self) -> f64 {
        self.0
    }

    /// The geometric phase `-omega/2` on (-pi, pi].
    pub fn geometric_phase(self) -> f64 {
        wrap_angle(-0.5 * self.0)
    }
}

/// Stokes vector of `s`. Unnormalized input is normalized first.
pub fn to_poincare(s: &PolarizationState) -> Result<PoincarePoint> {
    let n2 = s.norm_sqr();
    if !(n2 > 0.0) || !n2.is_finite() {
        return Err(Error::InvalidArgument(
            "cannot map a zero-norm state to the Poincare sphere".into(),
        ));
    }
    let cross = s.h.conj() * s.v;
    Ok(PoincarePoint::new(
        (s.h.norm_sqr() - s.v.norm_sqr()) / n2,
        2.0 * cross.re / n2,
        2.0 * cross.im / n2,
    ))
}

/// Relative magnitude below which the triple product is treated as zero.
const TRIPLE_PRODUCT_FLOOR: f64 = 1e-12;

/// `arg(<a|b><b|c><c|a>)` on (-pi, pi].
///
/// Gauge invariant: every state appears once as a bra and once as a ket.
/// Fails with [`Error::UndefinedPhase`] when some pair is orthogonal.
pub fn pancharatnam_phase(
    a: &PolarizationState,
    b: &PolarizationState,
    c: &PolarizationState,
) -> Result<f64> {
    let product = inner_product(a, b) * inner_product(b, c) * inner_product(c, a);
    let scale = a.norm_sqr() * b.norm_sqr() * c.norm_sqr();
    if !(product.norm() >= TRIPLE_PRODUCT_FLOOR * scale) || scale == 0.0 {
        return Err(Error::UndefinedPhase(
            "two of the three states are orthogonal",
        ));
    }
    Ok(wrap_angle(product.im.atan2(product.re)))
}

/// Vertices closer than this (in `1 + p.q`) to antipodal are rejected.
const ANTIPODAL_FLOOR: f64 = 1e-12;

/// Signed solid angle of the geodesic triangle `(p1, p2, p3)`.
///
/// Uses the vertex-vector form
/// `tan(omega/2) = -p1.(p2 x p3) / (1 + p1.p2 + p2.p3 + p3.p1)`, which stays
/// accurate for thin triangles where spherical-excess formulas lose digits.
pub fn solid_angle(
    p1: &PoincarePoint,
    p2: &PoincarePoint,
    p3: &PoincarePoint,
) -> Result<SolidAngle> {
    let (d12, d23, d31) = (p1.dot(p2), p2.dot(p3), p3.dot(p1));
    for (d, pair) in [(d12, (1, 2)), (d23, (2, 3)), (d31, (3, 1))] {
        if d < -1.0 + ANTIPODAL_FLOOR {
            return Err(Error::DegenerateGeodesic(pair.0, pair.1));
        }
    }
    let volume = p1.dot(&p2.cross(p3));
    let half = volume.atan2(1.0 + d12 + d23 + d31);
    Ok(SolidAngle(-2.0 * half))
}

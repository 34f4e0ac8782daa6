//! Jones vectors in the {H, V} basis and the two element types of the setup.
//!
//! Phase conventions are fixed so that intermediate states match the
//! textbook constructions literally: a quarter-wave plate with its fast axis
//! horizontal is `diag(1, i)` with no extra global phase, so that
//! `cos t |H> + sin t |V>` becomes `cos t |H> + i sin t |V>`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{ensure_finite, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default tolerance used by the `is_*` predicates.
pub const TOLERANCE: f64 = 1e-12;

/// A (possibly unnormalized) Jones vector.
///
/// Normalization is not tracked by the type: projections produce
/// sub-normalized vectors and callers normalize explicitly when required.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationState {
    pub h: Complex64,
    pub v: Complex64,
}

impl PolarizationState {
    pub const fn new(h: Complex64, v: Complex64) -> Self {
        Self { h, v }
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO)
    }

    /// Horizontal linear polarization.
    pub const fn horizontal() -> Self {
        Self::new(ONE, ZERO)
    }

    /// Vertical linear polarization.
    pub const fn vertical() -> Self {
        Self::new(ZERO, ONE)
    }

    /// Linear polarization at 45 degrees.
    pub const fn diagonal() -> Self {
        Self::new(
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(FRAC_1_SQRT_2, 0.0),
        )
    }

    /// Linear polarization at 135 degrees.
    pub const fn antidiagonal() -> Self {
        Self::new(
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(-FRAC_1_SQRT_2, 0.0),
        )
    }

    /// `(1, i)/sqrt(2)`, the north pole of the Poincare sphere.
    ///
    /// Handedness labels depend on whether one looks along or against the
    /// beam; this crate calls the north-pole state "right" circular.
    pub const fn right_circular() -> Self {
        Self::new(
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(0.0, FRAC_1_SQRT_2),
        )
    }

    /// `(1, -i)/sqrt(2)`, the south pole of the Poincare sphere.
    pub const fn left_circular() -> Self {
        Self::new(
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(0.0, -FRAC_1_SQRT_2),
        )
    }

    pub fn norm_sqr(&self) -> f64 {
        self.h.norm_sqr() + self.v.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= TOLERANCE
    }

    /// Returns the unit vector along `self`, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        Some(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::new(self.h * factor, self.v * factor)
    }

    /// Multiplies by the global phase factor `exp(i phi)`.
    pub fn with_phase(&self, phi: f64) -> Self {
        self.scale(Complex64::from_polar(1.0, phi))
    }

    /// Component-wise comparison within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.h - other.h).norm() <= tol && (self.v - other.v).norm() <= tol
    }
}

impl std::ops::Add for PolarizationState {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::new(self.h + rhs.h, self.v + rhs.v)
    }
}

/// `<a|b>`, conjugate-linear in the first argument.
pub fn inner_product(a: &PolarizationState, b: &PolarizationState) -> Complex64 {
    a.h.conj() * b.h + a.v.conj() * b.v
}

/// `cos(theta) |H> + sin(theta) |V>`.
pub fn linear_polarization(theta: f64) -> Result<PolarizationState> {
    ensure_finite("polarization angle", theta)?;
    let (s, c) = theta.sin_cos();
    Ok(PolarizationState::new(
        Complex64::new(c, 0.0),
        Complex64::new(s, 0.0),
    ))
}

/// A 2x2 complex matrix acting on Jones vectors, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementOperator {
    m: [[Complex64; 2]; 2],
}

impl ElementOperator {
    pub const fn from_rows(m: [[Complex64; 2]; 2]) -> Self {
        Self { m }
    }

    pub const fn identity() -> Self {
        Self::from_rows([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn rows(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::from_rows([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        let mut c = [[ZERO; 2]; 2];
        for (i, row) in c.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self::from_rows(c)
    }

    pub fn apply(&self, s: &PolarizationState) -> PolarizationState {
        let m = &self.m;
        PolarizationState::new(m[0][0] * s.h + m[0][1] * s.v, m[1][0] * s.h + m[1][1] * s.v)
    }

    /// Largest element-wise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.m
            .iter()
            .flatten()
            .zip(other.m.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `m^dagger m = I` within `tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.adjoint().compose(self).max_abs_diff(&Self::identity()) <= tol
    }

    /// Hermitian and idempotent within `tol`.
    pub fn is_projector(&self, tol: f64) -> bool {
        self.adjoint().max_abs_diff(self) <= tol && self.compose(self).max_abs_diff(self) <= tol
    }
}

impl Mul<PolarizationState> for ElementOperator {
    type Output = PolarizationState;

    fn mul(self, rhs: PolarizationState) -> PolarizationState {
        self.apply(&rhs)
    }
}

impl Mul for ElementOperator {
    type Output = ElementOperator;

    fn mul(self, rhs: ElementOperator) -> ElementOperator {
        self.compose(&rhs)
    }
}

/// Ideal linear polarizer with transmission axis at `theta`: the projector
/// onto [`linear_polarization`]`(theta)`.
pub fn polarizer(theta: f64) -> Result<ElementOperator> {
    let p = linear_polarization(theta)?;
    let outer = |a: Complex64, b: Complex64| a * b.conj();
    Ok(ElementOperator::from_rows([
        [outer(p.h, p.h), outer(p.h, p.v)],
        [outer(p.v, p.h), outer(p.v, p.v)],
    ]))
}

/// Quarter-wave plate with its fast axis at `fast_axis`.
///
/// Equal to `R(a) diag(1, i) R(-a)`: the fast-axis component passes
/// unchanged and the slow-axis component picks up a factor `i`.
pub fn quarter_wave_plate(fast_axis: f64) -> Result<ElementOperator> {
    ensure_finite("fast axis angle", fast_axis)?;
    let (s, c) = fast_axis.sin_cos();
    let (cc, ss, cs) = (c * c, s * s, c * s);
    let off = Complex64::new(cs, -cs);
    Ok(ElementOperator::from_rows([
        [Complex64::new(cc, ss), off],
        [off, Complex64::new(ss, cc)],
    ]))
}

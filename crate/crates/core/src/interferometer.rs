//! The double slit with polarization markers.
//!
//! Light prepared by a linear polarizer at `theta1` passes slit A through a
//! quarter-wave plate with fast axis at `qwp_a` and slit B through one at
//! `qwp_b`. An optional second polarizer at `theta2` (the eraser) projects
//! both branches before the screen. The screen pattern of any such state is
//! a single-frequency fringe
//!
//! ```text
//! I(x) = base * E(x) * (1 + V cos(k x - delta))
//! ```
//!
//! with `V = 2|<b|a>| / (|a|^2 + |b|^2)` and `delta = arg <b|a>` for branch
//! amplitudes `a`, `b`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, TAU};

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};
use crate::jones::{
    inner_product, linear_polarization, polarizer, quarter_wave_plate, ElementOperator,
    PolarizationState, TOLERANCE,
};
use crate::poincare::pancharatnam_phase;
use crate::wrap_angle;

/// Visibility below which a fringe is considered absent and its phase
/// undefined.
pub const VISIBILITY_FLOOR: f64 = 1e-12;

/// Total branch intensity below which a composite state counts as empty.
const EMPTY_FLOOR: f64 = 1e-15;

/// Far-field geometry of the double slit. Lengths in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreenGeometry {
    slit_separation: f64,
    wavelength: f64,
    distance: f64,
}

impl ScreenGeometry {
    pub fn new(slit_separation: f64, wavelength: f64, distance: f64) -> Result<Self> {
        for (name, v) in [
            ("slit separation", slit_separation),
            ("wavelength", wavelength),
            ("screen distance", distance),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if !(wavelength < slit_separation && slit_separation < distance) {
            return Err(Error::InvalidArgument(format!(
                "expected wavelength < slit separation < screen distance, got {wavelength} m, \
                 {slit_separation} m, {distance} m"
            )));
        }
        Ok(Self {
            slit_separation,
            wavelength,
            distance,
        })
    }

    pub fn slit_separation(&self) -> f64 {
        self.slit_separation
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    /// Fringe period on the screen, `lambda L / d`.
    pub fn fringe_period(&self) -> f64 {
        self.wavelength * self.distance / self.slit_separation
    }
}

/// Transverse fringe wave number `k = 2 pi d / (lambda L)` in rad/m.
pub fn wave_number(g: &ScreenGeometry) -> f64 {
    TAU * g.slit_separation / (g.wavelength * g.distance)
}

/// Slowly varying intensity envelope multiplying the fringe.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Envelope {
    #[default]
    Flat,
    /// `exp(-x^2 / (2 sigma^2))`, sigma in metres.
    Gaussian { sigma: f64 },
}

impl Envelope {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        let env = Envelope::Gaussian { sigma };
        env.validate()?;
        Ok(env)
    }

    pub fn from_sigma(sigma: Option<f64>) -> Result<Self> {
        sigma.map_or(Ok(Envelope::Flat), Envelope::gaussian)
    }

    pub fn sigma(&self) -> Option<f64> {
        match *self {
            Envelope::Flat => None,
            Envelope::Gaussian { sigma } => Some(sigma),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Envelope::Gaussian { sigma } if !(sigma > 0.0) || !sigma.is_finite() => Err(
                Error::InvalidArgument(format!("envelope sigma must be positive, got {sigma}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn weight(&self, x: f64) -> f64 {
        match *self {
            Envelope::Flat => 1.0,
            Envelope::Gaussian { sigma } => {
                let u = x / sigma;
                (-0.5 * u * u).exp()
            }
        }
    }

    /// Largest value the envelope takes on `[lo, hi]`.
    pub fn max_on(&self, lo: f64, hi: f64) -> f64 {
        self.weight(0.0_f64.clamp(lo, hi))
    }
}

/// Path-polarization state: one unnormalized Jones vector per slit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeState {
    pub branch_a: PolarizationState,
    pub branch_b: PolarizationState,
}

impl CompositeState {
    pub fn new(branch_a: PolarizationState, branch_b: PolarizationState) -> Self {
        Self { branch_a, branch_b }
    }

    /// `|a|^2 + |b|^2`.
    pub fn total_intensity(&self) -> f64 {
        self.branch_a.norm_sqr() + self.branch_b.norm_sqr()
    }

    pub fn is_empty(&self) -> bool {
        !(self.total_intensity() > EMPTY_FLOOR)
    }

    /// Applies `op` to both branches.
    pub fn transform(&self, op: &ElementOperator) -> Self {
        Self::new(op.apply(&self.branch_a), op.apply(&self.branch_b))
    }
}

/// Sends `psi1` through both slits with equal weight and marks each branch
/// with a unitary.
pub fn mark_paths(
    psi1: &PolarizationState,
    op_a: &ElementOperator,
    op_b: &ElementOperator,
) -> Result<CompositeState> {
    if !psi1.is_normalized() {
        return Err(Error::InvalidArgument(format!(
            "input polarization must be normalized, |psi|^2 = {}",
            psi1.norm_sqr()
        )));
    }
    if !op_a.is_unitary(TOLERANCE) || !op_b.is_unitary(TOLERANCE) {
        return Err(Error::InvalidArgument(
            "which-path markers must be unitary".into(),
        ));
    }
    let half = Complex64::new(FRAC_1_SQRT_2, 0.0);
    Ok(CompositeState::new(
        op_a.apply(psi1).scale(half),
        op_b.apply(psi1).scale(half),
    ))
}

/// Projects both branches onto linear polarization `theta2`.
///
/// The result may be the zero state; [`fringe_law`] rejects it.
pub fn erase(m: &CompositeState, theta2: f64) -> Result<CompositeState> {
    Ok(m.transform(&polarizer(theta2)?))
}

/// Single-frequency intensity law on the screen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeLaw {
    visibility: f64,
    delta: Option<f64>,
    k: f64,
    base: f64,
}

impl FringeLaw {
    /// Builds a law from its parameters. `delta` is wrapped onto (-pi, pi].
    pub fn new(visibility: f64, delta: Option<f64>, k: f64, base: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&visibility) {
            return Err(Error::InvalidArgument(format!(
                "visibility must lie in [0, 1], got {visibility}"
            )));
        }
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "k must be positive, got {k}"
            )));
        }
        if !(base >= 0.0) || !base.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "base intensity must be non-negative, got {base}"
            )));
        }
        if let Some(d) = delta {
            ensure_finite("fringe phase", d)?;
        }
        Ok(Self {
            visibility,
            delta: delta.map(wrap_angle),
            k,
            base,
        })
    }

    pub fn visibility(&self) -> f64 {
        self.visibility
    }

    /// Fringe phase, or `None` when there is no fringe.
    pub fn delta(&self) -> Option<f64> {
        self.delta
    }

    pub fn phase(&self) -> Result<f64> {
        self.delta
            .ok_or(Error::UndefinedPhase("fringe visibility is zero"))
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn period(&self) -> f64 {
        TAU / self.k
    }

    /// Intensity at `x` without envelope.
    pub fn fringe(&self, x: f64) -> f64 {
        let delta = self.delta.unwrap_or(0.0);
        self.base * (1.0 + self.visibility * (self.k * x - delta).cos())
    }

    pub fn intensity(&self, x: f64, envelope: &Envelope) -> f64 {
        envelope.weight(x) * self.fringe(x)
    }
}

/// Reduces a composite state to its fringe law.
pub fn fringe_law(s: &CompositeState, k: f64) -> Result<FringeLaw> {
    if s.is_empty() {
        return Err(Error::EmptyState);
    }
    let total = s.total_intensity();
    let coherence = inner_product(&s.branch_b, &s.branch_a);
    let visibility = (2.0 * coherence.norm() / total).min(1.0);
    let delta = (visibility >= VISIBILITY_FLOOR).then(|| coherence.im.atan2(coherence.re));
    FringeLaw::new(visibility, delta, k, total)
}

/// Samples `I(x)` at each of `xs`.
pub fn intensity_profile(f: &FringeLaw, xs: &[f64], envelope: &Envelope) -> Result<Vec<f64>> {
    envelope.validate()?;
    Ok(xs.iter().map(|&x| f.intensity(x, envelope)).collect())
}

/// Polarizer and wave-plate angles of the setup, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Apparatus {
    pub theta1: f64,
    pub qwp_a: f64,
    pub qwp_b: f64,
    /// Eraser angle; `None` when the second polarizer is removed.
    pub theta2: Option<f64>,
}

impl Apparatus {
    /// Standard markers: fast axes at 0 and 90 degrees.
    pub fn new(theta1: f64, theta2: Option<f64>) -> Self {
        Self {
            theta1,
            qwp_a: 0.0,
            qwp_b: FRAC_PI_2,
            theta2,
        }
    }

    pub fn with_markers(mut self, qwp_a: f64, qwp_b: f64) -> Self {
        self.qwp_a = qwp_a;
        self.qwp_b = qwp_b;
        self
    }

    pub fn initial_state(&self) -> Result<PolarizationState> {
        linear_polarization(self.theta1)
    }

    /// Normalized marker states `(psi_A, psi_B)`.
    pub fn marker_states(&self) -> Result<(PolarizationState, PolarizationState)> {
        let psi1 = self.initial_state()?;
        Ok((
            quarter_wave_plate(self.qwp_a)?.apply(&psi1),
            quarter_wave_plate(self.qwp_b)?.apply(&psi1),
        ))
    }

    /// State right after the wave plates.
    pub fn marked(&self) -> Result<CompositeState> {
        mark_paths(
            &self.initial_state()?,
            &quarter_wave_plate(self.qwp_a)?,
            &quarter_wave_plate(self.qwp_b)?,
        )
    }

    /// State arriving at the screen.
    pub fn output(&self) -> Result<CompositeState> {
        let marked = self.marked()?;
        match self.theta2 {
            Some(t2) => erase(&marked, t2),
            None => Ok(marked),
        }
    }

    pub fn fringe_law(&self, k: f64) -> Result<FringeLaw> {
        fringe_law(&self.output()?, k)
    }

    /// Pancharatnam phase `arg(<A|B><B|2><2|A>)` of this setup.
    pub fn pancharatnam_phase(&self) -> Result<f64> {
        let theta2 = self
            .theta2
            .ok_or(Error::UndefinedPhase("no eraser polarizer in the setup"))?;
        let (a, b) = self.marker_states()?;
        pancharatnam_phase(&a, &b, &linear_polarization(theta2)?)
    }
}

/// Pancharatnam phase of the standard setup at polarizer angles
/// `(theta1, theta2)`.
///
/// Evaluated from the triple product, not from `2 atan(tan t1 tan t2)`: the
/// closed form is singular at `theta1 = pi/2` and differs by `pi` wherever
/// `cos 2 theta1 < 0`. Undefined at `theta1 = pi/4 (mod pi/2)`, where the
/// marker states are orthogonal.
pub fn pancharatnam_from_angles(theta1: f64, theta2: f64) -> Result<f64> {
    Apparatus::new(theta1, Some(theta2)).pancharatnam_phase()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close_mod_tau(a: f64, b: f64, tol: f64) -> bool {
        wrap_angle(a - b).abs() <= tol
    }

    /// Closed form `2 atan(tan t1 tan t2)`, evaluated independently.
    fn closed_form(t1: f64, t2: f64) -> f64 {
        2.0 * (t1.tan() * t2.tan()).atan()
    }

    const K: f64 = 1181.0;

    #[test]
    fn wave_number_values() {
        let g = ScreenGeometry::new(100e-6, 532e-9, 1.0).unwrap();
        assert_abs_diff_eq!(g.fringe_period(), 5.32e-3, epsilon = 1e-15);
        assert_abs_diff_eq!(wave_number(&g), 1_181.049_869_770_599, epsilon = 1e-9);
        let g2 = ScreenGeometry::new(200e-6, 532e-9, 1.0).unwrap();
        assert_abs_diff_eq!(wave_number(&g2), 2.0 * wave_number(&g), epsilon = 1e-9);
        let g3 = ScreenGeometry::new(1e-3, 532e-9, 1.0).unwrap();
        assert_abs_diff_eq!(g3.fringe_period(), 0.532e-3, epsilon = 1e-15);
    }

    #[test]
    fn geometry_rejects_bad_input() {
        assert!(ScreenGeometry::new(0.0, 532e-9, 1.0).is_err());
        assert!(ScreenGeometry::new(1e-4, -1.0, 1.0).is_err());
        assert!(ScreenGeometry::new(1e-4, 532e-9, f64::NAN).is_err());
        // ordering lambda < d < L
        assert!(ScreenGeometry::new(1e-7, 532e-9, 1.0).is_err());
        assert!(ScreenGeometry::new(2.0, 532e-9, 1.0).is_err());
    }

    #[test]
    fn marking_diagonal_gives_circular_branches() {
        let s = Apparatus::new(FRAC_PI_4, None).marked().unwrap();
        assert!(s
            .branch_a
            .approx_eq(&PolarizationState::new(c(0.5, 0.0), c(0.0, 0.5)), 1e-15));
        assert!(s
            .branch_b
            .approx_eq(&PolarizationState::new(c(0.0, 0.5), c(0.5, 0.0)), 1e-15));
        assert_abs_diff_eq!(s.branch_a.norm(), s.branch_b.norm(), epsilon = 1e-15);
    }

    #[test]
    fn marking_horizontal_is_phase_only() {
        let s = Apparatus::new(0.0, None).marked().unwrap();
        assert!(s.branch_a.approx_eq(
            &PolarizationState::new(c(FRAC_1_SQRT_2, 0.0), c(0.0, 0.0)),
            1e-15
        ));
        assert!(s.branch_b.approx_eq(
            &PolarizationState::new(c(0.0, FRAC_1_SQRT_2), c(0.0, 0.0)),
            1e-15
        ));
    }

    #[test]
    fn identity_markers_reproduce_young() {
        let psi = linear_polarization(0.3).unwrap();
        let id = ElementOperator::identity();
        let s = mark_paths(&psi, &id, &id).unwrap();
        let half = psi.scale(c(FRAC_1_SQRT_2, 0.0));
        assert!(s.branch_a.approx_eq(&half, 1e-15));
        assert!(s.branch_b.approx_eq(&half, 1e-15));
        let law = fringe_law(&s, K).unwrap();
        assert_abs_diff_eq!(law.visibility(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(law.phase().unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn marking_rejects_lossy_markers_and_bad_input() {
        let psi = linear_polarization(0.3).unwrap();
        let p = polarizer(0.0).unwrap();
        let id = ElementOperator::identity();
        assert!(mark_paths(&psi, &p, &id).is_err());
        assert!(mark_paths(&psi.scale(c(2.0, 0.0)), &id, &id).is_err());
    }

    #[test]
    fn erase_examples() {
        let m = Apparatus::new(FRAC_PI_4, None).marked().unwrap();
        let f = erase(&m, 0.0).unwrap();
        assert_abs_diff_eq!(f.branch_a.norm(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f.branch_b.norm(), 0.5, epsilon = 1e-15);
        let twice = erase(&f, 0.0).unwrap();
        assert!(twice.branch_a.approx_eq(&f.branch_a, 1e-15));
        assert!(twice.branch_b.approx_eq(&f.branch_b, 1e-15));

        let zero = erase(&Apparatus::new(0.0, None).marked().unwrap(), FRAC_PI_2).unwrap();
        assert!(zero.is_empty());
        assert_eq!(fringe_law(&zero, K), Err(Error::EmptyState));
    }

    #[test]
    fn erase_branch_norms_follow_overlaps() {
        for (t1, t2) in [(0.2, 1.0), (1.3, -0.4), (2.5, 2.0)] {
            let app = Apparatus::new(t1, Some(t2));
            let (a, b) = app.marker_states().unwrap();
            let psi2 = linear_polarization(t2).unwrap();
            let out = app.output().unwrap();
            assert_abs_diff_eq!(
                out.branch_a.norm(),
                inner_product(&psi2, &a).norm() * FRAC_1_SQRT_2,
                epsilon = 1e-15
            );
            assert_abs_diff_eq!(
                out.branch_b.norm(),
                inner_product(&psi2, &b).norm() * FRAC_1_SQRT_2,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn marked_fringe_follows_marker_overlap() {
        let law = Apparatus::new(FRAC_PI_4, None).fringe_law(K).unwrap();
        assert!(law.visibility() <= 1e-12);
        assert!(matches!(law.phase(), Err(Error::UndefinedPhase(_))));

        // <B|A> = -i cos 2 t1
        for j in 0..=180 {
            let t1 = (j as f64).to_radians();
            if j == 45 || j == 135 {
                continue;
            }
            let law = Apparatus::new(t1, None).fringe_law(K).unwrap();
            let cos2 = (2.0 * t1).cos();
            assert_abs_diff_eq!(law.visibility(), cos2.abs(), epsilon = 1e-14);
            let expected = if cos2 > 0.0 { -FRAC_PI_2 } else { FRAC_PI_2 };
            assert_abs_diff_eq!(law.phase().unwrap(), expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn eraser_restores_full_visibility() {
        for j in 0..=36 {
            let t2 = (j as f64 * 5.0).to_radians();
            let law = Apparatus::new(FRAC_PI_4, Some(t2)).fringe_law(K).unwrap();
            assert_abs_diff_eq!(law.visibility(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn eraser_visibility_formula() {
        // V_f = 2|cA||cB| / (|cA|^2 + |cB|^2)
        for (t1, t2) in [(0.1, 0.2), (0.7, 1.4), (1.2, 2.9)] {
            let app = Apparatus::new(t1, Some(t2));
            let (a, b) = app.marker_states().unwrap();
            let psi2 = linear_polarization(t2).unwrap();
            let (ca, cb) = (
                inner_product(&psi2, &a).norm(),
                inner_product(&psi2, &b).norm(),
            );
            let law = app.fringe_law(K).unwrap();
            assert_abs_diff_eq!(
                law.visibility(),
                2.0 * ca * cb / (ca * ca + cb * cb),
                epsilon = 1e-14
            );
            let df = (inner_product(&b, &psi2) * inner_product(&psi2, &a)).arg();
            assert!(close_mod_tau(law.phase().unwrap(), df, 1e-14));
        }
    }

    #[test]
    fn profile_extremes() {
        let law = FringeLaw::new(1.0, Some(0.0), K, 2.0).unwrap();
        let xs = [0.0, PI / K, 0.5 * PI / K];
        let ys = intensity_profile(&law, &xs, &Envelope::Flat).unwrap();
        assert_abs_diff_eq!(ys[0], 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ys[1], 0.0, epsilon = 1e-15);
        assert!(ys.iter().all(|&y| y >= 0.0 && y <= ys[0]));

        let flat = FringeLaw::new(0.0, None, K, 1.0).unwrap();
        let env = Envelope::gaussian(5e-3).unwrap();
        let xs: Vec<f64> = (-50..=50).map(|i| i as f64 * 3e-4).collect();
        let ys = intensity_profile(&flat, &xs, &env).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert_abs_diff_eq!(*y, env.weight(*x), epsilon = 1e-15);
        }
    }

    #[test]
    fn phase_is_a_spatial_shift() {
        let delta = 1.1;
        let shifted = FringeLaw::new(0.6, Some(delta), K, 1.0).unwrap();
        let origin = FringeLaw::new(0.6, Some(0.0), K, 1.0).unwrap();
        for i in -20..20 {
            let x = i as f64 * 1.7e-4;
            assert_abs_diff_eq!(
                shifted.fringe(x),
                origin.fringe(x - delta / K),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn envelope_sigma_must_be_positive() {
        assert!(Envelope::gaussian(0.0).is_err());
        assert!(Envelope::gaussian(-1.0).is_err());
        let law = FringeLaw::new(0.5, Some(0.0), K, 1.0).unwrap();
        assert!(intensity_profile(&law, &[0.0], &Envelope::Gaussian { sigma: -2.0 }).is_err());
    }

    #[test]
    fn fringe_law_validation() {
        assert!(FringeLaw::new(1.5, None, K, 1.0).is_err());
        assert!(FringeLaw::new(0.5, None, 0.0, 1.0).is_err());
        assert!(FringeLaw::new(0.5, Some(f64::NAN), K, 1.0).is_err());
        assert_abs_diff_eq!(
            FringeLaw::new(0.5, Some(3.0 * PI / 2.0), K, 1.0)
                .unwrap()
                .delta()
                .unwrap(),
            -FRAC_PI_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn pancharatnam_examples() {
        assert_abs_diff_eq!(
            pancharatnam_from_angles(0.0, 0.7).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        let t = 30f64.to_radians();
        assert_abs_diff_eq!(
            pancharatnam_from_angles(t, t).unwrap(),
            2.0 * (1.0f64 / 3.0).atan(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            2.0 * (1.0f64 / 3.0).atan(),
            0.6435011087932844,
            epsilon = 1e-15
        );
        assert!(matches!(
            pancharatnam_from_angles(FRAC_PI_4, 0.3),
            Err(Error::UndefinedPhase(_))
        ));
        assert!(matches!(
            pancharatnam_from_angles(3.0 * FRAC_PI_4, 0.3),
            Err(Error::UndefinedPhase(_))
        ));
    }

    #[test]
    fn pancharatnam_branch_across_ninety_degrees() {
        let t2 = 9f64.to_radians();
        let (below, above) = (85f64.to_radians(), 95f64.to_radians());
        // closed form on its principal branch
        assert_abs_diff_eq!(closed_form(below, t2), 2.1322528169856776, epsilon = 1e-12);
        assert_abs_diff_eq!(closed_form(above, t2), -2.1322528169856767, epsilon = 1e-12);
        // cos 2 t1 < 0 on both sides, so the triple product sits pi away
        let tp_below = pancharatnam_from_angles(below, t2).unwrap();
        let tp_above = pancharatnam_from_angles(above, t2).unwrap();
        assert!(close_mod_tau(tp_below, closed_form(below, t2) + PI, 1e-12));
        assert!(close_mod_tau(tp_above, closed_form(above, t2) + PI, 1e-12));
        assert_abs_diff_eq!(tp_below, -1.0093398366041155, epsilon = 1e-12);
        assert_abs_diff_eq!(tp_above, 1.0093398366041164, epsilon = 1e-12);
        // principal-branch jump of the closed form, in periods
        let jump = (closed_form(below, t2) - closed_form(above, t2)) / TAU;
        assert_abs_diff_eq!(jump, 0.679, epsilon = 1e-3);
    }

    proptest! {
        #[test]
        fn triple_product_matches_closed_form(t1 in 0.0..PI, t2 in 0.0..PI) {
            prop_assume!(((2.0 * t1).cos()).abs() > 1e-3);
            if let Ok(phase) = pancharatnam_from_angles(t1, t2) {
                let branch = if (2.0 * t1).cos() < 0.0 { PI } else { 0.0 };
                prop_assert!(close_mod_tau(phase, closed_form(t1, t2) + branch, 1e-9));
            }
        }

        #[test]
        fn net_phase_is_pancharatnam(t1 in 0.0..PI, t2 in 0.0..PI) {
            let marked = Apparatus::new(t1, None).fringe_law(K).unwrap();
            let erased = Apparatus::new(t1, Some(t2)).fringe_law(K);
            if let (Ok(dm), Ok(Ok(df)), Ok(p)) = (marked.phase(), erased.map(|l| l.phase()), pancharatnam_from_angles(t1, t2)) {
                prop_assert!(close_mod_tau(df - dm, p, 1e-9));
            }
        }

        #[test]
        fn displacement_relative_to_horizontal_eraser(t1 in 0.0..PI, t2 in 0.0..PI) {
            // delta_f(t1, t2) - delta_f(t1, 0) is the closed form on the continuous branch
            let f = Apparatus::new(t1, Some(t2)).fringe_law(K).unwrap();
            let r = Apparatus::new(t1, Some(0.0)).fringe_law(K).unwrap();
            if let (Ok(df), Ok(dr)) = (f.phase(), r.phase()) {
                prop_assert!(close_mod_tau(df - dr, closed_form(t1, t2), 1e-9));
            }
        }

        #[test]
        fn marking_visibility_is_overlap(t1 in -PI..PI, qa in -PI..PI, qb in -PI..PI) {
            let app = Apparatus::new(t1, None).with_markers(qa, qb);
            let (a, b) = app.marker_states().unwrap();
            let law = app.fringe_law(K).unwrap();
            prop_assert!((law.visibility() - inner_product(&b, &a).norm()).abs() < 1e-12);
        }

        #[test]
        fn sum_rule_for_orthogonal_erasers(t1 in 0.0..PI, t2 in 0.0..PI, x in -0.015..0.015f64) {
            let env = Envelope::gaussian(5e-3).unwrap();
            let marked = Apparatus::new(t1, None).fringe_law(K).unwrap();
            let mut sum = 0.0;
            for t in [t2, t2 + FRAC_PI_2] {
                match Apparatus::new(t1, Some(t)).fringe_law(K) {
                    Ok(law) => sum += law.intensity(x, &env),
                    Err(Error::EmptyState) => {}
                    Err(e) => panic!("{e}"),
                }
            }
            prop_assert!((sum - marked.intensity(x, &env)).abs() < 1e-12);
        }

        #[test]
        fn branch_phase_leaves_visibility(t1 in 0.0..PI, t2 in 0.0..PI, phi in -PI..PI) {
            let out = Apparatus::new(t1, Some(t2)).output().unwrap();
            prop_assume!(!out.is_empty());
            let moved = CompositeState::new(out.branch_a.with_phase(phi), out.branch_b);
            let (l0, l1) = (fringe_law(&out, K).unwrap(), fringe_law(&moved, K).unwrap());
            prop_assert!((l0.visibility() - l1.visibility()).abs() < 1e-12);
            if let (Some(d0), Some(d1)) = (l0.delta(), l1.delta()) {
                prop_assert!(close_mod_tau(d1 - d0, phi, 1e-9));
            }
            // and the triple product ignores the same redressing
            let (a, b) = Apparatus::new(t1, None).marker_states().unwrap();
            let psi2 = linear_polarization(t2).unwrap();
            if let Ok(p) = pancharatnam_phase(&a, &b, &psi2) {
                let q = pancharatnam_phase(&a.with_phase(phi), &b, &psi2).unwrap();
                prop_assert!(close_mod_tau(p, q, 1e-12));
            }
        }
    }
}

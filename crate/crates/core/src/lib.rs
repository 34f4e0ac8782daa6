//! Simulation of a double-slit interferometer whose photons carry a
//! polarization internal state.
//!
//! The crate is organised bottom-up:
//!
//! * [`jones`]: Jones vectors and the two optical elements used by the setup
//!   (linear polarizers and quarter-wave plates).
//! * [`poincare`]: Stokes mapping, the Pancharatnam (Bargmann) phase of three
//!   states and the signed solid angle of the matching geodesic triangle.
//! * [`interferometer`]: the path-polarization composite state, which-path
//!   marking, erasure by projection, and reduction to a [`FringeLaw`].
//! * [`fringe`]: recovering visibility and phase from sampled profiles or
//!   Monte-Carlo photon records, plus phase unwrapping.
//!
//! Angles are radians and lengths are metres throughout.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod fringe;
pub mod interferometer;
pub mod jones;
pub mod poincare;

mod error;

pub use error::{Error, Result};
pub use fringe::{
    extract_visibility_extrema, fit_fringe, histogram, normalized_displacement, sample_photons,
    unwrap_phase, FringeFit, PhotonRecord, SampledProfile,
};
pub use interferometer::{
    erase, fringe_law, intensity_profile, mark_paths, pancharatnam_from_angles, wave_number,
    Apparatus, CompositeState, Envelope, FringeLaw, ScreenGeometry,
};
pub use jones::{
    inner_product, linear_polarization, polarizer, quarter_wave_plate, ElementOperator,
    PolarizationState,
};
pub use poincare::{pancharatnam_phase, solid_angle, to_poincare, PoincarePoint, SolidAngle};

use std::f64::consts::{PI, TAU};

/// Maps an angle onto the principal branch (-pi, pi].
pub fn wrap_angle(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(TAU);
    if a > PI {
        a -= TAU;
    }
    a
}

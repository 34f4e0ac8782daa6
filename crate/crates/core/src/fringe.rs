//! Recovering fringe parameters from data.
//!
//! Two visibility estimators are provided. [`extract_visibility_extrema`] is
//! the contrast ratio `(Pmax - Pmin) / (Pmax + Pmin)` read off one period,
//! suitable for clean envelope-free profiles. [`fit_fringe`] is a linear
//! least-squares fit of `b0 E(x) (1 + V cos(kx - delta))` with `k` and the
//! envelope `E` known; it is the estimator to use on photon counts.
//!
//! Photon records are drawn by rejection sampling and are reproducible: the
//! draw is split into fixed-size partitions, partition `p` using the
//! ChaCha8 stream `p` of the user seed, so the output depends only on
//! `(seed, n)` and not on how many threads run.

use std::f64::consts::TAU;

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interferometer::{Envelope, FringeLaw, VISIBILITY_FLOOR};
use crate::wrap_angle;

/// Intensities (or counts) sampled at increasing screen positions.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledProfile {
    xs: Vec<f64>,
    ys: Vec<f64>,
    k: f64,
    envelope: Envelope,
    bin_width: Option<f64>,
}

impl SampledProfile {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, k: f64) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidArgument(format!(
                "{} positions but {} values",
                xs.len(),
                ys.len()
            )));
        }
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "k must be positive, got {k}"
            )));
        }
        if xs.iter().any(|x| !x.is_finite()) || xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "positions must be finite and strictly increasing".into(),
            ));
        }
        if ys.iter().any(|&y| !(y >= 0.0) || !y.is_finite()) {
            return Err(Error::InvalidArgument(
                "values must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            xs,
            ys,
            k,
            envelope: Envelope::Flat,
            bin_width: None,
        })
    }

    /// Samples `law` (times `envelope`) at `xs`.
    pub fn from_law(law: &FringeLaw, xs: Vec<f64>, envelope: Envelope) -> Result<Self> {
        let ys = crate::interferometer::intensity_profile(law, &xs, &envelope)?;
        Self::new(xs, ys, law.k())?.with_envelope(envelope)
    }

    /// Declares the envelope the data carries, used as a known factor by
    /// [`fit_fringe`].
    pub fn with_envelope(mut self, envelope: Envelope) -> Result<Self> {
        envelope.validate()?;
        self.envelope = envelope;
        Ok(self)
    }

    /// Declares that each value is an integral over a bin of width `h`
    /// centred on its position rather than a point sample.
    pub fn with_bin_width(mut self, h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "bin width must be positive, got {h}"
            )));
        }
        self.bin_width = Some(h);
        Ok(self)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn envelope(&self) -> Envelope {
        self.envelope
    }

    pub fn bin_width(&self) -> Option<f64> {
        self.bin_width
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn period(&self) -> f64 {
        TAU / self.k
    }

    /// Extent of the screen covered by the data, including half a bin at
    /// each end for binned profiles.
    pub fn span(&self) -> f64 {
        match (self.xs.first(), self.xs.last()) {
            (Some(a), Some(b)) => b - a + self.bin_width.unwrap_or(0.0),
            _ => 0.0,
        }
    }
}

/// Minimum number of samples per fringe period for the extrema estimator.
const MIN_SAMPLES_PER_PERIOD: f64 = 16.0;

/// Contrast `(Pmax - Pmin) / (Pmax + Pmin)` over the central period.
///
/// Each extremum is refined past the sample grid by passing the exact
/// sinusoid of known `k` through the extreme sample and its two neighbours,
/// so a noiseless flat-base profile is recovered to rounding error.
pub fn extract_visibility_extrema(p: &SampledProfile) -> Result<f64> {
    let period = p.period();
    let span = p.span();
    if p.len() < 3 || span < 2.0 * period * (1.0 - 1e-9) {
        return Err(Error::InsufficientData(format!(
            "profile spans {:.3} periods, need at least 2",
            span / period
        )));
    }
    if (p.len() as f64) < MIN_SAMPLES_PER_PERIOD * span / period * (1.0 - 1e-9) {
        return Err(Error::InsufficientData(format!(
            "need at least {MIN_SAMPLES_PER_PERIOD} samples per period"
        )));
    }

    let (xs, ys) = (p.xs(), p.ys());
    let centre = 0.5 * (xs[0] + xs[xs.len() - 1]);
    let in_window = |x: f64| (x - centre).abs() <= 0.5 * period;
    let central = || (0..xs.len()).filter(|&i| in_window(xs[i]));
    let imax = central()
        .max_by(|&a, &b| ys[a].total_cmp(&ys[b]))
        .ok_or(Error::EmptyProfile)?;
    let imin = central()
        .min_by(|&a, &b| ys[a].total_cmp(&ys[b]))
        .ok_or(Error::EmptyProfile)?;

    let p_max = refine_extremum(p, imax, 1.0);
    let p_min = refine_extremum(p, imin, -1.0);
    let sum = p_max + p_min;
    if !(sum > 0.0) {
        return Err(Error::EmptyProfile);
    }
    Ok(((p_max - p_min) / sum).max(0.0))
}

/// Peak (`sign = 1`) or trough (`sign = -1`) of the sinusoid through sample
/// `i` and its neighbours.
fn refine_extremum(p: &SampledProfile, i: usize, sign: f64) -> f64 {
    let (xs, ys, k) = (p.xs(), p.ys(), p.k());
    let mid = i.clamp(1, xs.len() - 2);
    let x0 = xs[i];
    let rows: Vec<f64> = (mid - 1..=mid + 1)
        .flat_map(|j| {
            let (s, c) = (k * (xs[j] - x0)).sin_cos();
            [1.0, c, s]
        })
        .collect();
    let a = Matrix3::from_row_slice(&rows);
    let b = Vector3::new(ys[mid - 1], ys[mid], ys[mid + 1]);
    match a.lu().solve(&b) {
        Some(sol) if sol.iter().all(|v| v.is_finite()) => sol[0] + sign * sol[1].hypot(sol[2]),
        _ => ys[i],
    }
}

/// Result of [`fit_fringe`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeFit {
    pub visibility: f64,
    /// `None` when the fitted visibility vanishes.
    pub delta: Option<f64>,
    pub base: f64,
}

impl FringeFit {
    pub fn phase(&self) -> Result<f64> {
        self.delta
            .ok_or(Error::UndefinedPhase("fitted visibility is zero"))
    }
}

// Gauss-Legendre nodes and weights on [-1/2, 1/2], weights summing to 1.
const GL_NODES: [f64; 5] = [
    -0.453_089_922_969_332_1,
    -0.269_234_655_052_841_5,
    0.0,
    0.269_234_655_052_841_5,
    0.453_089_922_969_332_1,
];
const GL_WEIGHTS: [f64; 5] = [
    0.118_463_442_528_094_5,
    0.239_314_335_249_683_2,
    0.284_444_444_444_444_4,
    0.239_314_335_249_683_2,
    0.118_463_442_528_094_5,
];

fn regressors(x: f64, k: f64, envelope: &Envelope, bin_width: Option<f64>) -> Vector3<f64> {
    let point = |x: f64| {
        let e = envelope.weight(x);
        let (s, c) = (k * x).sin_cos();
        Vector3::new(e, e * c, e * s)
    };
    match bin_width {
        None => point(x),
        Some(h) => GL_NODES
            .iter()
            .zip(GL_WEIGHTS)
            .map(|(&u, w)| point(x + u * h) * w)
            .sum(),
    }
}

/// Least-squares fit of `b0 E(x) (1 + V cos(kx - delta))` with `k` and `E`
/// taken from the profile.
pub fn fit_fringe(p: &SampledProfile) -> Result<FringeFit> {
    let period = p.period();
    if p.len() < 3 || p.span() < period * (1.0 - 1e-9) {
        return Err(Error::InsufficientData(format!(
            "profile spans {:.3} periods, need at least one",
            p.span() / period
        )));
    }
    let env = p.envelope();
    let mut gram = Matrix3::<f64>::zeros();
    let mut rhs = Vector3::<f64>::zeros();
    for (&x, &y) in p.xs().iter().zip(p.ys()) {
        let r = regressors(x, p.k(), &env, p.bin_width());
        gram += r * r.transpose();
        rhs += r * y;
    }

    let diag = gram.diagonal();
    if diag.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::InsufficientData(
            "design matrix has a zero column".into(),
        ));
    }
    let scale = diag.map(|d| 1.0 / d.sqrt());
    let scaled = Matrix3::from_fn(|i, j| gram[(i, j)] * scale[i] * scale[j]);
    let eig = scaled.symmetric_eigenvalues();
    if eig.min() < 1e-12 * eig.max() {
        return Err(Error::InsufficientData(
            "design matrix is rank deficient".into(),
        ));
    }
    let solved = scaled
        .cholesky()
        .ok_or_else(|| Error::InsufficientData("design matrix is not positive definite".into()))?
        .solve(&rhs.component_mul(&scale))
        .component_mul(&scale);

    let (base, cc, ss) = (solved[0], solved[1], solved[2]);
    if !(base > 0.0) {
        return Err(Error::EmptyProfile);
    }
    let visibility = cc.hypot(ss) / base;
    let delta = (visibility >= VISIBILITY_FLOOR).then(|| wrap_angle(ss.atan2(cc)));
    Ok(FringeFit {
        visibility,
        delta,
        base,
    })
}

/// Screen positions of detected photons.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonRecord {
    pub positions: Vec<f64>,
    pub seed: u64,
}

impl PhotonRecord {
    pub fn n(&self) -> usize {
        self.positions.len()
    }
}

/// Photons drawn per RNG partition.
pub const PARTITION_SIZE: usize = 1 << 15;

/// Proposals allowed per requested photon before giving up.
const MAX_PROPOSALS_PER_PHOTON: usize = 100_000;

fn check_window((lo, hi): (f64, f64)) -> Result<()> {
    if !lo.is_finite() || !hi.is_finite() || !(lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "window must be finite with lo < hi, got ({lo}, {hi})"
        )));
    }
    Ok(())
}

/// Draws `n` i.i.d. photon positions from `law * envelope` restricted to
/// `window`.
pub fn sample_photons(
    law: &FringeLaw,
    envelope: &Envelope,
    window: (f64, f64),
    n: usize,
    seed: u64,
) -> Result<PhotonRecord> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "photon count must be at least 1".into(),
        ));
    }
    check_window(window)?;
    envelope.validate()?;
    let peak = law.base() * envelope.max_on(window.0, window.1);
    if !(peak > f64::MIN_POSITIVE) {
        return Err(Error::EmptyState);
    }

    let partitions = n.div_ceil(PARTITION_SIZE);
    let chunks = (0..partitions)
        .into_par_iter()
        .map(|p| {
            let count = PARTITION_SIZE.min(n - p * PARTITION_SIZE);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(p as u64);
            sample_partition(law, envelope, window, count, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(PhotonRecord {
        positions: chunks.concat(),
        seed,
    })
}

fn sample_partition(
    law: &FringeLaw,
    envelope: &Envelope,
    (lo, hi): (f64, f64),
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    let v = law.visibility();
    let delta = law.delta().unwrap_or(0.0);
    let k = law.k();
    let fringe_accept = |x: f64| (1.0 + v * (k * x - delta).cos()) / (1.0 + v);

    // Propose from the Gaussian itself when the window holds most of its
    // mass; otherwise propose uniformly under the envelope's maximum.
    let gaussian = match *envelope {
        Envelope::Gaussian { sigma } if lo <= -2.0 * sigma && hi >= 2.0 * sigma => Some(sigma),
        _ => None,
    };
    let env_max = envelope.max_on(lo, hi);

    let mut out = Vec::with_capacity(count);
    let budget = count.saturating_mul(MAX_PROPOSALS_PER_PHOTON);
    let mut proposals = 0usize;
    while out.len() < count {
        proposals += 1;
        if proposals > budget {
            return Err(Error::EmptyState);
        }
        let (x, accept) = match gaussian {
            Some(sigma) => {
                let z: f64 = rng.sample(StandardNormal);
                let x = sigma * z;
                if x < lo || x >= hi {
                    continue;
                }
                (x, fringe_accept(x))
            }
            None => {
                let x = rng.random_range(lo..hi);
                (x, envelope.weight(x) / env_max * fringe_accept(x))
            }
        };
        if rng.random::<f64>() < accept {
            out.push(x);
        }
    }
    Ok(out)
}

/// Counts photons in `bins` equal bins over `window`.
///
/// The resulting profile carries the bin width and `k`; positions outside
/// the window are dropped.
pub fn histogram(
    r: &PhotonRecord,
    bins: usize,
    window: (f64, f64),
    k: f64,
) -> Result<SampledProfile> {
    if r.positions.is_empty() {
        return Err(Error::EmptyProfile);
    }
    check_window(window)?;
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "k must be positive, got {k}"
        )));
    }
    let (lo, hi) = window;
    let width = hi - lo;
    let per_period = bins as f64 * (TAU / k) / width;
    if bins == 0 || per_period < 8.0 * (1.0 - 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "need at least 8 bins per fringe period, got {per_period:.2}"
        )));
    }
    let h = width / bins as f64;
    let mut counts = vec![0.0; bins];
    for &x in &r.positions {
        if x < lo || x > hi {
            continue;
        }
        let i = (((x - lo) / h) as usize).min(bins - 1);
        counts[i] += 1.0;
    }
    let xs = (0..bins).map(|i| lo + (i as f64 + 0.5) * h).collect();
    SampledProfile::new(xs, counts, k)?.with_bin_width(h)
}

/// Removes 2 pi jumps so consecutive outputs differ by at most pi.
///
/// The first element is unchanged. `NaN` entries (undefined phases) are
/// passed through and skipped; unwrapping resumes from the last finite
/// value.
pub fn unwrap_phase(deltas: &[f64]) -> Vec<f64> {
    let mut last: Option<f64> = None;
    deltas
        .iter()
        .map(|&d| {
            if !d.is_finite() {
                return f64::NAN;
            }
            let out = match last {
                None => d,
                Some(prev) => d - TAU * ((d - prev) / TAU).round(),
            };
            last = Some(out);
            out
        })
        .collect()
}

/// Fringe displacement `(delta - reference) / 2 pi` in periods; undefined
/// if either phase is.
pub fn normalized_displacement(delta: Option<f64>, reference: Option<f64>) -> Option<f64> {
    Some((delta? - reference?) / TAU)
}

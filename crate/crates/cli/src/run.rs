//! Experiment runners. Each returns the complete CSV text, headed by the
//! resolved scenario as `#` comment lines.

use std::f64::consts::TAU;

use eraser_core::{fit_fringe, histogram, sample_photons, unwrap_phase, wrap_angle, Apparatus};

use crate::error::{Error, Result};
use crate::scenario::{Mode, Scenario, SweepParam};

/// Runs the experiment selected by `s.mode`.
pub fn run(s: &Scenario) -> Result<String> {
    match s.mode {
        Mode::Profile => run_profile(s),
        Mode::Sweep => run_sweep(s),
        Mode::MonteCarlo => run_montecarlo(s),
    }
}

/// Intensity at `samples` evenly spaced points over the screen, scaled to a
/// peak of 1. The scale factor is recorded as `# intensity_scale=...`.
pub fn run_profile(s: &Scenario) -> Result<String> {
    let law = s.apparatus().fringe_law(s.k())?;
    let env = s.envelope();
    let h = s.screen_halfwidth_mm;
    let last = (s.samples - 1) as f64;
    let rows: Vec<(f64, f64)> = (0..s.samples)
        .map(|i| {
            let x_mm = -h + 2.0 * h * i as f64 / last;
            (x_mm, law.intensity(x_mm * 1e-3, &env))
        })
        .collect();
    let peak = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    if peak <= 0.0 || peak.is_nan() {
        return Err(Error::Runtime("profile carries no intensity".into()));
    }

    let mut out = header(s);
    out.push_str(&format!("# intensity_scale={}\n", num(peak)));
    out.push_str(&table(
        &["x_mm", "intensity"],
        rows.iter().map(|&(x, y)| vec![num(x), num(y / peak)]),
    ));
    Ok(out)
}

/// One row of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub angle_deg: f64,
    /// Unwrapped fringe phase relative to the reference; `NaN` if undefined.
    pub delta_rad: f64,
    /// `delta_rad / 2 pi`.
    pub displacement_periods: f64,
    pub visibility: f64,
}

/// Fringe phase and visibility, or `None` when the phase is undefined
/// (vanishing visibility, or nothing reaches the screen).
fn phase_at(app: Apparatus, k: f64) -> Result<Option<(f64, f64)>> {
    match app.fringe_law(k) {
        Ok(law) => Ok(law.delta().map(|d| (d, law.visibility()))),
        Err(eraser_core::Error::EmptyState) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Computes the sweep rows of `s`.
///
/// The zero of the displacement is the fringe position with the swept angle
/// at 0 degrees (the other angle held), falling back to both polarizers at
/// 0 degrees if that phase is undefined. The first defined row lies within
/// half a period of the zero; later rows follow by continuity.
pub fn sweep_rows(s: &Scenario) -> Result<Vec<SweepRow>> {
    let sweep = s
        .sweep
        .ok_or_else(|| Error::Config("sweep mode needs a sweep specification".into()))?;
    let k = s.k();
    let base = s.apparatus();
    let set = |deg: f64| {
        let mut app = base;
        match sweep.param {
            SweepParam::Theta1 => app.theta1 = deg.to_radians(),
            SweepParam::Theta2 => app.theta2 = Some(deg.to_radians()),
        }
        app
    };

    let mut fallback = base;
    fallback.theta1 = 0.0;
    fallback.theta2 = base.theta2.map(|_| 0.0);
    let reference = match phase_at(set(0.0), k)? {
        Some((d, _)) => d,
        None => {
            phase_at(fallback, k)?
                .ok_or_else(|| Error::Runtime("reference fringe phase is undefined".into()))?
                .0
        }
    };

    let angles = sweep.angles();
    let points = angles
        .iter()
        .map(|&a| phase_at(set(a), k))
        .collect::<Result<Vec<_>>>()?;
    let raw: Vec<f64> = points.iter().map(|p| p.map_or(f64::NAN, |p| p.0)).collect();
    let mut unwrapped = unwrap_phase(&raw);
    if let Some(first) = unwrapped.iter().find(|d| d.is_finite()).copied() {
        let shift = wrap_angle(first - reference) - first;
        unwrapped.iter_mut().for_each(|d| *d += shift);
    }

    Ok(angles
        .iter()
        .zip(&points)
        .zip(&unwrapped)
        .map(|((&angle_deg, p), &delta_rad)| SweepRow {
            angle_deg,
            delta_rad,
            displacement_periods: delta_rad / TAU,
            visibility: p.map_or(0.0, |p| p.1),
        })
        .collect())
}

pub fn run_sweep(s: &Scenario) -> Result<String> {
    let rows = sweep_rows(s)?;
    let mut out = header(s);
    out.push_str(&table(
        &[
            "angle_deg",
            "delta_rad",
            "displacement_periods",
            "visibility",
        ],
        rows.iter().map(|r| {
            vec![
                num(r.angle_deg),
                num(r.delta_rad),
                num(r.displacement_periods),
                num(r.visibility),
            ]
        }),
    ));
    Ok(out)
}

/// Photon counts in `samples` bins over the screen, followed by a fit of
/// the fringe law to those counts.
pub fn run_montecarlo(s: &Scenario) -> Result<String> {
    if s.photons == 0 {
        return Err(Error::Config("montecarlo mode needs photons >= 1".into()));
    }
    let k = s.k();
    let law = s.apparatus().fringe_law(k)?;
    let env = s.envelope();
    let window = s.window();
    let record = sample_photons(&law, &env, window, s.photons as usize, s.seed)?;
    let counts = histogram(&record, s.samples, window, k)?.with_envelope(env)?;
    let fit = fit_fringe(&counts)?;

    let mut out = header(s);
    out.push_str(&table(
        &["bin_center_mm", "counts"],
        counts
            .xs()
            .iter()
            .zip(counts.ys())
            .map(|(x, c)| vec![num(x * 1e3), (*c as u64).to_string()]),
    ));
    out.push_str(&format!(
        "# fitted_V={}, fitted_delta_rad={}, seed={}\n",
        num(fit.visibility),
        num(fit.delta.unwrap_or(f64::NAN)),
        s.seed
    ));
    Ok(out)
}

fn header(s: &Scenario) -> String {
    s.to_text().lines().map(|l| format!("# {l}\n")).collect()
}

/// Shortest round-tripping decimal; undefined values print as `nan`.
fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        x.to_string()
    }
}

fn table(columns: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns).expect("writing to memory");
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("ascii output")
}

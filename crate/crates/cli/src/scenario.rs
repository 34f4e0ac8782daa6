//! Scenario files: line-oriented `key = value` text with `#` comments.

use std::collections::HashMap;
use std::fmt;

use eraser_core::{Apparatus, Envelope, ScreenGeometry};

use crate::error::ParseError;

/// Every recognised key, in the order used when writing a scenario back out.
pub const KEYS: [&str; 14] = [
    "mode",
    "theta1_deg",
    "theta2_deg",
    "qwp_a_deg",
    "qwp_b_deg",
    "wavelength_nm",
    "slit_separation_um",
    "screen_distance_m",
    "screen_halfwidth_mm",
    "samples",
    "envelope_sigma_mm",
    "photons",
    "seed",
    "sweep",
];

const REQUIRED: [&str; 6] = [
    "theta1_deg",
    "theta2_deg",
    "wavelength_nm",
    "slit_separation_um",
    "screen_distance_m",
    "samples",
];

const MIN_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Profile,
    Sweep,
    MonteCarlo,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Profile => "profile",
            Mode::Sweep => "sweep",
            Mode::MonteCarlo => "montecarlo",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Theta1,
    Theta2,
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::Theta1 => "theta1",
            SweepParam::Theta2 => "theta2",
        })
    }
}

/// `steps` equally spaced angles from `start_deg` to `stop_deg` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub start_deg: f64,
    pub stop_deg: f64,
    pub steps: usize,
}

impl Sweep {
    pub fn angles(&self) -> Vec<f64> {
        let span = self.stop_deg - self.start_deg;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| self.start_deg + span * i as f64 / last)
            .collect()
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}, {}, {}, {}",
            self.param, self.start_deg, self.stop_deg, self.steps
        )
    }
}

/// A fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub theta1_deg: f64,
    /// `None` removes the eraser polarizer.
    pub theta2_deg: Option<f64>,
    pub qwp_a_deg: f64,
    pub qwp_b_deg: f64,
    pub wavelength_nm: f64,
    pub slit_separation_um: f64,
    pub screen_distance_m: f64,
    pub screen_halfwidth_mm: f64,
    pub samples: usize,
    /// `None` for a flat envelope.
    pub envelope_sigma_mm: Option<f64>,
    pub photons: u64,
    pub seed: u64,
    pub sweep: Option<Sweep>,
    pub mode: Mode,
}

impl Scenario {
    pub fn geometry(&self) -> ScreenGeometry {
        ScreenGeometry::new(
            self.slit_separation_um * 1e-6,
            self.wavelength_nm * 1e-9,
            self.screen_distance_m,
        )
        .expect("geometry is validated on parse")
    }

    pub fn k(&self) -> f64 {
        eraser_core::wave_number(&self.geometry())
    }

    pub fn apparatus(&self) -> Apparatus {
        Apparatus::new(
            self.theta1_deg.to_radians(),
            self.theta2_deg.map(f64::to_radians),
        )
        .with_markers(self.qwp_a_deg.to_radians(), self.qwp_b_deg.to_radians())
    }

    pub fn envelope(&self) -> Envelope {
        Envelope::from_sigma(self.envelope_sigma_mm.map(|s| s * 1e-3))
            .expect("sigma is validated on parse")
    }

    /// Screen window in metres.
    pub fn window(&self) -> (f64, f64) {
        let h = self.screen_halfwidth_mm * 1e-3;
        (-h, h)
    }

    /// Scenario text that parses back to `self`.
    pub fn to_text(&self) -> String {
        let none_or = |v: Option<f64>| v.map_or("none".to_string(), |x| x.to_string());
        let lines = [
            ("mode", self.mode.to_string()),
            ("theta1_deg", self.theta1_deg.to_string()),
            ("theta2_deg", none_or(self.theta2_deg)),
            ("qwp_a_deg", self.qwp_a_deg.to_string()),
            ("qwp_b_deg", self.qwp_b_deg.to_string()),
            ("wavelength_nm", self.wavelength_nm.to_string()),
            ("slit_separation_um", self.slit_separation_um.to_string()),
            ("screen_distance_m", self.screen_distance_m.to_string()),
            ("screen_halfwidth_mm", self.screen_halfwidth_mm.to_string()),
            ("samples", self.samples.to_string()),
            ("envelope_sigma_mm", none_or(self.envelope_sigma_mm)),
            ("photons", self.photons.to_string()),
            ("seed", self.seed.to_string()),
            (
                "sweep",
                self.sweep.map_or("none".to_string(), |s| s.to_string()),
            ),
        ];
        lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

/// Where a value came from, for error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    CommandLine,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::CommandLine => f.write_str("command line"),
        }
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    parse_with_overrides(text, &[])
}

/// Parses `text`, then applies `overrides` (key, value) pairs on top of it.
pub fn parse_with_overrides(
    text: &str,
    overrides: &[(&str, &str)],
) -> Result<Scenario, ParseError> {
    let mut entries: HashMap<String, (String, Origin)> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let origin = Origin::Line(i + 1);
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ParseError::new(
                origin,
                None,
                format!("expected 'key = value', got '{line}'"),
            ));
        };
        let key = key.trim();
        check_key(key, origin)?;
        if let Some((_, first)) = entries.get(key) {
            return Err(ParseError::new(
                origin,
                Some(key),
                format!("duplicate key, first set on {first}"),
            ));
        }
        entries.insert(key.to_string(), (value.trim().to_string(), origin));
    }
    for &(key, value) in overrides {
        check_key(key, Origin::CommandLine)?;
        entries.insert(
            key.to_string(),
            (value.trim().to_string(), Origin::CommandLine),
        );
    }
    resolve(&entries)
}

fn check_key(key: &str, origin: Origin) -> Result<(), ParseError> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(ParseError::new(
            origin,
            None,
            format!("unknown key '{key}'"),
        ))
    }
}

struct Entries<'a>(&'a HashMap<String, (String, Origin)>);

impl Entries<'_> {
    fn origin(&self, key: &str) -> Option<Origin> {
        self.0.get(key).map(|(_, o)| *o)
    }

    /// Parses `key` with `f`, or returns `default` when absent.
    fn get<T>(
        &self,
        key: &str,
        default: Option<T>,
        f: impl Fn(&str) -> Result<T, String>,
    ) -> Result<T, ParseError> {
        match self.0.get(key) {
            Some((value, origin)) => {
                f(value).map_err(|msg| ParseError::new(*origin, Some(key), msg))
            }
            None => default.ok_or_else(|| ParseError::missing(key)),
        }
    }
}

fn is_none(v: &str) -> bool {
    v.eq_ignore_ascii_case("none")
}

fn real(v: &str) -> Result<f64, String> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("expected a finite number, got '{v}'")),
    }
}

fn positive(v: &str) -> Result<f64, String> {
    let x = real(v)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("must be positive, got {x}"))
    }
}

fn unsigned(v: &str) -> Result<u64, String> {
    v.parse::<u64>()
        .map_err(|_| format!("expected a non-negative integer, got '{v}'"))
}

fn optional(f: fn(&str) -> Result<f64, String>) -> impl Fn(&str) -> Result<Option<f64>, String> {
    move |v| if is_none(v) { Ok(None) } else { f(v).map(Some) }
}

fn mode(v: &str) -> Result<Mode, String> {
    match v {
        "profile" => Ok(Mode::Profile),
        "sweep" => Ok(Mode::Sweep),
        "montecarlo" => Ok(Mode::MonteCarlo),
        _ => Err(format!("expected profile, sweep or montecarlo, got '{v}'")),
    }
}

fn sweep(v: &str) -> Result<Option<Sweep>, String> {
    if is_none(v) {
        return Ok(None);
    }
    let parts: Vec<&str> = v
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
        .collect();
    let [param, start, stop, steps] = parts[..] else {
        return Err(format!(
            "expected 'theta1|theta2, start, stop, steps', got '{v}'"
        ));
    };
    let param = match param {
        "theta1" => SweepParam::Theta1,
        "theta2" => SweepParam::Theta2,
        _ => {
            return Err(format!(
                "sweep parameter must be theta1 or theta2, got '{param}'"
            ))
        }
    };
    let steps = unsigned(steps)? as usize;
    if steps < 2 {
        return Err(format!("sweep needs at least 2 steps, got {steps}"));
    }
    Ok(Some(Sweep {
        param,
        start_deg: real(start)?,
        stop_deg: real(stop)?,
        steps,
    }))
}

fn resolve(map: &HashMap<String, (String, Origin)>) -> Result<Scenario, ParseError> {
    let e = Entries(map);
    if let Some(key) = REQUIRED.iter().find(|k| !map.contains_key(**k)) {
        return Err(ParseError::missing(key));
    }
    let samples = e.get("samples", None, |v| {
        let n = unsigned(v)? as usize;
        if n < MIN_SAMPLES {
            Err(format!("must be at least {MIN_SAMPLES}, got {n}"))
        } else {
            Ok(n)
        }
    })?;
    let s = Scenario {
        theta1_deg: e.get("theta1_deg", None, real)?,
        theta2_deg: e.get("theta2_deg", None, optional(real))?,
        qwp_a_deg: e.get("qwp_a_deg", Some(0.0), real)?,
        qwp_b_deg: e.get("qwp_b_deg", Some(90.0), real)?,
        wavelength_nm: e.get("wavelength_nm", None, positive)?,
        slit_separation_um: e.get("slit_separation_um", None, positive)?,
        screen_distance_m: e.get("screen_distance_m", None, positive)?,
        screen_halfwidth_mm: e.get("screen_halfwidth_mm", Some(15.0), positive)?,
        samples,
        envelope_sigma_mm: e.get("envelope_sigma_mm", Some(Some(5.0)), optional(positive))?,
        photons: e.get("photons", Some(0), unsigned)?,
        seed: e.get("seed", Some(0), unsigned)?,
        sweep: e.get("sweep", Some(None), sweep)?,
        mode: e.get("mode", Some(Mode::Profile), mode)?,
    };

    match (s.mode, s.sweep.is_some()) {
        (Mode::Sweep, false) => {
            let origin = e.origin("mode");
            return Err(ParseError::at(
                origin,
                "sweep",
                "mode = sweep needs a sweep specification",
            ));
        }
        (m, true) if m != Mode::Sweep => {
            let origin = e.origin("sweep");
            return Err(ParseError::at(
                origin,
                "sweep",
                format!("sweep given but mode = {m}"),
            ));
        }
        _ => {}
    }
    if let Err(err) = ScreenGeometry::new(
        s.slit_separation_um * 1e-6,
        s.wavelength_nm * 1e-9,
        s.screen_distance_m,
    ) {
        let origin = e.origin("slit_separation_um");
        return Err(ParseError::at(
            origin,
            "slit_separation_um",
            err.to_string(),
        ));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "theta1_deg = 45\ntheta2_deg = 0\nwavelength_nm = 532\n\
        slit_separation_um = 100\nscreen_distance_m = 1\nscreen_halfwidth_mm = 15\nsamples = 1024";

    #[test]
    fn minimal_profile() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.mode, Mode::Profile);
        assert_eq!(s.theta2_deg, Some(0.0));
        assert_eq!((s.qwp_a_deg, s.qwp_b_deg), (0.0, 90.0));
        assert_eq!(s.photons, 0);
        assert_eq!(s.envelope_sigma_mm, Some(5.0));
        assert_eq!(s.sweep, None);
    }

    #[test]
    fn unknown_key() {
        let text = "theta1_deg = 45\nbogus = 1\n";
        let err = parse_scenario(text).unwrap_err();
        assert_eq!(err.to_string(), "line 2: unknown key 'bogus'");
    }

    #[test]
    fn eraser_removed() {
        let s = parse_scenario(&MINIMAL.replace("theta2_deg = 0", "theta2_deg = none")).unwrap();
        assert_eq!(s.theta2_deg, None);
        assert_eq!(s.apparatus().theta2, None);
    }

    #[test]
    fn comments_and_crlf() {
        let text = format!(
            "# header\r\n{}\r\nseed = 7 # trailing\r\n\r\n",
            MINIMAL.replace('\n', "\r\n")
        );
        let s = parse_scenario(&text).unwrap();
        assert_eq!(s.seed, 7);
        assert_eq!(s.samples, 1024);
    }

    #[test]
    fn errors_name_line_and_key() {
        let cases = [
            (
                "samples = 1024",
                "samples = 10",
                "line 7: key 'samples': must be at least 64, got 10",
            ),
            (
                "theta1_deg = 45",
                "theta1_deg = abc",
                "line 1: key 'theta1_deg': expected a finite number, got 'abc'",
            ),
            (
                "wavelength_nm = 532",
                "wavelength_nm = -1",
                "line 3: key 'wavelength_nm': must be positive, got -1",
            ),
            (
                "screen_distance_m = 1",
                "screen_distance_m",
                "line 5: expected 'key = value', got 'screen_distance_m'",
            ),
        ];
        for (from, to, msg) in cases {
            let err = parse_scenario(&MINIMAL.replace(from, to)).unwrap_err();
            assert_eq!(err.to_string(), msg);
        }
        let err = parse_scenario(&MINIMAL.replace("samples = 1024", "")).unwrap_err();
        assert_eq!(err.to_string(), "missing required key 'samples'");
        let err = parse_scenario(&format!("{MINIMAL}\ntheta1_deg = 3")).unwrap_err();
        assert_eq!(
            err.to_string(),
            "line 8: key 'theta1_deg': duplicate key, first set on line 1"
        );
    }

    #[test]
    fn sweep_required_iff_sweep_mode() {
        let err = parse_scenario(&format!("{MINIMAL}\nmode = sweep")).unwrap_err();
        assert!(err.to_string().starts_with("line 8: key 'sweep'"), "{err}");
        let err = parse_scenario(&format!("{MINIMAL}\nsweep = theta1, 0, 180, 181")).unwrap_err();
        assert!(err.to_string().contains("mode = profile"), "{err}");
        let s =
            parse_scenario(&format!("{MINIMAL}\nmode = sweep\nsweep = theta2 0 90 91")).unwrap();
        let sw = s.sweep.unwrap();
        assert_eq!(sw.param, SweepParam::Theta2);
        assert_eq!(sw.angles().len(), 91);
        assert_eq!(sw.angles()[90], 90.0);
        let err = parse_scenario(&format!("{MINIMAL}\nmode = sweep\nsweep = theta1, 0, 1, 1"))
            .unwrap_err();
        assert!(err.to_string().contains("at least 2 steps"), "{err}");
    }

    #[test]
    fn geometry_checked() {
        let err = parse_scenario(
            &MINIMAL.replace("slit_separation_um = 100", "slit_separation_um = 0.1"),
        )
        .unwrap_err();
        assert!(
            err.to_string()
                .starts_with("line 4: key 'slit_separation_um'"),
            "{err}"
        );
    }

    #[test]
    fn overrides_take_precedence() {
        let s =
            parse_with_overrides(MINIMAL, &[("theta1_deg", "30"), ("theta2_deg", "none")]).unwrap();
        assert_eq!(s.theta1_deg, 30.0);
        assert_eq!(s.theta2_deg, None);
        let err = parse_with_overrides(MINIMAL, &[("samples", "3")]).unwrap_err();
        assert_eq!(
            err.to_string(),
            "command line: key 'samples': must be at least 64, got 3"
        );
        let err = parse_with_overrides(MINIMAL, &[("bogus", "3")]).unwrap_err();
        assert_eq!(err.to_string(), "command line: unknown key 'bogus'");
    }

    #[test]
    fn text_round_trip() {
        let text = format!(
            "{MINIMAL}\nmode = sweep\nsweep = theta1, 0, 180, 181\nenvelope_sigma_mm = none\n\
             qwp_b_deg = 89.5\nseed = 18446744073709551615\nwavelength_nm = 532.123456789"
        )
        .replace("wavelength_nm = 532\n", "");
        let s = parse_scenario(&text).unwrap();
        assert_eq!(parse_scenario(&s.to_text()).unwrap(), s);
    }
}

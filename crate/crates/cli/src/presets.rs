//! Built-in scenario sets: the eraser demonstration and the phase sweeps.
//!
//! All presets share a 532 nm source, a 1 m screen distance and a 100 um
//! slit separation (fringe period 5.32 mm).

use std::fmt;
use std::str::FromStr;

const SETUP: &str = "\
wavelength_nm = 532
slit_separation_um = 100
screen_distance_m = 1
screen_halfwidth_mm = 15
samples = 1024
envelope_sigma_mm = 5
";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Marked-only pattern and the two erased patterns at theta1 = 45.
    Fig6,
    /// The two complementary erased fringes, theta2 = 0 and 90.
    Fig7,
    /// theta1 swept 0..180 for theta2 in {45, 30, 18, 9}; zero at theta1 = 0.
    Fig8a,
    /// theta2 swept 0..180 for theta1 in {45, 30, 18, 9}; zero at theta2 = 0.
    Fig8b,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Fig6, Preset::Fig7, Preset::Fig8a, Preset::Fig8b];

    /// `(label, scenario text)` for each run of the preset.
    pub fn runs(self) -> Vec<(String, String)> {
        let profile = |label: &str, theta2: &str| {
            (
                label.to_string(),
                format!("theta1_deg = 45\ntheta2_deg = {theta2}\n{SETUP}"),
            )
        };
        let sweeps = |fixed: &str, swept: &str| {
            [45, 30, 18, 9].map(|a| {
                let (t1, t2) = if fixed == "theta1" { (a, 0) } else { (0, a) };
                (
                    format!("{self}_{fixed}_{a}"),
                    format!(
                        "mode = sweep\ntheta1_deg = {t1}\ntheta2_deg = {t2}\n\
                         sweep = {swept}, 0, 180, 181\n{SETUP}"
                    ),
                )
            })
        };
        match self {
            Preset::Fig6 => vec![
                profile("fig6_theta2_none", "none"),
                profile("fig6_theta2_0", "0"),
                profile("fig6_theta2_90", "90"),
            ],
            Preset::Fig7 => vec![
                profile("fig7_theta2_0", "0"),
                profile("fig7_theta2_90", "90"),
            ],
            Preset::Fig8a => sweeps("theta2", "theta1").to_vec(),
            Preset::Fig8b => sweeps("theta1", "theta2").to_vec(),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::Fig8a => "fig8a",
            Preset::Fig8b => "fig8b",
        })
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.to_string() == s)
            .ok_or_else(|| format!("unknown preset '{s}', expected fig6, fig7, fig8a or fig8b"))
    }
}

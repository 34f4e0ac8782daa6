use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser};

use eraser_cli::{parse_with_overrides, run, Error, Preset, Result};

/// Simulate a double-slit quantum eraser and write the result as CSV.
#[derive(Parser)]
#[command(name = "simulate", version)]
struct Cli {
    /// Scenario file of `key = value` lines.
    #[arg(required_unless_present = "preset", conflicts_with = "preset")]
    scenario: Option<PathBuf>,

    /// Built-in scenario set; `--out` is then a directory.
    #[arg(long)]
    preset: Option<Preset>,

    /// Output CSV file (directory for presets).
    #[arg(long)]
    out: PathBuf,

    #[command(flatten)]
    keys: KeyOverrides,
}

/// Scenario keys given on the command line; these win over the file.
#[derive(Args)]
#[command(next_help_heading = "Scenario keys")]
struct KeyOverrides {
    #[arg(long = "mode", value_name = "profile|sweep|montecarlo")]
    mode: Option<String>,
    #[arg(long = "theta1_deg", value_name = "DEG")]
    theta1_deg: Option<String>,
    #[arg(long = "theta2_deg", value_name = "DEG|none")]
    theta2_deg: Option<String>,
    #[arg(long = "qwp_a_deg", value_name = "DEG")]
    qwp_a_deg: Option<String>,
    #[arg(long = "qwp_b_deg", value_name = "DEG")]
    qwp_b_deg: Option<String>,
    #[arg(long = "wavelength_nm", value_name = "NM")]
    wavelength_nm: Option<String>,
    #[arg(long = "slit_separation_um", value_name = "UM")]
    slit_separation_um: Option<String>,
    #[arg(long = "screen_distance_m", value_name = "M")]
    screen_distance_m: Option<String>,
    #[arg(long = "screen_halfwidth_mm", value_name = "MM")]
    screen_halfwidth_mm: Option<String>,
    #[arg(long = "samples", value_name = "N")]
    samples: Option<String>,
    #[arg(long = "envelope_sigma_mm", value_name = "MM|none")]
    envelope_sigma_mm: Option<String>,
    #[arg(long = "photons", value_name = "N")]
    photons: Option<String>,
    #[arg(long = "seed", value_name = "N")]
    seed: Option<String>,
    #[arg(long = "sweep", value_name = "PARAM,START,STOP,STEPS|none")]
    sweep: Option<String>,
}

impl KeyOverrides {
    fn pairs(&self) -> Vec<(&'static str, &str)> {
        [
            ("mode", &self.mode),
            ("theta1_deg", &self.theta1_deg),
            ("theta2_deg", &self.theta2_deg),
            ("qwp_a_deg", &self.qwp_a_deg),
            ("qwp_b_deg", &self.qwp_b_deg),
            ("wavelength_nm", &self.wavelength_nm),
            ("slit_separation_um", &self.slit_separation_um),
            ("screen_distance_m", &self.screen_distance_m),
            ("screen_halfwidth_mm", &self.screen_halfwidth_mm),
            ("samples", &self.samples),
            ("envelope_sigma_mm", &self.envelope_sigma_mm),
            ("photons", &self.photons),
            ("seed", &self.seed),
            ("sweep", &self.sweep),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)
        .map_err(|e| Error::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn execute(cli: &Cli) -> Result<()> {
    let overrides = cli.keys.pairs();
    if let Some(preset) = cli.preset {
        fs::create_dir_all(&cli.out)
            .map_err(|e| Error::Runtime(format!("cannot create {}: {e}", cli.out.display())))?;
        for (label, text) in preset.runs() {
            let scenario = parse_with_overrides(&text, &overrides)?;
            write(&cli.out.join(format!("{label}.csv")), &run(&scenario)?)?;
        }
        return Ok(());
    }

    let path = cli
        .scenario
        .as_ref()
        .expect("clap requires a scenario or a preset");
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let scenario = parse_with_overrides(&text, &overrides)?;
    write(&cli.out, &run(&scenario)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("simulate: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! Scenario files, experiment runners and CSV output for the `simulate`
//! command.

pub mod error;
pub mod presets;
pub mod run;
pub mod scenario;

pub use error::{Error, ParseError, Result};
pub use presets::Preset;
pub use run::{run, run_montecarlo, run_profile, run_sweep, sweep_rows, SweepRow};
pub use scenario::{parse_scenario, parse_with_overrides, Mode, Scenario, Sweep, SweepParam};

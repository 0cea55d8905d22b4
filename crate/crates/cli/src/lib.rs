//! Scenario runner for the quasi-2D cooling and thermalization models:
//! scenario files, presets, sweeps and replicas, CSV output with a run
//! manifest, and direct evaluation of the closed forms.

pub mod error;
pub mod oracle;
pub mod presets;
pub mod run;
pub mod scenario;
pub mod table;

pub use error::{CliError, CliResult};
pub use run::{run, RunManifest, RunOptions};
pub use scenario::{Phase, ScenarioConfig, ScenarioMode};

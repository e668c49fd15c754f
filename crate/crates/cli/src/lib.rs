//! Command-line front end: JSON algebra documents, curated scenarios,
//! reports and CSV output.

pub mod commands;
pub mod document;
pub mod error;
pub mod report;
pub mod scenario;

pub use commands::{execute, Cli, Outcome};
pub use error::{CliError, CliResult};
pub use report::{Csv, Report};
pub use scenario::{run_scenario, ScenarioSpec, SCENARIOS};

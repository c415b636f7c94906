//! Scenario-driven front end for `jetcartan`: config files, built-in
//! scenarios, task orchestration and reports.

pub mod config;
pub mod error;
pub mod report;
pub mod run;
pub mod scenario;

pub use config::{parse_config, ScenarioConfig, Task};
pub use error::CliError;
pub use report::{CheckRecord, Report, Status};
pub use run::{list_identities, run_scenario, tables_text};
pub use scenario::{build, builtin, Model, Overrides, SCENARIOS};

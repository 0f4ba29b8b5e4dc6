//! Scenario runner, property-suite driver and report emitter.

pub mod config;
pub mod error;
pub mod report;
pub mod scenario;
pub mod suite;

pub use config::{Scenario, ScenarioConfig, SCHEMA_VERSION};
pub use error::{CliError, CliResult, EXIT_CHECK_FAILED, EXIT_INTERNAL, EXIT_PASS, EXIT_VALIDATION};
pub use report::{emit_report, Check, Format, RunReport, Status, Table};
pub use scenario::{run_scenario, run_scenario_with, RunOptions};
pub use suite::{verify_suite, verify_suite_with};

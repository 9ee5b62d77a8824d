//! Scenario files, table reproduction and report output for the
//! `aerobs-core` models.
//!
//! A scenario names a platform, a base-station profile and the sweeps to run;
//! defaults come from a versioned parameter ledger bundled with the crate.

pub mod config;
pub mod report;
pub mod reproduce;
pub mod run;
pub mod units;

pub use config::{load_scenario, parse_scenario, ConfigError, Ledger, ScenarioConfig};
pub use report::{emit, EmitError, Format, ReportRow, Series};
pub use reproduce::{reproduce, Check, Criterion, ReproduceError, ReproduceReport, TableId};
pub use run::{run_scenario, scenario_rows, Overrides, ScenarioOutcome, Stages};

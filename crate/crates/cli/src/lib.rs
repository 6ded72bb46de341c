//! Experiment runner for `ks-core`: TOML manifests, single runs with CSV
//! and JSON output, parallel comparison suites and numerical self-checks.

pub mod manifest;
pub mod runner;
pub mod suite;
pub mod verify;

pub use manifest::{load_manifest, parse_config, ConfigError, RunManifest};
pub use runner::{exit_code, run_scenario, run_scenario_observed, RunError, Summary};
pub use suite::{compare_suite, load_suite, SuiteError, SuiteReport};

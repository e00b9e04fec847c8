//! Scenario presets, configuration, reports, and figure emission for the
//! bubble SDDE engine.

pub mod config;
pub mod csv_out;
pub mod presets;
pub mod report;
pub mod runner;
pub mod svg;

pub use config::{ConfigError, ResolvedScenario, RunConfig};
pub use presets::{PresetName, ScenarioPreset, ScheduleRule};
pub use report::{DeterministicCheck, OuComparison, RunReport, SegmentationSummary};
pub use runner::{detect_serial_bubble, deterministic_suite, run_scenario, unit_return_std, RunError, RunOptions};

//! Experiment presets and the replication runner.

mod config;
mod preset;
mod runner;

pub use config::{BackendConfig, ExperimentConfig, EXPERIMENT_SCHEMA_VERSION};
pub use preset::{
    preset, R0Preset, DEFAULT_BASE_SEED, DEFAULT_STEP_COUNT, PRESET_NAMES, R0_2, R0_2_5, R0_3,
};
pub use runner::{
    append_decisions_csv, read_summary_json, run_replications, write_decisions_csv,
    write_metrics_csv, write_record, write_summary_json, ReplicationReport, ReplicationSummary,
    RunStatus, CHECKPOINT_FILE, DECISIONS_FILE, METRICS_FILE, SUMMARY_FILE,
};

//! Experiment configs, the runner, the ball cache and report output.

mod cache;
mod config;
mod report;
mod run;

pub use cache::{cache_path, cached_ball, decode_ball, encode_ball, load_ball, save_ball, CACHE_VERSION};
pub use config::{ExperimentConfig, ExperimentKind, MapChoice, OutputConfig, OutputFormat, TraceMode};
pub use report::{
    emit_report, persist, round_float, ExperimentReport, Status, Table, ARTIFACT, FLOAT_DIGITS, REPORT_VERSION,
};
pub use run::{build_model, run_experiment, RunContext};

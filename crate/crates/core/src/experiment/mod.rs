//! Declarative experiments: TOML configs, problem presets, resumable runs
//! and the CSV/JSON artifacts they leave behind.

mod config;
mod export;
mod presets;
mod run;

pub use config::{
    AcquisitionSettings, Budget, DatasetSettings, DomainOverride, ExperimentConfig, ProblemKind, SamplingOverride,
    SearchMethod, SvtSettings,
};
pub use export::{load_log, write_front_csv, write_trajectory, write_trajectory_csv, write_variability};
pub use presets::{
    build_experiment, load_split, output_perturbation_domain, svt_domain, training_domain, training_sampling,
    Experiment,
};
pub use run::{
    read_jsonl_repairing, run_experiment, Manifest, RunSummary, SkipRecord, EVALS_FILE, FRONT_FILE, MANIFEST_FILE,
    SKIPS_FILE, TRAJECTORY_FILE,
};

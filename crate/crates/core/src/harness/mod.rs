//! Experiment driver: configs, seeded repetitions, aggregation and CSV
//! output for the Lipschitz bench, the tuned GLB bench and grid sweeps.
//!
//! Each run seed `s` derives two independent streams, one for the
//! environment and one for the algorithm and its tuner. Methods compared
//! under the same seed therefore see identical arms and noise.

mod aggregate;
mod config;
mod output;
mod run;

pub use aggregate::{aggregate, population_std, AggregateResult, MethodSummary};
pub use config::{
    apply_override, AlgorithmConfig, EnvironmentConfig, EnvironmentKind, ExperimentConfig,
    ExperimentKind, GridConfig, LipschitzConfig, LipschitzMethod, Metric, TuningConfig,
};
pub use output::{emit_csv, read_csv, write_grid_csv, write_groups_csv};
pub use run::{
    build_switching_env, grid_rows, grid_sweep, group_means, lipschitz_epoch_len, run_experiment, run_glb_bench,
    run_glb_single, run_lipschitz_bench, run_lipschitz_single, run_repetitions, EnvData,
    ExperimentOutput, GridRow, GridSweepResult, GroupRow, RunResult, TunerChoice,
};

/// Stream index of the environment generator within a run seed.
pub const ENV_STREAM: u64 = 0;
/// Stream index of the algorithm and tuner generator within a run seed.
pub const ALGO_STREAM: u64 = 1;
/// Stream index, under the base seed, that draws the switching schedule.
pub const SCHEDULE_STREAM: u64 = 2;

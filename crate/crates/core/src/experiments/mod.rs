//! Experiment harness: configuration, the comparison and sweep runners,
//! the diagnostics, and the files they write.

mod config;
pub mod io;
mod run;

pub use config::{EnumerateConfig, ExperimentConfig, Lemma1Config, Method};
pub use run::{
    build_partition, mean_std, reload_report, repetition_dir, repetition_network, report_batch, run_compare,
    run_enumerate, run_generate, run_lemma1, run_repetition, run_sweep, CompareOutcome, DEFAULT_SWEEP, EnumerateRow,
    EnumerateSummary, Lemma1Row, MethodOutcome, RepetitionOutcome, RepetitionSeeds, SweepOutcome, SweepRun,
};

//! Declarative scenarios, the benchmark runs built from them, and their
//! output files.

pub mod config;
pub mod output;
pub mod run;

pub use config::{
    crack_mode1, periodic_smoke, plate_hole, InitialState, ProbeConfig, ScenarioConfig, SifConfig,
    CONFIG_VERSION,
};
pub use output::{emit_sif_report, write_snapshot, ProbeSeries, SifRow, Snapshot};
pub use run::{build_simulation, run_scenario, RunArtifacts, RunOptions, RunSummary};

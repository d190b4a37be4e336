//! Reproducible experiments: scenario configuration, time-series runs, the
//! canonical figure suite, the invariant verification suite and sweeps.
//!
//! Every run is deterministic: time stepping is sequential and parallel work
//! is collected in index order, so outputs are byte-identical across thread
//! counts.

pub mod config;
pub mod figures;
pub mod output;
pub mod scenario;
pub mod stats;
pub mod sweep;
pub mod verify;

pub use config::{ConfigOverrides, Dynamics, OtocB, OutputKind, ScenarioConfig, SweepFile};
pub use figures::{run_figure_suite, FigureOptions, FigureSuite};
pub use scenario::{run_scenario, ScenarioOutput, TimeSeriesRecord};
pub use sweep::{sweep, SweepReport};
pub use verify::{verify, VerifyLevel, VerifyReport};

//! Pulsatile flow and heat transfer of a magneto-micropolar fluid through a
//! stenosed tube with an oscillating wall under periodic body acceleration.

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod forcing;
pub mod geometry;
pub mod oracles;
pub mod output;
pub mod params;
pub mod plots;
pub mod runner;
pub mod solver;
pub mod validate;

pub use config::{parse_config, RunConfig, SweepAxis};
pub use diagnostics::{CycleStats, DiagnosticsSample, Recorder};
pub use error::{ConfigError, DiagnosticsError, FieldKind, GeometryError, ParamError, RunError, SolverError};
pub use field::{Field, FlowField};
pub use forcing::ForcingParams;
pub use geometry::{StenosisShape, WallState};
pub use params::{DimensionlessParams, NumericalParams};
pub use plots::emit_plots;
pub use runner::{run, run_periodic, sweep, PeriodicRun};
pub use solver::{stability_limit, Simulation};
pub use validate::validate;

//! Experiment runner behind the `blockmg` binary.

pub mod config;
pub mod run;
pub mod table;

pub use config::{ExperimentConfig, Mode};
pub use run::{run, RunOutcome};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// Numerical or I/O failure outside the solver loop.
    pub const FAILURE: i32 = 1;
    pub const NOT_CONVERGED: i32 = 2;
    /// Unreadable or invalid configuration, arguments or input files.
    pub const CONFIG: i32 = 3;
}

//! Time evolution of the mild formulation.

mod config;
mod ensemble;
mod picard;
mod stepper;
mod trajectory;

pub use config::{Monitor, SolverConfig, StoppingLadder};
pub use ensemble::{run_ensemble, run_ensemble_map, EnsembleReport, InitialData, TrajectorySummary};
pub use picard::{picard_solve, PicardSolution};
pub use stepper::{step, StopReason, StopRecord, Stepper, TrajectoryState};
pub use trajectory::{
    hitting_times, run_from_state, run_trajectory, stochastic_convolution_variance, DiagnosticsRow, LadderRecord,
    Snapshot, Trajectory,
};

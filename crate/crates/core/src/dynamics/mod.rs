//! Polynomial systems on hypergraphs: model builders, the shifted-system
//! expansion, RK4 simulation and Lyapunov/invariant-set monitors.

mod export;
mod model;
mod monitor;
mod shifted;
mod simulate;

pub use export::{write_csv, RunMetadata};
pub use model::{
    build_affine, build_homogeneous, build_lv, build_polynomial, build_shifted, build_sis, HypergraphModel, Region,
    SisModel, Wrapper,
};
pub use monitor::{
    invariant_monitor, lyapunov_trace, lyapunov_values, InvariantMonitor, InvariantSet, LyapunovSample, INVARIANT_TOL,
};
pub use shifted::{expand_shifted, ShiftedExpansion};
pub use simulate::{
    random_starts, simulate, simulate_batch, Event, EventKind, MonitorSample, SimConfig, StepStats, Termination,
    Trajectory, MAX_HALVINGS, STABILITY_LIMIT,
};

pub mod accel;
pub mod acs;
pub mod config;
pub mod dra;
pub mod janssen;

pub use accel::{
    default_tau_grid, extrapolate, extrapolate_coefficients, extrapolation_steps, line_search,
    progressive_schedule, LineSearchResult,
};
pub use acs::{
    acs_run, acs_run_timed, effective_step, strategy_accepts, update_coefficients, update_signal, AcsAbort,
    AcsOutput, AcsTrace, CoefficientStep, IterationRecord, SignalStep, COEFFICIENT_LIMIT,
};
pub use config::{Acceleration, SolverConfig, Strategy};
pub use dra::{douglas_rachford, DraState, Prox};
pub use janssen::{glp_rectify, janssen_signal_update};

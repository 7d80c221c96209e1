//! Fundamental solutions and Neumann m-functions of the half problems.

pub mod mfun;
pub mod ode;

pub use mfun::{
    atkinson_predict, duality_check, fundamental_solutions, integrate_system, log_grid, m_function, m_trace, sample_flags,
    CutRecord, LimitType, MMode, MSample, MTrace, MTraceRow, SideSolver, StateVec, WeylConfig,
};
pub use ode::{Chart, OdeConfig};

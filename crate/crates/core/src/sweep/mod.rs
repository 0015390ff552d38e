//! Sweeps over eps and the gap table for eps > 2.

mod curves;
mod exec;
mod gap;

pub use curves::{
    critical_point_search, find_s0_minimum, sweep_s0, sweep_x0, CriticalCurveSample, CurveKind,
    SweepFailure, SweepOptions, SweepResult, BRACKET_CAP,
};
pub use exec::{Execution, THREADS_ENV};
pub use gap::{gap_table, GapOptions, GapOutcome, GapRow, GapTable, OpenPath, SPIRAL_RADIUS};

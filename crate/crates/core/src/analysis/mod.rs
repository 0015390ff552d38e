//! Periods, enclosure, classification and the searches built on them.

mod classify;
mod completion;
mod critical;
mod escape;
mod interp;
pub use interp::dense_path;
mod period;
mod symmetry;
mod terminating;
mod winding;

pub use classify::{
    classify, classify_launch, classify_trajectory, principal_crossing, OrbitClassification,
    Verdict,
};
pub use completion::{is_pt_fixed, pt_completion};
pub use critical::{
    bisect_transition, critical_point, exceeds_sheet_depth, in_principal_region, leaves_region,
    principal_region_edge, CriticalPoint, SCAN_POINTS,
};
pub use escape::{
    escape_angles, escape_phase_residual, fit_escape, launch_on_ray, EscapeFit, EscapeRay,
    FIT_TOLERANCE, MIN_TAIL, TAIL_RADIUS,
};
pub use period::{analytic_period, numeric_period};
pub use symmetry::{pt_symmetry_defect, SymmetryDefect, PT_TOLERANCE};
pub use terminating::{
    shoot_from_turning_point, terminating_start, Shot, TerminatingPath, LAUNCH_DELTA,
};
pub use winding::enclosed_turning_points;

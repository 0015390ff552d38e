use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::completion::pt_completion;
use super::escape::fit_escape;
use super::symmetry::pt_symmetry_defect;
use super::winding::enclosed_turning_points;
use crate::error::Result;
use crate::integrator::{
    integrate, launch_on_shell, EventKind, Heading, IntegratorConfig, StopReason, Trajectory,
};
use crate::surface::{Epsilon, PhaseState, SurfacePoint, TurningPointId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Closed {
        period: f64,
        sheets_visited: BTreeSet<i64>,
        enclosed_pairs: BTreeSet<u32>,
        enclosed: BTreeSet<TurningPointId>,
        /// Closed through PT reflection of the half orbit rather than by a
        /// numerical return to the launch state.
        by_reflection: bool,
    },
    /// `s_value` is the magnitude `y` of the principal-sheet crossing `-iy`.
    Terminating {
        pair: u32,
        s_value: f64,
    },
    Escaping {
        theta: f64,
        blowup_time: f64,
    },
    Undetermined {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitClassification {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub pt_symmetric: bool,
}

/// Magnitude of the first crossing of the principal negative-imaginary axis,
/// counting the launch itself.
pub fn principal_crossing(traj: &Trajectory) -> Option<f64> {
    let l = &traj.launch.position;
    if (l.theta() + FRAC_PI_2).abs() < 1e-15 {
        return Some(l.r());
    }
    traj.axis_crossings()
        .find(|(_, sheet, _)| *sheet == 0)
        .map(|(_, _, im)| -im)
}

/// Classifies the orbit launched from `x0` with positive heading.
pub fn classify(
    x0: SurfacePoint,
    eps: Epsilon,
    config: &IntegratorConfig,
) -> Result<OrbitClassification> {
    classify_launch(&launch_on_shell(x0, Heading::Positive, eps), eps, config)
}

pub fn classify_launch(
    launch: &PhaseState,
    eps: Epsilon,
    config: &IntegratorConfig,
) -> Result<OrbitClassification> {
    let traj = integrate(launch, eps, config)?;
    Ok(classify_trajectory(&traj))
}

/// Maps the way a trajectory ended to a verdict.
pub fn classify_trajectory(traj: &Trajectory) -> OrbitClassification {
    let eps = traj.epsilon;
    let point_set = || pt_symmetry_defect(traj).is_symmetric();
    let undetermined = |reason: &str| Verdict::Undetermined {
        reason: reason.to_string(),
    };
    let closed = |orbit: &Trajectory, period: f64, by_reflection: bool| {
        let enclosed = enclosed_turning_points(orbit, eps).unwrap_or_default();
        Verdict::Closed {
            period,
            sheets_visited: orbit.sheets_visited(),
            enclosed_pairs: enclosed.iter().map(|id| id.pair).collect(),
            enclosed,
            by_reflection,
        }
    };
    let terminal = traj.terminal_event().map(|e| e.kind);
    if !matches!(terminal, Some(EventKind::Closure { .. })) {
        if let Some(orbit) = pt_completion(traj) {
            let period = orbit.period().expect("completion closes");
            return OrbitClassification {
                verdict: closed(&orbit, period, true),
                pt_symmetric: pt_symmetry_defect(&orbit).is_symmetric(),
            };
        }
    }
    let (verdict, pt_symmetric) = match terminal {
        Some(EventKind::Closure { period }) => (closed(traj, period, false), point_set()),
        Some(EventKind::TurningTermination { turning_point }) => match principal_crossing(traj) {
            // A crossing of the principal axis has real momentum, so the
            // path continues into its own mirror image.
            Some(s_value) => (
                Verdict::Terminating {
                    pair: turning_point.pair,
                    s_value,
                },
                true,
            ),
            None => (
                undetermined("reached a turning point without crossing the principal axis"),
                false,
            ),
        },
        Some(EventKind::Escape { theta }) => {
            let blowup_time = fit_escape(traj, eps)
                .map(|f| f.t_star)
                .unwrap_or(traj.end_time());
            (Verdict::Escaping { theta, blowup_time }, point_set())
        }
        Some(EventKind::EnergyFault { .. }) => (undetermined("energy fault"), false),
        Some(_) | None => {
            let reason = match traj.stop {
                StopReason::MaxTime => "budget",
                StopReason::StepUnderflow => "step underflow",
                _ => "stopped by observer",
            };
            (undetermined(reason), point_set())
        }
    };
    OrbitClassification {
        verdict,
        pt_symmetric,
    }
}

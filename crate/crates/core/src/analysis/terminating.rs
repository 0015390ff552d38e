use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{
    advance, integrate, integrate_observed, launch_from_turning_point, launch_on_shell, Event,
    EventKind, Heading, IntegratorConfig, StopOn, StopReason, Trajectory,
};
use crate::surface::{turning_point, Epsilon, PhaseState, Side, SurfacePoint, TurningPointId};

/// Time offset of the launch from rest at the turning point.
pub const LAUNCH_DELTA: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TerminatingPath {
    pub pair: u32,
    /// The crossing is `-i s_value`.
    pub s_value: f64,
    /// Time from rest at the turning point to the crossing.
    pub crossing_time: f64,
    /// Direction of departure from the turning point, as a line angle in `(-pi/2, pi/2]`.
    pub departure_angle: f64,
    /// Smallest `|p|` on the continuation past the crossing.
    pub mirror_speed: f64,
    pub mirror_verified: bool,
}

/// The integration from a turning point, stopped at the first principal-sheet
/// crossing if there is one.
#[derive(Debug, Clone, PartialEq)]
pub struct Shot {
    pub pair: u32,
    pub trajectory: Trajectory,
    pub crossing: Option<Event>,
}

fn principal(e: &Event) -> bool {
    matches!(e.kind, EventKind::NegativeImagAxisCrossing { sheet: 0, .. })
}

/// Integrates from just past the right turning point of `pair`.
pub fn shoot_from_turning_point(
    pair: u32,
    eps: Epsilon,
    config: &IntegratorConfig,
) -> Result<Shot> {
    let tp = turning_point(pair, Side::Right, eps)?;
    let launch = launch_from_turning_point(&tp, eps, LAUNCH_DELTA)?;
    let trajectory = integrate_observed(&launch, eps, config, &mut StopOn(principal))?;
    let crossing = match trajectory.stop {
        StopReason::Observer => trajectory.events.last().copied(),
        _ => None,
    };
    Ok(Shot {
        pair,
        trajectory,
        crossing,
    })
}

fn line_angle(mut a: f64) -> f64 {
    while a > PI / 2.0 {
        a -= PI;
    }
    while a <= -PI / 2.0 {
        a += PI;
    }
    a
}

fn departure_angle(shot: &Shot, eps: Epsilon) -> Result<f64> {
    let tp = turning_point(shot.pair, Side::Right, eps)?;
    let near = advance(&shot.trajectory.launch, 1e-2 - LAUNCH_DELTA, eps);
    Ok(line_angle((near.x() - tp.location.to_cartesian()).arg()))
}

fn why_not(traj: &Trajectory) -> String {
    match traj.terminal_event().map(|e| e.kind) {
        Some(EventKind::Escape { theta }) => format!("escaped along theta = {theta:.6}"),
        Some(EventKind::EnergyFault { error }) => format!("energy fault ({error:.3e})"),
        Some(EventKind::TurningTermination { turning_point }) => {
            format!(
                "stopped at turning point {}{} off the principal axis",
                turning_point.pair, turning_point.side
            )
        }
        _ => format!(
            "no principal-sheet axis crossing within t = {:.1}",
            traj.end_time()
        ),
    }
}

/// Continues from the crossing, restarted on the axis with the momentum put
/// back on the energy shell, and checks that it comes to rest at the mirror
/// turning point.
fn verify_mirror(
    s_value: f64,
    start: &PhaseState,
    pair: u32,
    crossing_time: f64,
    eps: Epsilon,
    config: &IntegratorConfig,
) -> Result<(bool, f64)> {
    let from = launch_on_shell(
        SurfacePoint::on_negative_imaginary_axis(s_value)?,
        Heading::from_sign(start.p().re),
        eps,
    );
    let cfg = config.with_max_time(1.25 * crossing_time + 1.0);
    let traj = integrate(&from, eps, &cfg)?;
    let speed = traj
        .samples
        .iter()
        .map(|s| s.p().norm())
        .fold(f64::INFINITY, f64::min);
    let verified = matches!(
        traj.terminal_event().map(|e| e.kind),
        Some(EventKind::TurningTermination { turning_point }) if turning_point == TurningPointId { pair, side: Side::Left }
    );
    Ok((verified, speed))
}

/// Crossing `-i s_n` of the principal negative-imaginary axis by the path
/// leaving turning-point pair `pair`.
pub fn terminating_start(
    pair: u32,
    eps: Epsilon,
    config: &IntegratorConfig,
) -> Result<TerminatingPath> {
    let shot = shoot_from_turning_point(pair, eps, config)?;
    let Some(crossing) = shot.crossing else {
        return Err(Error::NoTermination {
            pair,
            reason: why_not(&shot.trajectory),
        });
    };
    let s_value = match crossing.kind {
        EventKind::NegativeImagAxisCrossing { im, .. } => -im,
        _ => unreachable!("observer stops only on axis crossings"),
    };
    let crossing_time = crossing.time + LAUNCH_DELTA;
    let (mirror_verified, mirror_speed) =
        verify_mirror(s_value, &crossing.state, pair, crossing_time, eps, config)?;
    Ok(TerminatingPath {
        pair,
        s_value,
        crossing_time,
        departure_angle: departure_angle(&shot, eps)?,
        mirror_speed,
        mirror_verified,
    })
}

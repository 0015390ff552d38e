//! Closure of axis-launched orbits by PT reflection.
//!
//! A state on the principal negative-imaginary axis with real momentum is
//! fixed by PT, so its orbit is its own mirror image. A second crossing of
//! the principal axis at time `t1` is fixed as well, and the two reflections
//! compose to a time shift: the orbit is periodic with period `2 t1`, made of
//! the half path and its reflection.

use std::f64::consts::FRAC_PI_2;

use crate::integrator::{Event, EventKind, StopReason, Trajectory};
use crate::surface::{pt_reflect, MomentumPolar, PhaseState};

/// Whether `state` is fixed by PT: on the principal negative-imaginary axis
/// with real momentum.
pub fn is_pt_fixed(state: &PhaseState) -> bool {
    let p = state.p();
    (state.position.theta() + FRAC_PI_2).abs() < 1e-15 && p.im.abs() <= 1e-12 * p.norm()
}

fn mirror(s: &PhaseState, t_turn: f64) -> PhaseState {
    PhaseState::new(
        pt_reflect(&s.position),
        MomentumPolar::from_cartesian(s.p().conj()),
        2.0 * t_turn - s.time,
    )
}

/// The closed orbit built from the half path up to the first principal-sheet
/// axis crossing, when the launch is PT-fixed.
pub fn pt_completion(traj: &Trajectory) -> Option<Trajectory> {
    if !is_pt_fixed(&traj.launch) {
        return None;
    }
    let k = traj.events.iter().position(|e| {
        matches!(e.kind, EventKind::NegativeImagAxisCrossing { sheet: 0, .. })
            && e.time > traj.launch.time
    })?;
    let turn = traj.events[k];
    let t1 = turn.time;
    let mut samples: Vec<PhaseState> = traj
        .samples
        .iter()
        .copied()
        .filter(|s| s.time < t1)
        .collect();
    let first_half = samples.len();
    samples.push(turn.state);
    let reflected: Vec<PhaseState> = samples[..first_half]
        .iter()
        .rev()
        .map(|s| mirror(s, t1))
        .collect();
    samples.extend(reflected);
    let period = 2.0 * (t1 - traj.launch.time);
    let last = *samples.last().expect("launch is a sample");
    let mut events: Vec<Event> = traj.events[..=k].to_vec();
    events.push(Event {
        kind: EventKind::Closure { period },
        time: last.time,
        state: last,
    });
    Some(Trajectory {
        epsilon: traj.epsilon,
        launch: traj.launch,
        samples,
        events,
        stop: StopReason::Event,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{enclosed_turning_points, pt_symmetry_defect};
    use crate::integrator::{integrate, launch_on_shell, Heading, IntegratorConfig};
    use crate::surface::{Epsilon, SurfacePoint};

    #[test]
    fn completion_matches_numeric_orbit() {
        let eps = Epsilon::new(1.0 / std::f64::consts::PI).unwrap();
        let launch = launch_on_shell(
            SurfacePoint::on_negative_imaginary_axis(0.5).unwrap(),
            Heading::Positive,
            eps,
        );
        let full = integrate(&launch, eps, &IntegratorConfig::default()).unwrap();
        let done = pt_completion(&full).unwrap();
        assert!((done.period().unwrap() - full.period().unwrap()).abs() < 1e-9);
        assert_eq!(
            enclosed_turning_points(&done, eps).unwrap(),
            enclosed_turning_points(&full, eps).unwrap()
        );
        assert!(pt_symmetry_defect(&done).is_symmetric());
        let end = done.samples.last().unwrap();
        assert!((end.x() - launch.x()).norm() < 1e-12 && (end.p() - launch.p()).norm() < 1e-12);
    }

    #[test]
    fn needs_fixed_launch() {
        let eps = Epsilon::new(0.5).unwrap();
        let off = SurfacePoint::new(0.5, -1.0).unwrap();
        let traj = integrate(
            &launch_on_shell(off, Heading::Positive, eps),
            eps,
            &IntegratorConfig::default(),
        )
        .unwrap();
        assert!(pt_completion(&traj).is_none());
    }
}

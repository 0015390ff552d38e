//! Polar-form integration, a cross-check for the Cartesian integrator.

use crate::error::{Error, Result};
use crate::integrator::dop853::{A, B, E3, E5};
use crate::integrator::equations::polar_derivative;
use crate::surface::{Epsilon, MomentumPolar, PhaseState, SurfacePoint};

type Vec4 = [f64; 4];

fn rates(y: &Vec4, eps: Epsilon) -> Result<Vec4> {
    let state = to_state(y, 0.0)?;
    let w = polar_derivative(&state, eps)?;
    Ok([w.dr, w.dtheta, w.da, w.dalpha])
}

fn to_state(y: &Vec4, time: f64) -> Result<PhaseState> {
    if !(y[0] > 0.0 && y[2] > 0.0) {
        return Err(Error::PolarSingularity("radius or speed reached zero"));
    }
    Ok(PhaseState::new(
        SurfacePoint::unchecked(y[0], y[1]),
        MomentumPolar::new(y[2], y[3])?,
        time,
    ))
}

fn axpy(y: &Vec4, h: f64, k: &Vec4) -> Vec4 {
    [
        y[0] + h * k[0],
        y[1] + h * k[1],
        y[2] + h * k[2],
        y[3] + h * k[3],
    ]
}

/// Integrates `(r, theta, a, alpha)` from `launch` for time `duration` and
/// returns the final state. Fails if the path comes within `1e-12` of a
/// polar singularity.
pub fn integrate_polar(
    launch: &PhaseState,
    eps: Epsilon,
    duration: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<PhaseState> {
    if !(duration >= 0.0 && duration.is_finite() && rel_tol > 0.0 && abs_tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "bad polar integration request: duration {duration}"
        )));
    }
    let mut y = [
        launch.position.r(),
        launch.position.theta(),
        launch.momentum.a(),
        launch.momentum.alpha(),
    ];
    let mut t = 0.0;
    let mut h = (duration * 1e-3).max(1e-6).min(duration);
    let mut steps = 0usize;
    while t < duration {
        steps += 1;
        if steps > 10_000_000 {
            return Err(Error::InvalidArgument(
                "polar integration exceeded the step limit".into(),
            ));
        }
        h = h.min(duration - t);
        let mut k = [[0.0; 4]; 12];
        k[0] = rates(&y, eps)?;
        for s in 1..12 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                if A[s][j] != 0.0 {
                    ys = axpy(&ys, h * A[s][j], kj);
                }
            }
            k[s] = rates(&ys, eps)?;
        }
        let mut next = y;
        let mut e5 = [0.0; 4];
        let mut e3 = [0.0; 4];
        for (j, kj) in k.iter().enumerate() {
            next = axpy(&next, h * B[j], kj);
            e5 = axpy(&e5, E5[j], kj);
            e3 = axpy(&e3, E3[j], kj);
        }
        let (mut n5, mut n3) = (0.0, 0.0);
        for i in 0..4 {
            let scale = abs_tol + rel_tol * y[i].abs().max(next[i].abs());
            n5 += (e5[i] / scale).powi(2);
            n3 += (e3[i] / scale).powi(2);
        }
        let err = if n5 == 0.0 && n3 == 0.0 {
            0.0
        } else {
            h * n5 / ((n5 + 0.01 * n3) * 4.0).sqrt()
        };
        if err <= 1.0 {
            t += h;
            y = next;
        }
        let factor = if err == 0.0 {
            6.0
        } else {
            (0.9 * err.powf(-1.0 / 8.0)).clamp(0.2, 6.0)
        };
        h *= factor;
    }
    to_state(&y, launch.time + duration)
}

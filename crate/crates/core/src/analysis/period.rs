use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::integrator::{integrate, launch_on_shell, Heading, IntegratorConfig};
use crate::surface::{Epsilon, SurfacePoint};

/// Closed-form period of orbits that enclose the principal pair without
/// crossing the cut:
/// `2 sqrt(pi) cos(pi eps / (4 + 2 eps)) Gamma((3 + eps)/(2 + eps)) / Gamma((4 + eps)/(4 + 2 eps))`.
pub fn analytic_period(eps: Epsilon) -> Result<f64> {
    let e = eps.require_above_minus_two()?.value();
    let num = gamma((3.0 + e) / (2.0 + e));
    let den = gamma((4.0 + e) / (4.0 + 2.0 * e));
    let t = 2.0 * PI.sqrt() * (PI * e / (4.0 + 2.0 * e)).cos() * num / den;
    if t.is_finite() {
        Ok(t)
    } else {
        Err(Error::EpsilonOutOfRange {
            value: e,
            requirement: "Gamma arguments off the poles",
        })
    }
}

/// Period of the orbit through `x0`, read off its closure event.
pub fn numeric_period(x0: SurfacePoint, eps: Epsilon, config: &IntegratorConfig) -> Result<f64> {
    let traj = integrate(&launch_on_shell(x0, Heading::Positive, eps), eps, config)?;
    traj.period().ok_or(Error::NotClosed {
        max_time: config.max_time,
    })
}

//! Equations of motion in Cartesian and polar form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::{acceleration, Epsilon, PhaseState};

/// `(dx/dt, dp/dt)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseVelocity {
    pub dx: Complex64,
    pub dp: Complex64,
}

/// Rates of the polar variables `x = r e^{i theta}`, `p = a e^{i alpha}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarRates {
    pub dr: f64,
    pub dtheta: f64,
    pub da: f64,
    pub dalpha: f64,
}

/// Hamilton's equations `dx/dt = 2p`, `dp/dt = -(2+eps) x (ix)^eps`.
pub fn derivative(state: &PhaseState, eps: Epsilon) -> PhaseVelocity {
    // dp/dt is half the Newton acceleration.
    PhaseVelocity {
        dx: 2.0 * state.p(),
        dp: 0.5 * acceleration(&state.position, eps),
    }
}

const POLAR_FLOOR: f64 = 1e-12;

/// The four real polar rates. Singular where `a` or `r` vanish.
pub fn polar_derivative(state: &PhaseState, eps: Epsilon) -> Result<PolarRates> {
    let e = eps.value();
    let r = state.position.r();
    let theta = state.position.theta();
    let a = state.momentum.a();
    let alpha = state.momentum.alpha();
    if r < POLAR_FLOOR {
        return Err(Error::PolarSingularity("r below 1e-12"));
    }
    if a < POLAR_FLOOR {
        return Err(Error::PolarSingularity("|p| below 1e-12"));
    }
    let shift = (e - 2.0) * std::f64::consts::FRAC_PI_2;
    let force = (2.0 + e) * r.powf(e + 1.0);
    let phase = (1.0 + e) * theta - alpha + shift;
    Ok(PolarRates {
        dr: 2.0 * a * (alpha - theta).cos(),
        dtheta: 2.0 * a / r * (alpha - theta).sin(),
        da: force * phase.cos(),
        dalpha: force / a * phase.sin(),
    })
}

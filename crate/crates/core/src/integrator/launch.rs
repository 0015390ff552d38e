//! Initial states on the `E = 1` shell.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::{
    acceleration, potential, Epsilon, MomentumPolar, PhaseState, SurfacePoint, TurningPoint,
};

/// Which square root of `1 - x^2 (ix)^eps` to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Heading {
    /// `Re p > 0`, or `Im p > 0` when `p` is purely imaginary.
    #[default]
    Positive,
    Negative,
}

impl Heading {
    pub fn from_sign(sign: f64) -> Self {
        if sign < 0.0 {
            Heading::Negative
        } else {
            Heading::Positive
        }
    }
}

fn leading_sign(p: Complex64) -> f64 {
    if p.re.abs() > 1e-14 * p.norm() {
        p.re.signum()
    } else {
        p.im.signum()
    }
}

/// State at `x0` with the momentum fixed by energy conservation.
pub fn launch_on_shell(x0: SurfacePoint, heading: Heading, eps: Epsilon) -> PhaseState {
    let mut p = (Complex64::new(1.0, 0.0) - potential(&x0, eps)).sqrt();
    let want = match heading {
        Heading::Positive => 1.0,
        Heading::Negative => -1.0,
    };
    if leading_sign(p) != want {
        p = -p;
    }
    PhaseState::new(x0, MomentumPolar::from_cartesian(p), 0.0)
}

/// State a short time `delta` after rest at a turning point, from the Taylor
/// step `x = x_T + a delta^2 / 2`, `p = a delta / 2`, with `|p|` then
/// re-projected onto the energy shell.
pub fn launch_from_turning_point(
    tp: &TurningPoint,
    eps: Epsilon,
    delta: f64,
) -> Result<PhaseState> {
    if !(delta > 0.0 && delta <= 1e-3) {
        return Err(Error::InvalidArgument(format!(
            "delta must lie in (0, 1e-3], got {delta}"
        )));
    }
    let accel = acceleration(&tp.location, eps);
    let xt = tp.location.to_cartesian();
    let x = xt + 0.5 * accel * delta * delta;
    let position = SurfacePoint::from_cartesian(x, tp.location.theta())?;
    let taylor = 0.5 * accel * delta;
    let mut p = (Complex64::new(1.0, 0.0) - potential(&position, eps)).sqrt();
    if (p - taylor).norm() > (p + taylor).norm() {
        p = -p;
    }
    Ok(PhaseState::new(
        position,
        MomentumPolar::from_cartesian(p),
        0.0,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{energy, turning_point, turning_point_slope, Side};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn eps(v: f64) -> Epsilon {
        Epsilon::new(v).unwrap()
    }

    #[test]
    fn origin_at_zero_eps() {
        // r = 0 is not representable; use a point very close to it.
        let s = launch_on_shell(
            SurfacePoint::new(1e-300, 0.0).unwrap(),
            Heading::Positive,
            eps(0.0),
        );
        assert!((s.p() - 1.0).norm() < 1e-15);
        let s = launch_on_shell(
            SurfacePoint::new(1e-300, 0.0).unwrap(),
            Heading::Negative,
            eps(0.0),
        );
        assert!((s.p() + 1.0).norm() < 1e-15);
    }

    #[test]
    fn axis_launch_has_real_momentum() {
        for (e, y) in [(1.0 / PI, 0.325_235), (1.0 + 2f64.sqrt(), 0.2)] {
            let s = launch_on_shell(
                SurfacePoint::on_negative_imaginary_axis(y).unwrap(),
                Heading::Positive,
                eps(e),
            );
            assert!(s.p().im.abs() < 1e-14 && s.p().re > 0.0);
            assert!((energy(&s, eps(e)) - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn harmonic_turning_launch() {
        let tp = turning_point(0, Side::Right, eps(0.0)).unwrap();
        let d = 1e-4;
        let s = launch_from_turning_point(&tp, eps(0.0), d).unwrap();
        assert!((s.x() - (1.0 - 2.0 * d * d)).norm() < 1e-15);
        assert!((s.p() + 2.0 * d).norm() < 1e-11);
        assert!((energy(&s, eps(0.0)) - 1.0).norm() < 1e-14);
    }

    #[test]
    fn launch_direction_follows_slope() {
        let e = eps(1.0 / PI);
        let tp = turning_point(0, Side::Right, e).unwrap();
        let s = launch_from_turning_point(&tp, e, 1e-4).unwrap();
        let dir = (s.x() - tp.location.to_cartesian()).arg();
        let want = -PI + turning_point_slope(e).unwrap();
        assert!((dir - want).abs() < 1e-6, "{dir} vs {want}");
    }

    #[test]
    fn launch_up_the_imaginary_axis() {
        let e = eps(1.0);
        let tp = turning_point(1, Side::Right, e).unwrap();
        assert!((tp.location.theta() - FRAC_PI_2).abs() < 1e-15);
        let s = launch_from_turning_point(&tp, e, 1e-4).unwrap();
        assert!(s.x().re.abs() < 1e-15 && s.x().im > 1.0);
        assert!(s.p().re.abs() < 1e-12 && s.p().im > 0.0);
    }

    #[test]
    fn rejects_bad_delta() {
        let tp = turning_point(0, Side::Right, eps(0.5)).unwrap();
        assert!(launch_from_turning_point(&tp, eps(0.5), 0.0).is_err());
        assert!(launch_from_turning_point(&tp, eps(0.5), 2e-3).is_err());
    }
}

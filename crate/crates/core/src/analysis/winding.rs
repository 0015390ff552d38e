//! Which turning points a closed trajectory encloses.
//!
//! On a multi-sheeted surface the curve is lifted to `(ln r, theta)`, where
//! the turning points sit at `(0, theta_N)` and enclosure is an ordinary
//! planar winding number. For integer eps the surface is the plane and the
//! winding is taken around the distinct turning points directly.

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use num_complex::Complex64;

use super::interp::Interpolant;
use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::surface::{tower_angle, Epsilon, PhaseState, TurningPointId};

/// Signed angle swept around `center` by a curve segment, subdividing until
/// each chord is short compared to its distance from `center`.
fn swept_angle(
    map: &dyn Fn(f64) -> Complex64,
    center: Complex64,
    s0: f64,
    s1: f64,
    depth: u32,
) -> f64 {
    let v0 = map(s0) - center;
    let v1 = map(s1) - center;
    let chord = (v1 - v0).norm();
    if depth == 0 || chord < 0.25 * v0.norm().min(v1.norm()) {
        return (v1 / v0).arg();
    }
    let mid = 0.5 * (s0 + s1);
    swept_angle(map, center, s0, mid, depth - 1) + swept_angle(map, center, mid, s1, depth - 1)
}

fn winding_number(
    interp: &Interpolant,
    center: Complex64,
    lift: &dyn Fn(&PhaseState, Complex64) -> Complex64,
) -> i64 {
    let samples = interp.samples;
    let mut total = 0.0;
    let n = samples.len();
    for i in 0..n {
        let a = &samples[i];
        // The closing segment joins the closure state back to the launch.
        let b = &samples[(i + 1) % n];
        if i + 1 == n {
            total += (lift(a, b.x()) - center).arg() - (lift(a, a.x()) - center).arg();
            continue;
        }
        let map = |s: f64| lift(a, interp.at(i, s));
        total += swept_angle(&map, center, 0.0, 1.0, 24);
    }
    (total / TAU).round() as i64
}

/// Turning points with nonzero winding number of the closed trajectory.
pub fn enclosed_turning_points(
    traj: &Trajectory,
    eps: Epsilon,
) -> Result<BTreeSet<TurningPointId>> {
    if !traj.is_closed() {
        return Err(Error::NotClosedTrajectory);
    }
    let interp = Interpolant::new(&traj.samples, eps);
    let samples = &traj.samples;
    let mut found = BTreeSet::new();
    let e = eps.value();
    let spacing = 4.0 * std::f64::consts::PI / (2.0 * e + 4.0);
    let index_of =
        |theta: f64| (((2.0 * e + 4.0) * theta / std::f64::consts::PI + e) / 4.0).floor() as i64;

    if eps.is_single_sheeted() {
        // Plane: tower indices repeat with period eps + 2.
        let period = e as i64 + 2;
        let plane = |_: &PhaseState, z: Complex64| z;
        for class in 0..period {
            let id = (class - period..class + period)
                .filter(|n| n.rem_euclid(period) == class)
                .map(TurningPointId::from_tower_index)
                .min_by_key(|id| (id.pair, id.side == crate::surface::Side::Left))
                .expect("nonempty class");
            let center = Complex64::from_polar(1.0, tower_angle(class, eps));
            if winding_number(&interp, center, &plane) != 0 {
                found.insert(id);
            }
        }
        return Ok(found);
    }

    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s.position.theta()), hi.max(s.position.theta()))
        });
    // Continue the sample's angle to the interpolated point.
    let lifted = |base: &PhaseState, z: Complex64| {
        let theta = base.position.theta() + (z / base.x()).arg();
        Complex64::new(z.norm().ln(), theta)
    };
    for index in index_of(lo - spacing)..=index_of(hi + spacing) + 1 {
        let center = Complex64::new(0.0, tower_angle(index, eps));
        if winding_number(&interp, center, &lifted) != 0 {
            found.insert(TurningPointId::from_tower_index(index));
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{integrate, launch_on_shell, Heading, IntegratorConfig};
    use crate::surface::{Side, SurfacePoint};

    fn closed(y: f64, e: f64) -> Trajectory {
        let eps = Epsilon::new(e).unwrap();
        let launch = launch_on_shell(
            SurfacePoint::on_negative_imaginary_axis(y).unwrap(),
            Heading::Positive,
            eps,
        );
        let t = integrate(&launch, eps, &IntegratorConfig::default()).unwrap();
        assert!(t.is_closed());
        t
    }

    fn pair(n: u32) -> BTreeSet<TurningPointId> {
        [
            TurningPointId {
                pair: n,
                side: Side::Left,
            },
            TurningPointId {
                pair: n,
                side: Side::Right,
            },
        ]
        .into()
    }

    #[test]
    fn harmonic_ellipse_encloses_both_foci() {
        let eps = Epsilon::new(0.0).unwrap();
        assert_eq!(
            enclosed_turning_points(&closed(1.0, 0.0), eps).unwrap(),
            pair(0)
        );
    }

    #[test]
    fn principal_region_encloses_pair_zero() {
        let eps = Epsilon::new(1.0 / std::f64::consts::PI).unwrap();
        assert_eq!(
            enclosed_turning_points(&closed(0.5, eps.value()), eps).unwrap(),
            pair(0)
        );
    }

    #[test]
    fn separatrix_neighbour_skips_pair_zero() {
        let eps = Epsilon::new(1.0 / std::f64::consts::PI).unwrap();
        assert_eq!(
            enclosed_turning_points(&closed(0.68, eps.value()), eps).unwrap(),
            pair(1)
        );
    }

    #[test]
    fn rejects_open_trajectory() {
        let eps = Epsilon::new(-0.1).unwrap();
        let launch = launch_on_shell(
            SurfacePoint::on_negative_imaginary_axis(0.2).unwrap(),
            Heading::Positive,
            eps,
        );
        let t = integrate(
            &launch,
            eps,
            &IntegratorConfig::default().with_max_time(3.0),
        )
        .unwrap();
        assert!(enclosed_turning_points(&t, eps).is_err());
    }
}

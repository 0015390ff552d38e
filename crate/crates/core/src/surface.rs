//! Points, momenta and turning points on the Riemann surface of
//! `x^2 (ix)^eps`, with the branch cut on the positive-imaginary axis.
//!
//! Angles are always kept unwrapped. The sheet index is a function of the
//! angle and is never stored on its own.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The deformation parameter of `H = p^2 + x^2 (ix)^eps`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Epsilon(f64);

impl Epsilon {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::NonFiniteEpsilon(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Rejects eps <= -2, where the tower formula and the Newton form break down.
    pub fn require_above_minus_two(self) -> Result<Self> {
        if self.0 > -2.0 {
            Ok(self)
        } else {
            Err(Error::EpsilonOutOfRange {
                value: self.0,
                requirement: "eps > -2",
            })
        }
    }

    /// Rejects the broken region eps < 0.
    pub fn require_unbroken(self) -> Result<Self> {
        if self.0 >= 0.0 {
            Ok(self)
        } else {
            Err(Error::EpsilonOutOfRange {
                value: self.0,
                requirement: "eps >= 0",
            })
        }
    }

    pub fn require_positive(self) -> Result<Self> {
        if self.0 > 0.0 {
            Ok(self)
        } else {
            Err(Error::EpsilonOutOfRange {
                value: self.0,
                requirement: "eps > 0",
            })
        }
    }

    /// For integer eps the potential is single-valued and the surface is the plane.
    pub fn is_single_sheeted(self) -> bool {
        self.0.fract() == 0.0
    }

    /// Physical sheet of an unwrapped angle: the lifted sheet index, or 0
    /// when the surface has a single sheet.
    pub fn sheet_of(self, theta: f64) -> i64 {
        if self.is_single_sheeted() {
            0
        } else {
            sheet_index(theta)
        }
    }
}

impl TryFrom<f64> for Epsilon {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<Epsilon> for f64 {
    fn from(eps: Epsilon) -> f64 {
        eps.0
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Lifted sheet index `floor((theta + 3pi/2) / 2pi)`; sheet 0 is
/// `theta in [-3pi/2, pi/2)`.
pub fn sheet_index(theta: f64) -> i64 {
    ((theta + 1.5 * PI) / TAU).floor() as i64
}

/// A point `x = r e^{i theta}` with `r > 0` and unwrapped `theta`.
///
/// The angle is held as `phi = theta + pi/2`, measured from the
/// negative-imaginary axis, so that PT reflection is an exact negation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolarRepr", into = "PolarRepr")]
pub struct SurfacePoint {
    r: f64,
    phi: f64,
}

#[derive(Serialize, Deserialize)]
struct PolarRepr {
    r: f64,
    theta: f64,
}

impl TryFrom<PolarRepr> for SurfacePoint {
    type Error = Error;

    fn try_from(p: PolarRepr) -> Result<Self> {
        Self::new(p.r, p.theta)
    }
}

impl From<SurfacePoint> for PolarRepr {
    fn from(p: SurfacePoint) -> Self {
        Self {
            r: p.r,
            theta: p.theta(),
        }
    }
}

impl SurfacePoint {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "modulus must be positive and finite, got {r}"
            )));
        }
        if !theta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "angle must be finite, got {theta}"
            )));
        }
        Ok(Self {
            r,
            phi: theta + FRAC_PI_2,
        })
    }

    /// The point `-i y` on the principal sheet.
    pub fn on_negative_imaginary_axis(y: f64) -> Result<Self> {
        Self::new(y, -FRAC_PI_2)
    }

    /// Lifts a Cartesian value to the sheet whose angle is closest to
    /// `reference_theta`.
    pub fn from_cartesian(z: Complex64, reference_theta: f64) -> Result<Self> {
        let rotated = z * Complex64::from_polar(1.0, -reference_theta);
        Self::new(z.norm(), reference_theta + rotated.arg())
    }

    pub(crate) fn unchecked(r: f64, theta: f64) -> Self {
        Self {
            r,
            phi: theta + FRAC_PI_2,
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.phi - FRAC_PI_2
    }

    /// Angle measured from the negative-imaginary axis, `theta + pi/2`.
    pub fn axis_angle(&self) -> f64 {
        self.phi
    }

    pub fn sheet(&self) -> i64 {
        sheet_index(self.theta())
    }

    /// Cartesian value `r e^{i theta}`. The winding history is lost.
    pub fn to_cartesian(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.theta())
    }

    /// Coordinates `(ln r, theta)` in which the surface becomes a plane.
    pub fn log_lift(&self) -> (f64, f64) {
        (self.r.ln(), self.theta())
    }

    /// `r^q e^{i (q theta + phase)}`, the sheet-consistent branch of a power.
    pub fn power(&self, q: f64, phase: f64) -> Complex64 {
        Complex64::from_polar(self.r.powf(q), q * self.theta() + phase)
    }
}

/// Polar momentum `p = a e^{i alpha}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumPolar {
    a: f64,
    alpha: f64,
}

impl MomentumPolar {
    pub fn new(a: f64, alpha: f64) -> Result<Self> {
        if !(a >= 0.0 && a.is_finite() && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "invalid momentum ({a}, {alpha})"
            )));
        }
        Ok(Self { a, alpha })
    }

    pub fn from_cartesian(p: Complex64) -> Self {
        Self {
            a: p.norm(),
            alpha: p.arg(),
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn to_cartesian(&self) -> Complex64 {
        Complex64::from_polar(self.a, self.alpha)
    }
}

/// Full dynamical state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub position: SurfacePoint,
    pub momentum: MomentumPolar,
    pub time: f64,
}

impl PhaseState {
    pub fn new(position: SurfacePoint, momentum: MomentumPolar, time: f64) -> Self {
        Self {
            position,
            momentum,
            time,
        }
    }

    pub fn x(&self) -> Complex64 {
        self.position.to_cartesian()
    }

    pub fn p(&self) -> Complex64 {
        self.momentum.to_cartesian()
    }
}

/// `x^2 (ix)^eps = r^(2+eps) exp(i[(2+eps) theta + eps pi/2])`.
pub fn potential(point: &SurfacePoint, eps: Epsilon) -> Complex64 {
    let e = eps.value();
    point.power(2.0 + e, e * FRAC_PI_2)
}

/// The Hamiltonian `p^2 + x^2 (ix)^eps` at a state.
pub fn energy(state: &PhaseState, eps: Epsilon) -> Complex64 {
    let p = state.p();
    p * p + potential(&state.position, eps)
}

/// Newton's acceleration `-2(2+eps) x (ix)^eps`.
pub fn acceleration(point: &SurfacePoint, eps: Epsilon) -> Complex64 {
    let e = eps.value();
    -2.0 * (2.0 + e) * point.power(1.0 + e, e * FRAC_PI_2)
}

/// Angle at which the terminating curve leaves the right turning point of
/// the principal pair, `pi eps / (4 + 2 eps)`.
pub fn turning_point_slope(eps: Epsilon) -> Result<f64> {
    let e = eps.require_above_minus_two()?.value();
    Ok(PI * e / (4.0 + 2.0 * e))
}

/// PT reflection `x -> -x*`, i.e. `(r, theta) -> (r, -pi - theta)`.
pub fn pt_reflect(point: &SurfacePoint) -> SurfacePoint {
    SurfacePoint {
        r: point.r,
        phi: -point.phi,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// Identifies one member of a PT-conjugate pair of turning points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TurningPointId {
    pub pair: u32,
    pub side: Side,
}

impl TurningPointId {
    /// Pair `n` is made of tower indices `N = n` (right) and `N = -n - 1` (left).
    pub fn from_tower_index(index: i64) -> Self {
        if index >= 0 {
            Self {
                pair: index as u32,
                side: Side::Right,
            }
        } else {
            Self {
                pair: (-index - 1) as u32,
                side: Side::Left,
            }
        }
    }

    pub fn tower_index(&self) -> i64 {
        match self.side {
            Side::Right => self.pair as i64,
            Side::Left => -(self.pair as i64) - 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoint {
    pub id: TurningPointId,
    pub location: SurfacePoint,
}

/// Unwrapped angle `(4N - eps) pi / (2 eps + 4)` of tower member `N`.
pub fn tower_angle(index: i64, eps: Epsilon) -> f64 {
    let e = eps.value();
    (4.0 * index as f64 - e) * PI / (2.0 * e + 4.0)
}

/// Member `side` of turning-point pair `pair`.
pub fn turning_point(pair: u32, side: Side, eps: Epsilon) -> Result<TurningPoint> {
    eps.require_above_minus_two()?;
    let id = TurningPointId { pair, side };
    Ok(TurningPoint {
        id,
        location: SurfacePoint::unchecked(1.0, tower_angle(id.tower_index(), eps)),
    })
}

/// Tower index of the turning point whose lifted angle is nearest to `theta`.
pub fn nearest_tower_index(theta: f64, eps: Epsilon) -> i64 {
    let e = eps.value();
    (((2.0 * e + 4.0) * theta / PI + e) / 4.0).round() as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eps(v: f64) -> Epsilon {
        Epsilon::new(v).unwrap()
    }

    fn state(r: f64, theta: f64, a: f64, alpha: f64) -> PhaseState {
        PhaseState::new(
            SurfacePoint::new(r, theta).unwrap(),
            MomentumPolar::new(a, alpha).unwrap(),
            0.0,
        )
    }

    #[test]
    fn energy_examples() {
        let e = energy(&state(1.0, 0.0, 0.0, 0.0), eps(0.0));
        assert!((e - 1.0).norm() < 1e-15);

        let e = energy(&state(1.0, -FRAC_PI_2, 2f64.sqrt(), 0.0), eps(0.0));
        assert!((e - 1.0).norm() < 1e-14);

        // The N = 1 tower angle is pi - 0.64702...; the quoted 0.64696 is
        // good to about 1e-4.
        let t1 = turning_point(1, Side::Right, eps(1.0 / PI)).unwrap();
        assert!((t1.location.theta() - (PI - 0.64696)).abs() < 1e-4);
        assert_eq!(t1.location.sheet(), 1);
        let e = energy(
            &PhaseState::new(t1.location, MomentumPolar::new(0.0, 0.0).unwrap(), 0.0),
            eps(1.0 / PI),
        );
        assert!((e - 1.0).norm() < 1e-12);
    }

    #[test]
    fn principal_turning_points() {
        let r = turning_point(0, Side::Right, eps(0.0)).unwrap();
        let l = turning_point(0, Side::Left, eps(0.0)).unwrap();
        assert_eq!(r.location.theta(), 0.0);
        assert!((l.location.theta() + PI).abs() < 1e-15);

        let r = turning_point(0, Side::Right, eps(1.0 / PI)).unwrap();
        assert!((r.location.theta() + 0.215_674).abs() < 1e-6);
        let z = r.location.to_cartesian();
        assert!((z.re - 0.976_84).abs() < 1e-5 && (z.im + 0.214_00).abs() < 1e-5);

        for side in [Side::Left, Side::Right] {
            let t = turning_point(0, side, eps(1e9)).unwrap();
            assert!((t.location.theta() + FRAC_PI_2).abs() < 1e-8);
        }
    }

    #[test]
    fn turning_point_rejects_pole() {
        assert!(turning_point(0, Side::Right, eps(-2.0)).is_err());
        assert!(turning_point_slope(eps(-2.5)).is_err());
    }

    #[test]
    fn reflection_examples() {
        let p = pt_reflect(&SurfacePoint::new(1.0, 0.0).unwrap());
        assert!((p.theta() + PI).abs() < 1e-15);
        let p = pt_reflect(&SurfacePoint::new(2.0, -FRAC_PI_2).unwrap());
        assert_eq!(p.theta(), -FRAC_PI_2);
        let q = SurfacePoint::new(1.0, 1.25 * PI).unwrap();
        assert_eq!(q.sheet(), 1);
        let p = pt_reflect(&q);
        assert!((p.theta() + 2.25 * PI).abs() < 1e-15);
        assert_eq!(p.sheet(), -1);
    }

    #[test]
    fn acceleration_examples() {
        let a = acceleration(&SurfacePoint::new(1.0, 0.0).unwrap(), eps(0.0));
        assert!((a + 4.0).norm() < 1e-15);
        let a = acceleration(&SurfacePoint::new(1.0, FRAC_PI_2).unwrap(), eps(1.0));
        assert!((a - Complex64::new(0.0, 6.0)).norm() < 1e-14);
        for e in [0.0, 0.3, 1.0 / PI, 1.0, 2.0, 1.0 + 2f64.sqrt(), 7.5] {
            let t = turning_point(0, Side::Right, eps(e)).unwrap();
            let want = -(4.0 + 2.0 * e) * Complex64::from_polar(1.0, PI * e / (4.0 + 2.0 * e));
            assert!(
                (acceleration(&t.location, eps(e)) - want).norm() < 1e-12,
                "eps = {e}"
            );
        }
    }

    #[test]
    fn slope_examples() {
        assert_eq!(turning_point_slope(eps(0.0)).unwrap(), 0.0);
        let s = turning_point_slope(eps(1.0 / PI)).unwrap();
        assert!((s - PI / (2.0 + 4.0 * PI)).abs() < 1e-15);
        assert!((turning_point_slope(eps(2.0)).unwrap() - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn sheet_boundaries() {
        assert_eq!(sheet_index(-FRAC_PI_2), 0);
        assert_eq!(sheet_index(-1.5 * PI), 0);
        assert_eq!(sheet_index(FRAC_PI_2 - 1e-12), 0);
        assert_eq!(sheet_index(FRAC_PI_2 + 1e-12), 1);
        assert_eq!(sheet_index(-1.5 * PI - 1e-12), -1);
    }

    #[test]
    fn tower_index_round_trip() {
        for n in -20..20 {
            let id = TurningPointId::from_tower_index(n);
            assert_eq!(id.tower_index(), n);
            assert_eq!(nearest_tower_index(tower_angle(n, eps(0.7)), eps(0.7)), n);
        }
    }

    #[test]
    fn cartesian_lift_uses_reference() {
        let z = Complex64::new(0.0, -1.0);
        let p = SurfacePoint::from_cartesian(z, 3.0 * PI).unwrap();
        assert!((p.theta() - 3.5 * PI).abs() < 1e-14);
        assert_eq!(p.sheet(), 2);
    }

    proptest! {
        #[test]
        fn unit_circle_and_pairing(n in 0u32..40, e in 0.0f64..20.0) {
            let eps = eps(e);
            let r = turning_point(n, Side::Right, eps).unwrap();
            let l = turning_point(n, Side::Left, eps).unwrap();
            prop_assert!((r.location.r() - 1.0).abs() < 1e-14);
            prop_assert!((l.location.r() - 1.0).abs() < 1e-14);
            let m = pt_reflect(&r.location);
            prop_assert!((m.theta() - l.location.theta()).abs() < 1e-12);
            for t in [r, l] {
                let s = PhaseState::new(t.location, MomentumPolar::new(0.0, 0.0).unwrap(), 0.0);
                prop_assert!((energy(&s, eps) - 1.0).norm() < 1e-12);
            }
        }

        #[test]
        fn reflection_is_involution(r in 1e-3f64..1e3, theta in -50.0f64..50.0) {
            let p = SurfacePoint::new(r, theta).unwrap();
            let q = pt_reflect(&pt_reflect(&p));
            prop_assert_eq!(p, q);
            let k = p.sheet();
            // Off the cut lines the sheet index is negated.
            let frac = ((theta + 1.5 * PI) / TAU).fract().abs();
            prop_assume!(frac > 1e-9 && frac < 1.0 - 1e-9);
            prop_assert_eq!(pt_reflect(&p).sheet(), -k);
        }

        #[test]
        fn sheet_arithmetic(theta in -100.0f64..100.0) {
            prop_assert_eq!(sheet_index(theta + TAU), sheet_index(theta) + 1);
        }
    }
}

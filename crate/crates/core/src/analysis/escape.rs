use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{EventKind, Trajectory};
use crate::surface::{sheet_index, Epsilon, MomentumPolar, PhaseState, SurfacePoint};

/// Samples beyond this radius enter the blowup fit.
pub const TAIL_RADIUS: f64 = 100.0;
pub const MIN_TAIL: usize = 20;
/// RMS residual in `ln r` below which a fit is accepted.
pub const FIT_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapeRay {
    pub index: i64,
    pub theta: f64,
    pub sheet: i64,
}

/// Rays `theta = -pi/2 + (2N - 1) pi / eps` along which `V` is real and negative.
pub fn escape_angles(eps: Epsilon, range: RangeInclusive<i64>) -> Result<Vec<EscapeRay>> {
    let e = eps.require_positive()?.value();
    Ok(range
        .map(|n| {
            let theta = -FRAC_PI_2 + (2 * n - 1) as f64 * PI / e;
            EscapeRay {
                index: n,
                theta,
                sheet: sheet_index(theta),
            }
        })
        .collect())
}

/// `|1 + e^{i pi eps / 2} e^{i eps theta}|`, zero on an escape ray.
pub fn escape_phase_residual(theta: f64, eps: Epsilon) -> f64 {
    let e = eps.value();
    (1.0 + Complex64::from_polar(1.0, PI * e / 2.0 + e * theta)).norm()
}

/// Outward-moving state at radius `r0` on `ray`.
pub fn launch_on_ray(ray: &EscapeRay, r0: f64, eps: Epsilon) -> Result<PhaseState> {
    let x0 = SurfacePoint::new(r0, ray.theta)?;
    let mut p = (Complex64::new(1.0, 0.0) - crate::surface::potential(&x0, eps)).sqrt();
    if (p * Complex64::from_polar(1.0, -ray.theta)).re < 0.0 {
        p = -p;
    }
    Ok(PhaseState::new(x0, MomentumPolar::from_cartesian(p), 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapeFit {
    pub t_star: f64,
    pub fitted_exponent: f64,
    pub expected_exponent: f64,
    /// RMS residual of the fit in `ln r`.
    pub residual: f64,
    pub tail_samples: usize,
    pub accepted: bool,
}

impl EscapeFit {
    pub fn relative_exponent_error(&self) -> f64 {
        ((self.fitted_exponent - self.expected_exponent) / self.expected_exponent).abs()
    }
}

/// Slope, intercept and RMS residual of the least-squares line through `(u, v)`.
fn line_fit(u: &[f64], v: &[f64]) -> (f64, f64, f64) {
    let n = u.len() as f64;
    let mu = u.iter().sum::<f64>() / n;
    let mv = v.iter().sum::<f64>() / n;
    let suu: f64 = u.iter().map(|a| (a - mu).powi(2)).sum();
    let suv: f64 = u.iter().zip(v).map(|(a, b)| (a - mu) * (b - mv)).sum();
    let k = suv / suu;
    let c = mv - k * mu;
    let rss: f64 = u.iter().zip(v).map(|(a, b)| (b - c - k * a).powi(2)).sum();
    (k, c, (rss / n).sqrt())
}

/// Fits `ln r = c + k ln(t_star - t)` to the tail of an escaping trajectory,
/// searching `t_star` on a log scale past the last sample.
pub fn fit_escape(traj: &Trajectory, eps: Epsilon) -> Result<EscapeFit> {
    let e = eps.require_positive()?.value();
    if !matches!(
        traj.terminal_event().map(|ev| ev.kind),
        Some(EventKind::Escape { .. })
    ) {
        return Err(Error::InvalidArgument(
            "trajectory does not end in an escape".into(),
        ));
    }
    let tail: Vec<&PhaseState> = traj
        .samples
        .iter()
        .filter(|s| s.position.r() > TAIL_RADIUS)
        .collect();
    if tail.len() < MIN_TAIL {
        return Err(Error::InsufficientTail { found: tail.len() });
    }
    let t_last = tail.last().unwrap().time;
    let span = t_last - tail[0].time;
    let v: Vec<f64> = tail.iter().map(|s| s.position.r().ln()).collect();
    let rms = |g: f64| {
        let u: Vec<f64> = tail
            .iter()
            .map(|s| (t_last + g.exp() - s.time).ln())
            .collect();
        line_fit(&u, &v)
    };
    let (g_lo, g_hi) = (
        (1e-15 * t_last.abs().max(1.0)).ln(),
        (10.0 * span.max(1e-12)).ln(),
    );
    let steps = 400;
    let grid = |k: usize| g_lo + (g_hi - g_lo) * k as f64 / steps as f64;
    let kbest = (0..=steps)
        .min_by(|&a, &b| rms(grid(a)).2.total_cmp(&rms(grid(b)).2))
        .unwrap();
    let (mut lo, mut hi) = (grid(kbest.saturating_sub(1)), grid((kbest + 1).min(steps)));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let c = hi - g * (hi - lo);
        let d = lo + g * (hi - lo);
        if rms(c).2 < rms(d).2 {
            hi = d;
        } else {
            lo = c;
        }
    }
    let gap = 0.5 * (lo + hi);
    let (k, _, residual) = rms(gap);
    Ok(EscapeFit {
        t_star: t_last + gap.exp(),
        fitted_exponent: k,
        expected_exponent: -2.0 / e,
        residual,
        tail_samples: tail.len(),
        accepted: residual < FIT_TOLERANCE,
    })
}

use serde::{Deserialize, Serialize};

use super::classify::{classify, Verdict};
use super::completion::pt_completion;
use crate::error::{Error, Result};
use crate::integrator::{
    integrate_observed, launch_on_shell, Flow, Heading, IntegratorConfig, Observer, StopReason,
};
use crate::surface::{sheet_index, Epsilon, PhaseState, SurfacePoint};

/// Number of probes in the monotonicity scan preceding bisection.
pub const SCAN_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    /// The critical point is `-i y`.
    pub y: f64,
    pub bracket: (f64, f64),
    pub probes: usize,
}

struct DepthWatch(u32);

impl Observer for DepthWatch {
    fn on_step(&mut self, state: &PhaseState) -> Flow {
        if sheet_index(state.position.theta()).unsigned_abs() > self.0 as u64 {
            Flow::Stop
        } else {
            Flow::Continue
        }
    }
}

/// Whether the orbit from `-iy` reaches a lifted sheet deeper than `depth`
/// before closing. An orbit that returns to the principal axis is closed by
/// reflection; any other orbit that fails to close counts as leaving.
pub fn exceeds_sheet_depth(
    y: f64,
    depth: u32,
    eps: Epsilon,
    config: &IntegratorConfig,
) -> Result<bool> {
    let launch = launch_on_shell(
        SurfacePoint::on_negative_imaginary_axis(y)?,
        Heading::Positive,
        eps,
    );
    let traj = integrate_observed(&launch, eps, config, &mut DepthWatch(depth))?;
    if traj.is_closed() {
        return Ok(traj.stop == StopReason::Observer);
    }
    Ok(match pt_completion(&traj) {
        Some(orbit) => orbit
            .samples
            .iter()
            .any(|s| sheet_index(s.position.theta()).unsigned_abs() > depth as u64),
        None => true,
    })
}

/// Whether the orbit from `-iy` lies outside the nested regions up to
/// `boundary`. For the principal boundary this is [`exceeds_sheet_depth`];
/// past it, an orbit also leaves when it closes around a pair beyond
/// `boundary`, since neighbouring regions can share their sheets.
pub fn leaves_region(
    y: f64,
    boundary: u32,
    eps: Epsilon,
    config: &IntegratorConfig,
) -> Result<bool> {
    if boundary == 0 {
        return exceeds_sheet_depth(y, 0, eps, config);
    }
    let c = classify(SurfacePoint::on_negative_imaginary_axis(y)?, eps, config)?;
    Ok(match c.verdict {
        Verdict::Closed {
            ref sheets_visited,
            ref enclosed_pairs,
            ..
        } => {
            sheets_visited
                .iter()
                .any(|s| s.unsigned_abs() > boundary as u64)
                || enclosed_pairs.iter().any(|&k| k > boundary)
        }
        _ => true,
    })
}

/// Locates the single change of `predicate` in `[y_lo, y_hi]`: an
/// equispaced scan must show exactly one switch, which is then bisected to
/// width `tol`.
pub fn bisect_transition(
    mut predicate: impl FnMut(f64) -> Result<bool>,
    y_lo: f64,
    y_hi: f64,
    tol: f64,
) -> Result<CriticalPoint> {
    if !(y_lo > 0.0 && y_hi > y_lo && tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < y_lo < y_hi and tol > 0, got [{y_lo}, {y_hi}], {tol}"
        )));
    }
    let ys: Vec<f64> = (0..SCAN_POINTS)
        .map(|k| y_lo + (y_hi - y_lo) * k as f64 / (SCAN_POINTS - 1) as f64)
        .collect();
    let flags = ys
        .iter()
        .map(|&y| predicate(y))
        .collect::<Result<Vec<_>>>()?;
    let switches: Vec<usize> = (1..SCAN_POINTS)
        .filter(|&k| flags[k] != flags[k - 1])
        .collect();
    match switches.len() {
        0 => return Err(Error::BracketInvalid { lo: y_lo, hi: y_hi }),
        1 => {}
        _ => return Err(Error::NonMonotone { lo: y_lo, hi: y_hi }),
    }
    let k = switches[0];
    let (mut lo, mut hi) = (ys[k - 1], ys[k]);
    let low_flag = flags[k - 1];
    let mut probes = SCAN_POINTS;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        probes += 1;
        if predicate(mid)? == low_flag {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CriticalPoint {
        y: 0.5 * (lo + hi),
        bracket: (lo, hi),
        probes,
    })
}

/// Bisects for the launch ordinate where the orbit first leaves the regions
/// up to `boundary`.
pub fn critical_point(
    eps: Epsilon,
    boundary: u32,
    y_lo: f64,
    y_hi: f64,
    tol: f64,
    config: &IntegratorConfig,
) -> Result<CriticalPoint> {
    bisect_transition(|y| leaves_region(y, boundary, eps, config), y_lo, y_hi, tol)
}

/// Whether the orbit from `-iy` is closed around the principal pair alone.
pub fn in_principal_region(y: f64, eps: Epsilon, config: &IntegratorConfig) -> Result<bool> {
    let c = classify(SurfacePoint::on_negative_imaginary_axis(y)?, eps, config)?;
    Ok(
        matches!(c.verdict, Verdict::Closed { ref enclosed_pairs, .. } if enclosed_pairs.len() == 1 && enclosed_pairs.contains(&0)),
    )
}

/// Ordinate of the edge of the principal region inside `[y_lo, y_hi]`.
pub fn principal_region_edge(
    eps: Epsilon,
    y_lo: f64,
    y_hi: f64,
    tol: f64,
    config: &IntegratorConfig,
) -> Result<CriticalPoint> {
    bisect_transition(|y| in_principal_region(y, eps, config), y_lo, y_hi, tol)
}

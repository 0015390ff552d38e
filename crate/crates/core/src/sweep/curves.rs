use std::fmt;

use serde::{Deserialize, Serialize};

use super::exec::Execution;
use crate::analysis::{critical_point, leaves_region, terminating_start};
use crate::error::{Error, Result};
use crate::integrator::IntegratorConfig;
use crate::surface::Epsilon;

/// Largest ordinate the critical-point bracket may grow to.
pub const BRACKET_CAP: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "n", rename_all = "snake_case")]
pub enum CurveKind {
    X0,
    S0,
    Xn(u32),
    Sn(u32),
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveKind::X0 => f.write_str("x0"),
            CurveKind::S0 => f.write_str("s0"),
            CurveKind::Xn(n) => write!(f, "x{n}"),
            CurveKind::Sn(n) => write!(f, "s{n}"),
        }
    }
}

/// The curve point is `-i value_y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalCurveSample {
    pub epsilon: f64,
    pub value_y: f64,
    pub kind: CurveKind,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFailure {
    pub epsilon: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepResult {
    pub samples: Vec<CriticalCurveSample>,
    pub failures: Vec<SweepFailure>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Bisection tolerance on the ordinate.
    pub tolerance: f64,
    pub execution: Execution,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            execution: Execution::Parallel,
        }
    }
}

fn sorted_grid(grid: &[f64]) -> Result<Vec<f64>> {
    if let Some(bad) = grid.iter().find(|e| !e.is_finite()) {
        return Err(Error::NonFiniteEpsilon(*bad));
    }
    let mut g = grid.to_vec();
    g.sort_by(f64::total_cmp);
    g.dedup();
    Ok(g)
}

fn run(
    grid: &[f64],
    options: &SweepOptions,
    item: impl Fn(Epsilon) -> Result<CriticalCurveSample> + Sync + Send,
) -> Result<SweepResult> {
    let grid = sorted_grid(grid)?;
    let outcomes = options
        .execution
        .map(&grid, |&e| Epsilon::new(e).and_then(&item));
    let mut result = SweepResult::default();
    for (&epsilon, outcome) in grid.iter().zip(outcomes) {
        match outcome {
            Ok(s) => result.samples.push(s),
            Err(e) => result.failures.push(SweepFailure {
                epsilon,
                reason: e.to_string(),
            }),
        }
    }
    Ok(result)
}

/// Critical point `x_depth` at one `eps`, doubling the bracket from `y = 1`
/// until the orbit leaves depth `depth`.
pub fn critical_point_search(
    eps: Epsilon,
    depth: u32,
    tol: f64,
    config: &IntegratorConfig,
) -> Result<f64> {
    let mut hi = 1.0;
    while !leaves_region(hi, depth, eps, config)? {
        hi *= 2.0;
        if hi > BRACKET_CAP {
            return Err(Error::Diverged { cap: BRACKET_CAP });
        }
    }
    let lo = if depth == 0 { 1e-3 } else { 0.5 * hi };
    let lo = if leaves_region(lo, depth, eps, config)? {
        1e-3
    } else {
        lo
    };
    Ok(critical_point(eps, depth, lo, hi, tol, config)?.y)
}

/// `x_0(eps)` over a grid in `(0, 2)`.
pub fn sweep_x0(
    grid: &[f64],
    config: &IntegratorConfig,
    options: &SweepOptions,
) -> Result<SweepResult> {
    run(grid, options, |eps| {
        let e = eps.require_positive()?.value();
        if e >= 2.0 {
            return Err(Error::EpsilonOutOfRange {
                value: e,
                requirement: "0 < eps < 2",
            });
        }
        let value_y = critical_point_search(eps, 0, options.tolerance, config)?;
        Ok(CriticalCurveSample {
            epsilon: e,
            value_y,
            kind: CurveKind::X0,
            tolerance: options.tolerance,
        })
    })
}

/// `s_0(eps)` over a grid of positive `eps`.
pub fn sweep_s0(
    grid: &[f64],
    config: &IntegratorConfig,
    options: &SweepOptions,
) -> Result<SweepResult> {
    run(grid, options, |eps| {
        let e = eps.require_positive()?.value();
        let path = terminating_start(0, eps, config)?;
        Ok(CriticalCurveSample {
            epsilon: e,
            value_y: path.s_value,
            kind: CurveKind::S0,
            tolerance: 1e-10,
        })
    })
}

/// Golden-section minimum of `Im s_0(eps) = -y`, returned as
/// `(eps_star, y(eps_star))`.
pub fn find_s0_minimum(eps_lo: f64, eps_hi: f64, config: &IntegratorConfig) -> Result<(f64, f64)> {
    const TOL: f64 = 1e-3;
    if !(eps_lo > 0.0 && eps_hi > eps_lo && eps_hi.is_finite()) {
        return Err(Error::BracketInvalid {
            lo: eps_lo,
            hi: eps_hi,
        });
    }
    let f =
        |e: f64| -> Result<f64> { Ok(-terminating_start(0, Epsilon::new(e)?, config)?.s_value) };
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (eps_lo, eps_hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    let star = 0.5 * (a + b);
    let value = f(star)?;
    if value > f(eps_lo)? || value > f(eps_hi)? {
        return Err(Error::BracketInvalid {
            lo: eps_lo,
            hi: eps_hi,
        });
    }
    Ok((star, -value))
}

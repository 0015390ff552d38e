use serde::{Deserialize, Serialize};

use super::exec::Execution;
use crate::analysis::{
    principal_region_edge, shoot_from_turning_point, terminating_start, CriticalPoint,
    TerminatingPath,
};
use crate::error::{Error, Result};
use crate::integrator::{IntegratorConfig, Trajectory};
use crate::surface::Epsilon;

/// Radius, in units of the turning-point circle, that an open path must
/// reach to count as spiralling outward.
pub const SPIRAL_RADIUS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapOptions {
    /// Bracket for the edge of the principal region.
    pub edge_bracket: (f64, f64),
    pub edge_tolerance: f64,
    pub execution: Execution,
}

impl Default for GapOptions {
    fn default() -> Self {
        Self {
            edge_bracket: (0.05, 0.5),
            edge_tolerance: 1e-4,
            execution: Execution::Parallel,
        }
    }
}

/// Shape of a path that never reached the principal axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpenPath {
    pub duration: f64,
    pub max_radius: f64,
    pub final_radius: f64,
    /// Net change of the unwrapped angle, in turns.
    pub net_turns: f64,
    pub lowest_sheet: i64,
    pub highest_sheet: i64,
    pub pt_symmetric: bool,
    pub spirals_outward: bool,
}

impl OpenPath {
    fn of(traj: &Trajectory) -> Self {
        let last = traj.samples.last().unwrap_or(&traj.launch);
        let sheets = traj.sheets_visited();
        let max_radius = traj.max_radius();
        Self {
            duration: traj.end_time() - traj.launch.time,
            max_radius,
            final_radius: last.position.r(),
            net_turns: (last.position.theta() - traj.launch.position.theta())
                / std::f64::consts::TAU,
            lowest_sheet: sheets.first().copied().unwrap_or(0),
            highest_sheet: sheets.last().copied().unwrap_or(0),
            pt_symmetric: false,
            spirals_outward: max_radius > SPIRAL_RADIUS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum GapOutcome {
    Crossing(TerminatingPath),
    NoTermination {
        reason: String,
        path: Option<OpenPath>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub n: u32,
    #[serde(flatten)]
    pub outcome: GapOutcome,
}

impl GapRow {
    pub fn s_value(&self) -> Option<f64> {
        match &self.outcome {
            GapOutcome::Crossing(p) => Some(p.s_value),
            GapOutcome::NoTermination { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapTable {
    pub epsilon: f64,
    pub rows: Vec<GapRow>,
    /// Edge of the principal region, the lower end of the gap.
    pub principal_edge: Option<CriticalPoint>,
    pub edge_failure: Option<String>,
    /// Pairs whose crossing lies in the gap, from the bottom (largest `y`) up.
    pub in_gap_order: Vec<u32>,
}

fn row(n: u32, eps: Epsilon, config: &IntegratorConfig) -> GapRow {
    let outcome = match terminating_start(n, eps, config) {
        Ok(path) => GapOutcome::Crossing(path),
        Err(Error::NoTermination { reason, .. }) => {
            let path = shoot_from_turning_point(n, eps, config)
                .ok()
                .map(|s| OpenPath::of(&s.trajectory));
            GapOutcome::NoTermination { reason, path }
        }
        Err(e) => GapOutcome::NoTermination {
            reason: e.to_string(),
            path: None,
        },
    };
    GapRow { n, outcome }
}

/// Terminating crossings `s_n` for `n = 0..=n_max` and the edge of the
/// principal region, for `eps > 2`.
pub fn gap_table(
    eps: Epsilon,
    n_max: u32,
    config: &IntegratorConfig,
    options: &GapOptions,
) -> Result<GapTable> {
    let e = eps.value();
    if e <= 2.0 {
        return Err(Error::EpsilonOutOfRange {
            value: e,
            requirement: "eps > 2",
        });
    }
    let ns: Vec<u32> = (0..=n_max).collect();
    let rows = options.execution.map(&ns, |&n| row(n, eps, config));
    let (lo, hi) = options.edge_bracket;
    let (principal_edge, edge_failure) =
        match principal_region_edge(eps, lo, hi, options.edge_tolerance, config) {
            Ok(edge) => (Some(edge), None),
            Err(err) => (None, Some(err.to_string())),
        };
    let mut in_gap: Vec<(f64, u32)> = rows
        .iter()
        .filter_map(|r| r.s_value().map(|s| (s, r.n)))
        .filter(|&(s, _)| principal_edge.is_none_or(|edge| s < edge.y))
        .collect();
    in_gap.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(GapTable {
        epsilon: e,
        rows,
        principal_edge,
        edge_failure,
        in_gap_order: in_gap.into_iter().map(|(_, n)| n).collect(),
    })
}

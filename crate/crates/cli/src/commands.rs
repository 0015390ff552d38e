use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use riemann_flow::analysis::{
    analytic_period, classify_launch, critical_point, escape_angles, escape_phase_residual,
    fit_escape, terminating_start, EscapeFit, EscapeRay, LAUNCH_DELTA, TAIL_RADIUS,
};
use riemann_flow::integrator::{
    integrate, launch_from_turning_point, launch_on_shell, Event, Heading, StopReason,
};
use riemann_flow::io::csv::TrajectoryTable;
use riemann_flow::io::{
    emit_svg_plot, read_trajectory_csv, to_json, write_json, write_trajectory_csv, PlotData,
    PlotOptions, RunConfig, SweepSeries, TrajectoryPlot,
};
use riemann_flow::surface::{turning_point, Epsilon, Side, TurningPoint};
use riemann_flow::sweep::{
    self, critical_point_search, find_s0_minimum, gap_table, GapOptions, SweepOptions, SweepResult,
};
use riemann_flow::{Error, IntegratorConfig, PhaseState, Trajectory};
use serde::Serialize;

use crate::{Common, Failure, GridArgs, PairArgs};

type CmdResult = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn emit(text: &str, out: Option<&Path>) -> CmdResult {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|source| {
            Error::Io {
                path: p.to_path_buf(),
                source,
            }
            .into()
        }),
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> CmdResult {
    match out {
        Some(p) => Ok(write_json(value, p)?),
        None => emit(&to_json(value), None),
    }
}

fn integrator(cfg: &RunConfig) -> Result<IntegratorConfig, Failure> {
    Ok(cfg.integrator(IntegratorConfig::default())?)
}

fn pair_turning_point(cfg: &RunConfig, eps: Epsilon) -> Result<TurningPoint, Failure> {
    let n = cfg.n.ok_or_else(|| usage("--n is required"))?;
    Ok(turning_point(n, cfg.side.unwrap_or(Side::Right), eps)?)
}

fn pair_config(common: &Common, pair: &PairArgs) -> Result<RunConfig, Failure> {
    Ok(common.run_config(RunConfig {
        n: pair.n,
        side: pair.side,
        ..Default::default()
    })?)
}

#[derive(Serialize)]
struct TrajectorySummary<'a> {
    epsilon: f64,
    samples: usize,
    end_time: f64,
    stop: StopReason,
    terminal_event: Option<&'a Event>,
    sheets_visited: Vec<i64>,
    max_radius: f64,
    max_energy_error: f64,
}

fn summary(traj: &Trajectory) -> TrajectorySummary<'_> {
    TrajectorySummary {
        epsilon: traj.epsilon.value(),
        samples: traj.samples.len(),
        end_time: traj.end_time(),
        stop: traj.stop,
        terminal_event: traj.terminal_event(),
        sheets_visited: traj.sheets_visited().into_iter().collect(),
        max_radius: traj.max_radius(),
        max_energy_error: traj.max_energy_error(),
    }
}

fn launch_state(cfg: &RunConfig, eps: Epsilon) -> Result<PhaseState, Failure> {
    if cfg.n.is_some() {
        let tp = pair_turning_point(cfg, eps)?;
        return Ok(launch_from_turning_point(&tp, eps, LAUNCH_DELTA)?);
    }
    Ok(launch_on_shell(cfg.launch_point()?, Heading::Positive, eps))
}

pub fn trajectory(common: &Common, pair: &PairArgs) -> CmdResult {
    let cfg = pair_config(common, pair)?;
    let eps = cfg.epsilon()?;
    let ic = integrator(&cfg)?;
    let traj = integrate(&launch_state(&cfg, eps)?, eps, &ic)?;
    match &common.out {
        Some(p) => {
            write_trajectory_csv(&traj, p)?;
            emit_json(&summary(&traj), None)
        }
        None => emit(&TrajectoryTable::from_trajectory(&traj).render(), None),
    }
}

#[derive(Serialize)]
struct PeriodReport {
    epsilon: f64,
    analytic: f64,
    numeric: Option<f64>,
    difference: Option<f64>,
    relative_difference: Option<f64>,
}

pub fn period(common: &Common) -> CmdResult {
    let cfg = common.run_config(RunConfig::default())?;
    let eps = cfg.epsilon()?;
    let analytic = analytic_period(eps)?;
    let numeric = if cfg.y0.is_some() || cfg.re.is_some() {
        let ic = integrator(&cfg)?;
        let c = classify_launch(
            &launch_on_shell(cfg.launch_point()?, Heading::Positive, eps),
            eps,
            &ic,
        )?;
        match c.verdict {
            riemann_flow::analysis::Verdict::Closed { period, .. } => Some(period),
            _ => {
                return Err(Failure::Numerical(format!(
                    "orbit is not closed: {}",
                    to_json(&c).trim()
                )))
            }
        }
    } else {
        None
    };
    let difference = numeric.map(|t| t - analytic);
    emit_json(
        &PeriodReport {
            epsilon: eps.value(),
            analytic,
            numeric,
            difference,
            relative_difference: difference.map(|d| d.abs() / analytic),
        },
        common.out.as_deref(),
    )
}

#[derive(Serialize)]
struct TurningPointRow {
    pair: u32,
    side: Side,
    theta: f64,
    x: Complex64,
    sheet: i64,
}

pub fn turning_points(common: &Common, nmax: Option<u32>) -> CmdResult {
    let cfg = common.run_config(RunConfig {
        nmax,
        ..Default::default()
    })?;
    let eps = cfg.epsilon()?;
    let mut rows = vec![];
    for n in 0..=cfg.nmax.unwrap_or(3) {
        for side in [Side::Left, Side::Right] {
            let tp = turning_point(n, side, eps)?;
            let theta = tp.location.theta();
            rows.push(TurningPointRow {
                pair: n,
                side,
                theta,
                x: tp.location.to_cartesian(),
                sheet: eps.sheet_of(theta),
            });
        }
    }
    emit_json(&rows, common.out.as_deref())
}

#[derive(Serialize)]
struct CriticalReport {
    epsilon: f64,
    boundary: u32,
    /// The critical point is `-i y`.
    y: f64,
    bracket: Option<(f64, f64)>,
    tolerance: f64,
}

pub fn critical(
    common: &Common,
    boundary: Option<u32>,
    bracket: Option<Vec<f64>>,
    tol: Option<f64>,
) -> CmdResult {
    let extra = RunConfig {
        boundary,
        bracket: bracket.map(|b| [b[0], b[1]]),
        tol,
        ..Default::default()
    };
    let cfg = common.run_config(extra)?;
    let eps = cfg.epsilon()?;
    let ic = integrator(&cfg)?;
    let depth = cfg.boundary.unwrap_or(0);
    let tol = cfg.tol.unwrap_or(1e-6);
    let report = match cfg.bracket {
        Some([lo, hi]) => {
            let c = critical_point(eps, depth, lo, hi, tol, &ic)?;
            CriticalReport {
                epsilon: eps.value(),
                boundary: depth,
                y: c.y,
                bracket: Some(c.bracket),
                tolerance: tol,
            }
        }
        None => {
            let y = critical_point_search(eps, depth, tol, &ic)?;
            CriticalReport {
                epsilon: eps.value(),
                boundary: depth,
                y,
                bracket: None,
                tolerance: tol,
            }
        }
    };
    emit_json(&report, common.out.as_deref())
}

pub fn terminate(common: &Common, pair: &PairArgs) -> CmdResult {
    let cfg = pair_config(common, pair)?;
    let eps = cfg.epsilon()?;
    let n = cfg.n.ok_or_else(|| usage("--n is required"))?;
    let path = terminating_start(n, eps, &integrator(&cfg)?)?;
    emit_json(&path, common.out.as_deref())
}

#[derive(Serialize)]
struct EscapeReport {
    epsilon: f64,
    launch: PhaseState,
    escape_theta: f64,
    nearest_ray: EscapeRay,
    phase_residual: f64,
    /// Largest `|sin(theta - theta_ray)|` over samples beyond the fit radius.
    max_ray_deviation: f64,
    blowup_time: f64,
    fit: EscapeFit,
}

pub fn escape(common: &Common, pair: &PairArgs, csv: Option<PathBuf>) -> CmdResult {
    let cfg = pair_config(common, pair)?;
    let eps = cfg.epsilon()?.require_positive()?;
    let ic = integrator(&cfg)?;
    let traj = integrate(&launch_state(&cfg, eps)?, eps, &ic)?;
    if let Some(p) = &csv {
        write_trajectory_csv(&traj, p)?;
    }
    let Some(riemann_flow::integrator::EventKind::Escape { theta }) =
        traj.terminal_event().map(|e| e.kind)
    else {
        return Err(Failure::Numerical(format!(
            "path did not escape: {}",
            to_json(&summary(&traj)).trim()
        )));
    };
    let e = eps.value();
    let index = (((theta + FRAC_PI_2) * e / PI + 1.0) / 2.0).round() as i64;
    let nearest_ray = escape_angles(eps, index..=index)?[0];
    let max_ray_deviation = traj
        .samples
        .iter()
        .filter(|s| s.position.r() > TAIL_RADIUS)
        .map(|s| (s.position.theta() - nearest_ray.theta).sin().abs())
        .fold(0.0, f64::max);
    let fit = fit_escape(&traj, eps)?;
    emit_json(
        &EscapeReport {
            epsilon: e,
            launch: traj.launch,
            escape_theta: theta,
            nearest_ray,
            phase_residual: escape_phase_residual(theta, eps),
            max_ray_deviation,
            blowup_time: fit.t_star,
            fit,
        },
        common.out.as_deref(),
    )
}

pub fn classify(common: &Common) -> CmdResult {
    let cfg = common.run_config(RunConfig::default())?;
    let eps = cfg.epsilon()?;
    let ic = integrator(&cfg)?;
    let c = classify_launch(
        &launch_on_shell(cfg.launch_point()?, Heading::Positive, eps),
        eps,
        &ic,
    )?;
    emit_json(&c, common.out.as_deref())
}

fn grid_and_options(
    common: &Common,
    grid: &GridArgs,
) -> Result<(RunConfig, Vec<f64>, SweepOptions), Failure> {
    let listed = (!grid.grid.is_empty()).then(|| grid.grid.clone());
    let cfg = common.run_config(RunConfig {
        grid: listed,
        tol: grid.tol,
        ..Default::default()
    })?;
    let values = match &grid.range {
        Some(r) => {
            let count = r[2];
            if !(count >= 2.0 && count.fract() == 0.0 && r[1] > r[0]) {
                return Err(usage("--range needs FROM < TO and an integer COUNT >= 2"));
            }
            let k = count as usize;
            (0..k)
                .map(|i| r[0] + (r[1] - r[0]) * i as f64 / (k - 1) as f64)
                .collect()
        }
        None => cfg
            .grid()
            .map_err(|_| usage("give --grid, --range or a config grid"))?,
    };
    let options = SweepOptions {
        tolerance: cfg.tol.unwrap_or(1e-6),
        execution: sweep::Execution::from_env()?,
    };
    Ok((cfg, values, options))
}

pub fn sweep_x0(common: &Common, grid: &GridArgs) -> CmdResult {
    let (cfg, values, options) = grid_and_options(common, grid)?;
    let r = sweep::sweep_x0(&values, &integrator(&cfg)?, &options)?;
    emit_json(&r, common.out.as_deref())
}

#[derive(Serialize)]
struct Extremum {
    epsilon: f64,
    /// The crossing is `-i y`.
    y: f64,
}

#[derive(Serialize)]
struct SweepS0Report {
    #[serde(flatten)]
    sweep: SweepResult,
    minimum: Option<Extremum>,
}

pub fn sweep_s0(common: &Common, grid: &GridArgs, minimum: Option<Vec<f64>>) -> CmdResult {
    let (cfg, values, options) = grid_and_options(common, grid)?;
    let ic = integrator(&cfg)?;
    let s0 = sweep::sweep_s0(&values, &ic, &options)?;
    let minimum = match minimum {
        Some(b) => {
            let (epsilon, y) = find_s0_minimum(b[0], b[1], &ic)?;
            Some(Extremum { epsilon, y })
        }
        None => None,
    };
    emit_json(&SweepS0Report { sweep: s0, minimum }, common.out.as_deref())
}

pub fn gap(common: &Common, nmax: Option<u32>) -> CmdResult {
    let cfg = common.run_config(RunConfig {
        nmax,
        ..Default::default()
    })?;
    let eps = cfg.epsilon()?;
    let base = IntegratorConfig::default()
        .with_tolerances(1e-12, 1e-12)
        .with_max_time(400.0);
    let ic = cfg.integrator(base)?;
    let options = GapOptions {
        execution: sweep::Execution::from_env()?,
        ..Default::default()
    };
    let table = gap_table(eps, cfg.nmax.unwrap_or(8), &ic, &options)?;
    emit_json(&table, common.out.as_deref())
}

pub struct PlotInputs {
    pub csv: Vec<PathBuf>,
    pub launch: Vec<f64>,
    pub sweep: Vec<PathBuf>,
    pub mark: Vec<f64>,
    pub title: Option<String>,
    pub view_radius: Option<f64>,
}

pub fn plot(common: &Common, inputs: &PlotInputs) -> CmdResult {
    let out = common
        .out
        .as_deref()
        .ok_or_else(|| usage("plot needs --out"))?;
    let options = PlotOptions {
        title: inputs.title.clone(),
        view_radius: inputs.view_radius,
        ..Default::default()
    };
    let has_paths = !inputs.csv.is_empty() || !inputs.launch.is_empty();
    if has_paths == !inputs.sweep.is_empty() {
        return Err(usage("plot takes either --csv/--launch or --sweep inputs"));
    }
    if !has_paths {
        let mut series = vec![];
        for p in &inputs.sweep {
            let text = std::fs::read_to_string(p).map_err(|source| Error::Io {
                path: p.clone(),
                source,
            })?;
            let r: SweepResult = serde_json::from_str(&text).map_err(|e| Error::Parse {
                path: p.clone(),
                line: e.line(),
                message: e.to_string(),
            })?;
            let label = r
                .samples
                .first()
                .map_or_else(|| p.display().to_string(), |s| s.kind.to_string());
            series.push(SweepSeries {
                label,
                points: r.samples.iter().map(|s| (s.epsilon, s.value_y)).collect(),
            });
        }
        let data = PlotData::Sweep {
            series,
            x_label: "epsilon".into(),
            y_label: "y (point -i y)".into(),
        };
        return Ok(emit_svg_plot(&data, out, &options)?);
    }
    let cfg = common.run_config(RunConfig::default())?;
    let eps = cfg.epsilon()?;
    let ic = integrator(&cfg)?;
    let tables = inputs
        .csv
        .iter()
        .map(|p| read_trajectory_csv(p))
        .collect::<riemann_flow::Result<Vec<_>>>()?;
    let mut trajs = vec![];
    for &y in &inputs.launch {
        let cfg_y = RunConfig {
            y0: Some(y),
            ..Default::default()
        };
        trajs.push(integrate(
            &launch_on_shell(cfg_y.launch_point()?, Heading::Positive, eps),
            eps,
            &ic,
        )?);
    }
    let mut plot = TrajectoryPlot::from_tables(&tables.iter().collect::<Vec<_>>(), eps);
    let computed = TrajectoryPlot::from_trajectories(&trajs.iter().collect::<Vec<_>>());
    plot.paths.extend(computed.paths);
    for tp in computed.turning_points {
        if plot
            .turning_points
            .iter()
            .all(|(w, _)| (w - tp.0).norm() > 1e-9)
        {
            plot.turning_points.push(tp);
        }
    }
    for &y in &inputs.mark {
        plot = plot.with_mark(Complex64::new(0.0, -y), format!("-{y}i"));
    }
    Ok(emit_svg_plot(&PlotData::Trajectories(plot), out, &options)?)
}

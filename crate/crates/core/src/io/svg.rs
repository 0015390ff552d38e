//! Static SVG plots of trajectories and sweep curves.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::dense_path;
use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::io::csv::TrajectoryTable;
use crate::surface::{nearest_tower_index, tower_angle, Epsilon, PhaseState};

/// Stroke colors for sheets -3 through 3; other sheets reuse the cycle.
pub const SHEET_COLORS: [&str; 7] = [
    "#8c564b", "#9467bd", "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#17becf",
];

const SERIES_COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

pub fn sheet_color(sheet: i64) -> &'static str {
    SHEET_COLORS[(sheet + 3).rem_euclid(7) as usize]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mark {
    pub at: Complex64,
    pub label: String,
}

/// Interpolated points drawn per sampling interval.
const PLOT_SUBDIVISION: usize = 8;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryPlot {
    /// Planar positions with their sheet index.
    pub paths: Vec<Vec<(Complex64, i64)>>,
    pub turning_points: Vec<(Complex64, i64)>,
    pub marks: Vec<Mark>,
}

impl TrajectoryPlot {
    pub fn from_trajectories(trajs: &[&Trajectory]) -> Self {
        let mut plot = Self::default();
        for t in trajs {
            plot.add_path(&t.samples, t.epsilon);
        }
        plot
    }

    pub fn from_tables(tables: &[&TrajectoryTable], eps: Epsilon) -> Self {
        let mut plot = Self::default();
        for t in tables {
            plot.add_path(&t.states(), eps);
        }
        plot
    }

    fn add_path(&mut self, samples: &[PhaseState], eps: Epsilon) {
        let dense = dense_path(samples, eps, PLOT_SUBDIVISION);
        let (lo, hi) = theta_range(dense.iter().map(|(_, theta)| *theta));
        self.paths.push(
            dense
                .into_iter()
                .map(|(z, theta)| (z, eps.sheet_of(theta)))
                .collect(),
        );
        self.add_turning_points(eps, lo, hi);
    }

    pub fn with_mark(mut self, at: Complex64, label: impl Into<String>) -> Self {
        self.marks.push(Mark {
            at,
            label: label.into(),
        });
        self
    }

    /// Turning points whose lifted angle lies within one tower spacing of `[lo, hi]`.
    fn add_turning_points(&mut self, eps: Epsilon, lo: f64, hi: f64) {
        let spacing = 2.0 * std::f64::consts::PI / (eps.value() + 2.0);
        let (a, b) = if lo <= hi {
            (lo - spacing, hi + spacing)
        } else {
            (0.0, 0.0)
        };
        let first = nearest_tower_index(a, eps).min(-1);
        let last = nearest_tower_index(b, eps).max(0);
        for n in first..=last {
            let theta = tower_angle(n, eps);
            if n != 0 && n != -1 && !(a..=b).contains(&theta) {
                continue;
            }
            let z = Complex64::from_polar(1.0, theta);
            if self
                .turning_points
                .iter()
                .all(|(w, _)| (w - z).norm() > 1e-9)
            {
                self.turning_points.push((z, eps.sheet_of(theta)));
            }
        }
    }
}

fn theta_range(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
        (lo.min(t), hi.max(t))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlotData {
    Trajectories(TrajectoryPlot),
    Sweep {
        series: Vec<SweepSeries>,
        x_label: String,
        y_label: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    pub width: f64,
    pub height: f64,
    pub title: Option<String>,
    /// Trajectory points beyond this radius are left out.
    pub view_radius: Option<f64>,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self {
            width: 640.0,
            height: 560.0,
            title: None,
            view_radius: None,
        }
    }
}

const LEFT: f64 = 64.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 34.0;
const BOTTOM: f64 = 48.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (self.width - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        self.height - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (self.height - TOP - BOTTOM)
    }
}

/// Tick positions at a step of 1, 2 or 5 times a power of ten.
pub fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return vec![];
    }
    let raw = (hi - lo) / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last)
        .map(|k| if k == 0 { 0.0 } else { k as f64 * step })
        .collect()
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    format!("{v:.decimals$}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    let span = if hi > lo { hi - lo } else { 1.0 };
    (lo - 0.06 * span, hi + 0.06 * span)
}

fn axes(svg: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let (l, r, t, b) = (LEFT, f.width - RIGHT, TOP, f.height - BOTTOM);
    let _ = writeln!(
        svg,
        r##"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="#333"/>"##,
        r - l,
        b - t
    );
    for (axis, ticks) in [
        ("x", nice_ticks(f.x0, f.x1, 7)),
        ("y", nice_ticks(f.y0, f.y1, 7)),
    ] {
        let step = if ticks.len() > 1 {
            ticks[1] - ticks[0]
        } else {
            1.0
        };
        for v in ticks {
            if axis == "x" {
                let x = f.px(v);
                let _ = writeln!(
                    svg,
                    r##"<line x1="{x:.2}" y1="{b}" x2="{x:.2}" y2="{:.2}" stroke="#333"/>"##,
                    b + 5.0
                );
                let _ = writeln!(
                    svg,
                    r#"<text x="{x:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
                    b + 18.0,
                    tick_label(v, step)
                );
            } else {
                let y = f.py(v);
                let _ = writeln!(
                    svg,
                    r##"<line x1="{:.2}" y1="{y:.2}" x2="{l}" y2="{y:.2}" stroke="#333"/>"##,
                    l - 5.0
                );
                let _ = writeln!(
                    svg,
                    r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#,
                    l - 8.0,
                    y + 4.0,
                    tick_label(v, step)
                );
            }
        }
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
        0.5 * (l + r),
        f.height - 10.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
        0.5 * (t + b),
        0.5 * (t + b),
        escape(y_label)
    );
}

fn polyline(svg: &mut String, f: &Frame, pts: &[(f64, f64)], color: &str, width: f64) {
    if pts.len() < 2 {
        return;
    }
    let mut coords = String::with_capacity(16 * pts.len());
    for (x, y) in pts {
        let _ = write!(coords, "{:.2},{:.2} ", f.px(*x), f.py(*y));
    }
    let _ = writeln!(
        svg,
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{width}" stroke-linejoin="round"/>"#,
        coords.trim_end()
    );
}

fn trajectory_svg(svg: &mut String, plot: &TrajectoryPlot, opts: &PlotOptions) {
    let keep = |z: &Complex64| opts.view_radius.is_none_or(|r| z.norm() <= r);
    let all = plot
        .paths
        .iter()
        .flatten()
        .map(|(z, _)| *z)
        .chain(plot.turning_points.iter().map(|(z, _)| *z))
        .chain(plot.marks.iter().map(|m| m.at))
        .filter(keep);
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for z in all {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let (mut x0, mut x1) = padded(x0, x1);
    let (mut y0, mut y1) = padded(y0, y1);
    // Equal scales on both axes.
    let pw = opts.width - LEFT - RIGHT;
    let ph = opts.height - TOP - BOTTOM;
    let scale = ((x1 - x0) / pw).max((y1 - y0) / ph);
    let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    (x0, x1) = (cx - 0.5 * scale * pw, cx + 0.5 * scale * pw);
    (y0, y1) = (cy - 0.5 * scale * ph, cy + 0.5 * scale * ph);
    let f = Frame {
        x0,
        x1,
        y0,
        y1,
        width: opts.width,
        height: opts.height,
    };

    let real_axis = (y0..=y1).contains(&0.0).then_some((x0, 0.0, x1, 0.0));
    let imag_axis = (x0..=x1).contains(&0.0).then_some((0.0, y0, 0.0, y1));
    for (a, b, c, d) in real_axis.into_iter().chain(imag_axis) {
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#bbb" stroke-width="0.8"/>"##,
            f.px(a),
            f.py(b),
            f.px(c),
            f.py(d)
        );
    }
    if y1 > 0.0 && (x0..=x1).contains(&0.0) {
        let _ = writeln!(
            svg,
            r##"<line class="branch-cut" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#000" stroke-width="2.5"/>"##,
            f.px(0.0),
            f.py(0.0f64.max(y0)),
            f.px(0.0),
            f.py(y1)
        );
    }
    for path in &plot.paths {
        let mut run: Vec<(f64, f64)> = vec![];
        let mut sheet = None;
        for (z, k) in path {
            if !keep(z) {
                if let Some(s) = sheet {
                    polyline(svg, &f, &run, sheet_color(s), 1.3);
                }
                run.clear();
                sheet = None;
                continue;
            }
            if sheet.is_some_and(|s| s != *k) {
                polyline(svg, &f, &run, sheet_color(sheet.unwrap_or(0)), 1.3);
                run = run.last().copied().into_iter().collect();
            }
            sheet = Some(*k);
            run.push((z.re, z.im));
        }
        if let Some(s) = sheet {
            polyline(svg, &f, &run, sheet_color(s), 1.3);
        }
    }
    for (z, k) in &plot.turning_points {
        if keep(z) {
            let _ = writeln!(
                svg,
                r##"<circle class="turning-point" cx="{:.2}" cy="{:.2}" r="3.5" fill="{}" stroke="#000" stroke-width="0.6"/>"##,
                f.px(z.re),
                f.py(z.im),
                sheet_color(*k)
            );
        }
    }
    for m in &plot.marks {
        let (x, y) = (f.px(m.at.re), f.py(m.at.im));
        let _ = writeln!(
            svg,
            r##"<circle class="mark" cx="{x:.2}" cy="{y:.2}" r="4" fill="#000"/>"##
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#,
            x + 7.0,
            y + 4.0,
            escape(&m.label)
        );
    }
    axes(svg, &f, "Re x", "Im x");
}

fn sweep_svg(
    svg: &mut String,
    series: &[SweepSeries],
    x_label: &str,
    y_label: &str,
    opts: &PlotOptions,
) {
    let pts = series
        .iter()
        .flat_map(|s| s.points.iter())
        .filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for (x, y) in pts {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let (x0, x1) = padded(x0, x1);
    let (y0, y1) = padded(y0, y1);
    let f = Frame {
        x0,
        x1,
        y0,
        y1,
        width: opts.width,
        height: opts.height,
    };
    for (i, s) in series.iter().enumerate() {
        let color = SERIES_COLORS[i % SERIES_COLORS.len()];
        polyline(svg, &f, &s.points, color, 1.6);
        for (x, y) in &s.points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{color}"/>"#,
                f.px(*x),
                f.py(*y)
            );
        }
        let ly = TOP + 16.0 + 16.0 * i as f64;
        let lx = opts.width - RIGHT - 130.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"#,
            ly - 4.0,
            lx + 18.0,
            ly - 4.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{ly:.2}" font-size="11">{}</text>"#,
            lx + 24.0,
            escape(&s.label)
        );
    }
    axes(svg, &f, x_label, y_label);
}

pub fn render_svg(data: &PlotData, opts: &PlotOptions) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"#,
        w = opts.width,
        h = opts.height
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if let Some(t) = &opts.title {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="20" font-size="14" text-anchor="middle">{}</text>"#,
            0.5 * opts.width,
            escape(t)
        );
    }
    match data {
        PlotData::Trajectories(p) => trajectory_svg(&mut svg, p, opts),
        PlotData::Sweep {
            series,
            x_label,
            y_label,
        } => sweep_svg(&mut svg, series, x_label, y_label, opts),
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn emit_svg_plot(data: &PlotData, path: &Path, opts: &PlotOptions) -> Result<()> {
    std::fs::write(path, render_svg(data, opts)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks() {
        assert_eq!(nice_ticks(0.0, 1.0, 5).len(), 6);
        assert_eq!(
            nice_ticks(-3.2, 3.2, 7),
            vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]
        );
        assert!(nice_ticks(1.0, 1.0, 5).is_empty());
    }

    #[test]
    fn sheet_cycle() {
        assert_eq!(sheet_color(-3), SHEET_COLORS[0]);
        assert_eq!(sheet_color(3), SHEET_COLORS[6]);
        assert_eq!(sheet_color(4), SHEET_COLORS[0]);
    }

    #[test]
    fn sweep_plot_has_one_polyline_per_series() {
        let s = vec![SweepSeries {
            label: "s0".into(),
            points: vec![(1.0, 0.7), (2.0, 1.0), (3.0, 1.1)],
        }];
        let svg = render_svg(
            &PlotData::Sweep {
                series: s,
                x_label: "eps".into(),
                y_label: "y".into(),
            },
            &PlotOptions::default(),
        );
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.ends_with("</svg>\n"));
    }
}

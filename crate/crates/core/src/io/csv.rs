//! Trajectory time series as CSV.
//!
//! One row per sample under a fixed header; events follow as comment lines
//! `# event,<kind>,<t>,<payload>` where the payload is a JSON object of the
//! event fields.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::integrator::{EventKind, Trajectory};
use crate::surface::{MomentumPolar, PhaseState, SurfacePoint};

pub const HEADER: &str = "t,re_x,im_x,r,theta,sheet,re_p,im_p,energy_err";

/// Decimal rendering with 12 significant digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.11e}")
}

fn round12(v: f64) -> f64 {
    format_value(v).parse().unwrap_or(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub t: f64,
    pub re_x: f64,
    pub im_x: f64,
    pub r: f64,
    pub theta: f64,
    pub sheet: i64,
    pub re_p: f64,
    pub im_p: f64,
    pub energy_err: f64,
}

impl CsvRow {
    fn rounded(self) -> Self {
        Self {
            t: round12(self.t),
            re_x: round12(self.re_x),
            im_x: round12(self.im_x),
            r: round12(self.r),
            theta: round12(self.theta),
            sheet: self.sheet,
            re_p: round12(self.re_p),
            im_p: round12(self.im_p),
            energy_err: round12(self.energy_err),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsvEvent {
    pub time: f64,
    pub kind: EventKind,
}

/// Contents of a trajectory CSV, with every value at the precision it is
/// written with.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrajectoryTable {
    pub rows: Vec<CsvRow>,
    pub events: Vec<CsvEvent>,
}

impl TrajectoryTable {
    pub fn from_trajectory(traj: &Trajectory) -> Self {
        let eps = traj.epsilon;
        let rows = traj
            .samples
            .iter()
            .zip(traj.energy_errors())
            .map(|(s, err)| {
                let (x, p) = (s.x(), s.p());
                CsvRow {
                    t: s.time,
                    re_x: x.re,
                    im_x: x.im,
                    r: s.position.r(),
                    theta: s.position.theta(),
                    sheet: eps.sheet_of(s.position.theta()),
                    re_p: p.re,
                    im_p: p.im,
                    energy_err: err,
                }
                .rounded()
            })
            .collect();
        let events = traj
            .events
            .iter()
            .map(|e| CsvEvent {
                time: round12(e.time),
                kind: e.kind,
            })
            .collect();
        Self { rows, events }
    }

    /// Sample states rebuilt from the position and momentum columns.
    pub fn states(&self) -> Vec<PhaseState> {
        self.rows
            .iter()
            .map(|r| {
                PhaseState::new(
                    SurfacePoint::unchecked(r.r, r.theta),
                    MomentumPolar::from_cartesian(Complex64::new(r.re_p, r.im_p)),
                    r.t,
                )
            })
            .collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::with_capacity(128 * (self.rows.len() + 1));
        out.push_str(HEADER);
        out.push('\n');
        for r in &self.rows {
            let cells = [
                format_value(r.t),
                format_value(r.re_x),
                format_value(r.im_x),
                format_value(r.r),
                format_value(r.theta),
                r.sheet.to_string(),
                format_value(r.re_p),
                format_value(r.im_p),
                format_value(r.energy_err),
            ];
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for e in &self.events {
            out.push_str(&format!(
                "# event,{},{},{}\n",
                e.kind.name(),
                format_value(e.time),
                payload(&e.kind)
            ));
        }
        out
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let bad = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h == HEADER => {}
            _ => return Err(bad(1, format!("expected header `{HEADER}`"))),
        }
        let mut table = Self::default();
        for (i, line) in lines {
            let n = i + 1;
            if let Some(rest) = line.strip_prefix("# event,") {
                let mut parts = rest.splitn(3, ',');
                let (Some(kind), Some(t), Some(body)) = (parts.next(), parts.next(), parts.next())
                else {
                    return Err(bad(n, "event line needs kind, time and payload".into()));
                };
                let time = t.parse().map_err(|e| bad(n, format!("event time: {e}")))?;
                let mut fields: Map<String, Value> = serde_json::from_str(body)
                    .map_err(|e| bad(n, format!("event payload: {e}")))?;
                fields.insert("kind".into(), Value::String(kind.into()));
                let kind = serde_json::from_value(Value::Object(fields))
                    .map_err(|e| bad(n, format!("event: {e}")))?;
                table.events.push(CsvEvent { time, kind });
                continue;
            }
            if line.starts_with('#') || line.is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != 9 {
                return Err(bad(n, format!("expected 9 columns, found {}", cells.len())));
            }
            let f = |k: usize| {
                cells[k]
                    .parse::<f64>()
                    .map_err(|e| bad(n, format!("column {}: {e}", k + 1)))
            };
            table.rows.push(CsvRow {
                t: f(0)?,
                re_x: f(1)?,
                im_x: f(2)?,
                r: f(3)?,
                theta: f(4)?,
                sheet: cells[5]
                    .parse()
                    .map_err(|e| bad(n, format!("column 6: {e}")))?,
                re_p: f(6)?,
                im_p: f(7)?,
                energy_err: f(8)?,
            });
        }
        Ok(table)
    }
}

fn payload(kind: &EventKind) -> String {
    let mut v = serde_json::to_value(kind).unwrap_or(Value::Null);
    if let Value::Object(m) = &mut v {
        m.remove("kind");
    }
    v.to_string()
}

pub fn write_trajectory_csv(traj: &Trajectory, path: &Path) -> Result<()> {
    write_table(&TrajectoryTable::from_trajectory(traj), path)
}

pub fn write_table(table: &TrajectoryTable, path: &Path) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(table.render().as_bytes()).map_err(io)
}

pub fn read_trajectory_csv(path: &Path) -> Result<TrajectoryTable> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    TrajectoryTable::parse(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{integrate, launch_on_shell, Heading, IntegratorConfig};
    use crate::surface::Epsilon;
    use proptest::prelude::*;

    fn orbit(e: f64, y: f64) -> Trajectory {
        let eps = Epsilon::new(e).unwrap();
        let launch = launch_on_shell(
            SurfacePoint::on_negative_imaginary_axis(y).unwrap(),
            Heading::Positive,
            eps,
        );
        integrate(&launch, eps, &IntegratorConfig::default()).unwrap()
    }

    #[test]
    fn twelve_digits() {
        assert_eq!(format_value(std::f64::consts::PI), "3.14159265359e0");
        assert_eq!(format_value(-0.00378715), "-3.78715000000e-3");
    }

    #[test]
    fn round_trip() {
        let table = TrajectoryTable::from_trajectory(&orbit(0.5, 0.8));
        let text = table.render();
        assert!(text.ends_with('\n'));
        let back = TrajectoryTable::parse(&text, Path::new("mem")).unwrap();
        assert_eq!(back, table);
        assert_eq!(back.render(), text);
        assert!(back
            .events
            .iter()
            .any(|e| matches!(e.kind, EventKind::Closure { .. })));
    }

    #[test]
    fn harmonic_rows_on_principal_sheet() {
        let table = TrajectoryTable::from_trajectory(&orbit(0.0, 1.0));
        assert!(table.rows.iter().all(|r| r.sheet == 0));
    }

    #[test]
    fn rejects_malformed() {
        let p = Path::new("mem");
        assert!(TrajectoryTable::parse("t,x\n", p).is_err());
        assert!(TrajectoryTable::parse(&format!("{HEADER}\n1,2,3\n"), p).is_err());
        assert!(
            TrajectoryTable::parse(&format!("{HEADER}\n# event,closure,1e0,{{}}\n"), p).is_err()
        );
    }

    proptest! {
        #[test]
        fn rendered_values_reparse_to_themselves(v in -1e12f64..1e12) {
            let once = round12(v);
            prop_assert_eq!(format_value(once), format_value(v));
            prop_assert_eq!(round12(once), once);
            prop_assert!((once - v).abs() <= 1e-11 * v.abs());
        }
    }
}

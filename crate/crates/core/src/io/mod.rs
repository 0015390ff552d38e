//! Run configuration and CSV, JSON and SVG output.

pub mod config;
pub mod csv;
pub mod svg;

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

pub use config::{parse_epsilon, EpsilonValue, RunConfig};
pub use csv::{read_trajectory_csv, write_trajectory_csv, CsvEvent, CsvRow, TrajectoryTable};
pub use svg::{emit_svg_plot, render_svg, PlotData, PlotOptions, SweepSeries, TrajectoryPlot};

/// Pretty-printed JSON, newline-terminated.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s =
        serde_json::to_string_pretty(value).unwrap_or_else(|e| format!("{{\"error\": \"{e}\"}}"));
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(value)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

//! Run configuration shared by the command-line tools.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::IntegratorConfig;
use crate::surface::{Epsilon, Side, SurfacePoint};

/// An epsilon given as a decimal or as one of the tokens `1/pi`, `1+sqrt2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsilonValue {
    Number(f64),
    Text(String),
}

/// Parses a decimal or one of the tokens `1/pi` and `1+sqrt2`.
pub fn parse_epsilon(text: &str) -> Result<f64> {
    let t: String = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_ascii_lowercase();
    match t.as_str() {
        "1/pi" => Ok(1.0 / PI),
        "1+sqrt2" | "1+sqrt(2)" => Ok(1.0 + 2f64.sqrt()),
        _ => t
            .parse()
            .map_err(|_| Error::Config(format!("cannot read epsilon from `{text}`"))),
    }
}

impl EpsilonValue {
    pub fn value(&self) -> Result<f64> {
        match self {
            EpsilonValue::Number(v) => Ok(*v),
            EpsilonValue::Text(s) => parse_epsilon(s),
        }
    }
}

impl FromStr for EpsilonValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_epsilon(s)?;
        Ok(EpsilonValue::Text(s.to_string()))
    }
}

impl fmt::Display for EpsilonValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsilonValue::Number(v) => write!(f, "{v}"),
            EpsilonValue::Text(s) => f.write_str(s),
        }
    }
}

/// Flat run description; every field is optional so that a file and the
/// command line can be merged.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub epsilon: Option<EpsilonValue>,
    /// Launch at `-i y0`.
    pub y0: Option<f64>,
    pub re: Option<f64>,
    pub im: Option<f64>,

    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub energy_tol: Option<f64>,
    pub max_time: Option<f64>,
    pub escape_radius: Option<f64>,
    pub closure_tol: Option<f64>,
    pub turning_tol: Option<f64>,
    pub max_step_angle: Option<f64>,

    /// Turning-point pair index.
    pub n: Option<u32>,
    pub side: Option<Side>,
    /// Largest pair index of a gap table.
    pub nmax: Option<u32>,
    /// Sheet-depth boundary of a critical-point search.
    pub boundary: Option<u32>,
    pub grid: Option<Vec<EpsilonValue>>,
    pub bracket: Option<[f64; 2]>,
    /// Target width of a bisection or minimum search.
    pub tol: Option<f64>,
}

macro_rules! merge_fields {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f; } )*
    };
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `other` replace those of `self`.
    pub fn merged(mut self, other: RunConfig) -> Self {
        let o = other;
        merge_fields!(self, o; epsilon, y0, re, im, rel_tol, abs_tol, energy_tol, max_time, escape_radius,
            closure_tol, turning_tol, max_step_angle, n, side, nmax, boundary, grid, bracket, tol);
        self
    }

    pub fn epsilon(&self) -> Result<Epsilon> {
        let v = self
            .epsilon
            .as_ref()
            .ok_or_else(|| Error::Config("epsilon is required".into()))?;
        Epsilon::new(v.value()?)
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        let g = self
            .grid
            .as_ref()
            .ok_or_else(|| Error::Config("grid is required".into()))?;
        g.iter().map(EpsilonValue::value).collect()
    }

    /// `base` with the overrides applied, validated.
    pub fn integrator(&self, base: IntegratorConfig) -> Result<IntegratorConfig> {
        let mut c = base;
        let pairs = [
            (&mut c.rel_tol, self.rel_tol),
            (&mut c.abs_tol, self.abs_tol),
            (&mut c.energy_tol, self.energy_tol),
            (&mut c.max_time, self.max_time),
            (&mut c.escape_radius, self.escape_radius),
            (&mut c.closure_tol, self.closure_tol),
            (&mut c.turning_tol, self.turning_tol),
            (&mut c.max_step_angle, self.max_step_angle),
        ];
        for (slot, v) in pairs {
            if let Some(v) = v {
                *slot = v;
            }
        }
        c.validate()?;
        Ok(c)
    }

    /// The launch point: `-i y0`, or `re + i im` on the principal sheet.
    pub fn launch_point(&self) -> Result<SurfacePoint> {
        match (self.y0, self.re, self.im) {
            (Some(y), None, None) => {
                if !(y > 0.0 && y.is_finite()) {
                    return Err(Error::Config(format!("y0 must be positive, got {y}")));
                }
                SurfacePoint::on_negative_imaginary_axis(y)
            }
            (None, Some(re), Some(im)) => {
                let z = Complex64::new(re, im);
                let mut theta = z.arg();
                if theta > FRAC_PI_2 {
                    theta -= 2.0 * PI;
                }
                SurfacePoint::from_cartesian(z, theta)
            }
            (None, None, None) => Err(Error::Config(
                "a launch point (y0, or re and im) is required".into(),
            )),
            _ => Err(Error::Config("give either y0 or both re and im".into())),
        }
    }
}

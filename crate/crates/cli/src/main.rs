//! Command-line front end.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use riemann_flow::io::{EpsilonValue, RunConfig};
use riemann_flow::surface::Side;
use riemann_flow::Error;

#[derive(Parser, Debug)]
#[command(
    name = "riemann-flow",
    version,
    about = "Complex classical trajectories of H = p^2 + x^2 (ix)^eps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand. Values given here override the config file.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Decimal, `1/pi` or `1+sqrt2`.
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<EpsilonValue>,
    /// Launch at -i y0.
    #[arg(long)]
    pub y0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub im: Option<f64>,
    /// Integration time budget.
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub energy_tol: Option<f64>,
    #[arg(long)]
    pub escape_radius: Option<f64>,
    #[arg(long)]
    pub closure_tol: Option<f64>,
    #[arg(long)]
    pub turning_tol: Option<f64>,
    #[arg(long)]
    pub max_step_angle: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

impl Common {
    fn overrides(&self) -> RunConfig {
        RunConfig {
            epsilon: self.epsilon.clone(),
            y0: self.y0,
            re: self.re,
            im: self.im,
            max_time: self.tmax,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            energy_tol: self.energy_tol,
            escape_radius: self.escape_radius,
            closure_tol: self.closure_tol,
            turning_tol: self.turning_tol,
            max_step_angle: self.max_step_angle,
            ..Default::default()
        }
    }

    /// Config file merged with the command-line flags.
    pub fn run_config(&self, extra: RunConfig) -> riemann_flow::Result<RunConfig> {
        let base = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        Ok(base.merged(self.overrides()).merged(extra))
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct PairArgs {
    /// Turning-point pair index.
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, value_parser = parse_side)]
    pub side: Option<Side>,
}

fn parse_side(s: &str) -> Result<Side, String> {
    match s {
        "left" => Ok(Side::Left),
        "right" => Ok(Side::Right),
        _ => Err(format!("side must be `left` or `right`, got `{s}`")),
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate one orbit and write it as CSV.
    Trajectory {
        #[command(flatten)]
        common: Common,
        /// Launch from turning point pair n instead of a point.
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Analytic period and, given a launch, the numeric one.
    Period {
        #[command(flatten)]
        common: Common,
    },
    /// Turning points of pairs 0..=nmax.
    TurningPoints {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        nmax: Option<u32>,
    },
    /// Launch ordinate where orbits first leave the regions up to the boundary.
    Critical {
        #[command(flatten)]
        common: Common,
        /// Sheet depth; 0 is the principal sheet.
        #[arg(long)]
        boundary: Option<u32>,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        bracket: Option<Vec<f64>>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Principal-axis crossing of the terminating path from pair n.
    Terminate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Launch from a turning point and analyse the escape to infinity.
    Escape {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pair: PairArgs,
        /// Also write the trajectory as CSV.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Classify the orbit from a launch point.
    Classify {
        #[command(flatten)]
        common: Common,
    },
    /// Critical point x0 over a grid of epsilon.
    #[command(name = "sweep-x0")]
    SweepX0 {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Terminating crossing s0 over a grid of epsilon.
    #[command(name = "sweep-s0")]
    SweepS0 {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
        /// Also locate the extremum of s0 inside this epsilon bracket.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        minimum: Option<Vec<f64>>,
    },
    /// Terminating crossings s_n for n = 0..=nmax at eps > 2, with the gap ordering.
    Gap {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        nmax: Option<u32>,
    },
    /// Render trajectories or a sweep as SVG.
    Plot {
        #[command(flatten)]
        common: Common,
        /// Trajectory CSV files.
        #[arg(long, value_name = "PATH")]
        csv: Vec<PathBuf>,
        /// Orbits to integrate, by launch ordinate.
        #[arg(long, value_delimiter = ',')]
        launch: Vec<f64>,
        /// Sweep JSON written by sweep-x0 or sweep-s0.
        #[arg(long, value_name = "PATH")]
        sweep: Vec<PathBuf>,
        /// Mark -i y on the plot.
        #[arg(long, value_delimiter = ',')]
        mark: Vec<f64>,
        #[arg(long)]
        title: Option<String>,
        #[arg(long)]
        view_radius: Option<f64>,
    },
}

#[derive(Args, Debug, Clone, Default)]
pub struct GridArgs {
    /// Comma-separated epsilon values.
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<EpsilonValue>,
    /// Evenly spaced grid: start, end, count.
    #[arg(long, num_args = 3, value_names = ["FROM", "TO", "COUNT"])]
    pub range: Option<Vec<f64>>,
    #[arg(long)]
    pub tol: Option<f64>,
}

/// Failure of a command, carrying its exit status.
pub enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_)
            | Error::InvalidArgument(_)
            | Error::EpsilonOutOfRange { .. }
            | Error::NonFiniteEpsilon(_)
            | Error::Parse { .. }
            | Error::Io { .. } => Failure::Usage(e.to_string()),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Trajectory { common, pair } => commands::trajectory(&common, &pair),
        Command::Period { common } => commands::period(&common),
        Command::TurningPoints { common, nmax } => commands::turning_points(&common, nmax),
        Command::Critical {
            common,
            boundary,
            bracket,
            tol,
        } => commands::critical(&common, boundary, bracket, tol),
        Command::Terminate { common, pair } => commands::terminate(&common, &pair),
        Command::Escape { common, pair, csv } => commands::escape(&common, &pair, csv),
        Command::Classify { common } => commands::classify(&common),
        Command::SweepX0 { common, grid } => commands::sweep_x0(&common, &grid),
        Command::SweepS0 {
            common,
            grid,
            minimum,
        } => commands::sweep_s0(&common, &grid, minimum),
        Command::Gap { common, nmax } => commands::gap(&common, nmax),
        Command::Plot {
            common,
            csv,
            launch,
            sweep,
            mark,
            title,
            view_radius,
        } => commands::plot(
            &common,
            &commands::PlotInputs {
                csv,
                launch,
                sweep,
                mark,
                title,
                view_radius,
            },
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("usage: riemann-flow <COMMAND> [OPTIONS]; see `riemann-flow --help`");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}

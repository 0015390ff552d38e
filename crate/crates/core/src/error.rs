use std::path::PathBuf;

/// Errors raised by the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("epsilon must be finite, got {0}")]
    NonFiniteEpsilon(f64),

    #[error("epsilon = {value} is outside the admissible range ({requirement})")]
    EpsilonOutOfRange {
        value: f64,
        requirement: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("launch state is off the energy shell: |E - 1| = {0:e}")]
    OffShell(f64),

    #[error("polar equations are singular at this state ({0})")]
    PolarSingularity(&'static str),

    #[error("trajectory did not close within t = {max_time}")]
    NotClosed { max_time: f64 },

    #[error("trajectory is not closed")]
    NotClosedTrajectory,

    #[error("[{lo}, {hi}] does not bracket a transition")]
    BracketInvalid { lo: f64, hi: f64 },

    #[error("separatrix predicate is not monotone across [{lo}, {hi}]")]
    NonMonotone { lo: f64, hi: f64 },

    #[error("search diverged: no transition below y = {cap}")]
    Diverged { cap: f64 },

    #[error("pair {pair} has no terminating trajectory: {reason}")]
    NoTermination { pair: u32, reason: String },

    #[error("escape tail too short: {found} samples beyond r = 100, need 20")]
    InsufficientTail { found: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

//! Complex classical trajectories of the PT-symmetric Hamiltonian
//! `H = p^2 + x^2 (ix)^eps` on the Riemann surface of its potential.

pub mod analysis;
pub mod error;
pub mod gamma;
pub mod integrator;
pub mod io;
pub mod surface;
pub mod sweep;

pub use error::{Error, Result};
pub use integrator::{integrate, IntegratorConfig, Trajectory};
pub use surface::{Epsilon, PhaseState, SurfacePoint};

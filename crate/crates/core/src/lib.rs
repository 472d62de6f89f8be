//! Learning optimal thresholds for the continuous-time parking problem.
//!
//! Free spots arrive along a street `[S, ∞)` as an inhomogeneous Poisson
//! process; the driver wants to stop as close to the target `0` as possible.
//! The crate solves the problem when the intensity is known ([`oracle`]),
//! learns the optimal threshold round by round when it is not ([`ilu`]),
//! evaluates the theoretical constants of the regret analysis ([`bounds`]),
//! and runs reproducible Monte Carlo experiments ([`harness`]).

pub mod bounds;
pub mod config;
pub mod error;
pub mod fidelity;
pub mod harness;
pub mod ilu;
pub mod intensity;
pub mod oracle;
pub mod output;
pub mod quadrature;
pub mod simulate;

pub use error::{Error, Result};
pub use intensity::{EnvironmentParams, Family, IntensityModel};
pub use oracle::{Oracle, OracleResult, Tolerances};

//! Finite-difference laboratory for `-Δu + a|u|^{m-1}u + bu (+ c|x|²u) = F`
//! with 0 < m < 1, and for the energy method that predicts where its
//! solutions vanish.
//!
//! Modules follow the pipeline: [`coeffs`] decides admissibility and builds
//! coercivity constants, [`exponents`] evaluates the closed-form bounds,
//! [`grid`] holds discrete geometry and quadrature, [`solver`] computes
//! solutions, [`energy`] samples ball energies and checks the identities,
//! [`localization`] measures supports and issues verdicts, and [`calibrate`]
//! estimates the interpolation-trace constant.

pub mod calibrate;
pub mod coeffs;
pub mod energy;
pub mod error;
pub mod exponents;
pub mod grid;
pub mod localization;
pub mod minimize;
pub mod solver;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

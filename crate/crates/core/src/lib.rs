//! Bergman-space geometry of the Siegel upper half-space
//! `U = { z in C^n : Im z_n > |z'|^2 }`.
//!
//! The crate evaluates the Bergman kernel, the Cayley transform and the
//! Bergman metric in closed form, integrates over `U` by Monte Carlo through
//! the Cayley pullback, and uses both to compute Berezin transforms and
//! averaging functions of positive measures. The `carleson` module turns
//! those into boundedness / compactness diagnostics for Toeplitz operators.

pub mod carleson;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod integrate;
pub mod kernel;
pub mod measures;
pub mod metric;
pub mod verify;
mod special;

pub use carleson::{DiagnoseConfig, DiagnosticsReport};
pub use error::{Error, Result};
pub use geometry::{BallPoint, CPoint};
pub use integrate::{IntegrationResult, RegionSpec, Strategy};
pub use measures::{MeasureSpec, TestFunction};
pub use metric::{BergmanBall, Lattice};
pub use num_complex::Complex64;

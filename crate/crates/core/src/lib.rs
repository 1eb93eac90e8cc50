//! Numerics for a localized solution of the Dirac equation, written in the
//! real spacetime algebra Cl(1,3) and cross-checked against the 4x4 complex
//! Dirac-Pauli formulation.
//!
//! The crate is organized around five concerns:
//!
//! - [`sta`]: exact blade arithmetic for the 16-dimensional spacetime algebra,
//!   rotors and the restricted exponential.
//! - [`dirac`]: the independent matrix oracle (Dirac-Pauli gamma matrices,
//!   first-order operators, the column-spinor solution and the Hestenes map).
//! - [`field`]: closed-form evaluation of the field, its analytic gradient and
//!   its Klein-Gordon / spin / zitter decomposition.
//! - [`verify`]: residual checks of the governing equations, finite-difference
//!   convergence studies and the rotational-covariance check.
//! - [`physics`]: unit handling and the desk-scale estimates (spin angular
//!   velocity, size bound, zitter frequency).
//!
//! [`cli`] and [`config`] back the `sta-dirac` binary.

pub mod cli;
pub mod config;
pub mod dirac;
pub mod field;
pub mod physics;
pub mod sta;
pub mod verify;

pub use field::{FieldParams, SpacetimePoint};
pub use sta::{BladeIndex, Multivector};

/// How derivatives are taken when applying a differential operator.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivMode {
    /// Closed-form partial derivatives.
    Analytic,
    /// Second-order central differences with step `h`.
    Fd { h: f64 },
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("field evaluation at r = {r:.6e}, inside the excluded ball r < {r_min:.6e}")]
    Singularity { r: f64, r_min: f64 },
    #[error("bivector square deviates from -1 by {deviation:.3e}")]
    NotUnitBivector { deviation: f64 },
    #[error("rotor is not unit: |R R~ - 1| = {deviation:.3e}")]
    NonUnitRotor { deviation: f64 },
    #[error("invalid field parameters: {0}")]
    InvalidParams(String),
    #[error("finite-difference step {h:.3e} rejected: {reason}")]
    BadStep { h: f64, reason: String },
    #[error("zero-norm reference field at the sample point")]
    ZeroNorm,
    #[error("degenerate convergence fit: {0}")]
    DegenerateFit(String),
    #[error("on-axis point has no defined planar phase")]
    OnAxis,
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

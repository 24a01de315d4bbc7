//! Space-time discretization of the CFGL boundary-value problem on `(0, b)`
//! with homogeneous Dirichlet data: dense block operator, θ-Euler and
//! semi-implicit steppers, and the evolution driver.

mod block;
mod evolution;
mod grid;
mod stepping;

pub use block::{assemble_block_operator, nonlinear_term, BlockOperator};
pub use evolution::{
    run_evolution, Diagnostics, EvolutionError, Scheme, SolverConfig, Trajectory, BLOW_UP_FACTOR,
    DEFAULT_MAX_SNAPSHOTS,
};
pub use grid::{ComplexField, Grid};
pub use stepping::{
    factor_semi_implicit_system, step_semi_implicit, step_theta, SystemFactorization, ThetaStepper,
};

use thiserror::Error;

use crate::fractional::FractionalError;
use crate::model::{solitary_initial_condition, CfglCoefficients, ModelError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Fractional(#[from] FractionalError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("singular system: smallest pivot {pivot:e} against matrix scale {scale:e}")]
    Singular { pivot: f64, scale: f64 },
    #[error("fixed-point iteration did not converge in {iterations} iterations (last increment {increment:e})")]
    NonConvergence { iterations: usize, increment: f64 },
    #[error("blow-up at t = {t}: max|B|^2 = {max_modulus_sq:e} exceeds {limit:e}")]
    BlowUp {
        t: f64,
        max_modulus_sq: f64,
        limit: f64,
    },
}

/// Solitary-wave initial field on the interior nodes, centred at
/// `center` (the profile is evaluated at `x_i - center`).
pub fn solitary_field(
    grid: &Grid,
    b0: f64,
    k: f64,
    coeffs: &CfglCoefficients,
    center: f64,
) -> Result<ComplexField, SolverError> {
    let shifted: Vec<f64> = grid.interior_nodes().iter().map(|x| x - center).collect();
    let values = solitary_initial_condition(&shifted, b0, k, coeffs)?;
    Ok(ComplexField::from_complex(&values))
}

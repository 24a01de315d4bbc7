//! Fractional calculus primitives: the Gamma function, lattice sums, the
//! fractional centered-difference weights and the discrete Riesz operator.

mod lattice;
mod operator;
mod special;
mod weights;

pub use lattice::{infrared_coefficient, zeta_sum};
pub use operator::{apply_riesz, assemble_riesz_matrix, RieszOperatorMatrix};
pub use special::{cos_pi, gamma_fn, sin_pi};
pub use weights::{closed_form_weight, riesz_symbol, riesz_weights, RieszWeights};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FractionalError {
    #[error("gamma function pole at x = {x}")]
    Pole { x: f64 },
    #[error("gamma function overflows at x = {x}")]
    Overflow { x: f64 },
    #[error("invalid fractional order {alpha}: {reason}")]
    InvalidOrder { alpha: f64, reason: &'static str },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("{0}")]
    InvalidArgument(String),
}

/// Order `α` of the Riesz derivative.
///
/// Admits `0 < α ≤ 2` with `α ≠ 1`. The value `α = 2` reproduces the
/// classical second difference and is kept for validation; model-level
/// formulas reject it through [`FractionalOrder::require_model_range`].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self, FractionalError> {
        if !alpha.is_finite() {
            return Err(FractionalError::InvalidOrder {
                alpha,
                reason: "must be finite",
            });
        }
        if alpha <= 0.0 || alpha > 2.0 {
            return Err(FractionalError::InvalidOrder {
                alpha,
                reason: "must satisfy 0 < alpha <= 2",
            });
        }
        if alpha == 1.0 {
            return Err(FractionalError::InvalidOrder {
                alpha,
                reason: "alpha = 1 is excluded",
            });
        }
        Ok(Self(alpha))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Rejects the validation-only endpoint `α = 2`.
    pub fn require_model_range(self) -> Result<Self, FractionalError> {
        if self.0 >= 2.0 {
            return Err(FractionalError::InvalidOrder {
                alpha: self.0,
                reason: "model formulas require alpha < 2",
            });
        }
        Ok(self)
    }
}

impl TryFrom<f64> for FractionalOrder {
    type Error = FractionalError;

    fn try_from(alpha: f64) -> Result<Self, Self::Error> {
        Self::new(alpha)
    }
}

impl std::fmt::Display for FractionalOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_validation() {
        assert!(FractionalOrder::new(1.8).is_ok());
        assert!(FractionalOrder::new(2.0).is_ok());
        assert!(FractionalOrder::new(0.01).is_ok());
        for bad in [0.0, -0.5, 1.0, 2.0001, f64::NAN, f64::INFINITY] {
            assert!(FractionalOrder::new(bad).is_err(), "{bad} accepted");
        }
        assert!(FractionalOrder::new(2.0)
            .unwrap()
            .require_model_range()
            .is_err());
        assert!(FractionalOrder::new(1.99)
            .unwrap()
            .require_model_range()
            .is_ok());
    }
}

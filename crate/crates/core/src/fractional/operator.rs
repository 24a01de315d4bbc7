use nalgebra::DMatrix;

use super::weights::{riesz_weights, RieszWeights};
use super::{FractionalError, FractionalOrder};

/// Approximates `∂^α f / ∂|x|^α` at the interior nodes of a grid with
/// spacing `h`, extending `f` by zero outside the interior:
///
/// `y_i = -(1/h^α) Σ_j w_{i-j} f_j`.
///
/// The weight table must reach `|i - j| ≤ len - 1`.
pub fn apply_riesz(
    weights: &RieszWeights,
    field: &[f64],
    h: f64,
) -> Result<Vec<f64>, FractionalError> {
    let n = field.len();
    if n > 0 && weights.half_width() < n - 1 {
        return Err(FractionalError::LengthMismatch {
            expected: n - 1,
            found: weights.half_width(),
        });
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(FractionalError::InvalidArgument(format!(
            "grid spacing must be positive, got {h}"
        )));
    }
    let w = weights.one_sided();
    let factor = -h.powf(-weights.alpha());
    let out = (0..n)
        .map(|i| {
            let acc: f64 = field
                .iter()
                .enumerate()
                .map(|(j, f)| w[i.abs_diff(j)] * f)
                .sum();
            factor * acc
        })
        .collect();
    Ok(out)
}

/// Dense symmetric Toeplitz matrix `P` with `P_ij = (c / h^α) w_{i-j}`.
///
/// `P` carries no leading minus: `P f = -c · apply_riesz(f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RieszOperatorMatrix {
    scale: f64,
    entries: DMatrix<f64>,
}

impl RieszOperatorMatrix {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    /// `c / h^α`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let v = nalgebra::DVectorView::from_slice(x, x.len());
        (&self.entries * v).as_slice().to_vec()
    }
}

pub fn assemble_riesz_matrix(
    order: FractionalOrder,
    h: f64,
    interior_size: usize,
    scale_coefficient: f64,
) -> Result<RieszOperatorMatrix, FractionalError> {
    if interior_size == 0 {
        return Err(FractionalError::InvalidArgument(
            "interior size must be at least 1".into(),
        ));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(FractionalError::InvalidArgument(format!(
            "grid spacing must be positive, got {h}"
        )));
    }
    let weights = riesz_weights(order, interior_size - 1)?;
    let scale = scale_coefficient * h.powf(-order.value());
    let w = weights.one_sided();
    let entries = DMatrix::from_fn(interior_size, interior_size, |i, j| {
        scale * w[i.abs_diff(j)]
    });
    Ok(RieszOperatorMatrix { scale, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn order(alpha: f64) -> FractionalOrder {
        FractionalOrder::new(alpha).unwrap()
    }

    #[test]
    fn second_difference_at_alpha_two() {
        let w = riesz_weights(order(2.0), 2).unwrap();
        let y = apply_riesz(&w, &[0.0, 1.0, 0.0], 1.0).unwrap();
        assert_eq!(y, vec![1.0, -2.0, 1.0]);
    }

    #[test]
    fn zero_field_maps_to_zero() {
        let w = riesz_weights(order(1.3), 9).unwrap();
        let y = apply_riesz(&w, &[0.0; 10], 0.1).unwrap();
        assert!(y.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn short_table_is_rejected() {
        let w = riesz_weights(order(1.3), 2).unwrap();
        assert!(matches!(
            apply_riesz(&w, &[1.0; 5], 0.1),
            Err(FractionalError::LengthMismatch { .. })
        ));
        let w = riesz_weights(order(1.3), 4).unwrap();
        assert!(apply_riesz(&w, &[1.0; 5], 0.0).is_err());
    }

    #[test]
    fn tridiagonal_stencil_at_alpha_two() {
        let p = assemble_riesz_matrix(order(2.0), 1.0, 3, 1.0).unwrap();
        let expected = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
        assert_eq!(p.entries(), &expected);
    }

    #[test]
    fn matrix_is_symmetric_toeplitz() {
        let p = assemble_riesz_matrix(order(1.7), 0.3, 6, 0.8).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(p.get(i, j), p.get(j, i));
                if i + 1 < 6 && j + 1 < 6 {
                    assert_eq!(p.get(i, j), p.get(i + 1, j + 1));
                }
            }
        }
        assert_eq!(p.get(0, 2), p.get(2, 0));
    }

    #[test]
    fn columns_equal_operator_on_unit_vectors() {
        let alpha = order(1.5);
        let (n, h, c) = (8, 0.25, 1.0);
        let p = assemble_riesz_matrix(alpha, h, n, c).unwrap();
        let w = riesz_weights(alpha, n - 1).unwrap();
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let col = apply_riesz(&w, &e, h).unwrap();
            for i in 0..n {
                assert_relative_eq!(p.get(i, j), -c * col[i], max_relative = 1e-14);
            }
        }
    }
}

use nalgebra::{DMatrix, DVector};

use super::grid::{ComplexField, Grid};
use super::SolverError;
use crate::fractional::{assemble_riesz_matrix, FractionalOrder};
use crate::model::CfglCoefficients;

/// The real `2n × 2n` form of the linear CFGL operator,
///
/// ```text
/// A_h = [ -P + γ_r I    -γ_i I     ]
///       [  γ_i I        -P + γ_r I ]
/// ```
///
/// with `P_ij = (P_r / h^α) w_{i-j}` dense.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    interior: usize,
    matrix: DMatrix<f64>,
}

impl BlockOperator {
    pub fn interior_len(&self) -> usize {
        self.interior
    }

    pub fn dimension(&self) -> usize {
        2 * self.interior
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Block `(row, col)` with `row, col ∈ {0, 1}`, copied out.
    pub fn block(&self, row: usize, col: usize) -> DMatrix<f64> {
        let n = self.interior;
        self.matrix.view((row * n, col * n), (n, n)).into_owned()
    }

    pub fn apply_stacked(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x
    }

    pub fn apply(&self, field: &ComplexField) -> ComplexField {
        ComplexField::from_stacked(&self.apply_stacked(&field.to_stacked()))
    }
}

pub fn assemble_block_operator(
    coeffs: &CfglCoefficients,
    order: FractionalOrder,
    grid: &Grid,
) -> Result<BlockOperator, SolverError> {
    let n = grid.interior_len();
    let p = assemble_riesz_matrix(order, grid.spacing(), n, coeffs.p_r)?.into_entries();
    let mut matrix = DMatrix::zeros(2 * n, 2 * n);
    let diag = DMatrix::identity(n, n) * coeffs.gamma_r - p;
    matrix.view_mut((0, 0), (n, n)).copy_from(&diag);
    matrix.view_mut((n, n), (n, n)).copy_from(&diag);
    for i in 0..n {
        matrix[(i, n + i)] = -coeffs.gamma_i;
        matrix[(n + i, i)] = coeffs.gamma_i;
    }
    Ok(BlockOperator {
        interior: n,
        matrix,
    })
}

/// `F(U, V) = (-(Q_r U - Q_i V)|B|², -(Q_i U + Q_r V)|B|²)`, stacked.
pub fn nonlinear_term(state: &ComplexField, coeffs: &CfglCoefficients) -> DVector<f64> {
    let n = state.len();
    let mut out = DVector::zeros(2 * n);
    for (i, (&u, &v)) in state.u.iter().zip(&state.v).enumerate() {
        let m = u * u + v * v;
        out[i] = -(coeffs.q_r * u - coeffs.q_i * v) * m;
        out[n + i] = -(coeffs.q_i * u + coeffs.q_r * v) * m;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractional::{apply_riesz, riesz_weights};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn coeffs(gamma_r: f64, gamma_i: f64, p_r: f64) -> CfglCoefficients {
        CfglCoefficients {
            gamma_r,
            gamma_i,
            p_r,
            q_r: 0.7,
            q_i: -0.2,
        }
    }

    #[test]
    fn identity_when_only_real_gain() {
        let g = Grid::new(1.0, 6).unwrap();
        let a = assemble_block_operator(&coeffs(0.4, 0.0, 0.0), FractionalOrder::new(1.8).unwrap(), &g)
            .unwrap();
        assert_eq!(a.matrix(), &(DMatrix::identity(10, 10) * 0.4));
    }

    #[test]
    fn skew_coupling_blocks() {
        let g = Grid::new(1.0, 5).unwrap();
        let a = assemble_block_operator(&coeffs(0.1, 0.3, 0.5), FractionalOrder::new(1.5).unwrap(), &g)
            .unwrap();
        assert_eq!(a.block(0, 1), DMatrix::identity(4, 4) * -0.3);
        assert_eq!(a.block(1, 0), DMatrix::identity(4, 4) * 0.3);
        assert_eq!(a.block(0, 0), a.block(1, 1));
    }

    #[test]
    fn block_product_matches_componentwise_formula() {
        let alpha = FractionalOrder::new(1.8).unwrap();
        let c = coeffs(-0.2, 0.35, 0.9);
        let g = Grid::new(3.0, 17).unwrap();
        let a = assemble_block_operator(&c, alpha, &g).unwrap();
        let n = g.interior_len();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = ComplexField::new(
            (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
            (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )
        .unwrap();
        let w = riesz_weights(alpha, n - 1).unwrap();
        let ru = apply_riesz(&w, &f.u, g.spacing()).unwrap();
        let rv = apply_riesz(&w, &f.v, g.spacing()).unwrap();
        let out = a.apply(&f);
        for i in 0..n {
            let eu = c.p_r * ru[i] + c.gamma_r * f.u[i] - c.gamma_i * f.v[i];
            let ev = c.p_r * rv[i] + c.gamma_i * f.u[i] + c.gamma_r * f.v[i];
            assert!((out.u[i] - eu).abs() <= 1e-12 * (1.0 + eu.abs()));
            assert!((out.v[i] - ev).abs() <= 1e-12 * (1.0 + ev.abs()));
        }
    }

    #[test]
    fn nonlinearity_cases() {
        let c = coeffs(0.0, 0.0, 0.0);
        assert!(nonlinear_term(&ComplexField::zeros(4), &c).iter().all(|x| *x == 0.0));
        let f = ComplexField::new(vec![1.0, 0.0], vec![0.0, 0.0]).unwrap();
        let out = nonlinear_term(&f, &c);
        assert_eq!(out.as_slice(), &[-0.7, 0.0, 0.2, 0.0]);
    }

    #[test]
    fn nonlinearity_matches_complex_arithmetic() {
        let c = coeffs(0.0, 0.0, 0.0);
        let q = Complex64::new(c.q_r, c.q_i);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let z: Vec<Complex64> = (0..9)
            .map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
            .collect();
        let out = nonlinear_term(&ComplexField::from_complex(&z), &c);
        for (i, b) in z.iter().enumerate() {
            let e = -q * b.norm_sqr() * b;
            assert!((out[i] - e.re).abs() < 1e-13);
            assert!((out[9 + i] - e.im).abs() < 1e-13);
        }
    }
}

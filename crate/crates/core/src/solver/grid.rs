use nalgebra::DVector;
use num_complex::Complex64;

use super::SolverError;

/// Uniform grid on `(0, b)` with `M` subintervals. Only the `M - 1` interior
/// nodes `x_i = i h` carry unknowns; both boundary values are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    length: f64,
    intervals: usize,
}

impl Grid {
    pub fn new(length: f64, intervals: usize) -> Result<Self, SolverError> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(SolverError::InvalidGrid(format!(
                "domain length must be positive, got {length}"
            )));
        }
        if intervals < 2 {
            return Err(SolverError::InvalidGrid(format!(
                "need at least 2 subintervals, got {intervals}"
            )));
        }
        Ok(Self { length, intervals })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.intervals as f64
    }

    pub fn interior_len(&self) -> usize {
        self.intervals - 1
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    /// `x_1, ..., x_{M-1}`.
    pub fn interior_nodes(&self) -> Vec<f64> {
        (1..self.intervals).map(|i| self.node(i)).collect()
    }
}

/// Real and imaginary parts `(U, V)` of the amplitude at the interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl ComplexField {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Result<Self, SolverError> {
        if u.len() != v.len() {
            return Err(SolverError::ShapeMismatch {
                expected: u.len(),
                found: v.len(),
            });
        }
        Ok(Self { u, v })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            u: vec![0.0; n],
            v: vec![0.0; n],
        }
    }

    pub fn from_complex(values: &[Complex64]) -> Self {
        Self {
            u: values.iter().map(|z| z.re).collect(),
            v: values.iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.u
            .iter()
            .zip(&self.v)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// `(U_1..U_n, V_1..V_n)`.
    pub fn to_stacked(&self) -> DVector<f64> {
        DVector::from_iterator(2 * self.len(), self.u.iter().chain(&self.v).copied())
    }

    pub fn from_stacked(x: &DVector<f64>) -> Self {
        let n = x.len() / 2;
        Self {
            u: x.as_slice()[..n].to_vec(),
            v: x.as_slice()[n..].to_vec(),
        }
    }

    pub fn modulus_sq(&self) -> Vec<f64> {
        self.u.iter().zip(&self.v).map(|(a, b)| a * a + b * b).collect()
    }

    pub fn max_modulus_sq(&self) -> f64 {
        self.u
            .iter()
            .zip(&self.v)
            .map(|(a, b)| a * a + b * b)
            .fold(0.0, f64::max)
    }

    /// Discrete `L²` norm `sqrt(h Σ |B_i|²)`.
    pub fn l2_norm(&self, h: f64) -> f64 {
        (h * self.modulus_sq().iter().sum::<f64>()).sqrt()
    }

    /// Share of `Σ|B_i|²` carried by nodes in the central half `[b/4, 3b/4]`.
    /// Zero for the zero field.
    pub fn localization_fraction(&self, grid: &Grid) -> f64 {
        let (lo, hi) = (0.25 * grid.length(), 0.75 * grid.length());
        let mut total = 0.0;
        let mut central = 0.0;
        for (i, m) in self.modulus_sq().into_iter().enumerate() {
            total += m;
            let x = grid.node(i + 1);
            if (lo..=hi).contains(&x) {
                central += m;
            }
        }
        if total > 0.0 {
            central / total
        } else {
            0.0
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).all(|x| x.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_basics() {
        let g = Grid::new(10.0, 5).unwrap();
        assert_eq!(g.spacing(), 2.0);
        assert_eq!(g.interior_nodes(), vec![2.0, 4.0, 6.0, 8.0]);
        assert!(Grid::new(10.0, 1).is_err());
        assert!(Grid::new(0.0, 8).is_err());
        assert!(Grid::new(f64::NAN, 8).is_err());
    }

    #[test]
    fn stacking_round_trip() {
        let f = ComplexField::new(vec![1.0, 2.0], vec![3.0, 4.0]).unwrap();
        let s = f.to_stacked();
        assert_eq!(s.as_slice(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(ComplexField::from_stacked(&s), f);
        assert!(ComplexField::new(vec![1.0], vec![]).is_err());
    }

    #[test]
    fn diagnostics() {
        let g = Grid::new(8.0, 8).unwrap();
        let mut f = ComplexField::zeros(7);
        assert_eq!(f.localization_fraction(&g), 0.0);
        // x_4 = 4 is central, x_1 = 1 is not.
        f.u[3] = 3.0;
        f.v[3] = 4.0;
        f.u[0] = 5.0;
        assert_eq!(f.max_modulus_sq(), 25.0);
        assert_eq!(f.localization_fraction(&g), 0.5);
        assert_eq!(f.l2_norm(1.0), 50.0_f64.sqrt());
    }
}

//! One-step maps for the semi-discrete system `dB/dt = A_h B + F(B)`.

use nalgebra::{DMatrix, DVector, Dyn, LU};

use super::block::{nonlinear_term, BlockOperator};
use super::grid::ComplexField;
use super::SolverError;
use crate::model::CfglCoefficients;

const PIVOT_RTOL: f64 = 1e-14;

/// LU factors of `I - c A_h` for a fixed shift `c`.
#[derive(Debug, Clone)]
pub struct SystemFactorization {
    lu: LU<f64, Dyn, Dyn>,
    dim: usize,
    shift: f64,
}

impl SystemFactorization {
    /// Factors `I - shift · A_h`.
    pub fn new(operator: &BlockOperator, shift: f64) -> Result<Self, SolverError> {
        let dim = operator.dimension();
        let system = DMatrix::identity(dim, dim) - operator.matrix() * shift;
        let scale = system.amax();
        let lu = system.lu();
        let min_pivot = lu.u().diagonal().amin();
        if !(min_pivot > PIVOT_RTOL * scale) {
            return Err(SolverError::Singular {
                pivot: min_pivot,
                scale,
            });
        }
        Ok(Self { lu, dim, shift })
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Overwrites `rhs` with the solution by forward and back substitution.
    pub fn solve_in_place(&self, rhs: &mut DVector<f64>) -> Result<(), SolverError> {
        if rhs.len() != self.dim {
            return Err(SolverError::ShapeMismatch {
                expected: self.dim,
                found: rhs.len(),
            });
        }
        if self.lu.solve_mut(rhs) {
            Ok(())
        } else {
            Err(SolverError::Singular {
                pivot: 0.0,
                scale: 1.0,
            })
        }
    }
}

/// Factors `I - τ A_h` once for the semi-implicit scheme.
pub fn factor_semi_implicit_system(
    operator: &BlockOperator,
    tau: f64,
) -> Result<SystemFactorization, SolverError> {
    if !(tau > 0.0) {
        return Err(SolverError::InvalidConfig(format!("tau must be positive, got {tau}")));
    }
    SystemFactorization::new(operator, tau)
}

/// `B_{n+1} = (I - τA_h)^{-1} (B_n + τ F(B_n))`: linear part implicit,
/// cubic part explicit, one back-substitution per step.
pub fn step_semi_implicit(
    state: &ComplexField,
    factorization: &SystemFactorization,
    coeffs: &CfglCoefficients,
    tau: f64,
) -> Result<ComplexField, SolverError> {
    let mut rhs = state.to_stacked();
    rhs.axpy(tau, &nonlinear_term(state, coeffs), 1.0);
    factorization.solve_in_place(&mut rhs)?;
    Ok(ComplexField::from_stacked(&rhs))
}

/// The θ-weighted Euler map
///
/// `(B_{n+1} - B_n)/τ = θ(A_h B_n + F(B_n)) + (1-θ)(A_h B_{n+1} + F(B_{n+1}))`,
///
/// where `θ = 1` is explicit, `θ = 0` fully implicit and `θ = 1/2` is
/// Crank-Nicolson. For `θ < 1` the implicit cubic is resolved by Picard
/// iteration on `F` around the factored `I - τ(1-θ)A_h`; the factorization
/// is built once per stepper.
#[derive(Debug, Clone)]
pub struct ThetaStepper<'a> {
    operator: &'a BlockOperator,
    factorization: Option<SystemFactorization>,
    tau: f64,
    theta: f64,
    tol: f64,
    max_iters: usize,
}

impl<'a> ThetaStepper<'a> {
    pub fn new(
        operator: &'a BlockOperator,
        tau: f64,
        theta: f64,
        tol: f64,
        max_iters: usize,
    ) -> Result<Self, SolverError> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(SolverError::InvalidConfig(format!("theta must lie in [0, 1], got {theta}")));
        }
        if !(tau > 0.0) {
            return Err(SolverError::InvalidConfig(format!("tau must be positive, got {tau}")));
        }
        let factorization = if theta < 1.0 {
            if !(tol > 0.0) || max_iters == 0 {
                return Err(SolverError::InvalidConfig(
                    "implicit theta needs a positive tolerance and at least one iteration".into(),
                ));
            }
            Some(SystemFactorization::new(operator, tau * (1.0 - theta))?)
        } else {
            None
        };
        Ok(Self {
            operator,
            factorization,
            tau,
            theta,
            tol,
            max_iters,
        })
    }

    /// Number of matrix factorizations this stepper performed (0 or 1).
    pub fn factorizations(&self) -> usize {
        usize::from(self.factorization.is_some())
    }

    pub fn step(&self, state: &ComplexField, coeffs: &CfglCoefficients) -> Result<ComplexField, SolverError> {
        self.step_counted(state, coeffs).map(|(next, _)| next)
    }

    /// Like [`ThetaStepper::step`], also returning the Picard iteration count.
    pub fn step_counted(
        &self,
        state: &ComplexField,
        coeffs: &CfglCoefficients,
    ) -> Result<(ComplexField, usize), SolverError> {
        let current = state.to_stacked();
        let mut base = current.clone();
        if self.theta > 0.0 {
            let mut drift = self.operator.apply_stacked(&current);
            drift += nonlinear_term(state, coeffs);
            base.axpy(self.tau * self.theta, &drift, 1.0);
        }
        let Some(factorization) = &self.factorization else {
            return Ok((ComplexField::from_stacked(&base), 0));
        };

        let weight = self.tau * (1.0 - self.theta);
        let mut iterate = current;
        let mut iterate_field = state.clone();
        let mut increment = f64::INFINITY;
        for iter in 1..=self.max_iters {
            let mut next = base.clone();
            next.axpy(weight, &nonlinear_term(&iterate_field, coeffs), 1.0);
            factorization.solve_in_place(&mut next)?;
            increment = (&next - &iterate).amax();
            iterate = next;
            iterate_field = ComplexField::from_stacked(&iterate);
            if !increment.is_finite() {
                break;
            }
            if increment <= self.tol {
                return Ok((iterate_field, iter));
            }
        }
        Err(SolverError::NonConvergence {
            iterations: self.max_iters,
            increment,
        })
    }
}

/// One θ-Euler step; factors `I - τ(1-θ)A_h` on every call. Use
/// [`ThetaStepper`] to advance many steps.
pub fn step_theta(
    state: &ComplexField,
    operator: &BlockOperator,
    coeffs: &CfglCoefficients,
    tau: f64,
    theta: f64,
    tol: f64,
    max_iters: usize,
) -> Result<ComplexField, SolverError> {
    ThetaStepper::new(operator, tau, theta, tol, max_iters)?.step(state, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractional::FractionalOrder;
    use crate::solver::{assemble_block_operator, Grid};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn linear(gamma_r: f64, gamma_i: f64, p_r: f64) -> CfglCoefficients {
        CfglCoefficients {
            gamma_r,
            gamma_i,
            p_r,
            q_r: 0.0,
            q_i: 0.0,
        }
    }

    fn random_field(n: usize, seed: u64) -> ComplexField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ComplexField::new(
            (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
            (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )
        .unwrap()
    }

    fn setup(c: &CfglCoefficients, alpha: f64, m: usize) -> (Grid, BlockOperator) {
        let g = Grid::new(2.0, m).unwrap();
        let a = assemble_block_operator(c, FractionalOrder::new(alpha).unwrap(), &g).unwrap();
        (g, a)
    }

    #[test]
    fn zero_operator_factorization_is_identity() {
        let c = linear(0.0, 0.0, 0.0);
        let (_, a) = setup(&c, 1.5, 6);
        let f = factor_semi_implicit_system(&a, 0.1).unwrap();
        let x = random_field(5, 1);
        let y = step_semi_implicit(&x, &f, &c, 0.1).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn scalar_decay() {
        let c = linear(-0.8, 0.0, 0.0);
        let (_, a) = setup(&c, 1.5, 6);
        let tau = 0.05;
        let x = random_field(5, 2);
        let f = factor_semi_implicit_system(&a, tau).unwrap();
        let y = step_semi_implicit(&x, &f, &c, tau).unwrap();
        let z = step_theta(&x, &a, &c, tau, 0.0, 1e-14, 10).unwrap();
        for i in 0..5 {
            let e = x.u[i] / (1.0 + tau * 0.8);
            assert!((y.u[i] - e).abs() < 1e-15);
            assert!((z.u[i] - e).abs() < 1e-15);
        }
    }

    #[test]
    fn explicit_theta_is_forward_euler() {
        let c = CfglCoefficients {
            gamma_r: 0.3,
            gamma_i: -0.4,
            p_r: 0.6,
            q_r: 1.0,
            q_i: 0.5,
        };
        let (_, a) = setup(&c, 1.7, 12);
        let x = random_field(11, 3);
        let tau = 0.01;
        let stepper = ThetaStepper::new(&a, tau, 1.0, 1e-10, 5).unwrap();
        assert_eq!(stepper.factorizations(), 0);
        let y = stepper.step(&x, &c).unwrap().to_stacked();
        let mut expected = x.to_stacked();
        let drift = a.apply_stacked(&x.to_stacked()) + nonlinear_term(&x, &c);
        expected.axpy(tau, &drift, 1.0);
        assert_eq!(y, expected);
    }

    #[test]
    fn implicit_theta_satisfies_its_equation() {
        let c = CfglCoefficients {
            gamma_r: 0.3,
            gamma_i: -0.4,
            p_r: 0.6,
            q_r: 1.0,
            q_i: 0.5,
        };
        let (_, a) = setup(&c, 1.7, 12);
        let x = random_field(11, 4);
        let tau = 0.01;
        for theta in [0.0, 0.5] {
            let y = step_theta(&x, &a, &c, tau, theta, 1e-13, 100).unwrap();
            let (bn, bn1) = (x.to_stacked(), y.to_stacked());
            let rhs_n = a.apply_stacked(&bn) + nonlinear_term(&x, &c);
            let rhs_n1 = a.apply_stacked(&bn1) + nonlinear_term(&y, &c);
            let residual = (&bn1 - &bn) / tau - rhs_n * theta - rhs_n1 * (1.0 - theta);
            assert!(residual.amax() < 1e-9, "theta={theta} residual={}", residual.amax());
        }
    }

    #[test]
    fn picard_budget_exhaustion_is_reported() {
        let c = CfglCoefficients {
            gamma_r: 0.0,
            gamma_i: 0.0,
            p_r: 0.0,
            q_r: 1.0,
            q_i: 0.0,
        };
        let (_, a) = setup(&c, 1.7, 6);
        let x = random_field(5, 5);
        assert!(matches!(
            step_theta(&x, &a, &c, 0.1, 0.0, 1e-14, 1),
            Err(SolverError::NonConvergence { .. })
        ));
    }

    #[test]
    fn solve_residual_on_random_system() {
        let c = CfglCoefficients {
            gamma_r: 0.5,
            gamma_i: 1.3,
            p_r: -0.4,
            q_r: 0.0,
            q_i: 0.0,
        };
        let (_, a) = setup(&c, 1.3, 40);
        let tau = 0.02;
        let f = factor_semi_implicit_system(&a, tau).unwrap();
        let rhs = random_field(39, 6).to_stacked();
        let mut x = rhs.clone();
        f.solve_in_place(&mut x).unwrap();
        let system = DMatrix::identity(78, 78) - a.matrix() * tau;
        let r = &system * &x - &rhs;
        assert!(r.norm() <= 1e-10 * rhs.norm());
    }

    #[test]
    fn singular_system_detected() {
        // γ_r = 1/τ makes I - τA_h exactly zero.
        let c = linear(10.0, 0.0, 0.0);
        let (_, a) = setup(&c, 1.5, 6);
        assert!(matches!(
            factor_semi_implicit_system(&a, 0.1),
            Err(SolverError::Singular { .. })
        ));
        assert!(factor_semi_implicit_system(&a, 0.0).is_err());
        assert!(ThetaStepper::new(&a, 0.1, 1.5, 1e-10, 10).is_err());
    }
}

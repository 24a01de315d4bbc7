use std::fmt;
use std::str::FromStr;

use super::block::assemble_block_operator;
use super::grid::{ComplexField, Grid};
use super::stepping::{factor_semi_implicit_system, step_semi_implicit, ThetaStepper};
use super::SolverError;
use crate::fractional::FractionalOrder;
use crate::model::CfglCoefficients;

/// Growth of `max|B|²` over its initial value that aborts a run.
pub const BLOW_UP_FACTOR: f64 = 1e6;

/// Upper bound on stored snapshots when no stride is configured.
pub const DEFAULT_MAX_SNAPSHOTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    ThetaEuler,
    SemiImplicit,
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "theta_euler" => Ok(Self::ThetaEuler),
            "semi_implicit" => Ok(Self::SemiImplicit),
            other => Err(format!(
                "unknown scheme '{other}' (expected theta_euler or semi_implicit)"
            )),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ThetaEuler => "theta_euler",
            Self::SemiImplicit => "semi_implicit",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub tau: f64,
    pub final_time: f64,
    pub theta: f64,
    pub scheme: Scheme,
    /// Steps between stored `|B|²` snapshots; `None` picks the smallest
    /// stride giving at most [`DEFAULT_MAX_SNAPSHOTS`].
    pub snapshot_stride: Option<usize>,
    pub fixed_point_tol: f64,
    pub fixed_point_max_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tau: 1e-4,
            final_time: 0.2,
            theta: 0.5,
            scheme: Scheme::SemiImplicit,
            snapshot_stride: None,
            fixed_point_tol: 1e-10,
            fixed_point_max_iters: 50,
        }
    }
}

impl SolverConfig {
    /// `N` with `N τ = T`; rejects a `T` that is not a whole number of steps.
    pub fn steps(&self) -> Result<usize, SolverError> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(SolverError::InvalidConfig(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.final_time >= 0.0 && self.final_time.is_finite()) {
            return Err(SolverError::InvalidConfig(format!(
                "final time must be non-negative, got {}",
                self.final_time
            )));
        }
        let n = (self.final_time / self.tau).round();
        if (n * self.tau - self.final_time).abs() > 1e-9 * self.final_time.max(self.tau) {
            return Err(SolverError::InvalidConfig(format!(
                "final time {} is not a multiple of tau {}",
                self.final_time, self.tau
            )));
        }
        Ok(n as usize)
    }

    pub fn stride_for(&self, steps: usize) -> usize {
        match self.snapshot_stride {
            Some(s) => s.max(1),
            None => steps.div_ceil(DEFAULT_MAX_SNAPSHOTS - 1).max(1),
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        self.steps()?;
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(SolverError::InvalidConfig(format!("theta must lie in [0, 1], got {}", self.theta)));
        }
        if self.snapshot_stride == Some(0) {
            return Err(SolverError::InvalidConfig("snapshot stride must be >= 1".into()));
        }
        if !(self.fixed_point_tol > 0.0) || self.fixed_point_max_iters == 0 {
            return Err(SolverError::InvalidConfig(
                "fixed-point tolerance must be > 0 and max iterations >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Scalar diagnostics recorded after every step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    pub max_modulus_sq: f64,
    pub l2_norm: f64,
    pub localization: f64,
}

impl Diagnostics {
    fn of(t: f64, field: &ComplexField, grid: &Grid) -> Self {
        Self {
            t,
            max_modulus_sq: field.max_modulus_sq(),
            l2_norm: field.l2_norm(grid.spacing()),
            localization: field.localization_fraction(grid),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: Grid,
    /// Snapshot times, strictly increasing, starting at 0.
    pub times: Vec<f64>,
    /// `|B(x_i, t)|²` at the interior nodes for each snapshot time.
    pub snapshots: Vec<Vec<f64>>,
    /// One entry for `t = 0` and one per completed step.
    pub diagnostics: Vec<Diagnostics>,
    pub final_state: ComplexField,
    pub steps: usize,
    pub factorizations: usize,
    /// Total Picard iterations (θ-Euler with θ < 1 only).
    pub fixed_point_iterations: usize,
}

impl Trajectory {
    pub fn final_diagnostics(&self) -> &Diagnostics {
        self.diagnostics.last().expect("trajectory always holds the initial diagnostics")
    }

    fn push_snapshot(&mut self, t: f64, field: &ComplexField) {
        self.times.push(t);
        self.snapshots.push(field.modulus_sq());
    }
}

/// A run that stopped early, with everything recorded up to that point.
#[derive(Debug)]
pub struct EvolutionError {
    pub error: SolverError,
    pub partial: Option<Box<Trajectory>>,
}

impl fmt::Display for EvolutionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.partial {
            Some(p) => write!(f, "{} (after {} steps)", self.error, p.steps),
            None => write!(f, "{}", self.error),
        }
    }
}

impl std::error::Error for EvolutionError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl From<SolverError> for EvolutionError {
    fn from(error: SolverError) -> Self {
        Self { error, partial: None }
    }
}

enum Stepper<'a> {
    Semi(super::stepping::SystemFactorization),
    Theta(ThetaStepper<'a>),
}

/// Integrates from `t = 0` to `T`, recording `|B|²` snapshots every stride
/// steps (plus the final state) and scalar diagnostics every step.
///
/// The linear system is factored exactly once per run.
pub fn run_evolution(
    config: &SolverConfig,
    grid: &Grid,
    coeffs: &CfglCoefficients,
    order: FractionalOrder,
    initial: &ComplexField,
) -> Result<Trajectory, EvolutionError> {
    config.validate()?;
    if initial.len() != grid.interior_len() {
        return Err(SolverError::ShapeMismatch {
            expected: grid.interior_len(),
            found: initial.len(),
        }
        .into());
    }
    let steps = config.steps()?;
    let stride = config.stride_for(steps);
    let tau = config.tau;

    let operator = assemble_block_operator(coeffs, order, grid)?;
    let (stepper, factorizations) = match config.scheme {
        Scheme::SemiImplicit => (Stepper::Semi(factor_semi_implicit_system(&operator, tau)?), 1),
        Scheme::ThetaEuler => {
            let s = ThetaStepper::new(
                &operator,
                tau,
                config.theta,
                config.fixed_point_tol,
                config.fixed_point_max_iters,
            )?;
            let count = s.factorizations();
            (Stepper::Theta(s), count)
        }
    };

    let initial_max = initial.max_modulus_sq();
    let limit = BLOW_UP_FACTOR * initial_max;

    let mut traj = Trajectory {
        grid: *grid,
        times: Vec::with_capacity(steps / stride + 2),
        snapshots: Vec::with_capacity(steps / stride + 2),
        diagnostics: Vec::with_capacity(steps + 1),
        final_state: initial.clone(),
        steps: 0,
        factorizations,
        fixed_point_iterations: 0,
    };
    traj.push_snapshot(0.0, initial);
    traj.diagnostics.push(Diagnostics::of(0.0, initial, grid));

    let mut state = initial.clone();
    for n in 1..=steps {
        let t = n as f64 * tau;
        let next = match &stepper {
            Stepper::Semi(f) => step_semi_implicit(&state, f, coeffs, tau),
            Stepper::Theta(s) => s.step_counted(&state, coeffs).map(|(next, iters)| {
                traj.fixed_point_iterations += iters;
                next
            }),
        };
        let next = match next {
            Ok(next) => next,
            Err(error) => {
                traj.final_state = state;
                return Err(EvolutionError {
                    error,
                    partial: Some(Box::new(traj)),
                });
            }
        };
        state = next;
        let diag = Diagnostics::of(t, &state, grid);
        traj.diagnostics.push(diag);
        traj.steps = n;

        let blown = !diag.max_modulus_sq.is_finite() || (initial_max > 0.0 && diag.max_modulus_sq > limit);
        if n % stride == 0 || n == steps || blown {
            traj.push_snapshot(t, &state);
        }
        if blown {
            traj.final_state = state;
            return Err(EvolutionError {
                error: SolverError::BlowUp {
                    t,
                    max_modulus_sq: diag.max_modulus_sq,
                    limit,
                },
                partial: Some(Box::new(traj)),
            });
        }
    }
    traj.final_state = state;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs() -> CfglCoefficients {
        CfglCoefficients {
            gamma_r: -0.5,
            gamma_i: 0.2,
            p_r: 0.0,
            q_r: 0.0,
            q_i: 0.0,
        }
    }

    fn bump(grid: &Grid) -> ComplexField {
        let c = 0.5 * grid.length();
        let u = grid.interior_nodes().iter().map(|x| (-(x - c).powi(2)).exp()).collect();
        ComplexField::new(u, vec![0.0; grid.interior_len()]).unwrap()
    }

    #[test]
    fn step_count_and_stride() {
        let c = SolverConfig::default();
        assert_eq!(c.steps().unwrap(), 2000);
        assert_eq!(c.stride_for(2000), 11);
        assert!(2000 / 11 + 2 <= DEFAULT_MAX_SNAPSHOTS);
        let bad = SolverConfig {
            final_time: 0.20005,
            ..c.clone()
        };
        assert!(bad.steps().is_err());
        assert!(SolverConfig { theta: 1.2, ..c }.validate().is_err());
    }

    #[test]
    fn zero_initial_field_stays_zero() {
        let grid = Grid::new(10.0, 32).unwrap();
        let config = SolverConfig {
            tau: 0.01,
            final_time: 0.1,
            ..Default::default()
        };
        let c = CfglCoefficients {
            p_r: 0.3,
            q_r: 1.0,
            q_i: 0.4,
            ..coeffs()
        };
        let traj = run_evolution(&config, &grid, &c, FractionalOrder::new(1.8).unwrap(), &ComplexField::zeros(31)).unwrap();
        assert!(traj.snapshots.iter().flatten().all(|v| *v == 0.0));
        assert_eq!(traj.factorizations, 1);
        assert_eq!(traj.steps, 10);
        assert_eq!(traj.diagnostics.len(), 11);
    }

    #[test]
    fn linear_contraction_decays_monotonically() {
        let grid = Grid::new(10.0, 32).unwrap();
        for scheme in [Scheme::SemiImplicit, Scheme::ThetaEuler] {
            let config = SolverConfig {
                tau: 0.01,
                final_time: 0.5,
                scheme,
                snapshot_stride: Some(7),
                ..Default::default()
            };
            let traj = run_evolution(&config, &grid, &coeffs(), FractionalOrder::new(1.5).unwrap(), &bump(&grid)).unwrap();
            let norms: Vec<f64> = traj.diagnostics.iter().map(|d| d.l2_norm).collect();
            assert!(norms.windows(2).all(|w| w[1] < w[0]));
            assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
            assert_eq!(*traj.times.last().unwrap(), 0.5);
            assert_eq!(traj.times.len(), 50 / 7 + 2);
        }
    }

    #[test]
    fn blow_up_guard_returns_partial_run() {
        let grid = Grid::new(10.0, 16).unwrap();
        let c = CfglCoefficients {
            gamma_r: 50.0,
            ..coeffs()
        };
        let config = SolverConfig {
            tau: 0.001,
            final_time: 1.0,
            scheme: Scheme::ThetaEuler,
            theta: 1.0,
            ..Default::default()
        };
        let err = run_evolution(&config, &grid, &c, FractionalOrder::new(1.5).unwrap(), &bump(&grid)).unwrap_err();
        assert!(matches!(err.error, SolverError::BlowUp { .. }));
        let partial = err.partial.unwrap();
        assert!(partial.steps > 0 && partial.steps < 1000);
        assert_eq!(partial.factorizations, 0);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let grid = Grid::new(10.0, 16).unwrap();
        let err = run_evolution(
            &SolverConfig::default(),
            &grid,
            &coeffs(),
            FractionalOrder::new(1.5).unwrap(),
            &ComplexField::zeros(3),
        )
        .unwrap_err();
        assert!(err.partial.is_none());
    }
}

//! Refinement studies and step-timing measurements behind the
//! `convergence` and `bench` subcommands.

use std::time::Instant;

use num_complex::Complex64;

use super::{RunConfig, RunError};
use crate::fractional::{apply_riesz, riesz_weights, FractionalOrder};
use crate::model::{coefficients_for, CfglCoefficients};
use crate::solver::{
    assemble_block_operator, factor_semi_implicit_system, run_evolution, solitary_field,
    step_semi_implicit, ComplexField, Grid, Scheme, SolverConfig, SolverError, ThetaStepper,
};

/// Errors measured along a refinement ladder (`steps` is h or τ per rung).
#[derive(Debug, Clone, PartialEq)]
pub struct Study {
    pub name: &'static str,
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    pub fitted_order: f64,
}

impl Study {
    fn new(name: &'static str, steps: Vec<f64>, errors: Vec<f64>) -> Self {
        let fitted_order = fitted_order(&steps, &errors);
        Self {
            name,
            steps,
            errors,
            fitted_order,
        }
    }

    /// Order between rung `i - 1` and `i`; `None` for the first rung.
    pub fn local_orders(&self) -> Vec<Option<f64>> {
        (0..self.errors.len())
            .map(|i| {
                (i > 0).then(|| {
                    (self.errors[i - 1] / self.errors[i]).ln() / (self.steps[i - 1] / self.steps[i]).ln()
                })
            })
            .collect()
    }
}

/// Least-squares slope of `ln error` against `ln step`.
pub fn fitted_order(steps: &[f64], errors: &[f64]) -> f64 {
    let n = steps.len().min(errors.len()) as f64;
    let xs: Vec<f64> = steps.iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// `exp(1 - 1/(1 - r²))` with `r = (x - center)/radius`, zero for `|r| ≥ 1`.
pub fn smooth_bump(x: f64, center: f64, radius: f64) -> f64 {
    let r = (x - center) / radius;
    if r.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    }
}

const BUMP_DOMAIN: f64 = 4.0;

/// Discrete Riesz derivative of a bump on `(0, 4)` at `base · 2^j` intervals,
/// `j = 0..=rungs`; rung `j` error is the sup-norm gap between grids `j` and
/// `j + 1` on the coarsest nodes.
pub fn spatial_self_convergence(
    order: FractionalOrder,
    base_intervals: usize,
    rungs: usize,
) -> Result<Study, SolverError> {
    let mut actions = Vec::with_capacity(rungs + 1);
    for j in 0..=rungs {
        let grid = Grid::new(BUMP_DOMAIN, base_intervals << j)?;
        let f: Vec<f64> = grid
            .interior_nodes()
            .iter()
            .map(|&x| smooth_bump(x, 0.5 * BUMP_DOMAIN, 1.0))
            .collect();
        let w = riesz_weights(order, f.len().saturating_sub(1))?;
        let r = apply_riesz(&w, &f, grid.spacing())?;
        // keep only the coarse nodes: interior index i*2^j - 1
        let coarse: Vec<f64> = (1..base_intervals).map(|i| r[(i << j) - 1]).collect();
        actions.push((grid.spacing(), coarse));
    }
    let (steps, errors) = actions
        .windows(2)
        .map(|pair| (pair[0].0, sup_gap(&pair[0].1, &pair[1].1)))
        .unzip();
    Ok(Study::new("space", steps, errors))
}

fn sup_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Smooth synthetic CFGL problem for temporal refinement.
#[derive(Debug, Clone)]
pub struct SyntheticProblem {
    pub grid: Grid,
    pub order: FractionalOrder,
    pub coeffs: CfglCoefficients,
    pub initial: ComplexField,
    pub final_time: f64,
}

/// `b = 10`, `γ = 0.5 + 0.5i`, `P_r = 1`, `Q = 1 + 0.5i`, with a
/// Gaussian initial pulse of width 0.5 centred in the domain.
pub fn synthetic_problem(
    order: FractionalOrder,
    intervals: usize,
    final_time: f64,
) -> Result<SyntheticProblem, SolverError> {
    let grid = Grid::new(10.0, intervals)?;
    let phase = Complex64::new(1.0, 0.5);
    let values: Vec<Complex64> = grid
        .interior_nodes()
        .iter()
        .map(|x| phase * (-(x - 5.0).powi(2) / 0.5).exp())
        .collect();
    Ok(SyntheticProblem {
        grid,
        order,
        coeffs: CfglCoefficients {
            gamma_r: 0.5,
            gamma_i: 0.5,
            p_r: 1.0,
            q_r: 1.0,
            q_i: 0.5,
        },
        initial: ComplexField::from_complex(&values),
        final_time,
    })
}

impl SyntheticProblem {
    fn solve(&self, scheme: Scheme, theta: f64, steps: usize) -> Result<ComplexField, SolverError> {
        let config = SolverConfig {
            tau: self.final_time / steps as f64,
            final_time: self.final_time,
            theta,
            scheme,
            snapshot_stride: Some(steps),
            fixed_point_tol: 1e-13,
            fixed_point_max_iters: 200,
        };
        run_evolution(&config, &self.grid, &self.coeffs, self.order, &self.initial)
            .map(|t| t.final_state)
            .map_err(|e| e.error)
    }

    fn ladder(&self, base_steps: usize, rungs: usize) -> Vec<usize> {
        (0..=rungs).map(|j| base_steps << j).collect()
    }
}

fn field_gap(a: &ComplexField, b: &ComplexField) -> f64 {
    a.to_complex()
        .iter()
        .zip(b.to_complex())
        .fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// τ-ladder `T/(base·2^j)`; rung `j` error is the sup-norm gap between the
/// final states at `τ_j` and `τ_{j+1}`.
pub fn temporal_self_convergence(
    problem: &SyntheticProblem,
    scheme: Scheme,
    theta: f64,
    base_steps: usize,
    rungs: usize,
) -> Result<Study, SolverError> {
    let ladder = problem.ladder(base_steps, rungs);
    let finals = ladder
        .iter()
        .map(|&n| problem.solve(scheme, theta, n))
        .collect::<Result<Vec<_>, _>>()?;
    let name = match scheme {
        Scheme::SemiImplicit => "time_semi_implicit",
        Scheme::ThetaEuler => "time_theta_euler",
    };
    let (steps, errors) = finals
        .windows(2)
        .zip(&ladder)
        .map(|(pair, &n)| (problem.final_time / n as f64, field_gap(&pair[0], &pair[1])))
        .unzip();
    Ok(Study::new(name, steps, errors))
}

/// Sup-norm gap between the semi-implicit and Crank-Nicolson final states at
/// each τ of the ladder (rungs + 1 entries).
pub fn cross_scheme_study(
    problem: &SyntheticProblem,
    base_steps: usize,
    rungs: usize,
) -> Result<Study, SolverError> {
    let ladder = problem.ladder(base_steps, rungs);
    let mut steps = Vec::new();
    let mut errors = Vec::new();
    for &n in &ladder {
        let semi = problem.solve(Scheme::SemiImplicit, 0.0, n)?;
        let cn = problem.solve(Scheme::ThetaEuler, 0.5, n)?;
        steps.push(problem.final_time / n as f64);
        errors.push(field_gap(&semi, &cn));
    }
    Ok(Study::new("cross_scheme", steps, errors))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub intervals: usize,
    pub assembly_s: f64,
    pub factorization_s: f64,
    pub semi_step_mean_s: f64,
    /// Standard deviation over mean of the per-step times.
    pub semi_step_cv: f64,
    pub semi_factorizations: usize,
    pub implicit_factorization_s: f64,
    pub implicit_step_mean_s: f64,
    pub implicit_mean_iterations: f64,
}

fn mean_and_cv(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
    (mean, if mean > 0.0 { var.sqrt() / mean } else { 0.0 })
}

/// Times assembly, the single factorization and `steps` semi-implicit steps
/// at `intervals`, then the same number of θ = 0 fixed-point steps.
pub fn bench_point(
    config: &RunConfig,
    order: FractionalOrder,
    intervals: usize,
    steps: usize,
) -> Result<BenchRow, RunError> {
    let (carrier, coeffs) =
        coefficients_for(&config.lienard, order, config.carrier_k, config.omega_override)?;
    let grid = Grid::new(config.domain_length, intervals)?;
    let initial = solitary_field(
        &grid,
        config.lienard.b0,
        carrier.k,
        &coeffs,
        config.pulse_center_fraction * config.domain_length,
    )?;
    let tau = config.solver.tau;

    let clock = Instant::now();
    let operator = assemble_block_operator(&coeffs, order, &grid)?;
    let assembly_s = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let fact = factor_semi_implicit_system(&operator, tau)?;
    let factorization_s = clock.elapsed().as_secs_f64();
    let semi_factorizations = 1;

    let mut state = initial.clone();
    let mut times = Vec::with_capacity(steps);
    for _ in 0..steps {
        let clock = Instant::now();
        state = step_semi_implicit(&state, &fact, &coeffs, tau)?;
        times.push(clock.elapsed().as_secs_f64());
    }
    let (semi_step_mean_s, semi_step_cv) = mean_and_cv(&times);

    let clock = Instant::now();
    let stepper = ThetaStepper::new(
        &operator,
        tau,
        0.0,
        config.solver.fixed_point_tol,
        config.solver.fixed_point_max_iters,
    )?;
    let implicit_factorization_s = clock.elapsed().as_secs_f64();
    let mut state = initial;
    let mut total_iters = 0;
    let clock = Instant::now();
    for _ in 0..steps {
        let (next, iters) = stepper.step_counted(&state, &coeffs)?;
        state = next;
        total_iters += iters;
    }
    let implicit_step_mean_s = clock.elapsed().as_secs_f64() / steps as f64;

    Ok(BenchRow {
        intervals,
        assembly_s,
        factorization_s,
        semi_step_mean_s,
        semi_step_cv,
        semi_factorizations,
        implicit_factorization_s,
        implicit_step_mean_s,
        implicit_mean_iterations: total_iters as f64 / steps as f64,
    })
}

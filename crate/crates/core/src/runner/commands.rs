use std::fs;
use std::path::{Path, PathBuf};

use super::config::{model_order, DEFAULT_DISPERSION_ALPHAS, DEFAULT_EVOLVE_ALPHAS};
use super::output::{format_real, write_csv, write_resolved_config};
use super::studies::{
    bench_point, cross_scheme_study, spatial_self_convergence, synthetic_problem,
    temporal_self_convergence, Study,
};
use super::{run_jobs, ConfigError, RunConfig, RunError};
use crate::fractional::FractionalOrder;
use crate::hr_network::{build_kernel, simulate_network, HrNetworkState, SimulationOptions};
use crate::model::{coefficients_for, dispersion_omega, ModelError};
use crate::solver::{run_evolution, solitary_field, Diagnostics, Grid, Scheme, Trajectory};

/// Where a command wrote its files, plus one human-readable line per result.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub dir: PathBuf,
    pub summary: Vec<String>,
}

fn prepare_dir(dir: &Path, config: &RunConfig) -> Result<(), RunError> {
    fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))?;
    write_resolved_config(dir, config)
}

fn order_of(alpha: f64) -> Result<FractionalOrder, RunError> {
    model_order(alpha).map_err(|e| ConfigError::Invalid(format!("alpha = {alpha}: {e}")).into())
}

fn empty_or(x: Option<f64>) -> String {
    x.map(format_real).unwrap_or_default()
}

/// `dispersion.csv`: `k` then one `Ω` column per α. Cells past the cutoff
/// (non-positive radicand) are empty.
pub fn cmd_dispersion(config: &RunConfig, root: &Path) -> Result<Outcome, RunError> {
    let dir = root.join("dispersion");
    prepare_dir(&dir, config)?;
    let alphas = config.alphas_or(&DEFAULT_DISPERSION_ALPHAS);
    let orders = alphas.iter().map(|&a| order_of(a)).collect::<Result<Vec<_>, _>>()?;

    let n = config.k_points;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let k = config.k_max * i as f64 / (n - 1) as f64;
        let mut row = vec![format_real(k)];
        for &order in &orders {
            let omega = match dispersion_omega(k, &config.lienard, order) {
                Ok(w) => Some(w),
                Err(ModelError::ImaginaryFrequency { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            row.push(empty_or(omega));
        }
        rows.push(row);
    }
    let mut header = vec!["k".to_string()];
    header.extend(alphas.iter().map(|a| format!("omega_alpha_{a}")));
    write_csv(&dir.join("dispersion.csv"), &header, rows)?;
    Ok(Outcome {
        summary: vec![format!("dispersion: {} curves x {n} wavenumbers", alphas.len())],
        dir,
    })
}

/// One finished `evolve` run.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolveRun {
    pub alpha: f64,
    pub real_dissipation: bool,
    pub dir: PathBuf,
    pub initial: Diagnostics,
    pub last: Diagnostics,
    pub factorizations: usize,
}

pub fn evolve_run_name(alpha: f64, real_dissipation: bool) -> String {
    let kind = if real_dissipation { "real" } else { "complex" };
    format!("alpha_{alpha}_{kind}")
}

fn write_trajectory(dir: &Path, traj: &Trajectory) -> Result<(), RunError> {
    let mut header = vec!["t".to_string()];
    header.extend(traj.grid.interior_nodes().into_iter().map(format_real));
    let rows = traj.times.iter().zip(&traj.snapshots).map(|(&t, snap)| {
        std::iter::once(t).chain(snap.iter().copied()).map(format_real).collect()
    });
    write_csv(&dir.join("snapshots.csv"), &header, rows)?;

    let header: Vec<String> = ["t", "max_modulus_sq", "l2_norm", "localization"]
        .map(String::from)
        .to_vec();
    let rows = traj.diagnostics.iter().map(|d| {
        [d.t, d.max_modulus_sq, d.l2_norm, d.localization]
            .map(format_real)
            .to_vec()
    });
    write_csv(&dir.join("diagnostics.csv"), &header, rows)
}

fn evolve_one(
    config: &RunConfig,
    root: &Path,
    alpha: f64,
    real_dissipation: bool,
) -> Result<EvolveRun, RunError> {
    let dir = root.join("evolve").join(evolve_run_name(alpha, real_dissipation));
    prepare_dir(&dir, config)?;
    let order = order_of(alpha)?;
    let (carrier, mut coeffs) =
        coefficients_for(&config.lienard, order, config.carrier_k, config.omega_override)?;
    if real_dissipation {
        coeffs = coeffs.with_real_dissipation();
    }
    let header: Vec<String> = ["alpha", "k", "omega", "gamma_r", "gamma_i", "p_r", "q_r", "q_i"]
        .map(String::from)
        .to_vec();
    let row = [
        alpha,
        carrier.k,
        carrier.omega,
        coeffs.gamma_r,
        coeffs.gamma_i,
        coeffs.p_r,
        coeffs.q_r,
        coeffs.q_i,
    ]
    .map(format_real)
    .to_vec();
    write_csv(&dir.join("coefficients.csv"), &header, [row])?;

    let grid = Grid::new(config.domain_length, config.grid_intervals)?;
    let initial = solitary_field(
        &grid,
        config.lienard.b0,
        carrier.k,
        &coeffs,
        config.pulse_center_fraction * config.domain_length,
    )?;
    match run_evolution(&config.solver, &grid, &coeffs, order, &initial) {
        Ok(traj) => {
            write_trajectory(&dir, &traj)?;
            Ok(EvolveRun {
                alpha,
                real_dissipation,
                dir,
                initial: traj.diagnostics[0],
                last: *traj.final_diagnostics(),
                factorizations: traj.factorizations,
            })
        }
        Err(e) => {
            if let Some(partial) = &e.partial {
                write_trajectory(&dir, partial)?;
            }
            Err(e.error.into())
        }
    }
}

/// Runs every `α × dissipation` combination into
/// `evolve/alpha_<α>_<real|complex>/`, up to `jobs` at a time. Every run is
/// attempted; the first failure is returned after the others finish.
pub fn cmd_evolve(config: &RunConfig, root: &Path, jobs: usize) -> Result<Vec<EvolveRun>, RunError> {
    let alphas = config.alphas_or(&DEFAULT_EVOLVE_ALPHAS);
    let tasks: Vec<(f64, bool)> = alphas
        .iter()
        .flat_map(|&a| config.dissipation.variants().iter().map(move |&r| (a, r)))
        .collect();
    run_jobs(&tasks, jobs, |&(a, r)| evolve_one(config, root, a, r))
        .into_iter()
        .collect()
}

/// `hr_timeseries.csv` (`t, u_1..u_N`) and `hr_spikes.csv` (`neuron, spikes`).
pub fn cmd_hr_sim(config: &RunConfig, root: &Path) -> Result<Outcome, RunError> {
    let dir = root.join("hr-sim");
    prepare_dir(&dir, config)?;
    let n = config.hr_neurons;
    let kernel = build_kernel(n, config.hr.coupling, config.hr.alpha)?;
    let initial = HrNetworkState::perturbed_rest(n, &config.hr, config.hr_bump, config.hr_noise, config.seed)?;
    let options = SimulationOptions {
        dt: config.hr_dt,
        final_time: config.hr_final_time,
        record_stride: config.hr_record_stride,
        spike_threshold: config.hr_spike_threshold,
        record_all: false,
    };
    let series = simulate_network(&initial, &config.hr, &kernel, &options)?;

    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("u_{i}")));
    let rows = series.times.iter().zip(&series.u).map(|(&t, u)| {
        std::iter::once(t).chain(u.iter().copied()).map(format_real).collect()
    });
    write_csv(&dir.join("hr_timeseries.csv"), &header, rows)?;
    let rows = series
        .spike_counts
        .iter()
        .enumerate()
        .map(|(i, c)| vec![(i + 1).to_string(), c.to_string()]);
    write_csv(
        &dir.join("hr_spikes.csv"),
        &["neuron".to_string(), "spikes".to_string()],
        rows,
    )?;
    let total: usize = series.spike_counts.iter().sum();
    Ok(Outcome {
        summary: vec![format!(
            "hr-sim: {n} neurons, {} samples, {total} spikes",
            series.times.len()
        )],
        dir,
    })
}

/// Coarsest τ of the temporal ladders is `T / TIME_BASE_STEPS`.
pub const TIME_BASE_STEPS: usize = 4;

/// Runs the spatial, semi-implicit, Crank-Nicolson and cross-scheme studies.
pub fn convergence_studies(config: &RunConfig) -> Result<Vec<Study>, RunError> {
    let alpha = config.alphas_or(&DEFAULT_EVOLVE_ALPHAS)[0];
    let order = order_of(alpha)?;
    let rungs = config.conv_rungs;
    let problem = synthetic_problem(order, config.conv_time_intervals, config.conv_final_time)?;
    Ok(vec![
        spatial_self_convergence(order, config.conv_space_intervals, rungs)?,
        temporal_self_convergence(&problem, Scheme::SemiImplicit, 0.0, TIME_BASE_STEPS, rungs)?,
        temporal_self_convergence(&problem, Scheme::ThetaEuler, 0.5, TIME_BASE_STEPS, rungs)?,
        cross_scheme_study(&problem, TIME_BASE_STEPS, rungs)?,
    ])
}

/// `convergence.csv` (`study, step, error, order`) and
/// `convergence_summary.csv` (`study, fitted_order`).
pub fn cmd_convergence(config: &RunConfig, root: &Path) -> Result<Outcome, RunError> {
    let dir = root.join("convergence");
    prepare_dir(&dir, config)?;
    let studies = convergence_studies(config)?;
    let mut rows = Vec::new();
    for s in &studies {
        for ((&h, &e), p) in s.steps.iter().zip(&s.errors).zip(s.local_orders()) {
            rows.push(vec![s.name.to_string(), format_real(h), format_real(e), empty_or(p)]);
        }
    }
    let header = ["study", "step", "error", "order"].map(String::from).to_vec();
    write_csv(&dir.join("convergence.csv"), &header, rows)?;
    let header = ["study", "fitted_order"].map(String::from).to_vec();
    let rows = studies
        .iter()
        .map(|s| vec![s.name.to_string(), format_real(s.fitted_order)]);
    write_csv(&dir.join("convergence_summary.csv"), &header, rows)?;
    Ok(Outcome {
        summary: studies
            .iter()
            .map(|s| format!("{}: fitted order {:.3}", s.name, s.fitted_order))
            .collect(),
        dir,
    })
}

/// `bench.csv`, one row per grid size in `bench_sizes`.
pub fn cmd_bench(config: &RunConfig, root: &Path) -> Result<Outcome, RunError> {
    let dir = root.join("bench");
    prepare_dir(&dir, config)?;
    let order = order_of(config.alphas_or(&DEFAULT_EVOLVE_ALPHAS)[0])?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &m in &config.bench_sizes {
        let b = bench_point(config, order, m, config.bench_steps)?;
        summary.push(format!(
            "M = {m}: semi-implicit {:.3e} s/step, theta=0 {:.3e} s/step",
            b.semi_step_mean_s, b.implicit_step_mean_s
        ));
        rows.push(vec![
            m.to_string(),
            format_real(b.assembly_s),
            format_real(b.factorization_s),
            format_real(b.semi_step_mean_s),
            format_real(b.semi_step_cv),
            format_real(1.0 / b.semi_step_mean_s),
            b.semi_factorizations.to_string(),
            format_real(b.implicit_factorization_s),
            format_real(b.implicit_step_mean_s),
            format_real(1.0 / b.implicit_step_mean_s),
            format_real(b.implicit_mean_iterations),
        ]);
    }
    let header = [
        "intervals",
        "assembly_s",
        "factorization_s",
        "semi_step_mean_s",
        "semi_step_cv",
        "semi_steps_per_s",
        "semi_factorizations",
        "implicit_factorization_s",
        "implicit_step_mean_s",
        "implicit_steps_per_s",
        "implicit_mean_fixed_point_iterations",
    ]
    .map(String::from)
    .to_vec();
    write_csv(&dir.join("bench.csv"), &header, rows)?;
    Ok(Outcome { dir, summary })
}

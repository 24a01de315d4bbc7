//! Command-line orchestration: config parsing, the five subcommands, and
//! CSV emission.

mod commands;
mod config;
mod output;
mod studies;

pub use commands::{
    cmd_bench, cmd_convergence, cmd_dispersion, cmd_evolve, cmd_hr_sim, convergence_studies,
    evolve_run_name, EvolveRun, Outcome, TIME_BASE_STEPS,
};
pub use config::{
    model_order, parse_config, ConfigError, Dissipation, RunConfig, DEFAULT_DISPERSION_ALPHAS,
    DEFAULT_EVOLVE_ALPHAS,
};
pub use output::{format_real, write_csv, write_resolved_config, RESOLVED_CONFIG_FILE};
pub use studies::{
    bench_point, cross_scheme_study, fitted_order, smooth_bump, spatial_self_convergence,
    synthetic_problem, temporal_self_convergence, BenchRow, Study, SyntheticProblem,
};

use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::fractional::FractionalError;
use crate::hr_network::HrError;
use crate::model::ModelError;
use crate::solver::SolverError;

/// Written into every run directory next to the resolved config.
pub const VERSION: &str = concat!("cfgl ", env!("CARGO_PKG_VERSION"));

/// Overrides the output root when `--out` is not given.
pub const OUTPUT_ROOT_ENV: &str = "CFGL_OUTPUT_ROOT";

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Fractional(#[from] FractionalError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Hr(#[from] HrError),
}

impl RunError {
    pub fn io(path: impl AsRef<Path>, source: io::Error) -> Self {
        Self::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    /// 2 config, 3 numerical failure, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Io { .. } => 4,
            Self::Fractional(_) | Self::Model(_) | Self::Solver(_) | Self::Hr(_) => 3,
        }
    }
}

/// `--out` if given, else `$CFGL_OUTPUT_ROOT`, else the config's `output_dir`.
pub fn resolve_output_root(flag: Option<&Path>, config: &RunConfig) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from(&config.output_dir),
    }
}

/// Maps `f` over `items` on up to `jobs` scoped threads, keeping order.
pub fn run_jobs<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let jobs = jobs.max(1);
    if jobs == 1 || items.len() <= 1 {
        return items.iter().map(&f).collect();
    }
    let mut out = Vec::with_capacity(items.len());
    for chunk in items.chunks(jobs) {
        std::thread::scope(|scope| {
            let handles: Vec<_> = chunk.iter().map(|item| scope.spawn(|| f(item))).collect();
            for h in handles {
                out.push(h.join().expect("worker thread panicked"));
            }
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(RunError::from(ConfigError::Invalid("x".into())).exit_code(), 2);
        assert_eq!(
            RunError::io("/x", io::Error::other("denied")).exit_code(),
            4
        );
        assert_eq!(
            RunError::from(SolverError::NonConvergence {
                iterations: 1,
                increment: 1.0
            })
            .exit_code(),
            3
        );
    }

    #[test]
    fn jobs_keep_order() {
        let items: Vec<u32> = (0..11).collect();
        assert_eq!(run_jobs(&items, 4, |x| x * x), run_jobs(&items, 1, |x| x * x));
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cfgl::runner::{
    cmd_bench, cmd_convergence, cmd_dispersion, cmd_evolve, cmd_hr_sim, parse_config,
    resolve_output_root, RunConfig, RunError,
};

#[derive(Debug, Parser)]
#[command(name = "cfgl", version, about = "Fractional Ginzburg-Landau pulse and Hindmarsh-Rose network runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Linear dispersion curves Ω(k), one per α
    Dispersion(Common),
    /// Pulse evolution with snapshots and diagnostics
    Evolve {
        #[command(flatten)]
        common: Common,
        /// Sweep points run concurrently
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Hindmarsh-Rose network time series and spike counts
    HrSim(Common),
    /// Spatial and temporal refinement studies
    Convergence(Common),
    /// Assembly, factorization and per-step timings
    Bench(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// key = value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output root directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fractional order; repeat to sweep (replaces the config's list)
    #[arg(long = "alpha")]
    alphas: Vec<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

fn load(common: &Common) -> Result<RunConfig, RunError> {
    let mut config = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if !common.alphas.is_empty() {
        config.alphas = Some(common.alphas.clone());
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<(), RunError> {
    let (common, jobs) = match &cli.command {
        Command::Evolve { common, jobs } => (common, *jobs),
        Command::Dispersion(c) | Command::HrSim(c) | Command::Convergence(c) | Command::Bench(c) => {
            (c, 1)
        }
    };
    let config = load(common)?;
    let root = resolve_output_root(common.out.as_deref(), &config);
    let report = |dir: &Path, lines: &[String]| {
        for l in lines {
            println!("{l}");
        }
        println!("wrote {}", dir.display());
    };
    match cli.command {
        Command::Dispersion(_) => {
            let o = cmd_dispersion(&config, &root)?;
            report(&o.dir, &o.summary);
        }
        Command::Evolve { .. } => {
            for r in cmd_evolve(&config, &root, jobs)? {
                println!(
                    "alpha = {} ({} dissipation): max|B|^2 {:.6e} -> {:.6e}, localization {:.4}",
                    r.alpha,
                    if r.real_dissipation { "real" } else { "complex" },
                    r.initial.max_modulus_sq,
                    r.last.max_modulus_sq,
                    r.last.localization
                );
                println!("wrote {}", r.dir.display());
            }
        }
        Command::HrSim(_) => {
            let o = cmd_hr_sim(&config, &root)?;
            report(&o.dir, &o.summary);
        }
        Command::Convergence(_) => {
            let o = cmd_convergence(&config, &root)?;
            report(&o.dir, &o.summary);
        }
        Command::Bench(_) => {
            let o = cmd_bench(&config, &root)?;
            report(&o.dir, &o.summary);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

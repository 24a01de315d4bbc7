//! `key = value` run configuration with a closed key schema.

use std::collections::HashSet;
use std::fmt::{self, Display, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::fractional::FractionalOrder;
use crate::hr_network::{CouplingSign, HrParameters};
use crate::model::LienardParameters;
use crate::solver::{Grid, SolverConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given more than once")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: cannot parse `{value}` for `{key}`: {reason}")]
    Parse {
        line: usize,
        key: String,
        value: String,
        reason: String,
    },
    #[error("line {line}: `{key}` {reason}")]
    Constraint {
        line: usize,
        key: String,
        reason: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Which dissipation variants `evolve` runs: the derived `γ_i`, `γ_i = 0`,
/// or both side by side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dissipation {
    Real,
    #[default]
    Complex,
    Both,
}

impl Dissipation {
    /// `true` for a run with `γ_i` zeroed.
    pub fn variants(self) -> &'static [bool] {
        match self {
            Self::Real => &[true],
            Self::Complex => &[false],
            Self::Both => &[false, true],
        }
    }
}

impl FromStr for Dissipation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "real" => Ok(Self::Real),
            "complex" => Ok(Self::Complex),
            "both" => Ok(Self::Both),
            other => Err(format!("expected real, complex or both, got `{other}`")),
        }
    }
}

impl Display for Dissipation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Real => "real",
            Self::Complex => "complex",
            Self::Both => "both",
        })
    }
}

pub const DEFAULT_DISPERSION_ALPHAS: [f64; 3] = [1.6, 1.7, 1.8];
pub const DEFAULT_EVOLVE_ALPHAS: [f64; 1] = [1.8];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub lienard: LienardParameters,
    /// `None` means the per-command default set.
    pub alphas: Option<Vec<f64>>,
    pub carrier_k: f64,
    pub omega_override: Option<f64>,
    pub domain_length: f64,
    pub grid_intervals: usize,
    pub pulse_center_fraction: f64,
    pub dissipation: Dissipation,
    pub solver: SolverConfig,
    pub k_max: f64,
    pub k_points: usize,
    pub hr: HrParameters,
    pub hr_neurons: usize,
    pub hr_dt: f64,
    pub hr_final_time: f64,
    pub hr_record_stride: usize,
    pub hr_spike_threshold: f64,
    pub hr_bump: f64,
    pub hr_noise: f64,
    pub conv_rungs: usize,
    pub conv_space_intervals: usize,
    pub conv_time_intervals: usize,
    pub conv_final_time: f64,
    pub bench_sizes: Vec<usize>,
    pub bench_steps: usize,
    pub seed: u64,
    pub output_dir: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            lienard: LienardParameters::default(),
            alphas: None,
            carrier_k: 0.5,
            omega_override: None,
            domain_length: 100.0,
            grid_intervals: 512,
            pulse_center_fraction: 0.5,
            dissipation: Dissipation::Complex,
            solver: SolverConfig::default(),
            k_max: 3.0,
            k_points: 301,
            hr: HrParameters::default(),
            hr_neurons: 32,
            hr_dt: 0.01,
            hr_final_time: 200.0,
            hr_record_stride: 10,
            hr_spike_threshold: 1.0,
            hr_bump: 0.5,
            hr_noise: 0.01,
            conv_rungs: 4,
            conv_space_intervals: 64,
            conv_time_intervals: 256,
            conv_final_time: 0.05,
            bench_sizes: vec![128, 256, 512],
            bench_steps: 50,
            seed: 42,
            output_dir: "cfgl-out".into(),
        }
    }
}

enum Fail {
    Parse(String),
    Constraint(String),
}

fn num<T: FromStr>(raw: &str) -> Result<T, Fail>
where
    T::Err: Display,
{
    raw.parse::<T>().map_err(|e| Fail::Parse(e.to_string()))
}

fn real(raw: &str) -> Result<f64, Fail> {
    let x: f64 = num(raw)?;
    if !x.is_finite() {
        return Err(Fail::Constraint("must be finite".into()));
    }
    Ok(x)
}

fn positive(raw: &str) -> Result<f64, Fail> {
    let x = real(raw)?;
    if x <= 0.0 {
        return Err(Fail::Constraint(format!("must be > 0, got {x}")));
    }
    Ok(x)
}

fn non_negative(raw: &str) -> Result<f64, Fail> {
    let x = real(raw)?;
    if x < 0.0 {
        return Err(Fail::Constraint(format!("must be >= 0, got {x}")));
    }
    Ok(x)
}

fn unit_interval(raw: &str) -> Result<f64, Fail> {
    let x = real(raw)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Fail::Constraint(format!("must lie in [0, 1], got {x}")));
    }
    Ok(x)
}

fn at_least(raw: &str, min: usize) -> Result<usize, Fail> {
    let n: usize = num(raw)?;
    if n < min {
        return Err(Fail::Constraint(format!("must be >= {min}, got {n}")));
    }
    Ok(n)
}

/// Fractional order usable by the model path, `0 < α < 2`, `α ≠ 1`.
pub fn model_order(alpha: f64) -> Result<FractionalOrder, String> {
    FractionalOrder::new(alpha)
        .and_then(FractionalOrder::require_model_range)
        .map_err(|e| e.to_string())
}

fn list<T>(raw: &str, item: impl Fn(&str) -> Result<T, Fail>) -> Result<Vec<T>, Fail> {
    let items: Vec<T> = raw.split(',').map(|s| item(s.trim())).collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(Fail::Constraint("must not be empty".into()));
    }
    Ok(items)
}

fn join<T: Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl RunConfig {
    fn set(&mut self, key: &str, raw: &str) -> Option<Result<(), Fail>> {
        let l = &mut self.lienard;
        let h = &mut self.hr;
        let s = &mut self.solver;
        let r = (|| {
            match key {
                "omega0_sq" => l.omega0_sq = positive(raw)?,
                "lambda1" => l.lambda1 = real(raw)?,
                "lambda3" => l.lambda3 = real(raw)?,
                "eta0" => l.eta0 = real(raw)?,
                "eta1" => l.eta1 = real(raw)?,
                "eta2" => l.eta2 = real(raw)?,
                "r" => l.r = positive(raw)?,
                "c0" => l.c0 = real(raw)?,
                "c1" => l.c1 = real(raw)?,
                "b0" => l.b0 = real(raw)?,
                "alpha" => {
                    self.alphas = Some(list(raw, |a| {
                        let x = real(a)?;
                        model_order(x).map_err(Fail::Constraint)?;
                        Ok(x)
                    })?)
                }
                "carrier_k" => self.carrier_k = non_negative(raw)?,
                "omega_override" => self.omega_override = Some(positive(raw)?),
                "domain_length" => self.domain_length = positive(raw)?,
                "grid_intervals" => self.grid_intervals = at_least(raw, 2)?,
                "pulse_center_fraction" => self.pulse_center_fraction = unit_interval(raw)?,
                "dissipation" => self.dissipation = raw.parse().map_err(Fail::Parse)?,
                "scheme" => s.scheme = raw.parse().map_err(Fail::Parse)?,
                "tau" => s.tau = positive(raw)?,
                "final_time" => s.final_time = positive(raw)?,
                "theta" => s.theta = unit_interval(raw)?,
                "snapshot_stride" => s.snapshot_stride = Some(at_least(raw, 1)?),
                "fixed_point_tol" => s.fixed_point_tol = positive(raw)?,
                "fixed_point_max_iters" => s.fixed_point_max_iters = at_least(raw, 1)?,
                "k_max" => self.k_max = positive(raw)?,
                "k_points" => self.k_points = at_least(raw, 2)?,
                "hr_a" => h.a = real(raw)?,
                "hr_b" => h.b = real(raw)?,
                "hr_c" => h.c = real(raw)?,
                "hr_d" => h.d = real(raw)?,
                "hr_r" => h.r = positive(raw)?,
                "hr_s" => h.s = real(raw)?,
                "hr_e" => h.e = real(raw)?,
                "hr_u0" => h.u0 = real(raw)?,
                "hr_current" => h.current = real(raw)?,
                "hr_coupling" => h.coupling = real(raw)?,
                "hr_alpha" => h.alpha = positive(raw)?,
                "hr_coupling_sign" => {
                    h.coupling_sign = match raw {
                        "literal" => CouplingSign::Literal,
                        "diffusive" => CouplingSign::Diffusive,
                        other => {
                            return Err(Fail::Parse(format!(
                                "expected literal or diffusive, got `{other}`"
                            )))
                        }
                    }
                }
                "hr_neurons" => self.hr_neurons = at_least(raw, 1)?,
                "hr_dt" => self.hr_dt = positive(raw)?,
                "hr_final_time" => self.hr_final_time = positive(raw)?,
                "hr_record_stride" => self.hr_record_stride = at_least(raw, 1)?,
                "hr_spike_threshold" => self.hr_spike_threshold = real(raw)?,
                "hr_bump" => self.hr_bump = real(raw)?,
                "hr_noise" => self.hr_noise = non_negative(raw)?,
                "conv_rungs" => self.conv_rungs = at_least(raw, 3)?,
                "conv_space_intervals" => self.conv_space_intervals = at_least(raw, 8)?,
                "conv_time_intervals" => self.conv_time_intervals = at_least(raw, 2)?,
                "conv_final_time" => self.conv_final_time = positive(raw)?,
                "bench_sizes" => self.bench_sizes = list(raw, |m| at_least(m, 2))?,
                "bench_steps" => self.bench_steps = at_least(raw, 2)?,
                "seed" => self.seed = num(raw)?,
                "output_dir" => {
                    if raw.is_empty() {
                        return Err(Fail::Constraint("must not be empty".into()));
                    }
                    self.output_dir = raw.to_string()
                }
                _ => return Ok(false),
            }
            Ok(true)
        })();
        match r {
            Ok(true) => Some(Ok(())),
            Ok(false) => None,
            Err(e) => Some(Err(e)),
        }
    }

    /// Every key with its value, in canonical order; optional keys that are
    /// unset are left out.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let l = &self.lienard;
        let h = &self.hr;
        let s = &self.solver;
        let mut out: Vec<(&'static str, String)> = vec![
            ("omega0_sq", l.omega0_sq.to_string()),
            ("lambda1", l.lambda1.to_string()),
            ("lambda3", l.lambda3.to_string()),
            ("eta0", l.eta0.to_string()),
            ("eta1", l.eta1.to_string()),
            ("eta2", l.eta2.to_string()),
            ("r", l.r.to_string()),
            ("c0", l.c0.to_string()),
            ("c1", l.c1.to_string()),
            ("b0", l.b0.to_string()),
        ];
        if let Some(a) = &self.alphas {
            out.push(("alpha", join(a)));
        }
        out.push(("carrier_k", self.carrier_k.to_string()));
        if let Some(w) = self.omega_override {
            out.push(("omega_override", w.to_string()));
        }
        out.extend([
            ("domain_length", self.domain_length.to_string()),
            ("grid_intervals", self.grid_intervals.to_string()),
            ("pulse_center_fraction", self.pulse_center_fraction.to_string()),
            ("dissipation", self.dissipation.to_string()),
            ("scheme", s.scheme.to_string()),
            ("tau", s.tau.to_string()),
            ("final_time", s.final_time.to_string()),
            ("theta", s.theta.to_string()),
        ]);
        if let Some(stride) = s.snapshot_stride {
            out.push(("snapshot_stride", stride.to_string()));
        }
        let sign = match h.coupling_sign {
            CouplingSign::Literal => "literal",
            CouplingSign::Diffusive => "diffusive",
        };
        out.extend([
            ("fixed_point_tol", s.fixed_point_tol.to_string()),
            ("fixed_point_max_iters", s.fixed_point_max_iters.to_string()),
            ("k_max", self.k_max.to_string()),
            ("k_points", self.k_points.to_string()),
            ("hr_a", h.a.to_string()),
            ("hr_b", h.b.to_string()),
            ("hr_c", h.c.to_string()),
            ("hr_d", h.d.to_string()),
            ("hr_r", h.r.to_string()),
            ("hr_s", h.s.to_string()),
            ("hr_e", h.e.to_string()),
            ("hr_u0", h.u0.to_string()),
            ("hr_current", h.current.to_string()),
            ("hr_coupling", h.coupling.to_string()),
            ("hr_alpha", h.alpha.to_string()),
            ("hr_coupling_sign", sign.to_string()),
            ("hr_neurons", self.hr_neurons.to_string()),
            ("hr_dt", self.hr_dt.to_string()),
            ("hr_final_time", self.hr_final_time.to_string()),
            ("hr_record_stride", self.hr_record_stride.to_string()),
            ("hr_spike_threshold", self.hr_spike_threshold.to_string()),
            ("hr_bump", self.hr_bump.to_string()),
            ("hr_noise", self.hr_noise.to_string()),
            ("conv_rungs", self.conv_rungs.to_string()),
            ("conv_space_intervals", self.conv_space_intervals.to_string()),
            ("conv_time_intervals", self.conv_time_intervals.to_string()),
            ("conv_final_time", self.conv_final_time.to_string()),
            ("bench_sizes", join(&self.bench_sizes)),
            ("bench_steps", self.bench_steps.to_string()),
            ("seed", self.seed.to_string()),
            ("output_dir", self.output_dir.clone()),
        ]);
        out
    }

    /// Fully resolved config in the same syntax `parse_config` reads.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// Cross-key checks that cannot be made one line at a time.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |e: &dyn Display| ConfigError::Invalid(e.to_string());
        self.lienard.validate().map_err(|e| invalid(&e))?;
        self.hr.validate().map_err(|e| invalid(&e))?;
        self.solver.validate().map_err(|e| invalid(&e))?;
        Grid::new(self.domain_length, self.grid_intervals).map_err(|e| invalid(&e))?;
        if let Some(alphas) = &self.alphas {
            for &a in alphas {
                model_order(a).map_err(|e| invalid(&e))?;
            }
        }
        if (self.hr_final_time / self.hr_dt).round() < 1.0 {
            return Err(invalid(&"hr_final_time must cover at least one hr_dt step"));
        }
        Ok(())
    }

    pub fn alphas_or(&self, default: &[f64]) -> Vec<f64> {
        self.alphas.clone().unwrap_or_else(|| default.to_vec())
    }
}

/// Parses `key = value` lines. `#` starts a comment (whole-line or trailing);
/// blank lines are skipped. Omitted keys keep their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut config = RunConfig::default();
    let mut seen = HashSet::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: content.to_string(),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                text: content.to_string(),
            });
        }
        match config.set(key, value) {
            None => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
            Some(Err(Fail::Parse(reason))) => {
                return Err(ConfigError::Parse {
                    line,
                    key: key.to_string(),
                    value: value.to_string(),
                    reason,
                })
            }
            Some(Err(Fail::Constraint(reason))) => {
                return Err(ConfigError::Constraint {
                    line,
                    key: key.to_string(),
                    reason,
                })
            }
            Some(Ok(())) => {}
        }
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
    }
    config.validate()?;
    Ok(config)
}

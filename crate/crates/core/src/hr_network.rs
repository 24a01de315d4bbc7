//! Direct simulation of `N` Hindmarsh-Rose neurons on an open chain with
//! power-law long-range coupling `K / |n - m|^{α+1}`:
//!
//! ```text
//! u̇_n = v_n - a u_n³ + b u_n² - w_n + I + σ Σ_{m≠n} K_{|n-m|} (u_n - u_m)
//! v̇_n = c - d u_n² - e v_n
//! ẇ_n = r (s (u_n - u₀) - w_n)
//! ```
//!
//! `σ = +1` by default; [`CouplingSign::Diffusive`] flips it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// `max|u|` beyond which a run is declared divergent.
pub const DIVERGENCE_LIMIT: f64 = 1e3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HrError {
    #[error("invalid network parameter: {0}")]
    InvalidParameter(String),
    #[error("state shape mismatch: expected {expected} neurons, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("divergence at t = {t}: max|u| = {max_abs_u:e}")]
    Divergence { t: f64, max_abs_u: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingSign {
    /// `+ Σ K (u_n - u_m)`.
    #[default]
    Literal,
    /// `- Σ K (u_n - u_m)`, i.e. `+ Σ K (u_m - u_n)`.
    Diffusive,
}

impl CouplingSign {
    fn factor(self) -> f64 {
        match self {
            Self::Literal => 1.0,
            Self::Diffusive => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HrParameters {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub r: f64,
    pub s: f64,
    pub e: f64,
    pub u0: f64,
    /// Stimulation current `I`.
    pub current: f64,
    /// Synapse strength `K`.
    pub coupling: f64,
    /// Long-range exponent `α`.
    pub alpha: f64,
    pub coupling_sign: CouplingSign,
}

impl Default for HrParameters {
    fn default() -> Self {
        Self {
            a: 1.0,
            b: 3.0,
            c: 1.0,
            d: 5.0,
            r: 0.008,
            s: 4.0,
            e: 1.0,
            u0: -1.6,
            current: 3.0,
            coupling: 0.01,
            alpha: 1.5,
            coupling_sign: CouplingSign::Literal,
        }
    }
}

impl HrParameters {
    pub fn validate(&self) -> Result<(), HrError> {
        let all = [
            self.a,
            self.b,
            self.c,
            self.d,
            self.r,
            self.s,
            self.e,
            self.u0,
            self.current,
            self.coupling,
            self.alpha,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(HrError::InvalidParameter("non-finite parameter".into()));
        }
        if self.r <= 0.0 {
            return Err(HrError::InvalidParameter("r must be > 0".into()));
        }
        if self.alpha <= 0.0 {
            return Err(HrError::InvalidParameter("alpha must be > 0".into()));
        }
        Ok(())
    }

    /// Rest point used for default initial states: `(u₀, (c - d u₀²)/e, 0)`.
    pub fn rest_point(&self) -> (f64, f64, f64) {
        (self.u0, (self.c - self.d * self.u0 * self.u0) / self.e, 0.0)
    }
}

/// `K_α(d) = K / d^{α+1}` for distances `d = 1..N-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingKernel {
    neurons: usize,
    // table[d - 1] = K / d^{α+1}
    table: Vec<f64>,
}

impl CouplingKernel {
    pub fn neurons(&self) -> usize {
        self.neurons
    }

    /// Strength at distance `d ≥ 1`.
    pub fn at(&self, d: usize) -> f64 {
        self.table[d - 1]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }
}

pub fn build_kernel(neurons: usize, coupling: f64, alpha: f64) -> Result<CouplingKernel, HrError> {
    if neurons == 0 {
        return Err(HrError::InvalidParameter("need at least one neuron".into()));
    }
    if !(alpha > 0.0 && alpha.is_finite() && coupling.is_finite()) {
        return Err(HrError::InvalidParameter(format!(
            "kernel needs finite K and alpha > 0, got K = {coupling}, alpha = {alpha}"
        )));
    }
    let table = (1..neurons)
        .map(|d| coupling / (d as f64).powf(alpha + 1.0))
        .collect();
    Ok(CouplingKernel { neurons, table })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HrNetworkState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub t: f64,
}

impl HrNetworkState {
    pub fn new(u: Vec<f64>, v: Vec<f64>, w: Vec<f64>) -> Result<Self, HrError> {
        if u.is_empty() {
            return Err(HrError::InvalidParameter("need at least one neuron".into()));
        }
        for other in [&v, &w] {
            if other.len() != u.len() {
                return Err(HrError::ShapeMismatch {
                    expected: u.len(),
                    found: other.len(),
                });
            }
        }
        Ok(Self { u, v, w, t: 0.0 })
    }

    pub fn uniform(neurons: usize, (u, v, w): (f64, f64, f64)) -> Result<Self, HrError> {
        Self::new(vec![u; neurons], vec![v; neurons], vec![w; neurons])
    }

    /// Every neuron at the rest point, with `bump` added to `u` of the middle
    /// neuron and independent uniform noise in `[-noise, noise]` on each `u`.
    pub fn perturbed_rest(
        neurons: usize,
        params: &HrParameters,
        bump: f64,
        noise: f64,
        seed: u64,
    ) -> Result<Self, HrError> {
        let mut state = Self::uniform(neurons, params.rest_point())?;
        state.u[neurons / 2] += bump;
        if noise > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for u in &mut state.u {
                *u += rng.random_range(-noise..=noise);
            }
        }
        Ok(state)
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).chain(&self.w).all(|x| x.is_finite())
    }

    fn axpy(&self, h: f64, k: &Derivative) -> Self {
        let comb = |x: &[f64], dx: &[f64]| x.iter().zip(dx).map(|(a, b)| a + h * b).collect();
        Self {
            u: comb(&self.u, &k.du),
            v: comb(&self.v, &k.dv),
            w: comb(&self.w, &k.dw),
            t: self.t + h,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Derivative {
    pub du: Vec<f64>,
    pub dv: Vec<f64>,
    pub dw: Vec<f64>,
}

pub fn hr_rhs(
    state: &HrNetworkState,
    params: &HrParameters,
    kernel: &CouplingKernel,
) -> Result<Derivative, HrError> {
    let n = state.len();
    if kernel.neurons() != n {
        return Err(HrError::ShapeMismatch {
            expected: kernel.neurons(),
            found: n,
        });
    }
    let sign = params.coupling_sign.factor();
    let u = &state.u;
    let mut du = Vec::with_capacity(n);
    let mut dv = Vec::with_capacity(n);
    let mut dw = Vec::with_capacity(n);
    for i in 0..n {
        let ui = u[i];
        let coupling: f64 = u
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(j, uj)| kernel.at(i.abs_diff(j)) * (ui - uj))
            .sum();
        du.push(
            state.v[i] - params.a * ui * ui * ui + params.b * ui * ui - state.w[i]
                + params.current
                + sign * coupling,
        );
        dv.push(params.c - params.d * ui * ui - params.e * state.v[i]);
        dw.push(params.r * (params.s * (ui - params.u0) - state.w[i]));
    }
    Ok(Derivative { du, dv, dw })
}

/// One classical fourth-order Runge-Kutta step.
pub fn rk4_step(
    state: &HrNetworkState,
    params: &HrParameters,
    kernel: &CouplingKernel,
    dt: f64,
) -> Result<HrNetworkState, HrError> {
    if !(dt > 0.0) {
        return Err(HrError::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let k1 = hr_rhs(state, params, kernel)?;
    let k2 = hr_rhs(&state.axpy(0.5 * dt, &k1), params, kernel)?;
    let k3 = hr_rhs(&state.axpy(0.5 * dt, &k2), params, kernel)?;
    let k4 = hr_rhs(&state.axpy(dt, &k3), params, kernel)?;
    let combine = |x: &[f64], a: &[f64], b: &[f64], c: &[f64], d: &[f64]| -> Vec<f64> {
        (0..x.len())
            .map(|i| x[i] + dt / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]))
            .collect()
    };
    let next = HrNetworkState {
        u: combine(&state.u, &k1.du, &k2.du, &k3.du, &k4.du),
        v: combine(&state.v, &k1.dv, &k2.dv, &k3.dv, &k4.dv),
        w: combine(&state.w, &k1.dw, &k2.dw, &k3.dw, &k4.dw),
        t: state.t + dt,
    };
    if !next.is_finite() {
        return Err(HrError::NonFinite { t: next.t });
    }
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationOptions {
    pub dt: f64,
    pub final_time: f64,
    pub record_stride: usize,
    /// Upward crossings of this level count as spikes.
    pub spike_threshold: f64,
    /// Whether `v` and `w` are recorded alongside `u`.
    pub record_all: bool,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self {
            dt: 0.01,
            final_time: 200.0,
            record_stride: 10,
            spike_threshold: 1.0,
            record_all: false,
        }
    }
}

/// Minimum number of steps between two spikes of the same neuron.
pub const SPIKE_REFRACTORY_STEPS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSeries {
    pub times: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    /// Empty unless `record_all` was set.
    pub v: Vec<Vec<f64>>,
    pub w: Vec<Vec<f64>>,
    pub spike_counts: Vec<usize>,
    pub final_state: HrNetworkState,
}

pub fn simulate_network(
    initial: &HrNetworkState,
    params: &HrParameters,
    kernel: &CouplingKernel,
    options: &SimulationOptions,
) -> Result<NetworkSeries, HrError> {
    params.validate()?;
    let SimulationOptions {
        dt,
        final_time,
        record_stride,
        spike_threshold,
        record_all,
    } = *options;
    if !(dt > 0.0 && final_time > 0.0) {
        return Err(HrError::InvalidParameter("dt and T must be positive".into()));
    }
    if record_stride == 0 {
        return Err(HrError::InvalidParameter("record stride must be >= 1".into()));
    }
    let steps = (final_time / dt).round() as usize;
    let n = initial.len();

    let mut series = NetworkSeries {
        times: Vec::new(),
        u: Vec::new(),
        v: Vec::new(),
        w: Vec::new(),
        spike_counts: vec![0; n],
        final_state: initial.clone(),
    };
    let record = |series: &mut NetworkSeries, s: &HrNetworkState| {
        series.times.push(s.t);
        series.u.push(s.u.clone());
        if record_all {
            series.v.push(s.v.clone());
            series.w.push(s.w.clone());
        }
    };
    record(&mut series, initial);

    let mut last_spike: Vec<Option<usize>> = vec![None; n];
    let mut state = initial.clone();
    for step in 1..=steps {
        let mut next = rk4_step(&state, params, kernel, dt)?;
        next.t = initial.t + step as f64 * dt;
        let max_abs_u = next.u.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if max_abs_u > DIVERGENCE_LIMIT {
            return Err(HrError::Divergence { t: next.t, max_abs_u });
        }
        for i in 0..n {
            let crossed = state.u[i] < spike_threshold && next.u[i] >= spike_threshold;
            let rested = last_spike[i].is_none_or(|s| step - s >= SPIKE_REFRACTORY_STEPS);
            if crossed && rested {
                series.spike_counts[i] += 1;
                last_spike[i] = Some(step);
            }
        }
        state = next;
        if step % record_stride == 0 || step == steps {
            record(&mut series, &state);
        }
    }
    series.final_state = state;
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kernel_values() {
        let k = build_kernel(5, 0.3, 1.0).unwrap();
        assert_eq!(k.at(1), 0.3);
        assert_eq!(k.at(2), 0.3 / 4.0);
        assert!(k.table().windows(2).all(|w| w[1] < w[0] && w[1] > 0.0));
        assert!(build_kernel(0, 1.0, 1.0).is_err());
        assert!(build_kernel(3, 1.0, 0.0).is_err());
        assert_eq!(build_kernel(1, 1.0, 1.0).unwrap().table().len(), 0);
    }

    #[test]
    fn decoupled_pair_matches_single_neurons() {
        let p = HrParameters {
            coupling: 0.0,
            ..Default::default()
        };
        let pair = HrNetworkState::new(vec![0.1, -0.7], vec![0.3, 1.0], vec![0.2, -0.1]).unwrap();
        let d = hr_rhs(&pair, &p, &build_kernel(2, 0.0, 1.5).unwrap()).unwrap();
        for i in 0..2 {
            let single = HrNetworkState::new(vec![pair.u[i]], vec![pair.v[i]], vec![pair.w[i]]).unwrap();
            let ds = hr_rhs(&single, &p, &build_kernel(1, 0.0, 1.5).unwrap()).unwrap();
            assert_eq!((d.du[i], d.dv[i], d.dw[i]), (ds.du[0], ds.dv[0], ds.dw[0]));
        }
        // Direct substitution for neuron 0.
        let u: f64 = 0.1;
        assert_relative_eq!(d.du[0], 0.3 - u.powi(3) + 3.0 * u * u - 0.2 + 3.0, max_relative = 1e-15);
        assert_relative_eq!(d.dv[0], 1.0 - 5.0 * u * u - 0.3, max_relative = 1e-15);
        assert_relative_eq!(d.dw[0], 0.008 * (4.0 * (u + 1.6) - 0.2), max_relative = 1e-15);
    }

    #[test]
    fn bursting_variable_at_equilibrium() {
        let p = HrParameters::default();
        let s = HrNetworkState::new(vec![p.u0; 3], vec![0.5, 1.0, -2.0], vec![0.0; 3]).unwrap();
        let d = hr_rhs(&s, &p, &build_kernel(3, 0.2, 1.5).unwrap()).unwrap();
        assert!(d.dw.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn coupling_vanishes_on_uniform_state() {
        let p = HrParameters {
            coupling: 0.7,
            ..Default::default()
        };
        let s = HrNetworkState::uniform(6, (0.4, -1.0, 0.2)).unwrap();
        let d = hr_rhs(&s, &p, &build_kernel(6, 0.7, 1.2).unwrap()).unwrap();
        assert!(d.du.iter().all(|x| *x == d.du[0]));
    }

    #[test]
    fn coupling_sign_flag() {
        let s = HrNetworkState::new(vec![1.0, 0.0], vec![0.0; 2], vec![0.0; 2]).unwrap();
        let kernel = build_kernel(2, 0.5, 1.0).unwrap();
        let lit = HrParameters {
            coupling: 0.5,
            ..Default::default()
        };
        let dif = HrParameters {
            coupling_sign: CouplingSign::Diffusive,
            ..lit
        };
        let a = hr_rhs(&s, &lit, &kernel).unwrap();
        let b = hr_rhs(&s, &dif, &kernel).unwrap();
        // Neuron 0 sits above neuron 1: literal coupling pushes it further up.
        assert_relative_eq!(a.du[0] - b.du[0], 2.0 * 0.5, max_relative = 1e-14);
    }

    #[test]
    fn rk4_on_linear_decay() {
        // a = b = c = d = 0 leaves v̇ = -e v, decoupled from u and w.
        let p = HrParameters {
            a: 0.0,
            b: 0.0,
            d: 0.0,
            e: 2.0,
            c: 0.0,
            coupling: 0.0,
            ..Default::default()
        };
        let s = HrNetworkState::new(vec![0.0], vec![1.0], vec![0.0]).unwrap();
        let dt = 0.1;
        let next = rk4_step(&s, &p, &build_kernel(1, 0.0, 1.0).unwrap(), dt).unwrap();
        let exact = (-2.0 * dt).exp();
        // Local error of RK4 on ẋ = λx is (λ dt)^5 / 120 to leading order.
        assert!((next.v[0] - exact).abs() < 1.01 * (2.0 * dt).powi(5) / 120.0);
        assert!(rk4_step(&s, &p, &build_kernel(1, 0.0, 1.0).unwrap(), 0.0).is_err());
        let tiny = rk4_step(&s, &p, &build_kernel(1, 0.0, 1.0).unwrap(), 1e-12).unwrap();
        assert!((tiny.v[0] - 1.0).abs() < 1e-11);
    }

    #[test]
    fn single_neuron_spikes_and_stays_bounded() {
        let p = HrParameters::default();
        let kernel = build_kernel(1, p.coupling, p.alpha).unwrap();
        let init = HrNetworkState::perturbed_rest(1, &p, 0.5, 0.0, 0).unwrap();
        let opts = SimulationOptions {
            final_time: 1000.0,
            record_stride: 100,
            ..Default::default()
        };
        let out = simulate_network(&init, &p, &kernel, &opts).unwrap();
        assert!(out.spike_counts[0] >= 1);
        assert!(out.u.iter().flatten().all(|u| u.abs() < 5.0));
        assert_eq!(out.times.len(), 1 + 100_000 / 100);
    }

    #[test]
    fn rest_state_without_current_stays_bounded() {
        let p = HrParameters {
            current: 0.0,
            ..Default::default()
        };
        let kernel = build_kernel(4, p.coupling, p.alpha).unwrap();
        let init = HrNetworkState::perturbed_rest(4, &p, 0.0, 0.0, 0).unwrap();
        let out = simulate_network(&init, &p, &kernel, &SimulationOptions::default()).unwrap();
        assert!(out.u.iter().flatten().all(|u| u.abs() < 3.0));
        assert_eq!(out.spike_counts, vec![0; 4]);
    }

    #[test]
    fn divergence_guard() {
        let p = HrParameters {
            a: -1.0,
            ..Default::default()
        };
        let kernel = build_kernel(1, 0.0, 1.0).unwrap();
        let init = HrNetworkState::uniform(1, (2.0, 0.0, 0.0)).unwrap();
        let err = simulate_network(&init, &p, &kernel, &SimulationOptions::default()).unwrap_err();
        assert!(matches!(err, HrError::Divergence { .. } | HrError::NonFinite { .. }));
    }
}

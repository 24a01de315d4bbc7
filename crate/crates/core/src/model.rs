//! Amplitude-equation model: linear dispersion, the coefficients of the
//! complex fractional Ginzburg-Landau equation
//!
//! `∂B/∂t = γ B + P_r ∂^α B/∂|x|^α - Q |B|² B`,
//!
//! its plane-wave family and their stability window, and the solitary-wave
//! initial profile.

use num_complex::Complex64;
use thiserror::Error;

use crate::fractional::{infrared_coefficient, FractionalError, FractionalOrder};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Fractional(#[from] FractionalError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("imaginary frequency at k = {k}: radicand {radicand} <= 0 (cutoff |k| = {cutoff:?})")]
    ImaginaryFrequency {
        k: f64,
        radicand: f64,
        cutoff: Option<f64>,
    },
    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),
    #[error("no real plane wave at k = {k}: amplitude radicand {radicand} < 0")]
    NegativeRadicand { k: f64, radicand: f64 },
    #[error("{0} is undefined when Q_i = 0")]
    UndefinedForZeroQi(&'static str),
}

/// Constants of the second-order (Lienard) form of the network equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LienardParameters {
    pub omega0_sq: f64,
    pub lambda1: f64,
    pub lambda3: f64,
    pub eta0: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub r: f64,
    pub c0: f64,
    pub c1: f64,
    /// Amplitude of the initial solitary wave.
    pub b0: f64,
}

impl Default for LienardParameters {
    fn default() -> Self {
        Self {
            omega0_sq: 0.032,
            lambda1: 0.01,
            lambda3: 0.023,
            eta0: 0.1,
            eta1: 0.001,
            eta2: 0.15,
            r: 0.008,
            c0: 0.001,
            c1: 0.001,
            b0: 0.5,
        }
    }
}

impl LienardParameters {
    pub fn validate(&self) -> Result<(), ModelError> {
        let all = [
            self.omega0_sq,
            self.lambda1,
            self.lambda3,
            self.eta0,
            self.eta1,
            self.eta2,
            self.r,
            self.c0,
            self.c1,
            self.b0,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::InvalidParameter("non-finite Lienard parameter".into()));
        }
        if self.omega0_sq <= 0.0 {
            return Err(ModelError::InvalidParameter("omega0_sq must be > 0".into()));
        }
        if self.r <= 0.0 {
            return Err(ModelError::InvalidParameter("r must be > 0".into()));
        }
        Ok(())
    }
}

/// `(γ_r, γ_i, P_r, Q_r, Q_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfglCoefficients {
    pub gamma_r: f64,
    pub gamma_i: f64,
    pub p_r: f64,
    pub q_r: f64,
    pub q_i: f64,
}

impl CfglCoefficients {
    /// Same coefficients with the imaginary part of the dissipation removed.
    pub fn with_real_dissipation(self) -> Self {
        Self {
            gamma_i: 0.0,
            ..self
        }
    }

    pub fn gamma(&self) -> Complex64 {
        Complex64::new(self.gamma_r, self.gamma_i)
    }

    pub fn q(&self) -> Complex64 {
        Complex64::new(self.q_r, self.q_i)
    }

    /// `γ_r - P_r |k|^α`, the net linear growth of a plane wave.
    pub fn net_growth(&self, k: f64, order: FractionalOrder) -> f64 {
        self.gamma_r - self.p_r * k.abs().powf(order.value())
    }
}

/// Carrier of the modulated wave: wavenumber, linear frequency and phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarrierWave {
    pub k: f64,
    pub omega: f64,
    pub theta0: f64,
}

impl CarrierWave {
    /// Builds the carrier with `Ω` taken from the dispersion relation.
    pub fn from_dispersion(
        k: f64,
        theta0: f64,
        params: &LienardParameters,
        order: FractionalOrder,
    ) -> Result<Self, ModelError> {
        Ok(Self {
            k,
            omega: dispersion_omega(k, params, order)?,
            theta0,
        })
    }
}

/// `|k*|` where `Ω₀² + c₀ a_α |k|^α` first vanishes, if it ever does.
pub fn cutoff_wavenumber(
    params: &LienardParameters,
    order: FractionalOrder,
) -> Result<Option<f64>, ModelError> {
    let slope = params.c0 * infrared_coefficient(order)?;
    if slope >= 0.0 {
        return Ok(None);
    }
    Ok(Some((params.omega0_sq / -slope).powf(1.0 / order.value())))
}

/// Linear dispersion `Ω(k) = sqrt(Ω₀² + c₀ a_α |k|^α)`.
pub fn dispersion_omega(
    k: f64,
    params: &LienardParameters,
    order: FractionalOrder,
) -> Result<f64, ModelError> {
    let a = infrared_coefficient(order)?;
    let radicand = params.omega0_sq + params.c0 * a * k.abs().powf(order.value());
    if !(radicand > 0.0) {
        return Err(ModelError::ImaginaryFrequency {
            k,
            radicand,
            cutoff: cutoff_wavenumber(params, order)?,
        });
    }
    Ok(radicand.sqrt())
}

/// CFGL coefficients at carrier frequency `omega`.
///
/// The `Q_i` prefactor is `1/Ω`.
pub fn derive_coefficients(
    params: &LienardParameters,
    omega: f64,
    order: FractionalOrder,
) -> Result<CfglCoefficients, ModelError> {
    if omega == 0.0 || !omega.is_finite() {
        return Err(ModelError::DivisionByZero("carrier frequency omega"));
    }
    if params.omega0_sq == 0.0 {
        return Err(ModelError::DivisionByZero("omega0_sq"));
    }
    let LienardParameters {
        omega0_sq,
        lambda1,
        lambda3,
        eta0,
        eta1,
        eta2,
        r,
        c1,
        ..
    } = *params;
    let omega_sq = omega * omega;
    let denom = r * r + omega_sq;

    let gamma_r = lambda3 * omega0_sq / (2.0 * denom) - 0.5 * eta0;
    let gamma_i = -r * lambda3 * omega0_sq / (2.0 * omega * denom);
    let p_r = 0.5 * c1 * infrared_coefficient(order)?;
    let q_r = 0.5 * eta2 + eta1 * lambda1 / omega0_sq;
    let q_i = (0.5 * eta2 - omega_sq * eta1 * eta1 / (2.0 * omega0_sq) - lambda1 * lambda1 / omega0_sq)
        / omega;
    Ok(CfglCoefficients {
        gamma_r,
        gamma_i,
        p_r,
        q_r,
        q_i,
    })
}

/// Carrier plus coefficients for a run: `Ω` from the dispersion relation at
/// `carrier_k`, unless `omega_override` supplies it directly.
pub fn coefficients_for(
    params: &LienardParameters,
    order: FractionalOrder,
    carrier_k: f64,
    omega_override: Option<f64>,
) -> Result<(CarrierWave, CfglCoefficients), ModelError> {
    params.validate()?;
    let omega = match omega_override {
        Some(w) => w,
        None => dispersion_omega(carrier_k, params, order)?,
    };
    let coeffs = derive_coefficients(params, omega, order)?;
    Ok((
        CarrierWave {
            k: carrier_k,
            omega,
            theta0: 0.0,
        },
        coeffs,
    ))
}

/// `sqrt((γ_r - P_r|k|^α) / Q_r)`.
pub fn plane_wave_amplitude(
    coeffs: &CfglCoefficients,
    k: f64,
    order: FractionalOrder,
) -> Result<f64, ModelError> {
    if coeffs.q_r == 0.0 {
        return Err(ModelError::DivisionByZero("Q_r"));
    }
    let radicand = coeffs.net_growth(k, order) / coeffs.q_r;
    if radicand < 0.0 || radicand.is_nan() {
        return Err(ModelError::NegativeRadicand { k, radicand });
    }
    Ok(radicand.sqrt())
}

/// `ω_α(k) = (Q_i γ_r - Q_r γ_i - Q_i P_r |k|^α) / Q_r`.
pub fn plane_wave_frequency(
    coeffs: &CfglCoefficients,
    k: f64,
    order: FractionalOrder,
) -> Result<f64, ModelError> {
    if coeffs.q_r == 0.0 {
        return Err(ModelError::DivisionByZero("Q_r"));
    }
    let CfglCoefficients {
        gamma_r,
        gamma_i,
        p_r,
        q_r,
        q_i,
    } = *coeffs;
    Ok((q_i * gamma_r - q_r * gamma_i - q_i * p_r * k.abs().powf(order.value())) / q_r)
}

/// `A exp(i(kx - ω_α(k) t + θ₀))`.
pub fn evaluate_plane_wave(
    coeffs: &CfglCoefficients,
    carrier: &CarrierWave,
    x: f64,
    t: f64,
    order: FractionalOrder,
) -> Result<Complex64, ModelError> {
    let amplitude = plane_wave_amplitude(coeffs, carrier.k, order)?;
    let omega = plane_wave_frequency(coeffs, carrier.k, order)?;
    let phase = carrier.k * x - omega * t + carrier.theta0;
    Ok(Complex64::from_polar(amplitude, phase))
}

/// Individual terms of `0 < g < γ_i/Q_i < 3g` with `g = γ_r - P_r|k|^α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub net_growth: f64,
    pub ratio: f64,
    pub growth_positive: bool,
    pub growth_below_ratio: bool,
    pub ratio_below_triple: bool,
}

impl StabilityReport {
    pub fn is_stable(&self) -> bool {
        self.growth_positive && self.growth_below_ratio && self.ratio_below_triple
    }
}

pub fn check_plane_wave_stability(
    coeffs: &CfglCoefficients,
    k: f64,
    order: FractionalOrder,
) -> Result<StabilityReport, ModelError> {
    if coeffs.q_i == 0.0 {
        return Err(ModelError::UndefinedForZeroQi("the stability condition"));
    }
    let g = coeffs.net_growth(k, order);
    let ratio = coeffs.gamma_i / coeffs.q_i;
    Ok(StabilityReport {
        net_growth: g,
        ratio,
        growth_positive: 0.0 < g,
        growth_below_ratio: g < ratio,
        ratio_below_triple: ratio < 3.0 * g,
    })
}

/// `μ = β + sqrt(2 + β²)` with `β = 3Q_r / (2Q_i)`.
pub fn solitary_mu(coeffs: &CfglCoefficients) -> Result<f64, ModelError> {
    if coeffs.q_i == 0.0 {
        return Err(ModelError::UndefinedForZeroQi("beta = 3Q_r/(2Q_i)"));
    }
    let beta = 1.5 * coeffs.q_r / coeffs.q_i;
    Ok(beta + (2.0 + beta * beta).sqrt())
}

/// Solitary-wave profile sampled at `xs`.
///
/// With `D = 2cosh(2kx) + cos(2μkx)`:
/// real part `B₀ e^{-kx}(1 + cos(2μkx)) / D`,
/// imaginary part `-B₀ e^{-kx} sin(2μkx) / D`.
pub fn solitary_initial_condition(
    xs: &[f64],
    b0: f64,
    k: f64,
    coeffs: &CfglCoefficients,
) -> Result<Vec<Complex64>, ModelError> {
    if xs.is_empty() {
        return Err(ModelError::InvalidParameter("empty grid".into()));
    }
    let mu = solitary_mu(coeffs)?;
    let values = xs
        .iter()
        .map(|&x| {
            let kx = k * x;
            let (s, c) = (2.0 * mu * kx).sin_cos();
            let denom = 2.0 * (2.0 * kx).cosh() + c;
            // 2cosh(2kx) >= 2 > |cos|
            debug_assert!(denom >= 1.0);
            let decay = (-kx).exp();
            if !decay.is_finite() || !denom.is_finite() {
                // Far left tail: e^{-kx}/cosh(2kx) -> 0.
                return Complex64::new(0.0, 0.0);
            }
            Complex64::new(b0 * decay * (1.0 + c) / denom, -b0 * decay * s / denom)
        })
        .collect();
    Ok(values)
}

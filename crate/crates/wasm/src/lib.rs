//! Browser bindings: dispersion curves, Riesz weight tables and an
//! interactive pulse simulation with the default Lienard parameters.

use wasm_bindgen::prelude::*;

use cfgl::fractional::{riesz_weights, FractionalOrder};
use cfgl::model::{coefficients_for, dispersion_omega, CfglCoefficients, LienardParameters};
use cfgl::solver::{
    factor_semi_implicit_system, solitary_field, step_semi_implicit, ComplexField, Grid,
    SystemFactorization,
};

fn model_order(alpha: f64) -> Result<FractionalOrder, JsError> {
    Ok(FractionalOrder::new(alpha)?.require_model_range()?)
}

/// `Ω(k)` at `points` evenly spaced `k ∈ [0, k_max]`; NaN past the cutoff.
#[wasm_bindgen(js_name = dispersionCurve)]
pub fn dispersion_curve(alpha: f64, k_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    let order = model_order(alpha)?;
    let params = LienardParameters::default();
    let n = points.max(2);
    Ok((0..n)
        .map(|i| {
            let k = k_max * i as f64 / (n - 1) as f64;
            dispersion_omega(k, &params, order).unwrap_or(f64::NAN)
        })
        .collect())
}

/// Two-sided weights `w_{-K..=K}`.
#[wasm_bindgen(js_name = rieszWeights)]
pub fn riesz_weight_table(alpha: f64, half_width: usize) -> Result<Vec<f64>, JsError> {
    let order = FractionalOrder::new(alpha)?;
    Ok(riesz_weights(order, half_width)?.two_sided())
}

const DOMAIN: f64 = 100.0;

/// Semi-implicit CFGL run on `(0, 100)` started from the solitary pulse.
#[wasm_bindgen]
pub struct PulseSim {
    grid: Grid,
    coeffs: CfglCoefficients,
    factorization: SystemFactorization,
    state: ComplexField,
    tau: f64,
    steps: usize,
}

#[wasm_bindgen]
impl PulseSim {
    #[wasm_bindgen(constructor)]
    pub fn new(
        alpha: f64,
        intervals: usize,
        tau: f64,
        carrier_k: f64,
        real_dissipation: bool,
    ) -> Result<PulseSim, JsError> {
        let order = model_order(alpha)?;
        let params = LienardParameters::default();
        let (carrier, mut coeffs) = coefficients_for(&params, order, carrier_k, None)?;
        if real_dissipation {
            coeffs = coeffs.with_real_dissipation();
        }
        let grid = Grid::new(DOMAIN, intervals)?;
        let operator = cfgl::solver::assemble_block_operator(&coeffs, order, &grid)?;
        let factorization = factor_semi_implicit_system(&operator, tau)?;
        let state = solitary_field(&grid, params.b0, carrier.k, &coeffs, 0.5 * DOMAIN)?;
        Ok(PulseSim {
            grid,
            coeffs,
            factorization,
            state,
            tau,
            steps: 0,
        })
    }

    /// Takes `steps` steps and returns the new time.
    pub fn advance(&mut self, steps: usize) -> Result<f64, JsError> {
        for _ in 0..steps {
            self.state = step_semi_implicit(&self.state, &self.factorization, &self.coeffs, self.tau)?;
            self.steps += 1;
        }
        Ok(self.time())
    }

    pub fn time(&self) -> f64 {
        self.steps as f64 * self.tau
    }

    /// `|B|²` on the interior nodes.
    pub fn profile(&self) -> Vec<f64> {
        self.state.modulus_sq()
    }

    pub fn nodes(&self) -> Vec<f64> {
        self.grid.interior_nodes()
    }

    #[wasm_bindgen(js_name = maxModulusSq)]
    pub fn max_modulus_sq(&self) -> f64 {
        self.state.max_modulus_sq()
    }

    pub fn localization(&self) -> f64 {
        self.state.localization_fraction(&self.grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_starts_at_omega0() {
        let c = dispersion_curve(1.8, 3.0, 31).unwrap();
        assert_eq!(c.len(), 31);
        assert_eq!(c[0], 0.032f64.sqrt());
        assert!(c.last().unwrap().is_nan());
    }

    #[test]
    fn weight_table_is_symmetric() {
        let w = riesz_weight_table(2.0, 3).unwrap();
        assert_eq!(w, vec![0.0, 0.0, -1.0, 2.0, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn pulse_advances() {
        let mut sim = PulseSim::new(1.8, 128, 1e-3, 0.5, false).unwrap();
        let before = sim.max_modulus_sq();
        let t = sim.advance(10).unwrap();
        assert!((t - 0.01).abs() < 1e-15);
        assert_eq!(sim.profile().len(), 127);
        assert_eq!(sim.nodes().len(), 127);
        assert!((sim.max_modulus_sq() / before - 1.0).abs() < 0.05);
        assert!(sim.localization() > 0.9);
    }
}

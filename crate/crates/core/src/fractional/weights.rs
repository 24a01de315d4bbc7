use super::special::{gamma_fn, sin_pi};
use super::{FractionalError, FractionalOrder};

/// Fractional centered-difference weights `w_k` for `|k| ≤ half_width`.
///
/// Only the non-negative half is stored; `w_{-k}` reads the same slot, so
/// even symmetry holds bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct RieszWeights {
    order: FractionalOrder,
    values: Vec<f64>,
}

impl RieszWeights {
    pub fn order(&self) -> FractionalOrder {
        self.order
    }

    pub fn alpha(&self) -> f64 {
        self.order.value()
    }

    pub fn half_width(&self) -> usize {
        self.values.len() - 1
    }

    /// `w_k` for `|k| ≤ half_width`.
    ///
    /// # Panics
    /// If `|k|` exceeds the table.
    #[inline]
    pub fn get(&self, k: isize) -> f64 {
        self.values[k.unsigned_abs()]
    }

    /// The stored half `w_0, w_1, ..., w_K`.
    pub fn one_sided(&self) -> &[f64] {
        &self.values
    }

    /// The full table `w_{-K}, ..., w_0, ..., w_K`.
    pub fn two_sided(&self) -> Vec<f64> {
        let k = self.half_width() as isize;
        (-k..=k).map(|i| self.get(i)).collect()
    }
}

/// Builds `w_k^α` for `|k| ≤ half_width`.
///
/// `w_0 = Γ(α+1) / Γ(α/2+1)²`, then `w_{k+1} = w_k (k - α/2) / (k + 1 + α/2)`.
/// No Gamma evaluation happens beyond `k = 0`.
pub fn riesz_weights(
    order: FractionalOrder,
    half_width: usize,
) -> Result<RieszWeights, FractionalError> {
    let alpha = order.value();
    let half = 0.5 * alpha;
    let g = gamma_fn(half + 1.0)?;
    let w0 = gamma_fn(alpha + 1.0)? / (g * g);

    let mut values = Vec::with_capacity(half_width + 1);
    values.push(w0);
    let mut w = w0;
    for k in 0..half_width {
        let kf = k as f64;
        w *= (kf - half) / (kf + 1.0 + half);
        values.push(w);
    }
    Ok(RieszWeights { order, values })
}

/// `w_k^α = (-1)^k Γ(α+1) / (Γ(α/2 - k + 1) Γ(α/2 + k + 1))` evaluated
/// directly. Where `α/2 - k + 1` hits a pole of Γ the weight is exactly zero.
pub fn closed_form_weight(order: FractionalOrder, k: i64) -> Result<f64, FractionalError> {
    let alpha = order.value();
    let k = k.abs();
    let left_arg = 0.5 * alpha - k as f64 + 1.0;
    if left_arg <= 0.0 && left_arg == left_arg.floor() {
        return Ok(0.0);
    }
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let numerator = gamma_fn(alpha + 1.0)?;
    let right = gamma_fn(0.5 * alpha + k as f64 + 1.0)?;
    let left = gamma_fn(left_arg)?;
    Ok(sign * numerator / (left * right))
}

/// Fourier symbol of the weight sequence, `Σ_k w_k e^{ikθ} = |2 sin(θ/2)|^α`.
///
/// On a grid of spacing `h`, `riesz_symbol(α, ξh) / h^α` approximates `|ξ|^α`
/// to second order.
pub fn riesz_symbol(order: FractionalOrder, theta: f64) -> f64 {
    (2.0 * sin_pi(theta / (2.0 * std::f64::consts::PI))).abs().powf(order.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn order(alpha: f64) -> FractionalOrder {
        FractionalOrder::new(alpha).unwrap()
    }

    #[test]
    fn laplacian_limit() {
        let w = riesz_weights(order(2.0), 3).unwrap();
        assert_eq!(w.one_sided(), &[2.0, -1.0, 0.0, 0.0]);
        assert_eq!(w.two_sided(), vec![0.0, 0.0, -1.0, 2.0, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn central_weight_closed_form() {
        // Γ(2.8) / Γ(1.9)^2 with Γ(2.8) = 1.6764907877644366, Γ(1.9) = 0.9617658319073874.
        let w = riesz_weights(order(1.8), 0).unwrap();
        let expected = 1.676_490_787_764_436_6 / (0.961_765_831_907_387_4_f64).powi(2);
        assert_relative_eq!(w.get(0), expected, max_relative = 1e-13);
        assert_relative_eq!(expected, 1.8124, max_relative = 1e-4);
    }

    #[test]
    fn symmetry_and_signs() {
        let w = riesz_weights(order(1.5), 40).unwrap();
        for k in 1..=40 {
            assert_eq!(w.get(k), w.get(-k));
            assert!(w.get(k) <= 0.0);
        }
        assert!(w.get(0) > 0.0);
    }

    #[test]
    fn recurrence_matches_direct_gamma() {
        for alpha in [0.5, 1.2, 1.8, 2.0] {
            let w = riesz_weights(order(alpha), 64).unwrap();
            for k in 0..=64 {
                let direct = closed_form_weight(order(alpha), k).unwrap();
                if direct == 0.0 {
                    assert_eq!(w.get(k as isize), 0.0);
                } else {
                    let rel = (w.get(k as isize) - direct).abs() / direct.abs();
                    assert!(rel <= 1e-10, "alpha={alpha} k={k} rel={rel}");
                }
            }
        }
    }

    #[test]
    fn weights_sum_to_symbol_at_zero() {
        // Σ w_k = |2 sin 0|^α = 0; tail decays like k^{-1-α}.
        let w = riesz_weights(order(1.8), 200_000).unwrap();
        let total: f64 = w.get(0) + 2.0 * w.one_sided()[1..].iter().sum::<f64>();
        assert!(total.abs() < 1e-8, "sum = {total}");
    }

    #[test]
    fn symbol_matches_weight_series() {
        let alpha = order(1.5);
        let w = riesz_weights(alpha, 100_000).unwrap();
        for theta in [0.3, 1.0, 2.5, std::f64::consts::PI] {
            let series: f64 = w.get(0)
                + 2.0
                    * w.one_sided()[1..]
                        .iter()
                        .enumerate()
                        .map(|(i, wk)| wk * ((i + 1) as f64 * theta).cos())
                        .sum::<f64>();
            assert_relative_eq!(series, riesz_symbol(alpha, theta), max_relative = 1e-6);
        }
    }
}

//! Long-range lattice sums: the small-wavenumber coefficient of the
//! power-law kernel and its value at zero wavenumber.

use super::special::{cos_pi, gamma_fn};
use super::{FractionalError, FractionalOrder};

/// `a_α = 2 Γ(-α) cos(πα/2)`, the coefficient in
/// `J(0) - J(k) ≈ a_α |k|^α` for `0 < α < 2`, `α ≠ 1`.
pub fn infrared_coefficient(order: FractionalOrder) -> Result<f64, FractionalError> {
    let alpha = order.require_model_range()?.value();
    Ok(2.0 * gamma_fn(-alpha)? * cos_pi(0.5 * alpha))
}

// Bernoulli numbers B_2, B_4, ..., B_10 divided by (2j)!.
const EM_COEFFS: [f64; 5] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
];

const ZETA_TOL: f64 = 1e-12;

/// `2 ζ(α + 1) = 2 Σ_{n≥1} n^{-(α+1)}`, the kernel sum at zero wavenumber.
///
/// The series is summed directly up to `N - 1`; the tail from `N` on is the
/// integral `N^{-α}/α` plus Euler-Maclaurin end corrections. `N` doubles
/// until the first omitted correction falls below 1e-12, which keeps the
/// absolute error well under 1e-10 even for small `α` where the bare
/// integral bound would need an astronomically long series.
pub fn zeta_sum(alpha: f64) -> Result<f64, FractionalError> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(FractionalError::InvalidArgument(format!(
            "zeta_sum needs alpha > 0, got {alpha}"
        )));
    }
    let s = alpha + 1.0;

    let omitted = |n: f64| {
        // |B_12 / 12!| s(s+1)...(s+10) n^{-s-11}
        let rising: f64 = (0..11).map(|j| s + j as f64).product();
        (691.0 / 2730.0) / 479_001_600.0 * rising * n.powf(-s - 11.0)
    };
    let mut n_cut = 16usize;
    while omitted(n_cut as f64) > ZETA_TOL {
        n_cut *= 2;
    }

    // Sum smallest terms first.
    let head: f64 = (1..n_cut).rev().map(|n| (n as f64).powf(-s)).sum();

    let n = n_cut as f64;
    let mut tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    let mut rising = s;
    let mut power = n.powf(-s - 1.0);
    for (j, c) in EM_COEFFS.iter().enumerate() {
        tail += c * rising * power;
        let m = 2 * j + 1;
        rising *= (s + m as f64) * (s + (m + 1) as f64);
        power /= n * n;
    }
    Ok(2.0 * (head + tail))
}

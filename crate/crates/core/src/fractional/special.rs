//! Gamma function and trigonometric helpers with exact argument reduction.

use std::f64::consts::PI;

use super::FractionalError;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `sin(pi * x)`, reducing `x` modulo 2 before the multiplication so that
/// large arguments and exact integers do not pick up rounding from `pi * x`.
pub fn sin_pi(x: f64) -> f64 {
    let r = x % 2.0;
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    (PI * r).sin()
}

/// `cos(pi * x)` with the same reduction as [`sin_pi`].
pub fn cos_pi(x: f64) -> f64 {
    let r = (x % 2.0).abs();
    if r == 0.5 || r == 1.5 {
        return 0.0;
    }
    (PI * r).cos()
}

fn lanczos(x: f64) -> f64 {
    // Valid for x >= 0.5.
    let x = x - 1.0;
    let mut sum = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    // Split the power so t^(x+0.5) does not overflow before e^{-t} is applied.
    let half = t.powf(0.5 * (x + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * sum
}

/// The Gamma function on the real line.
///
/// Positive arguments use a Lanczos approximation (g = 7, nine terms);
/// arguments below one half go through the reflection formula
/// `Γ(x) Γ(1 - x) = π / sin(πx)`.
pub fn gamma_fn(x: f64) -> Result<f64, FractionalError> {
    if !x.is_finite() {
        return Err(FractionalError::InvalidArgument(format!(
            "gamma argument must be finite, got {x}"
        )));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(FractionalError::Pole { x });
    }
    if x == x.floor() && x <= 171.0 {
        // Exact factorial on the positive integers.
        return Ok((1..x as u32).map(f64::from).product());
    }
    let value = if x < 0.5 {
        let s = sin_pi(x);
        let g = lanczos(1.0 - x);
        if g.is_infinite() {
            // Γ(x) underflows towards zero for very negative x.
            0.0
        } else {
            PI / (s * g)
        }
    } else {
        lanczos(x)
    };
    if !value.is_finite() {
        return Err(FractionalError::Overflow { x });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_known_values() {
        assert_relative_eq!(gamma_fn(1.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(gamma_fn(0.5).unwrap(), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma_fn(5.0).unwrap(), 24.0, max_relative = 1e-14);
        assert_relative_eq!(
            gamma_fn(-0.5).unwrap(),
            -2.0 * PI.sqrt(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn gamma_negative_via_recurrence() {
        // Γ(0.2) to 16 digits, then Γ(-1.8) = Γ(0.2) / ((-1.8)(-0.8)).
        let gamma_02 = 4.590_843_711_998_803;
        let expected = gamma_02 / ((-1.8) * (-0.8));
        assert_relative_eq!(gamma_fn(-1.8).unwrap(), expected, max_relative = 1e-13);
        assert_relative_eq!(expected, 3.188_085_911_110_280_5, max_relative = 1e-14);
    }

    #[test]
    fn gamma_matches_factorials_up_to_thirty() {
        let mut fact = 1.0_f64;
        for n in 1..=30 {
            assert_relative_eq!(gamma_fn(n as f64).unwrap(), fact, max_relative = 1e-13);
            fact *= n as f64;
        }
    }

    #[test]
    fn gamma_poles_and_overflow() {
        for x in [0.0, -1.0, -2.0, -17.0] {
            assert!(matches!(gamma_fn(x), Err(FractionalError::Pole { .. })));
        }
        assert!(matches!(gamma_fn(200.0), Err(FractionalError::Overflow { .. })));
        assert!(gamma_fn(f64::NAN).is_err());
    }

    #[test]
    fn trig_reduction_is_exact_on_lattice_points() {
        assert_eq!(sin_pi(62.0), 0.0);
        assert_eq!(sin_pi(-3.0), 0.0);
        assert_eq!(cos_pi(0.5), 0.0);
        assert_eq!(cos_pi(-7.5), 0.0);
        assert_relative_eq!(cos_pi(0.9), (0.9 * PI).cos(), max_relative = 1e-15);
    }
}

//! Gaussian tail function and its scaled form.

#![allow(clippy::excessive_precision)]

use libm::erfc;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_286_948_079_451_560_772_586;

/// Scaled complementary error function `exp(x²)·erfc(x)`.
///
/// Finite for all `x ≥ −26`; for large positive `x` it decays like
/// `1/(x√π)` instead of underflowing.
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    if x < 5.0 {
        return (x * x).exp() * erfc(x);
    }
    if x.is_infinite() {
        return 0.0;
    }
    // Laplace continued fraction x + (1/2)/(x + 1/(x + (3/2)/(x + ...))), modified Lentz.
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for j in 1..500 {
        let a = 0.5 * j as f64;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        d = 1.0 / d;
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    FRAC_1_SQRT_PI / f
}

/// Standard normal tail probability `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// `exp(x²/2)·Q(x)`, bounded for large positive `x` where `exp(x²/2)` alone overflows.
pub fn q_scaled(x: f64) -> f64 {
    0.5 * erfcx(x * FRAC_1_SQRT_2)
}

/// Large-argument approximation `exp(−x²/2) / (√(2π)·√(1+x²))` of [`q_function`].
///
/// Meant for `x ≥ 0` and only accurate for large `x`: at 0 it gives
/// `1/√(2π) ≈ 0.399` instead of 0.5, at 3 it is 3.8 % high.
pub fn q_approx(x: f64) -> f64 {
    (-0.5 * x * x).exp() / ((2.0 * PI).sqrt() * (1.0 + x * x).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_reference_values() {
        assert_eq!(q_function(0.0), 0.5);
        // Φ(−3) from standard normal tables
        assert!((q_function(3.0) - 1.349_898_031_630_094_6e-3).abs() < 1e-17);
        assert!((q_function(-40.0) - 1.0).abs() < 1e-15);
        assert!((q_function(1.0) + q_function(-1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn q_approx_values() {
        assert!((q_approx(0.0) - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        let a3 = q_approx(3.0);
        assert!((a3 - 1.4016e-3).abs() < 2e-7, "{a3}");
        let rel3 = (a3 - q_function(3.0)) / q_function(3.0);
        assert!((rel3 - 0.038).abs() < 0.001, "{rel3}");
        let a5 = q_approx(5.0);
        assert!((a5 - 2.916e-7).abs() < 1e-10, "{a5}");
        assert!(((a5 - q_function(5.0)) / q_function(5.0)).abs() < 0.02);
    }

    #[test]
    fn erfcx_branches_agree() {
        // Both branches near the switch point against the unscaled product.
        for x in [4.0f64, 4.9, 5.0, 5.1, 6.0, 10.0, 20.0] {
            let direct = (x * x).exp() * erfc(x);
            assert!((erfcx(x) - direct).abs() / direct < 1e-13, "x={x}");
        }
        // reference values of exp(x²)erfc(x)
        assert!((erfcx(5.0) - 0.110_704_637_733_068_61).abs() < 1e-16);
        assert!((erfcx(26.0) - 0.021_683_584_850_562_91).abs() < 1e-16);
        assert!((erfcx(0.0) - 1.0).abs() < 1e-15);
        // asymptote 1/(x√π) (1 − 1/(2x²) + 3/(4x⁴))
        let x = 1e4;
        let asym = FRAC_1_SQRT_PI / x * (1.0 - 0.5 / (x * x));
        assert!((erfcx(x) - asym).abs() / asym < 1e-14);
        let x: f64 = -1.5;
        let direct = (x * x).exp() * erfc(x);
        assert!((erfcx(x) - direct).abs() / direct < 1e-14);
    }

    #[test]
    fn scaled_q_is_finite_and_consistent() {
        for &x in &[0.0, 0.5, 3.0, 8.0, 30.0] {
            let lhs = q_scaled(x) * (-0.5 * x * x).exp();
            assert!((lhs - q_function(x)).abs() <= 1e-12 * q_function(x));
        }
        for &x in &[100.0, 1e3, 1e4, 1e6] {
            let v = q_scaled(x);
            assert!(v.is_finite() && v > 0.0);
            assert!((v * x * (2.0 * PI).sqrt() - 1.0).abs() < 1e-3);
        }
    }
}

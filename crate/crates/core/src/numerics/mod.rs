//! Special functions and adaptive quadrature with explicit error control.

mod quadrature;
mod special;

pub use quadrature::{
    integrate_adaptive, integrate_with_breaks, log_integrate_exp, QuadResult, Tolerance,
};
pub use special::{lobachevsky, log_sphere_volume, sphere_volume};

/// `log sinh t` for `t ≥ 0`, accurate for arguments where `sinh` overflows.
pub fn ln_sinh(t: f64) -> f64 {
    if t > 20.0 {
        t - std::f64::consts::LN_2 + (-(-2.0 * t).exp()).ln_1p()
    } else {
        t.sinh().ln()
    }
}

/// `log(e^x - 1)` for `x > 0`.
pub fn ln_expm1(x: f64) -> f64 {
    if x > 30.0 {
        x + (-(-x).exp()).ln_1p()
    } else {
        x.exp_m1().ln()
    }
}

/// `log(1 - e^x)` for `x < 0`.
pub fn ln_one_minus_exp(x: f64) -> f64 {
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_helpers() {
        assert_relative_eq!(ln_sinh(1.0), 1f64.sinh().ln(), max_relative = 1e-15);
        assert_relative_eq!(ln_sinh(25.0), 25f64.sinh().ln(), max_relative = 1e-15);
        assert_relative_eq!(
            ln_sinh(1e4),
            1e4 - std::f64::consts::LN_2,
            max_relative = 1e-15
        );
        assert_eq!(ln_sinh(0.0), f64::NEG_INFINITY);
        assert_relative_eq!(
            ln_expm1(1e-8),
            (1e-8f64).exp_m1().ln(),
            max_relative = 1e-15
        );
        assert_relative_eq!(ln_expm1(100.0), 100.0, max_relative = 1e-15);
        assert_relative_eq!(ln_one_minus_exp(-1e-9), (1e-9f64).ln(), max_relative = 1e-8);
        assert_relative_eq!(
            ln_one_minus_exp(-3.0),
            (1.0 - (-3f64).exp()).ln(),
            max_relative = 1e-14
        );
    }
}

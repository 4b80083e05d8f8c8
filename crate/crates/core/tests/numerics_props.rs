//! Quadrature and special-function laws.

use std::f64::consts::PI;

use macroball::numerics::{
    integrate_adaptive, lobachevsky, log_integrate_exp, sphere_volume, Tolerance,
};
use proptest::prelude::*;

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

fn antiderivative(c: &[f64], x: f64) -> f64 {
    c.iter()
        .enumerate()
        .map(|(i, &k)| k * x.powi(i as i32 + 1) / (i as f64 + 1.0))
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn polynomials_up_to_degree_five_are_exact(
        c in prop::collection::vec(-10.0f64..10.0, 1..=6),
        a in -5.0f64..5.0,
        width in 0.1f64..10.0,
    ) {
        let b = a + width;
        let q = integrate_adaptive(|x| poly(&c, x), a, b, &Tolerance::default()).unwrap();
        let exact = antiderivative(&c, b) - antiderivative(&c, a);
        let scale = c.iter().map(|k| k.abs()).sum::<f64>() * width * (a.abs() + width + 1.0).powi(c.len() as i32);
        prop_assert!((q.value - exact).abs() <= 1e-12 * exact.abs().max(1e-3 * scale),
            "{} vs {exact}", q.value);
        prop_assert!(q.abs_error_estimate >= 0.0);
        prop_assert!(q.evaluations >= 1);
    }

    #[test]
    fn log_space_integral_matches_direct(
        amp in 0.0f64..5.0,
        freq in 0.1f64..6.0,
        slope in -8.0f64..8.0,
        shift in 0.0f64..90.0,
        b in 0.5f64..5.0,
    ) {
        let g = |x: f64| shift + slope * x + amp * (freq * x).sin();
        let tol = Tolerance::default();
        let direct = integrate_adaptive(|x| g(x).exp(), 0.0, b, &tol).unwrap().value;
        let logged = log_integrate_exp(g, 0.0, b, &tol).unwrap().value;
        prop_assert!((logged - direct.ln()).abs() <= 1e-10 * direct.ln().abs().max(1.0),
            "{logged} vs {}", direct.ln());
    }

    #[test]
    fn lobachevsky_is_odd_and_pi_periodic(theta in -3.0f64..3.0) {
        let v = lobachevsky(theta);
        prop_assert!((lobachevsky(-theta) + v).abs() <= 1e-12);
        prop_assert!((lobachevsky(theta + PI) - v).abs() <= 1e-11);
    }
}

#[test]
fn sphere_volume_recurrence() {
    for k in 2..40 {
        let lhs = sphere_volume(k);
        let rhs = 2.0 * PI / (k as f64 - 1.0) * sphere_volume(k - 2);
        assert!((lhs / rhs - 1.0).abs() <= 1e-12, "k = {k}");
    }
}

#[test]
fn lobachevsky_duplication() {
    // Λ(2θ) = 2Λ(θ) + 2Λ(θ + π/2)
    for &t in &[0.1, 0.3, 0.7, 1.2] {
        let lhs = lobachevsky(2.0 * t);
        let rhs = 2.0 * lobachevsky(t) + 2.0 * lobachevsky(t + PI / 2.0);
        assert!((lhs - rhs).abs() <= 1e-12, "θ = {t}");
    }
}

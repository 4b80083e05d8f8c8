//! Closed-form oracles for the acceptance suite, written without any of the
//! library's quadrature or search code.

use std::f64::consts::PI;

/// `∫_0^R sinh^k t dt · e^{-kR}`, by the reduction
/// `J_k = sinh^{k-1}R cosh R / k − (k−1)/k · J_{k−2}`.
pub fn scaled_sinh_power_integral(k: usize, r: f64) -> f64 {
    match k {
        0 => r,
        1 => 0.5 * (1.0 - (-r).exp()).powi(2),
        _ => {
            let kf = k as f64;
            let sinh_scaled = -0.5 * (-2.0 * r).exp_m1();
            let cosh_scaled = 0.5 * (1.0 + (-2.0 * r).exp());
            sinh_scaled.powi(k as i32 - 1) * cosh_scaled / kf
                - (kf - 1.0) / kf * scaled_sinh_power_integral(k - 2, r) * (-2.0 * r).exp()
        }
    }
}

/// Volume of the unit `k`-sphere, by the half-integer Gamma recursion.
pub fn sphere_area(k: usize) -> f64 {
    // S_0 = 2, S_1 = 2π, S_k = 2π S_{k−2}/(k−1)
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI * sphere_area(k - 2) / (k as f64 - 1.0),
    }
}

/// `log V_hyp(n, R)`.
pub fn log_ball_volume(n: usize, r: f64) -> f64 {
    let m = n - 1;
    sphere_area(m).ln() + m as f64 * r + scaled_sinh_power_integral(m, r).ln()
}

pub fn ball_volume(n: usize, r: f64) -> f64 {
    log_ball_volume(n, r).exp()
}

/// `f(R) = (4/R) log(2 V(R)/V(R/2))`.
pub fn f(n: usize, r: f64) -> f64 {
    4.0 / r * (std::f64::consts::LN_2 + log_ball_volume(n, r) - log_ball_volume(n, 0.5 * r))
}

/// `g(R) = V(R)/V(R/2) · e^{−(n−1)R/2}`.
pub fn g(n: usize, r: f64) -> f64 {
    (log_ball_volume(n, r) - log_ball_volume(n, 0.5 * r) - (n as f64 - 1.0) * 0.5 * r).exp()
}

/// `2/((n−1)R) · log(V(R)/c‴)`.
pub fn lambda_integrand(n: usize, c3: f64, r: f64) -> f64 {
    2.0 / ((n as f64 - 1.0) * r) * (log_ball_volume(n, r) - c3.ln())
}

/// `I(λ, R) = ∫_B e^{λ(R − d)}` by composite Simpson on `panels` panels.
pub fn kernel_integral(n: usize, lambda: f64, r: f64, panels: usize) -> f64 {
    let panels = panels + panels % 2;
    let h = r / panels as f64;
    let w = |t: f64| (lambda * (r - t)).exp() * t.sinh().powi(n as i32 - 1);
    let mut sum = w(0.0) + w(r);
    for i in 1..panels {
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * w(i as f64 * h);
    }
    sphere_area(n - 1) * sum * h / 3.0
}

/// `I(λ, R)` for `n = 2` in closed form.
pub fn kernel_integral_2d(lambda: f64, r: f64) -> f64 {
    let first = if (lambda - 1.0).abs() < 1e-12 {
        r
    } else {
        ((1.0 - lambda) * r).exp_m1() / (1.0 - lambda)
    };
    let second = -(-(1.0 + lambda) * r).exp_m1() / (1.0 + lambda);
    PI * (lambda * r).exp() * (first - second)
}

/// Limit of `TV(h)/h` as `h → 0`: the derivative bound times the mean of
/// `|cos θ|` over the unit sphere (`2/π` for n = 2, `1/2` for n = 3).
pub fn fd_rate_limit(n: usize, deriv_bound: f64) -> f64 {
    match n {
        2 => 2.0 / PI * deriv_bound,
        3 => 0.5 * deriv_bound,
        _ => panic!("only n = 2, 3"),
    }
}

/// Extremum on a uniform grid of spacing `step` over `[a, b]`, endpoint
/// included.
pub fn scan(f: impl Fn(f64) -> f64, a: f64, b: f64, step: f64, sup: bool) -> f64 {
    let count = ((b - a) / step).floor() as usize;
    let init = if sup {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    };
    (0..=count)
        .map(|i| a + i as f64 * step)
        .chain(std::iter::once(b))
        .map(f)
        .fold(init, |acc, y| if sup { acc.max(y) } else { acc.min(y) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        for &r in &[0.1f64, 1.0, 3.0, 10.0] {
            let v2 = 2.0 * PI * (r.cosh() - 1.0);
            let v3 = PI * ((2.0 * r).sinh() - 2.0 * r);
            assert!((ball_volume(2, r) / v2 - 1.0).abs() < 1e-13);
            assert!((ball_volume(3, r) / v3 - 1.0).abs() < 1e-12);
        }
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn simpson_matches_closed_form() {
        let exact = kernel_integral_2d(3.0, 2.0);
        assert!((kernel_integral(2, 3.0, 2.0, 4000) / exact - 1.0).abs() < 1e-12);
        assert!((kernel_integral_2d(1.0, 1.0) - kernel_integral(2, 1.0, 1.0, 4000)).abs() < 1e-10);
    }
}

use std::f64::consts::{FRAC_PI_2, PI};

use statrs::function::gamma::{gamma, ln_gamma};

use super::quadrature::{integrate_adaptive, Tolerance};

/// Volume of the unit sphere `S^k ⊂ R^{k+1}`: `2 π^{(k+1)/2} / Γ((k+1)/2)`.
pub fn sphere_volume(k: usize) -> f64 {
    let s = (k as f64 + 1.0) / 2.0;
    if s < 85.0 {
        2.0 * PI.powf(s) / gamma(s)
    } else {
        log_sphere_volume(k).exp()
    }
}

/// `log Vol(S^k)`; finite for every `k`.
pub fn log_sphere_volume(k: usize) -> f64 {
    let s = (k as f64 + 1.0) / 2.0;
    2f64.ln() + s * PI.ln() - ln_gamma(s)
}

/// `ζ(2k)` for `k ≥ 1`: partial sum plus an Euler–Maclaurin tail.
fn zeta_even(k: u32) -> f64 {
    if k == 1 {
        return PI * PI / 6.0;
    }
    const N: i32 = 20;
    let s = 2.0 * k as f64;
    let head: f64 = (1..N).rev().map(|j| (j as f64).powf(-s)).sum();
    let n = N as f64;
    head + n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s) + s * n.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * n.powf(-s - 3.0) / 720.0
        + s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * n.powf(-s - 5.0) / 30240.0
}

// Below this the power series is summed directly; above it the remainder
// up to the argument is integrated.
const SERIES_CUTOFF: f64 = 0.25;

/// `Λ(θ) = θ - θ log 2θ + Σ_{k≥1} ζ(2k) θ^{2k+1} / (k (2k+1) π^{2k})`, `0 < θ < π`.
fn lobachevsky_series(theta: f64) -> f64 {
    let mut sum = theta - theta * (2.0 * theta).ln();
    let x2 = (theta / PI).powi(2);
    let mut power = theta * x2;
    for k in 1..60u32 {
        let kf = k as f64;
        let term = zeta_even(k) * power / (kf * (2.0 * kf + 1.0));
        sum += term;
        if term.abs() < 1e-17 {
            break;
        }
        power *= x2;
    }
    sum
}

/// Lobachevsky function `Λ(θ) = -∫_0^θ log|2 sin t| dt`.
///
/// Odd and π-periodic. Near the logarithmic singularity at 0 the value comes
/// from the power series; the remaining stretch up to `θ` is integrated.
pub fn lobachevsky(theta: f64) -> f64 {
    if !theta.is_finite() {
        return f64::NAN;
    }
    let r = theta.rem_euclid(PI);
    if r == 0.0 {
        return 0.0;
    }
    if r > FRAC_PI_2 {
        -lobachevsky_reduced(PI - r)
    } else {
        lobachevsky_reduced(r)
    }
}

// 0 < x ≤ π/2
fn lobachevsky_reduced(x: f64) -> f64 {
    if x <= SERIES_CUTOFF {
        return lobachevsky_series(x);
    }
    let tol = Tolerance {
        rel: 1e-13,
        abs: 1e-14,
        max_depth: 40,
    };
    let tail = integrate_adaptive(|t| (2.0 * t.sin()).ln(), SERIES_CUTOFF, x, &tol)
        .expect("log(2 sin t) is smooth and finite on [1/4, π/2]");
    lobachevsky_series(SERIES_CUTOFF) - tail.value
}

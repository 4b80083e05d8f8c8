//! The truncated exponential smoothing kernel on `ℍⁿ`,
//!
//! ```text
//! S_{λ,R}(y) = (e^{-λ d(y, ·)} - e^{-λR}) 1_{B(y,R)} dvol,
//! ```
//!
//! its mass, the weighted ball integral `I(λ, R) = ∫_{B(y,R)} e^{-λ(d - R)}`,
//! and the bound `λ I / (I - V(R))` on the norm of its derivative in `y`.
//!
//! Everything is computed from logarithms: `I` and `V` agree to many digits
//! when `λR` is small, and both overflow when it is large.

mod tv;

pub use tv::{
    fd_derivative_check, fd_derivative_check_with, tv_distance, tv_distance_at, tv_distance_with,
    FdCheck,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypgeom::{log_v_hyp_with, log_v_ratio_halved_with, Dim};
use crate::numerics::{ln_expm1, ln_sinh, log_integrate_exp, log_sphere_volume, Tolerance};

/// The triple `(n, λ, R)` fixing a kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelParams {
    pub dim: Dim,
    pub lambda: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

impl KernelParams {
    pub fn new(dim: Dim, lambda: f64, r: f64) -> Result<KernelParams> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "λ must be positive, got {lambda}"
            )));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "R must be positive, got {r}"
            )));
        }
        Ok(KernelParams { dim, lambda, r })
    }

    fn lambda_r(&self) -> f64 {
        self.lambda * self.r
    }
}

/// `log I(λ, R)` with `I = Vol(S^{n-1}) ∫_0^R e^{-λ(t-R)} sinh^{n-1} t dt`.
pub fn log_kernel_i(p: &KernelParams) -> Result<f64> {
    log_kernel_i_with(p, &Tolerance::default())
}

pub fn log_kernel_i_with(p: &KernelParams, tol: &Tolerance) -> Result<f64> {
    let m = p.dim.m();
    let lambda = p.lambda;
    let q = log_integrate_exp(|t| -lambda * t + m * ln_sinh(t), 0.0, p.r, tol)?;
    Ok(p.lambda_r() + log_sphere_volume(p.dim.get() - 1) + q.value)
}

pub fn kernel_i(p: &KernelParams) -> Result<f64> {
    kernel_i_with(p, &Tolerance::default())
}

pub fn kernel_i_with(p: &KernelParams, tol: &Tolerance) -> Result<f64> {
    let log_i = log_kernel_i_with(p, tol)?;
    if log_i >= f64::MAX.ln() {
        return Err(Error::Overflow {
            quantity: "I(λ,R)",
            log_value: log_i,
        });
    }
    Ok(log_i.exp())
}

/// `log(I - V(R))`, integrated directly as
/// `Vol(S^{n-1}) ∫_0^R (e^{λ(R-t)} - 1) sinh^{n-1} t dt` so that no
/// cancellation occurs.
pub fn log_kernel_excess(p: &KernelParams) -> Result<f64> {
    log_kernel_excess_with(p, &Tolerance::default())
}

pub fn log_kernel_excess_with(p: &KernelParams, tol: &Tolerance) -> Result<f64> {
    let m = p.dim.m();
    let (lambda, r) = (p.lambda, p.r);
    let q = log_integrate_exp(
        |t| {
            let x = lambda * (r - t);
            if x > 0.0 {
                ln_expm1(x) + m * ln_sinh(t)
            } else {
                f64::NEG_INFINITY
            }
        },
        0.0,
        r,
        tol,
    )?;
    let value = log_sphere_volume(p.dim.get() - 1) + q.value;
    if !value.is_finite() {
        return Err(Error::DegenerateKernel(format!(
            "I - V underflows at λR = {:e}",
            p.lambda_r()
        )));
    }
    Ok(value)
}

/// `log` of the kernel mass `e^{-λR}(I - V(R))`.
pub fn log_kernel_mass(p: &KernelParams) -> Result<f64> {
    log_kernel_mass_with(p, &Tolerance::default())
}

pub fn log_kernel_mass_with(p: &KernelParams, tol: &Tolerance) -> Result<f64> {
    Ok(log_kernel_excess_with(p, tol)? - p.lambda_r())
}

/// Total mass `∫_{B(y,R)} (e^{-λd} - e^{-λR})`.
pub fn kernel_mass(p: &KernelParams) -> Result<f64> {
    kernel_mass_with(p, &Tolerance::default())
}

pub fn kernel_mass_with(p: &KernelParams, tol: &Tolerance) -> Result<f64> {
    let mass = log_kernel_mass_with(p, tol)?.exp();
    if !(mass > 0.0) {
        return Err(Error::DegenerateKernel(format!(
            "kernel mass underflows at λ = {}, R = {}",
            p.lambda, p.r
        )));
    }
    Ok(mass)
}

/// `λ · I / (I - V(R))`.
pub fn deriv_bound(p: &KernelParams) -> Result<f64> {
    deriv_bound_with(p, &Tolerance::default())
}

pub fn deriv_bound_with(p: &KernelParams, tol: &Tolerance) -> Result<f64> {
    let log_i = log_kernel_i_with(p, tol)?;
    let log_excess = log_kernel_excess_with(p, tol)?;
    Ok(p.lambda * (log_i - log_excess).exp())
}

/// Smallest `λ` with `e^{λR/2} ≥ 2 V(R) / V(R/2)`:
/// `(2/R)(log 2 + log V(R) - log V(R/2))`.
pub fn lambda_min(dim: Dim, r: f64) -> Result<f64> {
    lambda_min_with(dim, r, &Tolerance::default())
}

pub fn lambda_min_with(dim: Dim, r: f64, tol: &Tolerance) -> Result<f64> {
    Ok(2.0 / r * (std::f64::consts::LN_2 + log_v_ratio_halved_with(dim, r, tol)?))
}

/// `f(R) = (4/R) log(2 V(R) / V(R/2)) = 2 λ_min(R)`.
pub fn f_of_r(dim: Dim, r: f64) -> Result<f64> {
    f_of_r_with(dim, r, &Tolerance::default())
}

pub fn f_of_r_with(dim: Dim, r: f64, tol: &Tolerance) -> Result<f64> {
    Ok(2.0 * lambda_min_with(dim, r, tol)?)
}

/// Relative slack granted to the `2λ` comparison.
pub const TWO_LAMBDA_SLACK: f64 = 1e-9;

/// Direction of a recorded inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainInequality {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub orientation: Orientation,
    pub holds: bool,
}

impl ChainInequality {
    fn new(name: &'static str, lhs: f64, orientation: Orientation, rhs: f64) -> ChainInequality {
        let holds = match orientation {
            Orientation::Ge => lhs >= rhs,
            Orientation::Le => lhs <= rhs,
            Orientation::Gt => lhs > rhs,
        };
        ChainInequality {
            name,
            lhs,
            rhs,
            orientation,
            holds,
        }
    }

    /// Signed distance to failure: positive when the inequality holds.
    pub fn margin(&self) -> f64 {
        match self.orientation {
            Orientation::Ge | Orientation::Gt => self.lhs - self.rhs,
            Orientation::Le => self.rhs - self.lhs,
        }
    }
}

/// Every quantity and inequality of the derivative-bound chain at one
/// parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub params: KernelParams,
    pub log_i: f64,
    pub ball_vol: f64,
    pub log_ball_vol: f64,
    pub mass: f64,
    pub deriv_bound: f64,
    pub lambda_min: f64,
    /// `None` when `λ < λ_min` and the `2λ` bound is not claimed.
    pub two_lambda_ok: Option<bool>,
    pub chain_inequalities: Vec<ChainInequality>,
}

impl ChainReport {
    pub fn all_hold(&self) -> bool {
        self.chain_inequalities.iter().all(|c| c.holds)
    }
}

/// Evaluates the chain
///
/// 1. `I ≥ e^{λR/2} V(R/2)` (compared as logarithms),
/// 2. `e^{λR/2} V(R/2) > V(R)` and, when it holds,
///    `λ I/(I - V) ≤ λ X/(X - V)` with `X = e^{λR/2} V(R/2)`,
/// 3. `λ I/(I - V) ≤ 2λ` whenever `λ ≥ λ_min`.
pub fn chain_check(p: &KernelParams) -> Result<ChainReport> {
    chain_check_with(p, &Tolerance::default())
}

pub fn chain_check_with(p: &KernelParams, tol: &Tolerance) -> Result<ChainReport> {
    let lambda = p.lambda;
    let log_i = log_kernel_i_with(p, tol)?;
    let log_excess = log_kernel_excess_with(p, tol)?;
    let log_v = log_v_hyp_with(p.dim, p.r, tol)?;
    let log_v_half = log_v_hyp_with(p.dim, 0.5 * p.r, tol)?;
    let bound = lambda * (log_i - log_excess).exp();
    let lmin = 2.0 / p.r * (std::f64::consts::LN_2 + log_v - log_v_half);
    let log_x = 0.5 * p.lambda_r() + log_v_half;

    let mut chain = vec![
        ChainInequality::new(
            "log I >= lambda R/2 + log V(R/2)",
            log_i,
            Orientation::Ge,
            log_x,
        ),
        ChainInequality::new(
            "lambda R/2 + log V(R/2) > log V(R)",
            log_x,
            Orientation::Gt,
            log_v,
        ),
    ];
    if log_x > log_v {
        let half_ball_bound = lambda / -(log_v - log_x).exp_m1();
        chain.push(ChainInequality::new(
            "deriv_bound <= lambda X/(X - V)",
            bound,
            Orientation::Le,
            half_ball_bound,
        ));
    }
    let two_lambda_ok = if lambda >= lmin {
        let entry = ChainInequality::new(
            "deriv_bound <= 2 lambda (1 + 1e-9)",
            bound,
            Orientation::Le,
            2.0 * lambda * (1.0 + TWO_LAMBDA_SLACK),
        );
        let ok = entry.holds;
        chain.push(entry);
        Some(ok)
    } else {
        None
    };

    Ok(ChainReport {
        params: *p,
        log_i,
        ball_vol: log_v.exp(),
        log_ball_vol: log_v,
        mass: (log_excess - p.lambda_r()).exp(),
        deriv_bound: bound,
        lambda_min: lmin,
        two_lambda_ok,
        chain_inequalities: chain,
    })
}

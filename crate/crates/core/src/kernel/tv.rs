//! Total-variation distance between normalized kernels at two centres, and
//! the finite-difference check of the derivative bound built on it.
//!
//! The distance depends only on `δ = d(y, y')`. With geodesic polar
//! coordinates `(ρ, φ)` about the midpoint and the axis through the centres,
//! reflection in the axis and in the bisector reduce the integral to
//! `φ ∈ [0, π/2]`, where the centre at `φ = 0` is the nearer one and the
//! density difference has a fixed sign:
//!
//! ```text
//! n = 2:  TV = 4  ∫∫ (k₁ - k₂) sinh ρ dφ dρ
//! n = 3:  TV = 4π ∫∫ (k₁ - k₂) sin φ sinh² ρ dφ dρ
//! ```
//!
//! with `k = (e^{λ(R - d)} - 1)₊ / (I - V)`.

use std::cell::Cell;
use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use super::{deriv_bound_with, log_kernel_excess_with, KernelParams};
use crate::error::{Error, Result};
use crate::hypgeom::{hdistance, HPoint};
use crate::numerics::{integrate_with_breaks, Tolerance};

/// `TV(k_y, k_{y2})` for `n ∈ {2, 3}`.
pub fn tv_distance(p: &KernelParams, y: &HPoint, y2: &HPoint) -> Result<f64> {
    tv_distance_with(p, y, y2, &Tolerance::default())
}

pub fn tv_distance_with(p: &KernelParams, y: &HPoint, y2: &HPoint, tol: &Tolerance) -> Result<f64> {
    check_dim(p)?;
    if y.dim() != p.dim.get() || y2.dim() != p.dim.get() {
        return Err(Error::InvalidPoint(format!(
            "centres must lie in H^{}, got H^{} and H^{}",
            p.dim,
            y.dim(),
            y2.dim()
        )));
    }
    Ok(tv_integral(p, hdistance(y, y2)?, tol)?.0)
}

/// `TV` for centres at distance `delta`.
pub fn tv_distance_at(p: &KernelParams, delta: f64, tol: &Tolerance) -> Result<f64> {
    check_dim(p)?;
    Ok(tv_integral(p, delta, tol)?.0)
}

fn check_dim(p: &KernelParams) -> Result<()> {
    match p.dim.get() {
        2 | 3 => Ok(()),
        n => Err(Error::UnsupportedDim(n)),
    }
}

// Returns the distance and its quadrature error estimate.
fn tv_integral(p: &KernelParams, delta: f64, tol: &Tolerance) -> Result<(f64, f64)> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "distance must be non-negative, got {delta}"
        )));
    }
    let r = p.r;
    if delta == 0.0 {
        return Ok((0.0, 0.0));
    }
    if delta >= 2.0 * r {
        return Ok((2.0, 0.0));
    }
    tol.validate()?;
    let inner_tol = tol.tightened(0.1);
    let n = p.dim.get();
    let lambda = p.lambda;
    let norm = (-log_kernel_excess_with(p, tol)?).exp();
    let h = 0.5 * delta;
    let (sinh_h, sinh_half_r2) = (h.sinh(), (0.5 * r).sinh().powi(2));
    let density = |d: f64| {
        let x = lambda * (r - d);
        if x > 0.0 {
            x.exp_m1() * norm
        } else {
            0.0
        }
    };

    let failure: Cell<Option<Error>> = Cell::new(None);
    let radial = |rho: f64| -> f64 {
        let sinh_rho = rho.sinh();
        let base = (0.5 * (rho - h)).sinh().powi(2);
        let cross = sinh_rho * sinh_h;
        // d = 2 asinh √(sinh²((ρ-h)/2) + sinh ρ sinh h · s), s = sin²(φ/2) or cos²(φ/2)
        let dist = |s: f64| 2.0 * (base + cross * s).max(0.0).sqrt().asinh();
        let integrand = |phi: f64| {
            let half = 0.5 * phi;
            let diff = density(dist(half.sin().powi(2))) - density(dist(half.cos().powi(2)));
            if n == 3 {
                diff * phi.sin()
            } else {
                diff
            }
        };

        let mut points = vec![0.0, FRAC_PI_2];
        if cross > 0.0 {
            let s = (sinh_half_r2 - base) / cross;
            if s > 0.0 && s < 0.5 {
                points.push(2.0 * s.sqrt().asin());
            }
            if s > 0.5 && s < 1.0 {
                points.push(2.0 * s.sqrt().acos());
            }
        }
        points.sort_by(f64::total_cmp);

        match integrate_with_breaks(integrand, &points, &inner_tol) {
            Ok(q) => {
                let jacobian = if n == 3 {
                    sinh_rho * sinh_rho
                } else {
                    sinh_rho
                };
                q.value * jacobian
            }
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        }
    };

    let mut outer = vec![0.0, h, r - h, (r.cosh() / h.cosh()).acosh(), r + h];
    outer.retain(|x| x.is_finite() && *x >= 0.0 && *x <= r + h);
    outer.sort_by(f64::total_cmp);
    outer.dedup();

    let q = integrate_with_breaks(radial, &outer, tol);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let q = q?;
    let factor = if n == 3 {
        4.0 * std::f64::consts::PI
    } else {
        4.0
    };
    Ok((factor * q.value, factor * q.abs_error_estimate))
}

/// Finite-difference rate `TV(h)/h` compared with the derivative bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdCheck {
    pub h: f64,
    pub tv: f64,
    pub fd_norm_rate: f64,
    pub bound: f64,
    /// Quadrature error estimate of `tv`, divided by `h`.
    pub rate_error: f64,
    pub holds: bool,
}

/// Relative slack granted to the finite-difference comparison.
pub const FD_SLACK: f64 = 0.05;

pub fn fd_derivative_check(p: &KernelParams, h: f64) -> Result<FdCheck> {
    fd_derivative_check_with(p, h, &Tolerance::default())
}

pub fn fd_derivative_check_with(p: &KernelParams, h: f64, tol: &Tolerance) -> Result<FdCheck> {
    check_dim(p)?;
    if !(h > 0.0 && h <= 1e-2) {
        return Err(Error::InvalidArgument(format!(
            "step must lie in (0, 1e-2], got {h}"
        )));
    }
    let (tv, err) = tv_integral(p, h, tol)?;
    let bound = deriv_bound_with(p, tol)?;
    let rate = tv / h;
    let rate_error = err / h;
    Ok(FdCheck {
        h,
        tv,
        fd_norm_rate: rate,
        bound,
        rate_error,
        holds: rate <= bound * (1.0 + FD_SLACK) + rate_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypgeom::{geodesic_point, Dim};

    fn params(n: usize, lambda: f64, r: f64) -> KernelParams {
        KernelParams::new(Dim::new(n).unwrap(), lambda, r).unwrap()
    }

    #[test]
    fn trivial_cases() {
        let p = params(2, 3.0, 2.0);
        let o = HPoint::origin(p.dim);
        assert_eq!(tv_distance(&p, &o, &o).unwrap(), 0.0);
        let far = HPoint::new(vec![4f64.cosh(), 4f64.sinh(), 0.0]).unwrap();
        assert_eq!(tv_distance(&p, &o, &far).unwrap(), 2.0);
        let p4 = params(4, 1.0, 1.0);
        let o4 = HPoint::origin(p4.dim);
        assert_eq!(tv_distance(&p4, &o4, &o4), Err(Error::UnsupportedDim(4)));
    }

    #[test]
    fn near_disjoint_supports_approach_two() {
        let p = params(2, 1.0, 1.0);
        let tv = tv_distance_at(&p, 1.999, &Tolerance::default()).unwrap();
        assert!(tv > 1.99 && tv <= 2.0 + 1e-9, "{tv}");
        let p3 = params(3, 1.0, 1.0);
        let tv3 = tv_distance_at(&p3, 1.999, &Tolerance::default()).unwrap();
        assert!(tv3 > 1.99 && tv3 <= 2.0 + 1e-9, "{tv3}");
    }

    #[test]
    fn small_step_rate_is_below_bound() {
        let p = params(2, 3.0, 2.0);
        let o = HPoint::origin(p.dim);
        let u = o.unit_tangent(&[0.0, 1.0, 0.0]).unwrap();
        let y2 = geodesic_point(&o, &u, 1e-3).unwrap();
        let tv = tv_distance(&p, &o, &y2).unwrap();
        let bound = super::super::deriv_bound(&p).unwrap();
        assert!(tv > 0.0 && tv / 1e-3 <= bound * 1.05);
    }

    #[test]
    fn fd_examples_hold() {
        for &(n, l, r, h) in &[
            (2, 3.0, 2.0, 1e-3),
            (2, 1.0, 1.0, 1e-3),
            (3, 2.0, 1.5, 2e-3),
        ] {
            let c = fd_derivative_check(&params(n, l, r), h).unwrap();
            assert!(c.holds, "{c:?}");
        }
        assert!(fd_derivative_check(&params(2, 1.0, 1.0), 0.1).is_err());
    }
}

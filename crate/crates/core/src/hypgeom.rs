//! Geometry of the model space `ℍⁿ`: geodesic ball volumes and the
//! hyperboloid model.
//!
//! Ball volumes are `V(R) = Vol(S^{n-1}) ∫_0^R sinh^{n-1} t dt`. The direct
//! integral is used while the result fits in an `f64`; the log-space variant
//! stays finite for radii up to `1e6` and is what every ratio in the crate is
//! built from.
//!
//! Points live on the upper sheet `x₀² - x₁² - … - xₙ² = 1`, `x₀ ≥ 1`, with
//! the Minkowski pairing `⟨x, y⟩ = x₀y₀ - Σ xᵢyᵢ`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    integrate_adaptive, ln_sinh, log_integrate_exp, log_sphere_volume, Tolerance,
};

/// Ambient dimension `n ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dim(usize);

impl Dim {
    pub fn new(n: usize) -> Result<Dim> {
        if n >= 2 {
            Ok(Dim(n))
        } else {
            Err(Error::InvalidDim(n))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// `n - 1`, the exponent of `sinh` in the volume density.
    pub fn m(self) -> f64 {
        (self.0 - 1) as f64
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }
}

impl TryFrom<usize> for Dim {
    type Error = Error;
    fn try_from(n: usize) -> Result<Dim> {
        Dim::new(n)
    }
}

impl From<Dim> for usize {
    fn from(d: Dim) -> usize {
        d.0
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

// Below this radius the Taylor expansion of sinh^{n-1} is used.
const SERIES_RADIUS: f64 = 1e-4;

fn check_radius(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "radius must be finite and non-negative, got {r}"
        )))
    }
}

/// `∫_0^R (sinh t)^m dt / R^{m+1}` from
/// `(sinh t / t)^m = 1 + m t²/6 + (m/120 + m(m-1)/72) t⁴ + O(t⁶)`.
fn small_radius_factor(m: f64, r: f64) -> f64 {
    let n = m + 1.0;
    let r2 = r * r;
    let c4 = m / 120.0 + m * (m - 1.0) / 72.0;
    1.0 / n + m / 6.0 * r2 / (n + 2.0) + c4 * r2 * r2 / (n + 4.0)
}

/// Volume of a geodesic ball of radius `r` in `ℍⁿ`.
pub fn v_hyp(dim: Dim, r: f64) -> Result<f64> {
    v_hyp_with(dim, r, &Tolerance::default())
}

pub fn v_hyp_with(dim: Dim, r: f64, tol: &Tolerance) -> Result<f64> {
    check_radius(r)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let m = dim.m();
    let sphere = log_sphere_volume(dim.get() - 1).exp();
    if r <= SERIES_RADIUS {
        return Ok(sphere * r.powi(dim.get() as i32) * small_radius_factor(m, r));
    }
    if m * r < 650.0 {
        let q = integrate_adaptive(|t| t.sinh().powf(m), 0.0, r, tol)?;
        return Ok(sphere * q.value);
    }
    let log_v = log_v_hyp_with(dim, r, tol)?;
    if log_v >= f64::MAX.ln() {
        return Err(Error::Overflow {
            quantity: "V_hyp",
            log_value: log_v,
        });
    }
    Ok(log_v.exp())
}

/// `log V_hyp(n, r)`, finite for all `0 < r ≤ 1e6`; `-inf` at `r = 0`.
pub fn log_v_hyp(dim: Dim, r: f64) -> Result<f64> {
    log_v_hyp_with(dim, r, &Tolerance::default())
}

pub fn log_v_hyp_with(dim: Dim, r: f64, tol: &Tolerance) -> Result<f64> {
    check_radius(r)?;
    if r == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let m = dim.m();
    let log_sphere = log_sphere_volume(dim.get() - 1);
    if r <= SERIES_RADIUS {
        return Ok(log_sphere + dim.as_f64() * r.ln() + small_radius_factor(m, r).ln());
    }
    let q = log_integrate_exp(|t| m * ln_sinh(t), 0.0, r, tol)?;
    Ok(log_sphere + q.value)
}

/// `V_hyp(R) / V_hyp(R/2)`, always evaluated through logarithms.
pub fn v_ratio_halved(dim: Dim, r: f64) -> Result<f64> {
    Ok(log_v_ratio_halved(dim, r)?.exp())
}

pub fn v_ratio_halved_with(dim: Dim, r: f64, tol: &Tolerance) -> Result<f64> {
    Ok(log_v_ratio_halved_with(dim, r, tol)?.exp())
}

pub fn log_v_ratio_halved(dim: Dim, r: f64) -> Result<f64> {
    log_v_ratio_halved_with(dim, r, &Tolerance::default())
}

pub fn log_v_ratio_halved_with(dim: Dim, r: f64, tol: &Tolerance) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive, got {r}"
        )));
    }
    Ok(log_v_hyp_with(dim, r, tol)? - log_v_hyp_with(dim, 0.5 * r, tol)?)
}

/// Minkowski pairing `x₀y₀ - Σ xᵢyᵢ`.
pub fn minkowski_dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x[0] * y[0] - x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum::<f64>()
}

const POINT_TOL: f64 = 1e-8;

/// A point of `ℍⁿ` in hyperboloid coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct HPoint {
    coords: Vec<f64>,
}

impl HPoint {
    /// Validates `⟨x, x⟩ = 1` (to `1e-8`, relative to `x₀²` for far-out
    /// points) and `x₀ ≥ 1`.
    pub fn new(coords: Vec<f64>) -> Result<HPoint> {
        if coords.len() < 3 {
            return Err(Error::InvalidPoint(format!(
                "need at least 3 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        let norm = minkowski_dot(&coords, &coords);
        let scale = coords[0] * coords[0];
        if (norm - 1.0).abs() > POINT_TOL * scale.max(1.0) {
            return Err(Error::InvalidPoint(format!("⟨x,x⟩ = {norm}, expected 1")));
        }
        if coords[0] < 1.0 - POINT_TOL {
            return Err(Error::InvalidPoint(format!(
                "x₀ = {} lies on the lower sheet",
                coords[0]
            )));
        }
        Ok(HPoint { coords })
    }

    /// The base point `(1, 0, …, 0)`.
    pub fn origin(dim: Dim) -> HPoint {
        let mut coords = vec![0.0; dim.get() + 1];
        coords[0] = 1.0;
        HPoint { coords }
    }

    /// Lifts spatial coordinates `(x₁, …, xₙ)` onto the upper sheet.
    pub fn from_spatial(spatial: &[f64]) -> Result<HPoint> {
        let r2: f64 = spatial.iter().map(|x| x * x).sum();
        let mut coords = Vec::with_capacity(spatial.len() + 1);
        coords.push((1.0 + r2).sqrt());
        coords.extend_from_slice(spatial);
        HPoint::new(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Projects an ambient vector onto the tangent space at `self` and
    /// normalizes it, giving a valid `direction` for [`geodesic_point`].
    pub fn unit_tangent(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.coords.len() {
            return Err(Error::InvalidDirection(format!(
                "expected {} components, got {}",
                self.coords.len(),
                v.len()
            )));
        }
        let s = minkowski_dot(&self.coords, v);
        let u: Vec<f64> = v
            .iter()
            .zip(&self.coords)
            .map(|(vi, pi)| vi - s * pi)
            .collect();
        let norm2 = -minkowski_dot(&u, &u);
        if !(norm2 > 0.0) {
            return Err(Error::InvalidDirection(
                "vector has no spacelike tangent component".into(),
            ));
        }
        let inv = 1.0 / norm2.sqrt();
        Ok(u.into_iter().map(|x| x * inv).collect())
    }
}

/// Hyperbolic distance `arccosh ⟨p, q⟩`.
///
/// Evaluated as `2 asinh(|p - q|_M / 2)`, algebraically identical on the
/// hyperboloid and free of the cancellation `arccosh` suffers near 1.
pub fn hdistance(p: &HPoint, q: &HPoint) -> Result<f64> {
    if p.coords.len() != q.coords.len() {
        return Err(Error::InvalidPoint(format!(
            "dimension mismatch: {} vs {}",
            p.dim(),
            q.dim()
        )));
    }
    let diff: Vec<f64> = p.coords.iter().zip(&q.coords).map(|(a, b)| a - b).collect();
    let chord2 = (-minkowski_dot(&diff, &diff)).max(0.0);
    let near = 2.0 * (0.5 * chord2.sqrt()).asinh();
    if near < 1.0 {
        Ok(near)
    } else {
        Ok(minkowski_dot(&p.coords, &q.coords).max(1.0).acosh())
    }
}

fn check_direction(p: &HPoint, direction: &[f64]) -> Result<()> {
    if direction.len() != p.coords.len() {
        return Err(Error::InvalidDirection(format!(
            "expected {} components, got {}",
            p.coords.len(),
            direction.len()
        )));
    }
    let scale = p.coords[0].abs().max(1.0);
    let orth = minkowski_dot(&p.coords, direction);
    if orth.abs() > POINT_TOL * scale * scale {
        return Err(Error::InvalidDirection(format!(
            "⟨p, u⟩ = {orth}, expected 0"
        )));
    }
    let norm = minkowski_dot(direction, direction);
    if (norm + 1.0).abs() > POINT_TOL * scale * scale {
        return Err(Error::InvalidDirection(format!(
            "⟨u, u⟩ = {norm}, expected -1"
        )));
    }
    Ok(())
}

/// Point at signed distance `t` along the geodesic through `p` with unit
/// tangent `direction`: `cosh(t) p + sinh(t) u`.
pub fn geodesic_point(p: &HPoint, direction: &[f64], t: f64) -> Result<HPoint> {
    check_direction(p, direction)?;
    let (c, s) = (t.cosh(), t.sinh());
    let coords = p
        .coords
        .iter()
        .zip(direction)
        .map(|(x, u)| c * x + s * u)
        .collect();
    HPoint::new(coords)
}

/// Tangent of the same geodesic after travelling `t`: `sinh(t) p + cosh(t) u`.
pub fn transported_direction(p: &HPoint, direction: &[f64], t: f64) -> Result<Vec<f64>> {
    check_direction(p, direction)?;
    let (c, s) = (t.cosh(), t.sinh());
    Ok(p.coords
        .iter()
        .zip(direction)
        .map(|(x, u)| s * x + c * u)
        .collect())
}

//! Suprema and infima of continuous functions on rays `[a, ∞)`.
//!
//! The ray is scanned on a geometric grid `r_{k+1} = r_k + h (1 + r_k)` until
//! a caller-supplied tail bound shows that nothing beyond the current point can
//! beat the running extremum. The best grid bracket is then refined by golden
//! section, and the known limit at infinity is folded in last.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Which extremum a search computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Sup,
    Inf,
}

/// Where an extremum is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Attainment {
    At(f64),
    /// The extremum equals the limit at infinity and no finite point of the
    /// scanned window reaches it.
    AtInfinity,
}

impl Attainment {
    pub fn is_at_infinity(&self) -> bool {
        matches!(self, Attainment::AtInfinity)
    }

    pub fn point(&self) -> Option<f64> {
        match *self {
            Attainment::At(x) => Some(x),
            Attainment::AtInfinity => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalResult {
    pub kind: ExtremumKind,
    pub value: f64,
    pub arg: Attainment,
    /// `(a, R_cut)`: the part of the ray that was scanned.
    pub window: (f64, f64),
    /// Slack by which the tail bound at `R_cut` cleared the cut condition.
    pub tail_margin: f64,
    pub grid_points: usize,
}

/// Search parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaySearch {
    /// Absolute tolerance on the extremal value.
    pub tol: f64,
    /// The scan gives up with [`Error::TailNeverDominates`] beyond this point.
    pub max_ray_cut: f64,
    /// Multiplies the grid step; `0.5` doubles the density.
    pub step_factor: f64,
}

impl Default for RaySearch {
    fn default() -> Self {
        RaySearch {
            tol: 1e-9,
            max_ray_cut: 1e4,
            step_factor: 1.0,
        }
    }
}

const BASE_STEP: f64 = 0.01;
const CHUNK: usize = 32;
const GOLDEN_ITERATIONS: usize = 120;

impl RaySearch {
    pub fn with_tol(tol: f64) -> RaySearch {
        RaySearch {
            tol,
            ..RaySearch::default()
        }
    }

    fn validate(&self, a: f64) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidTolerance(format!(
                "extremal tolerance must be positive, got {}",
                self.tol
            )));
        }
        if !(self.step_factor > 0.0 && self.step_factor.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "step factor must be positive, got {}",
                self.step_factor
            )));
        }
        if !a.is_finite() || !(self.max_ray_cut > a) {
            return Err(Error::InvalidArgument(format!(
                "ray start {a} must be finite and below max_ray_cut {}",
                self.max_ray_cut
            )));
        }
        Ok(())
    }

    fn next_point(&self, r: f64) -> f64 {
        r + BASE_STEP * self.step_factor * (1.0 + r.abs())
    }

    /// `sup_{r ≥ a} f(r)`.
    ///
    /// `tail_bound(R)` must bound `sup_{r ≥ R} f(r)` from above and tend to
    /// `limit`; the answer is only as good as that bound.
    pub fn sup_on_ray<F, T>(
        &self,
        f: F,
        a: f64,
        limit: f64,
        tail_bound: T,
    ) -> Result<ExtremalResult>
    where
        F: Fn(f64) -> Result<f64> + Sync,
        T: Fn(f64) -> f64,
    {
        self.validate(a)?;

        let mut grid: Vec<f64> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut best = f64::NEG_INFINITY;
        let mut best_idx = 0;
        let mut cut = None;
        let mut next = a;

        while cut.is_none() {
            let mut chunk = Vec::with_capacity(CHUNK);
            for _ in 0..CHUNK {
                if next > self.max_ray_cut {
                    break;
                }
                chunk.push(next);
                next = self.next_point(next);
            }
            if chunk.is_empty() {
                return Err(Error::TailNeverDominates {
                    max_ray_cut: self.max_ray_cut,
                });
            }
            let evaluated: Vec<f64> = chunk
                .par_iter()
                .map(|&r| checked(&f, r))
                .collect::<Result<_>>()?;

            for (r, y) in chunk.into_iter().zip(evaluated) {
                let idx = grid.len();
                grid.push(r);
                values.push(y);
                if y > best {
                    best = y;
                    best_idx = idx;
                }
                if idx > 0 {
                    let bound = tail_bound(r);
                    if bound <= best + self.tol {
                        cut = Some((idx, bound));
                        break;
                    }
                }
            }
        }
        let (cut_idx, cut_bound) = cut.expect("loop exits only after a cut");

        let lo = grid[best_idx.saturating_sub(1)];
        let hi = grid[(best_idx + 1).min(cut_idx)];
        let (x_ref, y_ref) = golden_max(&f, lo, hi)?;
        let value = best.max(y_ref);

        // Smallest grid point within tolerance wins; otherwise the refined one.
        let arg = values
            .iter()
            .position(|&y| y >= value - self.tol)
            .map(|i| grid[i])
            .unwrap_or(x_ref);

        let tail_margin = value + self.tol - cut_bound;
        let (value, arg) = if limit > value {
            (limit, Attainment::AtInfinity)
        } else {
            (value, Attainment::At(arg))
        };

        Ok(ExtremalResult {
            kind: ExtremumKind::Sup,
            value,
            arg,
            window: (a, grid[cut_idx]),
            tail_margin: tail_margin.max(0.0),
            grid_points: grid.len(),
        })
    }

    /// `inf_{r ≥ a} f(r)`; `tail_lower_bound(R)` must bound
    /// `inf_{r ≥ R} f(r)` from below.
    pub fn inf_on_ray<F, T>(
        &self,
        f: F,
        a: f64,
        limit: f64,
        tail_lower_bound: T,
    ) -> Result<ExtremalResult>
    where
        F: Fn(f64) -> Result<f64> + Sync,
        T: Fn(f64) -> f64,
    {
        let neg = self.sup_on_ray(|r| f(r).map(|y| -y), a, -limit, |r| -tail_lower_bound(r))?;
        Ok(ExtremalResult {
            kind: ExtremumKind::Inf,
            value: -neg.value,
            ..neg
        })
    }
}

/// [`RaySearch::sup_on_ray`] with default search parameters and tolerance `tol`.
pub fn sup_on_ray<F, T>(f: F, a: f64, limit: f64, tail_bound: T, tol: f64) -> Result<ExtremalResult>
where
    F: Fn(f64) -> Result<f64> + Sync,
    T: Fn(f64) -> f64,
{
    RaySearch::with_tol(tol).sup_on_ray(f, a, limit, tail_bound)
}

/// [`RaySearch::inf_on_ray`] with default search parameters and tolerance `tol`.
pub fn inf_on_ray<F, T>(
    f: F,
    a: f64,
    limit: f64,
    tail_lower_bound: T,
    tol: f64,
) -> Result<ExtremalResult>
where
    F: Fn(f64) -> Result<f64> + Sync,
    T: Fn(f64) -> f64,
{
    RaySearch::with_tol(tol).inf_on_ray(f, a, limit, tail_lower_bound)
}

fn checked<F: Fn(f64) -> Result<f64>>(f: &F, r: f64) -> Result<f64> {
    let y = f(r)?;
    if y.is_nan() {
        Err(Error::NonFinite { x: r })
    } else {
        Ok(y)
    }
}

fn golden_max<F: Fn(f64) -> Result<f64>>(f: &F, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    if hi <= lo {
        return Ok((lo, checked(f, lo)?));
    }
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (checked(f, x1)?, checked(f, x2)?);
    for _ in 0..GOLDEN_ITERATIONS {
        if hi - lo <= 1e-12 * (1.0 + hi.abs()) {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = checked(f, x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = checked(f, x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-9;

    fn ok(f: impl Fn(f64) -> f64 + Sync) -> impl Fn(f64) -> Result<f64> + Sync {
        move |r| Ok(f(r))
    }

    #[test]
    fn decreasing_exponential() {
        let res = sup_on_ray(ok(|r: f64| (-r).exp()), 0.0, 0.0, |r: f64| (-r).exp(), TOL).unwrap();
        assert_eq!(res.value, 1.0);
        assert_eq!(res.arg, Attainment::At(0.0));
        assert_eq!(res.kind, ExtremumKind::Sup);
    }

    #[test]
    fn two_plus_reciprocal() {
        let res = sup_on_ray(ok(|r| 2.0 + 1.0 / r), 1.0, 2.0, |r| 2.0 + 1.0 / r, TOL).unwrap();
        assert_eq!(res.value, 3.0);
        assert_eq!(res.arg, Attainment::At(1.0));
    }

    #[test]
    fn damped_sine_matches_dense_scan() {
        let f = |r: f64| r.sin() / r + 1.0;
        let res = sup_on_ray(ok(f), 1.0, 1.0, |r| 1.0 + 1.0 / r, TOL).unwrap();
        let brute = (0..=990_000)
            .map(|i| f(1.0 + i as f64 * 1e-4))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((res.value - brute).abs() < 1e-6);
        assert!((res.value - (1f64.sin() + 1.0)).abs() < 1e-12);
        assert_eq!(res.arg, Attainment::At(1.0));
    }

    #[test]
    fn infimum_at_infinity() {
        let res = inf_on_ray(ok(|r: f64| 1.0 + (-r).exp()), 2.0, 1.0, |_| 1.0, TOL).unwrap();
        assert_eq!(res.kind, ExtremumKind::Inf);
        assert_eq!(res.value, 1.0);
        assert!(res.arg.is_at_infinity());
        assert!(res.tail_margin >= 0.0);
    }

    #[test]
    fn interior_minimum() {
        let f = |r: f64| (r - 3.0).powi(2) + 0.5;
        // inf_{r ≥ R} f = 0.5 for R ≤ 3, f(R) beyond.
        let lower = |r: f64| if r <= 3.0 { 0.5 } else { f(r) };
        let res = inf_on_ray(ok(f), 2.0, f64::INFINITY, lower, TOL).unwrap();
        assert!((res.value - 0.5).abs() < 1e-12);
        let x = res.arg.point().unwrap();
        assert!((x - 3.0).abs() < 1e-4, "{x}");
        assert!((f(x) - res.value).abs() <= TOL);
    }

    #[test]
    fn tail_that_never_dominates_is_an_error() {
        let search = RaySearch {
            max_ray_cut: 50.0,
            ..RaySearch::default()
        };
        let err = search
            .sup_on_ray(ok(|_| 0.0), 1.0, 0.0, |_| 1.0)
            .unwrap_err();
        assert_eq!(err, Error::TailNeverDominates { max_ray_cut: 50.0 });
    }

    #[test]
    fn errors_from_f_propagate() {
        let res = sup_on_ray(|_| Err(Error::NonFinite { x: 1.0 }), 1.0, 0.0, |_| 0.0, TOL);
        assert!(res.is_err());
        let res = sup_on_ray(ok(|_| f64::NAN), 1.0, 0.0, |_| 0.0, TOL);
        assert!(matches!(res, Err(Error::NonFinite { .. })));
        assert!(sup_on_ray(ok(|_| 0.0), 1.0, 0.0, |_| 0.0, 0.0).is_err());
    }

    #[test]
    fn ties_resolve_to_smallest_argument() {
        // Two equal bumps at 2 and 8; f decreases beyond 8.
        let f = |r: f64| (-(r - 2.0).powi(2)).exp() + (-(r - 8.0).powi(2)).exp();
        let res = sup_on_ray(ok(f), 0.0, 0.0, |r| if r < 8.0 { 2.0 } else { f(r) }, 1e-3).unwrap();
        assert!(res.arg.point().unwrap() < 3.0);
    }

    #[test]
    fn result_dominates_random_points_in_window() {
        let f = |r: f64| (3.0 * r).sin() * (-0.1 * r).exp() + 0.2 * (-r).exp();
        let tail = |r: f64| (-0.1 * r).exp() + 0.2 * (-r).exp();
        let res = sup_on_ray(ok(f), 0.5, 0.0, tail, TOL).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (a, cut) = res.window;
        for _ in 0..10_000 {
            let r = rng.gen_range(a..=cut);
            assert!(res.value >= f(r) - TOL);
        }
    }

    #[test]
    fn doubling_density_changes_little() {
        let f = |r: f64| (3.0 * r).sin() * (-0.1 * r).exp();
        let tail = |r: f64| (-0.1 * r).exp();
        let coarse = sup_on_ray(ok(f), 0.5, 0.0, tail, TOL).unwrap();
        let fine = RaySearch {
            step_factor: 0.5,
            ..RaySearch::with_tol(TOL)
        }
        .sup_on_ray(ok(f), 0.5, 0.0, tail)
        .unwrap();
        assert!((coarse.value - fine.value).abs() <= 2.0 * TOL);
        assert!(fine.grid_points > coarse.grid_points);
    }

    #[test]
    fn log_transform_preserves_argmax() {
        let plain = sup_on_ray(ok(|r| 2.0 + 1.0 / r), 1.0, 2.0, |r| 2.0 + 1.0 / r, TOL).unwrap();
        let logged = sup_on_ray(
            ok(|r| (2.0 + 1.0 / r).ln()),
            1.0,
            2f64.ln(),
            |r| (2.0 + 1.0 / r).ln(),
            TOL,
        )
        .unwrap();
        assert!((logged.value - plain.value.ln()).abs() < 1e-12);
        assert_eq!(plain.arg, logged.arg);
    }
}

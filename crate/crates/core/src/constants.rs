//! Dimensional constants, from `f(R)` to the volume thresholds.
//!
//! ```text
//! C_n    = (sup_{R≥1} f(R))^n                α_n = 1 / (n! C_n)
//! c_n    = inf_{R≥2} V(R)/V(R/2) e^{-(n-1)R/2}
//! c‴_n   = c_n c′_n 2^{-n}
//! λ_n    = max(2, sup_{R≥1} 2/((n-1)R) log(V(R)/c‴_n))
//! β_n    = α_n / (λ_n^n 𝒱_n)
//! ```
//!
//! `c′_n` (the ball-volume constant below half the injectivity radius) and
//! `𝒱_n` for `n ≥ 4` are external inputs; every other number is computed.
//! Tail bounds for the three searches come from
//! `(e^t/2)(1 - e^{-2t}) ≤ sinh t ≤ e^t/2`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_3, LN_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::{ExtremalResult, RaySearch};
use crate::hypgeom::{log_v_hyp_with, log_v_ratio_halved_with, Dim};
use crate::kernel::f_of_r_with;
use crate::numerics::{ln_one_minus_exp, lobachevsky, log_sphere_volume, Tolerance};

/// Constants the pipeline takes as given, keyed by dimension.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ExternalConstants {
    pub croke_cprime: BTreeMap<usize, f64>,
    pub ideal_simplex_vol_override: BTreeMap<usize, f64>,
}

impl ExternalConstants {
    pub fn validate(&self) -> Result<()> {
        for (name, map) in [
            ("croke_cprime", &self.croke_cprime),
            (
                "ideal_simplex_vol_override",
                &self.ideal_simplex_vol_override,
            ),
        ] {
            for (&n, &v) in map {
                if n < 2 {
                    return Err(Error::Config(format!(
                        "{name}[{n}]: dimension must be at least 2"
                    )));
                }
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::Config(format!("{name}[{n}] = {v} must be positive")));
                }
            }
        }
        Ok(())
    }

    pub fn croke_cprime(&self, dim: Dim) -> Result<f64> {
        self.croke_cprime
            .get(&dim.get())
            .copied()
            .ok_or_else(|| Error::MissingExternal {
                key: format!("croke_cprime[{dim}]"),
            })
    }

    pub fn simplex_override(&self, dim: Dim) -> Option<f64> {
        self.ideal_simplex_vol_override.get(&dim.get()).copied()
    }

    /// Placeholder externals for exercising the pipeline in every dimension:
    /// `c′_n = 1` for `n = 2..=6` and simplex volumes `0.2689`, `0.0781`,
    /// `0.0183` for `n = 4, 5, 6`. These are test fixtures, not literature
    /// values.
    pub fn fixture() -> ExternalConstants {
        ExternalConstants {
            croke_cprime: (2..=6).map(|n| (n, 1.0)).collect(),
            ideal_simplex_vol_override: [(4, 0.2689), (5, 0.0781), (6, 0.0183)]
                .into_iter()
                .collect(),
        }
    }

    /// `other`'s entries layered over `self`'s.
    pub fn overlay(&self, other: &ExternalConstants) -> ExternalConstants {
        let mut merged = self.clone();
        merged.croke_cprime.extend(&other.croke_cprime);
        merged
            .ideal_simplex_vol_override
            .extend(&other.ideal_simplex_vol_override);
        merged
    }
}

/// `2^{n-1} Vol(S^{n-1})^n / (n^n Vol(S^n)^{n-1})`, the constant in
/// `vol B(p, r) ≥ c′_n rⁿ` for `r` up to half the injectivity radius.
pub fn croke_constant(dim: Dim) -> f64 {
    let n = dim.as_f64();
    let log = (n - 1.0) * LN_2 + n * log_sphere_volume(dim.get() - 1)
        - n * n.ln()
        - (n - 1.0) * log_sphere_volume(dim.get());
    log.exp()
}

/// Maximal volume `𝒱_n` of an ideal `n`-simplex: `π`, `3Λ(π/3)`, or the
/// configured override for `n ≥ 4`.
pub fn ideal_simplex_volume(dim: Dim, ext: &ExternalConstants) -> Result<f64> {
    match dim.get() {
        2 => Ok(PI),
        3 => Ok(3.0 * lobachevsky(FRAC_PI_3)),
        _ => ext
            .simplex_override(dim)
            .ok_or_else(|| Error::MissingExternal {
                key: format!("ideal_simplex_vol_override[{dim}]"),
            }),
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Where a reported number came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Computed,
    External,
    Clamped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CAlpha {
    pub c_big: f64,
    pub alpha: f64,
    pub f_sup: ExtremalResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaN {
    pub value: f64,
    pub clamped: bool,
    pub sup: ExtremalResult,
}

/// All constants for one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsReport {
    pub dim: Dim,
    pub v_n: f64,
    pub f_sup: ExtremalResult,
    pub c_big: f64,
    pub alpha_n: f64,
    pub c_n: ExtremalResult,
    pub c_prime_n: f64,
    pub c_triple_prime_n: f64,
    pub lambda_n: f64,
    pub lambda_clamped: bool,
    pub lambda_sup: ExtremalResult,
    pub beta_n: f64,
    pub entropy_threshold_ratio: f64,
    pub isoembolic_coefficient: f64,
    pub provenance: BTreeMap<&'static str, Provenance>,
}

/// Admissible-volume thresholds for a manifold summarized by its hyperbolic
/// volume and/or simplicial volume. Fields whose inputs are absent are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub simplicial_volume: f64,
    pub simplicial_volume_derived: bool,
    pub theorem_threshold: f64,
    pub corollary_threshold: Option<f64>,
    pub isoembolic_threshold: f64,
    pub entropy_threshold: Option<f64>,
}

impl ThresholdReport {
    /// `‖M‖ = vol_hyp / 𝒱_n` is used when only the hyperbolic volume is given.
    pub fn from_report(
        report: &ConstantsReport,
        vol_hyp: Option<f64>,
        simplicial_volume: Option<f64>,
    ) -> Result<ThresholdReport> {
        for v in vol_hyp.iter().chain(simplicial_volume.iter()) {
            if !(*v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "volumes must be non-negative, got {v}"
                )));
            }
        }
        let (norm, derived) = match (simplicial_volume, vol_hyp) {
            (Some(s), _) => (s, false),
            (None, Some(v)) => (v / report.v_n, true),
            (None, None) => {
                return Err(Error::MissingInput(
                    "need a hyperbolic volume or a simplicial volume".into(),
                ))
            }
        };
        Ok(ThresholdReport {
            simplicial_volume: norm,
            simplicial_volume_derived: derived,
            theorem_threshold: report.alpha_n * norm,
            corollary_threshold: vol_hyp.map(|v| report.beta_n * v),
            isoembolic_threshold: report.isoembolic_coefficient * norm,
            entropy_threshold: vol_hyp.map(|v| report.entropy_threshold_ratio * v),
        })
    }
}

/// Numerical settings shared by every stage.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pipeline {
    pub quad: Tolerance,
    pub search: RaySearch,
}

impl Pipeline {
    pub fn new(quad: Tolerance, search: RaySearch) -> Pipeline {
        Pipeline { quad, search }
    }

    /// Upper bound for `sup_{r ≥ R} f(r)`:
    /// `2(n-1) + (4/R)(log 2 + ε(R))`, with
    /// `ε(R) = -(n-1) log(1 - e^{-R/2}) - log(1 - e^{-(n-1)R/4})`.
    pub fn f_tail_bound(dim: Dim, r: f64) -> f64 {
        let m = dim.m();
        let eps = -m * ln_one_minus_exp(-0.5 * r) - ln_one_minus_exp(-0.25 * m * r);
        2.0 * m + 4.0 / r * (LN_2 + eps)
    }

    /// Lower bound for `inf_{r ≥ R} g(r)`: `(1 - e^{-R})^{n-1} (1 - e^{-(n-1)R/2})`.
    pub fn g_tail_lower_bound(dim: Dim, r: f64) -> f64 {
        let m = dim.m();
        (m * ln_one_minus_exp(-r) + ln_one_minus_exp(-0.5 * m * r)).exp()
    }

    /// Upper bound for the `λ_n` integrand beyond `R`:
    /// `2 + 2 max(0, log A - log c‴)/((n-1)R)` with `A = Vol(S^{n-1})/(2^{n-1}(n-1))`.
    pub fn lambda_tail_bound(dim: Dim, c_triple_prime: f64, r: f64) -> f64 {
        let m = dim.m();
        let log_a = log_sphere_volume(dim.get() - 1) - m * LN_2 - m.ln();
        2.0 + 2.0 * (log_a - c_triple_prime.ln()).max(0.0) / (m * r)
    }

    /// `f(R)` with this pipeline's tolerance.
    pub fn f(&self, dim: Dim, r: f64) -> Result<f64> {
        f_of_r_with(dim, r, &self.quad)
    }

    /// `g(R) = V(R)/V(R/2) · e^{-(n-1)R/2}`.
    pub fn g(&self, dim: Dim, r: f64) -> Result<f64> {
        Ok((log_v_ratio_halved_with(dim, r, &self.quad)? - 0.5 * dim.m() * r).exp())
    }

    /// `h(R) = 2/((n-1)R) · (log V(R) - log c‴)`.
    pub fn lambda_integrand(&self, dim: Dim, c_triple_prime: f64, r: f64) -> Result<f64> {
        if !(c_triple_prime > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "c‴ must be positive, got {c_triple_prime}"
            )));
        }
        let log_v = log_v_hyp_with(dim, r, &self.quad)?;
        Ok(2.0 / (dim.m() * r) * (log_v - c_triple_prime.ln()))
    }

    /// `f_sup = sup_{R ≥ 1} f`, `C_n = f_supⁿ`, `α_n = 1/(n! C_n)`.
    pub fn compute_c_alpha(&self, dim: Dim) -> Result<CAlpha> {
        let f_sup = self.search.sup_on_ray(
            |r| self.f(dim, r),
            1.0,
            2.0 * dim.m(),
            |r| Self::f_tail_bound(dim, r),
        )?;
        let log_c = dim.as_f64() * f_sup.value.ln();
        Ok(CAlpha {
            c_big: log_c.exp(),
            alpha: (-ln_factorial(dim.get()) - log_c).exp(),
            f_sup,
        })
    }

    /// `c_n = inf_{R ≥ 2} g(R)`.
    pub fn compute_c_n(&self, dim: Dim) -> Result<ExtremalResult> {
        self.search.inf_on_ray(
            |r| self.g(dim, r),
            2.0,
            1.0,
            |r| Self::g_tail_lower_bound(dim, r),
        )
    }

    /// `λ_n = max(2, sup_{R ≥ 1} h(R))`.
    pub fn compute_lambda_n(&self, dim: Dim, c_triple_prime: f64) -> Result<LambdaN> {
        if !(c_triple_prime > 0.0 && c_triple_prime.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "c‴ must be positive, got {c_triple_prime}"
            )));
        }
        let sup = self.search.sup_on_ray(
            |r| self.lambda_integrand(dim, c_triple_prime, r),
            1.0,
            2.0,
            |r| Self::lambda_tail_bound(dim, c_triple_prime, r),
        )?;
        let clamped = sup.value < 2.0;
        Ok(LambdaN {
            value: sup.value.max(2.0),
            clamped,
            sup,
        })
    }

    /// Runs the whole chain `α → c_n → c‴ → λ_n → β_n`.
    pub fn compute_beta_n(&self, dim: Dim, ext: &ExternalConstants) -> Result<ConstantsReport> {
        ext.validate()?;
        let c_prime = ext.croke_cprime(dim)?;
        let v_n = ideal_simplex_volume(dim, ext)?;
        let ca = self.compute_c_alpha(dim)?;
        let c_n = self.compute_c_n(dim)?;
        let n = dim.as_f64();
        let c3 = (c_n.value.ln() + c_prime.ln() - n * LN_2).exp();
        let lam = self.compute_lambda_n(dim, c3)?;
        let log_alpha = ca.alpha.ln();
        let beta = (log_alpha - n * lam.value.ln() - v_n.ln()).exp();

        let mut provenance = BTreeMap::new();
        let simplex_source = if dim.get() <= 3 {
            Provenance::Computed
        } else {
            Provenance::External
        };
        provenance.insert("V_n", simplex_source);
        provenance.insert("f_sup", Provenance::Computed);
        provenance.insert("C_n", Provenance::Computed);
        provenance.insert("alpha_n", Provenance::Computed);
        provenance.insert("c_n", Provenance::Computed);
        provenance.insert("c_prime_n", Provenance::External);
        provenance.insert("c_triple_prime_n", Provenance::Computed);
        provenance.insert(
            "lambda_n",
            if lam.clamped {
                Provenance::Clamped
            } else {
                Provenance::Computed
            },
        );
        provenance.insert("beta_n", Provenance::Computed);
        provenance.insert("entropy_threshold_ratio", Provenance::Computed);
        provenance.insert("isoembolic_coefficient", Provenance::Computed);

        Ok(ConstantsReport {
            dim,
            v_n,
            f_sup: ca.f_sup,
            c_big: ca.c_big,
            alpha_n: ca.alpha,
            c_n,
            c_prime_n: c_prime,
            c_triple_prime_n: c3,
            lambda_n: lam.value,
            lambda_clamped: lam.clamped,
            lambda_sup: lam.sup,
            beta_n: beta,
            entropy_threshold_ratio: (log_alpha - v_n.ln()).exp(),
            isoembolic_coefficient: (beta.ln() + v_n.ln()).exp(),
            provenance,
        })
    }

    pub fn volume_thresholds(
        &self,
        dim: Dim,
        ext: &ExternalConstants,
        vol_hyp: Option<f64>,
        simplicial_volume: Option<f64>,
    ) -> Result<ThresholdReport> {
        if vol_hyp.is_none() && simplicial_volume.is_none() {
            return Err(Error::MissingInput(
                "need a hyperbolic volume or a simplicial volume".into(),
            ));
        }
        let report = self.compute_beta_n(dim, ext)?;
        ThresholdReport::from_report(&report, vol_hyp, simplicial_volume)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn d(n: usize) -> Dim {
        Dim::new(n).unwrap()
    }

    fn fixture() -> ExternalConstants {
        ExternalConstants::fixture()
    }

    #[test]
    fn simplex_volumes() {
        let ext = ExternalConstants::default();
        assert_eq!(ideal_simplex_volume(d(2), &ext).unwrap(), PI);
        assert!((ideal_simplex_volume(d(3), &ext).unwrap() - 1.0149416).abs() < 1e-5);
        assert_eq!(
            ideal_simplex_volume(d(4), &ext),
            Err(Error::MissingExternal {
                key: "ideal_simplex_vol_override[4]".into()
            })
        );
        assert_eq!(ideal_simplex_volume(d(4), &fixture()).unwrap(), 0.2689);
    }

    #[test]
    fn croke_values() {
        assert_relative_eq!(croke_constant(d(2)), PI / 2.0, max_relative = 1e-14);
        // n = 3: 4 (4π)³ / (27 (2π²)²) = 64 / (27 π)
        assert_relative_eq!(
            croke_constant(d(3)),
            64.0 / (27.0 * PI),
            max_relative = 1e-14
        );
    }

    #[test]
    fn alpha_two() {
        let ca = Pipeline::default().compute_c_alpha(d(2)).unwrap();
        assert_relative_eq!(ca.f_sup.value, 8.56520459568063468, max_relative = 1e-10);
        assert_eq!(ca.f_sup.arg.point(), Some(1.0));
        assert_relative_eq!(ca.c_big, 73.3627297658686647, max_relative = 1e-9);
        assert_relative_eq!(ca.alpha, 0.00681544977396166086, max_relative = 1e-9);
        assert_relative_eq!(ca.alpha * 2.0 * ca.c_big, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn c_n_is_one_at_infinity() {
        let p = Pipeline::default();
        for n in [2, 3] {
            let c = p.compute_c_n(d(n)).unwrap();
            assert!((c.value - 1.0).abs() < 1e-6);
            assert!(c.arg.is_at_infinity());
        }
        let g2 = p.g(d(2), 2.0).unwrap();
        let expect = (2f64.cosh() - 1.0) / (1f64.cosh() - 1.0) / 1f64.exp();
        assert_relative_eq!(g2, expect, max_relative = 1e-11);
    }

    #[test]
    fn tail_bounds_dominate() {
        let p = Pipeline::default();
        for n in 2..=6 {
            for &r in &[1.0, 2.0, 5.0, 20.0, 80.0] {
                assert!(Pipeline::f_tail_bound(d(n), r) + 1e-12 >= p.f(d(n), r).unwrap());
                if r >= 2.0 {
                    assert!(Pipeline::g_tail_lower_bound(d(n), r) <= p.g(d(n), r).unwrap() + 1e-12);
                }
                assert!(
                    Pipeline::lambda_tail_bound(d(n), 0.1, r) + 1e-12
                        >= p.lambda_integrand(d(n), 0.1, r).unwrap()
                );
            }
        }
    }

    #[test]
    fn constructed_lambda_identity() {
        let p = Pipeline::default();
        for n in 2..=4 {
            let c3 = (log_v_hyp_with(d(n), 1.0, &p.quad).unwrap() - (n as f64 - 1.0)).exp();
            assert!((p.lambda_integrand(d(n), c3, 1.0).unwrap() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn report_identities_on_fixture() {
        let rep = Pipeline::default()
            .compute_beta_n(d(2), &fixture())
            .unwrap();
        assert_relative_eq!(rep.c_big, rep.f_sup.value.powi(2), max_relative = 1e-12);
        assert_relative_eq!(rep.alpha_n * 2.0 * rep.c_big, 1.0, max_relative = 1e-12);
        assert_relative_eq!(
            rep.c_triple_prime_n,
            rep.c_n.value * rep.c_prime_n / 4.0,
            max_relative = 1e-12
        );
        assert!(rep.lambda_n >= 2.0);
        assert_relative_eq!(
            rep.beta_n * rep.lambda_n.powi(2) * rep.v_n,
            rep.alpha_n,
            max_relative = 1e-12
        );
        assert!(rep.beta_n <= rep.alpha_n / (4.0 * rep.v_n));
        assert_eq!(rep.provenance["c_prime_n"], Provenance::External);
    }

    #[test]
    fn missing_croke_constant() {
        let err = Pipeline::default()
            .compute_beta_n(d(3), &ExternalConstants::default())
            .unwrap_err();
        assert_eq!(
            err,
            Error::MissingExternal {
                key: "croke_cprime[3]".into()
            }
        );
    }

    #[test]
    fn genus_two_surface() {
        let t = Pipeline::default()
            .volume_thresholds(d(2), &fixture(), Some(4.0 * PI), None)
            .unwrap();
        assert!((t.simplicial_volume - 4.0).abs() < 1e-10);
        assert!(t.simplicial_volume_derived);
        assert!((t.theorem_threshold - 0.00681544977396166086 * 4.0).abs() < 1e-10);
        assert_relative_eq!(
            t.corollary_threshold.unwrap(),
            t.isoembolic_threshold,
            max_relative = 1e-12
        );
        assert!(Pipeline::default()
            .volume_thresholds(d(2), &fixture(), None, None)
            .is_err());
    }
}

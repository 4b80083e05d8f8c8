//! Serialization of reports and curves.
//!
//! Every float is written with 17 significant digits (`{:.16e}`), which
//! round-trips `f64` exactly and makes the output byte-deterministic.

use std::collections::BTreeMap;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;
use serde_json::value::RawValue;

use crate::constants::{ConstantsReport, ExternalConstants, Pipeline, Provenance, ThresholdReport};
use crate::error::{Error, Result};
use crate::hypgeom::{v_hyp_with, Dim};

/// `x` as a JSON number with 17 significant digits; `null` when not finite.
pub fn num(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
struct FSupJson {
    value: Box<RawValue>,
    arg: Box<RawValue>,
    at_infinity: bool,
}

#[derive(Serialize)]
struct ConstantsJson<'a> {
    dim: usize,
    #[serde(rename = "V_n")]
    v_n: Box<RawValue>,
    f_sup: FSupJson,
    #[serde(rename = "C_n")]
    c_big: Box<RawValue>,
    alpha_n: Box<RawValue>,
    c_n: Box<RawValue>,
    c_prime_n: Box<RawValue>,
    c_triple_prime_n: Box<RawValue>,
    lambda_n: Box<RawValue>,
    lambda_clamped: bool,
    beta_n: Box<RawValue>,
    entropy_threshold_ratio: Box<RawValue>,
    isoembolic_coefficient: Box<RawValue>,
    provenance: &'a BTreeMap<&'static str, Provenance>,
    config_digest: &'a str,
}

/// Pretty-printed JSON for a constants report, keys in schema order.
pub fn constants_json(report: &ConstantsReport, config_digest: &str) -> String {
    let arg = match report.f_sup.arg.point() {
        Some(x) => num(x),
        None => num(f64::NAN),
    };
    let doc = ConstantsJson {
        dim: report.dim.get(),
        v_n: num(report.v_n),
        f_sup: FSupJson {
            value: num(report.f_sup.value),
            arg,
            at_infinity: report.f_sup.arg.is_at_infinity(),
        },
        c_big: num(report.c_big),
        alpha_n: num(report.alpha_n),
        c_n: num(report.c_n.value),
        c_prime_n: num(report.c_prime_n),
        c_triple_prime_n: num(report.c_triple_prime_n),
        lambda_n: num(report.lambda_n),
        lambda_clamped: report.lambda_clamped,
        beta_n: num(report.beta_n),
        entropy_threshold_ratio: num(report.entropy_threshold_ratio),
        isoembolic_coefficient: num(report.isoembolic_coefficient),
        provenance: &report.provenance,
        config_digest,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    text
}

#[derive(Serialize)]
struct ThresholdJson {
    simplicial_volume: Box<RawValue>,
    simplicial_volume_derived: bool,
    theorem_threshold: Box<RawValue>,
    corollary_threshold: Option<Box<RawValue>>,
    isoembolic_threshold: Box<RawValue>,
    entropy_threshold: Option<Box<RawValue>>,
}

pub fn thresholds_json(t: &ThresholdReport) -> String {
    let doc = ThresholdJson {
        simplicial_volume: num(t.simplicial_volume),
        simplicial_volume_derived: t.simplicial_volume_derived,
        theorem_threshold: num(t.theorem_threshold),
        corollary_threshold: t.corollary_threshold.map(num),
        isoembolic_threshold: num(t.isoembolic_threshold),
        entropy_threshold: t.entropy_threshold.map(num),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    text
}

/// Functions available to `curve`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curve {
    /// `f(R) = (4/R) log(2 V(R)/V(R/2))`.
    F,
    /// `g(R) = V(R)/V(R/2) e^{-(n-1)R/2}`.
    G,
    /// `2/((n-1)R) log(V(R)/c‴_n)`.
    LambdaIntegrand,
    VHyp,
}

impl FromStr for Curve {
    type Err = Error;
    fn from_str(s: &str) -> Result<Curve> {
        match s {
            "f" => Ok(Curve::F),
            "g" => Ok(Curve::G),
            "lambda_integrand" => Ok(Curve::LambdaIntegrand),
            "v_hyp" => Ok(Curve::VHyp),
            other => Err(Error::InvalidArgument(format!(
                "unknown curve {other:?}; expected f, g, lambda_integrand or v_hyp"
            ))),
        }
    }
}

/// `samples` geometrically spaced radii from `r_min` to `r_max` inclusive.
pub fn geometric_radii(r_min: f64, r_max: f64, samples: usize) -> Result<Vec<f64>> {
    if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < r_min < r_max, got [{r_min}, {r_max}]"
        )));
    }
    if samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples, got {samples}"
        )));
    }
    let ratio = (r_max / r_min).ln();
    Ok((0..samples)
        .map(|i| {
            if i + 1 == samples {
                r_max
            } else {
                r_min * (ratio * i as f64 / (samples - 1) as f64).exp()
            }
        })
        .collect())
}

/// Samples a curve. The `λ_n` integrand uses `c‴_n = c_n c′_n 2^{-n}` with
/// `c′_n` from `ext`.
pub fn sample_curve(
    curve: Curve,
    dim: Dim,
    radii: &[f64],
    pipeline: &Pipeline,
    ext: &ExternalConstants,
) -> Result<Vec<(f64, f64)>> {
    let c3 = if curve == Curve::LambdaIntegrand {
        let c_prime = ext.croke_cprime(dim)?;
        let c_n = pipeline.compute_c_n(dim)?;
        Some(c_n.value * c_prime * 0.5f64.powi(dim.get() as i32))
    } else {
        None
    };
    radii
        .iter()
        .map(|&r| {
            let value = match curve {
                Curve::F => pipeline.f(dim, r)?,
                Curve::G => pipeline.g(dim, r)?,
                Curve::LambdaIntegrand => {
                    pipeline.lambda_integrand(dim, c3.expect("computed above"), r)?
                }
                Curve::VHyp => v_hyp_with(dim, r, &pipeline.quad)?,
            };
            Ok((r, value))
        })
        .collect()
}

/// RFC 4180 CSV with header `R,value`.
pub fn write_curve_csv<W: Write>(rows: &[(f64, f64)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["R", "value"]).map_err(io)?;
    for &(r, v) in rows {
        w.write_record([fmt_float(r), fmt_float(v)]).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct CurveRow {
    #[serde(rename = "R")]
    r: Box<RawValue>,
    value: Box<RawValue>,
}

pub fn curve_json(rows: &[(f64, f64)]) -> String {
    let doc: Vec<CurveRow> = rows
        .iter()
        .map(|&(r, v)| CurveRow {
            r: num(r),
            value: num(v),
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&doc).expect("curve serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_round_trips() {
        for &x in &[0.1, 1.0 / 3.0, 6.815449773961662e-3, 1e300, -2.5] {
            let s = fmt_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            assert_eq!(num(x).get().parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(f64::INFINITY).get(), "null");
    }

    #[test]
    fn radii_are_geometric_and_inclusive() {
        let r = geometric_radii(0.01, 100.0, 5).unwrap();
        assert_eq!(r.len(), 5);
        assert_eq!(r[0], 0.01);
        assert_eq!(r[4], 100.0);
        assert!((r[2] - 1.0).abs() < 1e-12);
        assert!(geometric_radii(1.0, 1.0, 5).is_err());
        assert!(geometric_radii(0.0, 1.0, 5).is_err());
        assert!(geometric_radii(1.0, 2.0, 1).is_err());
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_curve_csv(&[(1.0, 2.0)], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "R,value\n1.0000000000000000e0,2.0000000000000000e0\n"
        );
    }

    #[test]
    fn curve_names() {
        assert_eq!(
            "lambda_integrand".parse::<Curve>().unwrap(),
            Curve::LambdaIntegrand
        );
        assert!("h".parse::<Curve>().is_err());
    }
}

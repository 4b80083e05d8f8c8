//! Numerical toolkit for macroscopic-ball volume bounds on hyperbolic and
//! Riemannian manifolds.
//!
//! The crate evaluates hyperbolic ball volumes, the smoothing kernel
//! `k(x) = (e^{λ(R − d(x, y))} − 1)₊` and its derivative bound, and the chain
//! of dimensional constants `C_n, α_n, c_n, λ_n, β_n` that feed the volume
//! thresholds. Every quantity is computed with an explicit tolerance and
//! reported with enough digits to round-trip.
//!
//! ```
//! use macroball::hypgeom::{v_hyp, Dim};
//!
//! let v = v_hyp(Dim::new(2)?, 1.0)?;
//! assert!((v - 2.0 * std::f64::consts::PI * (1f64.cosh() - 1.0)).abs() < 1e-12);
//! # Ok::<(), macroball::Error>(())
//! ```
//!
//! Modules:
//!
//! - [`numerics`]: adaptive quadrature and special functions.
//! - [`hypgeom`]: ball volumes and the hyperboloid model.
//! - [`extremal`]: rigorous sup/inf along a ray with a certified tail.
//! - [`kernel`]: the smoothing kernel, its chain of inequalities, TV distance.
//! - [`constants`]: the constant pipeline and volume thresholds.
//! - [`config`], [`report`], [`verify`]: configuration, output and checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod config;
pub mod constants;
pub mod error;
pub mod extremal;
pub mod hypgeom;
pub mod kernel;
pub mod numerics;
pub mod report;
pub mod verify;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    struct Readme;
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/volumes.md")]
    struct Volumes;
    #[doc = include_str!("../../../book/src/quadrature.md")]
    struct Quadrature;
    #[doc = include_str!("../../../book/src/ray-search.md")]
    struct RaySearch;
    #[doc = include_str!("../../../book/src/kernel.md")]
    struct Kernel;
    #[doc = include_str!("../../../book/src/constants.md")]
    struct Constants;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}

//! Exact computation in degenerate and non-degenerate cyclotomic Hecke
//! algebras of type A over finite fields GF(p^k).
//!
//! The crate is organized bottom-up:
//!
//! * [`gf`] — arithmetic in GF(p^k), univariate polynomials, and the
//!   number-theoretic helpers (quantum characteristic, multiplicative
//!   orders, Frobenius periods).
//! * [`hecke`] — the algebra itself: parameters, the normal-word basis
//!   `X^a T_w`, and the straightening engine that rewrites arbitrary
//!   products into that basis.
//! * [`regrep`] — the left regular representation as dense matrices over
//!   GF(p^k), with the exact linear algebra (rank, kernel, minimal
//!   polynomial, generalized-eigenspace projectors) the constructions
//!   consume.
//! * [`idempotents`] — the residue idempotents `e(i)` built three ways
//!   (spectral projectors, interpolation products, closed Frobenius-power
//!   formulas) and cross-validated.
//! * [`periodicity`] — nilpotency exponents and eventual periods of the
//!   Jucys-Murphy elements, brute-forced and compared against the
//!   predicted values.

pub mod gf;
pub mod hecke;
pub mod idempotents;
pub mod periodicity;
pub mod regrep;

use thiserror::Error;

/// Errors surfaced by fallible operations across the crate.
///
/// Bug-class conditions (straightening budget exhaustion, a non-nilpotent
/// `y_r`, a missing power repeat) are also represented here so callers can
/// report them distinctly from configuration mistakes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroExtensionDegree,
    #[error("field order {p}^{k} does not fit the supported range")]
    FieldTooLarge { p: u64, k: usize },
    #[error("cannot invert zero")]
    ZeroInverse,
    #[error("quantum characteristic of zero is undefined")]
    ZeroElement,
    #[error(
        "no element of multiplicative order {e} in GF({p}^{k}): {e} does not divide p^k - 1 = {group_order}; enlarge the extension degree k"
    )]
    NoElementOfOrder {
        e: u64,
        p: u64,
        k: usize,
        group_order: u64,
    },
    #[error("gcd({e}, {p}) must be 1")]
    NotCoprime { e: u64, p: u64 },
    #[error("xgcd of two zero polynomials is undefined")]
    XgcdBothZero,
    #[error("invalid algebra parameters: {0}")]
    InvalidParams(String),
    #[error("{what} index {index} out of range")]
    IndexOutOfRange { index: usize, what: &'static str },
    #[error("dimension {dim} exceeds the size cap {cap}")]
    SizeCapExceeded { dim: u64, cap: u64 },
    #[error("exponent must be at least 1")]
    InvalidExponent,
    #[error("closed formulas require p > 0 and e > 0")]
    ClosedFormulaUnavailable,
    #[error("y_{r} is not nilpotent in the regular representation; this is a bug")]
    NonNilpotent { r: usize },
    #[error("no power repeat within bound {bound} for strand {r}; this is a bug")]
    NoRepeatWithinBound { r: usize, bound: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;

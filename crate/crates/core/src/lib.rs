//! Exact-arithmetic computation of essential monomials, essential monoids and
//! their polyhedral models for semisimple Lie algebras.
//!
//! Everything here is computed over the rationals; no floating point is used
//! anywhere. The main pipeline is: build a root system with a Chevalley basis
//! ([`rootsys`]), fix a birational sequence and a weighted lexicographic order
//! ([`pbw`], [`orders`]), extract essential multi-exponents per weight block
//! through the contravariant form ([`shapovalov`], [`essential`]) and compare
//! the outcome against explicit polyhedral descriptions ([`polytopes`]).

pub mod essential;
pub mod linalg;
pub mod orders;
pub mod pbw;
pub mod polytopes;
pub mod rat;
pub mod rootsys;
pub mod shapovalov;
pub mod verify;

use std::fmt;

/// Library-wide error type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Invalid root-system family/rank combination.
    InvalidRootSystem(String),
    /// A word of simple reflections is not reduced.
    NotReduced(String),
    /// Malformed input (lengths, ranges, parse problems).
    Invalid(String),
    /// An internal consistency check failed; this is a hard error, never
    /// silently accepted.
    Inconsistent(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidRootSystem(s) => write!(f, "invalid root system: {s}"),
            Error::NotReduced(s) => write!(f, "word is not reduced: {s}"),
            Error::Invalid(s) => write!(f, "invalid input: {s}"),
            Error::Inconsistent(s) => write!(f, "internal consistency failure: {s}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

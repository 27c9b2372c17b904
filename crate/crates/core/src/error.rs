//! Error type shared by every module of the engine.
//!
//! All fallible operations return [`Result`]. Exact algebra fails only on
//! structurally invalid input (mismatched weights, unsatisfiable divisions);
//! numerical routines additionally fail when a requested accuracy target is
//! provably out of reach for the given truncation order.

use thiserror::Error;

/// One offending coefficient found while checking the solvability of the
/// holomorphic-derivative primitive equation.
///
/// The primitive equation has no solution when the input carries a nonzero
/// coefficient in the constant-`q` column at the critical power of `L`
/// (`k = -r`), or when a `q`-column recursion fails to terminate; each such
/// failure is reported with its exact location and coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionEntry {
    /// Power of `q`.
    pub m: u32,
    /// Power of `qbar`.
    pub n: u32,
    /// Power of `L` at which the obstruction sits.
    pub k: i64,
    /// Display form of the offending coefficient.
    pub coefficient: String,
    /// Human-readable reason (`constant-column` or `non-terminating`).
    pub reason: &'static str,
}

impl std::fmt::Display for ObstructionEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "(m={}, n={}, k={}): {} [{}]",
            self.m, self.n, self.k, self.coefficient, self.reason
        )
    }
}

/// Error enumeration for the whole engine.
#[derive(Error, Debug, Clone)]
pub enum Error {
    /// Input outside the mathematical domain of an operation
    /// (odd Bernoulli index, Eisenstein weight of the wrong parity, ...).
    #[error("domain error in {op}: {message}")]
    Domain {
        /// Operation that rejected the input.
        op: &'static str,
        /// Why the input is outside the domain.
        message: String,
    },

    /// Binary series operation on incompatible weight pairs.
    #[error("weight mismatch in {op}: left ({},{}) vs right ({},{})", lhs.0, lhs.1, rhs.0, rhs.1)]
    WeightMismatch {
        /// Operation that detected the mismatch.
        op: &'static str,
        /// Weights of the left operand.
        lhs: (i64, i64),
        /// Weights of the right operand.
        rhs: (i64, i64),
    },

    /// The primitive equation is unsolvable; every offending coefficient is listed.
    #[error("primitive obstruction: {} offending coefficient(s): {}", entries.len(),
            entries.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", "))]
    ObstructionViolated {
        /// All obstruction locations, in lexicographic order.
        entries: Vec<ObstructionEntry>,
    },

    /// The requested double-Eisenstein family sits in a weight where cusp
    /// forms exist, so the algebraic construction would need an additional
    /// cusp-form correction that this engine does not provide.
    #[error("cusp correction required: holomorphic weight {holomorphic_weight} admits cusp forms")]
    CuspCorrectionRequired {
        /// The holomorphic weight `2w + 2` of the obstructing space.
        holomorphic_weight: i64,
    },

    /// Invariant pairing requested between forms of different `h`-degree.
    #[error("h-degree mismatch: {hf} vs {hg}")]
    DegreeMismatch {
        /// `h`-degree of the first argument.
        hf: i64,
        /// `h`-degree of the second argument.
        hg: i64,
    },

    /// The Petersson-type integrand fails to decay at the cusp because both
    /// arguments have a nonzero constant part.
    #[error("integrand does not decay at the cusp: both arguments have nonzero constant part")]
    NonDecayingIntegrand,

    /// The truncation-order tail bound exceeds the requested accuracy at the
    /// evaluation point.
    #[error("series tail bound {bound:.3e} exceeds target {target:.3e}; increase the order")]
    TailTooLarge {
        /// Proven bound on the dropped tail.
        bound: f64,
        /// Requested absolute accuracy.
        target: f64,
    },

    /// An internal exactness guarantee failed (for example a division by `L`
    /// that the calling identity promised to be exact left a remainder).
    /// Indicates a bug or an inconsistent input object, never a rounding issue.
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    /// Numeric evaluation hit a formal symbol with no assigned value.
    #[error("symbol '{0}' has no numeric assignment")]
    UnassignedSymbol(String),

    /// Malformed JSON input (syntax or schema).
    #[error("parse error: {0}")]
    Parse(String),
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for a domain error.
    pub fn domain(op: &'static str, message: impl Into<String>) -> Self {
        Error::Domain {
            op,
            message: message.into(),
        }
    }
}

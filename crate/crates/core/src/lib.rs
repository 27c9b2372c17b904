//! raqmod-core: exact and numerical computation engine for the bigraded
//! algebra of real-analytic modular forms.
//!
//! The central objects are formal expansions
//!
//! ```text
//!     f  =  sum_k sum_{m,n >= 0}  a_{m,n}^{(k)} L^k q^m qbar^n
//! ```
//!
//! where `q = exp(2*pi*i*z)`, `qbar` is its complex conjugate, and
//! `L = log|q| = i*pi*(z - zbar) = -2*pi*y` on the upper half-plane. Each
//! form carries a pair of weights `(r, s)` describing its transformation
//! under the modular group; only finitely many powers of `L` occur and the
//! coefficients live in an exact ring generated over the rationals by odd
//! zeta values and tracked named constants.
//!
//! Module map:
//!
//! * [`scalar`] — the exact coefficient ring, Bernoulli numbers, divisor sums;
//! * [`series`] — truncated `(q, qbar, L)` expansions and weighted forms;
//! * [`operators`] — weight-shifting derivations, the bigraded Laplacian,
//!   normalized `z`-derivatives and Rankin–Cohen-type brackets;
//! * [`forms`] — holomorphic Eisenstein series, the modular completion of
//!   weight 2, the discriminant cusp form, the real-analytic Eisenstein
//!   family, Serre-type theta derivations and period cocycle polynomials;
//! * [`primitives`] — exact primitives of the raising operator and the
//!   construction of the double Eisenstein families;
//! * [`equivariant`] — vector-valued (frame) polynomials, the transvectant
//!   projections and the translation between section equations and scalar
//!   systems;
//! * [`lattice`] — graph-indexed lattice sums and direct Eisenstein lattice
//!   sums with deterministic parallel reduction;
//! * [`analysis`] — numeric evaluation, modularity residuals, Petersson-type
//!   pairings and affine fitting;
//! * [`verify`] — the named verification suites shared by the CLI and the
//!   acceptance tests;
//! * [`tolerances`] — every numeric threshold used by the suites, pinned in
//!   one place with its justification.

pub mod analysis;
pub mod equivariant;
pub mod error;
pub mod forms;
pub mod lattice;
pub mod operators;
pub mod primitives;
pub mod scalar;
pub mod series;
pub mod tolerances;
pub mod verify;

pub use error::{Error, Result};

/// Complex double-precision numbers, re-exported so downstream crates can
/// call the numeric entry points without naming the underlying crate.
pub use num::complex::Complex64;

//! Constructors for the concrete forms that generate the algebra.
//!
//! The holomorphic generators are the Eisenstein series
//!
//! ```text
//! G_k = -B_k/(2k) + sum_{n >= 1} sigma_{k-1}(n) q^n        (k even, k >= 2)
//! ```
//!
//! of weights `(k, 0)`, together with the cusp form `Delta` of weight twelve.
//! The weight-two series `G_2` fails modularity; subtracting `1/(4L)` repairs
//! it, giving the completed series `G_2^* = G_2 - 1/(4L)`, and the normalised
//! combination `m = 4 L G_2^* = 4 L G_2 - 1` has weights `(1, -1)` and
//! satisfies `dbar(m) = 1`. The triple `(m, G_4, G_6)` is closed under `del`:
//!
//! ```text
//! del(m)   = -m^2       + (20/3) L^2 G_4
//! del(G_4) = -4 m G_4   + (7/5)  L   G_6
//! del(G_6) = -6 m G_6   + (800/7) L  G_4^2
//! ```
//!
//! which is the classical Ramanujan system in disguise. The Serre derivative
//! `theta(f) = (del(f) + n f m) / (2L)` re-packages `del` so that holomorphic
//! forms of weight `n` map to holomorphic forms of weight `n + 2`.
//!
//! For each even `w > 0` there is a family of real-analytic Eisenstein series
//! `E_{r,s}` (`r + s = w`, `r, s >= 0`) characterised as the unique solution
//! of the differential system
//!
//! ```text
//! del(E_{w,0})  = L G_{w+2},      del(E_{r,s})  = (r+1) E_{r+1,s-1}   (s >= 1)
//! dbar(E_{0,w}) = L conj(G_{w+2}), dbar(E_{r,s}) = (s+1) E_{r-1,s+1}  (r >= 1)
//! ```
//!
//! with eigenvalue property `laplace(E_{r,s}) = -w E_{r,s}`. This module
//! builds them directly from the explicit expansion: with `sigma = sigma_{w+1}`
//! and
//!
//! ```text
//! g^{(k)}(q) = (-1)^k k! sum_{n >= 1} sigma(n) / (2n)^{k+1} q^n,
//! R_{a,b}    = (-1)^a C(w, a) sum_{k = b}^{w} C(a, k - b) g^{(k)} L^{-k},
//! ```
//!
//! the series is `E_{r,s} = E0_{r,s} + R_{r,s} + conj(R_{s,r})`, where the
//! constant part is
//!
//! ```text
//! E0_{r,s} = -B_{w+2}/(2 (w+1) (w+2)) L
//!            + ((-1)^s / 2) (w! / 2^w) C(w, r) zeta(w+1) L^{-w}.
//! ```
//!
//! All expansion coefficients are rational except the single `zeta(w+1)`
//! multiple of `L^{-w}`, which stays exact as a [`PeriodScalar`] symbol. The
//! defining systems above are verified term-by-term in the test suite, which
//! pins every sign and binomial in the expansion.
//!
//! Finally, [`eis_cocycle`] returns the weight-`2k` cocycle polynomials
//!
//! ```text
//! e_{2k}(S) = ((2k-2)!/2) sum_{i=1}^{k-1} B_{2i}/(2i)! B_{2k-2i}/(2k-2i)!
//!             X^{2i-1} Y^{2k-2i-1}
//! e_{2k}(T) = ((2k-2)!/2) (B_{2k}/(2k)!) ((X+Y)^{2k-1} - X^{2k-1}) / Y
//! ```
//!
//! recording the failure of holomorphic Eisenstein series to be invariant
//! under the two generators of the modular group.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::operators::del;
use crate::scalar::{
    bernoulli, binomial, binomial_i64, divisor_sum, factorial, rat, rat_int, PeriodScalar,
    Rational,
};
use crate::series::{BiSeries, RAForm};

// ---------------------------------------------------------------------------
// Holomorphic Eisenstein series and friends
// ---------------------------------------------------------------------------

/// Holomorphic Eisenstein series `G_k = -B_k/(2k) + sum sigma_{k-1}(n) q^n`
/// with weights `(k, 0)`, truncated at `q^order`.
///
/// Requires even `k >= 2`. The result for `k = 2` is a well-defined series
/// but does *not* transform as a modular form (see [`eisenstein_is_modular`]);
/// use [`g2_star`] or [`frak_m`] for the modular completion.
///
/// ```
/// use raqmod_core::forms::eisenstein_g;
/// use raqmod_core::scalar::PeriodScalar;
///
/// let g4 = eisenstein_g(4, 8).unwrap();
/// assert_eq!(g4.weights(), (4, 0));
/// assert_eq!(g4.series().term(0, 0, 0), PeriodScalar::from_frac(1, 240));
/// assert_eq!(g4.series().term(2, 0, 0), PeriodScalar::from_int(9));
/// ```
pub fn eisenstein_g(k: i64, order: u32) -> Result<RAForm> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::domain(
            "eisenstein_g",
            format!("weight must be even and >= 2, got {k}"),
        ));
    }
    let mut series = BiSeries::zero(order);
    let bk = bernoulli(k as u32)?;
    series.add_term(0, 0, 0, PeriodScalar::from_rational(-bk / rat_int(2 * k)));
    for n in 1..=order {
        let sigma = divisor_sum(k as u32 - 1, n)?;
        series.add_term(n, 0, 0, PeriodScalar::from_rational(Rational::from(sigma)));
    }
    RAForm::new(k, 0, series)
}

/// Whether the weight-`k` holomorphic Eisenstein series is actually modular.
///
/// Only `k = 2` fails: `G_2` transforms with an anomaly that the completed
/// series `G_2^* = G_2 - 1/(4L)` cancels. Reporting layers use this to warn
/// when the bare weight-two series is requested.
pub fn eisenstein_is_modular(k: i64) -> bool {
    k != 2
}

/// The completed weight-two Eisenstein series `G_2^* = G_2 - 1/(4L)`,
/// modular of weights `(2, 0)` with a simple pole in the `L`-filtration.
///
/// ```
/// use raqmod_core::forms::g2_star;
/// use raqmod_core::scalar::PeriodScalar;
///
/// let g = g2_star(6);
/// let constants = g.constant_part();
/// assert_eq!(constants[&0], PeriodScalar::from_frac(-1, 24));
/// assert_eq!(constants[&-1], PeriodScalar::from_frac(-1, 4));
/// assert_eq!(g.pole_order(), Some(-1));
/// ```
pub fn g2_star(order: u32) -> RAForm {
    let g2 = eisenstein_g(2, order).expect("weight 2 is even and >= 2");
    let mut series = g2.series().clone();
    series.add_term(0, 0, -1, PeriodScalar::from_frac(-1, 4));
    RAForm::new(2, 0, series).expect("total weight 2 is even")
}

/// The weight `(1, -1)` form `m = 4 L G_2^* = 4 L G_2 - 1`.
///
/// Its constant part is `{L^0 -> -1, L^1 -> -1/6}` and it satisfies
/// `dbar(m) = 1`, so `m` is the canonical witness that `dbar` fails to
/// annihilate the full algebra even though it kills every holomorphic form.
pub fn frak_m(order: u32) -> RAForm {
    let g2 = eisenstein_g(2, order).expect("weight 2 is even and >= 2");
    let mut series = g2.series().mul_l_pow(1).scale_rat(&rat_int(4));
    series.add_term(0, 0, 0, PeriodScalar::from_int(-1));
    RAForm::new(1, -1, series).expect("total weight 0 is even")
}

/// The normalised cusp form of weight twelve,
/// `Delta = ((240 G_4)^3 - (-504 G_6)^2) / 1728 = q - 24 q^2 + 252 q^3 - ...`.
///
/// The expansion coefficients are the Ramanujan tau values; the leading
/// coefficient at `q` is `1`.
pub fn delta_cusp(order: u32) -> RAForm {
    let g4 = eisenstein_g(4, order).expect("weight 4 is even and >= 2");
    let g6 = eisenstein_g(6, order).expect("weight 6 is even and >= 2");
    let e4 = g4.series().scale_rat(&rat_int(240));
    let e6 = g6.series().scale_rat(&rat_int(-504));
    let series = e4.mul(&e4).mul(&e4).sub(&e6.mul(&e6)).scale_rat(&rat(1, 1728));
    RAForm::new(12, 0, series).expect("total weight 12 is even")
}

/// Serre derivative `theta(f) = (del(f) + n f m) / (2L)` of a holomorphic
/// form of weights `(n, 0)`; the result is holomorphic of weights `(n+2, 0)`.
///
/// The numerator is always divisible by `2L` when `f` is holomorphic — the
/// `L`-free parts of `del(f)` and `n f m` cancel exactly — so a failed
/// division signals an internal bug rather than bad input and is reported as
/// [`Error::InternalInconsistency`]. Inputs with `qbar` or `L` terms (or a
/// second weight) are rejected up front as domain errors.
///
/// ```
/// use raqmod_core::forms::{delta_cusp, serre_theta};
///
/// let theta = serre_theta(&delta_cusp(8)).unwrap();
/// assert!(theta.is_zero());
/// assert_eq!(theta.weights(), (14, 0));
/// ```
pub fn serre_theta(f: &RAForm) -> Result<RAForm> {
    let (n, s) = f.weights();
    if s != 0 {
        return Err(Error::domain(
            "serre_theta",
            format!("expected holomorphic weights (n, 0), got ({n}, {s})"),
        ));
    }
    for (&(m, nbar, k), c) in f.series().iter() {
        if (nbar != 0 || k != 0) && !c.is_zero() {
            return Err(Error::domain(
                "serre_theta",
                format!("input must be a plain q-series; found a term q^{m} qbar^{nbar} L^{k}"),
            ));
        }
    }
    let numerator = del(f).add(&f.mul(&frak_m(f.order())).scale_rat(&rat_int(n)))?;
    let mut out = BiSeries::zero(f.order());
    for (&(m, nbar, k), c) in numerator.series().iter() {
        if c.is_zero() {
            continue;
        }
        if k < 1 {
            return Err(Error::InternalInconsistency(format!(
                "Serre-derivative numerator of a weight-({n}, 0) form has an L^{k} term \
                 at q^{m} qbar^{nbar}; division by 2L is not exact"
            )));
        }
        out.add_term(m, nbar, k - 1, c.scale(&rat(1, 2)));
    }
    RAForm::new(n + 2, 0, out)
}

// ---------------------------------------------------------------------------
// Real-analytic Eisenstein series
// ---------------------------------------------------------------------------

/// The family `{E_{r,s} : r + s = w}` of real-analytic Eisenstein series for
/// one even weight `w`, as produced by [`real_eisenstein_family`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EisensteinFamily {
    weight: i64,
    members: BTreeMap<(i64, i64), RAForm>,
}

impl EisensteinFamily {
    /// The common total weight `w = r + s` of the members.
    pub fn weight(&self) -> i64 {
        self.weight
    }

    /// The member of weights `(r, s)`, when `r + s = w` and both are `>= 0`.
    pub fn member(&self, r: i64, s: i64) -> Option<&RAForm> {
        self.members.get(&(r, s))
    }

    /// All members keyed by `(r, s)`, in lexicographic order.
    pub fn members(&self) -> impl Iterator<Item = (&(i64, i64), &RAForm)> {
        self.members.iter()
    }
}

/// Real-analytic Eisenstein series `E_{r,s}` of weights `(r, s)`, truncated
/// at order `order`, built from the explicit expansion described in the
/// module docs.
///
/// Requires `r, s >= 0` with `w = r + s` positive and even. The only
/// non-rational coefficient is the `zeta(w+1)` multiple of `L^{-w}` in the
/// constant part, kept symbolic. The result lies in the filtration
/// `P^{-w}` (no `L`-exponent below `-w`).
///
/// ```
/// use raqmod_core::forms::real_eisenstein;
/// use raqmod_core::scalar::{rat, PeriodScalar};
///
/// let e11 = real_eisenstein(1, 1, 6).unwrap();
/// let constants = e11.constant_part();
/// assert_eq!(constants[&1], PeriodScalar::from_frac(1, 720));
/// let minus_half_zeta3 = PeriodScalar::zeta(3).unwrap().scale(&rat(-1, 2));
/// assert_eq!(constants[&-2], minus_half_zeta3);
/// ```
pub fn real_eisenstein(r: i64, s: i64, order: u32) -> Result<RAForm> {
    if r < 0 || s < 0 {
        return Err(Error::domain(
            "real_eisenstein",
            format!("indices must be non-negative, got ({r}, {s})"),
        ));
    }
    let w = r + s;
    if w <= 0 || w % 2 != 0 {
        return Err(Error::domain(
            "real_eisenstein",
            format!("total weight must be positive and even, got {w}"),
        ));
    }

    let mut series = BiSeries::zero(order);

    // Constant part: -B_{w+2}/(2 (w+1)(w+2)) L + ((-1)^s/2)(w!/2^w) C(w,r) zeta(w+1) L^{-w}.
    let b = bernoulli(w as u32 + 2)?;
    series.add_term(
        0,
        0,
        1,
        PeriodScalar::from_rational(-b / rat_int(2 * (w + 1) * (w + 2))),
    );
    let mut zeta_coeff = Rational::from(factorial(w as u64))
        / Rational::from(BigInt::from(2).pow(w as u32))
        * Rational::from(binomial(w as u64, r as u64))
        / rat_int(2);
    if s % 2 == 1 {
        zeta_coeff = -zeta_coeff;
    }
    series.add_term(
        0,
        0,
        -w,
        PeriodScalar::zeta(w as u32 + 1)?.scale(&zeta_coeff),
    );

    // sigma_{w+1}(n) for n = 1..order, shared by both expansion halves.
    let mut sigma = Vec::with_capacity(order as usize);
    for n in 1..=order {
        sigma.push(Rational::from(divisor_sum(w as u32 + 1, n)?));
    }

    add_r_expansion(&mut series, r, s, w, &sigma, false);
    add_r_expansion(&mut series, s, r, w, &sigma, true);

    RAForm::new(r, s, series)
}

/// Adds `R_{a,b}` (or its conjugate, which swaps `q` and `qbar` and keeps the
/// rational coefficients) to `series`:
/// `R_{a,b} = (-1)^a C(w,a) sum_{k=b}^{w} C(a, k-b) g^{(k)} L^{-k}` with
/// `g^{(k)} = (-1)^k k! sum_n sigma(n)/(2n)^{k+1} q^n`.
fn add_r_expansion(
    series: &mut BiSeries,
    a: i64,
    b: i64,
    w: i64,
    sigma: &[Rational],
    conjugated: bool,
) {
    for k in b..=w {
        let choose = binomial_i64(a, k - b);
        if choose.is_zero() {
            continue;
        }
        let mut prefactor = Rational::from(binomial(w as u64, a as u64))
            * choose
            * Rational::from(factorial(k as u64));
        if (a + k) % 2 == 1 {
            prefactor = -prefactor;
        }
        for (idx, sig) in sigma.iter().enumerate() {
            let n = idx as u32 + 1;
            let denom = Rational::from(BigInt::from(2 * n).pow(k as u32 + 1));
            let coeff = PeriodScalar::from_rational(prefactor.clone() * sig / denom);
            if conjugated {
                series.add_term(0, n, -k, coeff);
            } else {
                series.add_term(n, 0, -k, coeff);
            }
        }
    }
}

/// Builds the whole family `{E_{r,s} : r + s = w, r, s >= 0}` for an even
/// weight `w > 0`.
pub fn real_eisenstein_family(w: i64, order: u32) -> Result<EisensteinFamily> {
    if w <= 0 || w % 2 != 0 {
        return Err(Error::domain(
            "real_eisenstein_family",
            format!("total weight must be positive and even, got {w}"),
        ));
    }
    let mut members = BTreeMap::new();
    for r in 0..=w {
        members.insert((r, w - r), real_eisenstein(r, w - r, order)?);
    }
    Ok(EisensteinFamily { weight: w, members })
}

// ---------------------------------------------------------------------------
// Eisenstein cocycle polynomials
// ---------------------------------------------------------------------------

/// The two generators of the modular group for which cocycle polynomials are
/// tabulated: `S : z -> -1/z` and `T : z -> z + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CocycleGamma {
    /// The inversion `z -> -1/z`.
    S,
    /// The translation `z -> z + 1`.
    T,
}

impl fmt::Display for CocycleGamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CocycleGamma::S => write!(f, "S"),
            CocycleGamma::T => write!(f, "T"),
        }
    }
}

/// A homogeneous polynomial in `X, Y` of degree `2k - 2` with rational
/// coefficients: the weight-`2k` Eisenstein cocycle evaluated at one group
/// generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CocyclePoly {
    weight: i64,
    gamma: CocycleGamma,
    coeffs: BTreeMap<(u32, u32), Rational>,
}

impl CocyclePoly {
    /// The weight `2k` of the underlying Eisenstein series.
    pub fn weight(&self) -> i64 {
        self.weight
    }

    /// The group generator this polynomial is attached to.
    pub fn gamma(&self) -> CocycleGamma {
        self.gamma
    }

    /// The homogeneous degree `2k - 2`.
    pub fn degree(&self) -> u32 {
        (self.weight - 2) as u32
    }

    /// Coefficient of `X^i Y^j` (zero when absent).
    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.coeffs.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    /// All nonzero coefficients keyed by `(i, j)` exponents of `X^i Y^j`,
    /// in lexicographic order.
    pub fn coeffs(&self) -> impl Iterator<Item = (&(u32, u32), &Rational)> {
        self.coeffs.iter()
    }
}

impl fmt::Display for CocyclePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), c) in &self.coeffs {
            if first {
                first = false;
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let abs = c.abs();
            write!(f, "{abs}")?;
            if i > 0 {
                write!(f, "*X^{i}")?;
            }
            if j > 0 {
                write!(f, "*Y^{j}")?;
            }
        }
        Ok(())
    }
}

/// Cocycle polynomial of the weight-`2k` Eisenstein series at the generator
/// `gamma`, for `k >= 2`:
///
/// ```text
/// e_{2k}(S) = ((2k-2)!/2) sum_{i=1}^{k-1} (B_{2i}/(2i)!) (B_{2k-2i}/(2k-2i)!)
///             X^{2i-1} Y^{2k-2i-1}
/// e_{2k}(T) = ((2k-2)!/2) (B_{2k}/(2k)!) ((X+Y)^{2k-1} - X^{2k-1}) / Y
/// ```
///
/// The division by `Y` in the `T` case is exact (every monomial of the
/// numerator contains `Y`), so both results are genuine polynomials,
/// homogeneous of degree `2k - 2`. At `S` only odd-odd monomials
/// `X^{odd} Y^{odd}` occur.
///
/// ```
/// use raqmod_core::forms::{eis_cocycle, CocycleGamma};
/// use raqmod_core::scalar::rat;
///
/// let s = eis_cocycle(2, CocycleGamma::S).unwrap();
/// assert_eq!(s.coeff(1, 1), rat(1, 144));
/// let t = eis_cocycle(2, CocycleGamma::T).unwrap();
/// assert_eq!(t.coeff(2, 0), rat(-1, 240));
/// ```
pub fn eis_cocycle(k: i64, gamma: CocycleGamma) -> Result<CocyclePoly> {
    if k < 2 {
        return Err(Error::domain(
            "eis_cocycle",
            format!("need k >= 2 (weight 2k >= 4), got k = {k}"),
        ));
    }
    let two_k = 2 * k;
    let half_factorial = Rational::from(factorial(two_k as u64 - 2)) / rat_int(2);
    let mut coeffs = BTreeMap::new();
    match gamma {
        CocycleGamma::S => {
            for i in 1..=(k - 1) {
                let left = bernoulli(2 * i as u32)? / Rational::from(factorial(2 * i as u64));
                let right = bernoulli((two_k - 2 * i) as u32)?
                    / Rational::from(factorial((two_k - 2 * i) as u64));
                let c = half_factorial.clone() * left * right;
                if !c.is_zero() {
                    coeffs.insert(((2 * i - 1) as u32, (two_k - 2 * i - 1) as u32), c);
                }
            }
        }
        CocycleGamma::T => {
            let prefactor = half_factorial * bernoulli(two_k as u32)?
                / Rational::from(factorial(two_k as u64));
            // ((X+Y)^{2k-1} - X^{2k-1}) / Y = sum_{j=1}^{2k-1} C(2k-1, j) X^{2k-1-j} Y^{j-1}.
            for j in 1..=(two_k - 1) {
                let c = prefactor.clone()
                    * Rational::from(binomial(two_k as u64 - 1, j as u64));
                if !c.is_zero() {
                    coeffs.insert(((two_k - 1 - j) as u32, (j - 1) as u32), c);
                }
            }
        }
    }
    Ok(CocyclePoly {
        weight: two_k,
        gamma,
        coeffs,
    })
}

//! Truncated expansions in `q`, `qbar` and `L`, and weighted forms.
//!
//! A [`BiSeries`] stores finitely many terms `a_{m,n}^{(k)} L^k q^m qbar^n`
//! with `0 <= m, n <= N` for a truncation order `N`; it is trusted modulo
//! `q^{N+1}` and modulo `qbar^{N+1}`. Powers of `L` (where
//! `L = log|q| = i*pi*(z - zbar)`, real and negative on the upper
//! half-plane) may be negative; only finitely many occur.
//!
//! An [`RAForm`] attaches a pair of integer weights `(r, s)` to a series.
//! Weights are metadata: they steer the weight-dependent operators and are
//! checked for compatibility by binary operations, but modularity itself is
//! a semantic property verified numerically by the analysis module. This is
//! deliberate — the primitive solver constructs non-modular intermediate
//! objects on purpose.
//!
//! All coefficients are [`PeriodScalar`]s, which are real by construction,
//! so complex conjugation acts by swapping `q` and `qbar` exponents (and the
//! weights) while fixing `L`.

use crate::error::{Error, Result};
use crate::scalar::{rat_int, PeriodScalar, Rational};
use std::collections::BTreeMap;
use std::fmt;

/// Exponent triple `(m, n, k)`: powers of `q`, `qbar`, `L`.
pub type TermKey = (u32, u32, i64);

/// Sparse truncated expansion in `q`, `qbar`, `L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiSeries {
    order: u32,
    terms: BTreeMap<TermKey, PeriodScalar>,
}

impl BiSeries {
    /// The zero series of the given truncation order.
    pub fn zero(order: u32) -> Self {
        BiSeries {
            order,
            terms: BTreeMap::new(),
        }
    }

    /// The constant series `1`.
    pub fn one(order: u32) -> Self {
        let mut s = BiSeries::zero(order);
        s.add_term(0, 0, 0, PeriodScalar::one());
        s
    }

    /// A single monomial `c * L^k q^m qbar^n`.
    pub fn monomial(order: u32, m: u32, n: u32, k: i64, c: PeriodScalar) -> Self {
        let mut s = BiSeries::zero(order);
        s.add_term(m, n, k, c);
        s
    }

    /// Truncation order `N`.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Number of stored (nonzero) terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// True iff no nonzero term is stored.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add `c * L^k q^m qbar^n` into the series. Terms beyond the truncation
    /// order are dropped: the series is only trusted modulo `q^{N+1}`,
    /// `qbar^{N+1}`, so such terms carry no information.
    pub fn add_term(&mut self, m: u32, n: u32, k: i64, c: PeriodScalar) {
        if c.is_zero() || m > self.order || n > self.order {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((m, n, k)) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().add(&c);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Coefficient at `(m, n, k)` (zero when absent).
    pub fn term(&self, m: u32, n: u32, k: i64) -> PeriodScalar {
        self.terms
            .get(&(m, n, k))
            .cloned()
            .unwrap_or_else(PeriodScalar::zero)
    }

    /// Iterate over stored terms in lexicographic `(m, n, k)` order.
    pub fn iter(&self) -> impl Iterator<Item = (&TermKey, &PeriodScalar)> {
        self.terms.iter()
    }

    /// Restrict to a (possibly lower) truncation order.
    pub fn truncated(&self, order: u32) -> BiSeries {
        let mut out = BiSeries::zero(order.min(self.order));
        for (&(m, n, k), c) in &self.terms {
            out.add_term(m, n, k, c.clone());
        }
        out
    }

    /// Coefficientwise sum; the result carries the minimum order.
    pub fn add(&self, other: &BiSeries) -> BiSeries {
        let order = self.order.min(other.order);
        let mut out = self.truncated(order);
        for (&(m, n, k), c) in &other.terms {
            out.add_term(m, n, k, c.clone());
        }
        out
    }

    /// Coefficientwise difference.
    pub fn sub(&self, other: &BiSeries) -> BiSeries {
        self.add(&other.neg())
    }

    /// Negation.
    pub fn neg(&self) -> BiSeries {
        BiSeries {
            order: self.order,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, c.neg()))
                .collect(),
        }
    }

    /// Multiply every coefficient by an exact scalar.
    pub fn scale(&self, by: &PeriodScalar) -> BiSeries {
        if by.is_zero() {
            return BiSeries::zero(self.order);
        }
        let mut out = BiSeries::zero(self.order);
        for (&(m, n, k), c) in &self.terms {
            out.add_term(m, n, k, c.mul(by));
        }
        out
    }

    /// Multiply every coefficient by a rational.
    pub fn scale_rat(&self, by: &Rational) -> BiSeries {
        self.scale(&PeriodScalar::from_rational(by.clone()))
    }

    /// Cauchy product, truncated to the minimum order; `L`-exponents add.
    pub fn mul(&self, other: &BiSeries) -> BiSeries {
        let order = self.order.min(other.order);
        let mut out = BiSeries::zero(order);
        for (&(m1, n1, k1), c1) in &self.terms {
            if m1 > order || n1 > order {
                continue;
            }
            for (&(m2, n2, k2), c2) in &other.terms {
                let m = m1 + m2;
                let n = n1 + n2;
                if m > order || n > order {
                    continue;
                }
                out.add_term(m, n, k1 + k2, c1.mul(c2));
            }
        }
        out
    }

    /// Multiply by `L^j` (shift every `L`-exponent by `j`).
    pub fn mul_l_pow(&self, j: i64) -> BiSeries {
        BiSeries {
            order: self.order,
            terms: self
                .terms
                .iter()
                .map(|(&(m, n, k), c)| ((m, n, k + j), c.clone()))
                .collect(),
        }
    }

    /// Swap `q` and `qbar` exponents (complex conjugation on real-coefficient
    /// expansions; `L` is fixed).
    pub fn conjugate(&self) -> BiSeries {
        let mut out = BiSeries::zero(self.order);
        for (&(m, n, k), c) in &self.terms {
            out.add_term(n, m, k, c.clone());
        }
        out
    }

    /// Minimum `L`-exponent with a nonzero coefficient; `None` for the zero
    /// series (which lies in every pole filtration step).
    pub fn pole_order(&self) -> Option<i64> {
        self.terms.keys().map(|&(_, _, k)| k).min()
    }

    /// True iff every stored `L`-exponent is `>= p`.
    pub fn in_filtration(&self, p: i64) -> bool {
        match self.pole_order() {
            None => true,
            Some(k) => k >= p,
        }
    }

    /// The constant part: the map `k -> a_{0,0}^{(k)}` of coefficients of
    /// `L^k` in the `(q, qbar)`-constant column.
    pub fn constant_part(&self) -> BTreeMap<i64, PeriodScalar> {
        self.terms
            .iter()
            .filter(|(&(m, n, _), _)| m == 0 && n == 0)
            .map(|(&(_, _, k), c)| (k, c.clone()))
            .collect()
    }

    /// Drop the `(m, n) = (0, 0)` column.
    pub fn without_constant_part(&self) -> BiSeries {
        let mut out = BiSeries::zero(self.order);
        for (&(m, n, k), c) in &self.terms {
            if m != 0 || n != 0 {
                out.add_term(m, n, k, c.clone());
            }
        }
        out
    }

    /// Apply a termwise map `(m, n, k, coeff) -> contributions`, used by the
    /// differential operators. Each input term may emit several output terms.
    pub fn map_terms<F>(&self, mut f: F) -> BiSeries
    where
        F: FnMut(u32, u32, i64, &PeriodScalar, &mut BiSeries),
    {
        let mut out = BiSeries::zero(self.order);
        for (&(m, n, k), c) in &self.terms {
            f(m, n, k, c, &mut out);
        }
        out
    }

    /// Substitute a value for a named symbol in every coefficient.
    pub fn substitute_symbol(&self, symbol: &str, value: &PeriodScalar) -> BiSeries {
        let mut out = BiSeries::zero(self.order);
        for (&(m, n, k), c) in &self.terms {
            out.add_term(m, n, k, c.substitute(symbol, value));
        }
        out
    }

    /// All named symbols appearing in any coefficient, sorted.
    pub fn symbols(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in self.terms.values() {
            for s in c.symbols() {
                if !out.contains(&s) {
                    out.push(s);
                }
            }
        }
        out.sort();
        out
    }

    /// True iff every coefficient is rational (no zeta values, no symbols).
    pub fn is_rational(&self) -> bool {
        self.terms.values().all(|c| c.as_rational().is_some())
    }
}

impl fmt::Display for BiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(m, n, k), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            if k != 0 {
                write!(f, "*L^{k}")?;
            }
            if m != 0 {
                write!(f, "*q^{m}")?;
            }
            if n != 0 {
                write!(f, "*qbar^{n}")?;
            }
        }
        Ok(())
    }
}

/// A truncated expansion together with its modular weights `(r, s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RAForm {
    r: i64,
    s: i64,
    series: BiSeries,
}

impl RAForm {
    /// Attach weights to a series. Weights of opposite parity are rejected:
    /// every form whose weights sum to an odd integer vanishes identically,
    /// so such a request is always a caller bug.
    pub fn new(r: i64, s: i64, series: BiSeries) -> Result<Self> {
        if (r + s).rem_euclid(2) != 0 {
            return Err(Error::domain(
                "RAForm::new",
                format!("weights ({r},{s}) have odd sum; such forms vanish identically"),
            ));
        }
        Ok(RAForm { r, s, series })
    }

    /// The zero form of given weights and order.
    pub fn zero(r: i64, s: i64, order: u32) -> Result<Self> {
        RAForm::new(r, s, BiSeries::zero(order))
    }

    /// The constant form `1` of weights `(0,0)`.
    pub fn one(order: u32) -> Self {
        RAForm::new(0, 0, BiSeries::one(order)).unwrap()
    }

    /// The form `L` of weights `(-1,-1)`.
    pub fn l_form(order: u32) -> Self {
        RAForm::new(-1, -1, BiSeries::one(order).mul_l_pow(1)).unwrap()
    }

    /// Weight pair `(r, s)`.
    pub fn weights(&self) -> (i64, i64) {
        (self.r, self.s)
    }

    /// Total weight `w = r + s`.
    pub fn total_weight(&self) -> i64 {
        self.r + self.s
    }

    /// `h`-degree `r - s`.
    pub fn h_degree(&self) -> i64 {
        self.r - self.s
    }

    /// Underlying series.
    pub fn series(&self) -> &BiSeries {
        &self.series
    }

    /// Truncation order.
    pub fn order(&self) -> u32 {
        self.series.order()
    }

    /// Replace the underlying series, keeping the weights.
    pub fn with_series(&self, series: BiSeries) -> RAForm {
        RAForm {
            r: self.r,
            s: self.s,
            series,
        }
    }

    /// Restrict to a (possibly lower) truncation order.
    pub fn truncated(&self, order: u32) -> RAForm {
        self.with_series(self.series.truncated(order))
    }

    /// Sum; requires equal weights.
    pub fn add(&self, other: &RAForm) -> Result<RAForm> {
        if (self.r, self.s) != (other.r, other.s) {
            return Err(Error::WeightMismatch {
                op: "add",
                lhs: (self.r, self.s),
                rhs: (other.r, other.s),
            });
        }
        Ok(self.with_series(self.series.add(&other.series)))
    }

    /// Difference; requires equal weights.
    pub fn sub(&self, other: &RAForm) -> Result<RAForm> {
        self.add(&other.neg())
    }

    /// Negation.
    pub fn neg(&self) -> RAForm {
        self.with_series(self.series.neg())
    }

    /// Product; weights add componentwise.
    pub fn mul(&self, other: &RAForm) -> RAForm {
        RAForm {
            r: self.r + other.r,
            s: self.s + other.s,
            series: self.series.mul(&other.series),
        }
    }

    /// Multiply by an exact scalar (weights unchanged).
    pub fn scale(&self, by: &PeriodScalar) -> RAForm {
        self.with_series(self.series.scale(by))
    }

    /// Multiply by a rational (weights unchanged).
    pub fn scale_rat(&self, by: &Rational) -> RAForm {
        self.with_series(self.series.scale_rat(by))
    }

    /// Multiply by an integer (weights unchanged).
    pub fn scale_int(&self, by: i64) -> RAForm {
        self.scale_rat(&rat_int(by))
    }

    /// Multiply by `L^j`; weights become `(r - j, s - j)` since `L` itself
    /// has weights `(-1, -1)`.
    pub fn l_shift(&self, j: i64) -> RAForm {
        RAForm {
            r: self.r - j,
            s: self.s - j,
            series: self.series.mul_l_pow(j),
        }
    }

    /// Complex conjugation: swaps `q`/`qbar` exponents and the weights.
    pub fn conjugate(&self) -> RAForm {
        RAForm {
            r: self.s,
            s: self.r,
            series: self.series.conjugate(),
        }
    }

    /// Constant part `k -> a_{0,0}^{(k)}`.
    pub fn constant_part(&self) -> BTreeMap<i64, PeriodScalar> {
        self.series.constant_part()
    }

    /// Minimum `L`-exponent (`None` for the zero form).
    pub fn pole_order(&self) -> Option<i64> {
        self.series.pole_order()
    }

    /// True iff the form lies in the pole filtration step `p` (all
    /// `L`-exponents `>= p`).
    pub fn in_filtration(&self, p: i64) -> bool {
        self.series.in_filtration(p)
    }

    /// True iff the underlying series is zero.
    pub fn is_zero(&self) -> bool {
        self.series.is_zero()
    }

    /// Substitute a value for a named symbol in every coefficient.
    pub fn substitute_symbol(&self, symbol: &str, value: &PeriodScalar) -> RAForm {
        self.with_series(self.series.substitute_symbol(symbol, value))
    }
}

impl fmt::Display for RAForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[({},{})] {}", self.r, self.s, self.series)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn q_term(order: u32) -> BiSeries {
        BiSeries::monomial(order, 1, 0, 0, PeriodScalar::one())
    }

    #[test]
    fn add_and_cancel() {
        let lq = q_term(8).mul_l_pow(1);
        let sum = lq.add(&lq.neg());
        assert!(sum.is_zero());
        let f = RAForm::new(2, 0, q_term(8)).unwrap();
        let zero = RAForm::zero(2, 0, 8).unwrap();
        assert_eq!(f.add(&zero).unwrap(), f);
    }

    #[test]
    fn weight_mismatch_is_rejected() {
        let f = RAForm::new(2, 0, q_term(8)).unwrap();
        let g = RAForm::new(4, 0, q_term(8)).unwrap();
        assert!(matches!(
            f.add(&g),
            Err(Error::WeightMismatch { op: "add", .. })
        ));
    }

    #[test]
    fn odd_weight_sum_is_rejected() {
        assert!(RAForm::new(1, 0, BiSeries::zero(4)).is_err());
        assert!(RAForm::new(1, -1, BiSeries::zero(4)).is_ok());
    }

    #[test]
    fn l_times_l_inverse_is_one() {
        let l = RAForm::l_form(6);
        // Weights are metadata: declare L^{-1} with the same labels as L and
        // the product is the constant series 1 carrying weights (-2,-2).
        let linv = RAForm::new(-1, -1, BiSeries::one(6).mul_l_pow(-1)).unwrap();
        let prod = l.mul(&linv);
        assert_eq!(prod.weights(), (-2, -2));
        assert_eq!(prod.series(), &BiSeries::one(6));
        // The weight-true inverse lives at (1,1) via the L-shift.
        assert_eq!(l.l_shift(-2).weights(), (1, 1));
    }

    #[test]
    fn l_shift_round_trip_and_weights() {
        let f = RAForm::new(4, 0, q_term(8)).unwrap();
        let shifted = f.l_shift(3).l_shift(-3);
        assert_eq!(shifted, f);
        assert_eq!(f.l_shift(1).weights(), (3, -1));
        assert_eq!(RAForm::one(5).l_shift(1).weights(), (-1, -1));
    }

    #[test]
    fn product_truncates_to_min_order() {
        let f = BiSeries::monomial(10, 3, 0, 0, PeriodScalar::one());
        let g = BiSeries::monomial(4, 2, 0, 0, PeriodScalar::one());
        let fg = f.mul(&g);
        assert_eq!(fg.order(), 4);
        // 3 + 2 = 5 > 4 is dropped entirely.
        assert!(fg.is_zero());
    }

    #[test]
    fn pole_order_and_filtration() {
        let mut s = BiSeries::zero(6);
        s.add_term(0, 0, -1, PeriodScalar::from_frac(1, 4));
        s.add_term(1, 0, 0, PeriodScalar::one());
        assert_eq!(s.pole_order(), Some(-1));
        assert!(s.in_filtration(-1));
        assert!(!s.in_filtration(0));
        assert!(BiSeries::zero(6).in_filtration(1_000));
        assert_eq!(BiSeries::zero(6).pole_order(), None);
    }

    #[test]
    fn constant_part_picks_the_constant_column() {
        let mut s = BiSeries::zero(6);
        s.add_term(0, 0, 2, PeriodScalar::from_int(7));
        s.add_term(0, 0, -1, PeriodScalar::from_frac(-1, 4));
        s.add_term(1, 1, 0, PeriodScalar::one());
        let cp = s.constant_part();
        assert_eq!(cp.len(), 2);
        assert_eq!(cp[&2], PeriodScalar::from_int(7));
        assert_eq!(cp[&-1], PeriodScalar::from_frac(-1, 4));
        // q*qbar alone has empty constant part.
        let qq = BiSeries::monomial(6, 1, 1, 0, PeriodScalar::one());
        assert!(qq.constant_part().is_empty());
    }

    #[test]
    fn conjugate_swaps_exponents_and_weights() {
        let mut s = BiSeries::zero(6);
        s.add_term(2, 1, -3, PeriodScalar::from_frac(5, 3));
        let f = RAForm::new(4, 2, s).unwrap();
        let fc = f.conjugate();
        assert_eq!(fc.weights(), (2, 4));
        assert_eq!(fc.series().term(1, 2, -3), PeriodScalar::from_frac(5, 3));
        assert_eq!(fc.conjugate(), f);
        // L is fixed by conjugation.
        let l = RAForm::l_form(6);
        assert_eq!(l.conjugate(), l);
    }

    #[test]
    fn pole_order_of_product_adds() {
        let mut a = BiSeries::zero(5);
        a.add_term(1, 0, -2, PeriodScalar::one());
        a.add_term(0, 1, 3, PeriodScalar::from_int(2));
        let mut b = BiSeries::zero(5);
        b.add_term(1, 1, -1, PeriodScalar::from_frac(1, 3));
        let ab = a.mul(&b);
        let pa = a.pole_order().unwrap();
        let pb = b.pole_order().unwrap();
        assert!(ab.pole_order().unwrap() >= pa + pb);
    }

    #[test]
    fn multiplication_matches_hand_convolution() {
        // (1 + q)(1 + qbar) = 1 + q + qbar + q*qbar
        let mut a = BiSeries::one(3);
        a.add_term(1, 0, 0, PeriodScalar::one());
        let mut b = BiSeries::one(3);
        b.add_term(0, 1, 0, PeriodScalar::one());
        let ab = a.mul(&b);
        assert_eq!(ab.term(0, 0, 0), PeriodScalar::one());
        assert_eq!(ab.term(1, 0, 0), PeriodScalar::one());
        assert_eq!(ab.term(0, 1, 0), PeriodScalar::one());
        assert_eq!(ab.term(1, 1, 0), PeriodScalar::one());
        assert_eq!(ab.term_count(), 4);
    }

    #[test]
    fn scale_by_rational() {
        let s = q_term(4).scale_rat(&rat(3, 7));
        assert_eq!(s.term(1, 0, 0), PeriodScalar::from_frac(3, 7));
    }
}

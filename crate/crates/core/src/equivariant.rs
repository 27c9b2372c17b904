//! Homogeneous two-variable polynomials with series coefficients, in two
//! frames, and the equivariant projector `delta^k` between them.
//!
//! A vector-valued section of degree `2n` is a homogeneous polynomial of
//! degree `2n` in two variables. It can be written in the *XY frame*, with
//! monomials `X^i Y^j`, or in the *modular frame*, with monomials
//! `u^r v^s` built from `u = X - zY` and `v = X - zbar Y`. The two frames
//! are related by the invertible substitution
//!
//! ```text
//! u = X - z Y,   v = X - zbar Y,
//! X = (z v - zbar u) / (z - zbar),   Y = (v - u) / (z - zbar).
//! ```
//!
//! Coefficients live in [`ZPoly`]: polynomials in the formal variables `z`
//! and `zbar` whose coefficients are [`BiSeries`]. Denominators never appear:
//! every power of `(z - zbar)` is *folded* through the identity
//! `z - zbar = L / (i pi)` into an `L`-shift of the series plus one global
//! integer counter [`FramePoly::ipi_power`] recording the net power of
//! `(i pi)` carried by the object. Frame changes place results in a canonical
//! form — no common polynomial factor of `(z - zbar)` remains, everything
//! folded — which makes round trips syntactic identities and lets different
//! computation paths be compared with `==`. The tag must be zero before
//! coefficients are compared against plain series data.
//!
//! The projector is
//!
//! ```text
//! delta^k(P (x) Q) = mult . (d_X (x) d_Y - d_Y (x) d_X)^k (P (x) Q)
//!                  = sum_j (-1)^j C(k,j) (d_X^{k-j} d_Y^j P) (d_X^j d_Y^{k-j} Q),
//! ```
//!
//! of degree `2m + 2n - 2k` on inputs of degrees `2m`, `2n` (zero as soon as
//! `k` exceeds either degree), optionally normalised by `1/(k!)^2`. In the
//! modular frame the same operator factors as
//!
//! ```text
//! d_X (x) d_Y - d_Y (x) d_X = (z - zbar) (d_u (x) d_v - d_v (x) d_u),
//! ```
//!
//! so `delta^k` can be evaluated purely in `u, v` arithmetic with a folded
//! `(z - zbar)^k` prefactor — no `z`-dependence ever enters when the inputs
//! are `z`-free. Both evaluation paths agree exactly, and on
//! `u^{2m} (x) A` they reduce to the closed form
//!
//! ```text
//! (delta^k / (k!)^2) (u^{2m} (x) A)_{r,s}
//!     = (z - zbar)^k C(2m,k) C(s+k,k) A_{r-2m+k, s+k},
//! ```
//!
//! which is how scalar differential systems for Eisenstein families arise
//! from a single holomorphic section.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{binomial_i64, factorial, rat_int, Rational};
use crate::series::{BiSeries, RAForm};

// ---------------------------------------------------------------------------
// Polynomials in formal z, zbar over series
// ---------------------------------------------------------------------------

/// A polynomial in the formal variables `z` and `zbar` with [`BiSeries`]
/// coefficients, keyed by `(z-exponent, zbar-exponent)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZPoly {
    order: u32,
    terms: BTreeMap<(u32, u32), BiSeries>,
}

impl ZPoly {
    /// The zero polynomial at truncation order `order`.
    pub fn zero(order: u32) -> Self {
        ZPoly {
            order,
            terms: BTreeMap::new(),
        }
    }

    /// The `z`-free polynomial consisting of one series.
    pub fn from_series(series: &BiSeries) -> Self {
        ZPoly::monomial(series.order(), 0, 0, series.clone())
    }

    /// The single term `series * z^i zbar^j`.
    pub fn monomial(order: u32, i: u32, j: u32, series: BiSeries) -> Self {
        let mut poly = ZPoly::zero(order);
        poly.add_term(i, j, series);
        poly
    }

    /// Truncation order shared by all coefficient series.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Whether no nonzero term remains.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `series * z^i zbar^j`, dropping the slot if it cancels.
    pub fn add_term(&mut self, i: u32, j: u32, series: BiSeries) {
        if series.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry((i, j))
            .or_insert_with(|| BiSeries::zero(self.order));
        *entry = entry.add(&series);
        if entry.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    /// The coefficient series of `z^i zbar^j` (zero when absent).
    pub fn coefficient(&self, i: u32, j: u32) -> BiSeries {
        self.terms
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| BiSeries::zero(self.order))
    }

    /// Iterates over nonzero terms in lexicographic `(i, j)` order.
    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BiSeries)> {
        self.terms.iter()
    }

    /// Sum of two polynomials (orders are truncated to the minimum).
    pub fn add(&self, other: &ZPoly) -> ZPoly {
        let order = self.order.min(other.order);
        let mut out = ZPoly::zero(order);
        for (&(i, j), s) in &self.terms {
            out.add_term(i, j, s.truncated(order));
        }
        for (&(i, j), s) in &other.terms {
            out.add_term(i, j, s.truncated(order));
        }
        out
    }

    /// Difference of two polynomials.
    pub fn sub(&self, other: &ZPoly) -> ZPoly {
        self.add(&other.neg())
    }

    /// Negation.
    pub fn neg(&self) -> ZPoly {
        ZPoly {
            order: self.order,
            terms: self
                .terms
                .iter()
                .map(|(&key, s)| (key, s.neg()))
                .collect(),
        }
    }

    /// Product of two polynomials.
    pub fn mul(&self, other: &ZPoly) -> ZPoly {
        let order = self.order.min(other.order);
        let mut out = ZPoly::zero(order);
        for (&(i1, j1), s1) in &self.terms {
            for (&(i2, j2), s2) in &other.terms {
                out.add_term(i1 + i2, j1 + j2, s1.mul(s2));
            }
        }
        out
    }

    /// Scales every coefficient by a rational number.
    pub fn scale_rat(&self, by: &Rational) -> ZPoly {
        let mut out = ZPoly::zero(self.order);
        for (&(i, j), s) in &self.terms {
            out.add_term(i, j, s.scale_rat(by));
        }
        out
    }

    /// Multiplies by `z^i zbar^j` times a rational factor.
    pub fn shift_z(&self, i: u32, j: u32, by: &Rational) -> ZPoly {
        let mut out = ZPoly::zero(self.order);
        for (&(a, b), s) in &self.terms {
            out.add_term(a + i, b + j, s.scale_rat(by));
        }
        out
    }

    /// Multiplies every coefficient series by `L^j`.
    pub fn mul_l_pow(&self, j: i64) -> ZPoly {
        ZPoly {
            order: self.order,
            terms: self
                .terms
                .iter()
                .map(|(&key, s)| (key, s.mul_l_pow(j)))
                .collect(),
        }
    }

    /// The underlying series when the polynomial is `z`-free; `None` if any
    /// term involves `z` or `zbar`.
    pub fn as_series(&self) -> Option<BiSeries> {
        if self.terms.is_empty() {
            return Some(BiSeries::zero(self.order));
        }
        if self.terms.len() == 1 {
            if let Some(series) = self.terms.get(&(0, 0)) {
                return Some(series.clone());
            }
        }
        None
    }

    /// Exact division by `(z - zbar)`, or `None` when the remainder — the
    /// substitution `z := zbar` — is nonzero.
    pub fn try_div_z_minus_zbar(&self) -> Option<ZPoly> {
        if self.is_zero() {
            return Some(self.clone());
        }
        // Group by z-exponent: rows[i] is the zbar-polynomial coefficient
        // of z^i.
        let degree = self.terms.keys().map(|&(i, _)| i).max().unwrap_or(0);
        let mut rows: Vec<BTreeMap<u32, BiSeries>> =
            vec![BTreeMap::new(); degree as usize + 1];
        for (&(i, j), s) in &self.terms {
            rows[i as usize].insert(j, s.clone());
        }
        // Synthetic division at the root z = zbar: q_{i-1} = A_i + zbar q_i.
        let mut quotient = ZPoly::zero(self.order);
        let mut carry: BTreeMap<u32, BiSeries> = BTreeMap::new();
        for i in (1..=degree).rev() {
            let mut next = rows[i as usize].clone();
            for (j, s) in &carry {
                let entry = next
                    .entry(j + 1)
                    .or_insert_with(|| BiSeries::zero(self.order));
                *entry = entry.add(s);
            }
            next.retain(|_, s| !s.is_zero());
            for (&j, s) in &next {
                quotient.add_term(i - 1, j, s.clone());
            }
            carry = next;
        }
        // Remainder = A_0 + zbar q_0.
        let mut remainder = rows[0].clone();
        for (j, s) in &carry {
            let entry = remainder
                .entry(j + 1)
                .or_insert_with(|| BiSeries::zero(self.order));
            *entry = entry.add(s);
        }
        if remainder.values().all(BiSeries::is_zero) {
            Some(quotient)
        } else {
            None
        }
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), s) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({s})")?;
            if i > 0 {
                write!(f, "*z^{i}")?;
            }
            if j > 0 {
                write!(f, "*zbar^{j}")?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Framed homogeneous polynomials
// ---------------------------------------------------------------------------

/// The two coordinate frames for homogeneous sections.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Monomials `X^i Y^j`.
    XY,
    /// Monomials `u^r v^s` with `u = X - zY`, `v = X - zbar Y`.
    Modular,
}

/// A homogeneous polynomial of fixed degree in one of the two frames, with
/// [`ZPoly`] coefficients and a global `(i pi)` power tag.
///
/// The value represented is `(i pi)^{ipi_power}` times the stored data. All
/// constructors and frame changes keep the object canonical: no polynomial
/// factor `(z - zbar)` common to every coefficient remains (such factors are
/// folded into `L`-shifts and the tag).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FramePoly {
    frame: Frame,
    degree: u32,
    order: u32,
    ipi_power: i64,
    coeffs: BTreeMap<(u32, u32), ZPoly>,
}

impl FramePoly {
    /// The zero polynomial of the given homogeneous degree.
    pub fn zero(frame: Frame, degree: u32, order: u32) -> Self {
        FramePoly {
            frame,
            degree,
            order,
            ipi_power: 0,
            coeffs: BTreeMap::new(),
        }
    }

    /// Builds a polynomial from raw parts, validating homogeneity, and puts
    /// it into canonical folded form.
    pub fn from_parts(
        frame: Frame,
        degree: u32,
        order: u32,
        ipi_power: i64,
        coeffs: BTreeMap<(u32, u32), ZPoly>,
    ) -> Result<Self> {
        for &(a, b) in coeffs.keys() {
            if a + b != degree {
                return Err(Error::domain(
                    "FramePoly::from_parts",
                    format!("monomial exponents ({a}, {b}) do not sum to the degree {degree}"),
                ));
            }
        }
        let mut poly = FramePoly {
            frame,
            degree,
            order,
            ipi_power,
            coeffs: coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        };
        poly.canonicalize();
        Ok(poly)
    }

    /// A single monomial in the chosen frame.
    pub fn monomial(frame: Frame, a: u32, b: u32, coefficient: ZPoly) -> Self {
        let order = coefficient.order();
        let mut coeffs = BTreeMap::new();
        if !coefficient.is_zero() {
            coeffs.insert((a, b), coefficient);
        }
        let mut poly = FramePoly {
            frame,
            degree: a + b,
            order,
            ipi_power: 0,
            coeffs,
        };
        poly.canonicalize();
        poly
    }

    /// The frame the polynomial is expressed in.
    pub fn frame(&self) -> Frame {
        self.frame
    }

    /// The homogeneous degree.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Truncation order of the coefficient series.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Net power of `(i pi)` carried by the object.
    pub fn ipi_power(&self) -> i64 {
        self.ipi_power
    }

    /// Whether all coefficients vanish.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of the monomial with exponents `(a, b)` (zero if absent).
    pub fn component(&self, a: u32, b: u32) -> ZPoly {
        self.coeffs
            .get(&(a, b))
            .cloned()
            .unwrap_or_else(|| ZPoly::zero(self.order))
    }

    /// Iterates over nonzero components keyed by exponents.
    pub fn components(&self) -> impl Iterator<Item = (&(u32, u32), &ZPoly)> {
        self.coeffs.iter()
    }

    /// The component at `(a, b)` as a plain series. Fails if the component
    /// still involves `z`/`zbar` or if the `(i pi)` tag is nonzero, both of
    /// which would make a comparison with series data meaningless.
    pub fn component_series(&self, a: u32, b: u32) -> Result<BiSeries> {
        if self.ipi_power != 0 {
            return Err(Error::domain(
                "component_series",
                format!("(i pi) tag is {}; fold it away first", self.ipi_power),
            ));
        }
        self.component(a, b).as_series().ok_or_else(|| {
            Error::domain(
                "component_series",
                format!("component ({a}, {b}) depends on z/zbar"),
            )
        })
    }

    /// The modular-frame component at `(r, s)` as a form of weights `(r, s)`.
    /// This is the reading appropriate for sections whose `u^r v^s`
    /// coefficient is a weight-`(r, s)` form, like the Eisenstein sections.
    pub fn component_form(&self, r: i64, s: i64) -> Result<RAForm> {
        if self.frame != Frame::Modular {
            return Err(Error::domain(
                "component_form",
                "components carry weights only in the modular frame",
            ));
        }
        if r < 0 || s < 0 {
            return Err(Error::domain(
                "component_form",
                format!("exponents must be non-negative, got ({r}, {s})"),
            ));
        }
        let series = self.component_series(r as u32, s as u32)?;
        RAForm::new(r, s, series)
    }

    /// Scales every coefficient by a rational number.
    pub fn scale_rat(&self, by: &Rational) -> FramePoly {
        let coeffs: BTreeMap<(u32, u32), ZPoly> = self
            .coeffs
            .iter()
            .map(|(&key, c)| (key, c.scale_rat(by)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let ipi_power = if coeffs.is_empty() { 0 } else { self.ipi_power };
        FramePoly {
            frame: self.frame,
            degree: self.degree,
            order: self.order,
            ipi_power,
            coeffs,
        }
    }

    /// Folds common polynomial `(z - zbar)` factors through
    /// `z - zbar = L / (i pi)`: divides all coefficients, shifts `L`, and
    /// adjusts the tag until no common factor remains. Zero polynomials
    /// reset to a zero tag.
    fn canonicalize(&mut self) {
        self.coeffs.retain(|_, c| !c.is_zero());
        if self.coeffs.is_empty() {
            self.ipi_power = 0;
            return;
        }
        loop {
            let mut divided = BTreeMap::new();
            for (&key, c) in &self.coeffs {
                match c.try_div_z_minus_zbar() {
                    Some(q) => {
                        divided.insert(key, q);
                    }
                    None => return,
                }
            }
            // One polynomial factor (z - zbar) becomes L / (i pi).
            self.coeffs = divided
                .into_iter()
                .map(|(key, c)| (key, c.mul_l_pow(1)))
                .collect();
            self.ipi_power -= 1;
        }
    }
}

/// Packages a family of forms, keyed by `(r, s)` with constant `r + s`, as a
/// modular-frame section `sum F_{r,s} u^r v^s`.
///
/// All members must share one total weight (the family need not populate
/// every `(r, s)` slot). An empty family yields the zero section of degree
/// zero.
pub fn section_from_family(family: &BTreeMap<(i64, i64), RAForm>) -> Result<FramePoly> {
    let mut degree: Option<u32> = None;
    let mut total_weight: Option<i64> = None;
    let mut order = u32::MAX;
    for (&(r, s), member) in family {
        if r < 0 || s < 0 {
            return Err(Error::domain(
                "section_from_family",
                format!("component exponents must be non-negative, got ({r}, {s})"),
            ));
        }
        let d = (r + s) as u32;
        if *degree.get_or_insert(d) != d {
            return Err(Error::domain(
                "section_from_family",
                "component exponents must share one total degree",
            ));
        }
        let w = member.total_weight();
        if *total_weight.get_or_insert(w) != w {
            return Err(Error::domain(
                "section_from_family",
                "family members must share one total weight",
            ));
        }
        order = order.min(member.order());
    }
    let degree = degree.unwrap_or(0);
    if family.is_empty() {
        order = 0;
    }
    let mut coeffs = BTreeMap::new();
    for (&(r, s), member) in family {
        let series = member.series().truncated(order);
        if !series.is_zero() {
            coeffs.insert((r as u32, s as u32), ZPoly::from_series(&series));
        }
    }
    FramePoly::from_parts(Frame::Modular, degree, order, 0, coeffs)
}

/// Rewrites a polynomial in the requested frame (identity when already
/// there). Round trips are syntactic identities thanks to the canonical
/// folded form.
pub fn frame_change(poly: &FramePoly, target: Frame) -> FramePoly {
    if poly.frame == target {
        return poly.clone();
    }
    match target {
        Frame::XY => modular_to_xy(poly),
        Frame::Modular => xy_to_modular(poly),
    }
}

/// Expands `u^r v^s = (X - zY)^r (X - zbar Y)^s` monomial by monomial.
fn modular_to_xy(poly: &FramePoly) -> FramePoly {
    let mut coeffs: BTreeMap<(u32, u32), ZPoly> = BTreeMap::new();
    for (&(r, s), c) in &poly.coeffs {
        for alpha in 0..=r {
            for beta in 0..=s {
                // C(r, alpha) C(s, beta) (-1)^{r - alpha + s - beta}
                //   z^{r - alpha} zbar^{s - beta} X^{alpha + beta} Y^{rest}.
                let mut factor = binomial_i64(r as i64, alpha as i64)
                    * binomial_i64(s as i64, beta as i64);
                if (r - alpha + s - beta) % 2 == 1 {
                    factor = -factor;
                }
                let term = c.shift_z(r - alpha, s - beta, &factor);
                let key = (alpha + beta, (r - alpha) + (s - beta));
                merge_coeff(&mut coeffs, key, term);
            }
        }
    }
    finish(poly, Frame::XY, coeffs, poly.ipi_power)
}

/// Substitutes `X = (z v - zbar u)/(z - zbar)`, `Y = (v - u)/(z - zbar)`;
/// the common denominator `(z - zbar)^{degree}` is folded through
/// `L / (i pi)` and the result is re-canonicalized.
fn xy_to_modular(poly: &FramePoly) -> FramePoly {
    let degree = poly.degree;
    let mut coeffs: BTreeMap<(u32, u32), ZPoly> = BTreeMap::new();
    for (&(i, j), c) in &poly.coeffs {
        // (z v - zbar u)^i (v - u)^j, collected on u^? v^?.
        for a in 0..=i {
            for b in 0..=j {
                // From (z v)^a (-zbar u)^{i-a} and v^b (-u)^{j-b}.
                let mut factor = binomial_i64(i as i64, a as i64)
                    * binomial_i64(j as i64, b as i64);
                if (i - a + j - b) % 2 == 1 {
                    factor = -factor;
                }
                let term = c.shift_z(a, i - a, &factor);
                let key = ((i - a) + (j - b), a + b);
                merge_coeff(&mut coeffs, key, term);
            }
        }
    }
    // Fold the global denominator (z - zbar)^{degree}.
    let folded: BTreeMap<(u32, u32), ZPoly> = coeffs
        .into_iter()
        .map(|(key, c)| (key, c.mul_l_pow(-(degree as i64))))
        .collect();
    finish(poly, Frame::Modular, folded, poly.ipi_power + degree as i64)
}

fn merge_coeff(map: &mut BTreeMap<(u32, u32), ZPoly>, key: (u32, u32), term: ZPoly) {
    if term.is_zero() {
        return;
    }
    match map.remove(&key) {
        Some(existing) => {
            let sum = existing.add(&term);
            if !sum.is_zero() {
                map.insert(key, sum);
            }
        }
        None => {
            map.insert(key, term);
        }
    }
}

fn finish(
    source: &FramePoly,
    frame: Frame,
    coeffs: BTreeMap<(u32, u32), ZPoly>,
    ipi_power: i64,
) -> FramePoly {
    let mut poly = FramePoly {
        frame,
        degree: source.degree,
        order: source.order,
        ipi_power,
        coeffs,
    };
    poly.canonicalize();
    poly
}

/// Formal partial derivative of a coefficient map with respect to the first
/// (`first = true`) or second variable of the frame.
fn deriv(
    coeffs: &BTreeMap<(u32, u32), ZPoly>,
    first: bool,
) -> BTreeMap<(u32, u32), ZPoly> {
    let mut out = BTreeMap::new();
    for (&(a, b), c) in coeffs {
        let (exp, key) = if first {
            (a, (a.wrapping_sub(1), b))
        } else {
            (b, (a, b.wrapping_sub(1)))
        };
        if exp == 0 {
            continue;
        }
        merge_coeff(&mut out, key, c.scale_rat(&rat_int(exp as i64)));
    }
    out
}

/// The equivariant projector `delta^k` of two sections, optionally
/// normalised by `1/(k!)^2`.
///
/// Inputs in different frames are aligned to the frame of `p` first. In the
/// XY frame the transvectant formula is applied literally; in the modular
/// frame the operator factors through `u, v` derivatives with a folded
/// `(z - zbar)^k` prefactor, so `z`-free inputs stay `z`-free. The result
/// has degree `deg(p) + deg(q) - 2k` and vanishes when `k` exceeds either
/// degree.
pub fn delta_proj(k: u32, p: &FramePoly, q: &FramePoly, normalize: bool) -> FramePoly {
    let frame = p.frame;
    let q_aligned;
    let q = if q.frame == frame {
        q
    } else {
        q_aligned = frame_change(q, frame);
        &q_aligned
    };
    let order = p.order.min(q.order);
    let degree = (p.degree + q.degree).saturating_sub(2 * k);
    if k > p.degree || k > q.degree || p.is_zero() || q.is_zero() {
        return FramePoly::zero(frame, degree, order);
    }

    // Iterated derivatives d1^{k-j} d2^{j} of both arguments, j = 0..=k.
    let mut p_derivs = Vec::with_capacity(k as usize + 1);
    let mut q_derivs = Vec::with_capacity(k as usize + 1);
    let mut p_base = p.coeffs.clone();
    let mut q_base = q.coeffs.clone();
    for _ in 0..k {
        p_base = deriv(&p_base, true);
        q_base = deriv(&q_base, true);
    }
    p_derivs.push(p_base);
    q_derivs.push(q_base);
    for j in 1..=k {
        // Replace one d1 by a d2: differentiate the previous stage's
        // pre-image; equivalently recompute from scratch.
        let mut p_stage = p.coeffs.clone();
        let mut q_stage = q.coeffs.clone();
        for _ in 0..(k - j) {
            p_stage = deriv(&p_stage, true);
        }
        for _ in 0..j {
            p_stage = deriv(&p_stage, false);
        }
        for _ in 0..(k - j) {
            q_stage = deriv(&q_stage, true);
        }
        for _ in 0..j {
            q_stage = deriv(&q_stage, false);
        }
        p_derivs.push(p_stage);
        q_derivs.push(q_stage);
    }

    let mut coeffs: BTreeMap<(u32, u32), ZPoly> = BTreeMap::new();
    for j in 0..=k as usize {
        // (-1)^j C(k, j) (d1^{k-j} d2^j p) (d1^j d2^{k-j} q).
        let mut sign = binomial_i64(k as i64, j as i64);
        if j % 2 == 1 {
            sign = -sign;
        }
        for (&(a1, b1), c1) in &p_derivs[j] {
            for (&(a2, b2), c2) in &q_derivs[k as usize - j] {
                let term = c1.mul(c2).scale_rat(&sign);
                merge_coeff(&mut coeffs, (a1 + a2, b1 + b2), term);
            }
        }
    }

    let mut ipi_power = p.ipi_power + q.ipi_power;
    if frame == Frame::Modular {
        // The XY operator equals (z - zbar) times the u,v operator; fold the
        // k prefactors through L / (i pi).
        coeffs = coeffs
            .into_iter()
            .map(|(key, c)| (key, c.mul_l_pow(k as i64)))
            .collect();
        ipi_power -= k as i64;
    }

    let mut result = FramePoly {
        frame,
        degree,
        order,
        ipi_power,
        coeffs,
    };
    if normalize {
        let kf = Rational::from(factorial(k as u64));
        result = result.scale_rat(&(rat_int(1) / (kf.clone() * kf)));
    }
    result.canonicalize();
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::PeriodScalar;
    use crate::forms::{eisenstein_g, real_eisenstein, real_eisenstein_family};
    use crate::operators::del;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_series(rng: &mut ChaCha8Rng, order: u32) -> BiSeries {
        let mut series = BiSeries::zero(order);
        for _ in 0..rng.gen_range(1..4) {
            let m = rng.gen_range(0..=2u32);
            let n = rng.gen_range(0..=2u32);
            let k = rng.gen_range(-2..=2i64);
            series.add_term(
                m,
                n,
                k,
                PeriodScalar::from_frac(rng.gen_range(-5..=5), rng.gen_range(1..=4)),
            );
        }
        series
    }

    fn random_frame_poly(rng: &mut ChaCha8Rng, frame: Frame, degree: u32, order: u32) -> FramePoly {
        let mut coeffs = BTreeMap::new();
        for a in 0..=degree {
            if rng.gen_bool(0.7) {
                let mut zp = ZPoly::zero(order);
                for _ in 0..rng.gen_range(1..3) {
                    let i = rng.gen_range(0..=1u32);
                    let j = rng.gen_range(0..=1u32);
                    zp.add_term(i, j, random_series(rng, order));
                }
                if !zp.is_zero() {
                    coeffs.insert((a, degree - a), zp);
                }
            }
        }
        FramePoly::from_parts(frame, degree, order, 0, coeffs).unwrap()
    }

    #[test]
    fn z_poly_division_is_exact_synthetic_division() {
        let order = 3;
        let one = BiSeries::one(order);
        // (z - zbar) * (z + 2 zbar) = z^2 + z zbar - 2 zbar^2.
        let mut product = ZPoly::zero(order);
        product.add_term(2, 0, one.clone());
        product.add_term(1, 1, one.clone());
        product.add_term(0, 2, one.scale_rat(&rat_int(-2)));
        let quotient = product.try_div_z_minus_zbar().expect("divisible");
        let mut expected = ZPoly::zero(order);
        expected.add_term(1, 0, one.clone());
        expected.add_term(0, 1, one.scale_rat(&rat_int(2)));
        assert_eq!(quotient, expected);

        // z * zbar is not divisible.
        let not_divisible = ZPoly::monomial(order, 1, 1, one);
        assert!(not_divisible.try_div_z_minus_zbar().is_none());
    }

    #[test]
    fn modular_monomial_expands_with_binomial_signs() {
        let order = 2;
        // u^4 = (X - zY)^4: the Y^4 coefficient is (-z)^4 = z^4.
        let u4 = FramePoly::monomial(Frame::Modular, 4, 0, ZPoly::from_series(&BiSeries::one(order)));
        let xy = frame_change(&u4, Frame::XY);
        assert_eq!(xy.frame(), Frame::XY);
        assert_eq!(xy.ipi_power(), 0);
        let y4 = xy.component(0, 4);
        assert_eq!(y4, ZPoly::monomial(order, 4, 0, BiSeries::one(order)));
        let x3y = xy.component(3, 1);
        assert_eq!(
            x3y,
            ZPoly::monomial(order, 1, 0, BiSeries::one(order).scale_rat(&rat_int(-4)))
        );
    }

    #[test]
    fn frame_round_trips_are_syntactic_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xF0A3);
        for case in 0..12 {
            let degree = 2 * rng.gen_range(1..=2u32);
            let modular = random_frame_poly(&mut rng, Frame::Modular, degree, 3);
            let back = frame_change(&frame_change(&modular, Frame::XY), Frame::Modular);
            assert_eq!(back, modular, "modular round trip, case {case}");

            let xy = random_frame_poly(&mut rng, Frame::XY, degree, 3);
            let back = frame_change(&frame_change(&xy, Frame::Modular), Frame::XY);
            assert_eq!(back, xy, "XY round trip, case {case}");
        }
    }

    #[test]
    fn delta_zero_is_the_plain_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xD0);
        let p = random_frame_poly(&mut rng, Frame::XY, 2, 3);
        let q = random_frame_poly(&mut rng, Frame::XY, 4, 3);
        let product = delta_proj(0, &p, &q, true);
        assert_eq!(product.degree(), 6);
        // Compare against the hand product of the coefficient maps.
        let mut expected: BTreeMap<(u32, u32), ZPoly> = BTreeMap::new();
        for (&(a1, b1), c1) in p.components() {
            for (&(a2, b2), c2) in q.components() {
                merge_coeff(&mut expected, (a1 + a2, b1 + b2), c1.mul(c2));
            }
        }
        let expected = FramePoly::from_parts(Frame::XY, 6, 3, 0, expected).unwrap();
        assert_eq!(product, expected);
    }

    #[test]
    fn delta_beyond_either_degree_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xD1);
        let p = random_frame_poly(&mut rng, Frame::Modular, 2, 3);
        let q = random_frame_poly(&mut rng, Frame::Modular, 4, 3);
        assert!(delta_proj(3, &p, &q, true).is_zero());
        assert!(delta_proj(5, &q, &p, false).is_zero());
    }

    #[test]
    fn modular_shortcut_agrees_with_xy_computation_and_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xD2);
        let order = 3;
        for &(two_m, two_n) in &[(2u32, 4u32), (4, 4), (6, 2)] {
            for k in 0..=two_m.min(two_n) {
                // P = u^{2m}, A = random modular section of degree 2n with
                // z-free coefficients.
                let p = FramePoly::monomial(
                    Frame::Modular,
                    two_m,
                    0,
                    ZPoly::from_series(&BiSeries::one(order)),
                );
                let mut family = BTreeMap::new();
                for x in 0..=two_n {
                    family.insert(
                        (x, two_n - x),
                        ZPoly::from_series(&random_series(&mut rng, order)),
                    );
                }
                let a = FramePoly::from_parts(Frame::Modular, two_n, order, 0, family).unwrap();

                // Path 1: modular-frame shortcut.
                let modular = delta_proj(k, &p, &a, true);
                // Path 2: through the XY frame.
                let via_xy = frame_change(
                    &delta_proj(k, &frame_change(&p, Frame::XY), &frame_change(&a, Frame::XY), true),
                    Frame::Modular,
                );
                assert_eq!(modular, via_xy, "paths agree, 2m={two_m}, 2n={two_n}, k={k}");

                // Path 3: closed form
                // F_{r,s} = (z - zbar)^k C(2m,k) C(s+k,k) A_{r-2m+k, s+k}.
                let degree = two_m + two_n - 2 * k;
                let mut expected = BTreeMap::new();
                for r in 0..=degree {
                    let s = degree - r;
                    let x = r as i64 - two_m as i64 + k as i64;
                    let y = (s + k) as i64;
                    if x < 0 || x > two_n as i64 {
                        continue;
                    }
                    let c = binomial_i64(two_m as i64, k as i64)
                        * binomial_i64(y, k as i64);
                    let source = a.component(x as u32, y as u32);
                    let term = source.scale_rat(&c).mul_l_pow(k as i64);
                    if !term.is_zero() {
                        expected.insert((r, s), term);
                    }
                }
                let expected =
                    FramePoly::from_parts(Frame::Modular, degree, order, -(k as i64), expected)
                        .unwrap();
                assert_eq!(modular, expected, "closed form, 2m={two_m}, 2n={two_n}, k={k}");
            }
        }
    }

    #[test]
    fn eisenstein_section_translates_to_the_scalar_system() {
        let order = 6;
        let family = real_eisenstein_family(2, order).unwrap();
        let mut map = BTreeMap::new();
        for (&(r, s), member) in family.members() {
            map.insert((r, s), member.clone());
        }
        let section = section_from_family(&map).unwrap();
        assert_eq!(section.degree(), 2);
        assert_eq!(section.ipi_power(), 0);

        let g4 = eisenstein_g(4, order).unwrap();
        for r in 0..=2i64 {
            let s = 2 - r;
            let component = section.component_form(r, s).unwrap();
            assert_eq!(
                component,
                real_eisenstein(r, s, order).unwrap(),
                "component ({r}, {s})"
            );
            // del F_{r,s} - (r+1) F_{r+1,s-1} = L A_{r,s}, where the section
            // A has the single component A_{2,0} = G4.
            let mut line = del(&component);
            if s >= 1 {
                let up = section.component_form(r + 1, s - 1).unwrap();
                line = line.sub(&up.scale_int(r + 1)).unwrap();
            }
            let rhs = if s == 0 {
                g4.l_shift(1)
            } else {
                RAForm::zero(r + 1, s - 1, order).unwrap()
            };
            assert_eq!(line, rhs, "system line at ({r}, {s})");
        }
    }

    #[test]
    fn top_component_of_projected_holomorphic_section_scales_binomially() {
        // delta^k / (k!)^2 of u^{2m} g (x) E-section has top component
        // C(2m, k) L^k g E_{2n-k, k} with an (i pi)^{-k} tag: the scalar
        // differential systems read off exactly this coefficient (times one
        // more L from the section equation).
        let order = 5;
        let two_m = 4u32;
        let k = 1u32;
        let g6 = eisenstein_g(6, order).unwrap();
        let p = FramePoly::monomial(Frame::Modular, two_m, 0, ZPoly::from_series(g6.series()));

        let family = real_eisenstein_family(2, order).unwrap();
        let mut map = BTreeMap::new();
        for (&(r, s), member) in family.members() {
            map.insert((r, s), member.clone());
        }
        let section = section_from_family(&map).unwrap();

        let projected = delta_proj(k, &p, &section, true);
        assert_eq!(projected.ipi_power(), -(k as i64));
        let top = projected
            .component(two_m + 2 - 2 * k, 0)
            .as_series()
            .expect("z-free");
        let expected = g6
            .series()
            .mul(real_eisenstein(1, 1, order).unwrap().series())
            .mul_l_pow(k as i64)
            .scale_rat(&binomial_i64(two_m as i64, k as i64));
        assert_eq!(top, expected);
    }

    #[test]
    fn empty_family_gives_the_zero_section() {
        let section = section_from_family(&BTreeMap::new()).unwrap();
        assert!(section.is_zero());
        assert_eq!(section.degree(), 0);
    }

    #[test]
    fn mismatched_families_are_rejected() {
        let order = 4;
        let mut mixed_degree = BTreeMap::new();
        mixed_degree.insert((2i64, 0i64), real_eisenstein(2, 0, order).unwrap());
        mixed_degree.insert((1, 3), real_eisenstein(1, 3, order).unwrap());
        assert!(section_from_family(&mixed_degree).is_err());

        let mut mixed_weight = BTreeMap::new();
        mixed_weight.insert((2i64, 0i64), real_eisenstein(2, 0, order).unwrap());
        mixed_weight.insert((1, 1), real_eisenstein(3, 1, order).unwrap());
        assert!(section_from_family(&mixed_weight).is_err());
    }
}

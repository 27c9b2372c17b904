//! Coefficientwise primitives of `del`, and the two-Eisenstein families
//! built from them.
//!
//! # The primitive solver
//!
//! Fix a target weight `r` and look for `b` with `del(b) = a`, where `del`
//! acts termwise by `L^k q^m qbar^n -> (2m L + r + k) L^k q^m qbar^n`.
//! Expanding both sides in `L`-columns per `(q^m, qbar^n)` slice turns the
//! equation into the band system
//!
//! ```text
//! a^(k) = 2m b^(k-1) + (r + k) b^(k).
//! ```
//!
//! For `m >= 1` the system is solved top-down: every solution of finite
//! `L`-degree has `b^(k) = 0` above the top degree of `a`, after which each
//! equation determines the next coefficient `b^(k-1)`. The descent closes
//! precisely when the final residual vanishes; a surviving residual below
//! `L^{-r}` can never terminate (the homogeneous recursion multiplies it by
//! nonzero factors forever) and is reported as an obstruction instead of
//! being dropped.
//!
//! For `m = 0` the equations decouple to `a^(k) = (r + k) b^(k)`. At
//! `k = -r` the factor vanishes, so
//!
//! * a nonzero `a^(-r)` coefficient on the constant column is a hard
//!   obstruction — no primitive exists — and
//! * the value of `b^(-r)` is genuinely free: the kernel of `del` is exactly
//!   `L^{-r}` times an arbitrary antiholomorphic series. The solver inserts
//!   one named symbol per `qbar^n` at that spot and lists the names, so the
//!   returned primitive satisfies `del(primitive) = input` identically in
//!   the free parameters.
//!
//! # Two-Eisenstein families
//!
//! [`build_double_eisenstein`] constructs, for `a, b >= 1` and
//! `0 <= k <= min(2a, 2b)` with `2w = 2a + 2b - 2k`, the family
//! `{F_{r,s} : r + s = 2w}` solving
//!
//! ```text
//! del(F_{2w,0})               = C(2a,k) L^{k+1} G_{2a+2} E_{2b-k,k}
//! del(F_{r,s}) - (r+1) F_{r+1,s-1}
//!     = C(2a,k) C(k+s,k) L^{k+1} G_{2a+2} E_{2b-k-s,k+s}          (s >= 1)
//! dbar(F_{0,2w})              = C(2b,k) L^{k+1} conj(G_{2b+2}) E_{k,2a-k}
//! dbar(F_{r,s}) - (s+1) F_{r-1,s+1}
//!     = C(2b,k) C(k+r,k) L^{k+1} conj(G_{2b+2}) E_{k+r,2a-k-r}    (r >= 1)
//! ```
//!
//! where an Eisenstein factor with a negative index is zero. The builder
//! solves the top corner with the primitive solver (kernel symbols included),
//! walks down the antiholomorphic system `F_{r-1,s+1} =
//! (dbar(F_{r,s}) - rhs) / (s+1)`, and then imposes the one remaining
//! equation, at `(0, 2w)`. That last line pins every kernel symbol except the
//! `qbar^0` one: the leftover freedom is the tower `(-1)^s C(2w,s) L^{-2w}`,
//! which both systems annihilate, so exactly one named constant `c_{a}_{b}_{k}`
//! survives into the result. Every line of both systems is re-verified
//! exactly (symbols included) before the family is returned.
//!
//! The restriction `2a + 2b - 2k + 2 <= 10` keeps the construction inside the
//! range where no cusp forms interfere; beyond it a cusp correction would be
//! required and the builder refuses with a dedicated error.

use std::collections::BTreeMap;

use num::Zero;

use crate::error::{Error, ObstructionEntry, Result};
use crate::forms::{eisenstein_g, real_eisenstein};
use crate::operators::{dbar, del};
use crate::scalar::{binomial_i64, rat, rat_int, PeriodScalar};
use crate::series::{BiSeries, RAForm};

// ---------------------------------------------------------------------------
// Primitive solver
// ---------------------------------------------------------------------------

/// Result of [`solve_del_primitive`]: a primitive together with the names of
/// the kernel symbols left free and any obstruction diagnostics.
#[derive(Debug, Clone)]
pub struct PrimitiveSolution {
    /// The solved primitive, of weights `(target_r, s + 1)` when the input
    /// has weights `(_, s)`. Kernel positions `(0, n, -target_r)` carry named
    /// symbolic coefficients.
    pub primitive: RAForm,
    /// Names of the free kernel symbols, one per `qbar^n` column.
    pub free_parameters: Vec<String>,
    /// Violated solvability conditions. Empty on the strict path; the lenient
    /// solver returns them here instead of failing.
    pub obstruction_report: Vec<ObstructionEntry>,
}

/// Solves `del(b) = f` for the target weight `target_r`, failing with
/// [`Error::ObstructionViolated`] if any solvability condition is violated.
///
/// The returned primitive has weights `(target_r, s + 1)` where `s` is the
/// second weight of `f`; the first weight of `f` is not consulted, since the
/// equation is solved coefficientwise for the declared target. Kernel
/// freedom at the `(0, n, -target_r)` positions is surfaced as symbols named
/// `kappa_0, kappa_1, ...`, so `del(primitive) = f` holds identically.
///
/// ```
/// use raqmod_core::operators::del;
/// use raqmod_core::primitives::solve_del_primitive;
/// use raqmod_core::scalar::PeriodScalar;
/// use raqmod_core::series::{BiSeries, RAForm};
///
/// // f = L q, declared as the image of a weight-(2, 0) form.
/// let f = RAForm::new(3, -1, BiSeries::monomial(4, 1, 0, 1, PeriodScalar::one())).unwrap();
/// let solution = solve_del_primitive(&f, 2).unwrap();
/// assert_eq!(solution.primitive.weights(), (2, 0));
/// assert_eq!(solution.primitive.series().term(1, 0, 0), PeriodScalar::from_frac(1, 2));
/// assert!(del(&solution.primitive).sub(&f).unwrap().is_zero());
/// ```
pub fn solve_del_primitive(f: &RAForm, target_r: i64) -> Result<PrimitiveSolution> {
    solve_del_primitive_named(f, target_r, "kappa")
}

/// Like [`solve_del_primitive`] but with a caller-chosen prefix for the
/// kernel symbols (they are named `{prefix}_{n}`), so that several solves can
/// coexist in one expression without name collisions.
pub fn solve_del_primitive_named(
    f: &RAForm,
    target_r: i64,
    kernel_prefix: &str,
) -> Result<PrimitiveSolution> {
    let solution = solve_del_primitive_lenient(f, target_r, kernel_prefix)?;
    if !solution.obstruction_report.is_empty() {
        return Err(Error::ObstructionViolated {
            entries: solution.obstruction_report,
        });
    }
    Ok(solution)
}

/// Best-effort variant of the solver: obstructions are collected in the
/// [`PrimitiveSolution::obstruction_report`] instead of aborting, and the
/// primitive solves every unobstructed coefficient. When the report is empty
/// the primitive satisfies `del(primitive) = f` exactly.
pub fn solve_del_primitive_lenient(
    f: &RAForm,
    target_r: i64,
    kernel_prefix: &str,
) -> Result<PrimitiveSolution> {
    let r = target_r;
    let s_out = f.weights().1 + 1;
    if (r + s_out) % 2 != 0 {
        return Err(Error::domain(
            "solve_del_primitive",
            format!(
                "primitive would have weights ({r}, {s_out}) of odd total weight; \
                 target_r and the input's second weight are incompatible"
            ),
        ));
    }
    let order = f.order();

    // Group the input into L-columns per (q^m, qbar^n) slice.
    let mut slices: BTreeMap<(u32, u32), BTreeMap<i64, PeriodScalar>> = BTreeMap::new();
    for (&(m, n, k), c) in f.series().iter() {
        slices.entry((m, n)).or_default().insert(k, c.clone());
    }

    let mut out = BiSeries::zero(order);
    let mut report: Vec<ObstructionEntry> = Vec::new();
    let mut free_parameters = Vec::with_capacity(order as usize + 1);

    // Kernel of del at weight r: L^{-r} times any antiholomorphic series.
    for n in 0..=order {
        let name = format!("{kernel_prefix}_{n}");
        out.add_term(0, n, -r, PeriodScalar::symbol(&name));
        free_parameters.push(name);
    }

    for ((m, n), column) in &slices {
        if *m == 0 {
            // Decoupled equations a^(k) = (r + k) b^(k).
            for (&k, c) in column {
                if k == -r {
                    report.push(ObstructionEntry {
                        m: 0,
                        n: *n,
                        k,
                        coefficient: c.pretty(),
                        reason: "constant-column",
                    });
                } else {
                    out.add_term(0, *n, k, c.scale(&rat(1, r + k)));
                }
            }
            continue;
        }

        // Band descent for m >= 1.
        let two_m = rat_int(2 * *m as i64);
        let k_max = *column.keys().max().expect("nonempty column");
        let k_floor = (*column.keys().min().expect("nonempty column")).min(-r);
        let mut b_above = PeriodScalar::zero();
        for k in (k_floor..=k_max).rev() {
            let a_k = column.get(&k).cloned().unwrap_or_else(PeriodScalar::zero);
            let b_below = a_k
                .sub(&b_above.scale(&rat_int(r + k)))
                .div_rational(&two_m)?;
            if k > k_floor {
                out.add_term(*m, *n, k - 1, b_below.clone());
                b_above = b_below;
            } else if !b_below.is_zero() {
                // Residual below the last equation: the homogeneous recursion
                // can never return it to zero, so no finite-degree primitive
                // exists for this slice.
                report.push(ObstructionEntry {
                    m: *m,
                    n: *n,
                    k: k - 1,
                    coefficient: b_below.pretty(),
                    reason: "non-terminating",
                });
            }
        }
    }

    Ok(PrimitiveSolution {
        primitive: RAForm::new(r, s_out, out)?,
        free_parameters,
        obstruction_report: report,
    })
}

// ---------------------------------------------------------------------------
// Two-Eisenstein families
// ---------------------------------------------------------------------------

/// The family `{F_{r,s} : r + s = 2w}` produced by
/// [`build_double_eisenstein`], with `2w = 2a + 2b - 2k`.
#[derive(Debug, Clone)]
pub struct DoubleEisensteinFamily {
    a: i64,
    b: i64,
    k: i64,
    weight: i64,
    members: BTreeMap<(i64, i64), RAForm>,
    undetermined_constants: Vec<String>,
}

impl DoubleEisensteinFamily {
    /// The defining indices `(a, b, k)`.
    pub fn indices(&self) -> (i64, i64, i64) {
        (self.a, self.b, self.k)
    }

    /// The common total weight `2w = 2a + 2b - 2k` of the members.
    pub fn weight(&self) -> i64 {
        self.weight
    }

    /// The member of weights `(r, s)`, when `r + s = 2w` and both are `>= 0`.
    pub fn member(&self, r: i64, s: i64) -> Option<&RAForm> {
        self.members.get(&(r, s))
    }

    /// All members keyed by `(r, s)`, in lexicographic order.
    pub fn members(&self) -> impl Iterator<Item = (&(i64, i64), &RAForm)> {
        self.members.iter()
    }

    /// Names of the symbolic constants the defining systems do not determine
    /// (one per family: the coefficient of the tower `(-1)^s C(2w,s) L^{-2w}`).
    pub fn undetermined_constants(&self) -> &[String] {
        &self.undetermined_constants
    }
}

/// Right-hand side of the `del`-system line at `(r, s)`; weights `(r+1, s-1)`.
fn double_rhs_del(
    a: i64,
    b: i64,
    k: i64,
    s: i64,
    order: u32,
    g_hol: &RAForm,
    eis: &mut BTreeMap<(i64, i64), RAForm>,
) -> Result<RAForm> {
    let r = 2 * a + 2 * b - 2 * k - s;
    let (first, second) = (2 * b - k - s, k + s);
    if first < 0 || second < 0 {
        return RAForm::zero(r + 1, s - 1, order);
    }
    let e = eis_cached(eis, first, second, order)?;
    let c = binomial_i64(2 * a, k) * binomial_i64(k + s, k);
    Ok(g_hol.mul(&e).l_shift(k + 1).scale_rat(&c))
}

/// Right-hand side of the `dbar`-system line at `(r, s)`; weights `(r-1, s+1)`.
fn double_rhs_dbar(
    a: i64,
    b: i64,
    k: i64,
    r: i64,
    order: u32,
    g_antihol: &RAForm,
    eis: &mut BTreeMap<(i64, i64), RAForm>,
) -> Result<RAForm> {
    let s = 2 * a + 2 * b - 2 * k - r;
    let (first, second) = (k + r, 2 * a - k - r);
    if first < 0 || second < 0 {
        return RAForm::zero(r - 1, s + 1, order);
    }
    let e = eis_cached(eis, first, second, order)?;
    let c = binomial_i64(2 * b, k) * binomial_i64(k + r, k);
    Ok(g_antihol.mul(&e).l_shift(k + 1).scale_rat(&c))
}

fn eis_cached(
    cache: &mut BTreeMap<(i64, i64), RAForm>,
    r: i64,
    s: i64,
    order: u32,
) -> Result<RAForm> {
    if let Some(e) = cache.get(&(r, s)) {
        return Ok(e.clone());
    }
    let e = real_eisenstein(r, s, order)?;
    cache.insert((r, s), e.clone());
    Ok(e)
}

/// Builds the two-Eisenstein family for indices `a, b >= 1` and
/// `0 <= k <= min(2a, 2b)`, truncated at `order`.
///
/// Both defining systems (see the module docs) hold exactly for the returned
/// members, identically in the one surviving symbolic constant `c_{a}_{b}_{k}`
/// — the coefficient of the tower `(-1)^s C(2w,s) L^{-2w}`, which both
/// systems annihilate. Requesting indices whose total holomorphic weight
/// `2a + 2b - 2k + 2` reaches 12 fails with
/// [`Error::CuspCorrectionRequired`], since from that weight on a cusp-form
/// correction would enter the construction.
pub fn build_double_eisenstein(
    a: i64,
    b: i64,
    k: i64,
    order: u32,
) -> Result<DoubleEisensteinFamily> {
    if a < 1 || b < 1 {
        return Err(Error::domain(
            "build_double_eisenstein",
            format!("need a, b >= 1, got ({a}, {b})"),
        ));
    }
    if k < 0 || k > (2 * a).min(2 * b) {
        return Err(Error::domain(
            "build_double_eisenstein",
            format!("need 0 <= k <= min(2a, 2b) = {}, got {k}", (2 * a).min(2 * b)),
        ));
    }
    let holomorphic_weight = 2 * a + 2 * b - 2 * k + 2;
    if holomorphic_weight >= 12 {
        return Err(Error::CuspCorrectionRequired { holomorphic_weight });
    }
    let two_w = 2 * a + 2 * b - 2 * k;

    let g_hol = eisenstein_g(2 * a + 2, order)?;
    let g_antihol = eisenstein_g(2 * b + 2, order)?.conjugate();
    let mut eis = BTreeMap::new();

    // Top corner: del(F_{2w,0}) = rhs, solved with named kernel symbols.
    let kernel_prefix = format!("kappa_{a}_{b}_{k}");
    let top_rhs = double_rhs_del(a, b, k, 0, order, &g_hol, &mut eis)?;
    let top = solve_del_primitive_named(&top_rhs, two_w, &kernel_prefix)?;

    let mut members: BTreeMap<(i64, i64), RAForm> = BTreeMap::new();
    members.insert((two_w, 0), top.primitive);

    // Antiholomorphic descent: F_{r-1,s+1} = (dbar(F_{r,s}) - rhs) / (s+1).
    for s in 0..two_w {
        let r = two_w - s;
        let prev = members.get(&(r, s)).expect("built in order").clone();
        let rhs = double_rhs_dbar(a, b, k, r, order, &g_antihol, &mut eis)?;
        let next = dbar(&prev).sub(&rhs)?.scale_rat(&rat(1, s + 1));
        members.insert((r - 1, s + 1), next);
    }

    // The one equation not used by the descent: dbar(F_{0,2w}) = rhs. Its
    // qbar^n columns pin every kernel symbol with n >= 1; the qbar^0 symbol
    // never appears (the tower is annihilated) and stays free.
    let final_rhs = double_rhs_dbar(a, b, k, 0, order, &g_antihol, &mut eis)?;
    let diff = dbar(members.get(&(0, two_w)).expect("descent end")).sub(&final_rhs)?;

    let mut assignments: BTreeMap<String, PeriodScalar> = BTreeMap::new();
    for (&(m, n, _), coeff) in diff.series().iter() {
        if m != 0 || n == 0 || coeff.is_zero() {
            continue;
        }
        let name = format!("{kernel_prefix}_{n}");
        if assignments.contains_key(&name) {
            continue;
        }
        let (constant, linear) = coeff.split_affine(&name)?;
        let linear = match linear.as_rational() {
            Some(q) if !q.is_zero() => q,
            _ => continue,
        };
        assignments.insert(name, constant.scale(&(-rat_int(1) / linear)));
    }

    // Every coefficient of the final equation must now vanish; anything left
    // over means the construction itself is broken.
    let mut residual = diff;
    for (name, value) in &assignments {
        residual = residual.substitute_symbol(name, value);
    }
    if !residual.is_zero() {
        return Err(Error::InternalInconsistency(format!(
            "two-Eisenstein family ({a}, {b}, {k}): closing equation leaves residual {}",
            residual.series()
        )));
    }

    // Apply the pinned values and rename the surviving qbar^0 symbol.
    let constant_name = format!("c_{a}_{b}_{k}");
    let free_symbol = PeriodScalar::symbol(&constant_name);
    let kappa_zero = format!("{kernel_prefix}_0");
    for member in members.values_mut() {
        let mut updated = member.clone();
        for (name, value) in &assignments {
            updated = updated.substitute_symbol(name, value);
        }
        *member = updated.substitute_symbol(&kappa_zero, &free_symbol);
    }

    // Exact verification of both systems, identically in the free constant.
    for s in 0..=two_w {
        let r = two_w - s;
        let f_rs = members.get(&(r, s)).expect("member");

        let mut del_line = del(f_rs);
        if s >= 1 {
            let up = members.get(&(r + 1, s - 1)).expect("member");
            del_line = del_line.sub(&up.scale_int(r + 1))?;
        }
        let rhs = double_rhs_del(a, b, k, s, order, &g_hol, &mut eis)?;
        if !del_line.sub(&rhs)?.is_zero() {
            return Err(Error::InternalInconsistency(format!(
                "two-Eisenstein family ({a}, {b}, {k}): del-line at ({r}, {s}) fails"
            )));
        }

        let mut dbar_line = dbar(f_rs);
        if r >= 1 {
            let down = members.get(&(r - 1, s + 1)).expect("member");
            dbar_line = dbar_line.sub(&down.scale_int(s + 1))?;
        }
        let rhs = double_rhs_dbar(a, b, k, r, order, &g_antihol, &mut eis)?;
        if !dbar_line.sub(&rhs)?.is_zero() {
            return Err(Error::InternalInconsistency(format!(
                "two-Eisenstein family ({a}, {b}, {k}): dbar-line at ({r}, {s}) fails"
            )));
        }
    }

    // Collect whatever symbols remain undetermined (the named constant, plus
    // the zeta values baked into the Eisenstein factors are *not* free — only
    // genuinely unassigned kernel symbols count).
    let mut undetermined = vec![constant_name];
    for member in members.values() {
        for symbol in member.series().symbols() {
            if symbol.starts_with(&kernel_prefix) && !undetermined.contains(&symbol) {
                undetermined.push(symbol);
            }
        }
    }
    undetermined.sort();

    Ok(DoubleEisensteinFamily {
        a,
        b,
        k,
        weight: two_w,
        members,
        undetermined_constants: undetermined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{delta_cusp, g2_star};
    use crate::operators::laplace;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_forms_equal(lhs: &RAForm, rhs: &RAForm, what: &str) {
        assert_eq!(lhs.weights(), rhs.weights(), "{what}: weights differ");
        let diff = lhs.sub(rhs).unwrap();
        assert!(
            diff.is_zero(),
            "{what}: series differ, lhs - rhs = {}",
            diff.series()
        );
    }

    #[test]
    fn primitive_of_l_q_matches_hand_computation() {
        let order = 4;
        let f = RAForm::new(3, -1, BiSeries::monomial(order, 1, 0, 1, PeriodScalar::one()))
            .unwrap();
        let solution = solve_del_primitive(&f, 2).unwrap();
        let p = &solution.primitive;
        assert_eq!(p.weights(), (2, 0));
        assert_eq!(p.series().term(1, 0, 0), PeriodScalar::from_frac(1, 2));
        assert_eq!(p.series().term(1, 0, -1), PeriodScalar::from_frac(-1, 2));
        assert_eq!(p.series().term(1, 0, -2), PeriodScalar::from_frac(1, 4));
        assert_eq!(p.series().term(1, 0, -3), PeriodScalar::zero());
        assert!(del(p).sub(&f).unwrap().is_zero(), "back-substitution");
        assert_eq!(solution.free_parameters.len(), order as usize + 1);
        assert_eq!(
            p.series().term(0, 2, -2),
            PeriodScalar::symbol("kappa_2"),
            "kernel symbol at the free position"
        );
        assert!(solution.obstruction_report.is_empty());
    }

    #[test]
    fn primitive_of_l_g4_reproduces_real_eisenstein() {
        let order = 8;
        let g4 = eisenstein_g(4, order).unwrap();
        let solution = solve_del_primitive(&g4.l_shift(1), 2).unwrap();
        let e20 = real_eisenstein(2, 0, order).unwrap();

        // The kernel column (0, n, -2) of E_{2,0} consists of zeta(3)/4 at
        // n = 0 and sigma_3(n)/(4 n^3) at n >= 1; substituting those values
        // for the free symbols recovers E_{2,0} in full.
        let mut resolved = solution.primitive.clone();
        for n in 0..=order {
            let value = e20.series().term(0, n, -2);
            resolved = resolved.substitute_symbol(&format!("kappa_{n}"), &value);
        }
        assert_forms_equal(&resolved, &e20, "primitive of L G4 vs E_{2,0}");
    }

    #[test]
    fn weight_two_star_primitive_is_obstructed() {
        // L * G2star has the constant -1/4 sitting exactly on the kernel
        // column at L^0, so no primitive of target weight 0 exists.
        let f = g2_star(6).l_shift(1);
        match solve_del_primitive(&f, 0) {
            Err(Error::ObstructionViolated { entries }) => {
                assert_eq!(entries.len(), 1);
                assert_eq!((entries[0].m, entries[0].n, entries[0].k), (0, 0, 0));
                assert_eq!(entries[0].reason, "constant-column");
                assert_eq!(entries[0].coefficient, "-1/4");
            }
            other => panic!("expected an obstruction, got {other:?}"),
        }
    }

    #[test]
    fn below_band_residual_is_a_non_terminating_obstruction() {
        // A lone L^{-3} q term sits below the band where the descent for
        // target weight 2 can close, so the recursion never terminates.
        let f = RAForm::new(3, -1, BiSeries::monomial(4, 1, 0, -3, PeriodScalar::one()))
            .unwrap();
        match solve_del_primitive(&f, 2) {
            Err(Error::ObstructionViolated { entries }) => {
                assert_eq!(entries.len(), 1);
                assert_eq!(entries[0].reason, "non-terminating");
                assert_eq!((entries[0].m, entries[0].n, entries[0].k), (1, 0, -4));
            }
            other => panic!("expected an obstruction, got {other:?}"),
        }
        let lenient = solve_del_primitive_lenient(&f, 2, "kappa").unwrap();
        assert_eq!(lenient.obstruction_report.len(), 1);
    }

    #[test]
    fn cusp_form_image_has_a_combinatorial_primitive() {
        let order = 8;
        let delta = delta_cusp(order);
        // Declare L * Delta as the del-image of a weight (12, 0) form.
        let f = RAForm::new(13, -1, delta.series().mul_l_pow(1)).unwrap();
        let solution = solve_del_primitive(&f, 12).unwrap();
        assert!(
            del(&solution.primitive).sub(&f).unwrap().is_zero(),
            "back-substitution"
        );
        assert!(solution.primitive.in_filtration(-12));
    }

    #[test]
    fn random_images_solve_back_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_CAFE);
        for case in 0..25 {
            let order = 5;
            let target_r = rng.gen_range(-3..=5i64);
            let mut s_out = rng.gen_range(-3..=3i64);
            if (target_r + s_out) % 2 != 0 {
                s_out += 1;
            }
            let mut series = BiSeries::zero(order);
            for _ in 0..rng.gen_range(1..8) {
                let m = rng.gen_range(0..=3u32);
                let n = rng.gen_range(0..=3u32);
                let k = rng.gen_range(-4..=3i64);
                let c = PeriodScalar::from_frac(rng.gen_range(-9..=9), rng.gen_range(1..=7));
                series.add_term(m, n, k, c);
            }
            let g = RAForm::new(target_r, s_out, series).unwrap();
            let image = del(&g);
            let solution = solve_del_primitive(&image, target_r)
                .unwrap_or_else(|e| panic!("case {case}: unexpected failure {e}"));
            assert!(
                del(&solution.primitive).sub(&image).unwrap().is_zero(),
                "case {case}: del(primitive) = del(g)"
            );
        }
    }

    #[test]
    fn double_eisenstein_1_1_0_matches_shuffle_products() {
        let order = 8;
        let family = build_double_eisenstein(1, 1, 0, order).unwrap();
        assert_eq!(family.weight(), 4);
        assert_eq!(family.indices(), (1, 1, 0));
        assert_eq!(family.undetermined_constants(), ["c_1_1_0"]);

        let e20 = real_eisenstein(2, 0, order).unwrap();
        let e11 = real_eisenstein(1, 1, order).unwrap();
        let e02 = real_eisenstein(0, 2, order).unwrap();
        let products: Vec<((i64, i64), RAForm)> = vec![
            ((4, 0), e20.mul(&e20).scale_rat(&rat(1, 2))),
            ((3, 1), e20.mul(&e11)),
            (
                (2, 2),
                e20.mul(&e02)
                    .add(&e11.mul(&e11).scale_rat(&rat(1, 2)))
                    .unwrap(),
            ),
            ((1, 3), e02.mul(&e11)),
            ((0, 4), e02.mul(&e02).scale_rat(&rat(1, 2))),
        ];

        // Each member differs from its shuffle product by the *same* multiple
        // of the tower (-1)^s C(4, s) L^{-4} (the one-dimensional kernel of
        // the two systems).
        let mut lambda: Option<PeriodScalar> = None;
        for ((r, s), product) in &products {
            let member = family.member(*r, *s).unwrap();
            let difference = member.sub(product).unwrap();
            let mut tower_coeff = binomial_i64(4, *s);
            if s % 2 == 1 {
                tower_coeff = -tower_coeff;
            }
            let lam = difference
                .series()
                .term(0, 0, -4)
                .scale(&(rat_int(1) / tower_coeff.clone()));
            let tower = RAForm::new(
                *r,
                *s,
                BiSeries::monomial(order, 0, 0, -4, lam.scale(&tower_coeff)),
            )
            .unwrap();
            assert_forms_equal(&difference, &tower, "difference is a tower multiple");
            match &lambda {
                None => lambda = Some(lam),
                Some(previous) => assert_eq!(previous, &lam, "lambda uniform across members"),
            }
        }

        // Solving lambda = 0 for the free constant recovers the products
        // exactly, all at once.
        let lambda = lambda.unwrap();
        let (constant, linear) = lambda.split_affine("c_1_1_0").unwrap();
        let linear = linear.as_rational().expect("rational linear coefficient");
        let c_star = constant.scale(&(-rat_int(1) / linear));
        for ((r, s), product) in &products {
            let resolved = family
                .member(*r, *s)
                .unwrap()
                .substitute_symbol("c_1_1_0", &c_star);
            assert_forms_equal(&resolved, product, "member equals shuffle product");
        }
    }

    #[test]
    fn double_eisenstein_1_1_1_satisfies_frozen_systems() {
        let order = 8;
        let family = build_double_eisenstein(1, 1, 1, order).unwrap();
        assert_eq!(family.weight(), 2);
        let f20 = family.member(2, 0).unwrap();
        let f11 = family.member(1, 1).unwrap();
        let f02 = family.member(0, 2).unwrap();
        let g4 = eisenstein_g(4, order).unwrap();
        let g4bar = g4.conjugate();
        let e20 = real_eisenstein(2, 0, order).unwrap();
        let e11 = real_eisenstein(1, 1, order).unwrap();
        let e02 = real_eisenstein(0, 2, order).unwrap();

        assert_forms_equal(
            &del(f20),
            &g4.mul(&e11).l_shift(2).scale_int(2),
            "del F_{2,0} = 2 L^2 G4 E_{1,1}",
        );
        assert_forms_equal(
            &del(f11).sub(&f20.scale_int(2)).unwrap(),
            &g4.mul(&e02).l_shift(2).scale_int(4),
            "del F_{1,1} - 2 F_{2,0} = 4 L^2 G4 E_{0,2}",
        );
        assert_forms_equal(
            &del(f02).sub(f11).unwrap(),
            &RAForm::zero(1, 1, order).unwrap(),
            "del F_{0,2} = F_{1,1}",
        );

        assert_forms_equal(
            &dbar(f02),
            &g4bar.mul(&e11).l_shift(2).scale_int(2),
            "dbar F_{0,2} = 2 L^2 conj(G4) E_{1,1}",
        );
        assert_forms_equal(
            &dbar(f11).sub(&f02.scale_int(2)).unwrap(),
            &g4bar.mul(&e20).l_shift(2).scale_int(4),
            "dbar F_{1,1} - 2 F_{0,2} = 4 L^2 conj(G4) E_{2,0}",
        );
        assert_forms_equal(
            &dbar(f20).sub(f11).unwrap(),
            &RAForm::zero(1, 1, order).unwrap(),
            "dbar F_{2,0} = F_{1,1}",
        );

        // Laplace row: exact including the free constant, because the tower
        // is annihilated by (laplace + 2) at these weights.
        let lhs = laplace(f11).add(&f11.scale_int(2)).unwrap();
        let rhs = g4.mul(&g4bar).l_shift(3).scale_int(-4);
        assert_forms_equal(&lhs, &rhs, "(laplace + 2) F_{1,1} = -4 L^3 G4 conj(G4)");
    }

    #[test]
    fn double_eisenstein_1_1_2_is_l_squared_combination_up_to_constant() {
        let order = 8;
        let family = build_double_eisenstein(1, 1, 2, order).unwrap();
        assert_eq!(family.weight(), 0);
        let f00 = family.member(0, 0).unwrap();
        let g4 = eisenstein_g(4, order).unwrap();
        let e20 = real_eisenstein(2, 0, order).unwrap();
        let e11 = real_eisenstein(1, 1, order).unwrap();
        let e02 = real_eisenstein(0, 2, order).unwrap();

        assert_forms_equal(&del(f00), &g4.mul(&e02).l_shift(3), "del F_{0,0} = L^3 G4 E_{0,2}");
        assert_forms_equal(
            &dbar(f00),
            &g4.conjugate().mul(&e20).l_shift(3),
            "dbar F_{0,0} = L^3 conj(G4) E_{2,0}",
        );

        let target = e20
            .mul(&e02)
            .sub(&e11.mul(&e11).scale_rat(&rat(1, 4)))
            .unwrap()
            .l_shift(2);
        let difference = f00.sub(&target).unwrap();
        let additive = RAForm::new(
            0,
            0,
            BiSeries::monomial(order, 0, 0, 0, difference.series().term(0, 0, 0)),
        )
        .unwrap();
        assert_forms_equal(
            &difference,
            &additive,
            "F_{0,0} = L^2 (E_{2,0} E_{0,2} - E_{1,1}^2 / 4) + constant",
        );
    }

    #[test]
    fn double_eisenstein_boundary_errors() {
        match build_double_eisenstein(2, 3, 0, 4) {
            Err(Error::CuspCorrectionRequired { holomorphic_weight }) => {
                assert_eq!(holomorphic_weight, 12);
            }
            other => panic!("expected the cusp-correction error, got {other:?}"),
        }
        assert!(build_double_eisenstein(0, 1, 0, 4).is_err(), "a >= 1");
        assert!(build_double_eisenstein(1, 1, 3, 4).is_err(), "k <= min(2a, 2b)");
    }
}

//! Differential operators on weighted expansions.
//!
//! With `L = i*pi*(z - zbar)` the raising and lowering operators are
//!
//! ```text
//!     del_r    = (z - zbar) d/dz    + r     : (r, s) -> (r+1, s-1)
//!     dbar_s   = (zbar - z) d/dzbar + s     : (r, s) -> (r-1, s+1)
//! ```
//!
//! Acting termwise on `L^k q^m qbar^n`:
//!
//! ```text
//!     del_r  : multiply by (2m L + r + k)
//!     dbar_s : multiply by (2n L + s + k)
//! ```
//!
//! Together with `h = r - s` these generate a copy of sl2:
//! `[h, del] = 2 del`, `[h, dbar] = -2 dbar`, `[del, dbar] = h`.
//! The bigraded Laplacian is
//!
//! ```text
//!     laplace_{r,s} = -dbar_{s-1} del_r + r(s-1) = -del_{r-1} dbar_s + s(r-1),
//! ```
//!
//! which acts termwise as multiplication by
//! `-4mn L^2 - 2(kn + km + rn + sm) L - k(k + r + s - 1)`. (The middle
//! coefficient is forced to be `-2(...)` by expanding the composition above;
//! it is also the only sign for which the Laplacian has the real-analytic
//! Eisenstein series as eigenfunctions with eigenvalue `-w`.)
//!
//! The normalized derivatives `dz = (1/(i*pi)) d/dz` and
//! `dzbar = -(1/(i*pi)) d/dzbar` act termwise as
//! `(k L^{k-1} + 2m L^k) q^m qbar^n` and `(k L^{k-1} + 2n L^k) q^m qbar^n`
//! and satisfy `del f = L*dz(f) + r*f`, `dbar f = L*dzbar(f) + s*f`
//! exactly. They are the building blocks for the Rankin-Cohen brackets and
//! the mixed derivative below; each bracket is implemented with `d/dz`
//! replaced by `dz`, which rescales it by a uniform nonzero constant.

use crate::series::{BiSeries, RAForm};

/// Raising operator `del_r`; output weights `(r+1, s-1)`.
pub fn del(f: &RAForm) -> RAForm {
    let (r, s) = f.weights();
    let series = del_series(f.series(), r);
    RAForm::new(r + 1, s - 1, series).expect("parity preserved by del")
}

/// Termwise raising operator at explicit weight `r` (used internally when a
/// series is processed at shifted weights).
pub fn del_series(f: &BiSeries, r: i64) -> BiSeries {
    f.map_terms(|m, n, k, c, out| {
        // (2m L + r + k) * c L^k q^m qbar^n
        if m != 0 {
            out.add_term(m, n, k + 1, c.scale(&crate::scalar::rat_int(2 * m as i64)));
        }
        let lin = r + k;
        if lin != 0 {
            out.add_term(m, n, k, c.scale(&crate::scalar::rat_int(lin)));
        }
    })
}

/// Lowering operator `dbar_s`; output weights `(r-1, s+1)`.
pub fn dbar(f: &RAForm) -> RAForm {
    let (r, s) = f.weights();
    let series = dbar_series(f.series(), s);
    RAForm::new(r - 1, s + 1, series).expect("parity preserved by dbar")
}

/// Termwise lowering operator at explicit weight `s`.
pub fn dbar_series(f: &BiSeries, s: i64) -> BiSeries {
    f.map_terms(|m, n, k, c, out| {
        if n != 0 {
            out.add_term(m, n, k + 1, c.scale(&crate::scalar::rat_int(2 * n as i64)));
        }
        let lin = s + k;
        if lin != 0 {
            out.add_term(m, n, k, c.scale(&crate::scalar::rat_int(lin)));
        }
    })
}

/// Bigraded Laplacian (termwise form); weights unchanged.
pub fn laplace(f: &RAForm) -> RAForm {
    let (r, s) = f.weights();
    let series = f.series().map_terms(|m, n, k, c, out| {
        let m_i = m as i64;
        let n_i = n as i64;
        // -4mn L^2
        if m != 0 && n != 0 {
            out.add_term(m, n, k + 2, c.scale(&crate::scalar::rat_int(-4 * m_i * n_i)));
        }
        // -2(kn + km + rn + sm) L
        let lin = -2 * (k * n_i + k * m_i + r * n_i + s * m_i);
        if lin != 0 {
            out.add_term(m, n, k + 1, c.scale(&crate::scalar::rat_int(lin)));
        }
        // -k(k + r + s - 1)
        let cst = -k * (k + r + s - 1);
        if cst != 0 {
            out.add_term(m, n, k, c.scale(&crate::scalar::rat_int(cst)));
        }
    });
    f.with_series(series)
}

/// Laplacian via the first factorization `-dbar_{s-1} del_r + r(s-1)`.
/// Must agree exactly with [`laplace`]; kept as an independent code path for
/// cross-checking.
pub fn laplace_via_del(f: &RAForm) -> RAForm {
    let (r, s) = f.weights();
    let composed = dbar(&del(f));
    composed
        .neg()
        .add(&f.scale_int(r * (s - 1)))
        .expect("weights return to (r,s)")
}

/// Laplacian via the second factorization `-del_{r-1} dbar_s + s(r-1)`.
pub fn laplace_via_dbar(f: &RAForm) -> RAForm {
    let (r, s) = f.weights();
    let composed = del(&dbar(f));
    composed
        .neg()
        .add(&f.scale_int(s * (r - 1)))
        .expect("weights return to (r,s)")
}

/// The `h`-degree `r - s` (eigenvalue of the sl2 Cartan element).
pub fn h_degree(f: &RAForm) -> i64 {
    f.h_degree()
}

/// Normalized holomorphic derivative `(1/(i*pi)) d/dz` on a bare series.
/// Termwise: `L^k q^m qbar^n -> (k L^{k-1} + 2m L^k) q^m qbar^n`.
///
/// The output has no canonical weight pair (the derivative of a weight-(r,s)
/// form splits across two weights), hence the bare [`BiSeries`] return type.
pub fn dz_series(f: &BiSeries) -> BiSeries {
    f.map_terms(|m, n, k, c, out| {
        if k != 0 {
            out.add_term(m, n, k - 1, c.scale(&crate::scalar::rat_int(k)));
        }
        if m != 0 {
            out.add_term(m, n, k, c.scale(&crate::scalar::rat_int(2 * m as i64)));
        }
    })
}

/// Normalized holomorphic derivative of a weighted form (weights dropped).
pub fn dz(f: &RAForm) -> BiSeries {
    dz_series(f.series())
}

/// Normalized antiholomorphic derivative `-(1/(i*pi)) d/dzbar`, the complex
/// conjugate of [`dz_series`]. Termwise: `(k L^{k-1} + 2n L^k)`.
pub fn dzbar_series(f: &BiSeries) -> BiSeries {
    f.map_terms(|m, n, k, c, out| {
        if k != 0 {
            out.add_term(m, n, k - 1, c.scale(&crate::scalar::rat_int(k)));
        }
        if n != 0 {
            out.add_term(m, n, k, c.scale(&crate::scalar::rat_int(2 * n as i64)));
        }
    })
}

/// Normalized antiholomorphic derivative of a weighted form (weights dropped).
pub fn dzbar(f: &RAForm) -> BiSeries {
    dzbar_series(f.series())
}

/// First Rankin-Cohen bracket
/// `[f,g]_1 = r2 * dz(f) * g - r1 * f * dz(g)`, output weights
/// `(r1 + r2 + 2, s1 + s2)`. Antisymmetric when the arguments share weights.
pub fn rc_bracket1(f: &RAForm, g: &RAForm) -> RAForm {
    let (r1, s1) = f.weights();
    let (r2, s2) = g.weights();
    let term1 = dz(f).mul(g.series()).scale_rat(&crate::scalar::rat_int(r2));
    let term2 = f.series().mul(&dz(g)).scale_rat(&crate::scalar::rat_int(r1));
    RAForm::new(r1 + r2 + 2, s1 + s2, term1.sub(&term2)).expect("bracket parity")
}

/// Second Rankin-Cohen bracket
/// `[f,g]_2 = r2(r2+1)/2 * dz^2(f) * g - (r1+1)(r2+1) * dz(f) * dz(g)
///           + r1(r1+1)/2 * f * dz^2(g)`,
/// output weights `(r1 + r2 + 4, s1 + s2)`.
pub fn rc_bracket2(f: &RAForm, g: &RAForm) -> RAForm {
    let (r1, s1) = f.weights();
    let (r2, s2) = g.weights();
    let dzf = dz(f);
    let dzg = dz(g);
    let dz2f = dz_series(&dzf);
    let dz2g = dz_series(&dzg);
    let half = |a: i64| crate::scalar::rat(a * (a + 1), 2);
    let t1 = dz2f.mul(g.series()).scale_rat(&half(r2));
    let t2 = dzf
        .mul(&dzg)
        .scale_rat(&crate::scalar::rat_int((r1 + 1) * (r2 + 1)));
    let t3 = f.series().mul(&dz2g).scale_rat(&half(r1));
    RAForm::new(r1 + r2 + 4, s1 + s2, t1.sub(&t2).add(&t3)).expect("bracket parity")
}

/// Symmetric second-order bracket
/// `(f,g)_2 = s1 r2 * dz(f) * dzbar(g) + s2 r1 * dzbar(f) * dz(g)
///           - r1 s1 * f * dz(dzbar(g)) - r2 s2 * g * dz(dzbar(f))`,
/// output weights `(r1 + r2 + 2, s1 + s2 + 2)`. Symmetric in `f` and `g`.
pub fn sym_bracket2(f: &RAForm, g: &RAForm) -> RAForm {
    let (r1, s1) = f.weights();
    let (r2, s2) = g.weights();
    let ri = crate::scalar::rat_int;
    let t1 = dz(f).mul(&dzbar(g)).scale_rat(&ri(s1 * r2));
    let t2 = dzbar(f).mul(&dz(g)).scale_rat(&ri(s2 * r1));
    let t3 = f.series().mul(&dz_series(&dzbar(g))).scale_rat(&ri(r1 * s1));
    let t4 = g.series().mul(&dz_series(&dzbar(f))).scale_rat(&ri(r2 * s2));
    RAForm::new(r1 + r2 + 2, s1 + s2 + 2, t1.add(&t2).sub(&t3).sub(&t4))
        .expect("bracket parity")
}

/// Mixed derivative `D f = (1/L)(s * del_r - r * dbar_s) f`, split into its
/// two homogeneous components: the first lies in weights `(r+2, s)`, the
/// second in `(r, s+2)`. Both divisions by `L` are exact shifts.
pub fn d_mixed(f: &RAForm) -> (RAForm, RAForm) {
    let (r, s) = f.weights();
    let plus = del(f).l_shift(-1).scale_int(s);
    let minus = dbar(f).l_shift(-1).scale_int(-r);
    debug_assert_eq!(plus.weights(), (r + 2, s));
    debug_assert_eq!(minus.weights(), (r, s + 2));
    (plus, minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::PeriodScalar;
    use crate::series::BiSeries;

    fn monomial_form(r: i64, s: i64, m: u32, n: u32, k: i64) -> RAForm {
        RAForm::new(r, s, BiSeries::monomial(8, m, n, k, PeriodScalar::one())).unwrap()
    }

    #[test]
    fn del_kills_l() {
        // del(L) at weights (-1,-1): (2*0*L + (-1) + 1) = 0.
        let l = RAForm::l_form(8);
        assert!(del(&l).is_zero());
        assert!(dbar(&l).is_zero());
    }

    #[test]
    fn del_on_q_at_weight_two() {
        // (r,k,m) = (2,0,1): del(q) = (2L + 2) q.
        let f = monomial_form(2, 0, 1, 0, 0);
        let df = del(&f);
        assert_eq!(df.weights(), (3, -1));
        assert_eq!(df.series().term(1, 0, 1), PeriodScalar::from_int(2));
        assert_eq!(df.series().term(1, 0, 0), PeriodScalar::from_int(2));
        assert_eq!(df.series().term_count(), 2);
    }

    #[test]
    fn dz_of_l_is_one_and_dz_of_q_is_2q() {
        let l = RAForm::l_form(8);
        let d = dz(&l);
        assert_eq!(d.term(0, 0, 0), PeriodScalar::one());
        assert_eq!(d.term_count(), 1);
        // dz(q) = 2q: coefficient 2 at (1,0,0), pinned by del = L*dz + r.
        let q = monomial_form(0, 0, 1, 0, 0);
        let dq = dz(&q);
        assert_eq!(dq.term(1, 0, 0), PeriodScalar::from_int(2));
        assert_eq!(dq.term_count(), 1);
        assert!(dz(&RAForm::one(8)).is_zero());
    }

    #[test]
    fn del_decomposes_as_l_dz_plus_r() {
        // del f = L*dz f + r*f on a mixed monomial, all weights.
        for (r, s) in [(0, 0), (3, -1), (2, 4), (-2, 2)] {
            let f = monomial_form(r, s, 2, 1, -3);
            let lhs = del(&f).series().clone();
            let rhs = dz(&f)
                .mul_l_pow(1)
                .add(&f.series().scale_rat(&crate::scalar::rat_int(r)));
            assert_eq!(lhs, rhs, "weights ({r},{s})");
            let lhs_bar = dbar(&f).series().clone();
            let rhs_bar = dzbar(&f)
                .mul_l_pow(1)
                .add(&f.series().scale_rat(&crate::scalar::rat_int(s)));
            assert_eq!(lhs_bar, rhs_bar, "weights ({r},{s})");
        }
    }

    #[test]
    fn sl2_commutators_on_monomials() {
        for (r, s) in [(0, 2), (4, 0), (1, 1), (-1, 3)] {
            for (m, n, k) in [(0, 0, 0), (1, 0, 0), (2, 3, -2), (0, 1, 4)] {
                let f = monomial_form(r, s, m, n, k);
                // [del, dbar] = del.dbar - dbar.del = h = r - s.
                let lhs = del(&dbar(&f)).sub(&dbar(&del(&f))).unwrap();
                let rhs = f.scale_int(r - s);
                assert_eq!(lhs.series(), rhs.series());
            }
        }
    }

    #[test]
    fn laplacian_factorizations_agree() {
        for (r, s) in [(0, 0), (2, 0), (1, 1), (3, -1), (-2, 4)] {
            for (m, n, k) in [(0, 0, 1), (1, 0, 0), (1, 2, -2), (3, 3, 2)] {
                let f = monomial_form(r, s, m, n, k);
                let a = laplace(&f);
                let b = laplace_via_del(&f);
                let c = laplace_via_dbar(&f);
                assert_eq!(a, b, "termwise vs -dbar.del at ({r},{s}),({m},{n},{k})");
                assert_eq!(a, c, "termwise vs -del.dbar at ({r},{s}),({m},{n},{k})");
            }
        }
    }

    #[test]
    fn laplacian_comm_with_l_multiplication() {
        // (laplace + w)(L f) = L * laplace(f), with w = total weight of L*f.
        let f = monomial_form(3, 1, 2, 1, -1);
        let lf = f.l_shift(1);
        let w = lf.total_weight();
        let lhs = laplace(&lf).add(&lf.scale_int(w)).unwrap();
        let rhs = laplace(&f).l_shift(1);
        assert_eq!(lhs.series(), rhs.series());
    }

    #[test]
    fn kernel_of_del_is_l_minus_r_times_antiholomorphic() {
        // del at weights (r, s) kills L^{-r} * qbar^n.
        for (r, s, n) in [(2, 0, 3), (0, 2, 1), (-1, 1, 0), (4, 2, 2)] {
            let f = monomial_form(r, s, 0, n, -r);
            assert!(del(&f).is_zero(), "del should kill L^{} qbar^{}", -r, n);
        }
    }

    #[test]
    fn rc1_antisymmetry_for_equal_weights() {
        let f = monomial_form(4, 0, 1, 0, 0);
        let b = rc_bracket1(&f, &f);
        assert!(b.is_zero());
        assert_eq!(b.weights(), (10, 0));
    }

    #[test]
    fn sym_bracket2_is_symmetric() {
        let f = monomial_form(2, 0, 1, 1, -1);
        let g = monomial_form(1, 1, 2, 0, 1);
        let fg = sym_bracket2(&f, &g);
        let gf = sym_bracket2(&g, &f);
        assert_eq!(fg, gf);
        assert_eq!(fg.weights(), (5, 3));
    }

    #[test]
    fn d_mixed_components_and_weights() {
        let f = monomial_form(3, 1, 1, 1, 0);
        let (plus, minus) = d_mixed(&f);
        assert_eq!(plus.weights(), (5, 1));
        assert_eq!(minus.weights(), (3, 3));
        // L * (plus + minus) = s*del f - r*dbar f, exactly.
        let (r, s) = f.weights();
        let lhs = plus
            .series()
            .add(minus.series())
            .mul_l_pow(1);
        let rhs = del(&f)
            .series()
            .scale_rat(&crate::scalar::rat_int(s))
            .sub(&dbar(&f).series().scale_rat(&crate::scalar::rat_int(r)));
        assert_eq!(lhs, rhs);
    }
}

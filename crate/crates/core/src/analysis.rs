//! Numerical evaluation of expansions at points of the upper half-plane,
//! modularity residuals, Petersson-type inner products by quadrature over
//! the fundamental domain, and least-squares identity fitting.
//!
//! A form with expansion `sum coeff * L^k q^m qbar^n` becomes a function of
//! `z = x + iy` through `q = exp(2 pi i z)` and `L = -2 pi y`. Truncation at
//! order `N` is controlled by the geometric tail bound
//! `scale * |q|^{N+1} / (1 - |q|)`, which must stay below the configured
//! target (the bound is a heuristic: it extrapolates the largest seen
//! coefficient magnitude to the unseen ones).
//!
//! The pairing of two forms with equal `h`-degree `h = r - s` is
//!
//! ```text
//! <f, g> = integral over D of  f(z) conj(g(z)) y^n  dx dy / y^2,
//! ```
//!
//! over the standard fundamental domain `D = {|z| >= 1, |Re z| <= 1/2}`,
//! computed by tensor Gauss-Legendre quadrature with per-column lower
//! limits on the circular arc and a flat cusp cutoff `y_max`; integrands
//! must decay at the cusp, which is checked through the constant parts.
//! An independent adaptive Simpson integrator serves as a cross-check
//! oracle. All reductions are chunked and merged in a fixed order, so
//! values are reproducible across thread counts.

use std::collections::BTreeMap;

use num::complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::KahanSum;
use crate::series::RAForm;

/// Settings for numeric evaluation: truncation order, evaluation target,
/// and values for named symbols appearing in coefficients.
#[derive(Debug, Clone)]
pub struct EvalConfig {
    order: u32,
    target_abs_error: f64,
    symbols: BTreeMap<String, f64>,
}

impl EvalConfig {
    /// Builds a configuration; the error target must be positive.
    pub fn new(order: u32, target_abs_error: f64) -> Result<Self> {
        if target_abs_error.is_nan() || target_abs_error <= 0.0 {
            return Err(Error::domain(
                "EvalConfig::new",
                "target_abs_error must be positive",
            ));
        }
        Ok(EvalConfig {
            order,
            target_abs_error,
            symbols: BTreeMap::new(),
        })
    }

    /// Default settings for desk work: order 24, absolute target 1e-9.
    pub fn standard() -> Self {
        EvalConfig {
            order: 24,
            target_abs_error: 1e-9,
            symbols: BTreeMap::new(),
        }
    }

    /// Adds a named-symbol assignment.
    pub fn with_symbol(mut self, name: &str, value: f64) -> Self {
        self.symbols.insert(name.to_owned(), value);
        self
    }

    /// Truncation order used for evaluation.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Absolute error target for tail bounds and zeta values.
    pub fn target_abs_error(&self) -> f64 {
        self.target_abs_error
    }

    /// The symbol assignment table.
    pub fn symbols(&self) -> &BTreeMap<String, f64> {
        &self.symbols
    }
}

/// A form compiled to plain floating-point coefficients for repeated
/// evaluation.
#[derive(Debug, Clone)]
pub struct NumericSeries {
    r: i64,
    s: i64,
    order: u32,
    /// `(m, n, k, coefficient)` tuples in lexicographic order.
    terms: Vec<(u32, u32, i64, f64)>,
    target_abs_error: f64,
}

impl NumericSeries {
    /// Compiles a form under the given configuration. Symbols without an
    /// assignment are reported as errors.
    pub fn compile(f: &RAForm, cfg: &EvalConfig) -> Result<Self> {
        let order = f.order().min(cfg.order);
        let truncated = f.truncated(order);
        let mut terms = Vec::new();
        for (&(m, n, k), coeff) in truncated.series().iter() {
            let value = coeff.numeric_value_with(&cfg.symbols, cfg.target_abs_error)?;
            if value != 0.0 {
                terms.push((m, n, k, value));
            }
        }
        Ok(NumericSeries {
            r: f.weights().0,
            s: f.weights().1,
            order,
            terms,
            target_abs_error: cfg.target_abs_error,
        })
    }

    /// The weights carried over from the compiled form.
    pub fn weights(&self) -> (i64, i64) {
        (self.r, self.s)
    }

    /// Effective truncation order.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Evaluates at `z` in the upper half-plane, enforcing the geometric
    /// tail bound.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let y = z.im;
        if y.is_nan() || y <= 0.0 {
            return Err(Error::domain(
                "eval",
                format!("evaluation point must have Im z > 0, got {}", y),
            ));
        }
        let big_l = -2.0 * std::f64::consts::PI * y;
        let q_abs = (-2.0 * std::f64::consts::PI * y).exp();

        // Heuristic tail bound: the largest seen |coeff * L^k| times the
        // geometric tail of |q|^{m+n} past the truncation order.
        let mut scale = 0.0f64;
        for &(_, _, k, c) in &self.terms {
            scale = scale.max((c * big_l.powi(k as i32)).abs());
        }
        let bound = scale * q_abs.powi(self.order as i32 + 1) / (1.0 - q_abs);
        if bound.is_nan() || bound > self.target_abs_error {
            return Err(Error::TailTooLarge {
                bound,
                target: self.target_abs_error,
            });
        }

        // Power tables for q^m and conj(q)^n.
        let q = (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * z).exp();
        let qbar = q.conj();
        let mut q_pow = vec![Complex64::new(1.0, 0.0); self.order as usize + 1];
        let mut qbar_pow = vec![Complex64::new(1.0, 0.0); self.order as usize + 1];
        for i in 1..=self.order as usize {
            q_pow[i] = q_pow[i - 1] * q;
            qbar_pow[i] = qbar_pow[i - 1] * qbar;
        }

        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        for &(m, n, k, c) in &self.terms {
            let term = q_pow[m as usize] * qbar_pow[n as usize] * (c * big_l.powi(k as i32));
            re.add(term.re);
            im.add(term.im);
        }
        Ok(Complex64::new(re.value(), im.value()))
    }
}

/// One-shot evaluation of a form at a point.
pub fn eval_series(f: &RAForm, z: Complex64, cfg: &EvalConfig) -> Result<Complex64> {
    NumericSeries::compile(f, cfg)?.eval(z)
}

fn complex_pow_i64(base: Complex64, exponent: i64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..exponent.unsigned_abs() {
        acc *= base;
    }
    if exponent < 0 {
        acc = 1.0 / acc;
    }
    acc
}

/// Residual of the inversion transformation law at `z`:
/// `|f(-1/z) - z^r zbar^s f(z)|`. The translation law holds exactly by
/// construction of the expansions, so only the inversion is measured.
pub fn modularity_residual(f: &RAForm, z: Complex64, cfg: &EvalConfig) -> Result<f64> {
    let compiled = NumericSeries::compile(f, cfg)?;
    let inverted = -1.0 / z;
    let lhs = compiled.eval(inverted)?;
    let (r, s) = compiled.weights();
    let factor = complex_pow_i64(z, r) * complex_pow_i64(z.conj(), s);
    let rhs = factor * compiled.eval(z)?;
    Ok((lhs - rhs).norm())
}

// ---------------------------------------------------------------------------
// Quadrature over the fundamental domain
// ---------------------------------------------------------------------------

/// Tensor-product quadrature description: `nx` Gauss-Legendre nodes on
/// `x in [-1/2, 1/2]`, and for each `x` column `ny` nodes on
/// `y in [sqrt(1 - x^2), y_max]`, so every node lies in the closed
/// fundamental domain.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    nx: usize,
    ny: usize,
    y_max: f64,
}

impl QuadratureGrid {
    /// Builds a grid; node counts must be at least 2 and the cusp cutoff
    /// must lie above the arc.
    pub fn new(nx: usize, ny: usize, y_max: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::domain(
                "QuadratureGrid::new",
                "need at least 2 nodes per axis",
            ));
        }
        if y_max.is_nan() || y_max <= 1.0 {
            return Err(Error::domain(
                "QuadratureGrid::new",
                "y_max must exceed the height of the arc",
            ));
        }
        Ok(QuadratureGrid { nx, ny, y_max })
    }

    /// The default 64 x 64 grid with cusp cutoff 6.
    pub fn standard() -> Self {
        QuadratureGrid {
            nx: 64,
            ny: 64,
            y_max: 6.0,
        }
    }

    /// Node count along `x`.
    pub fn nx(&self) -> usize {
        self.nx
    }

    /// Node count along `y`.
    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Cusp cutoff height.
    pub fn y_max(&self) -> f64 {
        self.y_max
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre polynomial from the standard cosine initial guesses.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Recurrence: (j+1) P_{j+1} = (2j+1) x P_j - j P_{j-1}.
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 1..n {
                let p2 = ((2 * j + 1) as f64 * x * p1 - j as f64 * p0) / (j + 1) as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let delta = p1 / dp;
            x -= delta;
            if delta.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Applies the grid to an integrand and merges column sums in order.
fn quadrature<F>(grid: &QuadratureGrid, integrand: F) -> Result<Complex64>
where
    F: Fn(Complex64, f64) -> Result<Complex64> + Sync,
{
    let (xn, xw) = gauss_legendre(grid.nx);
    let (yn, yw) = gauss_legendre(grid.ny);
    let columns: Vec<Result<(KahanSum, KahanSum)>> = (0..grid.nx)
        .into_par_iter()
        .map(|i| {
            let x = xn[i] * 0.5;
            let y_lo = (1.0 - x * x).sqrt();
            let half_span = (grid.y_max - y_lo) * 0.5;
            let mid = (grid.y_max + y_lo) * 0.5;
            let mut re = KahanSum::new();
            let mut im = KahanSum::new();
            for j in 0..grid.ny {
                let y = mid + half_span * yn[j];
                let value = integrand(Complex64::new(x, y), y)?;
                let weight = xw[i] * 0.5 * yw[j] * half_span;
                re.add(weight * value.re);
                im.add(weight * value.im);
            }
            Ok((re, im))
        })
        .collect();
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for column in columns {
        let (cre, cim) = column?;
        re.merge(cre);
        im.merge(cim);
    }
    Ok(Complex64::new(re.value(), im.value()))
}

/// Admissibility check for the pairing integral.
///
/// When the `h`-degrees agree the integrand transforms with weight `(0, 0)`
/// and the integral is the invariant pairing; it converges whenever at least
/// one constant part vanishes (the decaying factor suppresses the cusp).
/// When the `h`-degrees differ the integral is still well defined on the
/// fundamental domain provided one factor decays — this is the truncated
/// projection functional used to test orthogonality against a cusp form of
/// a different weight — so only the doubly non-decaying case is rejected.
fn check_pairing_domain(f: &RAForm, g: &RAForm) -> Result<()> {
    let f_constant = !f.constant_part().is_empty();
    let g_constant = !g.constant_part().is_empty();
    if f_constant && g_constant {
        if f.h_degree() != g.h_degree() {
            return Err(Error::DegreeMismatch {
                hf: f.h_degree(),
                hg: g.h_degree(),
            });
        }
        return Err(Error::NonDecayingIntegrand);
    }
    Ok(())
}

/// Petersson-type pairing `<f, g> = int_D f conj(g) y^{n-2} dx dy` by
/// Gauss-Legendre quadrature.
///
/// Requires equal `h`-degrees and an integrand that decays at the cusp
/// (at most one of the two forms may have a nonzero constant part).
pub fn petersson(
    f: &RAForm,
    g: &RAForm,
    n: i64,
    grid: &QuadratureGrid,
    cfg: &EvalConfig,
) -> Result<Complex64> {
    check_pairing_domain(f, g)?;
    let cf = NumericSeries::compile(f, cfg)?;
    let cg = NumericSeries::compile(g, cfg)?;
    quadrature(grid, |z, y| {
        Ok(cf.eval(z)? * cg.eval(z)?.conj() * y.powi(n as i32 - 2))
    })
}

/// Quadrature L2 scale `sqrt(sum w |f|^2 y^{n-2})` over the same truncated
/// grid as [`petersson`]. By positivity of the weights this is the exact
/// Cauchy-Schwarz companion of the pairing sum, so
/// `|petersson(f,g,n,grid)| <= grid_norm(f) * grid_norm(g)` holds for the
/// computed values; no cusp decay is required since the domain is bounded.
pub fn grid_norm(f: &RAForm, n: i64, grid: &QuadratureGrid, cfg: &EvalConfig) -> Result<f64> {
    let cf = NumericSeries::compile(f, cfg)?;
    let value = quadrature(grid, |z, y| {
        Ok(Complex64::new(cf.eval(z)?.norm_sqr() * y.powi(n as i32 - 2), 0.0))
    })?;
    Ok(value.re.max(0.0).sqrt())
}

/// Adaptive Simpson integration on `[a, b]` with absolute target `eps`.
fn adaptive_simpson<F>(f: &F, a: f64, b: f64, eps: f64, depth: u32) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    fn simpson(fa: Complex64, fm: Complex64, fb: Complex64, h: f64) -> Complex64 {
        (fa + 4.0 * fm + fb) * (h / 6.0)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F>(
        f: &F,
        a: f64,
        m: f64,
        b: f64,
        fa: Complex64,
        fm: Complex64,
        fb: Complex64,
        whole: Complex64,
        eps: f64,
        depth: u32,
    ) -> Result<Complex64>
    where
        F: Fn(f64) -> Result<Complex64>,
    {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm)?;
        let frm = f(rm)?;
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() <= 15.0 * eps {
            return Ok(left + right + delta / 15.0);
        }
        let half = 0.5 * eps;
        Ok(
            recurse(f, a, lm, m, fa, flm, fm, left, half, depth - 1)?
                + recurse(f, m, rm, b, fm, frm, fb, right, half, depth - 1)?,
        )
    }
    let m = 0.5 * (a + b);
    let fa = f(a)?;
    let fm = f(m)?;
    let fb = f(b)?;
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, m, b, fa, fm, fb, whole, eps, depth)
}

/// Independent oracle for [`petersson`]: nested adaptive Simpson
/// integration with absolute target `abs_target` for the whole integral.
pub fn petersson_adaptive(
    f: &RAForm,
    g: &RAForm,
    n: i64,
    y_max: f64,
    abs_target: f64,
    cfg: &EvalConfig,
) -> Result<Complex64> {
    check_pairing_domain(f, g)?;
    if abs_target.is_nan() || abs_target <= 0.0 {
        return Err(Error::domain("petersson_adaptive", "target must be positive"));
    }
    let cf = NumericSeries::compile(f, cfg)?;
    let cg = NumericSeries::compile(g, cfg)?;
    let column = |x: f64| -> Result<Complex64> {
        let y_lo = (1.0 - x * x).sqrt();
        adaptive_simpson(
            &|y: f64| Ok(cf.eval(Complex64::new(x, y))? * cg.eval(Complex64::new(x, y))?.conj()
                * y.powi(n as i32 - 2)),
            y_lo,
            y_max,
            abs_target / 2.0,
            24,
        )
    };
    adaptive_simpson(&column, -0.5, 0.5, abs_target, 24)
}

// ---------------------------------------------------------------------------
// Fitting and calibration
// ---------------------------------------------------------------------------

/// Outcome of a least-squares fit against model forms plus a constant.
#[derive(Debug, Clone)]
pub struct FitReport {
    /// One coefficient per model term, in input order.
    pub coefficients: Vec<f64>,
    /// The fitted additive constant.
    pub constant: f64,
    /// Per-point residuals `fit(z_i) - target_i`.
    pub residuals: Vec<f64>,
    /// Root-mean-square of the residuals.
    pub residual_rms: f64,
    /// Set when the normal equations were rank-deficient; the affected
    /// directions are returned as zero instead of failing.
    pub rank_deficient: bool,
}

/// Solves the normal equations `A^T A c = A^T b` by Gaussian elimination
/// with partial pivoting; near-zero pivots mark rank deficiency.
fn solve_normal_equations(a: &[Vec<f64>], b: &[f64]) -> (Vec<f64>, bool) {
    let cols = a[0].len();
    let mut m = vec![vec![0.0f64; cols + 1]; cols];
    for i in 0..cols {
        for j in 0..cols {
            m[i][j] = a.iter().map(|row| row[i] * row[j]).sum();
        }
        m[i][cols] = a.iter().zip(b).map(|(row, &t)| row[i] * t).sum();
    }
    let scale: f64 = m
        .iter()
        .flat_map(|row| row[..cols].iter().map(|v| v.abs()))
        .fold(0.0, f64::max);
    let tolerance = scale.max(1e-300) * 1e-12;
    let mut deficient = false;
    let mut solution = vec![0.0f64; cols];
    let mut used = vec![false; cols];
    let mut order = Vec::new();
    for col in 0..cols {
        let pivot = (0..cols)
            .filter(|&r| !used[r])
            .max_by(|&p, &q| m[p][col].abs().total_cmp(&m[q][col].abs()));
        let Some(pivot) = pivot else { continue };
        if m[pivot][col].abs() <= tolerance {
            deficient = true;
            continue;
        }
        used[pivot] = true;
        order.push((pivot, col));
        let inv = 1.0 / m[pivot][col];
        let pivot_row = m[pivot].clone();
        for (r, m_row) in m.iter_mut().enumerate() {
            if r != pivot && m_row[col] != 0.0 {
                let factor = m_row[col] * inv;
                for (entry, p) in m_row.iter_mut().zip(&pivot_row) {
                    *entry -= factor * p;
                }
            }
        }
    }
    for &(row, col) in &order {
        let mut rhs = m[row][cols];
        for c in 0..cols {
            if c != col {
                rhs -= m[row][c] * solution[c];
            }
        }
        solution[col] = rhs / m[row][col];
    }
    (solution, deficient)
}

/// Least-squares fit of sampled values against evaluated model forms plus
/// an additive constant. Needs more sample points than model terms; rank
/// deficiency is reported in the result rather than failing.
pub fn fit_affine(
    targets: &[(Complex64, f64)],
    model_terms: &[RAForm],
    cfg: &EvalConfig,
) -> Result<FitReport> {
    if targets.len() <= model_terms.len() {
        return Err(Error::domain(
            "fit_affine",
            format!(
                "need more sample points ({}) than model terms ({})",
                targets.len(),
                model_terms.len()
            ),
        ));
    }
    let compiled: Vec<NumericSeries> = model_terms
        .iter()
        .map(|f| NumericSeries::compile(f, cfg))
        .collect::<Result<_>>()?;
    let mut design = Vec::with_capacity(targets.len());
    let mut rhs = Vec::with_capacity(targets.len());
    for &(z, value) in targets {
        let mut row = Vec::with_capacity(compiled.len() + 1);
        for series in &compiled {
            row.push(series.eval(z)?.re);
        }
        row.push(1.0);
        design.push(row);
        rhs.push(value);
    }
    let (solution, rank_deficient) = solve_normal_equations(&design, &rhs);
    let constant = solution[compiled.len()];
    let coefficients: Vec<f64> = solution[..compiled.len()].to_vec();
    let residuals: Vec<f64> = design
        .iter()
        .zip(&rhs)
        .map(|(row, &target)| {
            let fit: f64 = row
                .iter()
                .zip(solution.iter())
                .map(|(a, c)| a * c)
                .sum();
            fit - target
        })
        .collect();
    let residual_rms =
        (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();
    Ok(FitReport {
        coefficients,
        constant,
        residuals,
        residual_rms,
        rank_deficient,
    })
}

/// Finds the real `t` minimizing the inversion defect of `f + t g` at `z`,
/// i.e. the least-squares solution of
/// `(f + t g)(-1/z) = z^r zbar^s (f + t g)(z)`.
///
/// Both forms must carry the same weights, and `g` itself must have a
/// nonvanishing defect (otherwise `t` is undetermined).
pub fn calibrate_modularity(
    f: &RAForm,
    g: &RAForm,
    z: Complex64,
    cfg: &EvalConfig,
) -> Result<f64> {
    if f.weights() != g.weights() {
        return Err(Error::WeightMismatch {
            op: "calibrate_modularity",
            lhs: f.weights(),
            rhs: g.weights(),
        });
    }
    let defect = |form: &RAForm| -> Result<Complex64> {
        let compiled = NumericSeries::compile(form, cfg)?;
        let (r, s) = compiled.weights();
        let factor = complex_pow_i64(z, r) * complex_pow_i64(z.conj(), s);
        Ok(compiled.eval(-1.0 / z)? - factor * compiled.eval(z)?)
    };
    let df = defect(f)?;
    let dg = defect(g)?;
    if dg.norm() < 1e-12 * (df.norm() + 1.0) {
        return Err(Error::domain(
            "calibrate_modularity",
            "calibration direction has no measurable modular defect at this point",
        ));
    }
    Ok(-(df * dg.conj()).re / dg.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{delta_cusp, eisenstein_g, frak_m, real_eisenstein};
    use crate::lattice::eisenstein_lattice;
    use crate::operators::del;
    use crate::primitives::solve_del_primitive;
    use crate::scalar::{rat, PeriodScalar};
    use crate::series::BiSeries;

    fn sample_point() -> Complex64 {
        Complex64::new(0.3, 1.1)
    }

    #[test]
    fn constants_and_l_evaluate_exactly() {
        let cfg = EvalConfig::standard();
        let one = RAForm::one(6);
        let value = eval_series(&one, sample_point(), &cfg).unwrap();
        assert!((value - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let l = RAForm::l_form(6);
        let value = eval_series(&l, Complex64::new(0.0, 1.0), &cfg).unwrap();
        assert!((value.re + 2.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!(value.im.abs() < 1e-14);
    }

    #[test]
    fn eval_agrees_with_the_lattice_sum() {
        let cfg = EvalConfig::standard();
        let series = real_eisenstein(1, 1, 24).unwrap();
        let at_i = eval_series(&series, Complex64::new(0.0, 1.0), &cfg).unwrap();
        let lattice = eisenstein_lattice(1, 1, Complex64::new(0.0, 1.0), 800).unwrap();
        let diff = (at_i.re - lattice.value).abs();
        assert!(
            diff <= 3.0 * lattice.error_estimate + 1e-9,
            "diff {diff:.3e} vs lattice error {:.3e}",
            lattice.error_estimate
        );
        assert!(at_i.im.abs() < 1e-12);
    }

    #[test]
    fn tail_bound_rejects_points_too_close_to_the_real_line() {
        let cfg = EvalConfig::standard();
        let series = real_eisenstein(1, 1, 8).unwrap();
        let err = eval_series(&series, Complex64::new(0.0, 0.01), &cfg).unwrap_err();
        assert!(matches!(err, Error::TailTooLarge { .. }));
    }

    #[test]
    fn exact_identities_survive_evaluation() {
        // del m = -m^2 + (20/3) L^2 G4, checked as numbers at a generic point.
        let cfg = EvalConfig::standard();
        let order = 20;
        let m = frak_m(order);
        let lhs = del(&m);
        let rhs = m
            .mul(&m)
            .neg()
            .add(
                &eisenstein_g(4, order)
                    .unwrap()
                    .l_shift(2)
                    .scale_rat(&rat(20, 3)),
            )
            .unwrap();
        let za = sample_point();
        let va = eval_series(&lhs, za, &cfg).unwrap();
        let vb = eval_series(&rhs, za, &cfg).unwrap();
        assert!(
            (va - vb).norm() < 1e-10,
            "numeric residual {:.3e}",
            (va - vb).norm()
        );
    }

    #[test]
    fn modularity_residuals_separate_modular_from_nonmodular() {
        let cfg = EvalConfig::standard();
        let z = sample_point();

        let modular = real_eisenstein(2, 0, 24).unwrap();
        let residual = modularity_residual(&modular, z, &cfg).unwrap();
        assert!(residual < 1e-8, "Eisenstein residual {residual:.3e}");

        let l = RAForm::l_form(6);
        let residual = modularity_residual(&l, z, &cfg).unwrap();
        assert!(residual < 1e-14, "L residual {residual:.3e}");

        let g2 = eisenstein_g(2, 24).unwrap();
        let residual = modularity_residual(&g2, z, &cfg).unwrap();
        assert!(residual > 1e-3, "weight-2 residual {residual:.3e}");
    }

    #[test]
    fn cusp_primitive_is_measurably_nonmodular() {
        let cfg = EvalConfig::standard();
        let order = 12;
        let delta = delta_cusp(order);
        let l_delta = RAForm::new(13, -1, delta.series().mul_l_pow(1)).unwrap();
        let solution = solve_del_primitive(&l_delta, 12).unwrap();
        let mut primitive = solution.primitive;
        for name in &solution.free_parameters {
            primitive = primitive.substitute_symbol(name, &PeriodScalar::zero());
        }
        let residual = modularity_residual(&primitive, sample_point(), &cfg).unwrap();
        assert!(residual > 1e-3, "primitive residual {residual:.3e}");
    }

    #[test]
    fn delta_pairing_matches_adaptive_oracle_and_known_norm() {
        let cfg = EvalConfig::standard();
        let delta = delta_cusp(20);
        let grid = QuadratureGrid::new(48, 48, 6.0).unwrap();
        let gauss = petersson(&delta, &delta, 12, &grid, &cfg).unwrap();
        assert!(gauss.re > 0.0);
        assert!(gauss.im.abs() < 1e-12 * gauss.re);

        let adaptive = petersson_adaptive(&delta, &delta, 12, 6.0, 1e-13, &cfg).unwrap();
        let rel = (gauss - adaptive).norm() / adaptive.norm();
        assert!(rel < 1e-6, "oracle disagreement {rel:.3e}");

        // Known value of the pairing of the discriminant with itself.
        let rel = (gauss.re - 1.035362056804321e-6).abs() / 1.035362056804321e-6;
        assert!(rel < 1e-4, "norm anchor off by {rel:.3e}");
    }

    #[test]
    fn l_multiple_rescales_the_pairing() {
        let cfg = EvalConfig::standard();
        let delta = delta_cusp(16);
        let grid = QuadratureGrid::new(40, 40, 6.0).unwrap();
        let base = petersson(&delta, &delta, 12, &grid, &cfg).unwrap();
        let shifted = petersson(&delta, &delta.l_shift(1), 11, &grid, &cfg).unwrap();
        let expected = base * (-2.0 * std::f64::consts::PI);
        let rel = (shifted - expected).norm() / expected.norm();
        assert!(rel < 1e-9, "scaling identity off by {rel:.3e}");
    }

    #[test]
    fn pairing_is_conjugate_symmetric() {
        let cfg = EvalConfig::standard();
        let delta = delta_cusp(16);
        let other = delta.l_shift(1).l_shift(-1).add(&delta.scale_rat(&rat(1, 3))).unwrap();
        let grid = QuadratureGrid::new(32, 32, 6.0).unwrap();
        let ab = petersson(&delta, &other, 12, &grid, &cfg).unwrap();
        let ba = petersson(&other, &delta, 12, &grid, &cfg).unwrap();
        assert!((ab - ba.conj()).norm() <= 1e-12 * ab.norm());
    }

    #[test]
    fn pairing_domain_violations_are_rejected() {
        let cfg = EvalConfig::standard();
        let grid = QuadratureGrid::new(16, 16, 6.0).unwrap();
        let delta = delta_cusp(8);
        let g4 = eisenstein_g(4, 8).unwrap();
        let g6 = eisenstein_g(6, 8).unwrap();
        // Mismatched h with neither factor decaying: no sensible integral.
        assert!(matches!(
            petersson(&g4, &g6, 12, &grid, &cfg),
            Err(Error::DegreeMismatch { .. })
        ));
        assert!(matches!(
            petersson(&g4, &g4, 4, &grid, &cfg),
            Err(Error::NonDecayingIntegrand)
        ));
        // Mismatched h against a decaying factor is the projection
        // functional; it is admissible and finite.
        assert!(petersson(&g4, &delta, 12, &grid, &cfg).is_ok());
        // The truncated-grid norm has no decay requirement.
        assert!(grid_norm(&g4, 4, &grid, &cfg).unwrap() > 0.0);
    }

    #[test]
    fn affine_fit_recovers_synthetic_coefficients() {
        let cfg = EvalConfig::standard();
        let e22 = real_eisenstein(2, 2, 16).unwrap().l_shift(-2);
        let compiled = NumericSeries::compile(&e22, &cfg).unwrap();
        let points = [1.0, 1.1, 1.2, 1.3, 1.45]
            .iter()
            .map(|&y| Complex64::new(0.21, y))
            .collect::<Vec<_>>();
        let targets: Vec<(Complex64, f64)> = points
            .iter()
            .map(|&z| (z, 2.0 * compiled.eval(z).unwrap().re + 7.0))
            .collect();
        let report = fit_affine(&targets, std::slice::from_ref(&e22), &cfg).unwrap();
        assert!(!report.rank_deficient);
        assert!((report.coefficients[0] - 2.0).abs() < 1e-8);
        assert!((report.constant - 7.0).abs() < 1e-8);
        assert!(report.residual_rms < 1e-9);

        // A constant alone is recovered exactly.
        let flat: Vec<(Complex64, f64)> =
            points.iter().map(|&z| (z, 3.5)).collect();
        let report = fit_affine(&flat, &[], &cfg).unwrap();
        assert!((report.constant - 3.5).abs() < 1e-12);

        // Duplicated model terms are rank-deficient but not fatal.
        let report =
            fit_affine(&targets, &[e22.clone(), e22.clone()], &cfg).unwrap();
        assert!(report.rank_deficient);
    }

    #[test]
    fn calibration_recovers_a_planted_coefficient() {
        let cfg = EvalConfig::standard();
        let order = 24;
        let modular = real_eisenstein(2, 0, order).unwrap();
        let direction = eisenstein_g(2, order).unwrap();
        let planted = modular.add(&direction.scale_rat(&rat(3, 10))).unwrap();
        let t = calibrate_modularity(&planted, &direction, sample_point(), &cfg).unwrap();
        assert!((t + 0.3).abs() < 1e-8, "calibrated {t}");

        // Calibrating against a modular direction is rejected.
        let err = calibrate_modularity(&planted, &modular, sample_point(), &cfg);
        assert!(err.is_err());
    }

    #[test]
    fn numeric_series_reports_unassigned_symbols() {
        let cfg = EvalConfig::standard();
        let mut series = BiSeries::zero(4);
        series.add_term(0, 0, 0, PeriodScalar::symbol("mystery"));
        let form = RAForm::new(3, 1, series).unwrap();
        assert!(matches!(
            NumericSeries::compile(&form, &cfg),
            Err(Error::UnassignedSymbol(_))
        ));
        let cfg = cfg.with_symbol("mystery", 2.5);
        let value = eval_series(&form, sample_point(), &cfg).unwrap();
        assert!((value.re - 2.5).abs() < 1e-14);
    }
}

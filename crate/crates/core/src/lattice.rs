//! Floating-point lattice sums: modular graph functions attached to a graph
//! with half-edges, and the direct two-dimensional lattice sum for the
//! real-analytic Eisenstein series. These are the numerical ground truth
//! against which the exact series constructions are validated.
//!
//! A graph with edges `1..E` and momenta `(m_i, n_i)` per edge determines
//!
//! ```text
//! I_G(z) = pi^{-E} * sum_{m, n} prod_i  Im(z) / |m_i z + n_i|^2,
//! ```
//!
//! where both integer vectors range over the kernel of the vertex-incidence
//! constraints `sum_i eps_{v,i} m_i = 0` (one linear form per vertex, the
//! same for the `m` and `n` sides) and any assignment giving some edge
//! `(m_i, n_i) = (0, 0)` is excluded. The kernel is enumerated through an
//! integer basis with coefficients in the box `[-M, M]^d` on each side, so
//! the per-vertex constraints hold exactly rather than by rejection.
//!
//! The Eisenstein sum is
//!
//! ```text
//! E_{r,s}(z) = (w! / (2 pi i)^{w+2}) * (1/2) *
//!              sum_{(m,n) != (0,0)} L / ((m z + n)^{r+1} (m zbar + n)^{s+1}),
//! ```
//!
//! with `w = r + s` even and `L = -2 pi Im(z)`; the value is real and the
//! accumulated imaginary part is a rounding residual.
//!
//! Every sum is evaluated twice, at cutoffs `M` and `M/2`, and the
//! difference is reported as the error estimate. Work is distributed over
//! fixed-size chunks with compensated accumulation per chunk and an in-order
//! merge, so results are bit-identical across thread counts.

use std::collections::{BTreeMap, BTreeSet};

use num::complex::Complex64;
use num::{BigInt, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{rat_int, Rational};

/// Compensated (Kahan) accumulator for long floating-point sums.
///
/// `merge` folds another accumulator in while retaining both compensation
/// terms, so a chunked sum merged in a fixed order is reproducible bit for
/// bit regardless of how the chunks were computed.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    /// A zeroed accumulator.
    pub fn new() -> Self {
        KahanSum::default()
    }

    /// Adds one summand with compensation.
    pub fn add(&mut self, x: f64) {
        let y = x - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    /// Folds another accumulator into this one.
    pub fn merge(&mut self, other: KahanSum) {
        self.add(other.sum);
        self.add(-other.compensation);
    }

    /// The accumulated value.
    pub fn value(&self) -> f64 {
        self.sum
    }
}

// ---------------------------------------------------------------------------
// Graph description
// ---------------------------------------------------------------------------

/// One edge of a momentum graph. Either endpoint may be absent, making the
/// edge a half-edge; the orientation runs tail to head.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    /// Vertex the edge leaves, if attached.
    pub tail: Option<String>,
    /// Vertex the edge enters, if attached.
    pub head: Option<String>,
}

impl Edge {
    /// Convenience constructor taking optional vertex ids.
    pub fn new(tail: Option<&str>, head: Option<&str>) -> Self {
        Edge {
            tail: tail.map(str::to_owned),
            head: head.map(str::to_owned),
        }
    }
}

/// A finite graph with named vertices, ordered edges, and optional
/// half-edges. Self-edges are rejected; at least one edge is required.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSpec {
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

impl GraphSpec {
    /// Validates and builds a graph description.
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::domain("GraphSpec::new", "graph has no vertices"));
        }
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v.clone()) {
                return Err(Error::domain(
                    "GraphSpec::new",
                    format!("duplicate vertex id {v:?}"),
                ));
            }
        }
        if edges.is_empty() {
            return Err(Error::domain("GraphSpec::new", "graph has no edges"));
        }
        for (index, edge) in edges.iter().enumerate() {
            for endpoint in [&edge.tail, &edge.head].into_iter().flatten() {
                if !seen.contains(endpoint) {
                    return Err(Error::domain(
                        "GraphSpec::new",
                        format!("edge {index} references unknown vertex {endpoint:?}"),
                    ));
                }
            }
            match (&edge.tail, &edge.head) {
                (Some(t), Some(h)) if t == h => {
                    return Err(Error::domain(
                        "GraphSpec::new",
                        format!("edge {index} is a self-edge at {t:?}"),
                    ));
                }
                (None, None) => {
                    return Err(Error::domain(
                        "GraphSpec::new",
                        format!("edge {index} has no endpoints at all"),
                    ));
                }
                _ => {}
            }
        }
        Ok(GraphSpec { vertices, edges })
    }

    /// Vertex ids in declaration order.
    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    /// Edges in declaration order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
}

/// Result of a truncated lattice sum.
#[derive(Debug, Clone)]
pub struct LatticeResult {
    /// The accumulated (real) value at the full cutoff.
    pub value: f64,
    /// The box cutoff `M` used.
    pub cutoff: u32,
    /// `|value(M) - value(M/2)|`, a heuristic truncation error.
    pub error_estimate: f64,
    /// Number of lattice points actually summed at the full cutoff.
    pub term_count: u64,
    /// Convergence or consistency caveats; empty when none apply.
    pub warnings: Vec<String>,
}

/// Richardson extrapolation for a quantity with leading error `~ M^{-order}`
/// computed at cutoffs `M` (giving `coarse`) and `2M` (giving `fine`).
pub fn richardson(coarse: f64, fine: f64, order: i32) -> f64 {
    fine + (fine - coarse) / (2f64.powi(order) - 1.0)
}

// ---------------------------------------------------------------------------
// Momentum kernel
// ---------------------------------------------------------------------------

fn ensure_connected(graph: &GraphSpec) -> Result<()> {
    // Union-find over vertices joined by fully attached edges; half-edges
    // do not connect anything.
    let index: BTreeMap<&str, usize> = graph
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let mut parent: Vec<usize> = (0..graph.vertices.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for edge in &graph.edges {
        if let (Some(t), Some(h)) = (&edge.tail, &edge.head) {
            let (a, b) = (index[t.as_str()], index[h.as_str()]);
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
    }
    let root = find(&mut parent, 0);
    for i in 1..graph.vertices.len() {
        if find(&mut parent, i) != root {
            return Err(Error::domain(
                "momentum_basis",
                format!(
                    "graph is disconnected: vertex {:?} is not reachable from {:?}",
                    graph.vertices[i], graph.vertices[0]
                ),
            ));
        }
    }
    Ok(())
}

/// Constraint matrix: one row per vertex, one column per edge, entry `+1`
/// when the edge enters the vertex and `-1` when it leaves.
fn constraint_rows(vertices: &[String], edges: &[Edge]) -> Vec<Vec<Rational>> {
    vertices
        .iter()
        .map(|v| {
            edges
                .iter()
                .map(|e| {
                    let mut c = 0i64;
                    if e.head.as_deref() == Some(v.as_str()) {
                        c += 1;
                    }
                    if e.tail.as_deref() == Some(v.as_str()) {
                        c -= 1;
                    }
                    rat_int(c)
                })
                .collect()
        })
        .collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(rows: &mut [Vec<Rational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(pivot_row) = (row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(row, pivot_row);
        let inv = rat_int(1) / rows[row][col].clone();
        for entry in rows[row].iter_mut() {
            *entry = entry.clone() * inv.clone();
        }
        let pivot_row = rows[row].clone();
        for (other, other_row) in rows.iter_mut().enumerate() {
            if other != row && !other_row[col].is_zero() {
                let factor = other_row[col].clone();
                for (entry, p) in other_row.iter_mut().zip(&pivot_row).take(cols) {
                    *entry = entry.clone() - factor.clone() * p.clone();
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows.len() {
            break;
        }
    }
    pivots
}

/// Primitive integer vector proportional to a rational one, with the first
/// nonzero entry positive.
fn clear_denominators(vector: &[Rational]) -> Result<Vec<i64>> {
    let mut lcm = BigInt::from(1);
    for entry in vector {
        lcm = num::integer::lcm(lcm, entry.denom().clone());
    }
    let mut ints: Vec<BigInt> = vector
        .iter()
        .map(|entry| entry.numer() * (&lcm / entry.denom()))
        .collect();
    let mut gcd = BigInt::zero();
    for entry in &ints {
        gcd = num::integer::gcd(gcd, entry.abs());
    }
    if !gcd.is_zero() && gcd != BigInt::from(1) {
        for entry in ints.iter_mut() {
            *entry = &*entry / &gcd;
        }
    }
    if let Some(first) = ints.iter().find(|e| !e.is_zero()) {
        if first.is_negative() {
            for entry in ints.iter_mut() {
                *entry = -&*entry;
            }
        }
    }
    ints.into_iter()
        .map(|entry| {
            i64::try_from(&entry).map_err(|_| {
                Error::InternalInconsistency(
                    "kernel basis entry does not fit in 64 bits".into(),
                )
            })
        })
        .collect()
}

fn kernel_basis(vertices: &[String], edges: &[Edge]) -> Result<Vec<Vec<i64>>> {
    let cols = edges.len();
    let mut rows = constraint_rows(vertices, edges);
    let pivots = rref(&mut rows, cols);
    let pivot_set: BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivot_set.contains(c)) {
        let mut vector = vec![rat_int(0); cols];
        vector[free] = rat_int(1);
        for (row, &pivot) in pivots.iter().enumerate() {
            vector[pivot] = -rows[row][free].clone();
        }
        basis.push(clear_denominators(&vector)?);
    }
    Ok(basis)
}

/// Integer basis of the joint kernel of the per-vertex momentum constraints,
/// one vector per free direction, in the caller's edge order.
///
/// The dimension is `#edges - rank`; a disconnected graph is rejected.
pub fn momentum_basis(graph: &GraphSpec) -> Result<Vec<Vec<i64>>> {
    ensure_connected(graph)?;
    kernel_basis(&graph.vertices, &graph.edges)
}

// ---------------------------------------------------------------------------
// Graph sums
// ---------------------------------------------------------------------------

/// All edge-momentum vectors reachable from basis coefficients in
/// `[-M, M]^d`, stored flat (stride = number of edges), together with a
/// bitmask per assignment marking which edge momenta vanish.
fn enumerate_box(edge_rows: &[Vec<i64>], dim: usize, cutoff: u32) -> Result<(Vec<f64>, Vec<u64>, usize)> {
    let num_edges = edge_rows.len();
    if num_edges > 63 {
        return Err(Error::domain("graph_sum", "graphs with more than 63 edges are not supported"));
    }
    let side = 2 * cutoff as usize + 1;
    let count = side
        .checked_pow(dim as u32)
        .and_then(|c| c.checked_mul(num_edges).map(|total| (c, total)))
        .filter(|&(_, total)| total <= 100_000_000)
        .map(|(c, _)| c);
    let Some(count) = count else {
        return Err(Error::domain(
            "graph_sum",
            format!("coefficient box (2*{cutoff}+1)^{dim} is too large to enumerate"),
        ));
    };
    let mut momenta = Vec::with_capacity(count * num_edges);
    let mut masks = Vec::with_capacity(count);
    let m = cutoff as i64;
    let mut digits = vec![-m; dim];
    loop {
        let mut mask = 0u64;
        for (e, row) in edge_rows.iter().enumerate() {
            let momentum: i64 = row.iter().zip(&digits).map(|(&r, &c)| r * c).sum();
            if momentum == 0 {
                mask |= 1 << e;
            }
            momenta.push(momentum as f64);
        }
        masks.push(mask);
        // Odometer increment over [-m, m]^dim.
        let mut pos = dim;
        loop {
            if pos == 0 {
                return Ok((momenta, masks, count));
            }
            pos -= 1;
            if digits[pos] < m {
                digits[pos] += 1;
                for digit in digits.iter_mut().skip(pos + 1) {
                    *digit = -m;
                }
                break;
            }
        }
    }
}

/// One full evaluation of the graph sum at a fixed cutoff.
fn graph_sum_at(
    edge_rows: &[Vec<i64>],
    dim: usize,
    z: Complex64,
    cutoff: u32,
) -> Result<(f64, u64)> {
    let num_edges = edge_rows.len();
    if dim == 0 {
        // The only assignment is all-zero momenta, which is excluded.
        return Ok((0.0, 0));
    }
    let (momenta, masks, count) = enumerate_box(edge_rows, dim, cutoff)?;
    let x = z.re;
    let y = z.im;

    const OUTER_CHUNK: usize = 8;
    let num_chunks = count.div_ceil(OUTER_CHUNK);
    let partials: Vec<(KahanSum, u64)> = (0..num_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut acc = KahanSum::new();
            let mut terms = 0u64;
            let lo = chunk * OUTER_CHUNK;
            let hi = (lo + OUTER_CHUNK).min(count);
            let mut mx = vec![0.0f64; num_edges];
            let mut my2 = vec![0.0f64; num_edges];
            for outer in lo..hi {
                let row = &momenta[outer * num_edges..(outer + 1) * num_edges];
                for e in 0..num_edges {
                    mx[e] = row[e] * x;
                    my2[e] = (row[e] * y) * (row[e] * y);
                }
                let outer_mask = masks[outer];
                for inner in 0..count {
                    if outer_mask & masks[inner] != 0 {
                        continue;
                    }
                    let ns = &momenta[inner * num_edges..(inner + 1) * num_edges];
                    let mut product = 1.0f64;
                    for e in 0..num_edges {
                        let u = mx[e] + ns[e];
                        product *= y / (u * u + my2[e]);
                    }
                    acc.add(product);
                    terms += 1;
                }
            }
            (acc, terms)
        })
        .collect();

    let mut total = KahanSum::new();
    let mut terms = 0u64;
    for (acc, t) in partials {
        total.merge(acc);
        terms += t;
    }
    let scale = std::f64::consts::PI.powi(-(num_edges as i32));
    Ok((total.value() * scale, terms))
}

fn convergence_warnings(edge_rows: &[Vec<i64>], dim: usize) -> Vec<String> {
    let mut warnings = Vec::new();
    if dim == 0 {
        warnings.push(
            "momentum space is zero-dimensional; every term is excluded and the sum is empty"
                .to_owned(),
        );
        return warnings;
    }
    for (e, row) in edge_rows.iter().enumerate() {
        if row.iter().all(|&c| c == 0) {
            warnings.push(format!(
                "edge {e} carries no momentum in the kernel; every term is excluded"
            ));
        }
    }
    let decay = 2 * edge_rows.len() as i64 - 2 * dim as i64;
    if decay <= 2 {
        warnings.push(format!(
            "heuristic decay exponent 2*edges - 2*dim = {decay} is not above 2; \
             convergence is slow and the error estimate may be optimistic"
        ));
    }
    warnings
}

fn validate_point_and_cutoff(op: &'static str, z: Complex64, cutoff: u32) -> Result<()> {
    if z.im.is_nan() || z.im <= 0.0 {
        return Err(Error::domain(
            op,
            format!("evaluation point must lie in the upper half-plane, got Im z = {}", z.im),
        ));
    }
    if cutoff < 2 {
        return Err(Error::domain(op, format!("cutoff must be at least 2, got {cutoff}")));
    }
    Ok(())
}

/// Modular graph function `I_G(z)` summed over the momentum kernel with
/// basis coefficients in `[-M, M]^d` on the `m` and `n` sides independently.
///
/// Edges are reordered internally by a canonical key before the kernel
/// basis is derived, so permuting the edge list of `graph` reproduces the
/// result bit for bit. The error estimate is `|value(M) - value(M/2)|`.
pub fn graph_sum(graph: &GraphSpec, z: Complex64, cutoff: u32) -> Result<LatticeResult> {
    validate_point_and_cutoff("graph_sum", z, cutoff)?;
    ensure_connected(graph)?;
    // Canonical edge order: sort by endpoint ranks in the sorted vertex
    // list (half-edge side sorts last). The kernel basis, and hence the
    // whole summation order, then depends only on the graph itself.
    let mut vertex_rank: Vec<&str> = graph.vertices.iter().map(String::as_str).collect();
    vertex_rank.sort_unstable();
    let rank = |v: &Option<String>| -> usize {
        match v {
            Some(id) => vertex_rank.binary_search(&id.as_str()).unwrap_or(usize::MAX),
            None => usize::MAX,
        }
    };
    let mut edges = graph.edges.clone();
    edges.sort_by_key(|e| (rank(&e.tail), rank(&e.head)));
    let basis = kernel_basis(&graph.vertices, &edges)?;
    let edge_rows: Vec<Vec<i64>> = (0..edges.len())
        .map(|e| basis.iter().map(|v| v[e]).collect())
        .collect();
    run_graph_sum(&edge_rows, basis.len(), z, cutoff)
}

/// Graph sum with an explicit kernel basis (in the caller's edge order),
/// for studying how the value depends on the basis choice near the cutoff
/// boundary. The basis must consist of independent integer kernel vectors
/// spanning the full kernel.
pub fn graph_sum_with_basis(
    graph: &GraphSpec,
    z: Complex64,
    cutoff: u32,
    basis: &[Vec<i64>],
) -> Result<LatticeResult> {
    validate_point_and_cutoff("graph_sum", z, cutoff)?;
    ensure_connected(graph)?;
    let expected = kernel_basis(&graph.vertices, &graph.edges)?.len();
    if basis.len() != expected {
        return Err(Error::domain(
            "graph_sum",
            format!("basis has {} vectors but the kernel has dimension {expected}", basis.len()),
        ));
    }
    let constraints = constraint_rows(&graph.vertices, &graph.edges);
    let mut check: Vec<Vec<Rational>> = Vec::new();
    for vector in basis {
        if vector.len() != graph.edges.len() {
            return Err(Error::domain(
                "graph_sum",
                "basis vector length does not match the number of edges",
            ));
        }
        for row in &constraints {
            let dot: Rational = row
                .iter()
                .zip(vector)
                .map(|(c, &v)| c.clone() * rat_int(v))
                .sum();
            if !dot.is_zero() {
                return Err(Error::domain(
                    "graph_sum",
                    "basis vector violates a vertex momentum constraint",
                ));
            }
        }
        check.push(vector.iter().map(|&v| rat_int(v)).collect());
    }
    let pivots = rref(&mut check, graph.edges.len());
    if pivots.len() != basis.len() {
        return Err(Error::domain("graph_sum", "basis vectors are linearly dependent"));
    }
    let edge_rows: Vec<Vec<i64>> = (0..graph.edges.len())
        .map(|e| basis.iter().map(|v| v[e]).collect())
        .collect();
    run_graph_sum(&edge_rows, basis.len(), z, cutoff)
}

fn run_graph_sum(
    edge_rows: &[Vec<i64>],
    dim: usize,
    z: Complex64,
    cutoff: u32,
) -> Result<LatticeResult> {
    let (coarse, _) = graph_sum_at(edge_rows, dim, z, cutoff / 2)?;
    let (value, term_count) = graph_sum_at(edge_rows, dim, z, cutoff)?;
    Ok(LatticeResult {
        value,
        cutoff,
        error_estimate: (value - coarse).abs(),
        term_count,
        warnings: convergence_warnings(edge_rows, dim),
    })
}

// ---------------------------------------------------------------------------
// Direct Eisenstein lattice sum
// ---------------------------------------------------------------------------

fn complex_pow(base: Complex64, exponent: u32) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..exponent {
        acc *= base;
    }
    acc
}

fn eisenstein_sum_at(r: i64, s: i64, z: Complex64, cutoff: u32) -> (f64, f64, u64) {
    let x = z.re;
    let y = z.im;
    let big_l = -2.0 * std::f64::consts::PI * y;
    let m = cutoff as i64;
    let rows: Vec<(KahanSum, KahanSum, u64)> = (-m..=m)
        .into_par_iter()
        .map(|mm| {
            let mut re = KahanSum::new();
            let mut im = KahanSum::new();
            let mut terms = 0u64;
            let mzx = mm as f64 * x;
            let mzy = mm as f64 * y;
            for nn in -m..=m {
                if mm == 0 && nn == 0 {
                    continue;
                }
                let c1 = Complex64::new(mzx + nn as f64, mzy);
                let c2 = Complex64::new(mzx + nn as f64, -mzy);
                let denom = complex_pow(c1, (r + 1) as u32) * complex_pow(c2, (s + 1) as u32);
                let term = big_l / denom;
                re.add(term.re);
                im.add(term.im);
                terms += 1;
            }
            (re, im, terms)
        })
        .collect();
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    let mut terms = 0u64;
    for (row_re, row_im, row_terms) in rows {
        re.merge(row_re);
        im.merge(row_im);
        terms += row_terms;
    }
    let w = r + s;
    let mut prefactor = 0.5 / (2.0 * std::f64::consts::PI).powi(w as i32 + 2);
    for f in 1..=w {
        prefactor *= f as f64;
    }
    if (w / 2 + 1) % 2 == 1 {
        prefactor = -prefactor;
    }
    (prefactor * re.value(), prefactor * im.value(), terms)
}

/// Direct lattice evaluation of the real-analytic Eisenstein series of
/// weights `(r, s)` at `z`, summing `|m|, |n| <= M`.
///
/// The result is real in exact arithmetic; the accumulated imaginary part
/// is compared against the error estimate and reported as a warning when it
/// is not negligible.
pub fn eisenstein_lattice(r: i64, s: i64, z: Complex64, cutoff: u32) -> Result<LatticeResult> {
    if r < 0 || s < 0 {
        return Err(Error::domain(
            "eisenstein_lattice",
            format!("weights must be non-negative, got ({r}, {s})"),
        ));
    }
    let w = r + s;
    if w < 2 || w % 2 != 0 {
        return Err(Error::domain(
            "eisenstein_lattice",
            format!("total weight must be even and at least 2, got {w}"),
        ));
    }
    validate_point_and_cutoff("eisenstein_lattice", z, cutoff)?;
    let (coarse, _, _) = eisenstein_sum_at(r, s, z, cutoff / 2);
    let (value, imag, term_count) = eisenstein_sum_at(r, s, z, cutoff);
    let error_estimate = (value - coarse).abs();
    let mut warnings = Vec::new();
    if imag.abs() > error_estimate && imag.abs() > 1e-12 * value.abs() {
        warnings.push(format!(
            "imaginary residual {imag:.3e} exceeds the error estimate {error_estimate:.3e}"
        ));
    }
    Ok(LatticeResult {
        value,
        cutoff,
        error_estimate,
        term_count,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c111() -> GraphSpec {
        GraphSpec::new(
            vec!["v".into()],
            vec![
                Edge::new(None, Some("v")),
                Edge::new(None, Some("v")),
                Edge::new(None, Some("v")),
            ],
        )
        .unwrap()
    }

    fn c211() -> GraphSpec {
        GraphSpec::new(
            vec!["v1".into(), "v2".into()],
            vec![
                Edge::new(None, Some("v1")),
                Edge::new(Some("v1"), Some("v2")),
                Edge::new(Some("v2"), None),
                Edge::new(Some("v2"), None),
            ],
        )
        .unwrap()
    }

    fn constraint_residuals(graph: &GraphSpec, vector: &[i64]) -> Vec<i64> {
        graph
            .vertices()
            .iter()
            .map(|v| {
                graph
                    .edges()
                    .iter()
                    .zip(vector)
                    .map(|(e, &m)| {
                        let mut c = 0i64;
                        if e.head.as_deref() == Some(v.as_str()) {
                            c += 1;
                        }
                        if e.tail.as_deref() == Some(v.as_str()) {
                            c -= 1;
                        }
                        c * m
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn momentum_basis_of_the_three_banana_has_dimension_two() {
        let graph = c111();
        let basis = momentum_basis(&graph).unwrap();
        assert_eq!(basis.len(), 2);
        for vector in &basis {
            assert_eq!(vector.len(), 3);
            assert!(constraint_residuals(&graph, vector).iter().all(|&r| r == 0));
        }
        // Independence: the two vectors are not proportional.
        let cross = basis[0][0] * basis[1][1] - basis[0][1] * basis[1][0];
        let cross2 = basis[0][0] * basis[1][2] - basis[0][2] * basis[1][0];
        assert!(cross != 0 || cross2 != 0);
    }

    #[test]
    fn momentum_basis_of_the_two_vertex_chain_couples_edges() {
        let graph = c211();
        let basis = momentum_basis(&graph).unwrap();
        assert_eq!(basis.len(), 2);
        for vector in &basis {
            assert!(constraint_residuals(&graph, vector).iter().all(|&r| r == 0));
            // Any kernel vector satisfies m1 = m2 and m2 = m3 + m4.
            assert_eq!(vector[0], vector[1]);
            assert_eq!(vector[1], vector[2] + vector[3]);
        }
    }

    #[test]
    fn single_half_edge_has_empty_sum() {
        let graph = GraphSpec::new(vec!["v".into()], vec![Edge::new(None, Some("v"))]).unwrap();
        let basis = momentum_basis(&graph).unwrap();
        assert!(basis.is_empty());
        let result = graph_sum(&graph, Complex64::new(0.0, 1.0), 4).unwrap();
        assert_eq!(result.value, 0.0);
        assert_eq!(result.term_count, 0);
        assert!(!result.warnings.is_empty());
    }

    #[test]
    fn disconnected_graphs_are_rejected() {
        let graph = GraphSpec::new(
            vec!["a".into(), "b".into()],
            vec![Edge::new(None, Some("a")), Edge::new(None, Some("b"))],
        )
        .unwrap();
        assert!(momentum_basis(&graph).is_err());
        assert!(graph_sum(&graph, Complex64::new(0.0, 1.0), 4).is_err());
    }

    #[test]
    fn malformed_graphs_are_rejected() {
        assert!(GraphSpec::new(vec!["a".into()], vec![Edge::new(Some("a"), Some("a"))]).is_err());
        assert!(GraphSpec::new(vec!["a".into()], vec![Edge::new(Some("a"), Some("b"))]).is_err());
        assert!(GraphSpec::new(vec!["a".into()], vec![]).is_err());
        assert!(GraphSpec::new(vec!["a".into()], vec![Edge::new(None, None)]).is_err());
        assert!(GraphSpec::new(vec!["a".into(), "a".into()], vec![Edge::new(None, Some("a"))]).is_err());
    }

    #[test]
    fn edge_permutation_reproduces_the_sum_bit_for_bit() {
        let z = Complex64::new(0.3, 1.1);
        let reference = graph_sum(&c211(), z, 6).unwrap();
        let permuted = GraphSpec::new(
            vec!["v1".into(), "v2".into()],
            vec![
                Edge::new(Some("v2"), None),
                Edge::new(None, Some("v1")),
                Edge::new(Some("v2"), None),
                Edge::new(Some("v1"), Some("v2")),
            ],
        )
        .unwrap();
        let shuffled = graph_sum(&permuted, z, 6).unwrap();
        assert_eq!(reference.value.to_bits(), shuffled.value.to_bits());
        assert_eq!(reference.term_count, shuffled.term_count);
    }

    #[test]
    fn orientation_flip_changes_the_value_only_at_rounding_level() {
        let z = Complex64::new(0.3, 1.1);
        let reference = graph_sum(&c211(), z, 6).unwrap();
        let flipped = GraphSpec::new(
            vec!["v1".into(), "v2".into()],
            vec![
                Edge::new(None, Some("v1")),
                Edge::new(Some("v2"), Some("v1")),
                Edge::new(Some("v2"), None),
                Edge::new(Some("v2"), None),
            ],
        )
        .unwrap();
        let result = graph_sum(&flipped, z, 6).unwrap();
        let rel = (reference.value - result.value).abs() / reference.value.abs();
        assert!(rel <= 1e-12, "relative deviation {rel:.3e}");
    }

    #[test]
    fn basis_choice_moves_the_value_only_within_combined_error() {
        let graph = c111();
        let z = Complex64::new(0.0, 1.0);
        let a = graph_sum_with_basis(&graph, z, 8, &[vec![1, 0, -1], vec![0, 1, -1]]).unwrap();
        let b = graph_sum_with_basis(&graph, z, 8, &[vec![-1, 1, 0], vec![-1, 0, 1]]).unwrap();
        let diff = (a.value - b.value).abs();
        assert!(
            diff <= 2.0 * (a.error_estimate + b.error_estimate),
            "diff {diff:.3e} vs errors {:.3e}, {:.3e}",
            a.error_estimate,
            b.error_estimate
        );
    }

    #[test]
    fn invalid_bases_are_rejected() {
        let graph = c111();
        let z = Complex64::new(0.0, 1.0);
        // Violates the vertex constraint.
        assert!(graph_sum_with_basis(&graph, z, 4, &[vec![1, 0, 0], vec![0, 1, -1]]).is_err());
        // Linearly dependent.
        assert!(graph_sum_with_basis(&graph, z, 4, &[vec![1, 0, -1], vec![2, 0, -2]]).is_err());
        // Wrong count.
        assert!(graph_sum_with_basis(&graph, z, 4, &[vec![1, 0, -1]]).is_err());
    }

    #[test]
    fn error_estimate_shrinks_as_the_cutoff_grows() {
        let graph = c111();
        let z = Complex64::new(0.0, 1.0);
        let small = graph_sum(&graph, z, 8).unwrap();
        let large = graph_sum(&graph, z, 16).unwrap();
        assert!(large.error_estimate < small.error_estimate);
    }

    #[test]
    fn three_banana_matches_its_zeta_value_at_i() {
        // At z = i the closed form is (2/3) L^2 E_{2,2}(i) + zeta(3) with
        // E_{2,2}(i) = 12 * sum'(m^2+n^2)^{-3} / (2 pi)^5 and
        // sum'(m^2+n^2)^{-3} = 4 zeta(3) beta(3), beta(3) = pi^3/32,
        // giving 1.3523140160545436.
        let graph = c111();
        let z = Complex64::new(0.0, 1.0);
        let coarse = graph_sum(&graph, z, 12).unwrap();
        let fine = graph_sum(&graph, z, 24).unwrap();
        let extrapolated = richardson(coarse.value, fine.value, 2);
        let expected = 1.3523140160545436;
        assert!(
            (extrapolated - expected).abs() < 6e-3,
            "got {extrapolated}, expected {expected}"
        );
        // The borderline decay exponent of this graph must be flagged.
        assert!(fine.warnings.iter().any(|w| w.contains("decay exponent")));
    }

    #[test]
    fn graph_sum_is_modular_invariant_within_error() {
        let graph = c111();
        let z = Complex64::new(0.3, 1.1);
        let minus_inv = -1.0 / z;
        let at_z = graph_sum(&graph, z, 10).unwrap();
        let at_inv = graph_sum(&graph, minus_inv, 10).unwrap();
        let diff = (at_z.value - at_inv.value).abs();
        assert!(
            diff <= 3.0 * (at_z.error_estimate + at_inv.error_estimate),
            "diff {diff:.3e}"
        );
    }

    #[test]
    fn eisenstein_lattice_matches_the_dirichlet_value_at_i() {
        // E_{1,1}(i) = -sum'(m^2+n^2)^{-2} / (2 pi)^3 with
        // sum'(m^2+n^2)^{-2} = 4 zeta(2) beta(2): -0.024296779394259185.
        let result = eisenstein_lattice(1, 1, Complex64::new(0.0, 1.0), 600).unwrap();
        let expected = -0.024296779394259185;
        let rel = (result.value - expected).abs() / expected.abs();
        assert!(rel < 1e-4, "relative error {rel:.3e}");
        assert!(result.warnings.is_empty(), "warnings: {:?}", result.warnings);

        // E_{2,2}(i) = 12 * 4 zeta(3) beta(3) / (2 pi)^5 = 0.005709085698448738.
        let result = eisenstein_lattice(2, 2, Complex64::new(0.0, 1.0), 600).unwrap();
        let expected = 0.005709085698448738;
        let rel = (result.value - expected).abs() / expected.abs();
        assert!(rel < 1e-4, "relative error {rel:.3e}");
    }

    #[test]
    fn eisenstein_lattice_is_symmetric_and_shift_invariant() {
        let z = Complex64::new(0.3, 1.1);
        let a = eisenstein_lattice(2, 0, z, 300).unwrap();
        let b = eisenstein_lattice(0, 2, z, 300).unwrap();
        let rel = (a.value - b.value).abs() / a.value.abs().max(1e-300);
        assert!(rel < 1e-12, "asymmetry {rel:.3e}");

        let shifted = eisenstein_lattice(2, 0, z + Complex64::new(1.0, 0.0), 300).unwrap();
        let diff = (a.value - shifted.value).abs();
        assert!(
            diff <= a.error_estimate + shifted.error_estimate,
            "diff {diff:.3e} vs {:.3e} + {:.3e}",
            a.error_estimate,
            shifted.error_estimate
        );
    }

    #[test]
    fn eisenstein_lattice_rejects_bad_weights() {
        let z = Complex64::new(0.0, 1.0);
        assert!(eisenstein_lattice(1, 0, z, 10).is_err());
        assert!(eisenstein_lattice(0, 0, z, 10).is_err());
        assert!(eisenstein_lattice(-1, 3, z, 10).is_err());
        assert!(eisenstein_lattice(1, 1, Complex64::new(0.0, -1.0), 10).is_err());
        assert!(eisenstein_lattice(1, 1, z, 1).is_err());
    }
}

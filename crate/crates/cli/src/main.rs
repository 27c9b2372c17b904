//! `raqmod` — command-line interface to the real-analytic modular forms
//! engine.
//!
//! One binary binds all the library layers: exact expansions (`expand`,
//! `apply`, `solve`, `double-eis`), numeric evaluation (`eval`, `graph-sum`,
//! `petersson`), and the named verification suites (`verify`).
//!
//! Conventions shared by every subcommand:
//!
//! * results go to stdout (or to `--out` when given), diagnostics and
//!   warnings to stderr;
//! * exit code 0 means success or pass, 1 means a verification failure or a
//!   runtime obstruction, 2 means a usage problem — including malformed
//!   input JSON, which is reported with a diagnostic;
//! * identical invocations produce byte-identical output: fixed term order,
//!   fixed object-key order, floats always in scientific notation with 17
//!   significant digits, and results independent of `--jobs`.

mod cache;
mod json;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use raqmod_core::analysis::{eval_series, petersson, EvalConfig, QuadratureGrid};
use raqmod_core::forms::{
    delta_cusp, eis_cocycle, eisenstein_g, frak_m, g2_star, real_eisenstein, CocycleGamma,
};
use raqmod_core::lattice::graph_sum;
use raqmod_core::operators::{dbar, del, laplace, rc_bracket1, rc_bracket2, sym_bracket2};
use raqmod_core::primitives::solve_del_primitive;
use raqmod_core::series::RAForm;
use raqmod_core::verify::{run_suite, CheckKind, VerifyOptions, SUITE_NAMES};
use raqmod_core::Complex64;

use cache::FormsCache;

const SCHEMA_HELP: &str = "\
JSON schemas (all objects written with fixed key order and floats at 17
significant digits, so identical invocations are byte-identical):

  scalar   {\"terms\":[{\"zetas\":[3,3],\"rat\":\"-1/2\"}]}
           one entry per monomial in odd zeta values; rationals are decimal
           strings \"p\" or \"p/q\"; monomials in tracked named constants
           carry an extra \"syms\":[\"name\"] list.
  series   {\"weights\":[r,s],\"order\":N,
            \"terms\":[{\"m\":..,\"n\":..,\"k\":..,\"coeff\":<scalar>}]}
           terms sorted lexicographically in (m,n,k). `expand` adds a
           human-readable \"constant_part\" map {k: \"value\"} for the
           (m,n) = (0,0) column; parsers ignore the extra key.
  cocycle  {\"weight\":2k,\"gamma\":\"S\",\"coeffs\":[[\"i\",\"j\",\"p/q\"],..]}
           nonzero coefficients of X^i Y^j.
  graph    {\"vertices\":[\"v1\",\"v2\"],
            \"edges\":[{\"tail\":\"v1\",\"head\":\"v2\"},
                      {\"tail\":null,\"head\":\"v1\"}]}
           null endpoints are half-edges.
  solution {\"primitive\":<series>,\"free_parameters\":[\"kappa_0\",..],
            \"obstruction_report\":[]}
  family   {\"r,s\":<series>, ..., \"constants\":[\"name\",..]}
  numeric  {\"value\":..,\"error_estimate\":..,\"config\":{..}}
           complex values are {\"re\":..,\"im\":..} objects.
  report   {\"suite\":..,\"overall\":\"pass\"|\"fail\",
            \"checks\":[{\"id\":..,\"status\":..,\"kind\":..,
                        \"residual\":..,\"threshold\":..}],\"notes\":[..]}

The environment variable RAQMOD_CACHE_DIR, when set, enables an on-disk
cache of expanded forms keyed by (form, order); entries appear atomically,
so concurrent readers are safe.";

/// Exact and numerical computations in the bigraded algebra of
/// real-analytic modular forms.
#[derive(Parser)]
#[command(name = "raqmod", version, after_long_help = SCHEMA_HELP)]
struct Cli {
    /// Worker threads for lattice sums and quadrature; defaults to all
    /// available cores. Results are identical for every thread count.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the expansion of a named form.
    ///
    /// Forms: G2 | G4 | G6 | G8 (holomorphic Eisenstein series), G2star
    /// (modular completion of weight 2), delta (discriminant cusp form),
    /// m (the weight-(1,1) completion of G2 entering the differential
    /// system), E:r,s (real-analytic Eisenstein series), cocycle:w,S or
    /// cocycle:w,T (weight-w Eisenstein cocycle polynomial).
    Expand {
        /// Form name, e.g. `E:1,1` or `G4`.
        #[arg(long)]
        form: String,
        /// Expansion order N (series truncated at q^N, qbar^N).
        #[arg(long, default_value_t = 16)]
        order: u32,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply an operator to one expansion (del, dbar, laplace) or a bracket
    /// to two (rc1, rc2, sym2).
    Apply {
        /// Operator name.
        #[arg(long)]
        op: OpName,
        /// Input series file.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Second input series file (brackets only).
        #[arg(long, value_name = "FILE")]
        in2: Option<PathBuf>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve del(b) = f coefficientwise for the primitive b.
    ///
    /// Exits 1 with a diagnostic when a solvability condition is violated
    /// (the constant column carries an obstruction).
    Solve {
        /// Input series file (the right-hand side f).
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// First weight r of the primitive; the result has weights (r, s+1).
        #[arg(long)]
        target_r: i64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the double Eisenstein family F^(k) for indices (a, b).
    DoubleEis {
        /// First index a >= 1.
        #[arg(long)]
        a: i64,
        /// Second index b >= 1.
        #[arg(long)]
        b: i64,
        /// Depth parameter 0 <= k <= min(2a, 2b).
        #[arg(long)]
        k: i64,
        /// Expansion order N.
        #[arg(long, default_value_t = 12)]
        order: u32,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate an expansion at a point of the upper half-plane.
    Eval {
        /// Input series file.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Evaluation point as `x,y` with y > 0.
        #[arg(long)]
        z: String,
        /// Absolute tail target for the truncated evaluation.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Sum a graph-indexed lattice series at a point.
    GraphSum {
        /// Graph description file.
        #[arg(long)]
        graph: PathBuf,
        /// Evaluation point as `x,y` with y > 0.
        #[arg(long)]
        z: String,
        /// Box cutoff M on the momentum coefficients.
        #[arg(long, default_value_t = 40)]
        cutoff: u32,
        /// Emit the machine-readable JSON result instead of a summary line.
        #[arg(long)]
        json: bool,
    },
    /// Petersson-type pairing <f, g> = integral of f conj(g) y^n dvol over
    /// the fundamental domain, by tensor Gauss-Legendre quadrature.
    Petersson {
        /// Left series file.
        #[arg(long)]
        f: PathBuf,
        /// Right series file.
        #[arg(long)]
        g: PathBuf,
        /// Exponent n of y in the pairing measure.
        #[arg(long)]
        n: i64,
        /// Quadrature nodes along x.
        #[arg(long, default_value_t = 64)]
        nx: usize,
        /// Quadrature nodes along y.
        #[arg(long, default_value_t = 64)]
        ny: usize,
        /// Truncation height of the fundamental domain.
        #[arg(long, default_value_t = 6.0)]
        y_max: f64,
    },
    /// Run a named verification suite and print its machine-readable report.
    ///
    /// Suites: sl2, laplace-ops, ramanujan, eisenstein-system,
    /// primitive-solver, double-eis, laplace-table, zagier, c211,
    /// petersson-orth, orthogonality-9-14. Exits 0 when every check passes,
    /// 1 otherwise. A human-readable copy of the report goes to stderr.
    Verify {
        /// Suite name.
        #[arg(long)]
        suite: String,
        /// Series truncation order (default: per-suite, 10-24).
        #[arg(long)]
        order: Option<u32>,
        /// Lattice box cutoff (default: per-suite, 40-50).
        #[arg(long)]
        cutoff: Option<u32>,
        /// Replacement threshold for every numeric check in the suite
        /// (default: the pinned per-check thresholds).
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

/// Operator names accepted by `apply`.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OpName {
    /// Raising operator, bidegree (1, -1).
    Del,
    /// Lowering operator, bidegree (-1, 1).
    Dbar,
    /// Bigraded Laplacian.
    Laplace,
    /// First Rankin-Cohen-type bracket.
    Rc1,
    /// Second Rankin-Cohen-type bracket.
    Rc2,
    /// Symmetrized second bracket.
    Sym2,
}

/// A command failure with its exit class: usage problems exit 2,
/// runtime/verification failures exit 1.
enum Failure {
    Usage(String),
    Run(String),
}

type CmdResult = Result<u8, Failure>;

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn run_error<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Run(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        // Ignore a second initialization (cannot happen from the CLI, but
        // harmless): the pool is set once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(Failure::Run(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> CmdResult {
    match command {
        Command::Expand { form, order, out } => cmd_expand(&form, order, out.as_deref()),
        Command::Apply { op, input, in2, out } => {
            cmd_apply(op, &input, in2.as_deref(), out.as_deref())
        }
        Command::Solve { input, target_r, out } => cmd_solve(&input, target_r, out.as_deref()),
        Command::DoubleEis { a, b, k, order, out } => {
            cmd_double_eis(a, b, k, order, out.as_deref())
        }
        Command::Eval { input, z, tolerance } => cmd_eval(&input, &z, tolerance),
        Command::GraphSum { graph, z, cutoff, json } => cmd_graph_sum(&graph, &z, cutoff, json),
        Command::Petersson { f, g, n, nx, ny, y_max } => {
            cmd_petersson(&f, &g, n, nx, ny, y_max)
        }
        Command::Verify { suite, order, cutoff, tolerance } => {
            cmd_verify(&suite, order, cutoff, tolerance)
        }
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn load_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: malformed JSON: {e}", path.display())))
}

fn load_series(path: &Path) -> Result<RAForm, Failure> {
    json::series_from_json(&load_json(path)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Writes the payload to `out` (with a trailing newline), or prints it.
fn deliver(out: Option<&Path>, payload: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, format!("{payload}\n"))
            .map_err(|e| Failure::Run(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{payload}");
            Ok(())
        }
    }
}

/// Parses `x,y` into a point of the upper half-plane.
fn parse_point(text: &str) -> Result<Complex64, Failure> {
    let parsed = text.split_once(',').and_then(|(x, y)| {
        let x = x.trim().parse::<f64>().ok()?;
        let y = y.trim().parse::<f64>().ok()?;
        Some(Complex64::new(x, y))
    });
    match parsed {
        Some(z) if z.im > 0.0 && z.re.is_finite() && z.im.is_finite() => Ok(z),
        Some(_) => Err(Failure::Usage(format!(
            "point '{text}' is not in the upper half-plane (need y > 0)"
        ))),
        None => Err(Failure::Usage(format!(
            "cannot parse point '{text}'; expected `x,y`, e.g. `0.3,1.1`"
        ))),
    }
}

// ---------------------------------------------------------------------------
// expand
// ---------------------------------------------------------------------------

/// A parsed `--form` argument.
enum FormSpec {
    /// Holomorphic Eisenstein series of the given even weight.
    G(i64),
    /// Modular completion of the weight-2 series.
    G2Star,
    /// Discriminant cusp form.
    Delta,
    /// The weight-(1,1) real-analytic completion of the weight-2 series.
    FrakM,
    /// Real-analytic Eisenstein series of weights (r, s).
    E(i64, i64),
    /// Eisenstein cocycle polynomial of the given weight at S or T.
    Cocycle(i64, CocycleGamma),
}

impl FormSpec {
    /// Canonical spelling, used for cache keys and the `form` output field.
    fn canonical(&self) -> String {
        match self {
            FormSpec::G(k) => format!("G{k}"),
            FormSpec::G2Star => "G2star".to_string(),
            FormSpec::Delta => "delta".to_string(),
            FormSpec::FrakM => "m".to_string(),
            FormSpec::E(r, s) => format!("E:{r},{s}"),
            FormSpec::Cocycle(w, gamma) => format!("cocycle:{w},{gamma}"),
        }
    }
}

fn parse_form(text: &str) -> Result<FormSpec, Failure> {
    let invalid = |detail: String| Failure::Usage(format!("--form {text}: {detail}"));
    match text {
        "G2" => return Ok(FormSpec::G(2)),
        "G4" => return Ok(FormSpec::G(4)),
        "G6" => return Ok(FormSpec::G(6)),
        "G8" => return Ok(FormSpec::G(8)),
        "G2star" => return Ok(FormSpec::G2Star),
        "delta" => return Ok(FormSpec::Delta),
        "m" => return Ok(FormSpec::FrakM),
        _ => {}
    }
    if let Some(rest) = text.strip_prefix("E:") {
        let pair = rest.split_once(',').and_then(|(r, s)| {
            Some((r.trim().parse::<i64>().ok()?, s.trim().parse::<i64>().ok()?))
        });
        let (r, s) = pair.ok_or_else(|| invalid("expected E:r,s with integers r, s".into()))?;
        if r < 0 || s < 0 || (r + s) <= 0 || (r + s) % 2 != 0 {
            return Err(invalid(format!(
                "need r, s >= 0 with positive even r+s, got ({r}, {s})"
            )));
        }
        return Ok(FormSpec::E(r, s));
    }
    if let Some(rest) = text.strip_prefix("cocycle:") {
        let parts = rest.split_once(',').and_then(|(w, g)| {
            let w = w.trim().parse::<i64>().ok()?;
            let gamma = match g.trim() {
                "S" => CocycleGamma::S,
                "T" => CocycleGamma::T,
                _ => return None,
            };
            Some((w, gamma))
        });
        let (w, gamma) =
            parts.ok_or_else(|| invalid("expected cocycle:w,S or cocycle:w,T".into()))?;
        if w < 4 || w % 2 != 0 {
            return Err(invalid(format!("need even weight w >= 4, got {w}")));
        }
        return Ok(FormSpec::Cocycle(w, gamma));
    }
    Err(Failure::Usage(format!(
        "unknown form '{text}'; expected G2|G4|G6|G8|G2star|delta|m|E:r,s|cocycle:w,S|T"
    )))
}

fn expand_payload(spec: &FormSpec, order: u32) -> Result<Value, Failure> {
    let name = spec.canonical();
    if let FormSpec::Cocycle(w, gamma) = spec {
        let poly = eis_cocycle(w / 2, *gamma).map_err(usage)?;
        let Value::Object(body) = json::cocycle_to_json(&poly) else {
            unreachable!("cocycle encoding is an object");
        };
        return Ok(prepend_form_name(&name, body));
    }
    let form = match spec {
        FormSpec::G(k) => eisenstein_g(*k, order).map_err(usage)?,
        FormSpec::G2Star => g2_star(order),
        FormSpec::Delta => delta_cusp(order),
        FormSpec::FrakM => frak_m(order),
        FormSpec::E(r, s) => real_eisenstein(*r, *s, order).map_err(usage)?,
        FormSpec::Cocycle(..) => unreachable!("handled above"),
    };
    let Value::Object(body) = json::series_to_json(&form) else {
        unreachable!("series encoding is an object");
    };
    let mut value = prepend_form_name(&name, body);
    // Human-readable summary of the (0,0) column, keyed by the power of L.
    let mut constant_part = Map::new();
    for (k, coefficient) in form.constant_part() {
        constant_part.insert(k.to_string(), Value::from(coefficient.pretty()));
    }
    if let Value::Object(map) = &mut value {
        map.insert("constant_part".to_string(), Value::Object(constant_part));
    }
    Ok(value)
}

fn prepend_form_name(name: &str, body: Map<String, Value>) -> Value {
    let mut map = Map::new();
    map.insert("form".to_string(), Value::from(name));
    for (key, value) in body {
        map.insert(key, value);
    }
    Value::Object(map)
}

fn cmd_expand(form: &str, order: u32, out: Option<&Path>) -> CmdResult {
    let spec = parse_form(form)?;
    if matches!(spec, FormSpec::G(2)) {
        eprintln!(
            "warning: the weight-2 Eisenstein series is not modular; \
             use G2star (or m) where modular input is required"
        );
    }
    let name = spec.canonical();
    let cache = FormsCache::from_env();
    let payload = match cache.lookup(&name, order) {
        Some(hit) => hit,
        None => {
            let payload = json::emit(&expand_payload(&spec, order)?);
            cache.store(&name, order, &payload);
            payload
        }
    };
    deliver(out, &payload)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// apply / solve / double-eis
// ---------------------------------------------------------------------------

fn cmd_apply(op: OpName, input: &Path, in2: Option<&Path>, out: Option<&Path>) -> CmdResult {
    let f = load_series(input)?;
    let binary = matches!(op, OpName::Rc1 | OpName::Rc2 | OpName::Sym2);
    let result = if binary {
        let second = in2.ok_or_else(|| {
            Failure::Usage("this operator is a bracket of two forms; pass --in2".to_string())
        })?;
        let g = load_series(second)?;
        match op {
            OpName::Rc1 => rc_bracket1(&f, &g),
            OpName::Rc2 => rc_bracket2(&f, &g),
            OpName::Sym2 => sym_bracket2(&f, &g),
            _ => unreachable!(),
        }
    } else {
        if in2.is_some() {
            return Err(Failure::Usage(
                "--in2 only applies to the brackets rc1|rc2|sym2".to_string(),
            ));
        }
        match op {
            OpName::Del => del(&f),
            OpName::Dbar => dbar(&f),
            OpName::Laplace => laplace(&f),
            _ => unreachable!(),
        }
    };
    deliver(out, &json::emit(&json::series_to_json(&result)))?;
    Ok(0)
}

fn cmd_solve(input: &Path, target_r: i64, out: Option<&Path>) -> CmdResult {
    let f = load_series(input)?;
    let solution = solve_del_primitive(&f, target_r).map_err(run_error)?;
    let free: Vec<Value> = solution
        .free_parameters
        .iter()
        .map(|name| Value::from(name.as_str()))
        .collect();
    let obstructions: Vec<Value> = solution
        .obstruction_report
        .iter()
        .map(|entry| {
            json::object(vec![
                ("m", Value::from(entry.m)),
                ("n", Value::from(entry.n)),
                ("k", Value::from(entry.k)),
                ("coefficient", Value::from(entry.coefficient.as_str())),
                ("reason", Value::from(entry.reason)),
            ])
        })
        .collect();
    let value = json::object(vec![
        ("primitive", json::series_to_json(&solution.primitive)),
        ("free_parameters", Value::Array(free)),
        ("obstruction_report", Value::Array(obstructions)),
    ]);
    deliver(out, &json::emit(&value))?;
    Ok(0)
}

fn cmd_double_eis(a: i64, b: i64, k: i64, order: u32, out: Option<&Path>) -> CmdResult {
    let family =
        raqmod_core::primitives::build_double_eisenstein(a, b, k, order).map_err(usage)?;
    let mut map = Map::new();
    for (&(r, s), member) in family.members() {
        map.insert(format!("{r},{s}"), json::series_to_json(member));
    }
    let constants: Vec<Value> = family
        .undetermined_constants()
        .iter()
        .map(|name| Value::from(name.as_str()))
        .collect();
    map.insert("constants".to_string(), Value::Array(constants));
    deliver(out, &json::emit(&Value::Object(map)))?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// eval / graph-sum / petersson
// ---------------------------------------------------------------------------

fn cmd_eval(input: &Path, z_text: &str, tolerance: f64) -> CmdResult {
    let f = load_series(input)?;
    let z = parse_point(z_text)?;
    let cfg = EvalConfig::new(f.order(), tolerance).map_err(usage)?;
    let value = eval_series(&f, z, &cfg).map_err(run_error)?;
    let report = json::object(vec![
        ("value", json::complex_to_json(value.re, value.im)),
        ("error_estimate", Value::from(tolerance)),
        (
            "config",
            json::object(vec![
                ("order", Value::from(f.order())),
                ("z", json::complex_to_json(z.re, z.im)),
                ("target_abs_error", Value::from(tolerance)),
            ]),
        ),
    ]);
    println!("{}", json::emit(&report));
    Ok(0)
}

fn cmd_graph_sum(graph_path: &Path, z_text: &str, cutoff: u32, as_json: bool) -> CmdResult {
    let graph = json::graph_from_json(&load_json(graph_path)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", graph_path.display())))?;
    let z = parse_point(z_text)?;
    let result = graph_sum(&graph, z, cutoff).map_err(run_error)?;
    if as_json {
        let warnings: Vec<Value> = result
            .warnings
            .iter()
            .map(|w| Value::from(w.as_str()))
            .collect();
        let report = json::object(vec![
            ("value", Value::from(result.value)),
            ("error_estimate", Value::from(result.error_estimate)),
            (
                "config",
                json::object(vec![
                    ("cutoff", Value::from(result.cutoff)),
                    ("z", json::complex_to_json(z.re, z.im)),
                ]),
            ),
            ("term_count", Value::from(result.term_count)),
            ("warnings", Value::Array(warnings)),
        ]);
        println!("{}", json::emit(&report));
    } else {
        for warning in &result.warnings {
            eprintln!("warning: {warning}");
        }
        println!(
            "value = {} (error estimate {}, cutoff {}, {} terms)",
            json::fmt_float(result.value),
            json::fmt_float(result.error_estimate),
            result.cutoff,
            result.term_count
        );
    }
    Ok(0)
}

fn cmd_petersson(
    f_path: &Path,
    g_path: &Path,
    n: i64,
    nx: usize,
    ny: usize,
    y_max: f64,
) -> CmdResult {
    let f = load_series(f_path)?;
    let g = load_series(g_path)?;
    let order = f.order().max(g.order());
    let cfg = EvalConfig::new(order, 1e-9).map_err(usage)?;
    let grid = QuadratureGrid::new(nx, ny, y_max).map_err(usage)?;
    let value = petersson(&f, &g, n, &grid, &cfg).map_err(run_error)?;
    // Error estimate from a half-resolution grid: smooth integrands make
    // Gauss-Legendre converge fast, so the difference bounds the fine error.
    let coarse_grid =
        QuadratureGrid::new((nx / 2).max(8), (ny / 2).max(8), y_max).map_err(usage)?;
    let coarse = petersson(&f, &g, n, &coarse_grid, &cfg).map_err(run_error)?;
    let report = json::object(vec![
        ("value", json::complex_to_json(value.re, value.im)),
        ("error_estimate", Value::from((value - coarse).norm())),
        (
            "config",
            json::object(vec![
                ("n", Value::from(n)),
                ("nx", Value::from(nx as u64)),
                ("ny", Value::from(ny as u64)),
                ("y_max", Value::from(y_max)),
                ("order", Value::from(order)),
            ]),
        ),
    ]);
    println!("{}", json::emit(&report));
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(
    suite: &str,
    order: Option<u32>,
    cutoff: Option<u32>,
    tolerance: Option<f64>,
) -> CmdResult {
    if !SUITE_NAMES.contains(&suite) {
        return Err(Failure::Usage(format!(
            "unknown suite '{suite}'; expected one of: {}",
            SUITE_NAMES.join(", ")
        )));
    }
    if let Some(t) = tolerance {
        if t.is_nan() || t <= 0.0 {
            return Err(Failure::Usage("--tolerance must be positive".to_string()));
        }
    }
    let opts = VerifyOptions {
        order,
        cutoff,
        tolerance,
    };
    let report = run_suite(suite, &opts).map_err(run_error)?;
    // Human-readable copy on stderr; machine-readable JSON on stdout.
    eprintln!("{report}");
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|check| {
            json::object(vec![
                ("id", Value::from(check.id.as_str())),
                ("status", Value::from(if check.pass { "pass" } else { "fail" })),
                (
                    "kind",
                    Value::from(match check.kind {
                        CheckKind::Exact => "exact",
                        CheckKind::Numeric => "numeric",
                    }),
                ),
                ("residual", Value::from(check.residual)),
                ("threshold", Value::from(check.threshold)),
            ])
        })
        .collect();
    let notes: Vec<Value> = report
        .warnings
        .iter()
        .map(|w| Value::from(w.as_str()))
        .collect();
    let overall = report.overall();
    let value = json::object(vec![
        ("suite", Value::from(suite)),
        ("overall", Value::from(if overall { "pass" } else { "fail" })),
        ("checks", Value::Array(checks)),
        ("notes", Value::Array(notes)),
    ]);
    println!("{}", json::emit(&value));
    Ok(if overall { 0 } else { 1 })
}

//! JSON encodings for every value the command-line tool reads or writes,
//! plus the deterministic writer that renders them.
//!
//! Identical invocations must produce byte-identical output, so nothing here
//! relies on hash ordering or on the platform's float printing: objects are
//! written in the order their keys were inserted, arrays in construction
//! order, and every float in scientific notation with 17 significant digits
//! (enough to round-trip an `f64` exactly).
//!
//! Schemas:
//!
//! - scalar: `{"terms":[{"zetas":[3,3],"rat":"-1/2"}]}` — one entry per
//!   monomial in odd zeta values, rationals as decimal strings `p` or `p/q`.
//!   Monomials containing tracked named constants carry an additional
//!   `"syms":["name",...]` list; pure zeta-polynomial scalars omit it.
//! - series: `{"weights":[r,s],"order":N,"terms":[{"m":..,"n":..,"k":..,
//!   "coeff":<scalar>}]}` with terms ordered lexicographically in `(m,n,k)`.
//! - cocycle polynomial: `{"weight":2k,"gamma":"S","coeffs":[["i","j","p/q"],...]}`
//!   listing the nonzero coefficients of `X^i Y^j`.
//! - graph: `{"vertices":["v1","v2"],"edges":[{"tail":"v1","head":"v2"},...]}`
//!   where a `null` endpoint marks a half-edge.
//! - numeric results: `{"value":...,"error_estimate":...,"config":{...}}`;
//!   complex values are `{"re":...,"im":...}` objects.
//!
//! Parsers ignore unknown object keys, so annotated payloads (for example
//! the `constant_part` summary attached by `expand`) stay readable by every
//! subcommand.

use serde_json::{Map, Value};

use raqmod_core::forms::CocyclePoly;
use raqmod_core::lattice::{Edge, GraphSpec};
use raqmod_core::scalar::{rat_parse, Generator, Monomial, PeriodScalar, Rational};
use raqmod_core::series::{BiSeries, RAForm};

// ---------------------------------------------------------------------------
// Deterministic writer
// ---------------------------------------------------------------------------

/// Renders a float in scientific notation with 17 significant digits.
///
/// The fixed format keeps output byte-stable across platforms; 17 digits
/// suffice to reconstruct the exact `f64` bit pattern on read-back.
pub fn fmt_float(x: f64) -> String {
    // Normalize the sign of zero so `-0.0` cannot leak format differences.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn write_escaped(out: &mut String, text: &str) {
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                out.push_str(&format!("\\u{:04x}", c as u32));
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

fn write_value(out: &mut String, value: &Value) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                // Non-finite floats cannot be represented in JSON; the
                // numeric layers never produce them.
                write_escaped_float(out, n.as_f64().unwrap_or(0.0));
            }
        }
        Value::String(s) => write_escaped(out, s),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (key, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_escaped(out, key);
                out.push(':');
                write_value(out, item);
            }
            out.push('}');
        }
    }
}

fn write_escaped_float(out: &mut String, x: f64) {
    debug_assert!(x.is_finite(), "non-finite float reached the JSON writer");
    out.push_str(&fmt_float(x));
}

/// Serializes a value with the fixed ordering and float format. The result
/// carries no trailing newline.
pub fn emit(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value);
    out
}

/// Builds an object preserving the given key order.
pub fn object(entries: Vec<(&str, Value)>) -> Value {
    let mut map = Map::new();
    for (key, value) in entries {
        map.insert(key.to_string(), value);
    }
    Value::Object(map)
}

/// Encodes a complex number as `{"re":...,"im":...}`.
pub fn complex_to_json(re: f64, im: f64) -> Value {
    object(vec![
        ("re", Value::from(re)),
        ("im", Value::from(im)),
    ])
}

// ---------------------------------------------------------------------------
// Parse helpers
// ---------------------------------------------------------------------------

/// Parse-side errors; the caller reports them as usage problems (exit 2).
pub type ParseResult<T> = Result<T, String>;

fn expect_object<'v>(value: &'v Value, what: &str) -> ParseResult<&'v Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| format!("{what}: expected a JSON object"))
}

fn expect_field<'v>(map: &'v Map<String, Value>, key: &str, what: &str) -> ParseResult<&'v Value> {
    map.get(key)
        .ok_or_else(|| format!("{what}: missing required field \"{key}\""))
}

fn expect_array<'v>(value: &'v Value, what: &str) -> ParseResult<&'v Vec<Value>> {
    value
        .as_array()
        .ok_or_else(|| format!("{what}: expected a JSON array"))
}

fn expect_i64(value: &Value, what: &str) -> ParseResult<i64> {
    value
        .as_i64()
        .ok_or_else(|| format!("{what}: expected an integer"))
}

fn expect_u32(value: &Value, what: &str) -> ParseResult<u32> {
    let raw = expect_i64(value, what)?;
    u32::try_from(raw).map_err(|_| format!("{what}: expected a nonnegative 32-bit integer"))
}

fn expect_str<'v>(value: &'v Value, what: &str) -> ParseResult<&'v str> {
    value
        .as_str()
        .ok_or_else(|| format!("{what}: expected a string"))
}

// ---------------------------------------------------------------------------
// Scalars
// ---------------------------------------------------------------------------

fn rational_string(r: &Rational) -> String {
    // `Display` for rationals prints `p` or `p/q` in lowest terms, which is
    // exactly what `rat_parse` accepts.
    format!("{r}")
}

/// Encodes a coefficient as its list of monomial terms.
pub fn scalar_to_json(scalar: &PeriodScalar) -> Value {
    let mut terms = Vec::new();
    for (monomial, coefficient) in scalar.terms() {
        let mut zetas: Vec<u64> = Vec::new();
        let mut syms: Vec<String> = Vec::new();
        for generator in monomial.generators() {
            match generator {
                Generator::Zeta(n) => zetas.push(u64::from(*n)),
                Generator::Symbol(name) => syms.push(name.clone()),
            }
        }
        zetas.sort_unstable();
        syms.sort();
        let mut entry = vec![
            ("zetas", Value::from(zetas)),
            ("rat", Value::from(rational_string(coefficient))),
        ];
        if !syms.is_empty() {
            entry.push(("syms", Value::from(syms)));
        }
        terms.push(object(entry));
    }
    object(vec![("terms", Value::Array(terms))])
}

/// Decodes a coefficient from its term list.
pub fn scalar_from_json(value: &Value) -> ParseResult<PeriodScalar> {
    let map = expect_object(value, "scalar")?;
    let terms = expect_array(expect_field(map, "terms", "scalar")?, "scalar.terms")?;
    let mut pairs: Vec<(Monomial, Rational)> = Vec::new();
    for (index, term) in terms.iter().enumerate() {
        let what = format!("scalar.terms[{index}]");
        let term = expect_object(term, &what)?;
        let rat_text = expect_str(expect_field(term, "rat", &what)?, &format!("{what}.rat"))?;
        let coefficient =
            rat_parse(rat_text).map_err(|e| format!("{what}.rat: {e}"))?;
        let mut generators: Vec<Generator> = Vec::new();
        if let Some(zetas) = term.get("zetas") {
            for (zi, z) in expect_array(zetas, &format!("{what}.zetas"))?.iter().enumerate() {
                let n = expect_i64(z, &format!("{what}.zetas[{zi}]"))?;
                if n < 3 || n % 2 == 0 {
                    return Err(format!(
                        "{what}.zetas[{zi}]: zeta arguments must be odd integers >= 3, got {n}"
                    ));
                }
                generators.push(Generator::Zeta(n as u32));
            }
        }
        if let Some(syms) = term.get("syms") {
            for (si, s) in expect_array(syms, &format!("{what}.syms"))?.iter().enumerate() {
                let name = expect_str(s, &format!("{what}.syms[{si}]"))?;
                if name.is_empty() {
                    return Err(format!("{what}.syms[{si}]: empty symbol name"));
                }
                generators.push(Generator::Symbol(name.to_string()));
            }
        }
        pairs.push((Monomial::from_generators(generators), coefficient));
    }
    Ok(PeriodScalar::from_terms(pairs))
}

// ---------------------------------------------------------------------------
// Series
// ---------------------------------------------------------------------------

/// Encodes an expansion with its weights, order, and term list.
pub fn series_to_json(form: &RAForm) -> Value {
    let (r, s) = form.weights();
    let mut terms = Vec::new();
    for (&(m, n, k), coefficient) in form.series().iter() {
        terms.push(object(vec![
            ("m", Value::from(m)),
            ("n", Value::from(n)),
            ("k", Value::from(k)),
            ("coeff", scalar_to_json(coefficient)),
        ]));
    }
    object(vec![
        ("weights", Value::from(vec![r, s])),
        ("order", Value::from(form.order())),
        ("terms", Value::Array(terms)),
    ])
}

/// Decodes an expansion, validating weights and rebuilding the term map.
pub fn series_from_json(value: &Value) -> ParseResult<RAForm> {
    let map = expect_object(value, "series")?;
    let weights = expect_array(expect_field(map, "weights", "series")?, "series.weights")?;
    if weights.len() != 2 {
        return Err("series.weights: expected exactly [r, s]".to_string());
    }
    let r = expect_i64(&weights[0], "series.weights[0]")?;
    let s = expect_i64(&weights[1], "series.weights[1]")?;
    let order = expect_u32(expect_field(map, "order", "series")?, "series.order")?;
    let terms = expect_array(expect_field(map, "terms", "series")?, "series.terms")?;
    let mut series = BiSeries::zero(order);
    for (index, term) in terms.iter().enumerate() {
        let what = format!("series.terms[{index}]");
        let term = expect_object(term, &what)?;
        let m = expect_u32(expect_field(term, "m", &what)?, &format!("{what}.m"))?;
        let n = expect_u32(expect_field(term, "n", &what)?, &format!("{what}.n"))?;
        let k = expect_i64(expect_field(term, "k", &what)?, &format!("{what}.k"))?;
        if m > order || n > order {
            return Err(format!(
                "{what}: exponents ({m}, {n}) exceed the declared order {order}"
            ));
        }
        let coefficient = scalar_from_json(expect_field(term, "coeff", &what)?)
            .map_err(|e| format!("{what}.coeff: {e}"))?;
        series.add_term(m, n, k, coefficient);
    }
    RAForm::new(r, s, series).map_err(|e| format!("series: {e}"))
}

// ---------------------------------------------------------------------------
// Cocycle polynomials
// ---------------------------------------------------------------------------

/// Encodes a cocycle polynomial as its exponent/coefficient triples.
pub fn cocycle_to_json(poly: &CocyclePoly) -> Value {
    let mut coeffs = Vec::new();
    for (&(i, j), coefficient) in poly.coeffs() {
        coeffs.push(Value::from(vec![
            i.to_string(),
            j.to_string(),
            rational_string(coefficient),
        ]));
    }
    object(vec![
        ("weight", Value::from(poly.weight())),
        ("gamma", Value::from(poly.gamma().to_string())),
        ("coeffs", Value::Array(coeffs)),
    ])
}

// ---------------------------------------------------------------------------
// Graphs
// ---------------------------------------------------------------------------

/// Decodes a graph description with optional half-edge endpoints.
pub fn graph_from_json(value: &Value) -> ParseResult<GraphSpec> {
    let map = expect_object(value, "graph")?;
    let vertices = expect_array(expect_field(map, "vertices", "graph")?, "graph.vertices")?
        .iter()
        .enumerate()
        .map(|(i, v)| expect_str(v, &format!("graph.vertices[{i}]")).map(str::to_owned))
        .collect::<ParseResult<Vec<String>>>()?;
    let mut edges = Vec::new();
    for (index, edge) in expect_array(expect_field(map, "edges", "graph")?, "graph.edges")?
        .iter()
        .enumerate()
    {
        let what = format!("graph.edges[{index}]");
        let edge = expect_object(edge, &what)?;
        let endpoint = |key: &str| -> ParseResult<Option<String>> {
            match edge.get(key) {
                None | Some(Value::Null) => Ok(None),
                Some(v) => Ok(Some(
                    expect_str(v, &format!("{what}.{key}"))?.to_string(),
                )),
            }
        };
        edges.push(Edge {
            tail: endpoint("tail")?,
            head: endpoint("head")?,
        });
    }
    GraphSpec::new(vertices, edges).map_err(|e| format!("graph: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use raqmod_core::forms::real_eisenstein;

    #[test]
    fn floats_render_with_seventeen_significant_digits() {
        assert_eq!(fmt_float(0.0), "0.0000000000000000e0");
        assert_eq!(fmt_float(-0.0), "0.0000000000000000e0");
        let x = -2.0 * std::f64::consts::PI;
        let rendered = fmt_float(x);
        assert_eq!(rendered, "-6.2831853071795862e0");
        assert_eq!(rendered.parse::<f64>().unwrap(), x);
    }

    #[test]
    fn series_round_trips_through_json() {
        let form = real_eisenstein(1, 1, 6).unwrap();
        let encoded = series_to_json(&form);
        let decoded = series_from_json(&encoded).unwrap();
        assert_eq!(decoded.weights(), form.weights());
        assert!(decoded.sub(&form).unwrap().is_zero());
        // The writer is stable: encoding twice gives identical bytes.
        assert_eq!(emit(&encoded), emit(&series_to_json(&decoded)));
    }

    #[test]
    fn scalar_with_symbol_round_trips() {
        let scalar = PeriodScalar::zeta(3)
            .unwrap()
            .mul(&PeriodScalar::symbol("c_1"))
            .add(&PeriodScalar::from_frac(-7, 3));
        let decoded = scalar_from_json(&scalar_to_json(&scalar)).unwrap();
        assert!(decoded.sub(&scalar).is_zero());
    }

    #[test]
    fn malformed_series_is_rejected_with_a_diagnostic() {
        let bad: Value = serde_json::from_str(r#"{"weights":[1],"order":4,"terms":[]}"#).unwrap();
        let err = series_from_json(&bad).unwrap_err();
        assert!(err.contains("weights"), "unhelpful diagnostic: {err}");

        let odd: Value =
            serde_json::from_str(r#"{"weights":[1,2],"order":4,"terms":[]}"#).unwrap();
        let err = series_from_json(&odd).unwrap_err();
        assert!(err.contains("odd"), "unhelpful diagnostic: {err}");
    }

    #[test]
    fn graph_json_accepts_half_edges() {
        let value: Value = serde_json::from_str(
            r#"{"vertices":["a","b"],
                "edges":[{"tail":"a","head":"b"},{"tail":null,"head":"a"},{"head":"b"}]}"#,
        )
        .unwrap();
        let graph = graph_from_json(&value).unwrap();
        assert_eq!(graph.vertices().len(), 2);
        assert_eq!(graph.edges().len(), 3);
        assert_eq!(graph.edges()[1].tail, None);
        assert_eq!(graph.edges()[2].tail, None);
    }
}

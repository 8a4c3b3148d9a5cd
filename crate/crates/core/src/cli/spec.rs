//! The profile specification format (JSON, `schema_version` "1").
//!
//! ```json
//! {
//!   "schema_version": "1",
//!   "dimension": 3,
//!   "profile": {
//!     "breakpoints": [0, 1, 2],
//!     "pieces": [
//!       {"kind": "polynomial", "coefficients": ["4*pi"]},
//!       {"kind": "cantor", "outer": ["pi", "2*pi", "pi"], "orientation": "increasing"}
//!     ]
//!   },
//!   "drift": {"breakpoints": [1], "pieces": [], "left_tail": 0, "right_tail": 0.5},
//!   "direction": [1, 0]
//! }
//! ```
//!
//! Numbers may be JSON numbers or constant expressions in strings. Cantor
//! pieces accept either `outer` (coefficients of the polynomial applied to the
//! Cantor variable) or `base` and `amplitude`.

use std::fmt;

use serde_json::{json, Map, Value};

use crate::bv_profile::{BVFunction, CantorPiece, Orientation, Piece, Profile};
use crate::counterexamples::{Provenance, WitnessKind, WitnessSet};
use crate::poly::Poly;
use crate::symmetral::{first_axis, Drift, RadiusCoupling, TubeSet};

use super::expr;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub message: String,
    /// Position of a syntax error.
    pub line: Option<usize>,
    pub column: Option<usize>,
    /// Field path of a schema error, e.g. `profile.pieces[1].coefficients`.
    pub path: Option<String>,
}

impl ParseError {
    fn at(path: &str, message: impl Into<String>) -> Self {
        ParseError { message: message.into(), line: None, column: None, path: Some(path.to_string()) }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let (Some(l), Some(c)) = (self.line, self.column) {
            write!(f, "line {l}, column {c}: ")?;
        }
        if let Some(p) = &self.path {
            write!(f, "{p}: ")?;
        }
        write!(f, "{}", self.message)
    }
}

/// A parsed specification: the set plus the witness parameters, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecDocument {
    pub tube: TubeSet,
    pub witness: Option<(WitnessKind, Provenance)>,
}

impl From<WitnessSet> for SpecDocument {
    fn from(w: WitnessSet) -> Self {
        SpecDocument { tube: w.tube, witness: Some((w.kind, w.provenance)) }
    }
}

type Parsed<T> = Result<T, ParseError>;

fn object<'a>(v: &'a Value, path: &str) -> Parsed<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| ParseError::at(path, "expected an object"))
}

fn allow_fields(map: &Map<String, Value>, path: &str, allowed: &[&str]) -> Parsed<()> {
    for key in map.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(ParseError::at(&join(path, key), "unknown field"));
        }
    }
    Ok(())
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn field<'a>(map: &'a Map<String, Value>, path: &str, key: &str) -> Parsed<&'a Value> {
    map.get(key).ok_or_else(|| ParseError::at(&join(path, key), "missing field"))
}

fn number(v: &Value, path: &str) -> Parsed<f64> {
    let x = match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| ParseError::at(path, "number out of range"))?,
        Value::String(s) => expr::evaluate(s).map_err(|e| ParseError::at(path, e))?,
        _ => return Err(ParseError::at(path, "expected a number or an expression string")),
    };
    if !x.is_finite() {
        return Err(ParseError::at(path, "value is not finite"));
    }
    Ok(x)
}

fn numbers(v: &Value, path: &str) -> Parsed<Vec<f64>> {
    let items = v.as_array().ok_or_else(|| ParseError::at(path, "expected an array"))?;
    items
        .iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{path}[{i}]")))
        .collect()
}

fn integer(v: &Value, path: &str) -> Parsed<u64> {
    v.as_u64().ok_or_else(|| ParseError::at(path, "expected a non-negative integer"))
}

fn piece(v: &Value, path: &str) -> Parsed<Piece> {
    let map = object(v, path)?;
    let kind = field(map, path, "kind")?
        .as_str()
        .ok_or_else(|| ParseError::at(&join(path, "kind"), "expected a string"))?;
    match kind {
        "polynomial" => {
            allow_fields(map, path, &["kind", "coefficients"])?;
            let c = numbers(field(map, path, "coefficients")?, &join(path, "coefficients"))?;
            if c.is_empty() {
                return Err(ParseError::at(&join(path, "coefficients"), "needs at least one coefficient"));
            }
            Ok(Piece::Polynomial(Poly::new(c)))
        }
        "cantor" => {
            allow_fields(map, path, &["kind", "outer", "base", "amplitude", "orientation"])?;
            let orientation = match map.get("orientation") {
                None => Orientation::Increasing,
                Some(Value::String(s)) if s == "increasing" => Orientation::Increasing,
                Some(Value::String(s)) if s == "decreasing" => Orientation::Decreasing,
                Some(_) => {
                    return Err(ParseError::at(
                        &join(path, "orientation"),
                        "expected \"increasing\" or \"decreasing\"",
                    ))
                }
            };
            let outer = match map.get("outer") {
                Some(o) => {
                    if map.contains_key("base") || map.contains_key("amplitude") {
                        return Err(ParseError::at(path, "give either outer or base/amplitude"));
                    }
                    let c = numbers(o, &join(path, "outer"))?;
                    if c.is_empty() {
                        return Err(ParseError::at(&join(path, "outer"), "needs at least one coefficient"));
                    }
                    Poly::new(c)
                }
                None => {
                    let base = number(field(map, path, "base")?, &join(path, "base"))?;
                    let amp = number(field(map, path, "amplitude")?, &join(path, "amplitude"))?;
                    Poly::new(vec![base, amp])
                }
            };
            Ok(Piece::Cantor(CantorPiece { outer, orientation }))
        }
        other => Err(ParseError::at(&join(path, "kind"), format!("unknown piece kind '{other}'"))),
    }
}

fn pieces(v: &Value, path: &str) -> Parsed<Vec<Piece>> {
    let items = v.as_array().ok_or_else(|| ParseError::at(path, "expected an array"))?;
    items.iter().enumerate().map(|(i, p)| piece(p, &format!("{path}[{i}]"))).collect()
}

fn profile(v: &Value, dimension: usize) -> Parsed<Profile> {
    let path = "profile";
    let map = object(v, path)?;
    allow_fields(map, path, &["breakpoints", "pieces", "support"])?;
    let bp = numbers(field(map, path, "breakpoints")?, "profile.breakpoints")?;
    let ps = pieces(field(map, path, "pieces")?, "profile.pieces")?;
    if let Some(s) = map.get("support") {
        let s = numbers(s, "profile.support")?;
        if s.len() != 2 || bp.first() != Some(&s[0]) || bp.last() != Some(&s[1]) {
            return Err(ParseError::at("profile.support", "must equal [first, last] breakpoint"));
        }
    }
    let f = BVFunction::compact(bp, ps).map_err(|e| ParseError::at(path, e.to_string()))?;
    Profile::new(f, dimension).map_err(|e| ParseError::at(path, e.to_string()))
}

fn drift(v: &Value) -> Parsed<Drift> {
    let path = "drift";
    let map = object(v, path)?;
    allow_fields(map, path, &["breakpoints", "pieces", "left_tail", "right_tail", "couplings"])?;
    let bp = match map.get("breakpoints") {
        Some(b) => numbers(b, "drift.breakpoints")?,
        None => Vec::new(),
    };
    let ps = match map.get("pieces") {
        Some(p) => pieces(p, "drift.pieces")?,
        None => Vec::new(),
    };
    let left = map.get("left_tail").map(|x| number(x, "drift.left_tail")).transpose()?.unwrap_or(0.0);
    let right = map.get("right_tail").map(|x| number(x, "drift.right_tail")).transpose()?.unwrap_or(left);
    let mut couplings = Vec::new();
    if let Some(c) = map.get("couplings") {
        let items = c.as_array().ok_or_else(|| ParseError::at("drift.couplings", "expected an array"))?;
        for (i, item) in items.iter().enumerate() {
            let p = format!("drift.couplings[{i}]");
            let m = object(item, &p)?;
            allow_fields(m, &p, &["start", "end", "lambda", "anchor"])?;
            couplings.push(RadiusCoupling {
                start: number(field(m, &p, "start")?, &join(&p, "start"))?,
                end: number(field(m, &p, "end")?, &join(&p, "end"))?,
                lambda: number(field(m, &p, "lambda")?, &join(&p, "lambda"))?,
                anchor: number(field(m, &p, "anchor")?, &join(&p, "anchor"))?,
            });
        }
    }
    let f = if bp.is_empty() && ps.is_empty() && left == right {
        BVFunction::constant(left)
    } else {
        BVFunction::new(bp, ps, left, right).map_err(|e| ParseError::at(path, e.to_string()))?
    };
    Drift::new(f, couplings).map_err(|e| ParseError::at("drift.couplings", e.to_string()))
}

fn witness(v: &Value) -> Parsed<(WitnessKind, Provenance)> {
    let path = "witness";
    let map = object(v, path)?;
    allow_fields(map, path, &["kind", "z_bar", "tau", "lambda", "direction", "depth"])?;
    let kind = field(map, path, "kind")?
        .as_str()
        .and_then(WitnessKind::from_name)
        .ok_or_else(|| ParseError::at("witness.kind", "expected split, jump, cantor or staircase"))?;
    let opt = |key: &str| map.get(key).filter(|v| !v.is_null());
    let provenance = Provenance {
        z_bar: opt("z_bar").map(|x| number(x, "witness.z_bar")).transpose()?,
        tau: opt("tau").map(|x| numbers(x, "witness.tau")).transpose()?,
        lambda: opt("lambda").map(|x| number(x, "witness.lambda")).transpose()?,
        direction: numbers(field(map, path, "direction")?, "witness.direction")?,
        depth: opt("depth")
            .map(|x| integer(x, "witness.depth").map(|d| d as u32))
            .transpose()?,
    };
    Ok((kind, provenance))
}

pub fn parse_spec(text: &str) -> Parsed<SpecDocument> {
    let root: Value = serde_json::from_str(text).map_err(|e| ParseError {
        message: e.to_string(),
        line: Some(e.line()),
        column: Some(e.column()),
        path: None,
    })?;
    let map = object(&root, "")?;
    allow_fields(map, "", &["schema_version", "dimension", "profile", "drift", "direction", "witness"])?;
    match field(map, "", "schema_version")? {
        Value::String(s) if s == SCHEMA_VERSION => {}
        _ => return Err(ParseError::at("schema_version", format!("expected \"{SCHEMA_VERSION}\""))),
    }
    let n = integer(field(map, "", "dimension")?, "dimension")? as usize;
    if n < 2 {
        return Err(ParseError::at("dimension", "must be at least 2"));
    }
    let prof = profile(field(map, "", "profile")?, n)?;
    let d = map.get("drift").map(drift).transpose()?.unwrap_or_else(Drift::zero);
    let e = match map.get("direction") {
        Some(v) => numbers(v, "direction")?,
        None => first_axis(n - 1),
    };
    let tube = TubeSet::new(prof, d, e).map_err(|e| ParseError::at("direction", e.to_string()))?;
    let w = map.get("witness").map(witness).transpose()?;
    Ok(SpecDocument { tube, witness: w })
}

fn piece_json(p: &Piece) -> Value {
    match p {
        Piece::Polynomial(q) => json!({"kind": "polynomial", "coefficients": q.coeffs()}),
        Piece::Cantor(c) => json!({
            "kind": "cantor",
            "outer": c.outer.coeffs(),
            "orientation": match c.orientation {
                Orientation::Increasing => "increasing",
                Orientation::Decreasing => "decreasing",
            },
        }),
    }
}

fn function_json(f: &BVFunction) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("breakpoints".into(), json!(f.breakpoints()));
    m.insert("pieces".into(), Value::Array(f.pieces().iter().map(piece_json).collect()));
    m
}

pub fn write_spec(doc: &SpecDocument) -> String {
    let tube = &doc.tube;
    let mut root = Map::new();
    root.insert("schema_version".into(), json!(SCHEMA_VERSION));
    root.insert("dimension".into(), json!(tube.dimension()));
    root.insert("profile".into(), Value::Object(function_json(tube.profile().base())));
    let g = tube.drift().function();
    let mut d = function_json(g);
    d.insert("left_tail".into(), json!(g.left_tail()));
    d.insert("right_tail".into(), json!(g.right_tail()));
    d.insert(
        "couplings".into(),
        Value::Array(
            tube.drift()
                .couplings()
                .iter()
                .map(|c| json!({"start": c.start, "end": c.end, "lambda": c.lambda, "anchor": c.anchor}))
                .collect(),
        ),
    );
    root.insert("drift".into(), Value::Object(d));
    root.insert("direction".into(), json!(tube.direction()));
    if let Some((kind, p)) = &doc.witness {
        let mut w = Map::new();
        w.insert("kind".into(), json!(kind.name()));
        let optional = [
            ("z_bar", p.z_bar.map(|x| json!(x))),
            ("tau", p.tau.as_ref().map(|x| json!(x))),
            ("lambda", p.lambda.map(|x| json!(x))),
            ("depth", p.depth.map(|x| json!(x))),
        ];
        for (key, v) in optional {
            if let Some(v) = v {
                w.insert(key.into(), v);
            }
        }
        w.insert("direction".into(), json!(p.direction));
        root.insert("witness".into(), Value::Object(w));
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("JSON values serialise");
    s.push('\n');
    s
}

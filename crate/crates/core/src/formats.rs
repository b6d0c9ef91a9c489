//! Text documents for arrays and JSON rendering of reports.
//!
//! An array document is one header line, an optional label line and the
//! cell grid:
//!
//! ```text
//! # comment lines and blank lines are ignored
//! DELIVERY k1=3 k2=3 f=9 r=2 l=5 s=5
//! labels (1,1) (1,2) (1,3) (2,1) (2,2) (2,3) (3,1) (3,2) (3,3)
//! * 1 2 * * 3 4 * *
//! ...
//! ```
//!
//! Header kinds and their keys:
//!
//! * `EPDA k= l= f= z= s=`, no label line,
//! * `CACHING k1= k2= f= z=`, label line, tokens `*` and `-`,
//! * `DELIVERY k1= k2= f= r= l= s=`, label line, tokens `*` and integers.
//!
//! Keys may appear in any order; [`print_array`] writes them in the order
//! above with single spaces between tokens.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Ratio;
use serde_json::{json, Map, Value};

use crate::arrays::{
    ArrayKind, CachingArray, Cell, ConditionReport, Counterexample, DeliveryArray, Epda,
    IntegerArray,
};
use crate::error::{MaccError, Result};
use crate::grid::GridPos;
use crate::scalar::{ExactInt, SimFloat};
use crate::scheme::{DecodeReport, FailureKind, NdtReport, Trial};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArrayDocument {
    Epda(Epda),
    Caching(CachingArray),
    Delivery(DeliveryArray),
}

impl ArrayDocument {
    pub fn kind(&self) -> &'static str {
        match self {
            ArrayDocument::Epda(_) => "EPDA",
            ArrayDocument::Caching(_) => "CACHING",
            ArrayDocument::Delivery(_) => "DELIVERY",
        }
    }
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> MaccError {
    MaccError::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Whitespace-separated tokens with their 1-based character column.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (ci, (bi, ch)) in line.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some((ci, bi)),
            (true, Some((c0, b0))) => {
                out.push((c0 + 1, &line[b0..bi]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some((c0, b0)) = start {
        out.push((c0 + 1, &line[b0..]));
    }
    out
}

struct Header {
    kind: &'static str,
    values: BTreeMap<&'static str, usize>,
}

const EPDA_KEYS: [&str; 5] = ["k", "l", "f", "z", "s"];
const CACHING_KEYS: [&str; 4] = ["k1", "k2", "f", "z"];
const DELIVERY_KEYS: [&str; 6] = ["k1", "k2", "f", "r", "l", "s"];

fn parse_header(line_no: usize, line: &str) -> Result<Header> {
    let toks = tokens(line);
    let (col, tag) = toks[0];
    let (kind, keys): (&'static str, &[&'static str]) = match tag {
        "EPDA" => ("EPDA", &EPDA_KEYS),
        "CACHING" => ("CACHING", &CACHING_KEYS),
        "DELIVERY" => ("DELIVERY", &DELIVERY_KEYS),
        other => {
            return Err(parse_err(
                line_no,
                col,
                format!("unknown kind tag `{other}` (expected EPDA, CACHING or DELIVERY)"),
            ))
        }
    };
    let mut values = BTreeMap::new();
    for &(col, tok) in &toks[1..] {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, col, format!("expected key=value, got `{tok}`")))?;
        let key = *keys
            .iter()
            .find(|&&k| k == key)
            .ok_or_else(|| parse_err(line_no, col, format!("unknown key `{key}` for {kind}")))?;
        let value: usize = value
            .parse()
            .map_err(|_| parse_err(line_no, col + key.len() + 1, format!("bad value `{value}` for `{key}`")))?;
        if values.insert(key, value).is_some() {
            return Err(parse_err(line_no, col, format!("duplicate key `{key}`")));
        }
    }
    if let Some(missing) = keys.iter().find(|k| !values.contains_key(*k)) {
        return Err(parse_err(line_no, 1, format!("missing key `{missing}` in {kind} header")));
    }
    Ok(Header { kind, values })
}

fn parse_label(line_no: usize, col: usize, tok: &str) -> Result<GridPos> {
    let bad = || parse_err(line_no, col, format!("bad label `{tok}` (expected `(row,col)`)"));
    let inner = tok.strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
    let (a, b) = inner.split_once(',').ok_or_else(bad)?;
    let row = a.trim().parse().map_err(|_| bad())?;
    let col = b.trim().parse().map_err(|_| bad())?;
    Ok(GridPos::new(row, col))
}

fn parse_cell(line_no: usize, col: usize, tok: &str) -> Result<Cell> {
    match tok {
        "*" => Ok(Cell::Star),
        "-" => Ok(Cell::Null),
        t if t.bytes().all(|b| b.is_ascii_digit()) => t
            .parse()
            .map(Cell::Int)
            .map_err(|_| parse_err(line_no, col, format!("integer `{t}` out of range"))),
        t => Err(parse_err(line_no, col, format!("bad token `{t}` (expected `*`, `-` or an integer)"))),
    }
}

/// Parses one array document. Conditions are not verified.
pub fn parse_array(text: &str) -> Result<ArrayDocument> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });
    let (header_no, header_line) = lines
        .next()
        .ok_or_else(|| parse_err(1, 1, "empty document"))?;
    let header = parse_header(header_no, header_line)?;
    let v = |k: &str| header.values[k];

    let (cols, f) = match header.kind {
        "EPDA" => (v("k"), v("f")),
        _ => (v("k1") * v("k2"), v("f")),
    };
    let mut last_line = header_no;

    let labels = if header.kind == "EPDA" {
        Vec::new()
    } else {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| parse_err(header_no + 1, 1, "missing `labels` line"))?;
        last_line = line_no;
        let toks = tokens(line);
        if toks[0].1 != "labels" {
            return Err(parse_err(line_no, toks[0].0, "expected `labels` line"));
        }
        if toks.len() - 1 != cols {
            return Err(parse_err(
                line_no,
                1,
                format!("expected {cols} labels, got {}", toks.len() - 1),
            ));
        }
        toks[1..]
            .iter()
            .map(|&(c, t)| parse_label(line_no, c, t))
            .collect::<Result<Vec<_>>>()?
    };

    let mut cells = Vec::with_capacity(f * cols);
    for (line_no, line) in lines {
        last_line = line_no;
        let toks = tokens(line);
        if cells.len() == f * cols {
            return Err(parse_err(line_no, toks[0].0, format!("more than the declared {f} rows")));
        }
        if toks.len() != cols {
            return Err(parse_err(
                line_no,
                1,
                format!("row has {} tokens, expected {cols}", toks.len()),
            ));
        }
        for (c, t) in toks {
            let cell = parse_cell(line_no, c, t)?;
            let illegal = match (header.kind, cell) {
                ("CACHING", Cell::Int(_)) => Some("integers are not allowed in a CACHING array"),
                ("EPDA", Cell::Null) => Some("`-` is not allowed in an EPDA"),
                ("DELIVERY", Cell::Null) => Some("`-` is not allowed in a DELIVERY array"),
                _ => None,
            };
            if let Some(msg) = illegal {
                return Err(MaccError::Structural(format!("line {line_no}, column {c}: {msg}")));
            }
            cells.push(cell);
        }
    }
    if f > 0 && cols > 0 && cells.len() < f * cols {
        return Err(parse_err(
            last_line + 1,
            1,
            format!("expected {f} rows, got {}", cells.len() / cols),
        ));
    }

    Ok(match header.kind {
        "EPDA" => ArrayDocument::Epda(Epda::new(
            v("k"),
            v("l"),
            f,
            v("z"),
            alphabet(v("s"))?,
            cells,
        )?),
        "CACHING" => ArrayDocument::Caching(CachingArray::new(
            v("k1"),
            v("k2"),
            f,
            v("z"),
            cells.iter().map(|c| c.is_star()).collect(),
            labels,
        )?),
        _ => ArrayDocument::Delivery(DeliveryArray::new(
            v("k1"),
            v("k2"),
            f,
            v("r"),
            v("l"),
            alphabet(v("s"))?,
            cells,
            labels,
        )?),
    })
}

fn alphabet(s: usize) -> Result<u32> {
    u32::try_from(s).map_err(|_| MaccError::Structural(format!("s = {s} too large")))
}

pub fn parse_epda(text: &str) -> Result<Epda> {
    match parse_array(text)? {
        ArrayDocument::Epda(a) => Ok(a),
        other => Err(MaccError::Structural(format!("expected an EPDA document, got {}", other.kind()))),
    }
}

pub fn parse_caching(text: &str) -> Result<CachingArray> {
    match parse_array(text)? {
        ArrayDocument::Caching(c) => Ok(c),
        other => Err(MaccError::Structural(format!(
            "expected a CACHING document, got {}",
            other.kind()
        ))),
    }
}

pub fn parse_delivery(text: &str) -> Result<DeliveryArray> {
    match parse_array(text)? {
        ArrayDocument::Delivery(b) => Ok(b),
        other => Err(MaccError::Structural(format!(
            "expected a DELIVERY document, got {}",
            other.kind()
        ))),
    }
}

fn write_grid(out: &mut String, rows: usize, cols: usize, get: impl Fn(usize, usize) -> Cell) {
    for row in 0..rows {
        let line: Vec<String> = (0..cols).map(|c| get(row, c).to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
}

fn write_labels(out: &mut String, labels: &[GridPos]) {
    out.push_str("labels");
    for l in labels {
        let _ = write!(out, " {l}");
    }
    out.push('\n');
}

pub fn print_epda(a: &Epda) -> String {
    let mut out = format!("EPDA k={} l={} f={} z={} s={}\n", a.k(), a.l(), a.f(), a.z(), a.s());
    write_grid(&mut out, a.f(), a.k(), |r, c| a.get(r, c));
    out
}

pub fn print_caching(c: &CachingArray) -> String {
    let mut out = format!("CACHING k1={} k2={} f={} z={}\n", c.k1(), c.k2(), c.f(), c.z());
    write_labels(&mut out, c.labels());
    write_grid(&mut out, c.f(), c.cols(), |r, col| c.get(r, col));
    out
}

pub fn print_delivery(b: &DeliveryArray) -> String {
    let mut out = format!(
        "DELIVERY k1={} k2={} f={} r={} l={} s={}\n",
        b.k1(),
        b.k2(),
        b.f(),
        b.r(),
        b.l(),
        b.s()
    );
    write_labels(&mut out, b.labels());
    write_grid(&mut out, b.f(), b.cols(), |r, c| b.get(r, c));
    out
}

pub fn print_array(doc: &ArrayDocument) -> String {
    match doc {
        ArrayDocument::Epda(a) => print_epda(a),
        ArrayDocument::Caching(c) => print_caching(c),
        ArrayDocument::Delivery(b) => print_delivery(b),
    }
}

/// `"n/d"`, always with an explicit denominator.
pub fn rational_string<I: ExactInt>(x: &Ratio<I>) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Rounds to 12 significant digits; non-finite values become `null`.
pub fn residual_value<T: SimFloat>(x: T) -> Value {
    let x = x.to_f64().unwrap_or(f64::NAN);
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    json!(rounded)
}

/// JSON rendering with deterministic key order.
pub trait ToJson {
    fn to_json(&self) -> Value;
}

fn counterexample_json(condition: &str, c: &Counterexample) -> Value {
    let mut v = match c {
        Counterexample::StarCount { column, expected, found } => json!({
            "type": "star_count", "column": column, "expected": expected, "found": found
        }),
        Counterexample::StarMismatch { row, column, label, expected_star } => json!({
            "type": "star_mismatch", "row": row, "column": column,
            "label": label.to_string(), "expected_star": expected_star
        }),
        Counterexample::MissingInteger { s } => json!({ "type": "missing_integer", "s": s }),
        Counterexample::Repeated { s, column, first_row, second_row } => json!({
            "type": "repeated", "s": s, "column": column,
            "first_row": first_row, "second_row": second_row
        }),
        Counterexample::RowOverload { s, row, count, bound } => json!({
            "type": "row_overload", "s": s, "row": row, "count": count, "bound": bound
        }),
    };
    v["condition"] = json!(condition);
    v
}

impl ToJson for ConditionReport {
    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert(
            "kind".into(),
            json!(match self.kind {
                ArrayKind::Epda => "epda",
                ArrayKind::Delivery => "delivery",
            }),
        );
        for o in &self.outcomes {
            m.insert(o.name.into(), json!(o.passed()));
        }
        m.insert("pass".into(), json!(self.passed()));
        m.insert(
            "counterexamples".into(),
            Value::Array(
                self.counterexamples()
                    .map(|(name, c)| counterexample_json(name, c))
                    .collect(),
            ),
        );
        m.insert("notes".into(), json!(self.notes));
        Value::Object(m)
    }
}

impl<I: ExactInt> ToJson for NdtReport<I> {
    fn to_json(&self) -> Value {
        json!({
            "achieved": rational_string(&self.achieved),
            "formula_remark1": rational_string(&self.formula_remark1),
            "formula_corollary1": rational_string(&self.formula_corollary1),
            "lower_bound": rational_string(&self.lower_bound),
            "single_antenna_baseline": rational_string(&self.single_antenna_baseline),
            "optimal_flag": self.optimal_flag,
        })
    }
}

impl<T: SimFloat> ToJson for DecodeReport<T> {
    fn to_json(&self) -> Value {
        let users: Vec<Value> = self
            .users
            .iter()
            .map(|u| {
                json!({
                    "user": u.user.flat,
                    "max_error": residual_value(u.max_error),
                    "from_cache": u.from_cache,
                    "from_delivery": u.from_delivery,
                })
            })
            .collect();
        let failures: Vec<Value> = self
            .failures
            .iter()
            .map(|f| match &f.kind {
                FailureKind::Residual { error } => json!({
                    "user": f.user.flat, "s": f.s, "f": f.f,
                    "kind": "residual", "error": residual_value(*error),
                }),
                FailureKind::Undelivered => json!({
                    "user": f.user.flat, "s": f.s, "f": f.f, "kind": "undelivered",
                }),
            })
            .collect();
        json!({
            "pass": self.ok(),
            "tolerance": residual_value(self.tolerance),
            "max_error": residual_value(self.max_error()),
            "users": users,
            "failures": failures,
        })
    }
}

impl<T: SimFloat> ToJson for Trial<T> {
    fn to_json(&self) -> Value {
        json!({
            "seed": self.seed,
            "redraws": self.redraws,
            "transmissions": self.plan.transmissions.len(),
            "max_interference_set": self.plan.max_interference_set(),
            "max_nulling_residual": residual_value(self.plan.max_nulling_residual()),
            "min_desired_gain": residual_value(self.plan.min_desired_gain()),
            "decode": self.decode.to_json(),
        })
    }
}

impl ToJson for Value {
    fn to_json(&self) -> Value {
        self.clone()
    }
}

/// Pretty-printed JSON followed by a newline.
pub fn emit_report<R: ToJson + ?Sized>(report: &R) -> String {
    let mut s = serde_json::to_string_pretty(&report.to_json()).expect("JSON values serialize");
    s.push('\n');
    s
}

//! JSON values and aligned text tables for command output.

use serde_json::{json, Value};

use paramdp::monad::{Payload, UncertainValue};
use paramdp::poset::{Antichain, FinPoset, Label};
use paramdp::query::{Cost, Score};
use paramdp::rational::{format_rational, to_f64, Rational};

/// Rounds to 12 significant digits; the JSON writer then prints the shortest form.
pub fn float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    json!(rounded)
}

pub fn float_text(x: f64) -> String {
    match float(x) {
        Value::Null if x.is_infinite() => if x > 0.0 { "inf" } else { "-inf" }.to_string(),
        Value::Null => "nan".to_string(),
        v => v.to_string(),
    }
}

/// Exact numbers: integers as JSON integers when they fit, otherwise `"p/q"`.
pub fn rational(r: &Rational) -> Value {
    if r.is_integer() {
        if let Ok(n) = r.numer().to_string().parse::<i64>() {
            return json!(n);
        }
    }
    json!(format_rational(r))
}

pub fn label(l: &Label) -> Value {
    match l {
        Label::Num(r) => rational(r),
        Label::Name(s) => json!(s),
    }
}

/// An element as its per-factor labels.
pub fn element(p: &FinPoset, i: usize) -> Value {
    Value::Array(p.labels_of(i).into_iter().map(label).collect())
}

pub fn tuple_text(p: &FinPoset, i: usize) -> String {
    let parts: Vec<String> = p.labels_of(i).iter().map(|l| l.to_string()).collect();
    format!("({})", parts.join(", "))
}

pub fn antichain(a: &Antichain) -> Value {
    Value::Array(a.members().iter().map(|&m| element(a.poset(), m)).collect())
}

pub fn antichain_text(a: &Antichain) -> String {
    if a.is_empty() {
        return "{} (infeasible)".to_string();
    }
    let parts: Vec<String> = a.members().iter().map(|&m| tuple_text(a.poset(), m)).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Distribution atoms by mass descending, then by support order.
pub fn sorted_atoms<T>(atoms: &[(T, f64)]) -> Vec<(usize, &T, f64)> {
    let mut out: Vec<(usize, &T, f64)> = atoms.iter().enumerate().map(|(i, (x, p))| (i, x, *p)).collect();
    out.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));
    out
}

pub fn uncertain_antichain(v: &UncertainValue<Antichain>) -> Value {
    match v.payload() {
        Payload::Single(a) => json!({ "antichain": antichain(a) }),
        Payload::Set(items) => json!({ "set": items.iter().map(antichain).collect::<Vec<_>>() }),
        Payload::Interval { lo, hi } => json!({ "interval": { "best": antichain(lo), "worst": antichain(hi) } }),
        Payload::Dist(atoms) => json!({
            "atoms": sorted_atoms(atoms)
                .into_iter()
                .map(|(_, a, p)| json!([antichain(a), float(p)]))
                .collect::<Vec<_>>()
        }),
    }
}

/// One text line per alternative.
pub fn uncertain_antichain_lines(v: &UncertainValue<Antichain>) -> Vec<String> {
    match v.payload() {
        Payload::Single(a) => vec![antichain_text(a)],
        Payload::Set(items) => items.iter().map(|a| format!("one of {}", antichain_text(a))).collect(),
        Payload::Interval { lo, hi } => vec![
            format!("best  {}", antichain_text(lo)),
            format!("worst {}", antichain_text(hi)),
        ],
        Payload::Dist(atoms) => sorted_atoms(atoms)
            .into_iter()
            .map(|(_, a, p)| format!("{}: {}", antichain_text(a), float_text(p)))
            .collect(),
    }
}

pub fn cost(c: &Cost) -> Value {
    match c {
        Cost::Finite(r) => json!({ "exact": format_rational(r), "value": float(to_f64(r)) }),
        Cost::Infeasible => json!("infeasible"),
    }
}

pub fn score(s: &Score) -> Value {
    match s {
        Score::Exact(c) => cost(c),
        Score::Expected(x) if x.is_infinite() => json!("infeasible"),
        Score::Expected(x) => json!({ "value": float(*x) }),
    }
}

pub fn score_text(s: &Score) -> String {
    match s {
        Score::Exact(c) => c.to_string(),
        Score::Expected(x) if x.is_infinite() => "infeasible".to_string(),
        Score::Expected(x) => float_text(*x),
    }
}

/// A plain aligned table; the first row is the header.
pub struct Table {
    title: Option<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table {
            title: None,
            rows: vec![header.iter().map(|s| s.to_string()).collect()],
        }
    }

    pub fn titled(mut self, title: impl Into<String>) -> Table {
        self.title = Some(title.into());
        self
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let cols = self.rows.iter().map(Vec::len).max().unwrap_or(0);
        let widths: Vec<usize> = (0..cols)
            .map(|c| {
                self.rows
                    .iter()
                    .filter_map(|r| r.get(c))
                    .map(|s| s.chars().count())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        if let Some(t) = &self.title {
            out.push_str(t);
            out.push('\n');
        }
        for (i, row) in self.rows.iter().enumerate() {
            let line: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(c, s)| format!("{s:<width$}", width = widths[c]))
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
            if i == 0 {
                let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
                out.push_str(&rule.join("  "));
                out.push('\n');
            }
        }
        out
    }
}

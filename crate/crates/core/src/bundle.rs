//! JSON problem bundles: named posets, design problems, parameter factors,
//! cells and reparametrizations, an optional wiring diagram and a list of
//! query requests.
//!
//! Every schema error carries a JSON pointer to the offending value.
//!
//! ```json
//! {
//!   "monad": "interval",
//!   "posets": { "V": {"chain": [0, 1, 2]}, "P": {"grid": [{"name": "P", "values": [0, 2, 4]}]} },
//!   "dps":    { "C": {"threshold": {"fun": "V", "res": "P", "formula": "2 * V"}} },
//!   "diagram": "C ; id(P)",
//!   "queries": [ {"query": {"f": [1]}} ]
//! }
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::diagram::{self, Bindings, DiagramError, Expr, ExprKind, Interface};
use crate::dp::DesignProblem;
use crate::formula::Formula;
use crate::monad::{MonadKind, UncertainValue};
use crate::para::{ParamCell, ParamFactor, ParamSpace, Repar};
use crate::poset::{grid_poset, Direction, FinPoset, GridAxis, Label};
use crate::query::{FitDatum, FitMode, Observation, ThetaGrid, Utility};
use crate::rational::{parse_rational, to_f64, Rational};

/// Largest poset, parameter space or feasibility matrix side a bundle may build.
pub const MAX_ELEMENTS: usize = 4096;
/// Largest feasibility matrix (in bits) a diagram node may produce.
pub const MAX_MATRIX_BITS: usize = 1 << 24;

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("diagram: {0}")]
    Diagram(#[from] DiagramError),
}

impl BundleError {
    fn at(pointer: &str, message: impl Into<String>) -> BundleError {
        BundleError::Schema {
            pointer: if pointer.is_empty() {
                "/".to_string()
            } else {
                pointer.to_string()
            },
            message: message.into(),
        }
    }
}

type Res<T> = Result<T, BundleError>;

// Pointers are built on demand; owned strings keep the borrow story simple.
struct Node<'a> {
    value: &'a Value,
    path: String,
}

impl<'a> Node<'a> {
    fn root(value: &'a Value) -> Node<'a> {
        Node {
            value,
            path: String::new(),
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Res<T> {
        Err(BundleError::at(&self.path, message))
    }

    fn child(&self, key: &str, value: &'a Value) -> Node<'a> {
        let escaped = key.replace('~', "~0").replace('/', "~1");
        Node {
            value,
            path: format!("{}/{escaped}", self.path),
        }
    }

    fn object(&self) -> Res<&'a Map<String, Value>> {
        self.value
            .as_object()
            .ok_or_else(|| BundleError::at(&self.path, format!("expected an object, found {}", kind_of(self.value))))
    }

    fn array(&self) -> Res<Vec<Node<'a>>> {
        let items = self
            .value
            .as_array()
            .ok_or_else(|| BundleError::at(&self.path, format!("expected an array, found {}", kind_of(self.value))))?;
        Ok(items
            .iter()
            .enumerate()
            .map(|(i, v)| Node {
                value: v,
                path: format!("{}/{i}", self.path),
            })
            .collect())
    }

    fn str(&self) -> Res<&'a str> {
        self.value
            .as_str()
            .ok_or_else(|| BundleError::at(&self.path, format!("expected a string, found {}", kind_of(self.value))))
    }

    fn bool(&self) -> Res<bool> {
        match self.value {
            Value::Bool(b) => Ok(*b),
            Value::Number(n) if n.as_u64() == Some(0) => Ok(false),
            Value::Number(n) if n.as_u64() == Some(1) => Ok(true),
            other => self.err(format!("expected a boolean, found {}", kind_of(other))),
        }
    }

    fn rational(&self) -> Res<Rational> {
        let parsed = match self.value {
            Value::Number(n) => parse_rational(&n.to_string()),
            Value::String(s) => parse_rational(s),
            _ => None,
        };
        parsed.ok_or_else(|| BundleError::at(&self.path, format!("expected a number, found {}", kind_of(self.value))))
    }

    fn probability(&self) -> Res<f64> {
        let p = to_f64(&self.rational()?);
        if !(0.0..=1.0).contains(&p) {
            return self.err(format!("probability {p} is outside [0, 1]"));
        }
        Ok(p)
    }

    fn label(&self) -> Res<Label> {
        match self.value {
            Value::Number(_) => Ok(Label::Num(self.rational()?)),
            Value::String(s) => Ok(Label::Name(s.clone())),
            other => self.err(format!("expected a label (number or string), found {}", kind_of(other))),
        }
    }

    /// The single entry `{"tag": body}` of a tagged descriptor.
    fn tagged(&self, what: &str) -> Res<(&'a str, Node<'a>)> {
        let map = self.object()?;
        let mut entries = map.iter();
        match (entries.next(), entries.next()) {
            (Some((k, v)), None) => Ok((k.as_str(), self.child(k, v))),
            _ => self.err(format!("{what} descriptor must have exactly one key")),
        }
    }

    fn fields(&self, allowed: &[&str]) -> Res<Fields<'a>> {
        let map = self.object()?;
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(BundleError::at(
                    &self.child(key, &Value::Null).path,
                    format!("unknown field `{key}`, expected one of: {}", allowed.join(", ")),
                ));
            }
        }
        Ok(Fields {
            map,
            path: self.path.clone(),
        })
    }
}

struct Fields<'a> {
    map: &'a Map<String, Value>,
    path: String,
}

impl<'a> Fields<'a> {
    fn node(&self, key: &str, value: &'a Value) -> Node<'a> {
        Node {
            value,
            path: format!("{}/{key}", self.path),
        }
    }

    fn get(&self, key: &str) -> Option<Node<'a>> {
        self.map.get(key).map(|v| self.node(key, v))
    }

    fn get_any(&self, keys: &[&str]) -> Option<Node<'a>> {
        keys.iter().find_map(|k| self.get(k))
    }

    fn req(&self, key: &str) -> Res<Node<'a>> {
        self.get(key)
            .ok_or_else(|| BundleError::at(&self.path, format!("missing field `{key}`")))
    }
}

fn kind_of(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

fn label_matches(label: &Label, node: &Node) -> bool {
    match (label, node.value) {
        (Label::Name(a), Value::String(b)) => a == b,
        (Label::Num(a), Value::Number(_) | Value::String(_)) => node.rational().ok().as_ref() == Some(a),
        _ => false,
    }
}

fn text_matches(label: &Label, text: &str) -> bool {
    match label {
        Label::Name(a) => a == text,
        Label::Num(a) => parse_rational(text).as_ref() == Some(a),
    }
}

fn para_err(path: &str, e: crate::para::ParaError) -> BundleError {
    BundleError::at(path, e.to_string())
}

fn guard_size(node: &Node, size: Option<usize>, what: &str) -> Res<usize> {
    match size {
        Some(n) if n <= MAX_ELEMENTS => Ok(n),
        _ => node.err(format!("{what} would exceed {MAX_ELEMENTS} elements")),
    }
}

/// A request from the `queries` list, resolved against the bundle.
#[derive(Clone, Debug)]
pub enum Request {
    /// Minimal resources at each listed functionality.
    Query {
        label: String,
        cell: ParamCell,
        fs: Vec<usize>,
    },
    Decide {
        label: String,
        cell: ParamCell,
        f: usize,
        utility: Utility,
    },
    Infer {
        label: String,
        cell: ParamCell,
        factor: usize,
        prior: Vec<f64>,
        observations: Vec<Observation>,
    },
    Fit {
        label: String,
        formula: Formula,
        grid: ThetaGrid,
        data: Vec<FitDatum>,
        mode: FitMode,
        metric: Option<Formula>,
    },
}

impl Request {
    pub fn verb(&self) -> &'static str {
        match self {
            Request::Query { .. } => "query",
            Request::Decide { .. } => "decide",
            Request::Infer { .. } => "infer",
            Request::Fit { .. } => "fit",
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Request::Query { label, .. }
            | Request::Decide { label, .. }
            | Request::Infer { label, .. }
            | Request::Fit { label, .. } => label,
        }
    }
}

/// The evaluated wiring diagram.
#[derive(Clone, Debug)]
pub struct Evaluated {
    pub text: String,
    pub expr: Expr,
    pub interface: Interface,
    pub cell: ParamCell,
}

/// A loaded, fully resolved problem bundle.
#[derive(Clone, Debug)]
pub struct Bundle {
    pub kind: MonadKind,
    pub posets: BTreeMap<String, FinPoset>,
    pub dps: BTreeMap<String, DesignProblem>,
    pub factors: BTreeMap<String, ParamFactor>,
    pub cells: BTreeMap<String, ParamCell>,
    pub repars: BTreeMap<String, Repar>,
    pub diagram: Option<Evaluated>,
    pub requests: Vec<Request>,
}

impl Bundle {
    pub fn from_json(text: &str) -> Res<Bundle> {
        let value: Value = serde_json::from_str(text)?;
        Bundle::from_value(&value)
    }

    pub fn from_value(value: &Value) -> Res<Bundle> {
        let root = Node::root(value);
        let top = root.fields(&[
            "monad", "posets", "dps", "params", "cells", "repars", "diagram", "queries",
        ])?;
        let monad = top.req("monad")?;
        let kind: MonadKind = monad
            .str()?
            .parse()
            .map_err(|e: String| BundleError::at(&monad.path, e))?;
        let mut loader = Loader {
            kind,
            raw_posets: BTreeMap::new(),
            posets: BTreeMap::new(),
            in_progress: BTreeSet::new(),
            raw_dps: BTreeMap::new(),
            dps: BTreeMap::new(),
            factors: BTreeMap::new(),
            cells: BTreeMap::new(),
            raw_repars: BTreeMap::new(),
            repars: BTreeMap::new(),
        };
        if let Some(p) = top.get("posets") {
            for (k, v) in p.object()? {
                loader.raw_posets.insert(k.clone(), p.child(k, v));
            }
        }
        let names: Vec<String> = loader.raw_posets.keys().cloned().collect();
        for name in names {
            loader.named_poset(&name, &root)?;
        }
        if let Some(d) = top.get("dps") {
            for (k, v) in d.object()? {
                loader.raw_dps.insert(k.clone(), d.child(k, v));
            }
        }
        let names: Vec<String> = loader.raw_dps.keys().cloned().collect();
        for name in names {
            loader.named_dp(&name, &root)?;
        }
        if let Some(p) = top.get("params") {
            for (k, v) in p.object()? {
                let factor = loader.factor_body(k, &p.child(k, v))?;
                loader.factors.insert(k.clone(), factor);
            }
        }
        if let Some(r) = top.get("repars") {
            for (k, v) in r.object()? {
                loader.raw_repars.insert(k.clone(), r.child(k, v));
            }
        }
        let names: Vec<String> = loader.raw_repars.keys().cloned().collect();
        for name in names {
            loader.named_repar(&name, &root)?;
        }
        if let Some(c) = top.get("cells") {
            for (k, v) in c.object()? {
                let node = c.child(k, v);
                if loader.dps.contains_key(k) {
                    return node.err(format!("`{k}` is both a design problem and a cell"));
                }
                let cell = loader.cell(&node)?;
                loader.cells.insert(k.clone(), cell);
            }
        }
        let mut bundle = Bundle {
            kind,
            posets: loader.posets.clone(),
            dps: loader.dps.clone(),
            factors: loader.factors.clone(),
            cells: loader.cells.clone(),
            repars: loader.repars.clone(),
            diagram: None,
            requests: Vec::new(),
        };
        if let Some(d) = top.get("diagram") {
            let text = d.str()?;
            let expr = diagram::parse(text)?;
            let bindings = bundle.bindings();
            let interface = diagram::typecheck(&expr, &bindings)?;
            check_diagram_size(&expr, &bindings).map_err(|m| BundleError::at(&d.path, m))?;
            let cell = diagram::eval(&expr, &bindings)?;
            bundle.diagram = Some(Evaluated {
                text: text.to_string(),
                expr,
                interface,
                cell,
            });
        }
        if let Some(q) = top.get("queries") {
            for item in q.array()? {
                let request = loader.request(&item, &bundle)?;
                bundle.requests.push(request);
            }
        }
        Ok(bundle)
    }

    /// Diagram bindings: every cell and every design problem (included).
    pub fn bindings(&self) -> Bindings {
        let mut b = Bindings::new(self.kind);
        b.posets = self.posets.clone();
        b.repars = self.repars.clone();
        for (name, dp) in &self.dps {
            b.cells.insert(name.clone(), ParamCell::include(self.kind, dp.clone()));
        }
        b.cells.extend(self.cells.iter().map(|(k, v)| (k.clone(), v.clone())));
        b
    }

    /// The cell requests default to: the diagram, or else the only cell or design problem.
    pub fn default_cell(&self) -> Option<ParamCell> {
        if let Some(d) = &self.diagram {
            return Some(d.cell.clone());
        }
        let b = self.bindings();
        match b.cells.len() {
            1 => b.cells.into_values().next(),
            _ => None,
        }
    }
}

/// Rejects diagrams whose intermediate cells would be too large to build.
fn check_diagram_size(expr: &Expr, b: &Bindings) -> Result<(), String> {
    let t = diagram::typecheck(expr, b).map_err(|e| e.to_string())?;
    let bits = t.src.len().checked_mul(t.tgt.len());
    let wire = match &expr.kind {
        ExprKind::Loop { wire, .. } => b.posets.get(wire).map_or(1, |p| p.len()),
        _ => 1,
    };
    let bits = bits.and_then(|n| n.checked_mul(wire * wire));
    if t.src.len() > MAX_ELEMENTS || t.tgt.len() > MAX_ELEMENTS || bits.is_none_or(|n| n > MAX_MATRIX_BITS) {
        return Err(format!("diagram node `{expr}` is too large to evaluate"));
    }
    if t.params.len() > MAX_ELEMENTS {
        return Err(format!("diagram node `{expr}` has too many parameter points"));
    }
    match &expr.kind {
        ExprKind::Seq(a, c) | ExprKind::Par(a, c) => {
            check_diagram_size(a, b)?;
            check_diagram_size(c, b)
        }
        ExprKind::Loop { body, .. } | ExprKind::Repar { body, .. } => check_diagram_size(body, b),
        _ => Ok(()),
    }
}

struct Loader<'a> {
    kind: MonadKind,
    raw_posets: BTreeMap<String, Node<'a>>,
    posets: BTreeMap<String, FinPoset>,
    in_progress: BTreeSet<String>,
    raw_dps: BTreeMap<String, Node<'a>>,
    dps: BTreeMap<String, DesignProblem>,
    factors: BTreeMap<String, ParamFactor>,
    cells: BTreeMap<String, ParamCell>,
    raw_repars: BTreeMap<String, Node<'a>>,
    repars: BTreeMap<String, Repar>,
}

impl<'a> Loader<'a> {
    fn enter(&mut self, key: String, at: &Node) -> Res<()> {
        if !self.in_progress.insert(key.clone()) {
            return at.err(format!("`{}` is defined in terms of itself", &key[2..]));
        }
        Ok(())
    }

    fn named_poset(&mut self, name: &str, at: &Node) -> Res<FinPoset> {
        if let Some(p) = self.posets.get(name) {
            return Ok(p.clone());
        }
        let Some(node) = self.raw_posets.get(name) else {
            return at.err(format!("unknown poset `{name}`"));
        };
        let node = Node {
            value: node.value,
            path: node.path.clone(),
        };
        self.enter(format!("p:{name}"), at)?;
        let p = self.poset(&node)?.named(name);
        self.posets.insert(name.to_string(), p.clone());
        Ok(p)
    }

    fn poset(&mut self, node: &Node<'a>) -> Res<FinPoset> {
        if let Value::String(name) = node.value {
            return self.named_poset(name, node);
        }
        let (tag, body) = node.tagged("poset")?;
        let p = match tag {
            "chain" | "discrete" => {
                let labels = body.array()?.iter().map(Node::label).collect::<Res<Vec<_>>>()?;
                guard_size(&body, Some(labels.len()), "poset")?;
                let built = if tag == "chain" {
                    FinPoset::chain(labels)
                } else {
                    FinPoset::discrete(labels)
                };
                built.map_err(|e| BundleError::at(&body.path, e.to_string()))?
            }
            "grid" => {
                let axes = body.array()?.iter().map(grid_axis).collect::<Res<Vec<_>>>()?;
                let size = axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.values().len()));
                guard_size(&body, size, "grid")?;
                grid_poset(&axes).map_err(|e| BundleError::at(&body.path, e.to_string()))?
            }
            "product" => {
                let parts = body.array()?.iter().map(|n| self.poset(n)).collect::<Res<Vec<_>>>()?;
                let size = parts.iter().try_fold(1usize, |acc, p| acc.checked_mul(p.len()));
                guard_size(&body, size, "product")?;
                FinPoset::product_all(&parts)
            }
            "explicit" => {
                let f = body.fields(&["elements", "leq_pairs"])?;
                let elements = f.req("elements")?;
                let labels = elements.array()?.iter().map(Node::label).collect::<Res<Vec<_>>>()?;
                guard_size(&elements, Some(labels.len()), "poset")?;
                let mut pairs = Vec::new();
                if let Some(lp) = f.get("leq_pairs") {
                    for pair in lp.array()? {
                        let ends = pair.array()?;
                        if ends.len() != 2 {
                            return pair.err("a pair has exactly two elements");
                        }
                        let mut idx = [0; 2];
                        for (slot, end) in idx.iter_mut().zip(&ends) {
                            *slot = labels
                                .iter()
                                .position(|l| label_matches(l, end))
                                .ok_or_else(|| BundleError::at(&end.path, "not one of the listed elements"))?;
                        }
                        pairs.push((idx[0], idx[1]));
                    }
                }
                FinPoset::new(labels, &pairs).map_err(|e| BundleError::at(&body.path, e.to_string()))?
            }
            "op" => self.poset(&body)?.opposite(),
            other => {
                return node.err(format!(
                    "unknown poset descriptor `{other}`, expected chain, discrete, grid, product, explicit or op"
                ))
            }
        };
        Ok(p)
    }

    fn named_dp(&mut self, name: &str, at: &Node) -> Res<DesignProblem> {
        if let Some(d) = self.dps.get(name) {
            return Ok(d.clone());
        }
        let Some(node) = self.raw_dps.get(name) else {
            return at.err(format!("unknown design problem `{name}`"));
        };
        let node = Node {
            value: node.value,
            path: node.path.clone(),
        };
        self.enter(format!("d:{name}"), at)?;
        let d = self.dp(&node)?;
        self.dps.insert(name.to_string(), d.clone());
        Ok(d)
    }

    fn dp(&mut self, node: &Node<'a>) -> Res<DesignProblem> {
        if let Value::String(name) = node.value {
            return self.named_dp(name, node);
        }
        let (tag, body) = node.tagged("design problem")?;
        match tag {
            "matrix" => {
                let f = body.fields(&["fun", "res", "rows"])?;
                let fun = self.poset(&f.req("fun")?)?;
                let res = self.poset(&f.req("res")?)?;
                let rows_node = f.req("rows")?;
                let rows = rows_node
                    .array()?
                    .iter()
                    .map(|r| r.array()?.iter().map(Node::bool).collect::<Res<Vec<_>>>())
                    .collect::<Res<Vec<_>>>()?;
                DesignProblem::from_rows(fun, res, &rows).map_err(|e| BundleError::at(&rows_node.path, e.to_string()))
            }
            "threshold" => {
                let f = body.fields(&["fun", "res", "fun_grid", "res_grid", "formula"])?;
                let fun_node = f
                    .get_any(&["fun", "fun_grid"])
                    .ok_or_else(|| BundleError::at(&body.path, "missing field `fun`"))?;
                let res_node = f
                    .get_any(&["res", "res_grid"])
                    .ok_or_else(|| BundleError::at(&body.path, "missing field `res`"))?;
                let fun = self.poset(&fun_node)?;
                let res = self.poset(&res_node)?;
                let formulas = formulas(&f.req("formula")?)?;
                threshold(&fun, &res, &formulas, &BTreeMap::new()).map_err(|m| BundleError::at(&body.path, m))
            }
            other => node.err(format!(
                "unknown design problem descriptor `{other}`, expected matrix or threshold"
            )),
        }
    }

    fn factor_body(&mut self, name: &str, node: &Node<'a>) -> Res<ParamFactor> {
        let built = match node.value {
            Value::Array(_) => {
                let labels = node.array()?.iter().map(Node::label).collect::<Res<Vec<_>>>()?;
                guard_size(node, Some(labels.len()), "parameter factor")?;
                ParamFactor::new(name, labels)
            }
            _ => {
                let f = node.fields(&["name", "labels", "poset"])?;
                match (f.get("labels"), f.get("poset")) {
                    (Some(l), None) => {
                        let labels = l.array()?.iter().map(Node::label).collect::<Res<Vec<_>>>()?;
                        guard_size(&l, Some(labels.len()), "parameter factor")?;
                        ParamFactor::new(name, labels)
                    }
                    (None, Some(p)) => {
                        let poset = self.poset(&p)?;
                        ParamFactor::ordered(name, &poset)
                    }
                    _ => return node.err("a parameter factor has either `labels` or `poset`"),
                }
            }
        };
        built.map_err(|e| BundleError::at(&node.path, e.to_string()))
    }

    /// A factor reference: a registered name, or `{"name": .., "labels"|"poset": ..}`.
    fn factor(&mut self, node: &Node<'a>) -> Res<ParamFactor> {
        if let Value::String(name) = node.value {
            return self
                .factors
                .get(name)
                .cloned()
                .ok_or_else(|| BundleError::at(&node.path, format!("unknown parameter factor `{name}`")));
        }
        let f = node.fields(&["name", "labels", "poset"])?;
        let name = f.req("name")?.str()?;
        self.factor_body(name, node)
    }

    fn space(&mut self, node: &Node<'a>) -> Res<ParamSpace> {
        let factors = node.array()?.iter().map(|n| self.factor(n)).collect::<Res<Vec<_>>>()?;
        let space = ParamSpace::new(factors);
        let size = space
            .factors()
            .iter()
            .try_fold(1usize, |acc, f| acc.checked_mul(f.len()));
        guard_size(node, size, "parameter space")?;
        Ok(space)
    }

    fn cell(&mut self, node: &Node<'a>) -> Res<ParamCell> {
        let (tag, body) = match node.value {
            Value::Object(m) if m.len() == 1 && (m.contains_key("dp") || m.contains_key("threshold_family")) => {
                node.tagged("cell")?
            }
            _ => (
                "table",
                Node {
                    value: node.value,
                    path: node.path.clone(),
                },
            ),
        };
        let kind = self.kind;
        match tag {
            "dp" => Ok(ParamCell::include(kind, self.dp(&body)?)),
            "threshold_family" => {
                let f = body.fields(&["param", "fun", "res", "formula"])?;
                let dom = self.space(&f.req("param")?)?;
                let fun = self.poset(&f.req("fun")?)?;
                let res = self.poset(&f.req("res")?)?;
                let formulas = formulas(&f.req("formula")?)?;
                let table = (0..dom.len())
                    .map(|i| {
                        let mut env = BTreeMap::new();
                        for (factor, label) in dom.factors().iter().zip(dom.point_labels(i)) {
                            if let Some(v) = label.as_num() {
                                env.insert(factor.name().to_string(), v.clone());
                            }
                        }
                        threshold(&fun, &res, &formulas, &env)
                            .map(|dp| UncertainValue::unit(kind, dp))
                            .map_err(|m| BundleError::at(&body.path, format!("at point {}: {m}", dom.point_name(i))))
                    })
                    .collect::<Res<Vec<_>>>()?;
                ParamCell::new(kind, dom, fun, res, table).map_err(|e| para_err(&body.path, e))
            }
            _ => {
                let f = body.fields(&["param", "fun", "res", "table", "monad"])?;
                if let Some(m) = f.get("monad") {
                    if m.str()? != kind.name() {
                        return m.err(format!("a bundle uses one monad; this one is `{kind}`"));
                    }
                }
                let dom = match f.get("param") {
                    Some(p) => self.space(&p)?,
                    None => ParamSpace::unit(),
                };
                let fun = self.poset(&f.req("fun")?)?;
                let res = self.poset(&f.req("res")?)?;
                let table_node = f.req("table")?;
                let mut table: Vec<Option<UncertainValue<DesignProblem>>> = vec![None; dom.len()];
                match table_node.value {
                    Value::Array(_) => {
                        let items = table_node.array()?;
                        if items.len() != dom.len() {
                            return table_node.err(format!(
                                "{} entries for {} parameter points",
                                items.len(),
                                dom.len()
                            ));
                        }
                        for (i, item) in items.iter().enumerate() {
                            table[i] = Some(self.payload(item)?);
                        }
                    }
                    _ => {
                        for (key, v) in table_node.object()? {
                            let item = table_node.child(key, v);
                            let i = point_index(&dom, key).map_err(|m| BundleError::at(&item.path, m))?;
                            table[i] = Some(self.payload(&item)?);
                        }
                    }
                }
                let table = table
                    .into_iter()
                    .enumerate()
                    .map(|(i, v)| {
                        v.ok_or_else(|| {
                            BundleError::at(&table_node.path, format!("no entry for point {}", dom.point_name(i)))
                        })
                    })
                    .collect::<Res<Vec<_>>>()?;
                ParamCell::new(kind, dom, fun, res, table).map_err(|e| para_err(&body.path, e))
            }
        }
    }

    /// An uncertain design problem: a plain problem (`η`), `set`, `interval` or `atoms`.
    fn payload(&mut self, node: &Node<'a>) -> Res<UncertainValue<DesignProblem>> {
        let kind = self.kind;
        let tag = match node.value {
            Value::Object(m) if m.len() == 1 => m.keys().next().map(String::as_str),
            _ => None,
        };
        let value = match tag {
            Some("set") => {
                let (_, body) = node.tagged("payload")?;
                let items = body.array()?.iter().map(|n| self.dp(n)).collect::<Res<Vec<_>>>()?;
                UncertainValue::set(items).map_err(|e| BundleError::at(&body.path, e.to_string()))?
            }
            Some("interval") => {
                let (_, body) = node.tagged("payload")?;
                let ends = body.array()?;
                if ends.len() != 2 {
                    return body.err("an interval is `[lo, hi]`");
                }
                let lo = self.dp(&ends[0])?;
                let hi = self.dp(&ends[1])?;
                UncertainValue::interval(lo, hi, |a, b| a.leq(b).unwrap_or(false))
                    .map_err(|e| BundleError::at(&body.path, e.to_string()))?
            }
            Some("atoms") => {
                let (_, body) = node.tagged("payload")?;
                let mut atoms = Vec::new();
                for atom in body.array()? {
                    let pair = atom.array()?;
                    if pair.len() != 2 {
                        return atom.err("an atom is `[problem, probability]`");
                    }
                    atoms.push((self.dp(&pair[0])?, pair[1].probability()?));
                }
                UncertainValue::distribution(atoms).map_err(|e| BundleError::at(&body.path, e.to_string()))?
            }
            _ => UncertainValue::unit(kind, self.dp(node)?),
        };
        if value.kind() != kind {
            return node.err(format!("a {} payload in a {kind} bundle", value.kind()));
        }
        Ok(value)
    }

    fn named_repar(&mut self, name: &str, at: &Node) -> Res<Repar> {
        if let Some(r) = self.repars.get(name) {
            return Ok(r.clone());
        }
        let Some(node) = self.raw_repars.get(name) else {
            return at.err(format!("unknown reparametrization `{name}`"));
        };
        let node = Node {
            value: node.value,
            path: node.path.clone(),
        };
        self.enter(format!("r:{name}"), at)?;
        let r = self.repar(&node)?;
        self.repars.insert(name.to_string(), r.clone());
        Ok(r)
    }

    fn repar(&mut self, node: &Node<'a>) -> Res<Repar> {
        if let Value::String(name) = node.value {
            return self.named_repar(name, node);
        }
        let kind = self.kind;
        let map = node.object()?;
        if map.len() == 1 {
            let (tag, body) = node.tagged("reparametrization")?;
            match tag {
                "identity" => return Ok(Repar::identity(kind, &self.space(&body)?)),
                "swap" => {
                    let parts = body.array()?;
                    if parts.len() != 2 {
                        return body.err("swap takes two factor lists");
                    }
                    let (u, v) = (self.space(&parts[0])?, self.space(&parts[1])?);
                    return Ok(Repar::swap(kind, &u, &v));
                }
                "seq" | "tensor" => {
                    let parts = body.array()?;
                    let Some((first, rest)) = parts.split_first() else {
                        return body.err(format!("{tag} needs at least one reparametrization"));
                    };
                    let mut acc = self.repar(first)?;
                    for part in rest {
                        let next = self.repar(part)?;
                        acc = if tag == "seq" {
                            acc.vcompose(&next)
                        } else {
                            acc.tensor(&next)
                        }
                        .map_err(|e| para_err(&part.path, e))?;
                    }
                    return Ok(acc);
                }
                _ => {}
            }
        }
        let f = node.fields(&["dom", "cod", "table"])?;
        let dom = self.space(&f.req("dom")?)?;
        let cod = self.space(&f.req("cod")?)?;
        let table_node = f.req("table")?;
        let mut values: Vec<Option<UncertainValue<usize>>> = vec![None; dom.len()];
        for (key, v) in table_node.object()? {
            let item = table_node.child(key, v);
            let i = point_index(&dom, key).map_err(|m| BundleError::at(&item.path, m))?;
            values[i] = Some(point_payload(kind, &cod, &item)?);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| BundleError::at(&table_node.path, format!("no entry for point {}", dom.point_name(i))))
            })
            .collect::<Res<Vec<_>>>()?;
        Repar::new(kind, dom, cod, values).map_err(|e| para_err(&node.path, e))
    }

    fn request(&mut self, node: &Node<'a>, bundle: &Bundle) -> Res<Request> {
        let (verb, body) = node.tagged("request")?;
        let default_label = |name: Option<Node>| -> Res<String> {
            Ok(match name {
                Some(n) => n.str()?.to_string(),
                None => format!("{verb}#{}", bundle.requests.len()),
            })
        };
        let target = |f: &Fields<'a>| -> Res<ParamCell> {
            match f.get("cell") {
                Some(c) => {
                    let name = c.str()?;
                    bundle
                        .bindings()
                        .cells
                        .remove(name)
                        .ok_or_else(|| BundleError::at(&c.path, format!("unknown cell `{name}`")))
                }
                None => bundle.default_cell().ok_or_else(|| {
                    BundleError::at(&f.path, "no `cell` given and no diagram or single cell to default to")
                }),
            }
        };
        match verb {
            "query" => {
                let f = body.fields(&["name", "cell", "f"])?;
                let cell = target(&f)?;
                let fs = match f.get("f") {
                    Some(n) => vec![element(cell.src(), &n)?],
                    None => (0..cell.src().len()).collect(),
                };
                Ok(Request::Query {
                    label: default_label(f.get("name"))?,
                    cell,
                    fs,
                })
            }
            "decide" => {
                let f = body.fields(&["name", "cell", "f", "utility", "fix", "marginalize"])?;
                let mut cell = target(&f)?;
                let el = element(cell.src(), &f.req("f")?)?;
                let u = f.req("utility")?;
                let utility: Utility = serde_json::from_value(u.value.clone())
                    .map_err(|_| BundleError::at(&u.path, "expected expected, worst_case or best_case"))?;
                if let Some(fix) = f.get("fix") {
                    for (name, v) in fix.object()? {
                        let item = fix.child(name, v);
                        let d = factor_position(cell.dom(), name, &item)?;
                        let label = label_position(&cell.dom().factors()[d], &item)?;
                        cell = cell
                            .fix_factor(d, label)
                            .map_err(|e| BundleError::at(&item.path, e.to_string()))?;
                    }
                }
                if let Some(m) = f.get("marginalize") {
                    for (name, v) in m.object()? {
                        let item = m.child(name, v);
                        let d = factor_position(cell.dom(), name, &item)?;
                        let prior = weights(&cell.dom().factors()[d], &item)?;
                        cell = cell
                            .marginalize(d, &prior)
                            .map_err(|e| BundleError::at(&item.path, e.to_string()))?;
                    }
                }
                Ok(Request::Decide {
                    label: default_label(f.get("name"))?,
                    cell,
                    f: el,
                    utility,
                })
            }
            "infer" => {
                let f = body.fields(&["name", "cell", "factor", "prior", "observations"])?;
                let cell = target(&f)?;
                let fnode = f.req("factor")?;
                let factor = factor_position(cell.dom(), fnode.str()?, &fnode)?;
                let d = &cell.dom().factors()[factor];
                let prior = match f.get("prior") {
                    Some(p) => weights(d, &p)?,
                    None => vec![1.0 / d.len() as f64; d.len()],
                };
                let rest = cell.dom().without(factor);
                let mut observations = Vec::new();
                for o in f.req("observations")?.array()? {
                    let of = o.fields(&["x", "f", "r", "feasible"])?;
                    let x = match of.get("x") {
                        Some(x) => space_point(&rest, &x)?,
                        None if rest.is_unit() => 0,
                        None => return o.err("missing field `x`"),
                    };
                    observations.push(Observation {
                        x,
                        f: element(cell.src(), &of.req("f")?)?,
                        r: element(cell.tgt(), &of.req("r")?)?,
                        feasible: of.req("feasible")?.bool()?,
                    });
                }
                Ok(Request::Infer {
                    label: default_label(f.get("name"))?,
                    cell,
                    factor,
                    prior,
                    observations,
                })
            }
            "fit" => {
                let f = body.fields(&["name", "formula", "theta", "data", "mode", "metric"])?;
                let fnode = f.req("formula")?;
                let formula = Formula::parse(fnode.str()?).map_err(|e| BundleError::at(&fnode.path, e.to_string()))?;
                let metric = match f.get("metric") {
                    Some(m) => Some(Formula::parse(m.str()?).map_err(|e| BundleError::at(&m.path, e.to_string()))?),
                    None => None,
                };
                let theta = f.req("theta")?;
                let axes = theta.array()?.iter().map(grid_axis).collect::<Res<Vec<_>>>()?;
                let grid = ThetaGrid { axes };
                let size = grid
                    .axes
                    .iter()
                    .try_fold(1usize, |acc, a| acc.checked_mul(a.values().len()));
                if size.is_none_or(|n| n > 1 << 20) {
                    return theta.err("theta grid is too large");
                }
                let mut data = Vec::new();
                for d in f.req("data")?.array()? {
                    let df = d.fields(&["f", "r"])?;
                    let inputs = df.req("f")?;
                    let mut map = BTreeMap::new();
                    for (k, v) in inputs.object()? {
                        map.insert(k.clone(), inputs.child(k, v).rational()?);
                    }
                    data.push(FitDatum {
                        inputs: map,
                        resource: df.req("r")?.rational()?,
                    });
                }
                let mode = match f.get("mode") {
                    Some(m) => serde_json::from_value(m.value.clone())
                        .map_err(|_| BundleError::at(&m.path, "expected least_squares or constrained"))?,
                    None => FitMode::LeastSquares,
                };
                Ok(Request::Fit {
                    label: default_label(f.get("name"))?,
                    formula,
                    grid,
                    data,
                    mode,
                    metric,
                })
            }
            other => node.err(format!(
                "unknown request `{other}`, expected query, decide, infer or fit"
            )),
        }
    }
}

fn grid_axis(node: &Node) -> Res<GridAxis> {
    let f = node.fields(&["name", "values", "direction"])?;
    let name = f.req("name")?.str()?;
    let values = f.req("values")?;
    let vals = values.array()?.iter().map(Node::rational).collect::<Res<Vec<_>>>()?;
    guard_size(&values, Some(vals.len()), "axis")?;
    let direction = match f.get("direction") {
        None => Direction::Ascending,
        Some(d) => match d.str()? {
            "ascending" => Direction::Ascending,
            "descending" => Direction::Descending,
            other => return d.err(format!("unknown direction `{other}`")),
        },
    };
    GridAxis::new(name, vals, direction).map_err(|e| BundleError::at(&values.path, e.to_string()))
}

fn formulas(node: &Node) -> Res<Vec<Formula>> {
    let items = match node.value {
        Value::Array(_) => node.array()?,
        _ => vec![Node {
            value: node.value,
            path: node.path.clone(),
        }],
    };
    items
        .iter()
        .map(|n| Formula::parse(n.str()?).map_err(|e| BundleError::at(&n.path, e.to_string())))
        .collect()
}

/// `feas(f, r) = ∀k. formula_k(f, env) ≤ r_k`, with fun factors bound by name.
fn threshold(
    fun: &FinPoset,
    res: &FinPoset,
    formulas: &[Formula],
    env: &BTreeMap<String, Rational>,
) -> Result<DesignProblem, String> {
    let names: Vec<Option<&str>> = fun.factors().iter().map(|f| f.name()).collect();
    DesignProblem::threshold(fun, res, |coords| {
        let lookup = |var: &str| {
            names
                .iter()
                .position(|n| *n == Some(var))
                .map(|k| coords[k].clone())
                .or_else(|| env.get(var).cloned())
        };
        formulas
            .iter()
            .map(|f| f.eval(&lookup).map_err(|e| e.to_string()))
            .collect()
    })
    .map_err(|e| e.to_string())
}

/// A point of `space` written as comma-separated labels; `""` or `"()"` for the unit space.
fn point_index(space: &ParamSpace, key: &str) -> Result<usize, String> {
    let key = key.trim();
    if space.is_unit() {
        return match key {
            "" | "()" => Ok(0),
            _ => Err(format!("the parameter space has a single point `()`, not `{key}`")),
        };
    }
    let key = key.strip_prefix('(').and_then(|k| k.strip_suffix(')')).unwrap_or(key);
    let parts: Vec<&str> = key.split(',').map(str::trim).collect();
    if parts.len() != space.factors().len() {
        return Err(format!(
            "`{key}` names {} labels for {} factors",
            parts.len(),
            space.factors().len()
        ));
    }
    let coords = space
        .factors()
        .iter()
        .zip(&parts)
        .map(|(f, p)| {
            f.labels()
                .iter()
                .position(|l| text_matches(l, p))
                .ok_or_else(|| format!("`{p}` is not a label of factor `{}`", f.name()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(space.index(&coords).expect("coordinates in range"))
}

/// A reparametrization image: a point key, or `set` / `interval` / `atoms` of point keys.
fn point_payload(kind: MonadKind, cod: &ParamSpace, node: &Node) -> Res<UncertainValue<usize>> {
    let point = |n: &Node| -> Res<usize> { point_index(cod, n.str()?).map_err(|m| BundleError::at(&n.path, m)) };
    let value = match node.value {
        Value::String(_) => UncertainValue::unit(kind, point(node)?),
        _ => {
            let (tag, body) = node.tagged("image")?;
            let bad = |e: crate::monad::MonadError| BundleError::at(&body.path, e.to_string());
            match tag {
                "set" => UncertainValue::set(body.array()?.iter().map(point).collect::<Res<Vec<_>>>()?).map_err(bad)?,
                "interval" => {
                    let ends = body.array()?;
                    if ends.len() != 2 {
                        return body.err("an interval is `[lo, hi]`");
                    }
                    let (lo, hi) = (point(&ends[0])?, point(&ends[1])?);
                    UncertainValue::interval(lo, hi, |a, b| cod.leq(*a, *b)).map_err(bad)?
                }
                "atoms" => {
                    let mut atoms = Vec::new();
                    for atom in body.array()? {
                        let pair = atom.array()?;
                        if pair.len() != 2 {
                            return atom.err("an atom is `[point, probability]`");
                        }
                        atoms.push((point(&pair[0])?, pair[1].probability()?));
                    }
                    UncertainValue::distribution(atoms).map_err(bad)?
                }
                other => return node.err(format!("unknown image `{other}`, expected set, interval or atoms")),
            }
        }
    };
    if value.kind() != kind {
        return node.err(format!("a {} image in a {kind} bundle", value.kind()));
    }
    Ok(value)
}

/// An element of `p`: a bare label (one factor), a label array, or `{factor: label}`.
fn element(p: &FinPoset, node: &Node) -> Res<usize> {
    let factors = p.factors();
    let parts: Vec<Node> = match node.value {
        Value::Array(_) => node.array()?,
        Value::Object(m) => {
            let mut out = Vec::new();
            for f in factors {
                let name = f.name().unwrap_or_default();
                let v = m
                    .get(name)
                    .ok_or_else(|| BundleError::at(&node.path, format!("missing factor `{name}`")))?;
                out.push(node.child(name, v));
            }
            if m.len() != out.len() {
                return node.err(format!("expected exactly the factors of {p}"));
            }
            out
        }
        _ => vec![Node {
            value: node.value,
            path: node.path.clone(),
        }],
    };
    if parts.len() != factors.len() {
        return node.err(format!(
            "{} labels for the {} factors of {p}",
            parts.len(),
            factors.len()
        ));
    }
    let coords = factors
        .iter()
        .zip(&parts)
        .map(|(f, n)| {
            f.labels()
                .iter()
                .position(|l| label_matches(l, n))
                .ok_or_else(|| BundleError::at(&n.path, format!("not a label of factor {}", f.name().unwrap_or("?"))))
        })
        .collect::<Res<Vec<_>>>()?;
    Ok(p.index_of_coords(&coords).expect("coordinates in range"))
}

/// A point of a parameter space given as `{factor: label}`.
fn space_point(space: &ParamSpace, node: &Node) -> Res<usize> {
    let m = node.object()?;
    if m.len() != space.factors().len() {
        return node.err(format!("expected labels for exactly the factors {space}"));
    }
    let coords = space
        .factors()
        .iter()
        .map(|f| {
            let v = m
                .get(f.name())
                .ok_or_else(|| BundleError::at(&node.path, format!("missing factor `{}`", f.name())))?;
            label_position(f, &node.child(f.name(), v))
        })
        .collect::<Res<Vec<_>>>()?;
    Ok(space.index(&coords).expect("coordinates in range"))
}

fn factor_position(space: &ParamSpace, name: &str, at: &Node) -> Res<usize> {
    space
        .position(name)
        .ok_or_else(|| BundleError::at(&at.path, format!("no parameter factor `{name}` in {space}")))
}

fn label_position(f: &ParamFactor, node: &Node) -> Res<usize> {
    f.labels()
        .iter()
        .position(|l| label_matches(l, node))
        .ok_or_else(|| BundleError::at(&node.path, format!("not a label of factor `{}`", f.name())))
}

/// Weights over a factor's labels: an array in label order or `{label: p}` (missing labels get 0).
fn weights(f: &ParamFactor, node: &Node) -> Res<Vec<f64>> {
    match node.value {
        Value::Array(_) => {
            let items = node.array()?;
            if items.len() != f.len() {
                return node.err(format!(
                    "{} weights for the {} labels of `{}`",
                    items.len(),
                    f.len(),
                    f.name()
                ));
            }
            items.iter().map(Node::probability).collect()
        }
        _ => {
            let mut out = vec![0.0; f.len()];
            for (k, v) in node.object()? {
                let item = node.child(k, v);
                let i =
                    f.labels().iter().position(|l| text_matches(l, k)).ok_or_else(|| {
                        BundleError::at(&item.path, format!("`{k}` is not a label of `{}`", f.name()))
                    })?;
                out[i] = item.probability()?;
            }
            Ok(out)
        }
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} bundle: {} posets, {} problems, {} cells, {} reparametrizations, {} requests",
            self.kind,
            self.posets.len(),
            self.dps.len(),
            self.cells.len(),
            self.repars.len(),
            self.requests.len()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::fix_fun_min_res;
    use crate::rational::int;

    fn load(v: Value) -> Res<Bundle> {
        Bundle::from_json(&v.to_string())
    }

    fn pointer(e: BundleError) -> String {
        match e {
            BundleError::Schema { pointer, .. } => pointer,
            other => panic!("expected a schema error, got {other}"),
        }
    }

    #[test]
    fn posets_of_every_shape() {
        let b = load(serde_json::json!({
            "monad": "identity",
            "posets": {
                "C": {"chain": [0, 1, 2]},
                "G": {"grid": [{"name": "x", "values": [0, 0.5, "3/2"]}, {"name": "y", "values": [1, 2], "direction": "descending"}]},
                "D": {"explicit": {"elements": ["a", "b", "c"], "leq_pairs": [["a", "b"], ["a", "c"]]}},
                "CD": {"product": ["C", "D"]},
                "Cop": {"op": "C"}
            }
        }))
        .unwrap();
        assert_eq!(b.posets["C"].len(), 3);
        assert_eq!(b.posets["G"].len(), 6);
        assert_eq!(b.posets["CD"].len(), 9);
        assert_eq!(b.posets["CD"].factors()[1].name(), Some("D"));
        let d = &b.posets["D"];
        assert!(d.leq(0, 2) && !d.leq(1, 2));
        assert!(b.posets["Cop"].leq(2, 0));
    }

    #[test]
    fn threshold_dps_use_factor_names() {
        let b = load(serde_json::json!({
            "monad": "identity",
            "posets": {"V": {"chain": [0, 1, 2]}, "P": {"chain": [0, 1, 2, 3, 4]}},
            "dps": {"T": {"threshold": {"fun_grid": "V", "res_grid": "P", "formula": "2 * V"}}},
            "queries": [{"query": {"f": 2}}]
        }))
        .unwrap();
        let t = &b.dps["T"];
        assert_eq!(fix_fun_min_res(t, 2).unwrap().members(), [4]);
        match &b.requests[0] {
            Request::Query { fs, .. } => assert_eq!(fs, &[2]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cells_repars_and_diagram() {
        let b = load(serde_json::json!({
            "monad": "distribution",
            "posets": {"B": {"chain": [0, 1]}},
            "dps": {
                "top": {"matrix": {"fun": "B", "res": "B", "rows": [[1, 1], [1, 1]]}},
                "ident": {"matrix": {"fun": "B", "res": "B", "rows": [[true, true], [false, true]]}}
            },
            "params": {"d": ["lo", "hi"]},
            "cells": {
                "X": {"param": ["d"], "fun": "B", "res": "B", "table": {
                    "lo": "ident",
                    "hi": {"atoms": [["ident", 0.25], ["top", 0.75]]}
                }}
            },
            "repars": {"flip": {"dom": ["d"], "cod": ["d"], "table": {"lo": "hi", "hi": {"atoms": [["lo", 0.5], ["hi", 0.5]]}}}},
            "diagram": "repar[flip](X) ; ident",
            "queries": [{"infer": {"cell": "X", "factor": "d", "observations": [{"f": 1, "r": 0, "feasible": true}]}}]
        }))
        .unwrap();
        let d = b.diagram.as_ref().unwrap();
        assert_eq!(d.interface.params.len(), 2);
        match &b.requests[0] {
            Request::Infer {
                prior, observations, ..
            } => {
                assert_eq!(prior, &[0.5, 0.5]);
                assert_eq!(
                    observations[0],
                    Observation {
                        x: 0,
                        f: 1,
                        r: 0,
                        feasible: true
                    }
                );
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn threshold_family_binds_parameters() {
        let b = load(serde_json::json!({
            "monad": "identity",
            "posets": {"V": {"chain": [0, 1]}, "P": {"chain": [0, 1, 2, 3]}},
            "params": {"theta": [1, 2, 3]},
            "cells": {"C": {"threshold_family": {"param": ["theta"], "fun": "V", "res": "P", "formula": "theta * V"}}},
            "queries": [{"decide": {"cell": "C", "f": 1, "utility": "worst_case", "fix": {"theta": 2}}}]
        }))
        .unwrap();
        let c = &b.cells["C"];
        let costs: Vec<usize> = (0..3)
            .map(|i| c.at(i).support()[0].feasible_row(1).iter().next().unwrap())
            .collect();
        assert_eq!(costs, [1, 2, 3]);
        match &b.requests[0] {
            Request::Decide { cell, .. } => assert!(cell.dom().is_unit()),
            other => panic!("{other:?}"),
        }
        assert_eq!(int(2), parse_rational("2").unwrap());
    }

    #[test]
    fn errors_point_at_the_offending_value() {
        let e = load(
            serde_json::json!({"monad": "identity", "posets": {"V": {"grid": [{"name": "v", "values": [2, 1]}]}}}),
        )
        .unwrap_err();
        assert_eq!(pointer(e), "/posets/V/grid/0/values");
        let e = load(serde_json::json!({"monad": "maybe"})).unwrap_err();
        assert_eq!(pointer(e), "/monad");
        let e = load(serde_json::json!({"monad": "identity", "posets": {"A": {"op": "B"}}})).unwrap_err();
        assert_eq!(pointer(e), "/posets/A/op");
        let e = load(serde_json::json!({"monad": "identity", "posets": {"A": {"op": "A"}}})).unwrap_err();
        assert_eq!(pointer(e), "/posets/A/op");
        let e = load(serde_json::json!({"monad": "identity", "extra": 1})).unwrap_err();
        assert_eq!(pointer(e), "/extra");
        let e = load(serde_json::json!({
            "monad": "powerset",
            "posets": {"B": {"chain": [0, 1]}},
            "cells": {"X": {"fun": "B", "res": "B", "table": {"()": {"atoms": [[{"matrix": {"fun": "B", "res": "B", "rows": [[1, 1], [1, 1]]}}, 1]]}}}}
        }))
        .unwrap_err();
        assert_eq!(pointer(e), "/cells/X/table/()");
        let e = load(serde_json::json!({"monad": "identity", "posets": {"B": {"chain": [0, 1]}}, "dps": {"T": {"threshold": {"fun": "B", "res": "B", "formula": "B +"}}}})).unwrap_err();
        assert_eq!(pointer(e), "/dps/T/threshold/formula");
        assert!(matches!(Bundle::from_json("{"), Err(BundleError::Json(_))));
    }

    #[test]
    fn diagram_errors_keep_positions() {
        let e = load(serde_json::json!({"monad": "identity", "diagram": "A ;"})).unwrap_err();
        assert!(
            matches!(e, BundleError::Diagram(ref d) if d.position() == Some((1, 4))),
            "{e}"
        );
        let e = load(serde_json::json!({"monad": "identity", "diagram": "id(Q)"})).unwrap_err();
        assert!(matches!(e, BundleError::Diagram(DiagramError::UnknownName { .. })));
    }

    #[test]
    fn oversized_inputs_are_refused() {
        let e = load(serde_json::json!({
            "monad": "identity",
            "posets": {"A": {"grid": [
                {"name": "a", "values": (0..100).collect::<Vec<_>>()},
                {"name": "b", "values": (0..100).collect::<Vec<_>>()}
            ]}}
        }))
        .unwrap_err();
        assert_eq!(pointer(e), "/posets/A/grid");
        let e = load(serde_json::json!({
            "monad": "identity",
            "posets": {"A": {"chain": (0..60).collect::<Vec<_>>()}},
            "diagram": "id(A) | id(A) | id(A)"
        }))
        .unwrap_err();
        assert_eq!(pointer(e), "/diagram");
    }
}

//! Wiring expressions for co-design diagrams.
//!
//! ```text
//! expr := term (';' term)*
//! term := atom ('|' atom)*
//! atom := NAME | id(P) | sym(P, Q) | cap(P) | cup(P)
//!       | loop[W](expr) | repar[NAME](expr) | (expr)
//! ```
//!
//! `;` is series composition and `|` is the parallel product; both associate
//! to the left and `|` binds tighter. Poset arguments name bound posets.
//! Parameter factors of a composite appear in left-to-right, depth-first order.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::dp::DesignProblem;
use crate::monad::MonadKind;
use crate::para::{ParaError, ParamCell, ParamSpace, Repar};
use crate::poset::FinPoset;

const MAX_DEPTH: usize = 64;

/// Source location of a node: byte range plus the 1-based line and column of its start.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum DiagramError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{span}: unknown {namespace} `{name}`")]
    UnknownName {
        namespace: &'static str,
        name: String,
        span: Span,
    },
    #[error("{span}: type mismatch in {context}: {left} vs {right}")]
    TypeMismatch {
        span: Span,
        context: &'static str,
        left: String,
        right: String,
    },
    #[error("{span}: monad kind mismatch: cell `{name}` is {found}, diagram is {expected}")]
    KindMismatch {
        span: Span,
        name: String,
        expected: MonadKind,
        found: MonadKind,
    },
    #[error("{span}: {source}")]
    Para { span: Span, source: Box<ParaError> },
}

impl DiagramError {
    /// Location of the offending node, if any.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            DiagramError::Syntax { line, col, .. } => Some((*line, *col)),
            DiagramError::UnknownName { span, .. }
            | DiagramError::TypeMismatch { span, .. }
            | DiagramError::KindMismatch { span, .. }
            | DiagramError::Para { span, .. } => Some((span.line, span.col)),
        }
    }
}

#[derive(Clone, Debug)]
pub enum ExprKind {
    Ref(String),
    Seq(Box<Expr>, Box<Expr>),
    Par(Box<Expr>, Box<Expr>),
    Id(String),
    Sym(String, String),
    Cap(String),
    Cup(String),
    Loop { wire: String, body: Box<Expr> },
    Repar { name: String, body: Box<Expr> },
}

/// A node with its source span. Equality ignores spans.
#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        use ExprKind::*;
        match (&self.kind, &other.kind) {
            (Ref(a), Ref(b)) | (Id(a), Id(b)) | (Cap(a), Cap(b)) | (Cup(a), Cup(b)) => a == b,
            (Sym(a, b), Sym(c, d)) => a == c && b == d,
            (Seq(a, b), Seq(c, d)) | (Par(a, b), Par(c, d)) => a == c && b == d,
            (Loop { wire: w, body: e }, Loop { wire: v, body: f }) => w == v && e == f,
            (Repar { name: n, body: e }, Repar { name: m, body: f }) => n == m && e == f,
            _ => false,
        }
    }
}

impl Expr {
    /// A node without a meaningful location, for programmatic construction.
    pub fn new(kind: ExprKind) -> Expr {
        Expr {
            kind,
            span: Span::default(),
        }
    }

    pub fn reference(name: &str) -> Expr {
        Expr::new(ExprKind::Ref(name.to_string()))
    }

    pub fn seq(a: Expr, b: Expr) -> Expr {
        Expr::new(ExprKind::Seq(Box::new(a), Box::new(b)))
    }

    pub fn par(a: Expr, b: Expr) -> Expr {
        Expr::new(ExprKind::Par(Box::new(a), Box::new(b)))
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match &self.kind {
            ExprKind::Seq(a, b) | ExprKind::Par(a, b) => 1 + a.size() + b.size(),
            ExprKind::Loop { body, .. } | ExprKind::Repar { body, .. } => 1 + body.size(),
            _ => 1,
        }
    }
}

impl fmt::Display for Expr {
    // Prints the fewest parentheses the grammar needs.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Ref(n) => f.write_str(n),
            ExprKind::Id(p) => write!(f, "id({p})"),
            ExprKind::Sym(p, q) => write!(f, "sym({p}, {q})"),
            ExprKind::Cap(p) => write!(f, "cap({p})"),
            ExprKind::Cup(p) => write!(f, "cup({p})"),
            ExprKind::Loop { wire, body } => write!(f, "loop[{wire}]({body})"),
            ExprKind::Repar { name, body } => write!(f, "repar[{name}]({body})"),
            ExprKind::Seq(a, b) => {
                if matches!(b.kind, ExprKind::Seq(..)) {
                    write!(f, "{a} ; ({b})")
                } else {
                    write!(f, "{a} ; {b}")
                }
            }
            ExprKind::Par(a, b) => {
                if matches!(a.kind, ExprKind::Seq(..)) {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                if matches!(b.kind, ExprKind::Seq(..) | ExprKind::Par(..)) {
                    write!(f, " | ({b})")
                } else {
                    write!(f, " | {b}")
                }
            }
        }
    }
}

pub fn parse(text: &str) -> Result<Expr, DiagramError> {
    let mut p = Parser {
        src: text,
        pos: 0,
        depth: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error(p.pos, "expected `;`, `|` or end of input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn line_col(&self, pos: usize) -> (usize, usize) {
        let before = &self.src[..pos];
        let line = before.matches('\n').count() + 1;
        let col = before
            .rfind('\n')
            .map_or(before.chars().count(), |nl| before[nl + 1..].chars().count())
            + 1;
        (line, col)
    }

    fn error(&self, pos: usize, message: &str) -> DiagramError {
        let (line, col) = self.line_col(pos);
        DiagramError::Syntax {
            line,
            col,
            message: message.to_string(),
        }
    }

    fn span(&self, start: usize) -> Span {
        let (line, col) = self.line_col(start);
        Span {
            start,
            end: self.pos,
            line,
            col,
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<(), DiagramError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(self.pos, &format!("expected `{c}`")))
        }
    }

    fn name(&mut self) -> Result<(usize, &str), DiagramError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        if start < bytes.len() && (bytes[start].is_ascii_alphabetic() || bytes[start] == b'_') {
            let mut end = start + 1;
            while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                end += 1;
            }
            self.pos = end;
            Ok((start, &self.src[start..end]))
        } else {
            Err(self.error(start, "expected a name"))
        }
    }

    fn expr(&mut self) -> Result<Expr, DiagramError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error(self.pos, "expression nested too deeply"));
        }
        self.skip_ws();
        let start = self.pos;
        let mut lhs = self.term()?;
        while self.peek() == Some(';') {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr {
                kind: ExprKind::Seq(Box::new(lhs), Box::new(rhs)),
                span: self.span(start),
            };
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, DiagramError> {
        self.skip_ws();
        let start = self.pos;
        let mut lhs = self.atom()?;
        while self.peek() == Some('|') {
            self.pos += 1;
            let rhs = self.atom()?;
            lhs = Expr {
                kind: ExprKind::Par(Box::new(lhs), Box::new(rhs)),
                span: self.span(start),
            };
        }
        Ok(lhs)
    }

    fn poset_args(&mut self, count: usize) -> Result<Vec<String>, DiagramError> {
        self.expect('(')?;
        let mut out = Vec::with_capacity(count);
        for i in 0..count {
            if i > 0 {
                self.expect(',')?;
            }
            out.push(self.name()?.1.to_string());
        }
        self.expect(')')?;
        Ok(out)
    }

    fn bracketed_body(&mut self) -> Result<(String, Expr), DiagramError> {
        self.expect('[')?;
        let label = self.name()?.1.to_string();
        self.expect(']')?;
        self.expect('(')?;
        let body = self.expr()?;
        self.expect(')')?;
        Ok((label, body))
    }

    fn atom(&mut self) -> Result<Expr, DiagramError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let (start, name) = self.name()?;
                let name = name.to_string();
                let kind = match name.as_str() {
                    "id" => ExprKind::Id(self.poset_args(1)?.remove(0)),
                    "cap" => ExprKind::Cap(self.poset_args(1)?.remove(0)),
                    "cup" => ExprKind::Cup(self.poset_args(1)?.remove(0)),
                    "sym" => {
                        let mut args = self.poset_args(2)?;
                        let q = args.pop().expect("two args");
                        ExprKind::Sym(args.pop().expect("two args"), q)
                    }
                    "loop" => {
                        let (wire, body) = self.bracketed_body()?;
                        ExprKind::Loop {
                            wire,
                            body: Box::new(body),
                        }
                    }
                    "repar" => {
                        let (name, body) = self.bracketed_body()?;
                        ExprKind::Repar {
                            name,
                            body: Box::new(body),
                        }
                    }
                    _ => ExprKind::Ref(name),
                };
                Ok(Expr {
                    kind,
                    span: self.span(start),
                })
            }
            Some(_) => Err(self.error(self.pos, "expected a cell name, a constructor or `(`")),
            None => Err(self.error(self.pos, "unexpected end of input")),
        }
    }
}

/// Names a diagram may refer to.
#[derive(Clone, Debug)]
pub struct Bindings {
    pub kind: MonadKind,
    pub cells: BTreeMap<String, ParamCell>,
    pub repars: BTreeMap<String, Repar>,
    pub posets: BTreeMap<String, FinPoset>,
}

impl Bindings {
    pub fn new(kind: MonadKind) -> Bindings {
        Bindings {
            kind,
            cells: BTreeMap::new(),
            repars: BTreeMap::new(),
            posets: BTreeMap::new(),
        }
    }

    fn poset(&self, name: &str, span: Span) -> Result<&FinPoset, DiagramError> {
        self.posets.get(name).ok_or_else(|| DiagramError::UnknownName {
            namespace: "poset",
            name: name.to_string(),
            span,
        })
    }

    fn cell(&self, name: &str, span: Span) -> Result<&ParamCell, DiagramError> {
        let cell = self.cells.get(name).ok_or_else(|| DiagramError::UnknownName {
            namespace: "cell",
            name: name.to_string(),
            span,
        })?;
        if cell.kind() != self.kind {
            return Err(DiagramError::KindMismatch {
                span,
                name: name.to_string(),
                expected: self.kind,
                found: cell.kind(),
            });
        }
        Ok(cell)
    }

    fn repar(&self, name: &str, span: Span) -> Result<&Repar, DiagramError> {
        let repar = self.repars.get(name).ok_or_else(|| DiagramError::UnknownName {
            namespace: "reparametrization",
            name: name.to_string(),
            span,
        })?;
        if repar.kind() != self.kind {
            return Err(DiagramError::KindMismatch {
                span,
                name: name.to_string(),
                expected: self.kind,
                found: repar.kind(),
            });
        }
        Ok(repar)
    }
}

/// The type of a diagram: parameter space and interfaces.
#[derive(Clone, Debug, PartialEq)]
pub struct Interface {
    pub params: ParamSpace,
    pub src: FinPoset,
    pub tgt: FinPoset,
}

impl fmt::Display for Interface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {} -> {}", self.params, self.src, self.tgt)
    }
}

fn mismatch(span: Span, context: &'static str, left: &FinPoset, right: &FinPoset) -> DiagramError {
    DiagramError::TypeMismatch {
        span,
        context,
        left: left.to_string(),
        right: right.to_string(),
    }
}

/// Splits `p = a ⊗ w` with `w` a trailing block of factors.
fn strip_suffix(p: &FinPoset, w: &FinPoset) -> Option<FinPoset> {
    let (n, k) = (p.factors().len(), w.factors().len());
    if k > n || p.factors()[n - k..] != *w.factors() {
        return None;
    }
    Some(p.slice(0..n - k))
}

/// The composite `(id_A ⊗ cap_W) ; (id_A ⊗ sym(W^op, W)) ; (body ⊗ id_{W^op}) ; (id_B ⊗ cup_W)`
/// that feeds the trailing `W` output of a body `A ⊗ W → B ⊗ W` back into its input.
fn trace_pieces(a: &FinPoset, b: &FinPoset, w: &FinPoset) -> (DesignProblem, DesignProblem) {
    let w_op = w.opposite();
    let before = DesignProblem::identity(a)
        .tensor(&DesignProblem::cap(w))
        .compose(&DesignProblem::identity(a).tensor(&DesignProblem::symmetry(&w_op, w)))
        .expect("interfaces line up by construction");
    let after = DesignProblem::identity(b).tensor(&DesignProblem::cup(w));
    (before, after)
}

pub fn typecheck(expr: &Expr, bindings: &Bindings) -> Result<Interface, DiagramError> {
    let span = expr.span;
    let unit = FinPoset::unit;
    Ok(match &expr.kind {
        ExprKind::Ref(name) => {
            let cell = bindings.cell(name, span)?;
            Interface {
                params: cell.dom().clone(),
                src: cell.src().clone(),
                tgt: cell.tgt().clone(),
            }
        }
        ExprKind::Id(p) => {
            let p = bindings.poset(p, span)?;
            Interface {
                params: ParamSpace::unit(),
                src: p.clone(),
                tgt: p.clone(),
            }
        }
        ExprKind::Sym(p, q) => {
            let (p, q) = (bindings.poset(p, span)?, bindings.poset(q, span)?);
            Interface {
                params: ParamSpace::unit(),
                src: p.product(q),
                tgt: q.product(p),
            }
        }
        ExprKind::Cap(p) => {
            let p = bindings.poset(p, span)?;
            Interface {
                params: ParamSpace::unit(),
                src: unit(),
                tgt: p.opposite().product(p),
            }
        }
        ExprKind::Cup(p) => {
            let p = bindings.poset(p, span)?;
            Interface {
                params: ParamSpace::unit(),
                src: p.product(&p.opposite()),
                tgt: unit(),
            }
        }
        ExprKind::Seq(a, b) => {
            let (ta, tb) = (typecheck(a, bindings)?, typecheck(b, bindings)?);
            if ta.tgt != tb.src {
                return Err(mismatch(span, "series composition", &ta.tgt, &tb.src));
            }
            Interface {
                params: ta.params.tensor(&tb.params),
                src: ta.src,
                tgt: tb.tgt,
            }
        }
        ExprKind::Par(a, b) => {
            let (ta, tb) = (typecheck(a, bindings)?, typecheck(b, bindings)?);
            Interface {
                params: ta.params.tensor(&tb.params),
                src: ta.src.product(&tb.src),
                tgt: ta.tgt.product(&tb.tgt),
            }
        }
        ExprKind::Loop { wire, body } => {
            let w = bindings.poset(wire, span)?;
            let t = typecheck(body, bindings)?;
            let src = strip_suffix(&t.src, w).ok_or_else(|| mismatch(span, "loop input", &t.src, w))?;
            let tgt = strip_suffix(&t.tgt, w).ok_or_else(|| mismatch(span, "loop output", &t.tgt, w))?;
            Interface {
                params: t.params,
                src,
                tgt,
            }
        }
        ExprKind::Repar { name, body } => {
            let phi = bindings.repar(name, span)?;
            let t = typecheck(body, bindings)?;
            if phi.cod() != &t.params {
                return Err(DiagramError::TypeMismatch {
                    span,
                    context: "reparametrization",
                    left: phi.cod().to_string(),
                    right: t.params.to_string(),
                });
            }
            Interface {
                params: phi.dom().clone(),
                ..t
            }
        }
    })
}

/// Evaluates a diagram to a single parametrized cell.
pub fn eval(expr: &Expr, bindings: &Bindings) -> Result<ParamCell, DiagramError> {
    // Typecheck first so mismatches are reported before any table is built.
    typecheck(expr, bindings)?;
    eval_checked(expr, bindings)
}

fn eval_checked(expr: &Expr, bindings: &Bindings) -> Result<ParamCell, DiagramError> {
    let span = expr.span;
    let kind = bindings.kind;
    let para = |source: ParaError| DiagramError::Para {
        span,
        source: Box::new(source),
    };
    let poset = |name: &str| bindings.poset(name, span);
    Ok(match &expr.kind {
        ExprKind::Ref(name) => bindings.cell(name, span)?.clone(),
        ExprKind::Id(p) => ParamCell::identity(kind, poset(p)?),
        ExprKind::Sym(p, q) => ParamCell::include(kind, DesignProblem::symmetry(poset(p)?, poset(q)?)),
        ExprKind::Cap(p) => ParamCell::include(kind, DesignProblem::cap(poset(p)?)),
        ExprKind::Cup(p) => ParamCell::include(kind, DesignProblem::cup(poset(p)?)),
        ExprKind::Seq(a, b) => eval_checked(a, bindings)?
            .hcompose(&eval_checked(b, bindings)?)
            .map_err(para)?,
        ExprKind::Par(a, b) => eval_checked(a, bindings)?
            .tensor(&eval_checked(b, bindings)?)
            .map_err(para)?,
        ExprKind::Loop { wire, body } => {
            let w = poset(wire)?;
            let inner = eval_checked(body, bindings)?;
            let a = strip_suffix(inner.src(), w).expect("typechecked");
            let b = strip_suffix(inner.tgt(), w).expect("typechecked");
            let (before, after) = trace_pieces(&a, &b, w);
            let w_op = ParamCell::identity(kind, &w.opposite());
            ParamCell::include(kind, before)
                .hcompose(&inner.tensor(&w_op).map_err(para)?)
                .and_then(|c| c.hcompose(&ParamCell::include(kind, after)))
                .map_err(para)?
        }
        ExprKind::Repar { name, body } => eval_checked(body, bindings)?
            .reparametrize(bindings.repar(name, span)?)
            .map_err(para)?,
    })
}

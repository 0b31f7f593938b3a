//! Parametrized uncertain design problems: the 2-category whose 1-cells are
//! maps `A → M DP(F, R)` from a finite parameter space and whose 2-cells are
//! Kleisli reparametrizations `φ : A → M B` with `f = φ ⨟ g`.
//!
//! Parameter spaces and interface posets are flat factor lists, so associators
//! and unitors are identities; only the symmetry and the tensorators move
//! parameter factors around.

use std::fmt;

use thiserror::Error;

use crate::dp::{DesignProblem, DpError};
use crate::monad::{KleisliMap, MonadError, MonadKind, Payload, UncertainValue};
use crate::poset::{FinPoset, Label};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParaError {
    #[error(transparent)]
    Monad(#[from] MonadError),
    #[error(transparent)]
    Dp(#[from] DpError),
    #[error("monad kind mismatch: {0} vs {1}")]
    KindMismatch(MonadKind, MonadKind),
    #[error("interface mismatch: {left} vs {right}")]
    InterfaceMismatch { left: String, right: String },
    #[error("parameter space mismatch: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },
    #[error("parameter factor `{0}` has no points")]
    DegenerateFactor(String),
    #[error("duplicate label `{label}` in parameter factor `{factor}`")]
    DuplicateLabel { factor: String, label: String },
    #[error("table has {got} entries for {expected} parameter points")]
    TableSize { expected: usize, got: usize },
    #[error("reparametrization sends point {point} outside the codomain")]
    OutOfRange { point: String },
    #[error("assignment is not monotone between points {lower} and {upper}")]
    NotMonotone { lower: String, upper: String },
    #[error("interval at point {0} has lower end above upper end")]
    NotAnInterval(String),
    #[error("no parameter factor {0}")]
    UnknownFactor(String),
    #[error("prior has {got} weights for a factor with {expected} labels")]
    PriorSize { expected: usize, got: usize },
}

/// One finite parameter set, optionally ordered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamFactor {
    name: String,
    labels: Vec<Label>,
    order: Option<FinPoset>,
}

impl ParamFactor {
    pub fn new(name: impl Into<String>, labels: Vec<Label>) -> Result<ParamFactor, ParaError> {
        let name = name.into();
        if labels.is_empty() {
            return Err(ParaError::DegenerateFactor(name));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(ParaError::DuplicateLabel {
                    factor: name,
                    label: l.to_string(),
                });
            }
        }
        Ok(ParamFactor {
            name,
            labels,
            order: None,
        })
    }

    /// A factor whose points are the elements of `poset`, with its order.
    pub fn ordered(name: impl Into<String>, poset: &FinPoset) -> Result<ParamFactor, ParaError> {
        let labels = (0..poset.len())
            .map(|i| match poset.labels_of(i).as_slice() {
                [single] => (*single).clone(),
                _ => Label::Name(poset.element_name(i)),
            })
            .collect();
        let mut factor = ParamFactor::new(name, labels)?;
        factor.order = Some(poset.clone());
        Ok(factor)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn order(&self) -> Option<&FinPoset> {
        self.order.as_ref()
    }

    /// Unordered factors compare by equality.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        match &self.order {
            Some(p) => p.leq(i, j),
            None => i == j,
        }
    }

    pub fn position(&self, label: &Label) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// A flat list of parameter factors; the empty list is the one-point unit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParamSpace {
    factors: Vec<ParamFactor>,
}

impl ParamSpace {
    pub fn unit() -> ParamSpace {
        ParamSpace::default()
    }

    pub fn new(factors: Vec<ParamFactor>) -> ParamSpace {
        ParamSpace { factors }
    }

    pub fn single(factor: ParamFactor) -> ParamSpace {
        ParamSpace { factors: vec![factor] }
    }

    pub fn factors(&self) -> &[ParamFactor] {
        &self.factors
    }

    /// Concatenation of factor lists.
    pub fn tensor(&self, other: &ParamSpace) -> ParamSpace {
        ParamSpace {
            factors: self.factors.iter().chain(&other.factors).cloned().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.factors.iter().map(ParamFactor::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_ordered(&self) -> bool {
        self.factors.iter().any(|f| f.order.is_some())
    }

    pub fn coords(&self, mut index: usize) -> Vec<usize> {
        let mut coords = vec![0; self.factors.len()];
        for (k, f) in self.factors.iter().enumerate().rev() {
            coords[k] = index % f.len();
            index /= f.len();
        }
        coords
    }

    pub fn index(&self, coords: &[usize]) -> Option<usize> {
        if coords.len() != self.factors.len() {
            return None;
        }
        let mut index = 0;
        for (c, f) in coords.iter().zip(&self.factors) {
            if *c >= f.len() {
                return None;
            }
            index = index * f.len() + c;
        }
        Some(index)
    }

    /// Point index from one label per factor.
    pub fn index_of_labels(&self, labels: &[Label]) -> Option<usize> {
        if labels.len() != self.factors.len() {
            return None;
        }
        let coords = labels
            .iter()
            .zip(&self.factors)
            .map(|(l, f)| f.position(l))
            .collect::<Option<Vec<_>>>()?;
        self.index(&coords)
    }

    pub fn point_labels(&self, index: usize) -> Vec<&Label> {
        self.coords(index)
            .into_iter()
            .zip(&self.factors)
            .map(|(c, f)| &f.labels[c])
            .collect()
    }

    /// `"a,t1"`; the unit point is `"()"`.
    pub fn point_name(&self, index: usize) -> String {
        if self.is_unit() {
            return "()".to_string();
        }
        self.point_labels(index)
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Product order; unordered factors are discrete.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.coords(i)
            .into_iter()
            .zip(self.coords(j))
            .zip(&self.factors)
            .all(|((a, b), f)| f.leq(a, b))
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.name == name)
    }

    pub fn without(&self, k: usize) -> ParamSpace {
        let mut factors = self.factors.clone();
        factors.remove(k);
        ParamSpace { factors }
    }

    /// The space with factor blocks reordered: `blocks` partitions the factor
    /// list into consecutive runs and `order` lists the run indices of the result.
    fn permuted_blocks(&self, blocks: &[usize], order: &[usize]) -> (ParamSpace, Vec<usize>) {
        let mut starts = Vec::with_capacity(blocks.len());
        let mut acc = 0;
        for b in blocks {
            starts.push(acc);
            acc += b;
        }
        let factor_order: Vec<usize> = order.iter().flat_map(|&b| starts[b]..starts[b] + blocks[b]).collect();
        let space = ParamSpace {
            factors: factor_order.iter().map(|&k| self.factors[k].clone()).collect(),
        };
        let images = (0..self.len())
            .map(|i| {
                let coords = self.coords(i);
                let permuted: Vec<usize> = factor_order.iter().map(|&k| coords[k]).collect();
                space.index(&permuted).expect("permuted coordinates are in range")
            })
            .collect();
        (space, images)
    }

    fn check_points(&self) -> Result<(), ParaError> {
        match self.factors.iter().find(|f| f.is_empty()) {
            Some(f) => Err(ParaError::DegenerateFactor(f.name.clone())),
            None => Ok(()),
        }
    }
}

impl fmt::Display for ParamSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return f.write_str("I");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|x| format!("{}[{}]", x.name, x.len()))
            .collect();
        f.write_str(&parts.join(" x "))
    }
}

fn dp_leq(a: &DesignProblem, b: &DesignProblem) -> bool {
    a.leq(b).unwrap_or(false)
}

/// Order on uncertain problems used for the monotone variant: pointwise for
/// identity, endpoint-wise for intervals.
fn uncertain_leq(a: &UncertainValue<DesignProblem>, b: &UncertainValue<DesignProblem>) -> bool {
    match (a.payload(), b.payload()) {
        (Payload::Single(x), Payload::Single(y)) => dp_leq(x, y),
        (Payload::Interval { lo: a, hi: b }, Payload::Interval { lo: c, hi: d }) => dp_leq(a, c) && dp_leq(b, d),
        _ => true,
    }
}

/// A 1-cell `dom → M DP(src, tgt)`, tabulated over the parameter points.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamCell {
    kind: MonadKind,
    dom: ParamSpace,
    src: FinPoset,
    tgt: FinPoset,
    table: Vec<UncertainValue<DesignProblem>>,
}

impl ParamCell {
    /// Validates kinds, interfaces, interval ordering and, for ordered
    /// parameter spaces of identity or interval kind, monotonicity.
    pub fn new(
        kind: MonadKind,
        dom: ParamSpace,
        src: FinPoset,
        tgt: FinPoset,
        table: Vec<UncertainValue<DesignProblem>>,
    ) -> Result<ParamCell, ParaError> {
        dom.check_points()?;
        if table.len() != dom.len() {
            return Err(ParaError::TableSize {
                expected: dom.len(),
                got: table.len(),
            });
        }
        for (i, value) in table.iter().enumerate() {
            value.check_kind(kind)?;
            for dp in value.support() {
                if dp.fun() != &src || dp.res() != &tgt {
                    return Err(ParaError::InterfaceMismatch {
                        left: format!("{src} -> {tgt}"),
                        right: format!("{} -> {} at point {}", dp.fun(), dp.res(), dom.point_name(i)),
                    });
                }
            }
            if !value.is_ordered(dp_leq) {
                return Err(ParaError::NotAnInterval(dom.point_name(i)));
            }
        }
        let cell = ParamCell {
            kind,
            dom,
            src,
            tgt,
            table,
        };
        if matches!(kind, MonadKind::Identity | MonadKind::Interval) && cell.dom.is_ordered() {
            cell.check_monotone()?;
        }
        Ok(cell)
    }

    pub fn from_fn(
        kind: MonadKind,
        dom: ParamSpace,
        src: FinPoset,
        tgt: FinPoset,
        mut value: impl FnMut(usize) -> Result<UncertainValue<DesignProblem>, ParaError>,
    ) -> Result<ParamCell, ParaError> {
        dom.check_points()?;
        let table = (0..dom.len()).map(&mut value).collect::<Result<_, _>>()?;
        ParamCell::new(kind, dom, src, tgt, table)
    }

    /// `ι`: the unit parameter space carrying `η(Φ)`.
    pub fn include(kind: MonadKind, dp: DesignProblem) -> ParamCell {
        ParamCell {
            kind,
            dom: ParamSpace::unit(),
            src: dp.fun().clone(),
            tgt: dp.res().clone(),
            table: vec![UncertainValue::unit(kind, dp)],
        }
    }

    pub fn identity(kind: MonadKind, p: &FinPoset) -> ParamCell {
        ParamCell::include(kind, DesignProblem::identity(p))
    }

    pub fn kind(&self) -> MonadKind {
        self.kind
    }

    pub fn dom(&self) -> &ParamSpace {
        &self.dom
    }

    pub fn src(&self) -> &FinPoset {
        &self.src
    }

    pub fn tgt(&self) -> &FinPoset {
        &self.tgt
    }

    pub fn table(&self) -> &[UncertainValue<DesignProblem>] {
        &self.table
    }

    pub fn at(&self, point: usize) -> &UncertainValue<DesignProblem> {
        &self.table[point]
    }

    fn check_kind(&self, other: MonadKind) -> Result<(), ParaError> {
        if self.kind != other {
            return Err(ParaError::KindMismatch(self.kind, other));
        }
        Ok(())
    }

    /// True iff ordered parameters map monotonically (identity/interval kinds).
    pub fn is_monotone(&self) -> bool {
        self.check_monotone().is_ok()
    }

    fn check_monotone(&self) -> Result<(), ParaError> {
        let n = self.dom.len();
        for i in 0..n {
            for j in 0..n {
                if i != j && self.dom.leq(i, j) && !uncertain_leq(&self.table[i], &self.table[j]) {
                    return Err(ParaError::NotMonotone {
                        lower: self.dom.point_name(i),
                        upper: self.dom.point_name(j),
                    });
                }
            }
        }
        Ok(())
    }

    /// Horizontal composition `(f ⊗ g) ⨟ ∇ ⨟ M(⨟)` on `dom(f) ⊗ dom(g)`.
    pub fn hcompose(&self, next: &ParamCell) -> Result<ParamCell, ParaError> {
        self.check_kind(next.kind)?;
        if self.tgt != next.src {
            return Err(ParaError::InterfaceMismatch {
                left: self.tgt.to_string(),
                right: next.src.to_string(),
            });
        }
        let mut table = Vec::with_capacity(self.table.len() * next.table.len());
        for a in &self.table {
            for b in &next.table {
                table.push(a.zip_with(b, |x, y| x.compose(y).map_err(ParaError::from))?);
            }
        }
        Ok(ParamCell {
            kind: self.kind,
            dom: self.dom.tensor(&next.dom),
            src: self.src.clone(),
            tgt: next.tgt.clone(),
            table,
        })
    }

    /// Monoidal product `(f ⊗ g) ⨟ ∇ ⨟ M(⊗)`.
    pub fn tensor(&self, other: &ParamCell) -> Result<ParamCell, ParaError> {
        self.check_kind(other.kind)?;
        let mut table = Vec::with_capacity(self.table.len() * other.table.len());
        for a in &self.table {
            for b in &other.table {
                table.push(a.zip_with(b, |x, y| Ok::<_, ParaError>(x.tensor(y)))?);
            }
        }
        Ok(ParamCell {
            kind: self.kind,
            dom: self.dom.tensor(&other.dom),
            src: self.src.product(&other.src),
            tgt: self.tgt.product(&other.tgt),
            table,
        })
    }

    /// Precomposition with a reparametrization: the cell `φ ⨟ self` on `dom(φ)`.
    pub fn reparametrize(&self, phi: &Repar) -> Result<ParamCell, ParaError> {
        self.check_kind(phi.kind)?;
        if phi.cod != self.dom {
            return Err(ParaError::SpaceMismatch {
                left: phi.cod.to_string(),
                right: self.dom.to_string(),
            });
        }
        let table = phi
            .map
            .values()
            .iter()
            .map(|m| m.bind(|&b| Ok::<_, ParaError>(self.table[b].clone())))
            .collect::<Result<_, _>>()?;
        Ok(ParamCell {
            kind: self.kind,
            dom: phi.dom.clone(),
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            table,
        })
    }

    /// Restricts parameter factor `factor` to its `label`-th point.
    pub fn fix_factor(&self, factor: usize, label: usize) -> Result<ParamCell, ParaError> {
        let f = self
            .dom
            .factors
            .get(factor)
            .ok_or_else(|| ParaError::UnknownFactor(factor.to_string()))?;
        if label >= f.len() {
            return Err(ParaError::UnknownFactor(format!("{}[{label}]", f.name)));
        }
        let dom = self.dom.without(factor);
        let table = (0..dom.len())
            .map(|i| {
                let mut coords = dom.coords(i);
                coords.insert(factor, label);
                self.table[self.dom.index(&coords).expect("in range")].clone()
            })
            .collect();
        Ok(ParamCell {
            kind: self.kind,
            dom,
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            table,
        })
    }

    /// Mixes out parameter factor `factor` under `prior` (distribution kind).
    pub fn marginalize(&self, factor: usize, prior: &[f64]) -> Result<ParamCell, ParaError> {
        self.check_kind(MonadKind::Distribution)?;
        let f = self
            .dom
            .factors
            .get(factor)
            .ok_or_else(|| ParaError::UnknownFactor(factor.to_string()))?;
        if prior.len() != f.len() {
            return Err(ParaError::PriorSize {
                expected: f.len(),
                got: prior.len(),
            });
        }
        let prior = UncertainValue::distribution(prior.iter().copied().enumerate())?;
        let dom = self.dom.without(factor);
        let table = (0..dom.len())
            .map(|i| {
                let coords = dom.coords(i);
                prior.bind(|&d| {
                    let mut full = coords.clone();
                    full.insert(factor, d);
                    Ok::<_, ParaError>(self.table[self.dom.index(&full).expect("in range")].clone())
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(ParamCell {
            kind: self.kind,
            dom,
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            table,
        })
    }

    /// Pointwise equality up to `tol` (total variation for distributions).
    pub fn values_equal(&self, other: &ParamCell, tol: f64) -> Result<bool, ParaError> {
        self.check_kind(other.kind)?;
        if self.dom != other.dom || self.src != other.src || self.tgt != other.tgt {
            return Ok(false);
        }
        for (a, b) in self.table.iter().zip(&other.table) {
            if !a.values_equal(b, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Structural isomorphisms lifted from design problems.
#[derive(Clone, Debug)]
pub enum Coherence {
    Assoc(FinPoset, FinPoset, FinPoset),
    LeftUnit(FinPoset),
    RightUnit(FinPoset),
    Sym(FinPoset, FinPoset),
}

/// Coherence 1-cell of the given kind. Associators and unitors are identities
/// on the flattened interfaces.
pub fn coherence_cell(kind: MonadKind, which: &Coherence) -> ParamCell {
    let dp = match which {
        Coherence::Assoc(p, q, r) => DesignProblem::identity(&p.product(q).product(r)),
        Coherence::LeftUnit(p) => DesignProblem::identity(&FinPoset::unit().product(p)),
        Coherence::RightUnit(p) => DesignProblem::identity(&p.product(&FinPoset::unit())),
        Coherence::Sym(p, q) => DesignProblem::symmetry(p, q),
    };
    ParamCell::include(kind, dp)
}

/// A 2-cell candidate: a Kleisli map from `dom` points to `M(cod points)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Repar {
    kind: MonadKind,
    dom: ParamSpace,
    cod: ParamSpace,
    map: KleisliMap<usize>,
}

impl Repar {
    pub fn new(
        kind: MonadKind,
        dom: ParamSpace,
        cod: ParamSpace,
        values: Vec<UncertainValue<usize>>,
    ) -> Result<Repar, ParaError> {
        dom.check_points()?;
        cod.check_points()?;
        if values.len() != dom.len() {
            return Err(ParaError::TableSize {
                expected: dom.len(),
                got: values.len(),
            });
        }
        for (i, v) in values.iter().enumerate() {
            if v.support().into_iter().any(|&b| b >= cod.len()) {
                return Err(ParaError::OutOfRange {
                    point: dom.point_name(i),
                });
            }
        }
        Ok(Repar {
            kind,
            map: KleisliMap::new(kind, values)?,
            dom,
            cod,
        })
    }

    /// Deterministic reparametrization along a plain map of points.
    pub fn lift(kind: MonadKind, dom: ParamSpace, cod: ParamSpace, images: Vec<usize>) -> Result<Repar, ParaError> {
        let values = images.into_iter().map(|b| UncertainValue::unit(kind, b)).collect();
        Repar::new(kind, dom, cod, values)
    }

    pub fn identity(kind: MonadKind, space: &ParamSpace) -> Repar {
        Repar {
            kind,
            dom: space.clone(),
            cod: space.clone(),
            map: KleisliMap::identity(kind, space.len()),
        }
    }

    /// `U ⊗ V → V ⊗ U`.
    pub fn swap(kind: MonadKind, u: &ParamSpace, v: &ParamSpace) -> Repar {
        let dom = u.tensor(v);
        let (cod, images) = dom.permuted_blocks(&[u.factors.len(), v.factors.len()], &[1, 0]);
        Repar {
            kind,
            map: KleisliMap::lift(kind, images),
            dom,
            cod,
        }
    }

    pub fn kind(&self) -> MonadKind {
        self.kind
    }

    pub fn dom(&self) -> &ParamSpace {
        &self.dom
    }

    pub fn cod(&self) -> &ParamSpace {
        &self.cod
    }

    pub fn map(&self) -> &KleisliMap<usize> {
        &self.map
    }

    pub fn at(&self, point: usize) -> &UncertainValue<usize> {
        &self.map.values()[point]
    }

    /// Vertical composition: Kleisli composition `self ⨟ next`.
    pub fn vcompose(&self, next: &Repar) -> Result<Repar, ParaError> {
        if self.kind != next.kind {
            return Err(ParaError::KindMismatch(self.kind, next.kind));
        }
        if self.cod != next.dom {
            return Err(ParaError::SpaceMismatch {
                left: self.cod.to_string(),
                right: next.dom.to_string(),
            });
        }
        Ok(Repar {
            kind: self.kind,
            dom: self.dom.clone(),
            cod: next.cod.clone(),
            map: self.map.then(&next.map)?,
        })
    }

    /// Horizontal (and monoidal) composite `self ⊗ other` via the strength.
    pub fn tensor(&self, other: &Repar) -> Result<Repar, ParaError> {
        if self.kind != other.kind {
            return Err(ParaError::KindMismatch(self.kind, other.kind));
        }
        Ok(Repar {
            kind: self.kind,
            dom: self.dom.tensor(&other.dom),
            cod: self.cod.tensor(&other.cod),
            map: self.map.tensor(&other.map, other.cod.len())?,
        })
    }

    /// True iff the map is a deterministic bijection of points.
    pub fn is_invertible(&self) -> bool {
        if self.dom.len() != self.cod.len() {
            return false;
        }
        let mut seen = vec![false; self.cod.len()];
        for v in self.map.values() {
            if v.support_size() != 1 {
                return false;
            }
            let b = *v.support()[0];
            if seen[b] {
                return false;
            }
            seen[b] = true;
        }
        true
    }
}

/// Outcome of checking `f = φ ⨟ g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwoCellCheck {
    Holds,
    /// The first parameter point where the two sides differ.
    FailsAt(String),
}

impl TwoCellCheck {
    pub fn holds(&self) -> bool {
        matches!(self, TwoCellCheck::Holds)
    }
}

/// Checks that `phi` is a 2-cell `f ⇒ g`, i.e. `f(a) = bind(φ(a), g)` for every point `a`.
pub fn check_2cell(phi: &Repar, f: &ParamCell, g: &ParamCell, tol: f64) -> Result<TwoCellCheck, ParaError> {
    if phi.kind != f.kind || phi.kind != g.kind {
        return Err(ParaError::KindMismatch(
            phi.kind,
            if phi.kind != f.kind { f.kind } else { g.kind },
        ));
    }
    if phi.dom != f.dom {
        return Err(ParaError::SpaceMismatch {
            left: phi.dom.to_string(),
            right: f.dom.to_string(),
        });
    }
    if phi.cod != g.dom {
        return Err(ParaError::SpaceMismatch {
            left: phi.cod.to_string(),
            right: g.dom.to_string(),
        });
    }
    if f.src != g.src || f.tgt != g.tgt {
        return Err(ParaError::InterfaceMismatch {
            left: format!("{} -> {}", f.src, f.tgt),
            right: format!("{} -> {}", g.src, g.tgt),
        });
    }
    let rhs = g.reparametrize(phi)?;
    for a in 0..f.dom.len() {
        if !f.table[a].values_equal(&rhs.table[a], tol)? {
            return Ok(TwoCellCheck::FailsAt(f.dom.point_name(a)));
        }
    }
    Ok(TwoCellCheck::Holds)
}

/// The invertible 2-cell `(f1 ⊗ f2) ⨟ (g1 ⊗ g2) ⇒ (f1 ⨟ g1) ⊗ (f2 ⨟ g2)`,
/// which rearranges `U1 ⊗ U2 ⊗ V1 ⊗ V2` into `U1 ⊗ V1 ⊗ U2 ⊗ V2`.
pub fn tensorator(f1: &ParamCell, f2: &ParamCell, g1: &ParamCell, g2: &ParamCell) -> Result<Repar, ParaError> {
    let kind = f1.kind;
    for c in [f2, g1, g2] {
        if c.kind != kind {
            return Err(ParaError::KindMismatch(kind, c.kind));
        }
    }
    for (f, g) in [(f1, g1), (f2, g2)] {
        if f.tgt != g.src {
            return Err(ParaError::InterfaceMismatch {
                left: f.tgt.to_string(),
                right: g.src.to_string(),
            });
        }
    }
    let dom = f1.dom.tensor(&f2.dom).tensor(&g1.dom).tensor(&g2.dom);
    let blocks = [
        f1.dom.factors.len(),
        f2.dom.factors.len(),
        g1.dom.factors.len(),
        g2.dom.factors.len(),
    ];
    let (cod, images) = dom.permuted_blocks(&blocks, &[0, 2, 1, 3]);
    Ok(Repar {
        kind,
        map: KleisliMap::lift(kind, images),
        dom,
        cod,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_dp, seeded};

    fn c(n: i64) -> FinPoset {
        FinPoset::chain((0..n).map(Label::from).collect()).unwrap()
    }

    fn factor(name: &str, n: usize) -> ParamFactor {
        ParamFactor::new(name, (0..n).map(|i| Label::Name(format!("{name}{i}"))).collect()).unwrap()
    }

    #[test]
    fn include_identity_is_unit() {
        let mut rng = seeded(1);
        let p = c(3);
        let phi = random_dp(&p, &c(2), 0.3, &mut rng);
        for kind in MonadKind::ALL {
            let f = ParamCell::include(kind, phi.clone());
            let id = ParamCell::identity(kind, &p);
            assert_eq!(id.hcompose(&f).unwrap(), f);
            assert_eq!(f.hcompose(&ParamCell::identity(kind, &c(2))).unwrap(), f);
        }
    }

    #[test]
    fn include_preserves_composition() {
        let mut rng = seeded(2);
        let phi = random_dp(&c(3), &c(2), 0.3, &mut rng);
        let psi = random_dp(&c(2), &c(4), 0.3, &mut rng);
        for kind in MonadKind::ALL {
            let lhs = ParamCell::include(kind, phi.clone())
                .hcompose(&ParamCell::include(kind, psi.clone()))
                .unwrap();
            assert_eq!(lhs, ParamCell::include(kind, phi.compose(&psi).unwrap()));
            let t = ParamCell::include(kind, phi.clone())
                .tensor(&ParamCell::include(kind, psi.clone()))
                .unwrap();
            assert_eq!(t, ParamCell::include(kind, phi.tensor(&psi)));
        }
    }

    #[test]
    fn powerset_composite_is_set_of_composites() {
        let mut rng = seeded(3);
        let (p, q, r) = (c(2), c(3), c(2));
        let phi1 = random_dp(&p, &q, 0.3, &mut rng);
        let phi2 = random_dp(&p, &q, 0.3, &mut rng);
        let psi = random_dp(&q, &r, 0.3, &mut rng);
        let f = ParamCell::new(
            MonadKind::Powerset,
            ParamSpace::single(factor("a", 1)),
            p.clone(),
            q.clone(),
            vec![UncertainValue::set(vec![phi1.clone(), phi2.clone()]).unwrap()],
        )
        .unwrap();
        let g = ParamCell::new(
            MonadKind::Powerset,
            ParamSpace::single(factor("b", 1)),
            q.clone(),
            r.clone(),
            vec![UncertainValue::set(vec![psi.clone()]).unwrap()],
        )
        .unwrap();
        let fg = f.hcompose(&g).unwrap();
        let expected = UncertainValue::set(vec![phi1.compose(&psi).unwrap(), phi2.compose(&psi).unwrap()]).unwrap();
        assert_eq!(fg.at(0), &expected);
        assert_eq!(fg.dom().factors().len(), 2);
    }

    #[test]
    fn distribution_composite_is_mixture() {
        let mut rng = seeded(4);
        let (p, q) = (c(2), c(2));
        let phi = random_dp(&p, &q, 0.3, &mut rng);
        let phi2 = DesignProblem::top(p.clone(), q.clone());
        let psi = DesignProblem::identity(&q);
        let f = ParamCell::new(
            MonadKind::Distribution,
            ParamSpace::unit(),
            p.clone(),
            q.clone(),
            vec![UncertainValue::distribution(vec![(phi.clone(), 0.5), (phi2.clone(), 0.5)]).unwrap()],
        )
        .unwrap();
        let g = ParamCell::include(MonadKind::Distribution, psi.clone());
        let fg = f.hcompose(&g).unwrap();
        let expected = UncertainValue::distribution(vec![
            (phi.compose(&psi).unwrap(), 0.5),
            (phi2.compose(&psi).unwrap(), 0.5),
        ])
        .unwrap();
        assert!(fg.at(0).values_equal(&expected, 1e-12).unwrap());
    }

    #[test]
    fn interval_tensor_pairs_endpoints() {
        let mut rng = seeded(5);
        let p = c(2);
        let lo1 = random_dp(&p, &p, 0.2, &mut rng);
        let hi1 = DesignProblem::top(p.clone(), p.clone());
        let lo2 = DesignProblem::bottom(p.clone(), p.clone());
        let hi2 = DesignProblem::identity(&p);
        let leq = |a: &DesignProblem, b: &DesignProblem| a.leq(b).unwrap();
        let f = ParamCell::new(
            MonadKind::Interval,
            ParamSpace::unit(),
            p.clone(),
            p.clone(),
            vec![UncertainValue::interval(lo1.clone(), hi1.clone(), leq).unwrap()],
        )
        .unwrap();
        let g = ParamCell::new(
            MonadKind::Interval,
            ParamSpace::unit(),
            p.clone(),
            p.clone(),
            vec![UncertainValue::interval(lo2.clone(), hi2.clone(), leq).unwrap()],
        )
        .unwrap();
        let t = f.tensor(&g).unwrap();
        assert_eq!(
            t.at(0).payload(),
            &Payload::Interval {
                lo: lo1.tensor(&lo2),
                hi: hi1.tensor(&hi2)
            }
        );
    }

    #[test]
    fn construction_errors() {
        let p = c(2);
        assert!(matches!(
            ParamFactor::new("empty", vec![]),
            Err(ParaError::DegenerateFactor(_))
        ));
        let bad_interval = ParamCell::new(
            MonadKind::Interval,
            ParamSpace::unit(),
            p.clone(),
            p.clone(),
            vec![UncertainValue::interval_unchecked(
                DesignProblem::top(p.clone(), p.clone()),
                DesignProblem::bottom(p.clone(), p.clone()),
            )],
        );
        assert!(matches!(bad_interval, Err(ParaError::NotAnInterval(_))));
        let wrong_iface = ParamCell::new(
            MonadKind::Identity,
            ParamSpace::unit(),
            p.clone(),
            c(3),
            vec![UncertainValue::single(DesignProblem::identity(&p))],
        );
        assert!(matches!(wrong_iface, Err(ParaError::InterfaceMismatch { .. })));
        let short = ParamCell::new(
            MonadKind::Identity,
            ParamSpace::single(factor("a", 2)),
            p.clone(),
            p.clone(),
            vec![UncertainValue::single(DesignProblem::identity(&p))],
        );
        assert!(matches!(short, Err(ParaError::TableSize { .. })));
        let mixed = ParamCell::include(MonadKind::Powerset, DesignProblem::identity(&p))
            .hcompose(&ParamCell::include(MonadKind::Interval, DesignProblem::identity(&p)));
        assert!(matches!(mixed, Err(ParaError::KindMismatch(..))));
    }

    #[test]
    fn monotone_variant_is_enforced() {
        let p = c(2);
        let theta = ParamFactor::ordered("theta", &c(2)).unwrap();
        let dom = ParamSpace::single(theta);
        let lo = DesignProblem::bottom(p.clone(), p.clone());
        let hi = DesignProblem::identity(&p);
        let ok = ParamCell::new(
            MonadKind::Identity,
            dom.clone(),
            p.clone(),
            p.clone(),
            vec![UncertainValue::single(lo.clone()), UncertainValue::single(hi.clone())],
        );
        assert!(ok.is_ok());
        let bad = ParamCell::new(
            MonadKind::Identity,
            dom.clone(),
            p.clone(),
            p.clone(),
            vec![UncertainValue::single(hi), UncertainValue::single(lo)],
        );
        assert!(matches!(bad, Err(ParaError::NotMonotone { .. })));
    }

    #[test]
    fn vertical_composition_of_powerset_repars() {
        let (a, b, cc) = (
            ParamSpace::single(factor("a", 1)),
            ParamSpace::single(factor("b", 2)),
            ParamSpace::single(factor("c", 2)),
        );
        let kind = MonadKind::Powerset;
        let phi = Repar::new(
            kind,
            a.clone(),
            b.clone(),
            vec![UncertainValue::set(vec![0, 1]).unwrap()],
        )
        .unwrap();
        let psi = Repar::new(
            kind,
            b.clone(),
            cc.clone(),
            vec![
                UncertainValue::set(vec![0]).unwrap(),
                UncertainValue::set(vec![0, 1]).unwrap(),
            ],
        )
        .unwrap();
        let both = phi.vcompose(&psi).unwrap();
        assert_eq!(both.at(0).payload(), &Payload::Set(vec![0, 1]));
        assert_eq!(phi.vcompose(&Repar::identity(kind, &b)).unwrap(), phi);
        assert!(phi.vcompose(&phi).is_err());
    }

    #[test]
    fn two_cell_checks() {
        let mut rng = seeded(6);
        let p = c(2);
        let kind = MonadKind::Identity;
        let b = ParamSpace::single(factor("b", 3));
        let g = ParamCell::from_fn(kind, b.clone(), p.clone(), p.clone(), |_| {
            Ok(UncertainValue::single(random_dp(&p, &p, 0.3, &mut rng)))
        })
        .unwrap();
        assert!(check_2cell(&Repar::identity(kind, &b), &g, &g, 0.0).unwrap().holds());

        let a = ParamSpace::single(factor("a", 2));
        let phi = Repar::lift(kind, a.clone(), b.clone(), vec![2, 2]).unwrap();
        let f = g.reparametrize(&phi).unwrap();
        assert!(check_2cell(&phi, &f, &g, 0.0).unwrap().holds());

        // Flip one bit of g at the point phi hits.
        let target = g.at(2).support()[0].clone();
        let flipped = if target == DesignProblem::top(p.clone(), p.clone()) {
            DesignProblem::bottom(p.clone(), p.clone())
        } else {
            DesignProblem::top(p.clone(), p.clone())
        };
        let mut table = g.table().to_vec();
        table[2] = UncertainValue::single(flipped);
        let g2 = ParamCell::new(kind, b.clone(), p.clone(), p.clone(), table).unwrap();
        assert_eq!(
            check_2cell(&phi, &f, &g2, 0.0).unwrap(),
            TwoCellCheck::FailsAt("a0".to_string())
        );
    }

    #[test]
    fn tensorator_on_unit_spaces_is_identity() {
        let p = c(2);
        let kind = MonadKind::Powerset;
        let id = ParamCell::identity(kind, &p);
        let t = tensorator(&id, &id, &id, &id).unwrap();
        assert_eq!(t, Repar::identity(kind, &ParamSpace::unit()));
    }

    #[test]
    fn tensorator_is_a_bijection() {
        let p = c(2);
        let kind = MonadKind::Identity;
        let mk = |name: &str, n: usize| {
            ParamCell::from_fn(kind, ParamSpace::single(factor(name, n)), p.clone(), p.clone(), |_| {
                Ok(UncertainValue::single(DesignProblem::identity(&p)))
            })
            .unwrap()
        };
        let t = tensorator(&mk("u", 2), &mk("v", 3), &mk("w", 2), &mk("x", 3)).unwrap();
        assert_eq!(t.dom().len(), 36);
        assert!(t.is_invertible());
        let names: Vec<&str> = t.cod().factors().iter().map(|f| f.name()).collect();
        assert_eq!(names, ["u", "w", "v", "x"]);
    }

    #[test]
    fn swap_repar_is_involutive() {
        let u = ParamSpace::single(factor("u", 2));
        let v = ParamSpace::new(vec![factor("v", 3), factor("w", 2)]);
        let kind = MonadKind::Distribution;
        let s = Repar::swap(kind, &u, &v);
        let back = Repar::swap(kind, &v, &u);
        assert_eq!(s.vcompose(&back).unwrap(), Repar::identity(kind, &u.tensor(&v)));
    }

    #[test]
    fn coherence_cells() {
        let (p, q) = (c(2), c(3));
        for kind in MonadKind::ALL {
            assert_eq!(
                coherence_cell(kind, &Coherence::LeftUnit(p.clone())),
                ParamCell::identity(kind, &p)
            );
            let s = coherence_cell(kind, &Coherence::Sym(p.clone(), q.clone()));
            let back = coherence_cell(kind, &Coherence::Sym(q.clone(), p.clone()));
            assert_eq!(s.hcompose(&back).unwrap(), ParamCell::identity(kind, &p.product(&q)));
        }
    }

    #[test]
    fn fix_and_marginalize() {
        let p = c(2);
        let kind = MonadKind::Distribution;
        let dom = ParamSpace::new(vec![factor("x", 2), factor("d", 2)]);
        let dps = [
            DesignProblem::bottom(p.clone(), p.clone()),
            DesignProblem::identity(&p),
            DesignProblem::top(p.clone(), p.clone()),
            DesignProblem::identity(&p),
        ];
        let cell = ParamCell::from_fn(kind, dom, p.clone(), p.clone(), |i| {
            Ok(UncertainValue::unit(kind, dps[i].clone()))
        })
        .unwrap();
        let fixed = cell.fix_factor(1, 1).unwrap();
        assert_eq!(fixed.dom().len(), 2);
        assert_eq!(fixed.at(0), cell.at(1));
        let marg = cell.marginalize(1, &[0.25, 0.75]).unwrap();
        let expected = UncertainValue::distribution(vec![(dps[0].clone(), 0.25), (dps[1].clone(), 0.75)]).unwrap();
        assert!(marg.at(0).values_equal(&expected, 1e-12).unwrap());
        assert!(matches!(cell.marginalize(1, &[1.0]), Err(ParaError::PriorSize { .. })));
    }
}

//! Finite posets, their products and opposites, discretization grids and antichains.
//!
//! A [`FinPoset`] is a flat list of *factors*. Each factor is a small explicit
//! poset; the poset itself is the product of its factors, with elements indexed
//! in lexicographic (row-major) order of the factor indices. The product of two
//! posets concatenates their factor lists, so the monoidal product is strictly
//! associative and the zero-factor poset (a single element, the empty tuple) is
//! a strict unit.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::bits::{BitMatrix, BitRow};
use crate::rational::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("duplicate element label `{0}`")]
    DuplicateElement(String),
    #[error("order relation has a cycle through `{0}` and `{1}`")]
    AntisymmetryViolation(String, String),
    #[error("`{0}` and `{1}` are comparable, so they cannot both be in an antichain")]
    Comparable(String, String),
    #[error("element index {0} is out of range")]
    UnknownElement(usize),
    #[error("no element with coordinates {0}")]
    UnknownCoordinates(String),
    #[error("grid axis `{0}` has no sample points")]
    EmptyAxis(String),
    #[error("grid axis `{0}` values are not strictly increasing")]
    NotIncreasing(String),
    #[error("map covers {got} of {expected} elements")]
    PartialMap { expected: usize, got: usize },
}

/// An opaque element label of a single factor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Num(Rational),
    Name(String),
}

impl Label {
    pub fn as_num(&self) -> Option<&Rational> {
        match self {
            Label::Num(r) => Some(r),
            Label::Name(_) => None,
        }
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::Name(s.to_string())
    }
}

impl From<Rational> for Label {
    fn from(r: Rational) -> Self {
        Label::Num(r)
    }
}

impl From<i64> for Label {
    fn from(n: i64) -> Self {
        Label::Num(crate::rational::int(n))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Num(r) => f.write_str(&format_rational(r)),
            Label::Name(s) => f.write_str(s),
        }
    }
}

/// One explicit poset in a factor list. `leq[i]` is the up-set of `i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    name: Option<String>,
    labels: Vec<Label>,
    leq: BitMatrix,
}

impl Factor {
    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
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

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq.get(i, j)
    }

    pub fn position(&self, label: &Label) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    fn opposite(&self) -> Factor {
        Factor {
            name: self.name.clone(),
            labels: self.labels.clone(),
            leq: self.leq.transpose(),
        }
    }

    fn is_total(&self) -> bool {
        (0..self.len()).all(|i| (0..self.len()).all(|j| self.leq(i, j) || self.leq(j, i)))
    }
}

struct Orders {
    up: BitMatrix,
    down: BitMatrix,
}

struct Inner {
    factors: Vec<Arc<Factor>>,
    size: usize,
    strides: Vec<usize>,
    orders: OnceLock<Orders>,
}

/// A finite partial order, stored as a flat product of explicit factors.
#[derive(Clone)]
pub struct FinPoset(Arc<Inner>);

impl FinPoset {
    fn from_factors(factors: Vec<Arc<Factor>>) -> FinPoset {
        let mut strides = vec![1; factors.len()];
        let mut size = 1usize;
        for (k, factor) in factors.iter().enumerate().rev() {
            strides[k] = size;
            size = size.saturating_mul(factor.len());
        }
        FinPoset(Arc::new(Inner {
            factors,
            size,
            strides,
            orders: OnceLock::new(),
        }))
    }

    /// Builds a single-factor poset as the reflexive-transitive closure of `leq_pairs`.
    pub fn new(elements: Vec<Label>, leq_pairs: &[(usize, usize)]) -> Result<FinPoset, PosetError> {
        let n = elements.len();
        for (i, label) in elements.iter().enumerate() {
            if elements[..i].contains(label) {
                return Err(PosetError::DuplicateElement(label.to_string()));
            }
        }
        let mut leq = BitMatrix::from_fn(n, n, |i, j| i == j);
        for &(a, b) in leq_pairs {
            if a >= n {
                return Err(PosetError::UnknownElement(a));
            }
            if b >= n {
                return Err(PosetError::UnknownElement(b));
            }
            leq.set(a, b, true);
        }
        // Warshall closure on bit rows.
        let mut rows: Vec<BitRow> = leq.rows().to_vec();
        for k in 0..n {
            let row_k = rows[k].clone();
            for row in rows.iter_mut() {
                if row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        for i in 0..n {
            for j in rows[i].iter() {
                if j != i && rows[j].contains(i) {
                    return Err(PosetError::AntisymmetryViolation(
                        elements[i].to_string(),
                        elements[j].to_string(),
                    ));
                }
            }
        }
        let factor = Factor {
            name: None,
            labels: elements,
            leq: BitMatrix::from_rows(n, rows),
        };
        Ok(FinPoset::from_factors(vec![Arc::new(factor)]))
    }

    /// The monoidal unit: no factors, exactly one element.
    pub fn unit() -> FinPoset {
        FinPoset::from_factors(Vec::new())
    }

    /// A chain `labels[0] < labels[1] < ...`.
    pub fn chain(labels: Vec<Label>) -> Result<FinPoset, PosetError> {
        let pairs: Vec<_> = (1..labels.len()).map(|i| (i - 1, i)).collect();
        FinPoset::new(labels, &pairs)
    }

    /// Discrete poset (antichain order).
    pub fn discrete(labels: Vec<Label>) -> Result<FinPoset, PosetError> {
        FinPoset::new(labels, &[])
    }

    /// `Bool = {⊥ ≤ ⊤}`, labelled `0 ≤ 1`.
    pub fn boolean() -> FinPoset {
        FinPoset::chain(vec![Label::from(0), Label::from(1)]).expect("two-chain is a poset")
    }

    /// Sets the name of every factor that has none. Names take part in equality.
    pub fn named(&self, name: &str) -> FinPoset {
        let factors = self
            .factors()
            .iter()
            .map(|f| {
                if f.name.is_some() {
                    f.clone()
                } else {
                    let mut g = (**f).clone();
                    g.name = Some(name.to_string());
                    Arc::new(g)
                }
            })
            .collect();
        FinPoset::from_factors(factors)
    }

    pub fn factors(&self) -> &[Arc<Factor>] {
        &self.0.factors
    }

    pub fn len(&self) -> usize {
        self.0.size
    }

    pub fn is_empty(&self) -> bool {
        self.0.size == 0
    }

    pub fn is_unit(&self) -> bool {
        self.0.factors.is_empty()
    }

    /// Cartesian product; the factor lists are concatenated.
    pub fn product(&self, other: &FinPoset) -> FinPoset {
        if self.is_unit() {
            return other.clone();
        }
        if other.is_unit() {
            return self.clone();
        }
        let factors = self.factors().iter().chain(other.factors()).cloned().collect();
        FinPoset::from_factors(factors)
    }

    pub fn product_all<'a>(posets: impl IntoIterator<Item = &'a FinPoset>) -> FinPoset {
        posets.into_iter().fold(FinPoset::unit(), |acc, p| acc.product(p))
    }

    /// Same elements, reversed order.
    pub fn opposite(&self) -> FinPoset {
        FinPoset::from_factors(self.factors().iter().map(|f| Arc::new(f.opposite())).collect())
    }

    /// The posets formed by the factors `range` of this one.
    pub fn slice(&self, range: std::ops::Range<usize>) -> FinPoset {
        FinPoset::from_factors(self.factors()[range].to_vec())
    }

    /// Factor indices of element `i`.
    pub fn coords(&self, i: usize) -> Vec<usize> {
        self.0
            .factors
            .iter()
            .zip(&self.0.strides)
            .map(|(f, s)| (i / s) % f.len())
            .collect()
    }

    pub fn index_of_coords(&self, coords: &[usize]) -> Option<usize> {
        if coords.len() != self.0.factors.len() {
            return None;
        }
        let mut index = 0;
        for ((c, f), s) in coords.iter().zip(&self.0.factors).zip(&self.0.strides) {
            if *c >= f.len() {
                return None;
            }
            index += c * s;
        }
        Some(index)
    }

    pub fn labels_of(&self, i: usize) -> Vec<&Label> {
        self.coords(i)
            .into_iter()
            .zip(self.factors())
            .map(|(c, f)| &f.labels[c])
            .collect()
    }

    /// Numeric coordinates, when every factor label of `i` is a number.
    pub fn numeric_coords(&self, i: usize) -> Option<Vec<Rational>> {
        self.labels_of(i).into_iter().map(|l| l.as_num().cloned()).collect()
    }

    pub fn index_of(&self, labels: &[Label]) -> Result<usize, PosetError> {
        let unknown = || {
            PosetError::UnknownCoordinates(format!(
                "({})",
                labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
            ))
        };
        if labels.len() != self.factors().len() {
            return Err(unknown());
        }
        let coords = labels
            .iter()
            .zip(self.factors())
            .map(|(l, f)| f.position(l))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(unknown)?;
        self.index_of_coords(&coords).ok_or_else(unknown)
    }

    /// Human-readable element: the bare label for one factor, a tuple otherwise.
    pub fn element_name(&self, i: usize) -> String {
        let labels = self.labels_of(i);
        if labels.len() == 1 {
            labels[0].to_string()
        } else {
            format!(
                "({})",
                labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
            )
        }
    }

    fn compute_leq(&self, i: usize, j: usize) -> bool {
        self.0
            .factors
            .iter()
            .zip(&self.0.strides)
            .all(|(f, s)| f.leq((i / s) % f.len(), (j / s) % f.len()))
    }

    fn orders(&self) -> &Orders {
        self.0.orders.get_or_init(|| {
            let n = self.len();
            let up = match self.0.factors.as_slice() {
                [single] => single.leq.clone(),
                _ => BitMatrix::from_fn(n, n, |i, j| self.compute_leq(i, j)),
            };
            let down = up.transpose();
            Orders { up, down }
        })
    }

    #[inline]
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.orders().up.get(i, j)
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq(i, j)
    }

    /// `{ j : i ≤ j }`.
    pub fn up_set(&self, i: usize) -> &BitRow {
        self.orders().up.row(i)
    }

    /// `{ j : j ≤ i }`.
    pub fn down_set(&self, i: usize) -> &BitRow {
        self.orders().down.row(i)
    }

    pub fn leq_matrix(&self) -> &BitMatrix {
        &self.orders().up
    }

    /// True iff every pair of elements is comparable.
    pub fn is_chain(&self) -> bool {
        self.0.factors.iter().filter(|f| f.len() > 1).count() <= 1 && self.0.factors.iter().all(|f| f.is_total())
    }

    /// Members of `subset` with no strictly smaller member of `subset`.
    pub fn minimal_elements(&self, subset: &[usize]) -> Result<Antichain, PosetError> {
        let mut set = BitRow::new(self.len());
        for &i in subset {
            if i >= self.len() {
                return Err(PosetError::UnknownElement(i));
            }
            set.insert(i);
        }
        Ok(self.minimal_of_row(&set))
    }

    pub(crate) fn minimal_of_row(&self, set: &BitRow) -> Antichain {
        let members = set
            .iter()
            .filter(|&i| {
                let mut below = self.down_set(i).clone();
                below.remove(i);
                !below.intersects(set)
            })
            .collect();
        Antichain {
            poset: self.clone(),
            members,
        }
    }

    fn ptr_eq(&self, other: &FinPoset) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl PartialEq for FinPoset {
    fn eq(&self, other: &Self) -> bool {
        self.ptr_eq(other) || self.0.factors == other.0.factors
    }
}

impl Eq for FinPoset {}

impl PartialOrd for FinPoset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FinPoset {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.ptr_eq(other) {
            Ordering::Equal
        } else {
            self.0.factors.cmp(&other.0.factors)
        }
    }
}

impl Hash for FinPoset {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.factors.hash(state)
    }
}

impl fmt::Debug for FinPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinPoset{}", self)
    }
}

impl fmt::Display for FinPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return f.write_str("I");
        }
        let parts: Vec<String> = self
            .factors()
            .iter()
            .map(|factor| match &factor.name {
                Some(name) => format!("{name}[{}]", factor.len()),
                None => format!("[{}]", factor.len()),
            })
            .collect();
        f.write_str(&parts.join(" x "))
    }
}

/// Pairwise incomparable elements of a poset, in ascending index order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Antichain {
    poset: FinPoset,
    members: Vec<usize>,
}

impl Antichain {
    /// Validates incomparability and sorts the members.
    pub fn new(poset: &FinPoset, mut members: Vec<usize>) -> Result<Antichain, PosetError> {
        members.sort_unstable();
        members.dedup();
        for &m in &members {
            if m >= poset.len() {
                return Err(PosetError::UnknownElement(m));
            }
        }
        for (k, &a) in members.iter().enumerate() {
            for &b in &members[k + 1..] {
                if poset.leq(a, b) || poset.leq(b, a) {
                    return Err(PosetError::Comparable(poset.element_name(a), poset.element_name(b)));
                }
            }
        }
        Ok(Antichain {
            poset: poset.clone(),
            members,
        })
    }

    pub fn empty(poset: &FinPoset) -> Antichain {
        Antichain {
            poset: poset.clone(),
            members: Vec::new(),
        }
    }

    pub fn poset(&self) -> &FinPoset {
        &self.poset
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// True iff `x` lies above some member.
    pub fn covers(&self, x: usize) -> bool {
        self.members.iter().any(|&m| self.poset.leq(m, x))
    }

    /// Upper-set order: `self ≼ other` iff every member of `other` lies above
    /// some member of `self` (the empty antichain is the top).
    pub fn upper_leq(&self, other: &Antichain) -> bool {
        other.members.iter().all(|&x| self.covers(x))
    }

    pub fn member_names(&self) -> Vec<String> {
        self.members.iter().map(|&m| self.poset.element_name(m)).collect()
    }
}

impl fmt::Display for Antichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.member_names().join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Direction {
    #[default]
    Ascending,
    Descending,
}

/// A named, strictly increasing list of rational sample points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridAxis {
    name: String,
    values: Vec<Rational>,
    direction: Direction,
}

impl GridAxis {
    pub fn new(name: impl Into<String>, values: Vec<Rational>, direction: Direction) -> Result<GridAxis, PosetError> {
        let name = name.into();
        if values.is_empty() {
            return Err(PosetError::EmptyAxis(name));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PosetError::NotIncreasing(name));
        }
        Ok(GridAxis {
            name,
            values,
            direction,
        })
    }

    pub fn ascending(name: impl Into<String>, values: Vec<Rational>) -> Result<GridAxis, PosetError> {
        GridAxis::new(name, values, Direction::Ascending)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    fn to_factor(&self) -> Factor {
        let n = self.values.len();
        let leq = BitMatrix::from_fn(n, n, |i, j| match self.direction {
            Direction::Ascending => i <= j,
            Direction::Descending => j <= i,
        });
        Factor {
            name: Some(self.name.clone()),
            labels: self.values.iter().cloned().map(Label::Num).collect(),
            leq,
        }
    }
}

/// Product of chains, one factor per axis; descending axes contribute the opposite chain.
pub fn grid_poset(axes: &[GridAxis]) -> Result<FinPoset, PosetError> {
    if axes.is_empty() {
        return Err(PosetError::EmptyAxis("<no axes>".to_string()));
    }
    Ok(FinPoset::from_factors(
        axes.iter().map(|a| Arc::new(a.to_factor())).collect(),
    ))
}

/// `map[i]` is the image of element `i` of `from` in `to`.
pub fn is_monotone(from: &FinPoset, to: &FinPoset, map: &[usize]) -> Result<bool, PosetError> {
    if map.len() != from.len() {
        return Err(PosetError::PartialMap {
            expected: from.len(),
            got: map.len(),
        });
    }
    if let Some(&bad) = map.iter().find(|&&m| m >= to.len()) {
        return Err(PosetError::UnknownElement(bad));
    }
    Ok((0..from.len()).all(|i| from.up_set(i).iter().all(|j| to.leq(map[i], map[j]))))
}

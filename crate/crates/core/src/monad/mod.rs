//! Uncertainty monads as values: identity, nonempty finite powerset, intervals
//! over a partial order, and finitely supported probability distributions.
//!
//! Every operation here is the concrete unit / Kleisli extension / monoidal
//! strength of the corresponding monad, specialised to finite carriers. Set and
//! distribution payloads are kept in canonical ascending order of the carrier,
//! so equality of sets is a plain slice comparison and distributions can be
//! compared atom by atom.

pub mod laws;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Probabilities may drift from 1 by at most this much.
pub const MASS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonadError {
    #[error("monad kind mismatch: expected {expected}, found {found}")]
    KindMismatch { expected: MonadKind, found: MonadKind },
    #[error("a powerset value must be nonempty")]
    EmptySet,
    #[error("interval lower end is not below its upper end")]
    NotAnInterval,
    #[error("probability {0} is negative or not finite")]
    BadProbability(f64),
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("Kleisli map is not defined at {index} (domain has {size} points)")]
    PartialMap { index: usize, size: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonadKind {
    Identity,
    Powerset,
    Interval,
    Distribution,
}

impl MonadKind {
    pub const ALL: [MonadKind; 4] = [
        MonadKind::Identity,
        MonadKind::Powerset,
        MonadKind::Interval,
        MonadKind::Distribution,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MonadKind::Identity => "identity",
            MonadKind::Powerset => "powerset",
            MonadKind::Interval => "interval",
            MonadKind::Distribution => "distribution",
        }
    }

    /// Default comparison tolerance: exact except for distributions.
    pub fn default_tolerance(self) -> f64 {
        match self {
            MonadKind::Distribution => MASS_TOLERANCE,
            _ => 0.0,
        }
    }
}

impl fmt::Display for MonadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MonadKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MonadKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown monad `{s}`"))
    }
}

/// The payload of an uncertain value.
#[derive(Clone, Debug, PartialEq)]
pub enum Payload<T> {
    Single(T),
    /// Nonempty, strictly ascending.
    Set(Vec<T>),
    Interval {
        lo: T,
        hi: T,
    },
    /// Strictly ascending support, positive masses summing to 1.
    Dist(Vec<(T, f64)>),
}

/// A monad-tagged container over carrier values of type `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct UncertainValue<T>(Payload<T>);

fn merge_atoms<T: Ord>(atoms: impl IntoIterator<Item = (T, f64)>) -> Vec<(T, f64)> {
    let mut merged: BTreeMap<T, f64> = BTreeMap::new();
    for (x, p) in atoms {
        *merged.entry(x).or_insert(0.0) += p;
    }
    merged.into_iter().filter(|(_, p)| *p > 0.0).collect()
}

fn canonical_set<T: Ord>(items: impl IntoIterator<Item = T>) -> Vec<T> {
    let mut v: Vec<T> = items.into_iter().collect();
    v.sort();
    v.dedup();
    v
}

impl<T: Clone + Ord> UncertainValue<T> {
    /// `η`: identity wrapper, singleton, degenerate interval or point mass.
    pub fn unit(kind: MonadKind, x: T) -> Self {
        UncertainValue(match kind {
            MonadKind::Identity => Payload::Single(x),
            MonadKind::Powerset => Payload::Set(vec![x]),
            MonadKind::Interval => Payload::Interval { lo: x.clone(), hi: x },
            MonadKind::Distribution => Payload::Dist(vec![(x, 1.0)]),
        })
    }

    pub fn single(x: T) -> Self {
        UncertainValue(Payload::Single(x))
    }

    pub fn set(items: impl IntoIterator<Item = T>) -> Result<Self, MonadError> {
        let items = canonical_set(items);
        if items.is_empty() {
            return Err(MonadError::EmptySet);
        }
        Ok(UncertainValue(Payload::Set(items)))
    }

    /// An interval `[lo, hi]` in the order given by `leq`.
    pub fn interval(lo: T, hi: T, leq: impl Fn(&T, &T) -> bool) -> Result<Self, MonadError> {
        if !leq(&lo, &hi) {
            return Err(MonadError::NotAnInterval);
        }
        Ok(UncertainValue(Payload::Interval { lo, hi }))
    }

    /// An interval without checking `lo ≤ hi`; callers own the invariant.
    pub fn interval_unchecked(lo: T, hi: T) -> Self {
        UncertainValue(Payload::Interval { lo, hi })
    }

    /// Finite distribution; equal atoms are merged and zero-mass atoms dropped.
    pub fn distribution(atoms: impl IntoIterator<Item = (T, f64)>) -> Result<Self, MonadError> {
        let atoms: Vec<(T, f64)> = atoms.into_iter().collect();
        if let Some(&(_, p)) = atoms.iter().find(|(_, p)| !p.is_finite() || *p < 0.0) {
            return Err(MonadError::BadProbability(p));
        }
        let total: f64 = atoms.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(MonadError::NotNormalized(total));
        }
        Ok(UncertainValue(Payload::Dist(merge_atoms(atoms))))
    }

    pub fn kind(&self) -> MonadKind {
        match &self.0 {
            Payload::Single(_) => MonadKind::Identity,
            Payload::Set(_) => MonadKind::Powerset,
            Payload::Interval { .. } => MonadKind::Interval,
            Payload::Dist(_) => MonadKind::Distribution,
        }
    }

    pub fn payload(&self) -> &Payload<T> {
        &self.0
    }

    pub fn into_payload(self) -> Payload<T> {
        self.0
    }

    /// Carrier values mentioned by the payload (both ends of an interval).
    pub fn support(&self) -> Vec<&T> {
        match &self.0 {
            Payload::Single(x) => vec![x],
            Payload::Set(xs) => xs.iter().collect(),
            Payload::Interval { lo, hi } => vec![lo, hi],
            Payload::Dist(atoms) => atoms.iter().map(|(x, _)| x).collect(),
        }
    }

    /// Size of the support: 1 for single values, 2 for non-degenerate intervals.
    pub fn support_size(&self) -> usize {
        match &self.0 {
            Payload::Interval { lo, hi } if lo == hi => 1,
            _ => self.support().len(),
        }
    }

    pub fn check_kind(&self, expected: MonadKind) -> Result<(), MonadError> {
        let found = self.kind();
        if found != expected {
            return Err(MonadError::KindMismatch { expected, found });
        }
        Ok(())
    }

    /// Kleisli extension: feeds every carrier value to `k` and flattens with `μ`.
    ///
    /// Powerset takes the union of images, interval keeps
    /// `[k(lo).lo, k(hi).hi]`, distribution forms the mixture, identity applies `k`.
    pub fn bind<U, E>(&self, mut k: impl FnMut(&T) -> Result<UncertainValue<U>, E>) -> Result<UncertainValue<U>, E>
    where
        U: Clone + Ord,
        E: From<MonadError>,
    {
        let kind = self.kind();
        let mut next = |x: &T| -> Result<UncertainValue<U>, E> {
            let v = k(x)?;
            v.check_kind(kind)?;
            Ok(v)
        };
        Ok(UncertainValue(match &self.0 {
            Payload::Single(x) => return next(x),
            Payload::Set(xs) => {
                let mut out = Vec::new();
                for x in xs {
                    match next(x)?.0 {
                        Payload::Set(ys) => out.extend(ys),
                        _ => unreachable!("kind checked"),
                    }
                }
                Payload::Set(canonical_set(out))
            }
            Payload::Interval { lo, hi } => {
                let lo = match next(lo)?.0 {
                    Payload::Interval { lo, .. } => lo,
                    _ => unreachable!("kind checked"),
                };
                let hi = match next(hi)?.0 {
                    Payload::Interval { hi, .. } => hi,
                    _ => unreachable!("kind checked"),
                };
                Payload::Interval { lo, hi }
            }
            Payload::Dist(atoms) => {
                let mut out = Vec::new();
                for (x, p) in atoms {
                    match next(x)?.0 {
                        Payload::Dist(inner) => out.extend(inner.into_iter().map(|(y, q)| (y, p * q))),
                        _ => unreachable!("kind checked"),
                    }
                }
                Payload::Dist(merge_atoms(out))
            }
        }))
    }

    /// Functor action `M f`.
    pub fn map<U: Clone + Ord>(&self, mut f: impl FnMut(&T) -> U) -> UncertainValue<U> {
        self.try_map(|x| Ok::<U, MonadError>(f(x))).expect("map cannot fail")
    }

    pub fn try_map<U: Clone + Ord, E: From<MonadError>>(
        &self,
        mut f: impl FnMut(&T) -> Result<U, E>,
    ) -> Result<UncertainValue<U>, E> {
        let kind = self.kind();
        self.bind(|x| Ok(UncertainValue::unit(kind, f(x)?)))
    }

    /// Monoidal strength `∇ : M X ⊗ M Y → M(X ⊗ Y)` followed by `M(pair)`.
    ///
    /// Powerset takes the Cartesian product, interval pairs the endpoints,
    /// distribution forms the independent product measure.
    pub fn zip_with<U, V, E>(
        &self,
        other: &UncertainValue<U>,
        mut pair: impl FnMut(&T, &U) -> Result<V, E>,
    ) -> Result<UncertainValue<V>, E>
    where
        U: Clone + Ord,
        V: Clone + Ord,
        E: From<MonadError>,
    {
        other.check_kind(self.kind())?;
        Ok(UncertainValue(match (&self.0, &other.0) {
            (Payload::Single(x), Payload::Single(y)) => Payload::Single(pair(x, y)?),
            (Payload::Set(xs), Payload::Set(ys)) => {
                let mut out = Vec::with_capacity(xs.len() * ys.len());
                for x in xs {
                    for y in ys {
                        out.push(pair(x, y)?);
                    }
                }
                Payload::Set(canonical_set(out))
            }
            (Payload::Interval { lo: a, hi: b }, Payload::Interval { lo: c, hi: d }) => Payload::Interval {
                lo: pair(a, c)?,
                hi: pair(b, d)?,
            },
            (Payload::Dist(xs), Payload::Dist(ys)) => {
                let mut out = Vec::with_capacity(xs.len() * ys.len());
                for (x, p) in xs {
                    for (y, q) in ys {
                        out.push((pair(x, y)?, p * q));
                    }
                }
                Payload::Dist(merge_atoms(out))
            }
            _ => unreachable!("kind checked"),
        }))
    }

    /// `∇` with tuple pairing.
    pub fn strength<U: Clone + Ord>(&self, other: &UncertainValue<U>) -> Result<UncertainValue<(T, U)>, MonadError> {
        self.zip_with(other, |x, y| Ok::<_, MonadError>((x.clone(), y.clone())))
    }

    /// True iff an interval payload satisfies `lo ≤ hi`; other kinds always pass.
    pub fn is_ordered(&self, leq: impl Fn(&T, &T) -> bool) -> bool {
        match &self.0 {
            Payload::Interval { lo, hi } => leq(lo, hi),
            _ => true,
        }
    }

    /// Total mass of a distribution; 1 for the other kinds.
    pub fn total_mass(&self) -> f64 {
        match &self.0 {
            Payload::Dist(atoms) => atoms.iter().map(|(_, p)| p).sum(),
            _ => 1.0,
        }
    }

    /// Probability of the carrier values satisfying `pred` (distributions only).
    pub fn mass_where(&self, mut pred: impl FnMut(&T) -> bool) -> Option<f64> {
        match &self.0 {
            Payload::Dist(atoms) => Some(atoms.iter().filter(|(x, _)| pred(x)).map(|(_, p)| p).sum()),
            _ => None,
        }
    }

    /// Exact equality, except distributions compare by total variation `≤ tol`.
    pub fn values_equal(&self, other: &Self, tol: f64) -> Result<bool, MonadError> {
        other.check_kind(self.kind())?;
        Ok(match (&self.0, &other.0) {
            (Payload::Dist(a), Payload::Dist(b)) => total_variation(a, b) <= tol,
            (a, b) => a == b,
        })
    }
}

/// `½ Σ |p(x) − q(x)|` over the union of supports; both inputs sorted by carrier.
pub fn total_variation<T: Ord>(a: &[(T, f64)], b: &[(T, f64)]) -> f64 {
    let (mut i, mut j, mut sum) = (0, 0, 0.0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some((x, p)), Some((y, q))) => match x.cmp(y) {
                std::cmp::Ordering::Less => {
                    sum += p;
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    sum += q;
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    sum += (p - q).abs();
                    i += 1;
                    j += 1;
                }
            },
            (Some((_, p)), None) => {
                sum += p;
                i += 1;
            }
            (None, Some((_, q))) => {
                sum += q;
                j += 1;
            }
            (None, None) => break,
        }
    }
    sum / 2.0
}

/// An arrow `A → M X` of the Kleisli category, with `A = 0..len` a finite index set.
#[derive(Clone, Debug, PartialEq)]
pub struct KleisliMap<T> {
    kind: MonadKind,
    assignment: Vec<UncertainValue<T>>,
}

impl<T: Clone + Ord> KleisliMap<T> {
    pub fn new(kind: MonadKind, assignment: Vec<UncertainValue<T>>) -> Result<Self, MonadError> {
        for v in &assignment {
            v.check_kind(kind)?;
        }
        Ok(KleisliMap { kind, assignment })
    }

    /// `L_M(f) = f ⨟ η`.
    pub fn lift(kind: MonadKind, images: Vec<T>) -> Self {
        KleisliMap {
            kind,
            assignment: images.into_iter().map(|x| UncertainValue::unit(kind, x)).collect(),
        }
    }

    pub fn kind(&self) -> MonadKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn apply(&self, a: usize) -> Result<&UncertainValue<T>, MonadError> {
        self.assignment.get(a).ok_or(MonadError::PartialMap {
            index: a,
            size: self.assignment.len(),
        })
    }

    pub fn values(&self) -> &[UncertainValue<T>] {
        &self.assignment
    }
}

impl KleisliMap<usize> {
    pub fn identity(kind: MonadKind, n: usize) -> Self {
        KleisliMap::lift(kind, (0..n).collect())
    }

    /// Kleisli composition `self ⨟ next`.
    pub fn then<U: Clone + Ord>(&self, next: &KleisliMap<U>) -> Result<KleisliMap<U>, MonadError> {
        if next.kind != self.kind {
            return Err(MonadError::KindMismatch {
                expected: self.kind,
                found: next.kind,
            });
        }
        let assignment = self
            .assignment
            .iter()
            .map(|m| m.bind(|&x| next.apply(x).cloned()))
            .collect::<Result<_, MonadError>>()?;
        Ok(KleisliMap {
            kind: self.kind,
            assignment,
        })
    }

    /// Monoidal product in the Kleisli category; pairs are flattened row-major
    /// with `other_cod` as the size of `other`'s codomain.
    pub fn tensor(&self, other: &KleisliMap<usize>, other_cod: usize) -> Result<KleisliMap<usize>, MonadError> {
        if other.kind != self.kind {
            return Err(MonadError::KindMismatch {
                expected: self.kind,
                found: other.kind,
            });
        }
        let mut assignment = Vec::with_capacity(self.len() * other.len());
        for a in &self.assignment {
            for b in &other.assignment {
                assignment.push(a.zip_with(b, |&x, &y| Ok::<_, MonadError>(x * other_cod + y))?);
            }
        }
        Ok(KleisliMap {
            kind: self.kind,
            assignment,
        })
    }
}

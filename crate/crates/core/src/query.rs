//! Co-design queries on plain and parametrized uncertain design problems:
//! minimal-resource antichains, minimal costs, decisions under a utility,
//! Bayesian conditioning of one parameter factor and threshold-model fitting.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::dp::DesignProblem;
use crate::formula::{Formula, FormulaError};
use crate::monad::{MonadError, MonadKind, Payload, UncertainValue};
use crate::para::{ParaError, ParamCell, ParamFactor};
use crate::poset::{Antichain, FinPoset, GridAxis, PosetError};
use crate::rational::{to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QueryError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Monad(#[from] MonadError),
    #[error(transparent)]
    Para(#[from] ParaError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("resource poset {0} is not a single numeric chain")]
    NotAChain(String),
    #[error("utility {utility} does not apply to {kind} cells")]
    IncompatibleUtility { utility: Utility, kind: MonadKind },
    #[error("expected a {expected} cell, got {found}")]
    KindMismatch { expected: MonadKind, found: MonadKind },
    #[error("every parameter value has zero likelihood")]
    ZeroEvidence,
    #[error("no parameter value satisfies every observation")]
    EmptyFeasibleSet,
    #[error("no data")]
    EmptyData,
    #[error("invalid prior: {0}")]
    BadPrior(String),
}

/// Minimal resources that make `f` feasible; empty iff `f` is infeasible everywhere.
pub fn fix_fun_min_res(dp: &DesignProblem, f: usize) -> Result<Antichain, QueryError> {
    if f >= dp.fun().len() {
        return Err(PosetError::UnknownElement(f).into());
    }
    Ok(dp.res().minimal_of_row(dp.feasible_row(f)))
}

/// The query lifted through the monad at every parameter point. Intervals
/// `[lo, hi]` of problems become `[front(hi), front(lo)]` in the upper-set
/// order of antichains: the more feasible problem has the lower front.
pub fn query_cell(cell: &ParamCell, f: usize) -> Result<Vec<UncertainValue<Antichain>>, QueryError> {
    if f >= cell.src().len() {
        return Err(PosetError::UnknownElement(f).into());
    }
    cell.table()
        .iter()
        .map(|value| {
            Ok(match value.payload() {
                Payload::Interval { lo, hi } => {
                    UncertainValue::interval(fix_fun_min_res(hi, f)?, fix_fun_min_res(lo, f)?, Antichain::upper_leq)?
                }
                _ => value.try_map(|dp| fix_fun_min_res(dp, f))?,
            })
        })
        .collect()
}

/// A minimal cost, or no feasible resource at all. `Finite` sorts first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cost {
    Finite(Rational),
    Infeasible,
}

impl Cost {
    pub fn to_f64(&self) -> f64 {
        match self {
            Cost::Finite(c) => to_f64(c),
            Cost::Infeasible => f64::INFINITY,
        }
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(c) => f.write_str(&crate::rational::format_rational(c)),
            Cost::Infeasible => f.write_str("infeasible"),
        }
    }
}

/// Numeric labels of a one-factor chain, indexed by element.
fn chain_values(p: &FinPoset) -> Result<Vec<Rational>, QueryError> {
    let not_chain = || QueryError::NotAChain(p.to_string());
    if p.factors().len() != 1 || !p.is_chain() {
        return Err(not_chain());
    }
    p.factors()[0]
        .labels()
        .iter()
        .map(|l| l.as_num().cloned().ok_or_else(not_chain))
        .collect()
}

fn min_cost_with(dp: &DesignProblem, f: usize, values: &[Rational]) -> Cost {
    let front = dp.res().minimal_of_row(dp.feasible_row(f));
    match front.members().first() {
        Some(&r) => Cost::Finite(values[r].clone()),
        None => Cost::Infeasible,
    }
}

/// The least feasible resource on a numeric chain, as its coordinate.
pub fn min_cost(dp: &DesignProblem, f: usize) -> Result<Cost, QueryError> {
    let values = chain_values(dp.res())?;
    if f >= dp.fun().len() {
        return Err(PosetError::UnknownElement(f).into());
    }
    Ok(min_cost_with(dp, f, &values))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Utility {
    Expected,
    WorstCase,
    BestCase,
}

impl fmt::Display for Utility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Utility::Expected => "expected",
            Utility::WorstCase => "worst_case",
            Utility::BestCase => "best_case",
        })
    }
}

/// A per-point score: an exact cost, or an expectation in floating point.
#[derive(Clone, Debug, PartialEq)]
pub enum Score {
    Exact(Cost),
    Expected(f64),
}

impl Score {
    pub fn to_f64(&self) -> f64 {
        match self {
            Score::Exact(c) => c.to_f64(),
            Score::Expected(x) => *x,
        }
    }

    fn less_than(&self, other: &Score) -> bool {
        match (self, other) {
            (Score::Exact(a), Score::Exact(b)) => a < b,
            _ => self.to_f64() < other.to_f64(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decision {
    pub point: usize,
    pub score: Score,
    /// Scores of every parameter point, in index order.
    pub scores: Vec<Score>,
}

fn score(costs: &UncertainValue<Cost>, utility: Utility) -> Score {
    match (costs.payload(), utility) {
        (Payload::Single(c), _) => Score::Exact(c.clone()),
        (Payload::Dist(atoms), Utility::Expected) => Score::Expected(
            atoms
                .iter()
                .map(|(c, p)| match c {
                    Cost::Finite(v) => p * to_f64(v),
                    Cost::Infeasible => f64::INFINITY,
                })
                .sum(),
        ),
        // Pessimistic feasibility: the lower problem is the least feasible one.
        (Payload::Interval { lo, .. }, Utility::WorstCase) => Score::Exact(lo.clone()),
        (Payload::Interval { hi, .. }, Utility::BestCase) => Score::Exact(hi.clone()),
        (_, Utility::WorstCase) => Score::Exact(costs.support().into_iter().max().expect("nonempty").clone()),
        (_, _) => Score::Exact(costs.support().into_iter().min().expect("nonempty").clone()),
    }
}

/// Scores every parameter point and returns the first minimizer.
pub fn decide(cell: &ParamCell, f: usize, utility: Utility) -> Result<Decision, QueryError> {
    let values = chain_values(cell.tgt())?;
    if f >= cell.src().len() {
        return Err(PosetError::UnknownElement(f).into());
    }
    let kind = cell.kind();
    if utility == Utility::Expected && !matches!(kind, MonadKind::Distribution | MonadKind::Identity) {
        return Err(QueryError::IncompatibleUtility { utility, kind });
    }
    let scores: Vec<Score> = cell
        .table()
        .iter()
        .map(|value| {
            // Interval ends are mapped separately so that `lo` keeps the cost of the lower problem.
            let costs = match value.payload() {
                Payload::Interval { lo, hi } => {
                    UncertainValue::interval_unchecked(min_cost_with(lo, f, &values), min_cost_with(hi, f, &values))
                }
                _ => value.map(|dp| min_cost_with(dp, f, &values)),
            };
            score(&costs, utility)
        })
        .collect();
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if s.less_than(&scores[best]) {
            best = i;
        }
    }
    Ok(Decision {
        point: best,
        score: scores[best].clone(),
        scores,
    })
}

/// One observed triple at a decision point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observation {
    /// Point of the parameter space with the inferred factor removed.
    pub x: usize,
    pub f: usize,
    pub r: usize,
    pub feasible: bool,
}

/// A normalized distribution over the labels of one parameter factor.
#[derive(Clone, Debug, PartialEq)]
pub struct Posterior {
    pub factor: ParamFactor,
    pub probs: Vec<f64>,
}

fn check_prior(prior: &[f64], n: usize) -> Result<(), QueryError> {
    if prior.len() != n {
        return Err(QueryError::BadPrior(format!("{} weights for {n} labels", prior.len())));
    }
    if prior.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(QueryError::BadPrior("weights must be finite and nonnegative".into()));
    }
    let total: f64 = prior.iter().sum();
    if (total - 1.0).abs() > crate::monad::MASS_TOLERANCE {
        return Err(QueryError::BadPrior(format!("weights sum to {total}")));
    }
    Ok(())
}

/// Conditions the prior over factor `d` on the observations. Each triple's
/// likelihood is the mass of problems that agree with its feasibility flag;
/// triples are independent given the parameters.
pub fn bayes_update(
    cell: &ParamCell,
    d: usize,
    prior: &[f64],
    observations: &[Observation],
) -> Result<Posterior, QueryError> {
    if cell.kind() != MonadKind::Distribution {
        return Err(QueryError::KindMismatch {
            expected: MonadKind::Distribution,
            found: cell.kind(),
        });
    }
    let dom = cell.dom();
    let factor = dom
        .factors()
        .get(d)
        .ok_or_else(|| ParaError::UnknownFactor(d.to_string()))?
        .clone();
    check_prior(prior, factor.len())?;
    let rest = dom.without(d);
    for o in observations {
        if o.x >= rest.len() {
            return Err(ParaError::OutOfRange { point: o.x.to_string() }.into());
        }
        if o.f >= cell.src().len() {
            return Err(PosetError::UnknownElement(o.f).into());
        }
        if o.r >= cell.tgt().len() {
            return Err(PosetError::UnknownElement(o.r).into());
        }
    }
    let log_post: Vec<f64> = (0..factor.len())
        .map(|k| {
            let mut acc = prior[k].ln();
            for o in observations {
                let mut coords = rest.coords(o.x);
                coords.insert(d, k);
                let value = cell.at(dom.index(&coords).expect("in range"));
                let l = value
                    .mass_where(|dp| dp.is_feasible(o.f, o.r) == o.feasible)
                    .expect("distribution");
                acc += l.ln();
            }
            acc
        })
        .collect();
    let max = log_post.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(QueryError::ZeroEvidence);
    }
    let weights: Vec<f64> = log_post.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(Posterior {
        factor,
        probs: weights.into_iter().map(|w| w / total).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMode {
    LeastSquares,
    Constrained,
}

/// A finite grid of candidate parameter vectors, in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaGrid {
    pub axes: Vec<GridAxis>,
}

impl ThetaGrid {
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values().len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, mut index: usize) -> BTreeMap<String, Rational> {
        let mut out = BTreeMap::new();
        for axis in self.axes.iter().rev() {
            let n = axis.values().len();
            out.insert(axis.name().to_string(), axis.values()[index % n].clone());
            index /= n;
        }
        out
    }
}

/// One observed input/resource pair for fitting.
#[derive(Clone, Debug, PartialEq)]
pub struct FitDatum {
    pub inputs: BTreeMap<String, Rational>,
    pub resource: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub index: usize,
    pub theta: BTreeMap<String, Rational>,
    pub loss: Rational,
    pub metric: Rational,
    /// Number of grid points that satisfy every constraint.
    pub feasible_points: usize,
}

/// Fits `phi` over the grid: least squares, or the best metric among grid
/// points with `phi(f_i; θ) ≤ r_i` for every datum. The metric may mention
/// the θ names and `loss`; it defaults to the loss itself. Ties keep grid order.
pub fn fit_threshold(
    phi: &Formula,
    grid: &ThetaGrid,
    data: &[FitDatum],
    mode: FitMode,
    metric: Option<&Formula>,
) -> Result<FitResult, QueryError> {
    if data.is_empty() {
        return Err(QueryError::EmptyData);
    }
    let mut best: Option<FitResult> = None;
    let mut feasible_points = 0;
    for index in 0..grid.len() {
        let theta = grid.point(index);
        let mut loss = Rational::from_integer(0.into());
        let mut satisfied = true;
        for datum in data {
            let env = |name: &str| theta.get(name).or_else(|| datum.inputs.get(name)).cloned();
            let predicted = phi.eval(&env)?;
            satisfied &= predicted <= datum.resource;
            let err = predicted - &datum.resource;
            loss += &err * &err;
        }
        if satisfied {
            feasible_points += 1;
        }
        let value = match (mode, metric) {
            (FitMode::Constrained, _) if !satisfied => continue,
            (FitMode::Constrained, Some(m)) => {
                let env = |name: &str| {
                    if name == "loss" {
                        Some(loss.clone())
                    } else {
                        theta.get(name).cloned()
                    }
                };
                m.eval(&env)?
            }
            _ => loss.clone(),
        };
        if best.as_ref().is_none_or(|b| value < b.metric) {
            best = Some(FitResult {
                index,
                theta,
                loss,
                metric: value,
                feasible_points: 0,
            });
        }
    }
    let mut result = best.ok_or(QueryError::EmptyFeasibleSet)?;
    result.feasible_points = feasible_points;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::para::ParamSpace;
    use crate::poset::{grid_poset, Label};
    use crate::rational::int;

    fn chain(name: &str, n: i64) -> FinPoset {
        grid_poset(&[GridAxis::ascending(name, (0..n).map(int).collect()).unwrap()]).unwrap()
    }

    #[test]
    fn min_res_examples() {
        let c3 = chain("c", 3);
        let id = DesignProblem::identity(&c3);
        assert_eq!(fix_fun_min_res(&id, 1).unwrap().members(), [1]);
        let b = FinPoset::boolean();
        let b2 = b.product(&b);
        let dp = DesignProblem::from_fn(b.clone(), b2.clone(), |f, r| {
            let c = b2.coords(r);
            f <= c[0].max(c[1])
        })
        .unwrap();
        let front = fix_fun_min_res(&dp, 1).unwrap();
        assert_eq!(
            front.members().iter().map(|&r| b2.coords(r)).collect::<Vec<_>>(),
            [[0, 1], [1, 0]]
        );
        assert!(fix_fun_min_res(&DesignProblem::bottom(c3.clone(), c3.clone()), 0)
            .unwrap()
            .is_empty());
        assert!(fix_fun_min_res(&id, 3).is_err());
    }

    #[test]
    fn min_cost_examples() {
        let c3 = chain("v", 3);
        assert_eq!(
            min_cost(&DesignProblem::identity(&c3), 2).unwrap(),
            Cost::Finite(int(2))
        );
        assert_eq!(
            min_cost(&DesignProblem::bottom(c3.clone(), c3.clone()), 0).unwrap(),
            Cost::Infeasible
        );
        let c5 = chain("c", 5);
        let dp = DesignProblem::threshold(&c3, &c5, |x| Ok(vec![int(2) * &x[0]])).unwrap();
        assert_eq!(min_cost(&dp, 2).unwrap(), Cost::Finite(int(4)));
        let b2 = FinPoset::boolean().product(&FinPoset::boolean());
        assert!(matches!(
            min_cost(&DesignProblem::top(c3, b2), 0),
            Err(QueryError::NotAChain(_))
        ));
    }

    fn point_space(n: usize) -> ParamSpace {
        ParamSpace::single(ParamFactor::new("a", (0..n as i64).map(Label::from).collect()).unwrap())
    }

    /// The problem on `1 → c[0..=4]` whose minimal cost is `c` (or nothing).
    fn cost_dp(c: Option<i64>) -> DesignProblem {
        let res = chain("c", 5);
        DesignProblem::from_fn(FinPoset::unit(), res, |_, r| c.is_some_and(|c| r as i64 >= c)).unwrap()
    }

    #[test]
    fn expected_and_worst_case_disagree() {
        // Costs 0, 1, 2, 3, 5/2 on the chain; the sorted axis needs 5/2 before 3.
        let res = grid_poset(&[GridAxis::ascending(
            "c",
            vec![int(0), int(1), int(2), Rational::new(5.into(), 2.into()), int(3)],
        )
        .unwrap()])
        .unwrap();
        let at = |c: Rational| {
            DesignProblem::from_fn(FinPoset::unit(), res.clone(), |_, r| {
                res.numeric_coords(r).unwrap()[0] >= c
            })
            .unwrap()
        };
        let kind = MonadKind::Distribution;
        let table = vec![
            UncertainValue::distribution([(at(int(1)), 0.5), (at(int(3)), 0.5)]).unwrap(),
            UncertainValue::distribution([(at(Rational::new(5.into(), 2.into())), 1.0)]).unwrap(),
        ];
        let cell = ParamCell::new(kind, point_space(2), FinPoset::unit(), res.clone(), table).unwrap();
        let e = decide(&cell, 0, Utility::Expected).unwrap();
        assert_eq!(e.point, 0);
        assert!((e.score.to_f64() - 2.0).abs() < 1e-12);
        let w = decide(&cell, 0, Utility::WorstCase).unwrap();
        assert_eq!(w.point, 1);
        assert_eq!(w.score, Score::Exact(Cost::Finite(Rational::new(5.into(), 2.into()))));
        let b = decide(&cell, 0, Utility::BestCase).unwrap();
        assert_eq!(b.point, 0);
    }

    #[test]
    fn identity_argmin_and_ties() {
        let kind = MonadKind::Identity;
        let table = vec![
            UncertainValue::single(cost_dp(Some(3))),
            UncertainValue::single(cost_dp(Some(2))),
            UncertainValue::single(cost_dp(Some(2))),
        ];
        let res = table[0].support()[0].res().clone();
        let cell = ParamCell::new(kind, point_space(3), FinPoset::unit(), res, table).unwrap();
        for u in [Utility::Expected, Utility::WorstCase, Utility::BestCase] {
            assert_eq!(decide(&cell, 0, u).unwrap().point, 1);
        }
    }

    #[test]
    fn interval_utilities_use_opposite_ends() {
        let kind = MonadKind::Interval;
        let lo = cost_dp(Some(3));
        let hi = cost_dp(Some(1));
        let mid = cost_dp(Some(2));
        let res = lo.res().clone();
        let table = vec![
            UncertainValue::interval(lo, hi, |a, b| a.leq(b).unwrap()).unwrap(),
            UncertainValue::unit(kind, mid),
        ];
        let cell = ParamCell::new(kind, point_space(2), FinPoset::unit(), res, table).unwrap();
        assert_eq!(decide(&cell, 0, Utility::WorstCase).unwrap().point, 1);
        assert_eq!(decide(&cell, 0, Utility::BestCase).unwrap().point, 0);
        assert!(matches!(
            decide(&cell, 0, Utility::Expected),
            Err(QueryError::IncompatibleUtility { .. })
        ));
        let fronts = query_cell(&cell, 0).unwrap();
        match fronts[0].payload() {
            Payload::Interval { lo, hi } => {
                assert!(lo.upper_leq(hi));
                assert_ne!(lo, hi);
            }
            other => panic!("{other:?}"),
        }
    }

    fn bayes_cell(likelihoods: &[f64]) -> ParamCell {
        let kind = MonadKind::Distribution;
        let one = FinPoset::unit();
        let feasible = DesignProblem::top(one.clone(), one.clone());
        let infeasible = DesignProblem::bottom(one.clone(), one.clone());
        let d = ParamFactor::new("d", (0..likelihoods.len() as i64).map(Label::from).collect()).unwrap();
        ParamCell::from_fn(kind, ParamSpace::single(d), one.clone(), one.clone(), |k| {
            Ok(UncertainValue::distribution([
                (feasible.clone(), likelihoods[k]),
                (infeasible.clone(), 1.0 - likelihoods[k]),
            ])?)
        })
        .unwrap()
    }

    fn obs(feasible: bool) -> Observation {
        Observation {
            x: 0,
            f: 0,
            r: 0,
            feasible,
        }
    }

    #[test]
    fn bayes_rule_arithmetic() {
        let cell = bayes_cell(&[0.8, 0.2]);
        let post = bayes_update(&cell, 0, &[0.5, 0.5], &[obs(true)]).unwrap();
        assert!((post.probs[0] - 0.8).abs() < 1e-12 && (post.probs[1] - 0.2).abs() < 1e-12);
        let post = bayes_update(&bayes_cell(&[1.0, 0.0]), 0, &[0.5, 0.5], &[obs(true)]).unwrap();
        assert_eq!(post.probs, [1.0, 0.0]);
        let flat = bayes_update(
            &bayes_cell(&[0.3, 0.3, 0.3]),
            0,
            &[0.2, 0.3, 0.5],
            &[obs(true), obs(false)],
        )
        .unwrap();
        for (a, b) in flat.probs.iter().zip([0.2, 0.3, 0.5]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(
            bayes_update(&bayes_cell(&[0.0, 0.0]), 0, &[0.5, 0.5], &[obs(true)]),
            Err(QueryError::ZeroEvidence)
        );
        assert!(matches!(
            bayes_update(&cell, 0, &[0.5, 0.6], &[]),
            Err(QueryError::BadPrior(_))
        ));
    }

    #[test]
    fn fit_examples() {
        let phi = Formula::parse("theta * v").unwrap();
        let grid = ThetaGrid {
            axes: vec![GridAxis::ascending("theta", vec![int(1), int(2), int(3)]).unwrap()],
        };
        let data = [FitDatum {
            inputs: BTreeMap::from([("v".to_string(), int(1))]),
            resource: int(2),
        }];
        let ls = fit_threshold(&phi, &grid, &data, FitMode::LeastSquares, None).unwrap();
        assert_eq!(ls.theta["theta"], int(2));
        assert_eq!(ls.loss, int(0));
        let c = fit_threshold(&phi, &grid, &data, FitMode::Constrained, None).unwrap();
        assert_eq!((c.theta["theta"].clone(), c.feasible_points), (int(2), 2));
        // A complexity-only metric picks the smallest feasible theta.
        let metric = Formula::parse("theta").unwrap();
        let m = fit_threshold(&phi, &grid, &data, FitMode::Constrained, Some(&metric)).unwrap();
        assert_eq!(m.theta["theta"], int(1));
        let tight = [FitDatum {
            inputs: BTreeMap::from([("v".to_string(), int(1))]),
            resource: int(0),
        }];
        assert_eq!(
            fit_threshold(&phi, &grid, &tight, FitMode::Constrained, None),
            Err(QueryError::EmptyFeasibleSet)
        );
    }
}

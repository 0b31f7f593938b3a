//! Seeded generators for random posets, design problems and uncertain values.
//! Used by the law suites and the CLI; every stream is reproducible from its seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{BitMatrix, BitRow};
use crate::dp::DesignProblem;
use crate::monad::{MonadKind, UncertainValue};
use crate::para::{ParamCell, ParamFactor, ParamSpace, Repar};
use crate::poset::{grid_poset, FinPoset, GridAxis, Label};
use crate::rational::int;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A poset on `n` numbered elements; each pair `i < j` is related with probability `density`.
pub fn random_poset(n: usize, density: f64, rng: &mut impl Rng) -> FinPoset {
    let labels = (0..n as i64).map(Label::from).collect();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|_| rng.random_bool(density))
        .collect();
    FinPoset::new(labels, &pairs).expect("forward edges cannot form a cycle")
}

/// A grid with `1..=max_axes` ascending axes of `1..=max_points` integer points.
pub fn random_grid(prefix: &str, max_axes: usize, max_points: usize, rng: &mut impl Rng) -> FinPoset {
    let axes: Vec<GridAxis> = (0..rng.random_range(1..=max_axes))
        .map(|k| {
            let n = rng.random_range(1..=max_points) as i64;
            GridAxis::ascending(format!("{prefix}{k}"), (0..n).map(int).collect()).expect("valid axis")
        })
        .collect();
    grid_poset(&axes).expect("nonempty axes")
}

/// A random monotone feasibility relation: the monotone closure of random generator pairs.
pub fn random_dp(fun: &FinPoset, res: &FinPoset, density: f64, rng: &mut impl Rng) -> DesignProblem {
    let mut rows = vec![BitRow::new(res.len()); fun.len()];
    for f in 0..fun.len() {
        for r in 0..res.len() {
            if rng.random_bool(density) {
                for below in fun.down_set(f).iter() {
                    rows[below].union_with(res.up_set(r));
                }
            }
        }
    }
    DesignProblem::new(fun.clone(), res.clone(), BitMatrix::from_rows(res.len(), rows)).expect("closure is monotone")
}

/// A chain of `k` random problems `lo ≤ ... ≤ hi` in the pointwise order.
pub fn random_dp_chain(fun: &FinPoset, res: &FinPoset, k: usize, rng: &mut impl Rng) -> Vec<DesignProblem> {
    let mut out: Vec<DesignProblem> = Vec::with_capacity(k);
    let mut current = random_dp(fun, res, 0.15, rng);
    for _ in 0..k {
        out.push(current.clone());
        let extra = random_dp(fun, res, 0.1, rng);
        let rows: Vec<BitRow> = (0..fun.len())
            .map(|f| {
                let mut row = current.feasible_row(f).clone();
                row.union_with(extra.feasible_row(f));
                row
            })
            .collect();
        current = DesignProblem::new(fun.clone(), res.clone(), BitMatrix::from_rows(res.len(), rows))
            .expect("union of monotone relations is monotone");
    }
    out
}

/// A random uncertain design problem of the given kind.
pub fn random_uncertain_dp(
    kind: MonadKind,
    fun: &FinPoset,
    res: &FinPoset,
    rng: &mut impl Rng,
) -> UncertainValue<DesignProblem> {
    match kind {
        MonadKind::Identity => UncertainValue::single(random_dp(fun, res, 0.2, rng)),
        MonadKind::Powerset => {
            let n = rng.random_range(1..=3);
            UncertainValue::set((0..n).map(|_| random_dp(fun, res, 0.2, rng))).expect("nonempty")
        }
        MonadKind::Interval => {
            let mut chain = random_dp_chain(fun, res, 2, rng);
            let hi = chain.pop().expect("two elements");
            let lo = chain.pop().expect("two elements");
            UncertainValue::interval(lo, hi, |a, b| a.leq(b).unwrap_or(false)).expect("ordered chain")
        }
        MonadKind::Distribution => {
            let n = rng.random_range(1..=3);
            let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
            let total: f64 = weights.iter().sum();
            UncertainValue::distribution(weights.into_iter().map(|w| (random_dp(fun, res, 0.2, rng), w / total)))
                .expect("normalized")
        }
    }
}

/// `0..=max_factors` unordered factors named `{prefix}{k}` with `1..=max_points` labels each.
pub fn random_param_space(prefix: &str, max_factors: usize, max_points: usize, rng: &mut impl Rng) -> ParamSpace {
    let factors = (0..rng.random_range(0..=max_factors))
        .map(|k| {
            let n = rng.random_range(1..=max_points) as i64;
            ParamFactor::new(format!("{prefix}{k}"), (0..n).map(Label::from).collect()).expect("nonempty")
        })
        .collect();
    ParamSpace::new(factors)
}

/// A cell with an independent random uncertain problem at every point.
pub fn random_cell(kind: MonadKind, dom: ParamSpace, src: &FinPoset, tgt: &FinPoset, rng: &mut impl Rng) -> ParamCell {
    ParamCell::from_fn(kind, dom, src.clone(), tgt.clone(), |_| {
        Ok(random_uncertain_dp(kind, src, tgt, rng))
    })
    .expect("random values are valid")
}

/// A random Kleisli map between parameter spaces, monotone in index order for intervals.
pub fn random_repar(kind: MonadKind, dom: &ParamSpace, cod: &ParamSpace, rng: &mut impl Rng) -> Repar {
    let values = crate::monad::laws::random_kleisli(kind, dom.len(), cod.len(), rng);
    Repar::new(kind, dom.clone(), cod.clone(), values).expect("in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_reproducible() {
        let p = random_poset(5, 0.4, &mut seeded(3));
        let q = random_poset(5, 0.4, &mut seeded(3));
        assert_eq!(p, q);
        let a = random_dp(&p, &q, 0.2, &mut seeded(9));
        let b = random_dp(&p, &q, 0.2, &mut seeded(9));
        assert_eq!(a, b);
    }

    #[test]
    fn dp_chain_is_ordered() {
        let p = random_poset(4, 0.5, &mut seeded(1));
        let chain = random_dp_chain(&p, &p, 4, &mut seeded(2));
        for w in chain.windows(2) {
            assert!(w[0].leq(&w[1]).unwrap());
        }
    }
}

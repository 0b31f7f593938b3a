//! Randomized checks of the symmetric monoidal monad laws on finite carriers.
//!
//! Carriers are `0..n`; interval instances treat them as chains so that the
//! sampled Kleisli maps can be monotone. Pairs are encoded row-major.

use rand::Rng;

use super::{MonadError, MonadKind, Payload, UncertainValue};
use crate::laws::LawReport;
use crate::random::seeded;

/// A deliberate implementation fault, to show the checker catches it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Interval multiplication returns `[c, b]` for `[[a,b],[c,d]]`.
    SwappedIntervalJoin,
}

#[derive(Clone, Debug)]
pub struct MonadLawConfig {
    pub samples: usize,
    /// Carriers are drawn with sizes `1..=max_carrier`.
    pub max_carrier: usize,
    pub tolerance: f64,
    pub fault: Option<Fault>,
}

impl Default for MonadLawConfig {
    fn default() -> Self {
        MonadLawConfig {
            samples: 200,
            max_carrier: 4,
            tolerance: super::MASS_TOLERANCE,
            fault: None,
        }
    }
}

type Value = UncertainValue<usize>;

pub(crate) fn random_value(kind: MonadKind, n: usize, rng: &mut impl Rng) -> Value {
    match kind {
        MonadKind::Identity => UncertainValue::single(rng.random_range(0..n)),
        MonadKind::Powerset => {
            let mut items: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
            if items.is_empty() {
                items.push(rng.random_range(0..n));
            }
            UncertainValue::set(items).expect("nonempty")
        }
        MonadKind::Interval => {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            UncertainValue::interval_unchecked(a.min(b), a.max(b))
        }
        MonadKind::Distribution => {
            let k = rng.random_range(1..=n);
            let weights: Vec<(usize, f64)> = (0..k)
                .map(|_| (rng.random_range(0..n), rng.random_range(0.05..1.0)))
                .collect();
            let total: f64 = weights.iter().map(|(_, w)| w).sum();
            UncertainValue::distribution(weights.into_iter().map(|(x, w)| (x, w / total))).expect("normalized")
        }
    }
}

fn sorted_random(len: usize, n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut v: Vec<usize> = (0..len).map(|_| rng.random_range(0..n)).collect();
    v.sort_unstable();
    v
}

/// A Kleisli map `0..from → M(0..to)`; monotone for intervals.
pub(crate) fn random_kleisli(kind: MonadKind, from: usize, to: usize, rng: &mut impl Rng) -> Vec<Value> {
    if kind == MonadKind::Interval {
        let lo = sorted_random(from, to, rng);
        let hi = sorted_random(from, to, rng);
        lo.into_iter()
            .zip(hi)
            .map(|(l, h)| UncertainValue::interval_unchecked(l, l.max(h)))
            .collect()
    } else {
        (0..from).map(|_| random_value(kind, to, rng)).collect()
    }
}

/// A plain map `0..from → 0..to`; monotone for intervals.
fn random_map(kind: MonadKind, from: usize, to: usize, rng: &mut impl Rng) -> Vec<usize> {
    if kind == MonadKind::Interval {
        sorted_random(from, to, rng)
    } else {
        (0..from).map(|_| rng.random_range(0..to)).collect()
    }
}

fn bind(fault: Option<Fault>, m: &Value, k: &[Value]) -> Value {
    match (fault, m.payload()) {
        (Some(Fault::SwappedIntervalJoin), Payload::Interval { lo, hi }) => {
            let (Payload::Interval { lo: c, .. }, Payload::Interval { hi: b, .. }) =
                (k[*hi].payload(), k[*lo].payload())
            else {
                unreachable!("interval continuation")
            };
            UncertainValue::interval_unchecked(*c, *b)
        }
        _ => m
            .bind(|&x| Ok::<_, MonadError>(k[x].clone()))
            .expect("continuation has the right kind"),
    }
}

fn zip(a: &Value, b: &Value, nb: usize) -> Value {
    a.zip_with(b, |&x, &y| Ok::<_, MonadError>(x * nb + y))
        .expect("same kind")
}

fn units(kind: MonadKind, n: usize) -> Vec<Value> {
    (0..n).map(|x| UncertainValue::unit(kind, x)).collect()
}

/// Runs every law on `config.samples` random instances.
pub fn check_monad_laws(kind: MonadKind, seed: u64, config: &MonadLawConfig) -> LawReport {
    let mut rng = seeded(seed);
    let tol = if kind == MonadKind::Distribution {
        config.tolerance
    } else {
        0.0
    };
    let fault = config.fault;
    let eq = |a: &Value, b: &Value| a.values_equal(b, tol).unwrap_or(false);
    let max = config.max_carrier.max(1);
    let mut report = LawReport::new(format!("monad.{kind}"));

    let size = |rng: &mut rand_chacha::ChaCha8Rng| rng.random_range(1..=max);

    let law = report.law("left unit");
    for _ in 0..config.samples {
        let (nx, ny) = (size(&mut rng), size(&mut rng));
        let x = rng.random_range(0..nx);
        let k = random_kleisli(kind, nx, ny, &mut rng);
        let lhs = bind(fault, &UncertainValue::unit(kind, x), &k);
        law.record(eq(&lhs, &k[x]), || format!("x={x}, k={k:?}: got {lhs:?}"));
    }

    let law = report.law("right unit");
    for _ in 0..config.samples {
        let nx = size(&mut rng);
        let m = random_value(kind, nx, &mut rng);
        let lhs = bind(fault, &m, &units(kind, nx));
        law.record(eq(&lhs, &m), || format!("m={m:?}: got {lhs:?}"));
    }

    let law = report.law("associativity");
    for _ in 0..config.samples {
        let (nx, ny, nz) = (size(&mut rng), size(&mut rng), size(&mut rng));
        let m = random_value(kind, nx, &mut rng);
        let k = random_kleisli(kind, nx, ny, &mut rng);
        let h = random_kleisli(kind, ny, nz, &mut rng);
        let lhs = bind(fault, &bind(fault, &m, &k), &h);
        let kh: Vec<Value> = k.iter().map(|kx| bind(fault, kx, &h)).collect();
        let rhs = bind(fault, &m, &kh);
        law.record(eq(&lhs, &rhs), || {
            format!("m={m:?}, k={k:?}, h={h:?}: {lhs:?} != {rhs:?}")
        });
    }

    let law = report.law("strength naturality");
    for _ in 0..config.samples {
        let (nx, ny, nx2, ny2) = (size(&mut rng), size(&mut rng), size(&mut rng), size(&mut rng));
        let m1 = random_value(kind, nx, &mut rng);
        let m2 = random_value(kind, ny, &mut rng);
        let h = random_map(kind, nx, nx2, &mut rng);
        let g = random_map(kind, ny, ny2, &mut rng);
        let lhs = zip(&m1.map(|&x| h[x]), &m2.map(|&y| g[y]), ny2);
        let rhs = zip(&m1, &m2, ny).map(|&p| h[p / ny] * ny2 + g[p % ny]);
        law.record(eq(&lhs, &rhs), || format!("m1={m1:?}, m2={m2:?}, h={h:?}, g={g:?}"));
    }

    let law = report.law("unit monoidal");
    for _ in 0..config.samples {
        let (nx, ny) = (size(&mut rng), size(&mut rng));
        let (x, y) = (rng.random_range(0..nx), rng.random_range(0..ny));
        let lhs = zip(&UncertainValue::unit(kind, x), &UncertainValue::unit(kind, y), ny);
        law.record(eq(&lhs, &UncertainValue::unit(kind, x * ny + y)), || {
            format!("x={x}, y={y}: {lhs:?}")
        });
    }

    let law = report.law("multiplication monoidal");
    for _ in 0..config.samples {
        let (na, nb, nx, ny) = (size(&mut rng), size(&mut rng), size(&mut rng), size(&mut rng));
        let m1 = random_value(kind, na, &mut rng);
        let m2 = random_value(kind, nb, &mut rng);
        let k1 = random_kleisli(kind, na, nx, &mut rng);
        let k2 = random_kleisli(kind, nb, ny, &mut rng);
        let lhs = zip(&bind(fault, &m1, &k1), &bind(fault, &m2, &k2), ny);
        let k12: Vec<Value> = (0..na * nb).map(|p| zip(&k1[p / nb], &k2[p % nb], ny)).collect();
        let rhs = bind(fault, &zip(&m1, &m2, nb), &k12);
        law.record(eq(&lhs, &rhs), || {
            format!("m1={m1:?}, m2={m2:?}, k1={k1:?}, k2={k2:?}: {lhs:?} != {rhs:?}")
        });
    }

    let law = report.law("strength associativity");
    for _ in 0..config.samples {
        let (nx, ny, nz) = (size(&mut rng), size(&mut rng), size(&mut rng));
        let m1 = random_value(kind, nx, &mut rng);
        let m2 = random_value(kind, ny, &mut rng);
        let m3 = random_value(kind, nz, &mut rng);
        let lhs = zip(&zip(&m1, &m2, ny), &m3, nz);
        let rhs = zip(&m1, &zip(&m2, &m3, nz), ny * nz);
        law.record(eq(&lhs, &rhs), || format!("m1={m1:?}, m2={m2:?}, m3={m3:?}"));
    }

    let law = report.law("strength symmetry");
    for _ in 0..config.samples {
        let (nx, ny) = (size(&mut rng), size(&mut rng));
        let m1 = random_value(kind, nx, &mut rng);
        let m2 = random_value(kind, ny, &mut rng);
        let lhs = zip(&m1, &m2, ny).map(|&p| (p % ny) * nx + p / ny);
        let rhs = zip(&m2, &m1, nx);
        law.record(eq(&lhs, &rhs), || format!("m1={m1:?}, m2={m2:?}"));
    }

    let law = report.law("affine");
    for _ in 0..config.samples {
        let m = random_value(kind, 1, &mut rng);
        law.record(eq(&m, &UncertainValue::unit(kind, 0)), || format!("{m:?}"));
    }

    let law = report.law("unit injective");
    for _ in 0..config.samples {
        let n = size(&mut rng);
        let (x, y) = (rng.random_range(0..n), rng.random_range(0..n));
        let same = eq(&UncertainValue::unit(kind, x), &UncertainValue::unit(kind, y));
        law.record(same == (x == y), || format!("x={x}, y={y}"));
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_kinds_pass() {
        for kind in MonadKind::ALL {
            let report = check_monad_laws(kind, 0, &MonadLawConfig::default());
            assert!(report.all_passed(), "{report}");
            assert!(report.outcomes.iter().all(|o| o.instances >= 200));
        }
    }

    #[test]
    fn distribution_on_three_points() {
        let config = MonadLawConfig {
            samples: 50,
            max_carrier: 3,
            ..MonadLawConfig::default()
        };
        assert!(check_monad_laws(MonadKind::Distribution, 7, &config).all_passed());
    }

    #[test]
    fn swapped_interval_join_is_caught() {
        let config = MonadLawConfig {
            samples: 100,
            max_carrier: 2,
            fault: Some(Fault::SwappedIntervalJoin),
            ..MonadLawConfig::default()
        };
        let report = check_monad_laws(MonadKind::Interval, 0, &config);
        let assoc = report.outcome("associativity").unwrap();
        assert!(!assoc.passed);
        assert!(assoc.witness.is_some());
        // The fault only concerns intervals.
        let other = check_monad_laws(MonadKind::Powerset, 0, &config);
        assert!(other.all_passed());
    }

    #[test]
    fn deterministic_given_seed() {
        let config = MonadLawConfig::default();
        let a = check_monad_laws(MonadKind::Distribution, 42, &config).to_string();
        let b = check_monad_laws(MonadKind::Distribution, 42, &config).to_string();
        assert_eq!(a, b);
    }
}

//! Law suites for design problems and for parametrized cells.

use rand::Rng;

use crate::dp::DesignProblem;
use crate::enumerate::{all_dps, labelled_posets, posets_up_to_iso};
use crate::laws::LawReport;
use crate::monad::{MonadKind, UncertainValue};
use crate::para::{check_2cell, coherence_cell, tensorator, Coherence, ParamCell, ParamFactor, ParamSpace, Repar};
use crate::poset::FinPoset;
use crate::random::{random_cell, random_dp, random_dp_chain, random_param_space, random_poset, random_repar, seeded};

#[derive(Clone, Debug)]
pub struct DpLawConfig {
    /// Random instances per law.
    pub samples: usize,
    /// Largest random poset.
    pub max_size: usize,
    /// Posets up to this size (up to isomorphism) are checked exhaustively.
    pub exhaustive_size: usize,
    /// Snake equations are checked on every labelled poset up to this size.
    pub snake_size: usize,
}

impl Default for DpLawConfig {
    fn default() -> Self {
        DpLawConfig {
            samples: 500,
            max_size: 5,
            exhaustive_size: 2,
            snake_size: 4,
        }
    }
}

fn small_posets(max: usize) -> Vec<FinPoset> {
    (0..=max).flat_map(posets_up_to_iso).collect()
}

fn interchange(a: &[&DesignProblem; 4]) -> (DesignProblem, DesignProblem) {
    let [f1, g1, f2, g2] = *a;
    let lhs = f1
        .compose(g1)
        .expect("composable")
        .tensor(&f2.compose(g2).expect("composable"));
    let rhs = f1.tensor(f2).compose(&g1.tensor(g2)).expect("composable");
    (lhs, rhs)
}

fn snakes(p: &FinPoset) -> (bool, bool) {
    let id = DesignProblem::identity;
    let p_op = p.opposite();
    let first = id(p)
        .tensor(&DesignProblem::cap(p))
        .compose(&DesignProblem::cup(p).tensor(&id(p)))
        .expect("snake types")
        == id(p);
    // The mirrored snake is the same zig-zag on the dual object.
    let second = DesignProblem::cap(p)
        .tensor(&id(&p_op))
        .compose(&id(&p_op).tensor(&DesignProblem::cup(p)))
        .expect("snake types")
        == id(&p_op);
    (first, second)
}

/// Category, monoidal, compact closed and enrichment laws of design problems.
pub fn check_dp_laws(seed: u64, config: &DpLawConfig) -> LawReport {
    let mut rng = seeded(seed);
    let mut report = LawReport::new("dp");
    let posets = small_posets(config.exhaustive_size);
    // homs[i][j] = every problem posets[i] -> posets[j]
    let homs: Vec<Vec<Vec<DesignProblem>>> = posets
        .iter()
        .map(|p| posets.iter().map(|q| all_dps(p, q)).collect())
        .collect();
    let n = posets.len();
    let composable: Vec<(&DesignProblem, &DesignProblem)> = (0..n)
        .flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
        .flat_map(|(i, j, k)| {
            let homs = &homs;
            homs[i][j]
                .iter()
                .flat_map(move |f| homs[j][k].iter().map(move |g| (f, g)))
        })
        .collect();
    let random_posets = |rng: &mut rand_chacha::ChaCha8Rng, k: usize| -> Vec<FinPoset> {
        (0..k)
            .map(|_| {
                let size = rng.random_range(1..=config.max_size);
                let density = rng.random_range(0.0..0.7);
                random_poset(size, density, rng)
            })
            .collect()
    };

    let law = report.law("associativity");
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    for f in &homs[i][j] {
                        for g in &homs[j][k] {
                            let fg = f.compose(g).expect("composable");
                            for h in &homs[k][l] {
                                let lhs = fg.compose(h).expect("composable");
                                let rhs = f.compose(&g.compose(h).expect("composable")).expect("composable");
                                law.record(lhs == rhs, || format!("{f:?} ; {g:?} ; {h:?}"));
                            }
                        }
                    }
                }
            }
        }
    }
    for _ in 0..config.samples {
        let ps = random_posets(&mut rng, 4);
        let f = random_dp(&ps[0], &ps[1], 0.2, &mut rng);
        let g = random_dp(&ps[1], &ps[2], 0.2, &mut rng);
        let h = random_dp(&ps[2], &ps[3], 0.2, &mut rng);
        let lhs = f.compose(&g).and_then(|fg| fg.compose(&h)).expect("composable");
        let rhs = g.compose(&h).and_then(|gh| f.compose(&gh)).expect("composable");
        law.record(lhs == rhs, || format!("{f:?} ; {g:?} ; {h:?}"));
    }

    let law = report.law("unitality");
    for row in &homs {
        for f in row.iter().flatten() {
            let left = DesignProblem::identity(f.fun()).compose(f).expect("composable");
            let right = f.compose(&DesignProblem::identity(f.res())).expect("composable");
            law.record(&left == f && &right == f, || format!("{f:?}"));
        }
    }
    for _ in 0..config.samples {
        let ps = random_posets(&mut rng, 2);
        let f = random_dp(&ps[0], &ps[1], 0.2, &mut rng);
        let left = DesignProblem::identity(f.fun()).compose(&f).expect("composable");
        let right = f.compose(&DesignProblem::identity(f.res())).expect("composable");
        law.record(left == f && right == f, || format!("{f:?}"));
    }

    let law = report.law("interchange");
    for &(f1, g1) in &composable {
        for &(f2, g2) in &composable {
            let (lhs, rhs) = interchange(&[f1, g1, f2, g2]);
            law.record(lhs == rhs, || format!("{f1:?}, {g1:?}, {f2:?}, {g2:?}"));
        }
    }
    for _ in 0..config.samples {
        let ps = random_posets(&mut rng, 6);
        let f1 = random_dp(&ps[0], &ps[1], 0.2, &mut rng);
        let g1 = random_dp(&ps[1], &ps[2], 0.2, &mut rng);
        let f2 = random_dp(&ps[3], &ps[4], 0.2, &mut rng);
        let g2 = random_dp(&ps[4], &ps[5], 0.2, &mut rng);
        let (lhs, rhs) = interchange(&[&f1, &g1, &f2, &g2]);
        law.record(lhs == rhs, || format!("{f1:?}, {g1:?}, {f2:?}, {g2:?}"));
    }

    let law = report.law("symmetry naturality");
    let sym_natural = |f: &DesignProblem, g: &DesignProblem| {
        let lhs = f
            .tensor(g)
            .compose(&DesignProblem::symmetry(f.res(), g.res()))
            .expect("composable");
        let rhs = DesignProblem::symmetry(f.fun(), g.fun())
            .compose(&g.tensor(f))
            .expect("composable");
        lhs == rhs
    };
    let all_homs: Vec<&DesignProblem> = homs.iter().flatten().flatten().collect();
    for f in &all_homs {
        for g in &all_homs {
            law.record(sym_natural(f, g), || format!("{f:?}, {g:?}"));
        }
    }
    for _ in 0..config.samples {
        let ps = random_posets(&mut rng, 4);
        let f = random_dp(&ps[0], &ps[1], 0.2, &mut rng);
        let g = random_dp(&ps[2], &ps[3], 0.2, &mut rng);
        law.record(sym_natural(&f, &g), || format!("{f:?}, {g:?}"));
    }

    let law = report.law("symmetry involution");
    for _ in 0..config.samples {
        let ps = random_posets(&mut rng, 2);
        let twice = DesignProblem::symmetry(&ps[0], &ps[1])
            .compose(&DesignProblem::symmetry(&ps[1], &ps[0]))
            .expect("composable");
        law.record(twice == DesignProblem::identity(&ps[0].product(&ps[1])), || {
            format!("{} x {}", ps[0], ps[1])
        });
    }

    let (law_a, law_b) = ("snake", "mirrored snake");
    let mut results = Vec::new();
    for size in 0..=config.snake_size {
        for p in labelled_posets(size) {
            results.push((p.clone(), snakes(&p)));
        }
    }
    for _ in 0..config.samples {
        let p = random_posets(&mut rng, 1).remove(0);
        results.push((p.clone(), snakes(&p)));
    }
    let law = report.law(law_a);
    for (p, (first, _)) in &results {
        law.record(*first, || format!("{p:?}"));
    }
    let law = report.law(law_b);
    for (p, (_, second)) in &results {
        law.record(*second, || format!("{p:?}"));
    }

    let law = report.law("enrichment monotonicity");
    let monotone = |f: &DesignProblem, f2: &DesignProblem, g: &DesignProblem| {
        let composes = f
            .compose(g)
            .expect("composable")
            .leq(&f2.compose(g).expect("composable"));
        let left = g.compose(f).ok().map(|a| a.leq(&g.compose(f2).expect("same types")));
        let tensors = f.tensor(g).leq(&f2.tensor(g));
        composes == Ok(true) && left.is_none_or(|x| x == Ok(true)) && tensors == Ok(true)
    };
    for &(f, g) in &composable {
        for f2 in &homs[posets.iter().position(|p| p == f.fun()).expect("listed")]
            [posets.iter().position(|p| p == f.res()).expect("listed")]
        {
            if f.leq(f2) == Ok(true) {
                law.record(monotone(f, f2, g), || format!("{f:?} <= {f2:?}, {g:?}"));
            }
        }
    }
    for _ in 0..config.samples {
        let ps = random_posets(&mut rng, 2);
        let chain = random_dp_chain(&ps[0], &ps[1], 2, &mut rng);
        let g = random_dp(&ps[1], &ps[1], 0.2, &mut rng);
        law.record(monotone(&chain[0], &chain[1], &g), || {
            format!("{:?} <= {:?}, {g:?}", chain[0], chain[1])
        });
    }

    report
}

#[derive(Clone, Debug)]
pub struct ParaLawConfig {
    /// Random instances (cell triples, quadruples, DP pairs) per law.
    pub samples: usize,
    pub max_factors: usize,
    pub max_points: usize,
    /// Largest interface poset.
    pub max_size: usize,
    /// Snake equations inside cells are checked on every labelled poset up to this size.
    pub snake_size: usize,
    pub tolerance: f64,
}

impl Default for ParaLawConfig {
    fn default() -> Self {
        ParaLawConfig {
            samples: 100,
            max_factors: 2,
            max_points: 2,
            max_size: 3,
            snake_size: 3,
            tolerance: crate::monad::MASS_TOLERANCE,
        }
    }
}

/// A monotone cell on an ordered chain parameter: an ascending chain of problems.
fn monotone_cell(kind: MonadKind, name: &str, src: &FinPoset, tgt: &FinPoset, rng: &mut impl Rng) -> ParamCell {
    let n = rng.random_range(1..=3);
    let order = FinPoset::chain((0..n as i64).map(Into::into).collect()).expect("chain");
    let dom = ParamSpace::single(ParamFactor::ordered(name, &order).expect("nonempty"));
    let chain = random_dp_chain(src, tgt, n + 1, rng);
    ParamCell::from_fn(kind, dom, src.clone(), tgt.clone(), |i| {
        Ok(match kind {
            MonadKind::Interval => UncertainValue::interval_unchecked(chain[i].clone(), chain[i + 1].clone()),
            _ => UncertainValue::single(chain[i].clone()),
        })
    })
    .expect("monotone by construction")
}

/// The 2-category laws of parametrized cells of one monad kind.
pub fn check_para_laws(kind: MonadKind, seed: u64, config: &ParaLawConfig) -> LawReport {
    let mut rng = seeded(seed);
    let tol = if kind == MonadKind::Distribution {
        config.tolerance
    } else {
        0.0
    };
    let mut report = LawReport::new(format!("para.{kind}"));
    let eq = |a: &ParamCell, b: &ParamCell| a.values_equal(b, tol).unwrap_or(false);
    let (mf, mp, ms) = (config.max_factors, config.max_points, config.max_size);
    let poset = |rng: &mut rand_chacha::ChaCha8Rng| {
        let n = rng.random_range(1..=ms);
        random_poset(n, 0.5, rng)
    };
    let space = |prefix: &str, rng: &mut rand_chacha::ChaCha8Rng| random_param_space(prefix, mf, mp, rng);

    let law = report.law("hcompose associativity");
    for _ in 0..config.samples {
        let ps: Vec<FinPoset> = (0..4).map(|_| poset(&mut rng)).collect();
        let f = random_cell(kind, space("u", &mut rng), &ps[0], &ps[1], &mut rng);
        let g = random_cell(kind, space("v", &mut rng), &ps[1], &ps[2], &mut rng);
        let h = random_cell(kind, space("w", &mut rng), &ps[2], &ps[3], &mut rng);
        let lhs = f.hcompose(&g).and_then(|fg| fg.hcompose(&h)).expect("composable");
        let rhs = g.hcompose(&h).and_then(|gh| f.hcompose(&gh)).expect("composable");
        law.record(eq(&lhs, &rhs), || format!("{f:?}, {g:?}, {h:?}"));
    }

    let law = report.law("hcompose unitality");
    for _ in 0..config.samples {
        let (p, q) = (poset(&mut rng), poset(&mut rng));
        let f = random_cell(kind, space("u", &mut rng), &p, &q, &mut rng);
        let left = ParamCell::identity(kind, &p).hcompose(&f).expect("composable");
        let right = f.hcompose(&ParamCell::identity(kind, &q)).expect("composable");
        law.record(eq(&left, &f) && eq(&right, &f), || format!("{f:?}"));
    }

    let law = report.law("interchange up to tensorator");
    for _ in 0..config.samples {
        let ps: Vec<FinPoset> = (0..6).map(|_| poset(&mut rng)).collect();
        let f1 = random_cell(kind, space("a", &mut rng), &ps[0], &ps[1], &mut rng);
        let g1 = random_cell(kind, space("b", &mut rng), &ps[1], &ps[2], &mut rng);
        let f2 = random_cell(kind, space("c", &mut rng), &ps[3], &ps[4], &mut rng);
        let g2 = random_cell(kind, space("d", &mut rng), &ps[4], &ps[5], &mut rng);
        let lhs = f1
            .tensor(&f2)
            .and_then(|f| g1.tensor(&g2).and_then(|g| f.hcompose(&g)))
            .expect("composable");
        let rhs = f1
            .hcompose(&g1)
            .and_then(|a| f2.hcompose(&g2).and_then(|b| a.tensor(&b)))
            .expect("composable");
        let m = tensorator(&f1, &f2, &g1, &g2).expect("composable");
        let holds = m.is_invertible() && check_2cell(&m, &lhs, &rhs, tol).is_ok_and(|c| c.holds());
        law.record(holds, || format!("{f1:?}, {g1:?}, {f2:?}, {g2:?}"));
    }

    let law = report.law("inclusion strictness");
    for _ in 0..config.samples {
        let ps: Vec<FinPoset> = (0..3).map(|_| poset(&mut rng)).collect();
        let f = random_dp(&ps[0], &ps[1], 0.3, &mut rng);
        let g = random_dp(&ps[1], &ps[2], 0.3, &mut rng);
        let inc = |d: DesignProblem| ParamCell::include(kind, d);
        let composes = inc(f.clone()).hcompose(&inc(g.clone())).ok() == Some(inc(f.compose(&g).expect("composable")));
        let tensors = inc(f.clone()).tensor(&inc(g.clone())).ok() == Some(inc(f.tensor(&g)));
        let coherent = coherence_cell(kind, &Coherence::Sym(ps[0].clone(), ps[1].clone()))
            == inc(DesignProblem::symmetry(&ps[0], &ps[1]))
            && coherence_cell(kind, &Coherence::Assoc(ps[0].clone(), ps[1].clone(), ps[2].clone()))
                == inc(DesignProblem::identity(&ps[0].product(&ps[1]).product(&ps[2])))
            && coherence_cell(kind, &Coherence::LeftUnit(ps[0].clone())) == ParamCell::identity(kind, &ps[0])
            && coherence_cell(kind, &Coherence::RightUnit(ps[0].clone())) == ParamCell::identity(kind, &ps[0]);
        let faithful = (inc(f.clone()) == inc(g.clone())) == (f == g);
        law.record(composes && tensors && coherent && faithful, || format!("{f:?}, {g:?}"));
    }

    let law = report.law("symmetry involution");
    for _ in 0..config.samples {
        let (p, q) = (poset(&mut rng), poset(&mut rng));
        let s = coherence_cell(kind, &Coherence::Sym(p.clone(), q.clone()));
        let back = coherence_cell(kind, &Coherence::Sym(q.clone(), p.clone()));
        let twice = s.hcompose(&back).expect("composable");
        law.record(twice == ParamCell::identity(kind, &p.product(&q)), || {
            format!("{p} x {q}")
        });
    }

    let law = report.law("symmetry naturality up to swap");
    for _ in 0..config.samples {
        let ps: Vec<FinPoset> = (0..4).map(|_| poset(&mut rng)).collect();
        let f1 = random_cell(kind, space("u", &mut rng), &ps[0], &ps[1], &mut rng);
        let f2 = random_cell(kind, space("v", &mut rng), &ps[2], &ps[3], &mut rng);
        let sym = |a: &FinPoset, b: &FinPoset| coherence_cell(kind, &Coherence::Sym(a.clone(), b.clone()));
        let lhs = f1
            .tensor(&f2)
            .and_then(|t| t.hcompose(&sym(&ps[1], &ps[3])))
            .expect("composable");
        let rhs = sym(&ps[0], &ps[2])
            .hcompose(&f2.tensor(&f1).expect("same kind"))
            .expect("composable");
        let swap = Repar::swap(kind, f1.dom(), f2.dom());
        let holds = check_2cell(&swap, &lhs, &rhs, tol).is_ok_and(|c| c.holds());
        law.record(holds, || format!("{f1:?}, {f2:?}"));
    }

    let law = report.law("snake");
    for size in 0..=config.snake_size {
        for p in labelled_posets(size) {
            let id = ParamCell::identity(kind, &p);
            let cap = ParamCell::include(kind, DesignProblem::cap(&p));
            let cup = ParamCell::include(kind, DesignProblem::cup(&p));
            let snake = id
                .tensor(&cap)
                .and_then(|a| cup.tensor(&id).and_then(|b| a.hcompose(&b)))
                .expect("snake types");
            law.record(snake == id, || format!("{p:?}"));
        }
    }

    let law = report.law("2-cell closure");
    for _ in 0..config.samples {
        let ps: Vec<FinPoset> = (0..3).map(|_| poset(&mut rng)).collect();
        let g1 = random_cell(kind, space("b", &mut rng), &ps[0], &ps[1], &mut rng);
        let g2 = random_cell(kind, space("d", &mut rng), &ps[1], &ps[2], &mut rng);
        let a1 = space("a", &mut rng);
        let a2 = space("c", &mut rng);
        let phi1 = random_repar(kind, &a1, g1.dom(), &mut rng);
        let phi2 = random_repar(kind, &a2, g2.dom(), &mut rng);
        let f1 = g1.reparametrize(&phi1).expect("matching spaces");
        let f2 = g2.reparametrize(&phi2).expect("matching spaces");
        let phi = phi1.tensor(&phi2).expect("same kind");
        let holds = |f: Result<ParamCell, _>, g: Result<ParamCell, _>| match (f, g) {
            (Ok(f), Ok(g)) => check_2cell(&phi, &f, &g, tol).is_ok_and(|c| c.holds()),
            _ => false,
        };
        let series = holds(f1.hcompose(&f2), g1.hcompose(&g2));
        let parallel = holds(f1.tensor(&f2), g1.tensor(&g2));
        law.record(series && parallel, || format!("{phi1:?}, {phi2:?}, {g1:?}, {g2:?}"));
    }

    let law = report.law("vcompose associativity");
    for _ in 0..config.samples {
        let spaces: Vec<ParamSpace> = (0..4).map(|k| space(&format!("s{k}_"), &mut rng)).collect();
        let r: Vec<Repar> = (0..3)
            .map(|k| random_repar(kind, &spaces[k], &spaces[k + 1], &mut rng))
            .collect();
        let lhs = r[0]
            .vcompose(&r[1])
            .and_then(|a| a.vcompose(&r[2]))
            .expect("composable");
        let rhs = r[1]
            .vcompose(&r[2])
            .and_then(|b| r[0].vcompose(&b))
            .expect("composable");
        let holds = lhs
            .map()
            .values()
            .iter()
            .zip(rhs.map().values())
            .all(|(a, b)| a.values_equal(b, tol).unwrap_or(false));
        law.record(holds, || format!("{r:?}"));
    }

    if matches!(kind, MonadKind::Identity | MonadKind::Interval) {
        let law = report.law("monotone cells compose");
        for _ in 0..config.samples {
            let ps: Vec<FinPoset> = (0..3).map(|_| poset(&mut rng)).collect();
            let f = monotone_cell(kind, "s", &ps[0], &ps[1], &mut rng);
            let g = monotone_cell(kind, "t", &ps[1], &ps[2], &mut rng);
            let series = f.hcompose(&g).is_ok_and(|c| c.is_monotone());
            let parallel = f.tensor(&g).is_ok_and(|c| c.is_monotone());
            law.record(series && parallel, || format!("{f:?}, {g:?}"));
        }
    }

    report
}

/// Per-law cap on the instances drawn from a bundle's own problems and cells.
const INSTANCE_CAP: usize = 2000;

/// The category and compact closed laws on concrete problems, cells and posets
/// (e.g. those of a problem bundle): every composable pair or triple up to a cap.
pub fn check_instance_laws(
    kind: MonadKind,
    posets: &[FinPoset],
    dps: &[DesignProblem],
    cells: &[ParamCell],
    tolerance: f64,
) -> LawReport {
    let mut report = LawReport::new(format!("bundle.{kind}"));
    let tol = if kind == MonadKind::Distribution {
        tolerance
    } else {
        0.0
    };
    let eq = |a: &ParamCell, b: &ParamCell| a.values_equal(b, tol).unwrap_or(false);

    let law = report.law("dp unitality");
    for f in dps {
        let left = DesignProblem::identity(f.fun()).compose(f).expect("composable");
        let right = f.compose(&DesignProblem::identity(f.res())).expect("composable");
        law.record(&left == f && &right == f, || format!("{f:?}"));
    }

    let law = report.law("dp associativity");
    'triples: for f in dps {
        for g in dps.iter().filter(|g| g.fun() == f.res()) {
            let fg = f.compose(g).expect("composable");
            for h in dps.iter().filter(|h| h.fun() == g.res()) {
                if law.instances >= INSTANCE_CAP {
                    break 'triples;
                }
                let rhs = f.compose(&g.compose(h).expect("composable")).expect("composable");
                law.record(fg.compose(h).expect("composable") == rhs, || {
                    format!("{f:?} ; {g:?} ; {h:?}")
                });
            }
        }
    }

    let law = report.law("dp interchange");
    let pairs: Vec<(&DesignProblem, &DesignProblem)> = dps
        .iter()
        .flat_map(|f| dps.iter().filter(move |g| g.fun() == f.res()).map(move |g| (f, g)))
        .filter(|(f, g)| f.fun().len() * g.res().len() <= 256)
        .collect();
    'quads: for &(f1, g1) in &pairs {
        for &(f2, g2) in &pairs {
            if law.instances >= INSTANCE_CAP {
                break 'quads;
            }
            let (lhs, rhs) = interchange(&[f1, g1, f2, g2]);
            law.record(lhs == rhs, || format!("{f1:?}, {g1:?}, {f2:?}, {g2:?}"));
        }
    }

    let results: Vec<(&FinPoset, (bool, bool))> = posets
        .iter()
        .filter(|p| p.len() <= 64)
        .map(|p| (p, snakes(p)))
        .collect();
    let law = report.law("snake");
    for (p, (a, _)) in &results {
        law.record(*a, || p.to_string());
    }
    let law = report.law("mirrored snake");
    for (p, (_, b)) in &results {
        law.record(*b, || p.to_string());
    }

    let law = report.law("cell unitality");
    for f in cells.iter().filter(|c| c.kind() == kind) {
        let left = ParamCell::identity(kind, f.src()).hcompose(f).expect("composable");
        let right = f.hcompose(&ParamCell::identity(kind, f.tgt())).expect("composable");
        law.record(eq(&left, f) && eq(&right, f), || format!("{f:?}"));
    }

    let law = report.law("cell associativity");
    let cells: Vec<&ParamCell> = cells
        .iter()
        .filter(|c| c.kind() == kind && c.dom().len() <= 16)
        .collect();
    'cells: for f in &cells {
        for g in cells.iter().filter(|g| g.src() == f.tgt()) {
            for h in cells.iter().filter(|h| h.src() == g.tgt()) {
                if law.instances >= INSTANCE_CAP / 10 {
                    break 'cells;
                }
                let lhs = f.hcompose(g).and_then(|fg| fg.hcompose(h));
                let rhs = g.hcompose(h).and_then(|gh| f.hcompose(&gh));
                let holds = matches!((&lhs, &rhs), (Ok(a), Ok(b)) if eq(a, b));
                law.record(holds, || format!("{f:?}, {g:?}, {h:?}"));
            }
        }
    }

    let law = report.law("inclusion strictness");
    'incl: for f in dps {
        for g in dps.iter().filter(|g| g.fun() == f.res()) {
            if law.instances >= INSTANCE_CAP {
                break 'incl;
            }
            let direct = ParamCell::include(kind, f.compose(g).expect("composable"));
            let composed = ParamCell::include(kind, f.clone())
                .hcompose(&ParamCell::include(kind, g.clone()))
                .expect("composable");
            law.record(eq(&direct, &composed), || format!("{f:?} ; {g:?}"));
        }
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dp_laws_hold_on_a_small_budget() {
        let config = DpLawConfig {
            samples: 20,
            max_size: 3,
            exhaustive_size: 2,
            snake_size: 3,
        };
        let report = check_dp_laws(0, &config);
        assert!(report.all_passed(), "{report}");
    }

    #[test]
    fn para_laws_hold_on_a_small_budget() {
        let config = ParaLawConfig {
            samples: 10,
            ..ParaLawConfig::default()
        };
        for kind in MonadKind::ALL {
            let report = check_para_laws(kind, 1, &config);
            assert!(report.all_passed(), "{report}");
        }
    }
}

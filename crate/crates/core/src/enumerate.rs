//! Exhaustive enumeration of small posets and of every design problem between them.

use crate::bits::BitMatrix;
use crate::dp::DesignProblem;
use crate::poset::{FinPoset, Label};

/// Every partial order on the labels `0..n` (labelled, so isomorphic copies repeat).
pub fn labelled_posets(n: usize) -> Vec<FinPoset> {
    assert!(n <= 5, "too many posets to enumerate");
    let labels: Vec<Label> = (0..n as i64).map(Label::from).collect();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let chosen: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask & (1 << k) != 0)
            .map(|(_, &p)| p)
            .collect();
        // Keep only relations that are already transitive, so each order appears once.
        let rel = |i: usize, j: usize| i == j || chosen.contains(&(i, j));
        let transitive = (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| !(rel(i, j) && rel(j, k)) || rel(i, k))));
        let antisymmetric = chosen.iter().all(|&(i, j)| !chosen.contains(&(j, i)));
        if transitive && antisymmetric {
            out.push(FinPoset::new(labels.clone(), &chosen).expect("valid order"));
        }
    }
    out
}

/// One representative of each poset on `n` elements up to isomorphism, for `n ≤ 3`.
pub fn posets_up_to_iso(n: usize) -> Vec<FinPoset> {
    let labels = |k: usize| (0..k as i64).map(Label::from).collect::<Vec<_>>();
    let mk = |pairs: &[(usize, usize)]| FinPoset::new(labels(n), pairs).expect("valid order");
    match n {
        0 => vec![mk(&[])],
        1 => vec![mk(&[])],
        2 => vec![mk(&[]), mk(&[(0, 1)])],
        3 => vec![
            mk(&[]),
            mk(&[(0, 1)]),
            mk(&[(0, 1), (1, 2)]),
            mk(&[(0, 1), (0, 2)]),
            mk(&[(0, 2), (1, 2)]),
        ],
        _ => panic!("only sizes up to 3 are tabulated"),
    }
}

/// Every monotone feasibility relation `fun → res`, by filtering all Boolean matrices.
pub fn all_dps(fun: &FinPoset, res: &FinPoset) -> Vec<DesignProblem> {
    let (nf, nr) = (fun.len(), res.len());
    let bits = nf * nr;
    assert!(bits <= 16, "too many matrices to enumerate");
    (0u32..(1 << bits))
        .filter_map(|mask| {
            let m = BitMatrix::from_fn(nf, nr, |f, r| mask & (1 << (f * nr + r)) != 0);
            DesignProblem::new(fun.clone(), res.clone(), m).ok()
        })
        .collect()
}

//! Design problems: monotone feasibility relations `F^op × R → Bool` with
//! composition, tensor, identities, symmetry and the compact closed cups/caps.

use std::fmt;

use thiserror::Error;

use crate::bits::{BitMatrix, BitRow};
use crate::poset::FinPoset;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DpError {
    #[error("feasibility matrix is {rows}x{cols}, interfaces need {fun}x{res}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        fun: usize,
        res: usize,
    },
    #[error("not monotone: feasible at (f={f}, r={r}) but not at (f'={f_prime}, r'={r_prime})")]
    MonotonicityViolation {
        f: String,
        f_prime: String,
        r: String,
        r_prime: String,
    },
    #[error("interface mismatch: {left} vs {right}")]
    InterfaceMismatch { left: String, right: String },
    #[error("element {0} has non-numeric coordinates")]
    NonNumericLabel(String),
    #[error("threshold function: {0}")]
    Threshold(String),
}

/// A feasibility relation between a functionality poset and a resource poset.
///
/// Row `f` of `feas` is the set of resources that make `f` feasible; it is an
/// upper set of `res`, and rows shrink as functionality increases.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DesignProblem {
    fun: FinPoset,
    res: FinPoset,
    feas: BitMatrix,
}

impl DesignProblem {
    /// Validates shape and monotonicity.
    pub fn new(fun: FinPoset, res: FinPoset, feas: BitMatrix) -> Result<DesignProblem, DpError> {
        if feas.n_rows() != fun.len() || feas.n_cols() != res.len() {
            return Err(DpError::ShapeMismatch {
                rows: feas.n_rows(),
                cols: feas.n_cols(),
                fun: fun.len(),
                res: res.len(),
            });
        }
        let dp = DesignProblem { fun, res, feas };
        dp.check_monotone()?;
        Ok(dp)
    }

    pub fn from_fn(
        fun: FinPoset,
        res: FinPoset,
        f: impl FnMut(usize, usize) -> bool,
    ) -> Result<DesignProblem, DpError> {
        let feas = BitMatrix::from_fn(fun.len(), res.len(), f);
        DesignProblem::new(fun, res, feas)
    }

    /// Builds from nested rows of 0/1 values.
    pub fn from_rows(fun: FinPoset, res: FinPoset, rows: &[Vec<bool>]) -> Result<DesignProblem, DpError> {
        let ncols = rows.first().map_or(res.len(), Vec::len);
        if rows.len() != fun.len() || rows.iter().any(|r| r.len() != ncols) || ncols != res.len() {
            return Err(DpError::ShapeMismatch {
                rows: rows.len(),
                cols: ncols,
                fun: fun.len(),
                res: res.len(),
            });
        }
        DesignProblem::from_fn(fun, res, |i, j| rows[i][j])
    }

    pub(crate) fn from_parts_unchecked(fun: FinPoset, res: FinPoset, feas: BitMatrix) -> DesignProblem {
        let dp = DesignProblem { fun, res, feas };
        debug_assert!(dp.check_monotone().is_ok());
        dp
    }

    fn check_monotone(&self) -> Result<(), DpError> {
        let violation = |f: usize, f_prime: usize, r: usize, r_prime: usize| DpError::MonotonicityViolation {
            f: self.fun.element_name(f),
            f_prime: self.fun.element_name(f_prime),
            r: self.res.element_name(r),
            r_prime: self.res.element_name(r_prime),
        };
        for f in 0..self.fun.len() {
            let row = self.feas.row(f);
            for r in row.iter() {
                if let Some(r_prime) = self.res.up_set(r).first_not_in(row) {
                    return Err(violation(f, f, r, r_prime));
                }
            }
            for f_prime in self.fun.down_set(f).iter() {
                if let Some(r) = row.first_not_in(self.feas.row(f_prime)) {
                    return Err(violation(f, f_prime, r, r));
                }
            }
        }
        Ok(())
    }

    /// Nothing is feasible.
    pub fn bottom(fun: FinPoset, res: FinPoset) -> DesignProblem {
        let feas = BitMatrix::new(fun.len(), res.len());
        DesignProblem { fun, res, feas }
    }

    /// Everything is feasible.
    pub fn top(fun: FinPoset, res: FinPoset) -> DesignProblem {
        let feas = BitMatrix::from_fn(fun.len(), res.len(), |_, _| true);
        DesignProblem { fun, res, feas }
    }

    /// `feas(f, r) = [f ≤ r]`.
    pub fn identity(p: &FinPoset) -> DesignProblem {
        DesignProblem {
            fun: p.clone(),
            res: p.clone(),
            feas: p.leq_matrix().clone(),
        }
    }

    /// `feas(f, r) = ∀k. phi(f)_k ≤ r_k` on numeric grid coordinates.
    ///
    /// The result goes through the same validation as [`DesignProblem::new`],
    /// so a `phi` that is not monotone is reported rather than accepted.
    pub fn threshold(
        fun: &FinPoset,
        res: &FinPoset,
        mut phi: impl FnMut(&[Rational]) -> Result<Vec<Rational>, String>,
    ) -> Result<DesignProblem, DpError> {
        let res_coords: Vec<Vec<Rational>> = (0..res.len())
            .map(|r| {
                res.numeric_coords(r)
                    .ok_or_else(|| DpError::NonNumericLabel(res.element_name(r)))
            })
            .collect::<Result<_, _>>()?;
        let mut feas = BitMatrix::new(fun.len(), res.len());
        for f in 0..fun.len() {
            let coords = fun
                .numeric_coords(f)
                .ok_or_else(|| DpError::NonNumericLabel(fun.element_name(f)))?;
            let bound = phi(&coords).map_err(DpError::Threshold)?;
            if bound.len() != res.factors().len() {
                return Err(DpError::Threshold(format!(
                    "function returned {} values for {} resource axes",
                    bound.len(),
                    res.factors().len()
                )));
            }
            for (r, rc) in res_coords.iter().enumerate() {
                if bound.iter().zip(rc).all(|(b, x)| b <= x) {
                    feas.set(f, r, true);
                }
            }
        }
        DesignProblem::new(fun.clone(), res.clone(), feas)
    }

    pub fn fun(&self) -> &FinPoset {
        &self.fun
    }

    pub fn res(&self) -> &FinPoset {
        &self.res
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.feas
    }

    pub fn is_feasible(&self, f: usize, r: usize) -> bool {
        self.feas.get(f, r)
    }

    /// Resources feasible for `f`.
    pub fn feasible_row(&self, f: usize) -> &BitRow {
        self.feas.row(f)
    }

    /// `(self ⨟ next)(f, q) = ⋁_r self(f, r) ∧ next(r, q)`.
    pub fn compose(&self, next: &DesignProblem) -> Result<DesignProblem, DpError> {
        if self.res != next.fun {
            return Err(DpError::InterfaceMismatch {
                left: self.res.to_string(),
                right: next.fun.to_string(),
            });
        }
        Ok(DesignProblem::from_parts_unchecked(
            self.fun.clone(),
            next.res.clone(),
            self.feas.bool_product(&next.feas),
        ))
    }

    /// `(Φ1 ⊗ Φ2)((f1,f2),(r1,r2)) = Φ1(f1,r1) ∧ Φ2(f2,r2)` on flattened product interfaces.
    pub fn tensor(&self, other: &DesignProblem) -> DesignProblem {
        let fun = self.fun.product(&other.fun);
        let res = self.res.product(&other.res);
        let n2 = other.res.len();
        let rows = (0..self.fun.len())
            .flat_map(|f1| (0..other.fun.len()).map(move |f2| (f1, f2)))
            .map(|(f1, f2)| {
                let mut row = BitRow::new(res.len());
                for r1 in self.feas.row(f1).iter() {
                    for r2 in other.feas.row(f2).iter() {
                        row.insert(r1 * n2 + r2);
                    }
                }
                row
            })
            .collect();
        let feas = BitMatrix::from_rows(res.len(), rows);
        DesignProblem::from_parts_unchecked(fun, res, feas)
    }

    /// Symmetry `P ⊗ Q → Q ⊗ P`: `feas((p,q),(q',p')) = [p ≤ p'] ∧ [q ≤ q']`.
    pub fn symmetry(p: &FinPoset, q: &FinPoset) -> DesignProblem {
        let fun = p.product(q);
        let res = q.product(p);
        let (np, nq) = (p.len(), q.len());
        let feas = BitMatrix::from_fn(fun.len(), res.len(), |f, r| {
            let (fp, fq) = (f / nq.max(1), f % nq.max(1));
            let (rq, rp) = (r / np.max(1), r % np.max(1));
            p.leq(fp, rp) && q.leq(fq, rq)
        });
        DesignProblem::from_parts_unchecked(fun, res, feas)
    }

    /// Unit of the duality `I → P^op ⊗ P`: `feas(*, (p,p')) = [p ≤ p']`.
    pub fn cap(p: &FinPoset) -> DesignProblem {
        let res = p.opposite().product(p);
        let n = p.len();
        let feas = BitMatrix::from_fn(1, res.len(), |_, r| p.leq(r / n, r % n));
        DesignProblem::from_parts_unchecked(FinPoset::unit(), res, feas)
    }

    /// Counit of the duality `P ⊗ P^op → I`: `feas((p,p'), *) = [p ≤ p']`.
    pub fn cup(p: &FinPoset) -> DesignProblem {
        let fun = p.product(&p.opposite());
        let n = p.len();
        let feas = BitMatrix::from_fn(fun.len(), 1, |f, _| p.leq(f / n, f % n));
        DesignProblem::from_parts_unchecked(fun, FinPoset::unit(), feas)
    }

    /// Pointwise enrichment order: `self ≤ other` iff every feasible pair of
    /// `self` is feasible in `other`.
    pub fn leq(&self, other: &DesignProblem) -> Result<bool, DpError> {
        self.same_interfaces(other)?;
        Ok(self.feas.is_pointwise_leq(&other.feas))
    }

    pub fn same_interfaces(&self, other: &DesignProblem) -> Result<(), DpError> {
        if self.fun != other.fun || self.res != other.res {
            return Err(DpError::InterfaceMismatch {
                left: format!("{} -> {}", self.fun, self.res),
                right: format!("{} -> {}", other.fun, other.res),
            });
        }
        Ok(())
    }

    /// Number of feasible pairs.
    pub fn feasible_count(&self) -> usize {
        self.feas.rows().iter().map(BitRow::count).sum()
    }
}

impl fmt::Debug for DesignProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DP({} -> {}; {:?})", self.fun, self.res, self.feas)
    }
}

/// The hom-poset `DP(F, R)` under the pointwise order, as a predicate only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomPoset {
    pub fun: FinPoset,
    pub res: FinPoset,
}

impl HomPoset {
    pub fn new(fun: FinPoset, res: FinPoset) -> HomPoset {
        HomPoset { fun, res }
    }

    pub fn contains(&self, dp: &DesignProblem) -> bool {
        dp.fun == self.fun && dp.res == self.res
    }

    /// `None` if either problem lies outside this hom-poset.
    pub fn leq(&self, a: &DesignProblem, b: &DesignProblem) -> Option<bool> {
        (self.contains(a) && self.contains(b)).then(|| a.feas.is_pointwise_leq(&b.feas))
    }
}

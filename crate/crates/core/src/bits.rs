//! Dense bit rows and matrices backing poset orders and feasibility relations.

use std::fmt;

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length set of indices `0..len` stored as packed words.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitRow {
    len: usize,
    words: Vec<u64>,
}

impl BitRow {
    pub fn new(len: usize) -> Self {
        BitRow {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut row = BitRow::new(len);
        for i in 0..len {
            row.insert(i);
        }
        row
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] &= !(1 << (i % WORD));
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if value {
            self.insert(i)
        } else {
            self.remove(i)
        }
    }

    pub fn union_with(&mut self, other: &BitRow) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn intersect_with(&mut self, other: &BitRow) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    /// `self ⊆ other`.
    pub fn is_subset(&self, other: &BitRow) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &BitRow) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// First index in `self` but not in `other`.
    pub fn first_not_in(&self, other: &BitRow) -> Option<usize> {
        self.words.iter().zip(&other.words).enumerate().find_map(|(w, (a, b))| {
            let diff = a & !b;
            (diff != 0).then(|| w * WORD + diff.trailing_zeros() as usize)
        })
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let tz = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(w * WORD + tz)
                }
            })
        })
    }
}

impl fmt::Debug for BitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.contains(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Row-major Boolean matrix.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitRow>,
}

impl BitMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: vec![BitRow::new(cols); rows],
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitRow>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        BitMatrix { cols, rows }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = BitMatrix::new(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.rows[i].insert(j);
                }
            }
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value)
    }

    pub fn row(&self, i: usize) -> &BitRow {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitRow] {
        &self.rows
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::new(self.cols, self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.iter() {
                t.rows[j].insert(i);
            }
        }
        t
    }

    /// Boolean matrix product: `(self · other)[i] = ⋁_{k ∈ self[i]} other[k]`.
    pub fn bool_product(&self, other: &BitMatrix) -> BitMatrix {
        debug_assert_eq!(self.cols, other.rows.len());
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out = BitRow::new(other.cols);
                for k in row.iter() {
                    out.union_with(&other.rows[k]);
                }
                out
            })
            .collect();
        BitMatrix { cols: other.cols, rows }
    }

    /// Entrywise `self ≤ other`.
    pub fn is_pointwise_leq(&self, other: &BitMatrix) -> bool {
        self.rows.iter().zip(&other.rows).all(|(a, b)| a.is_subset(b))
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.rows).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_ops_across_word_boundary() {
        let mut a = BitRow::new(130);
        a.insert(0);
        a.insert(64);
        a.insert(129);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(a.count(), 3);
        let mut b = BitRow::new(130);
        b.insert(64);
        assert!(b.is_subset(&a));
        assert!(!a.is_subset(&b));
        assert_eq!(a.first_not_in(&b), Some(0));
        b.union_with(&a);
        assert_eq!(b, a);
    }

    #[test]
    fn product_matches_definition() {
        let a = BitMatrix::from_fn(3, 4, |i, j| (i + j) % 3 == 0);
        let b = BitMatrix::from_fn(4, 2, |i, j| i == j || i == 3);
        let c = a.bool_product(&b);
        for i in 0..3 {
            for j in 0..2 {
                let expected = (0..4).any(|k| a.get(i, k) && b.get(k, j));
                assert_eq!(c.get(i, j), expected);
            }
        }
        assert_eq!(a.transpose().transpose(), a);
    }
}

//! Bit-packed linear algebra over F₂.
//!
//! [`BitVec`] is a fixed-length vector; [`SpanBasis`] keeps a fully reduced
//! row-echelon basis so that membership is a single reduction pass.
//! Bit `i` lives in word `i / 64` at position `i % 64`; bits past the
//! length are always zero.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn unit(len: usize, bit: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(bit, true);
        v
    }

    /// Builds a vector from booleans, one per position.
    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector of length `len` from the low bits of `mask`.
    pub fn from_u64(len: usize, mask: u64) -> Self {
        let mut v = Self::zeros(len);
        if len > 0 {
            let keep = if len >= WORD { u64::MAX } else { (1u64 << len) - 1 };
            v.words[0] = mask & keep;
        }
        v
    }

    /// Low 64 bits as an integer mask.
    pub fn low_word(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let m = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= m;
        } else {
            self.words[i / WORD] &= !m;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Position of the lowest set bit.
    pub fn leading(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    /// Iterates set positions in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            core::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + t)
                }
            })
        })
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::Dimension {
                expected: self.len,
                found: other.len,
            });
        }
        Ok(())
    }

    /// `self ^= other`.
    pub fn xor_assign(&mut self, other: &Self) -> Result<()> {
        self.check_len(other)?;
        self.xor_unchecked(other);
        Ok(())
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    /// Parity of the overlap, i.e. the standard dot product over F₂.
    pub fn dot(&self, other: &Self) -> Result<bool> {
        self.check_len(other)?;
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        Ok(ones % 2 == 1)
    }

    fn xor_unchecked(&mut self, other: &Self) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec(")?;
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        write!(f, ")")
    }
}

/// A basis in reduced row-echelon form.
///
/// Rows are sorted by pivot, each row's lowest set bit is its pivot and no
/// row has a set bit at another row's pivot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanBasis {
    len: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
    // pivot position -> row index, usize::MAX when not a pivot
    pivot_row: Vec<usize>,
}

impl SpanBasis {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            rows: Vec::new(),
            pivots: Vec::new(),
            pivot_row: vec![usize::MAX; len],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check(&self, v: &BitVec) -> Result<()> {
        if v.len() != self.len {
            return Err(Error::Dimension {
                expected: self.len,
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Reduces `v` against the rows in place; the result has no bit at any pivot.
    fn reduce(&self, v: &mut BitVec) {
        // Rows are zero at every other row's pivot, so the rows to add are
        // exactly those whose pivot is set in the original `v`.
        let hits: Vec<usize> = v
            .ones()
            .filter_map(|pos| match self.pivot_row[pos] {
                usize::MAX => None,
                r => Some(r),
            })
            .collect();
        for r in hits {
            v.xor_unchecked(&self.rows[r]);
        }
    }

    pub fn contains(&self, v: &BitVec) -> Result<bool> {
        self.check(v)?;
        let mut w = v.clone();
        self.reduce(&mut w);
        Ok(w.is_zero())
    }

    /// Adds `v` to the span. Returns `true` iff `v` was outside the old span.
    pub fn insert(&mut self, v: &BitVec) -> Result<bool> {
        self.check(v)?;
        let mut w = v.clone();
        self.reduce(&mut w);
        let Some(p) = w.leading() else {
            return Ok(false);
        };
        for row in self.rows.iter_mut() {
            if row.get(p) {
                row.xor_unchecked(&w);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, w);
        self.pivots.insert(at, p);
        for (i, &q) in self.pivots.iter().enumerate().skip(at) {
            self.pivot_row[q] = i;
        }
        Ok(true)
    }

    /// Inserts every row of `other`; the union span is independent of order.
    pub fn merge(&mut self, other: &SpanBasis) -> Result<usize> {
        let mut added = 0;
        for r in &other.rows {
            if self.insert(r)? {
                added += 1;
            }
        }
        Ok(added)
    }
}

/// Rank of a list of rows over F₂.
pub fn mat_rank(rows: &[BitVec]) -> Result<usize> {
    let Some(first) = rows.first() else {
        return Ok(0);
    };
    let mut basis = SpanBasis::new(first.len());
    for r in rows {
        basis.insert(r)?;
    }
    Ok(basis.rank())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVec {
        let bits: Vec<bool> = s.chars().map(|c| c == '1').collect();
        BitVec::from_bools(&bits)
    }

    #[test]
    fn zero_insert_is_dependent() {
        let mut b = SpanBasis::new(3);
        assert!(!b.insert(&BitVec::zeros(3)).unwrap());
        assert_eq!(b.rank(), 0);
        assert!(b.contains(&BitVec::zeros(3)).unwrap());
    }

    #[test]
    fn repeated_insert() {
        let mut b = SpanBasis::new(4);
        assert!(b.insert(&BitVec::unit(4, 0)).unwrap());
        assert!(!b.insert(&BitVec::unit(4, 0)).unwrap());
        assert!(!b.contains(&BitVec::unit(4, 1)).unwrap());
    }

    #[test]
    fn three_vectors_rank_two() {
        let rows = [bv("110"), bv("011"), bv("101")];
        assert_eq!(mat_rank(&rows).unwrap(), 2);
        let mut b = SpanBasis::new(3);
        b.insert(&rows[0]).unwrap();
        b.insert(&rows[1]).unwrap();
        assert!(b.contains(&rows[2]).unwrap());
        assert!(!b.insert(&rows[2]).unwrap());
    }

    #[test]
    fn identity_rank() {
        for n in [2usize, 8, 64, 65, 130] {
            let rows: Vec<_> = (0..n).map(|i| BitVec::unit(n, i)).collect();
            assert_eq!(mat_rank(&rows).unwrap(), n);
        }
        assert_eq!(mat_rank(&[]).unwrap(), 0);
    }

    #[test]
    fn length_mismatch() {
        let mut b = SpanBasis::new(3);
        assert!(matches!(
            b.insert(&BitVec::zeros(4)),
            Err(Error::Dimension { expected: 3, found: 4 })
        ));
        assert!(b.contains(&BitVec::zeros(2)).is_err());
        assert!(mat_rank(&[bv("10"), bv("101")]).is_err());
        assert!(bv("10").xor(&bv("101")).is_err());
    }

    #[test]
    fn rref_invariants_hold() {
        let mut b = SpanBasis::new(130);
        let mut state = 0x9e37_79b9_7f4a_7c15u64;
        for _ in 0..200 {
            let mut v = BitVec::zeros(130);
            for i in 0..130 {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                if state.is_multiple_of(5) {
                    v.set(i, true);
                }
            }
            b.insert(&v).unwrap();
            for (r, &p) in b.rows().iter().zip(b.pivots()) {
                assert_eq!(r.leading(), Some(p));
                for &q in b.pivots() {
                    if q != p {
                        assert!(!r.get(q));
                    }
                }
            }
            assert!(b.pivots().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn ones_iterates_in_order() {
        let mut v = BitVec::zeros(140);
        for i in [0, 5, 63, 64, 139] {
            v.set(i, true);
        }
        let got: Vec<_> = v.ones().collect();
        assert_eq!(got, [0, 5, 63, 64, 139]);
        assert_eq!(v.count_ones(), 5);
    }
}

//! Fixed-length bit sets over edge indices.
//!
//! [`EdgeSet`] is used both for sets of edges (the tree-built set `S`, witness
//! candidates) and, wrapped in [`Configuration`], for open/closed assignments.
//! Up to 128 edges are stored inline.

use smallvec::SmallVec;
use std::fmt;

type Words = SmallVec<[u64; 2]>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    len: usize,
    words: Words,
}

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl EdgeSet {
    pub fn empty(len: usize) -> Self {
        let mut words = Words::new();
        words.resize(word_count(len), 0);
        EdgeSet { len, words }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::empty(len);
        for w in s.words.iter_mut() {
            *w = u64::MAX;
        }
        s.trim();
        s
    }

    /// Builds a set from the low `len` bits of `mask`. Panics if `len > 64`.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= 64, "from_mask supports at most 64 edges");
        let mut s = Self::empty(len);
        if len > 0 {
            s.words[0] = mask;
            s.trim();
        }
        s
    }

    /// Low 64 bits as a mask. Panics if `len > 64`.
    pub fn to_mask(&self) -> u64 {
        assert!(self.len <= 64, "to_mask supports at most 64 edges");
        self.words.first().copied().unwrap_or(0)
    }

    pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(len);
        for i in idx {
            s.insert(i);
        }
        s
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "edge index {i} out of range {}", self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        assert!(i < self.len, "edge index {i} out of range {}", self.len);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        if v {
            self.insert(i)
        } else {
            self.remove(i)
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + b)
            })
        })
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.len, other.len, "edge set length mismatch");
        let words = self
            .words
            .iter()
            .zip(other.words.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        let mut s = EdgeSet { len: self.len, words };
        s.trim();
        s
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Self {
        let mut s = EdgeSet {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        s.trim();
        s
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "edge set length mismatch");
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(&a, &b)| a & !b == 0)
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// An open/closed assignment of every edge of a graph (`true` = open).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Configuration(EdgeSet);

impl Configuration {
    pub fn all_closed(len: usize) -> Self {
        Configuration(EdgeSet::empty(len))
    }

    pub fn all_open(len: usize) -> Self {
        Configuration(EdgeSet::full(len))
    }

    pub fn from_mask(len: usize, mask: u64) -> Self {
        Configuration(EdgeSet::from_mask(len, mask))
    }

    pub fn from_bools(states: &[bool]) -> Self {
        Configuration(EdgeSet::from_indices(
            states.len(),
            states.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i),
        ))
    }

    pub fn from_open(open: EdgeSet) -> Self {
        Configuration(open)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.len() == 0
    }

    #[inline]
    pub fn is_open(&self, e: usize) -> bool {
        self.0.contains(e)
    }

    #[inline]
    pub fn set(&mut self, e: usize, open: bool) {
        self.0.set(e, open)
    }

    pub fn open_edges(&self) -> &EdgeSet {
        &self.0
    }

    pub fn to_mask(&self) -> u64 {
        self.0.to_mask()
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len()).map(|e| self.is_open(e)).collect()
    }

    /// Coordinatewise order: every edge open here is open in `other`.
    pub fn le(&self, other: &Configuration) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len())
            .map(|e| if self.is_open(e) { '1' } else { '0' })
            .collect();
        write!(f, "Configuration({s})")
    }
}

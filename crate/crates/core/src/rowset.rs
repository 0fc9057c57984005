//! Bitset over case indices.

use std::fmt;

const WORD: usize = 64;

/// Membership set over the cases `0..m` of a dataset, with cached cardinality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RowSet {
    words: Vec<u64>,
    len: usize,
    count: usize,
}

impl RowSet {
    pub fn empty(len: usize) -> Self {
        RowSet {
            words: vec![0; len.div_ceil(WORD)],
            len,
            count: 0,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut words = vec![u64::MAX; len.div_ceil(WORD)];
        if !len.is_multiple_of(WORD) {
            if let Some(last) = words.last_mut() {
                *last = (1u64 << (len % WORD)) - 1;
            }
        }
        RowSet {
            words,
            len,
            count: len,
        }
    }

    /// Builds a set from member indices. Panics if an index is out of range.
    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut set = RowSet::empty(len);
        for i in indices {
            set.insert(i);
        }
        set
    }

    pub fn from_predicate<F: FnMut(usize) -> bool>(len: usize, mut pred: F) -> Self {
        let mut words = vec![0u64; len.div_ceil(WORD)];
        for (w, word) in words.iter_mut().enumerate() {
            let base = w * WORD;
            let end = (base + WORD).min(len);
            let mut bits = 0u64;
            for i in base..end {
                if pred(i) {
                    bits |= 1 << (i - base);
                }
            }
            *word = bits;
        }
        let count = words.iter().map(|w| w.count_ones() as usize).sum();
        RowSet { words, len, count }
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "row {i} out of range 0..{}", self.len);
        let (w, b) = (i / WORD, i % WORD);
        if self.words[w] & (1 << b) == 0 {
            self.words[w] |= 1 << b;
            self.count += 1;
        }
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / WORD] & (1 << (i % WORD)) != 0
    }

    /// Number of member cases.
    #[inline]
    pub fn count(&self) -> usize {
        self.count
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Size of the universe (`m`).
    #[inline]
    pub fn universe(&self) -> usize {
        self.len
    }

    pub fn intersection(&self, other: &RowSet) -> RowSet {
        assert_eq!(self.len, other.len, "row sets over different universes");
        let words: Vec<u64> = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        let count = words.iter().map(|w| w.count_ones() as usize).sum();
        RowSet {
            words,
            len: self.len,
            count,
        }
    }

    /// `|self ∩ other|` without materializing the intersection.
    #[inline]
    pub fn intersection_count(&self, other: &RowSet) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset(&self, other: &RowSet) -> bool {
        self.len == other.len
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    /// Member indices in ascending order.
    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for RowSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RowSet({}/{}) ", self.count, self.len)?;
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * WORD + bit);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

impl<'a> IntoIterator for &'a RowSet {
    type Item = usize;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

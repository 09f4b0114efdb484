//! Fixed-size bit sets, one plain and one with atomic writes.
//!
//! The engine tracks per-vertex update flags in these: the previous
//! superstep's flags are read-only during compute (plain), while the current
//! superstep's flags are written concurrently by workers and the message
//! receiver (atomic).

use std::sync::atomic::{AtomicU64, Ordering};

const WORD_BITS: usize = 64;

fn word_count(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// A plain fixed-size bit set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            words: vec![0; word_count(len)],
            len,
        }
    }

    /// All bits set.
    pub fn full(len: usize) -> Self {
        let mut set = BitSet {
            words: vec![u64::MAX; word_count(len)],
            len,
        };
        set.mask_tail();
        set
    }

    fn mask_tail(&mut self) {
        let tail = self.len % WORD_BITS;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn set(&mut self, bit: usize) {
        debug_assert!(bit < self.len);
        self.words[bit / WORD_BITS] |= 1u64 << (bit % WORD_BITS);
    }

    pub fn get(&self, bit: usize) -> bool {
        debug_assert!(bit < self.len);
        self.words[bit / WORD_BITS] & (1u64 << (bit % WORD_BITS)) != 0
    }

    pub fn clear_all(&mut self) {
        self.words.fill(0);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Iterates set bit positions in ascending order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    None
                } else {
                    let bit = word.trailing_zeros() as usize;
                    word &= word - 1;
                    Some(i * WORD_BITS + bit)
                }
            })
        })
    }
}

/// A fixed-size bit set whose bits may be set concurrently.
///
/// Only `set` is safe under concurrency; readers must be separated from
/// writers by a barrier (which is exactly how the engine uses it).
#[derive(Debug)]
pub struct AtomicBitSet {
    words: Vec<AtomicU64>,
    len: usize,
}

impl AtomicBitSet {
    pub fn new(len: usize) -> Self {
        AtomicBitSet {
            words: (0..word_count(len)).map(|_| AtomicU64::new(0)).collect(),
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn set(&self, bit: usize) {
        debug_assert!(bit < self.len);
        self.words[bit / WORD_BITS].fetch_or(1u64 << (bit % WORD_BITS), Ordering::Relaxed);
    }

    pub fn get(&self, bit: usize) -> bool {
        debug_assert!(bit < self.len);
        self.words[bit / WORD_BITS].load(Ordering::Relaxed) & (1u64 << (bit % WORD_BITS)) != 0
    }

    pub fn clear_all(&self) {
        for w in &self.words {
            w.store(0, Ordering::Relaxed);
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words
            .iter()
            .map(|w| w.load(Ordering::Relaxed).count_ones() as usize)
            .sum()
    }

    /// Copies the current contents into a plain `BitSet`.
    pub fn snapshot(&self) -> BitSet {
        BitSet {
            words: self.words.iter().map(|w| w.load(Ordering::Relaxed)).collect(),
            len: self.len,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_and_count() {
        let mut b = BitSet::new(130);
        assert_eq!(b.count_ones(), 0);
        b.set(0);
        b.set(63);
        b.set(64);
        b.set(129);
        assert!(b.get(0) && b.get(63) && b.get(64) && b.get(129));
        assert!(!b.get(1) && !b.get(128));
        assert_eq!(b.count_ones(), 4);
        assert_eq!(b.iter_ones().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
    }

    #[test]
    fn full_masks_tail_bits() {
        let b = BitSet::full(70);
        assert_eq!(b.count_ones(), 70);
        assert_eq!(b.iter_ones().last(), Some(69));
    }

    #[test]
    fn atomic_snapshot_matches() {
        let a = AtomicBitSet::new(100);
        a.set(3);
        a.set(99);
        let snap = a.snapshot();
        assert_eq!(snap.iter_ones().collect::<Vec<_>>(), vec![3, 99]);
        a.clear_all();
        assert_eq!(a.count_ones(), 0);
    }

    #[test]
    fn empty_sets() {
        let b = BitSet::new(0);
        assert!(b.is_empty());
        assert_eq!(b.iter_ones().count(), 0);
        let a = AtomicBitSet::new(0);
        assert_eq!(a.snapshot(), BitSet::full(0));
    }
}

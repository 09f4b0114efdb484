//! Bloom filter over a tile's distinct source vertex ids.
//!
//! Sized at 10 bits per distinct key with 7 probes (about a 1% false-positive
//! rate). Probes are derived by double hashing from two mixer seeds that are
//! fixed here because the filter is persisted inside the dataset manifest:
//! changing them would silently break skip decisions on existing datasets.

const BITS_PER_KEY: usize = 10;
const NUM_HASHES: u32 = 7;

const SEED_A: u64 = 0x9e37_79b9_7f4a_7c15;
const SEED_B: u64 = 0xc2b2_ae3d_27d4_eb4f;

/// Finalizer from splitmix64; full 64-bit avalanche.
fn mix64(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^= x >> 31;
    x
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BloomFilter {
    bits: Vec<u8>,
    num_hashes: u32,
}

impl BloomFilter {
    /// An empty filter sized for `distinct_keys` insertions.
    pub fn with_capacity(distinct_keys: usize) -> Self {
        let nbytes = (distinct_keys * BITS_PER_KEY).div_ceil(8).max(8);
        BloomFilter {
            bits: vec![0u8; nbytes],
            num_hashes: NUM_HASHES,
        }
    }

    /// Rebuilds a filter from its persisted parts.
    pub fn from_parts(bits: Vec<u8>, num_hashes: u32) -> Self {
        BloomFilter { bits, num_hashes }
    }

    fn probes(&self, key: u64) -> impl Iterator<Item = usize> + '_ {
        let nbits = (self.bits.len() * 8) as u64;
        let h1 = mix64(key ^ SEED_A);
        // Forced odd so successive probes cycle through distinct positions.
        let h2 = mix64(key ^ SEED_B) | 1;
        (0..self.num_hashes as u64)
            .map(move |i| (h1.wrapping_add(i.wrapping_mul(h2)) % nbits) as usize)
    }

    pub fn insert(&mut self, key: u64) {
        let positions: Vec<usize> = self.probes(key).collect();
        for bit in positions {
            self.bits[bit / 8] |= 1 << (bit % 8);
        }
    }

    /// May return false positives, never false negatives.
    pub fn contains(&self, key: u64) -> bool {
        self.probes(key)
            .all(|bit| self.bits[bit / 8] & (1 << (bit % 8)) != 0)
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn num_hashes(&self) -> u32 {
        self.num_hashes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_filter_contains_nothing() {
        let f = BloomFilter::with_capacity(0);
        for k in 0..1000u64 {
            assert!(!f.contains(k));
        }
    }

    #[test]
    fn false_positive_rate_near_design_point() {
        let n = 10_000u64;
        let mut f = BloomFilter::with_capacity(n as usize);
        for k in 0..n {
            f.insert(k * 2);
        }
        let fp = (0..n).filter(|k| f.contains(k * 2 + 1)).count();
        let rate = fp as f64 / n as f64;
        assert!(rate < 0.03, "false positive rate {rate} too high");
    }

    proptest! {
        #[test]
        fn no_false_negatives(keys in proptest::collection::vec(any::<u64>(), 0..200)) {
            let mut f = BloomFilter::with_capacity(keys.len());
            for &k in &keys {
                f.insert(k);
            }
            for &k in &keys {
                prop_assert!(f.contains(k));
            }
        }
    }
}

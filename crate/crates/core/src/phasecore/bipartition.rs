use serde::{Deserialize, Serialize};

use super::{PhaseError, Result};

/// Masks live in a `u64`, so at most 63 parties.
pub const MAX_PARTIES: usize = 63;

/// A nonempty proper subset `S` of `{0, .., n-1}` stored as a bitmask
/// (bit `i` set means party `i` is in `S`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bipartition {
    n: usize,
    mask: u64,
}

impl Bipartition {
    pub fn new(n: usize, mask: u64) -> Result<Self> {
        if !(2..=MAX_PARTIES).contains(&n) {
            return Err(PhaseError::PartyCount(n));
        }
        let full = full_mask(n);
        if mask == 0 || mask & !full != 0 || mask == full {
            return Err(PhaseError::InvalidBipartition { n, mask });
        }
        Ok(Bipartition { n, mask })
    }

    pub fn from_parties(n: usize, parties: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &i in parties {
            if i >= n {
                return Err(PhaseError::InvalidBipartition { n, mask: u64::MAX });
            }
            mask |= 1 << i;
        }
        Bipartition::new(n, mask)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn size(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn complement(&self) -> Bipartition {
        Bipartition {
            n: self.n,
            mask: full_mask(self.n) & !self.mask,
        }
    }

    pub fn contains(&self, party: usize) -> bool {
        self.mask >> party & 1 == 1
    }

    /// Sorted party indices in `S`.
    pub fn members(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.contains(i)).collect()
    }

    /// Sorted party indices in the complement.
    pub fn outside(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| !self.contains(i)).collect()
    }

    /// Size of the smaller side, which bounds the cut rank.
    pub fn min_side(&self) -> usize {
        self.size().min(self.n - self.size())
    }

    /// Index of the complement class `{S, S̄}` in `[1, 2^(n-1))`: the mask of
    /// whichever side omits party `n - 1`.
    pub fn class_index(&self) -> u64 {
        class_index(self.n, self.mask)
    }

    /// Deduplicated representative: the smaller side, or for `|S| = n/2` the
    /// side with the smaller mask.
    pub fn canonical(&self) -> Bipartition {
        let c = self.complement();
        match self.size().cmp(&c.size()) {
            std::cmp::Ordering::Less => *self,
            std::cmp::Ordering::Greater => c,
            std::cmp::Ordering::Equal => {
                if self.mask < c.mask {
                    *self
                } else {
                    c
                }
            }
        }
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    (1u64 << n) - 1
}

pub(crate) fn class_index(n: usize, mask: u64) -> u64 {
    if mask >> (n - 1) & 1 == 1 {
        full_mask(n) & !mask
    } else {
        mask
    }
}

fn is_representative(n: usize, mask: u64) -> bool {
    let size = mask.count_ones() as usize;
    let other = n - size;
    size < other || (size == other && mask < (full_mask(n) & !mask))
}

/// Bipartitions with `|S| <= max_size` in ascending mask order.
///
/// With `dedup`, one representative per complement class `{S, S̄}` is
/// yielded: the smaller side, or the smaller mask when both sides have
/// `n/2` parties. Without it, every subset of the allowed sizes appears.
pub fn enumerate_bipartitions(
    n: usize,
    max_size: usize,
    dedup: bool,
) -> Result<impl Iterator<Item = Bipartition>> {
    if !(2..=MAX_PARTIES).contains(&n) {
        return Err(PhaseError::PartyCount(n));
    }
    if max_size < 1 || max_size > n - 1 {
        return Err(PhaseError::InvalidMaxSize { n, max_size });
    }
    Ok((1..full_mask(n)).filter_map(move |mask| {
        let size = mask.count_ones() as usize;
        let keep = size <= max_size && (!dedup || is_representative(n, mask));
        keep.then_some(Bipartition { n, mask })
    }))
}

/// Deduplicated classes with `|S| <= n/2`; the sweep used by the cost
/// function and certification.
pub fn balanced_classes(n: usize) -> Result<impl Iterator<Item = Bipartition>> {
    enumerate_bipartitions(n, n / 2, true)
}

pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_counts_for_seventeen_parties() {
        let all: Vec<_> = enumerate_bipartitions(17, 8, true).unwrap().collect();
        assert_eq!(all.len(), 65_535);
        assert_eq!(all.iter().filter(|b| b.size() == 8).count(), 24_310);
        let per_size: Vec<usize> = (1..=8)
            .map(|k| all.iter().filter(|b| b.size() == k).count())
            .collect();
        assert_eq!(
            per_size,
            vec![17, 136, 680, 2380, 6188, 12376, 19448, 24310]
        );
    }

    #[test]
    fn raw_subset_count_for_eight_parties() {
        assert_eq!(enumerate_bipartitions(8, 4, false).unwrap().count(), 162);
        // Deduplicated, the 70 balanced subsets pair up into 35 classes.
        assert_eq!(
            enumerate_bipartitions(8, 4, true).unwrap().count(),
            8 + 28 + 56 + 35
        );
    }

    #[test]
    fn two_parties_single_class() {
        let v: Vec<_> = enumerate_bipartitions(2, 1, true).unwrap().collect();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].members(), vec![0]);
    }

    #[test]
    fn ascending_order_and_errors() {
        let masks: Vec<u64> = enumerate_bipartitions(6, 3, false)
            .unwrap()
            .map(|b| b.mask())
            .collect();
        assert!(masks.windows(2).all(|w| w[0] < w[1]));
        assert!(enumerate_bipartitions(6, 0, true).is_err());
        assert!(enumerate_bipartitions(6, 6, true).is_err());
        assert!(Bipartition::new(4, 0).is_err());
        assert!(Bipartition::new(4, 0b1111).is_err());
        assert!(Bipartition::new(4, 0b10000).is_err());
    }

    #[test]
    fn class_index_covers_every_class_once() {
        for n in 2..=9 {
            let mut seen = vec![false; 1 << (n - 1)];
            for b in enumerate_bipartitions(n, n - 1, false).unwrap() {
                let idx = b.class_index() as usize;
                assert!(idx >= 1 && idx < 1 << (n - 1));
                assert_eq!(idx, b.complement().class_index() as usize);
                seen[idx] = true;
            }
            assert!(seen[1..].iter().all(|&s| s));
            for b in balanced_classes(n).unwrap() {
                assert_eq!(b.canonical(), b);
                assert_eq!(b.complement().canonical(), b);
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(17, 8), 24_310);
        assert_eq!(binomial(8, 4), 70);
        assert_eq!(binomial(3, 5), 0);
    }
}

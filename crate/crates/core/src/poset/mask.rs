use std::fmt;

/// A subset of a finite poset as a bit-mask over its canonical element order.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct SubsetMask(pub u64);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    /// All of `0..n`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            SubsetMask(u64::MAX)
        } else {
            SubsetMask((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        SubsetMask(1u64 << i)
    }

    pub fn from_indices(idx: impl IntoIterator<Item = usize>) -> Self {
        SubsetMask(idx.into_iter().fold(0u64, |acc, i| acc | (1u64 << i)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        SubsetMask(self.0 | (1u64 << i))
    }

    pub fn without(self, i: usize) -> Self {
        SubsetMask(self.0 & !(1u64 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: SubsetMask) -> Self {
        SubsetMask(self.0 | other.0)
    }

    pub fn intersection(self, other: SubsetMask) -> Self {
        SubsetMask(self.0 & other.0)
    }

    pub fn difference(self, other: SubsetMask) -> Self {
        SubsetMask(self.0 & !other.0)
    }

    /// Complement inside `0..n`.
    pub fn complement(self, n: usize) -> Self {
        SubsetMask(!self.0 & Self::full(n).0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// Every subset of `0..n`, in increasing bit order. Requires `n < 64`.
    pub fn all_subsets(n: usize) -> impl Iterator<Item = SubsetMask> {
        assert!(n < 64, "cannot enumerate all subsets of {n} elements");
        (0..(1u64 << n)).map(SubsetMask)
    }

    /// Every subset of `self`.
    pub fn subsets(self) -> impl Iterator<Item = SubsetMask> {
        // standard submask walk, emitted from the empty set upwards
        let full = self.0;
        let mut cur: Option<u64> = Some(0);
        std::iter::from_fn(move || {
            let out = cur?;
            cur = if out == full {
                None
            } else {
                Some((out.wrapping_sub(full)) & full)
            };
            Some(SubsetMask(out))
        })
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        let s = SubsetMask::from_indices([0, 2, 5]);
        assert_eq!(s.len(), 3);
        assert!(s.contains(2) && !s.contains(1));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 2, 5]);
        assert_eq!(s.complement(6), SubsetMask::from_indices([1, 3, 4]));
        assert_eq!(SubsetMask::full(64).len(), 64);
    }

    #[test]
    fn submask_walk_is_complete() {
        let s = SubsetMask::from_indices([1, 3, 4]);
        let subs: Vec<_> = s.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|t| t.is_subset_of(s)));
        assert_eq!(subs[0], SubsetMask::EMPTY);
        assert_eq!(*subs.last().unwrap(), s);
    }
}

use super::{FinitePoset, SubsetMask};
use crate::error::{Error, Result};

/// Cap on enumerated down-set families.
pub const MAX_FAMILY: usize = 1 << 18;

impl FinitePoset {
    /// All down-sets, sorted by (size, bits); `∅` first and the whole poset last.
    pub fn downsets(&self) -> Vec<SubsetMask> {
        self.downsets_bounded(MAX_FAMILY)
            .expect("down-set family exceeds MAX_FAMILY; use downsets_bounded")
    }

    /// All down-sets, failing once more than `limit` have been found.
    pub fn downsets_bounded(&self, limit: usize) -> Result<Vec<SubsetMask>> {
        let mut out = Vec::new();
        // canonical order is a linear extension, so everything below `i` is
        // decided before `i`
        let strict: Vec<SubsetMask> = (0..self.len()).map(|i| self.below(i).without(i)).collect();
        let mut stack = vec![(0usize, SubsetMask::EMPTY)];
        while let Some((i, cur)) = stack.pop() {
            if i == self.len() {
                out.push(cur);
                if out.len() > limit {
                    return Err(Error::TooLarge {
                        what: "down-set family",
                        size: out.len(),
                        bound: limit,
                    });
                }
                continue;
            }
            stack.push((i + 1, cur));
            if strict[i].is_subset_of(cur) {
                stack.push((i + 1, cur.with(i)));
            }
        }
        out.sort_by_key(|s| (s.len(), s.bits()));
        Ok(out)
    }

    /// All up-sets, sorted by (size, bits).
    pub fn upsets(&self) -> Vec<SubsetMask> {
        let n = self.len();
        let mut v: Vec<SubsetMask> = self.downsets().into_iter().map(|d| d.complement(n)).collect();
        v.sort_by_key(|s| (s.len(), s.bits()));
        v
    }
}

/// One representative of every isomorphism class of posets with exactly `n`
/// elements, named `0..n-1`.
///
/// Every poset on `n + 1` elements arises from one on `n` elements by adding a
/// new maximal element above some down-set, so classes are grown one element
/// at a time and deduplicated with the isomorphism test.
pub fn all_posets(n: usize) -> Vec<FinitePoset> {
    let mut level = vec![FinitePoset::empty()];
    for k in 0..n {
        let mut next: Vec<FinitePoset> = Vec::new();
        let mut buckets: std::collections::HashMap<Vec<(usize, usize)>, Vec<usize>> =
            std::collections::HashMap::new();
        for p in &level {
            for d in p.downsets() {
                let q = extend_with_max(p, d, k);
                let sig = q.signature();
                let bucket = buckets.entry(sig).or_default();
                if bucket.iter().any(|&i| FinitePoset::is_isomorphic(&next[i], &q)) {
                    continue;
                }
                bucket.push(next.len());
                next.push(q);
            }
        }
        level = next;
    }
    level
}

fn extend_with_max(p: &FinitePoset, d: SubsetMask, k: usize) -> FinitePoset {
    let mut names: Vec<String> = p.names().to_vec();
    names.push(k.to_string());
    let mut above: Vec<SubsetMask> = (0..p.len())
        .map(|i| {
            if d.contains(i) {
                p.above(i).with(k)
            } else {
                p.above(i)
            }
        })
        .collect();
    // p's own indices may differ from its names; keep index = position in names
    above.push(SubsetMask::singleton(k));
    FinitePoset::from_above_unchecked(names, &above)
}

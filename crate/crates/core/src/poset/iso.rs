use super::FinitePoset;

impl FinitePoset {
    fn element_signature(&self, i: usize) -> (usize, usize) {
        (self.below(i).len(), self.above(i).len())
    }

    /// Sorted multiset of (down-set size, up-set size); an isomorphism invariant.
    pub fn signature(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = (0..self.len()).map(|i| self.element_signature(i)).collect();
        v.sort_unstable();
        v
    }

    /// An order isomorphism `p → q` as an index map, found by backtracking
    /// over signature-compatible candidates.
    pub fn isomorphism(p: &FinitePoset, q: &FinitePoset) -> Option<Vec<usize>> {
        if p.len() != q.len() || p.signature() != q.signature() {
            return None;
        }
        let n = p.len();
        let psig: Vec<_> = (0..n).map(|i| p.element_signature(i)).collect();
        let qsig: Vec<_> = (0..n).map(|j| q.element_signature(j)).collect();
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn go(
            i: usize,
            p: &FinitePoset,
            q: &FinitePoset,
            psig: &[(usize, usize)],
            qsig: &[(usize, usize)],
            map: &mut [usize],
            used: &mut [bool],
        ) -> bool {
            if i == p.len() {
                return true;
            }
            for j in 0..q.len() {
                if used[j] || qsig[j] != psig[i] {
                    continue;
                }
                let consistent = (0..i).all(|k| {
                    p.leq(k, i) == q.leq(map[k], j) && p.leq(i, k) == q.leq(j, map[k])
                });
                if !consistent {
                    continue;
                }
                map[i] = j;
                used[j] = true;
                if go(i + 1, p, q, psig, qsig, map, used) {
                    return true;
                }
                used[j] = false;
            }
            false
        }
        if go(0, p, q, &psig, &qsig, &mut map, &mut used) {
            Some(map)
        } else {
            None
        }
    }

    pub fn is_isomorphic(p: &FinitePoset, q: &FinitePoset) -> bool {
        Self::isomorphism(p, q).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relabelled_posets_are_isomorphic() {
        let v = FinitePoset::from_covers(&["a", "b", "c"], &[("a", "c"), ("b", "c")]).unwrap();
        let w = FinitePoset::from_covers(&["x", "y", "z"], &[("y", "x"), ("z", "x")]).unwrap();
        let f = FinitePoset::isomorphism(&v, &w).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(v.leq(i, j), w.leq(f[i], f[j]));
            }
        }
    }

    #[test]
    fn v_and_lambda_differ() {
        let v = FinitePoset::spine();
        assert!(!FinitePoset::is_isomorphic(&v, &v.opposite()));
        assert!(!FinitePoset::is_isomorphic(&FinitePoset::chain(3), &v));
    }

    #[test]
    fn same_signature_not_isomorphic() {
        // N-poset vs 2+2: both have signature with equal multisets? check search anyway
        let n = FinitePoset::from_covers(
            &["a", "b", "c", "d"],
            &[("a", "c"), ("b", "c"), ("b", "d")],
        )
        .unwrap();
        let two_plus_two =
            FinitePoset::from_covers(&["a", "b", "c", "d"], &[("a", "c"), ("b", "d")]).unwrap();
        assert!(!FinitePoset::is_isomorphic(&n, &two_plus_two));
    }
}

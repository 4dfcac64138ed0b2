use super::{FinitePoset, SubsetMask, MAX_ELEMENTS};
use crate::error::{Error, Result};

/// Label of a cube vertex, e.g. `{}` or `{1,3}` (1-based coordinates).
pub(crate) fn subset_label(coords: &[usize]) -> String {
    let inner: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

pub(crate) fn parse_subset_label(label: &str) -> Option<Vec<usize>> {
    let inner = label.strip_prefix('{')?.strip_suffix('}')?;
    if inner.trim().is_empty() {
        return Some(Vec::new());
    }
    inner.split(',').map(|s| s.trim().parse().ok()).collect()
}

fn digits(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

impl FinitePoset {
    /// Chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> FinitePoset {
        assert!(n <= MAX_ELEMENTS);
        let above: Vec<SubsetMask> = (0..n)
            .map(|i| SubsetMask::full(n).difference(SubsetMask::full(i)))
            .collect();
        Self::from_above_unchecked(digits(n), &above)
    }

    pub fn antichain(n: usize) -> FinitePoset {
        assert!(n <= MAX_ELEMENTS);
        Self::discrete(digits(n))
    }

    pub fn discrete(names: Vec<String>) -> FinitePoset {
        let above: Vec<SubsetMask> = (0..names.len()).map(SubsetMask::singleton).collect();
        Self::from_above_unchecked(names, &above)
    }

    pub fn point() -> FinitePoset {
        Self::chain(1)
    }

    pub fn empty() -> FinitePoset {
        Self::chain(0)
    }

    /// Componentwise order on pairs, elements named `(p,q)`.
    pub fn product(p: &FinitePoset, q: &FinitePoset) -> Result<FinitePoset> {
        let n = p.len() * q.len();
        if n > MAX_ELEMENTS {
            return Err(Error::TooLarge {
                what: "product poset",
                size: n,
                bound: MAX_ELEMENTS,
            });
        }
        let mut names = Vec::with_capacity(n);
        for a in p.names() {
            for b in q.names() {
                names.push(format!("({a},{b})"));
            }
        }
        let above: Vec<SubsetMask> = (0..n)
            .map(|x| {
                let (a, b) = (x / q.len(), x % q.len());
                SubsetMask::from_indices(
                    (0..n).filter(|&y| p.leq(a, y / q.len()) && q.leq(b, y % q.len())),
                )
            })
            .collect();
        Ok(Self::from_above_unchecked(names, &above))
    }

    /// Join `P ⋆ Q`: both orders, plus every element of `P` below every
    /// element of `Q`. Names are kept when disjoint, otherwise prefixed with
    /// `l:` and `r:`.
    pub fn join(p: &FinitePoset, q: &FinitePoset) -> Result<FinitePoset> {
        let n = p.len() + q.len();
        if n > MAX_ELEMENTS {
            return Err(Error::TooLarge {
                what: "join poset",
                size: n,
                bound: MAX_ELEMENTS,
            });
        }
        let clash = p.names().iter().any(|s| q.index_of(s).is_some());
        let names: Vec<String> = if clash {
            p.names()
                .iter()
                .map(|s| format!("l:{s}"))
                .chain(q.names().iter().map(|s| format!("r:{s}")))
                .collect()
        } else {
            p.names().iter().chain(q.names()).cloned().collect()
        };
        let off = p.len();
        let q_all = SubsetMask(q.full().bits() << off);
        let above: Vec<SubsetMask> = (0..p.len())
            .map(|i| p.above(i).union(q_all))
            .chain((0..q.len()).map(|j| SubsetMask(q.above(j).bits() << off)))
            .collect();
        Ok(Self::from_above_unchecked(names, &above))
    }

    /// Power set of `{1..n}` ordered by inclusion.
    pub fn cube(n: usize) -> Result<FinitePoset> {
        Self::cube_filtered(n, true)
    }

    /// The cube with the empty set removed.
    pub fn punctured_cube(n: usize) -> Result<FinitePoset> {
        Self::cube_filtered(n, false)
    }

    fn cube_filtered(n: usize, keep_bottom: bool) -> Result<FinitePoset> {
        if n >= 7 {
            return Err(Error::TooLarge {
                what: "cube dimension",
                size: n,
                bound: 6,
            });
        }
        let verts: Vec<u64> = (0..(1u64 << n))
            .filter(|&v| keep_bottom || v != 0)
            .collect();
        let names: Vec<String> = verts
            .iter()
            .map(|&v| {
                let coords: Vec<usize> = SubsetMask(v).iter().map(|i| i + 1).collect();
                subset_label(&coords)
            })
            .collect();
        let above: Vec<SubsetMask> = verts
            .iter()
            .map(|&a| {
                SubsetMask::from_indices(
                    verts
                        .iter()
                        .enumerate()
                        .filter(|&(_, &b)| a & !b == 0)
                        .map(|(k, _)| k),
                )
            })
            .collect();
        Ok(Self::from_above_unchecked(names, &above))
    }

    /// Two copies of `[1]` glued along the top: `a < c`, `b < c`.
    pub fn spine() -> FinitePoset {
        Self::from_covers(&["a", "b", "c"], &[("a", "c"), ("b", "c")])
            .expect("spine is a valid poset")
    }

    /// Cube vertex index for a subset of `{1..n}` given as a 0-based bit-mask.
    pub fn cube_vertex(&self, bits: u64) -> Option<usize> {
        let coords: Vec<usize> = SubsetMask(bits).iter().map(|i| i + 1).collect();
        self.index_of(&subset_label(&coords))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_chains_is_grid() {
        let two = FinitePoset::chain(2);
        let grid = FinitePoset::product(&two, &two).unwrap();
        assert_eq!(grid.len(), 4);
        assert_eq!(grid.covers().len(), 4);
    }

    #[test]
    fn join_of_points_is_chain() {
        let pt = FinitePoset::point();
        let j = FinitePoset::join(&pt, &pt).unwrap();
        assert_eq!(j.len(), 2);
        assert!(j.lt(j.index_of("l:0").unwrap(), j.index_of("r:0").unwrap()));
    }

    #[test]
    fn join_spine_punctured_square() {
        let s = FinitePoset::spine();
        let c = FinitePoset::punctured_cube(2).unwrap();
        let j = FinitePoset::join(&s, &c).unwrap();
        assert_eq!(j.len(), 6);
        for a in s.names() {
            for b in c.names() {
                assert!(j.lt(j.index_of(a).unwrap(), j.index_of(b).unwrap()));
            }
        }
        // original orders survive
        assert!(j.lt(j.index_of("a").unwrap(), j.index_of("c").unwrap()));
        assert!(!j.leq(j.index_of("a").unwrap(), j.index_of("b").unwrap()));
    }

    #[test]
    fn cube_sizes() {
        assert_eq!(FinitePoset::cube(3).unwrap().len(), 8);
        assert_eq!(FinitePoset::punctured_cube(3).unwrap().len(), 7);
        assert_eq!(FinitePoset::cube(0).unwrap().len(), 1);
        assert!(FinitePoset::cube(7).is_err());
    }

    #[test]
    fn spine_shape() {
        let s = FinitePoset::spine();
        let covers: Vec<(&str, &str)> = s
            .covers()
            .into_iter()
            .map(|(a, b)| (s.name(a), s.name(b)))
            .collect();
        assert_eq!(covers, vec![("a", "c"), ("b", "c")]);
    }

    #[test]
    fn labels_roundtrip() {
        assert_eq!(parse_subset_label("{}"), Some(vec![]));
        assert_eq!(parse_subset_label("{1,3}"), Some(vec![1, 3]));
        assert_eq!(subset_label(&[2, 4]), "{2,4}");
    }
}

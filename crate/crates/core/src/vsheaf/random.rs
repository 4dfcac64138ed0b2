//! Seeded random diagrams that are functorial by construction.
//!
//! Objects are visited so that every object's targets are already built;
//! each new object gets a random dimension and a random map into the limit
//! of its targets, and the individual maps are the legs of that cone.

use std::collections::BTreeMap;

use rand::Rng;

use super::{PosetDiagram, Variance, VecSheaf};
use crate::linalg::Matrix;
use crate::poset::FinitePoset;
use crate::scalar::Field;

/// Ranges for random dimensions and matrix entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomSpec {
    /// Dimensions are uniform in `0..=max_dim`.
    pub max_dim: usize,
    /// Entries are uniform integers in `-entry_bound..=entry_bound`.
    pub entry_bound: i64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            max_dim: 3,
            entry_bound: 3,
        }
    }
}

fn random_matrix<T: Field, R: Rng>(rng: &mut R, rows: usize, cols: usize, b: i64) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| T::from_int(rng.gen_range(-b..=b)))
}

pub fn random_diagram<T: Field, R: Rng>(
    rng: &mut R,
    shape: &FinitePoset,
    variance: Variance,
    spec: RandomSpec,
) -> PosetDiagram<T> {
    let n = shape.len();
    let mut d = PosetDiagram {
        shape: shape.clone(),
        variance,
        dims: vec![0; n],
        maps: BTreeMap::new(),
    };
    let order: Vec<usize> = match variance {
        Variance::Covariant => (0..n).rev().collect(),
        Variance::Contravariant => (0..n).collect(),
    };
    for x in order {
        let targets = match variance {
            Variance::Covariant => shape.above(x).without(x),
            Variance::Contravariant => shape.below(x).without(x),
        };
        let lim = d.limit_over(targets);
        let dim = rng.gen_range(0..=spec.max_dim);
        d.dims[x] = dim;
        let cone: Matrix<T> = random_matrix(rng, lim.dim(), dim, spec.entry_bound);
        for y in targets.iter() {
            let leg = lim.projection(y).mul(&cone);
            let key = match variance {
                Variance::Covariant => (x, y),
                Variance::Contravariant => (y, x),
            };
            d.maps.insert(key, leg);
        }
    }
    debug_assert!(d.validate().is_ok());
    d
}

pub fn random_sheaf<T: Field, R: Rng>(rng: &mut R, space: &FinitePoset, spec: RandomSpec) -> VecSheaf<T> {
    VecSheaf {
        diagram: random_diagram(rng, space, Variance::Contravariant, spec),
    }
}

/// Adds one to a random entry of a composite (non-cover) map, returning the
/// altered map set, or `None` when every composite is empty.
pub fn perturb_one_entry<T: Field, R: Rng>(
    rng: &mut R,
    d: &PosetDiagram<T>,
) -> Option<BTreeMap<(usize, usize), Matrix<T>>> {
    let covers = d.shape.covers();
    let candidates: Vec<(usize, usize)> = d
        .maps
        .iter()
        .filter(|(k, m)| !covers.contains(k) && m.rows() > 0 && m.cols() > 0)
        .filter(|(&(lo, hi), _)| {
            // some intermediate object carries the composite
            let between = d.shape.above(lo).intersection(d.shape.below(hi));
            between.len() > 2
        })
        .map(|(&k, _)| k)
        .collect();
    if candidates.is_empty() {
        return None;
    }
    let key = candidates[rng.gen_range(0..candidates.len())];
    let mut maps = d.maps.clone();
    let m = maps.get_mut(&key).unwrap();
    let (r, c) = (rng.gen_range(0..m.rows()), rng.gen_range(0..m.cols()));
    let v = m.get(r, c).clone() + T::one();
    m.set(r, c, v);
    Some(maps)
}

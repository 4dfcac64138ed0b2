//! Cubical diagrams `𝒫(N) → Vect` and the two cartesianness criteria.

use std::collections::BTreeMap;

use super::{PosetDiagram, Square, Variance};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poset::{FinitePoset, SubsetMask};
use crate::scalar::Field;

/// Largest cube dimension accepted by the cartesianness checks.
pub const MAX_CUBE_DIM: usize = 5;

/// A covariant diagram on the cube `𝒫({1..n})`: a map `F(A) → F(B)` for
/// every `A ⊆ B`.
#[derive(Clone, Debug, PartialEq)]
pub struct CubeDiagram<T> {
    n: usize,
    diagram: PosetDiagram<T>,
    /// Shape index of the vertex with a given bit-mask (bit `k` = coordinate `k+1`).
    vertex: Vec<usize>,
}

impl<T: Field> CubeDiagram<T> {
    /// Wraps a covariant diagram whose shape is the `n`-cube.
    pub fn new(n: usize, diagram: PosetDiagram<T>) -> Result<Self> {
        let cube = FinitePoset::cube(n)?;
        if diagram.shape() != &cube || diagram.variance() != Variance::Covariant {
            return Err(Error::Invalid(format!("diagram is not a covariant {n}-cube")));
        }
        let vertex = (0..1u64 << n)
            .map(|b| cube.cube_vertex(b).expect("cube vertex"))
            .collect();
        Ok(CubeDiagram { n, diagram, vertex })
    }

    /// Dimensions and maps along single-coordinate inclusions, both keyed by
    /// vertex bit-masks; composites are formed and checked for commutativity.
    pub fn from_edges(
        n: usize,
        dims: &BTreeMap<u64, usize>,
        edges: &BTreeMap<(u64, u64), Matrix<T>>,
    ) -> Result<Self> {
        let cube = FinitePoset::cube(n)?;
        let idx = |b: u64| cube.cube_vertex(b).expect("cube vertex");
        let mut d = vec![0; cube.len()];
        for b in 0..1u64 << n {
            d[idx(b)] = *dims
                .get(&b)
                .ok_or_else(|| Error::Invalid(format!("missing dimension for vertex {b:#b}")))?;
        }
        let mut covers = BTreeMap::new();
        for (&(a, b), m) in edges {
            if a >= 1 << n || b >= 1 << n || a & !b != 0 || (b & !a).count_ones() != 1 {
                return Err(Error::Invalid(format!("{a:#b} → {b:#b} is not a cube edge")));
            }
            covers.insert((idx(a), idx(b)), m.clone());
        }
        let diagram = PosetDiagram::from_cover_maps(cube, Variance::Covariant, d, covers)?;
        Self::new(n, diagram)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diagram(&self) -> &PosetDiagram<T> {
        &self.diagram
    }

    pub fn index(&self, bits: u64) -> usize {
        self.vertex[bits as usize]
    }

    pub fn dim_at(&self, bits: u64) -> usize {
        self.diagram.dim(self.index(bits))
    }

    /// `F(A) → F(B)` for `A ⊆ B` given as bit-masks.
    pub fn map_bits(&self, a: u64, b: u64) -> Matrix<T> {
        assert!(a & !b == 0, "not an inclusion");
        self.diagram.map(self.index(a), self.index(b))
    }

    fn vertex_mask(&self, keep: impl Fn(u64) -> bool) -> SubsetMask {
        SubsetMask::from_indices((0..1u64 << self.n).filter(|&b| keep(b)).map(|b| self.index(b)))
    }

    /// The comparison map `F(∅) → lim over the punctured cube`.
    pub fn comparison_map(&self) -> Result<(Matrix<T>, usize)> {
        let lim = self.diagram.limit_over(self.vertex_mask(|b| b != 0));
        let bottom = self.index(0);
        let legs: Vec<Matrix<T>> = lim.members.iter().map(|&x| self.diagram.map(bottom, x)).collect();
        let c = lim.induced_map(self.diagram.dim(bottom), &legs)?;
        Ok((c, lim.dim()))
    }

    /// Replaces `F(∅)` by the limit of the punctured cube.
    pub fn right_kan_completion(&self) -> Result<CubeDiagram<T>> {
        let lim = self.diagram.limit_over(self.vertex_mask(|b| b != 0));
        let bottom = self.index(0);
        let mut dims = self.diagram.dims().to_vec();
        dims[bottom] = lim.dim();
        let mut maps = self.diagram.maps().clone();
        for &x in &lim.members {
            maps.insert((bottom, x), lim.projection(x));
        }
        let shape = self.diagram.shape().clone();
        Self::new(self.n, PosetDiagram::new(shape, Variance::Covariant, dims, maps)?)
    }

    /// Adds `extra` dimensions to `F(∅)` that map to zero everywhere.
    pub fn enlarge_bottom(&self, extra: usize) -> Result<CubeDiagram<T>> {
        let bottom = self.index(0);
        let mut dims = self.diagram.dims().to_vec();
        dims[bottom] += extra;
        let mut maps = self.diagram.maps().clone();
        for (&(lo, hi), m) in self.diagram.maps() {
            if lo == bottom {
                let z = Matrix::zeros(m.rows(), extra);
                maps.insert((lo, hi), Matrix::hstack(m.rows(), &[m, &z]));
            }
        }
        let shape = self.diagram.shape().clone();
        Self::new(self.n, PosetDiagram::new(shape, Variance::Covariant, dims, maps)?)
    }
}

fn check_dim<T>(c: &CubeDiagram<T>) -> Result<()> {
    if c.n == 0 || c.n > MAX_CUBE_DIM {
        return Err(Error::TooLarge {
            what: "cube dimension for cartesianness checks",
            size: c.n,
            bound: MAX_CUBE_DIM,
        });
    }
    Ok(())
}

/// `F(∅)` is the limit of the punctured cube: the comparison map is an
/// isomorphism.
pub fn cube_cartesian_direct<T: Field>(c: &CubeDiagram<T>) -> Result<bool> {
    check_dim(c)?;
    let (m, lim_dim) = c.comparison_map()?;
    let d = c.dim_at(0);
    Ok(d == lim_dim && m.rank() == d)
}

/// The square `F(∅) → F({i})` over `lim 𝒞₀ → lim 𝒞₁` is a pullback, for
/// the axis `i ∈ {1..n}`.
pub fn cube_cartesian_recursive<T: Field>(c: &CubeDiagram<T>, axis: usize) -> Result<bool> {
    check_dim(c)?;
    if axis == 0 || axis > c.n {
        return Err(Error::Invalid(format!("axis {axis} is not in 1..={}", c.n)));
    }
    let bit = 1u64 << (axis - 1);
    let d = c.diagram();
    let c0 = d.limit_over(c.vertex_mask(|b| b != 0 && b & bit == 0));
    let c1 = d.limit_over(c.vertex_mask(|b| b & bit != 0 && b != bit));
    let (bottom, single) = (c.index(0), c.index(bit));
    let top = d.map(bottom, single);
    let left_legs: Vec<Matrix<T>> = c0.members.iter().map(|&x| d.map(bottom, x)).collect();
    let left = c0.induced_map(d.dim(bottom), &left_legs)?;
    let right_legs: Vec<Matrix<T>> = c1.members.iter().map(|&x| d.map(single, x)).collect();
    let right = c1.induced_map(d.dim(single), &right_legs)?;
    // lim 𝒞₀ → lim 𝒞₁ through B∖{i} → B
    let bits_of = |x: usize| (0..1u64 << c.n).find(|&b| c.index(b) == x).unwrap();
    let bottom_legs: Vec<Matrix<T>> = c1
        .members
        .iter()
        .map(|&x| {
            let b = bits_of(x);
            let from = c.index(b & !bit);
            d.map(from, x).mul(&c0.projection(from))
        })
        .collect();
    let bottom_map = c1.induced_map(c0.dim(), &bottom_legs)?;
    let sq = Square::new(top, left, right, bottom_map)?;
    Ok(super::bicartesian_square_check(&sq)?.is_pullback)
}

/// Both criteria, with the recursive one for every axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeVerdict {
    pub direct: bool,
    pub recursive: Vec<bool>,
}

impl CubeVerdict {
    pub fn compute<T: Field>(c: &CubeDiagram<T>) -> Result<Self> {
        Ok(CubeVerdict {
            direct: cube_cartesian_direct(c)?,
            recursive: (1..=c.n())
                .map(|i| cube_cartesian_recursive(c, i))
                .collect::<Result<_>>()?,
        })
    }

    pub fn agree(&self) -> bool {
        self.recursive.iter().all(|&r| r == self.direct)
    }
}

//! Diagrams of finite-dimensional vector spaces indexed by finite posets.
//!
//! [`PosetDiagram`] is the single limit/colimit engine. A sheaf on the
//! Alexandrov space of `P` is a contravariant diagram on `P`
//! ([`VecSheaf`]); cubes are covariant diagrams on `𝒫(N)` ([`CubeDiagram`]).
//! All matrices act on column vectors, so a map `F(x) → F(y)` is stored as a
//! `dim F(y) × dim F(x)` matrix.

mod cube;
mod json;
mod random;
mod recollement;
mod square;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poset::{FinitePoset, SubsetMask};
use crate::scalar::Field;

pub use cube::{cube_cartesian_direct, cube_cartesian_recursive, CubeDiagram, CubeVerdict};
pub use json::CubeJson;
pub use random::{perturb_one_entry, random_diagram, random_sheaf, RandomSpec};
pub use recollement::{
    adjunction_triangles_closed, adjunction_triangles_open, recollement_exactness_check,
    SheafMorphism,
};
pub use square::{bicartesian_square_check, Square, SquareVerdict};

/// Direction of the maps along `x ≤ y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    /// `F(x) → F(y)`.
    Covariant,
    /// `F(y) → F(x)`, as for restriction maps of a sheaf.
    Contravariant,
}

/// A functor from a finite poset (or its opposite) to vector spaces, with a
/// matrix for every strictly comparable pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PosetDiagram<T> {
    shape: FinitePoset,
    variance: Variance,
    dims: Vec<usize>,
    /// Keyed by `(lo, hi)` with `lo < hi` in the shape.
    maps: BTreeMap<(usize, usize), Matrix<T>>,
}

impl<T: Field> PosetDiagram<T> {
    /// Validates shapes and functoriality of a full set of maps.
    pub fn new(
        shape: FinitePoset,
        variance: Variance,
        dims: Vec<usize>,
        maps: BTreeMap<(usize, usize), Matrix<T>>,
    ) -> Result<Self> {
        let d = PosetDiagram {
            shape,
            variance,
            dims,
            maps,
        };
        d.validate()?;
        Ok(d)
    }

    /// Builds all composites from maps along cover relations, then validates
    /// that every composite is path independent.
    pub fn from_cover_maps(
        shape: FinitePoset,
        variance: Variance,
        dims: Vec<usize>,
        covers: BTreeMap<(usize, usize), Matrix<T>>,
    ) -> Result<Self> {
        let n = shape.len();
        if dims.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} dimensions for {n} objects",
                dims.len()
            )));
        }
        let cover_list = shape.covers();
        for &(lo, hi) in covers.keys() {
            if !cover_list.contains(&(lo, hi)) {
                return Err(Error::Invalid(format!(
                    "`{}` < `{}` is not a cover relation",
                    shape.name(lo),
                    shape.name(hi)
                )));
            }
        }
        let mut maps = BTreeMap::new();
        for &(lo, hi) in &cover_list {
            let m = covers.get(&(lo, hi)).ok_or_else(|| {
                Error::Invalid(format!(
                    "missing map for `{}` < `{}`",
                    shape.name(lo),
                    shape.name(hi)
                ))
            })?;
            maps.insert((lo, hi), m.clone());
        }
        // canonical order is a linear extension: fill (x, z) for x descending
        for x in (0..n).rev() {
            let ups: Vec<usize> = cover_list
                .iter()
                .filter(|&&(lo, _)| lo == x)
                .map(|&(_, hi)| hi)
                .collect();
            for z in shape.above(x).iter() {
                if z == x || maps.contains_key(&(x, z)) {
                    continue;
                }
                let y = *ups
                    .iter()
                    .find(|&&y| shape.leq(y, z))
                    .expect("some cover lies below z");
                let first = &maps[&(x, y)];
                let rest = &maps[&(y, z)];
                let comp = match variance {
                    Variance::Covariant => rest.checked_mul(first)?,
                    Variance::Contravariant => first.checked_mul(rest)?,
                };
                maps.insert((x, z), comp);
            }
        }
        Self::new(shape, variance, dims, maps)
    }

    /// The constant diagram with identity maps.
    pub fn constant(shape: FinitePoset, variance: Variance, dim: usize) -> Self {
        let mut maps = BTreeMap::new();
        for x in 0..shape.len() {
            for y in shape.above(x).iter().filter(|&y| y != x) {
                maps.insert((x, y), Matrix::identity(dim));
            }
        }
        let dims = vec![dim; shape.len()];
        PosetDiagram {
            shape,
            variance,
            dims,
            maps,
        }
    }

    fn validate(&self) -> Result<()> {
        let p = &self.shape;
        let n = p.len();
        if self.dims.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} dimensions for {n} objects",
                self.dims.len()
            )));
        }
        for x in 0..n {
            for y in p.above(x).iter().filter(|&y| y != x) {
                let m = self.maps.get(&(x, y)).ok_or_else(|| {
                    Error::Invalid(format!("missing map for `{}` ≤ `{}`", p.name(x), p.name(y)))
                })?;
                let (src, dst) = self.ends(x, y);
                if m.rows() != self.dims[dst] || m.cols() != self.dims[src] {
                    return Err(Error::DimensionMismatch(format!(
                        "map for `{}` ≤ `{}` is {}x{}, expected {}x{}",
                        p.name(x),
                        p.name(y),
                        m.rows(),
                        m.cols(),
                        self.dims[dst],
                        self.dims[src]
                    )));
                }
            }
        }
        if self.maps.len() != self.count_pairs() {
            return Err(Error::Invalid("maps given for incomparable pairs".into()));
        }
        for x in 0..n {
            for y in p.above(x).iter().filter(|&y| y != x) {
                for z in p.above(y).iter().filter(|&z| z != y) {
                    let direct = &self.maps[&(x, z)];
                    let comp = match self.variance {
                        Variance::Covariant => self.maps[&(y, z)].mul(&self.maps[&(x, y)]),
                        Variance::Contravariant => self.maps[&(x, y)].mul(&self.maps[&(y, z)]),
                    };
                    if &comp != direct {
                        return Err(Error::NotFunctorial(format!(
                            "composite through `{}` differs on `{}` ≤ `{}`",
                            p.name(y),
                            p.name(x),
                            p.name(z)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn count_pairs(&self) -> usize {
        (0..self.shape.len())
            .map(|x| self.shape.above(x).len() - 1)
            .sum()
    }

    /// `(source, target)` of the map attached to `lo ≤ hi`.
    fn ends(&self, lo: usize, hi: usize) -> (usize, usize) {
        match self.variance {
            Variance::Covariant => (lo, hi),
            Variance::Contravariant => (hi, lo),
        }
    }

    pub fn shape(&self) -> &FinitePoset {
        &self.shape
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, x: usize) -> usize {
        self.dims[x]
    }

    /// The map attached to `lo ≤ hi` (identity when equal).
    pub fn map(&self, lo: usize, hi: usize) -> Matrix<T> {
        if lo == hi {
            return Matrix::identity(self.dims[lo]);
        }
        self.maps
            .get(&(lo, hi))
            .cloned()
            .unwrap_or_else(|| panic!("no map for {lo} ≤ {hi}"))
    }

    pub fn maps(&self) -> &BTreeMap<(usize, usize), Matrix<T>> {
        &self.maps
    }

    /// Cover relations of the subposet induced on `s`.
    fn covers_within(&self, s: SubsetMask) -> Vec<(usize, usize)> {
        let p = &self.shape;
        let mut out = Vec::new();
        for a in s.iter() {
            for b in s.iter() {
                if a != b
                    && p.leq(a, b)
                    && !s.iter().any(|c| c != a && c != b && p.leq(a, c) && p.leq(c, b))
                {
                    out.push((a, b));
                }
            }
        }
        out
    }

    fn offsets(&self, members: &[usize]) -> (Vec<usize>, usize) {
        let mut off = Vec::with_capacity(members.len());
        let mut total = 0;
        for &x in members {
            off.push(total);
            total += self.dims[x];
        }
        (off, total)
    }

    /// Matrix whose kernel is the space of compatible families over `s` and
    /// whose cokernel is the colimit: one block row per cover in `s`.
    fn compatibility(&self, s: SubsetMask) -> (Vec<usize>, Vec<usize>, Matrix<T>) {
        let members: Vec<usize> = s.iter().collect();
        let (off, total) = self.offsets(&members);
        let pos = |x: usize| members.iter().position(|&m| m == x).unwrap();
        let covers = self.covers_within(s);
        let rows: usize = covers
            .iter()
            .map(|&(lo, hi)| self.dims[self.ends(lo, hi).1])
            .sum();
        let mut d = Matrix::zeros(rows, total);
        let mut r0 = 0;
        for &(lo, hi) in &covers {
            let (src, dst) = self.ends(lo, hi);
            let m = self.map(lo, hi);
            let (cs, cd) = (off[pos(src)], off[pos(dst)]);
            for r in 0..self.dims[dst] {
                for c in 0..self.dims[src] {
                    d.set(r0 + r, cs + c, m.get(r, c).clone());
                }
                let v = d.get(r0 + r, cd + r).clone() - T::one();
                d.set(r0 + r, cd + r, v);
            }
            r0 += self.dims[dst];
        }
        (members, off, d)
    }

    /// Limit of the diagram restricted to `s`.
    pub fn limit_over(&self, s: SubsetMask) -> Limit<T> {
        let (members, offsets, d) = self.compatibility(s);
        let basis = d.kernel();
        let dims = members.iter().map(|&x| self.dims[x]).collect();
        Limit {
            members,
            dims,
            offsets,
            basis,
        }
    }

    pub fn limit(&self) -> Limit<T> {
        self.limit_over(self.shape.full())
    }

    /// Colimit of the diagram restricted to `s`: the direct sum modulo
    /// `ι_src(v) − ι_dst(F(v))` for every cover.
    pub fn colimit_over(&self, s: SubsetMask) -> Colimit<T> {
        let members: Vec<usize> = s.iter().collect();
        let (offsets, total) = self.offsets(&members);
        let pos = |x: usize| members.iter().position(|&m| m == x).unwrap();
        let covers = self.covers_within(s);
        let cols: usize = covers
            .iter()
            .map(|&(lo, hi)| self.dims[self.ends(lo, hi).0])
            .sum();
        let mut rel = Matrix::zeros(total, cols);
        let mut c0 = 0;
        for &(lo, hi) in &covers {
            let (src, dst) = self.ends(lo, hi);
            let m = self.map(lo, hi);
            let (rs, rd) = (offsets[pos(src)], offsets[pos(dst)]);
            for c in 0..self.dims[src] {
                rel.set(rs + c, c0 + c, T::one());
                for r in 0..self.dims[dst] {
                    rel.set(rd + r, c0 + c, -m.get(r, c).clone());
                }
            }
            c0 += self.dims[src];
        }
        let quotient = if total == 0 {
            Matrix::zeros(0, 0)
        } else {
            rel.cokernel_map()
        };
        let dims = members.iter().map(|&x| self.dims[x]).collect();
        Colimit {
            members,
            dims,
            offsets,
            quotient,
        }
    }

    pub fn colimit(&self) -> Colimit<T> {
        self.colimit_over(self.shape.full())
    }

    /// The diagram on the subposet induced by `s`, names preserved, and the
    /// index in `self` of each new element.
    pub fn restrict(&self, s: SubsetMask) -> (PosetDiagram<T>, Vec<usize>) {
        let (sub, back) = self.shape.induced(s);
        let dims = back.iter().map(|&x| self.dims[x]).collect();
        let mut maps = BTreeMap::new();
        for a in 0..sub.len() {
            for b in sub.above(a).iter().filter(|&b| b != a) {
                maps.insert((a, b), self.map(back[a], back[b]));
            }
        }
        (
            PosetDiagram {
                shape: sub,
                variance: self.variance,
                dims,
                maps,
            },
            back,
        )
    }

    /// Object-wise dimensions after precomposing with a monotone map
    /// `g : Q → shape`.
    pub fn precompose(&self, g: &crate::MonotoneMap) -> Result<PosetDiagram<T>> {
        if g.dst() != &self.shape {
            return Err(Error::DimensionMismatch("map does not land in the diagram shape".into()));
        }
        let q = g.src().clone();
        let dims = (0..q.len()).map(|a| self.dims[g.apply(a)]).collect();
        let mut maps = BTreeMap::new();
        for a in 0..q.len() {
            for b in q.above(a).iter().filter(|&b| b != a) {
                maps.insert((a, b), self.map(g.apply(a), g.apply(b)));
            }
        }
        PosetDiagram::new(q, self.variance, dims, maps)
    }
}

/// A limit cone, stored as a basis of compatible families.
#[derive(Clone, Debug, PartialEq)]
pub struct Limit<T> {
    pub members: Vec<usize>,
    dims: Vec<usize>,
    offsets: Vec<usize>,
    /// Columns are compatible families, stacked over `members`.
    pub basis: Matrix<T>,
}

impl<T: Field> Limit<T> {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// The cone leg to `x`.
    pub fn projection(&self, x: usize) -> Matrix<T> {
        let k = self
            .members
            .iter()
            .position(|&m| m == x)
            .expect("object is part of the limit");
        let rows: Vec<usize> = (self.offsets[k]..self.offsets[k] + self.dims[k]).collect();
        self.basis.select_rows(&rows)
    }

    /// Coordinates of families, given as columns stacked over `members`.
    pub fn coordinates(&self, families: &Matrix<T>) -> Option<Matrix<T>> {
        self.basis.solve(families)
    }

    /// The map into the limit induced by legs `legs[k] : V → F(members[k])`.
    pub fn induced_map(&self, source_dim: usize, legs: &[Matrix<T>]) -> Result<Matrix<T>> {
        let refs: Vec<&Matrix<T>> = legs.iter().collect();
        let stacked = Matrix::vstack(source_dim, &refs);
        self.coordinates(&stacked)
            .ok_or_else(|| Error::NotFunctorial("legs do not form a cone".into()))
    }

    /// The restriction to a limit over a smaller set of objects.
    pub fn map_to(&self, smaller: &Limit<T>) -> Result<Matrix<T>> {
        let legs: Vec<Matrix<T>> = smaller.members.iter().map(|&x| self.projection(x)).collect();
        smaller.induced_map(self.dim(), &legs)
    }
}

/// A colimit cocone, stored as a quotient of the direct sum.
#[derive(Clone, Debug, PartialEq)]
pub struct Colimit<T> {
    pub members: Vec<usize>,
    dims: Vec<usize>,
    offsets: Vec<usize>,
    /// `colim × (⊕ F(x))` surjection.
    pub quotient: Matrix<T>,
}

impl<T: Field> Colimit<T> {
    pub fn dim(&self) -> usize {
        self.quotient.rows()
    }

    /// The cocone leg from `x`.
    pub fn injection(&self, x: usize) -> Matrix<T> {
        let k = self
            .members
            .iter()
            .position(|&m| m == x)
            .expect("object is part of the colimit");
        let cols: Vec<usize> = (self.offsets[k]..self.offsets[k] + self.dims[k]).collect();
        self.quotient.select_cols(&cols)
    }
}

/// A sheaf of vector spaces on the Alexandrov space of a finite poset: for
/// `q ≤ p` a restriction `F(p) → F(q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VecSheaf<T> {
    diagram: PosetDiagram<T>,
}

impl<T: Field> VecSheaf<T> {
    /// `restrictions[(q, p)]` is the map `F(p) → F(q)` for every `q < p`.
    pub fn new(
        space: FinitePoset,
        dims: Vec<usize>,
        restrictions: BTreeMap<(usize, usize), Matrix<T>>,
    ) -> Result<Self> {
        Ok(VecSheaf {
            diagram: PosetDiagram::new(space, Variance::Contravariant, dims, restrictions)?,
        })
    }

    /// Restrictions given along covers `q ⋖ p` only, keyed `(q, p)`.
    pub fn from_cover_maps(
        space: FinitePoset,
        dims: Vec<usize>,
        covers: BTreeMap<(usize, usize), Matrix<T>>,
    ) -> Result<Self> {
        Ok(VecSheaf {
            diagram: PosetDiagram::from_cover_maps(space, Variance::Contravariant, dims, covers)?,
        })
    }

    pub fn from_diagram(diagram: PosetDiagram<T>) -> Result<Self> {
        if diagram.variance != Variance::Contravariant {
            return Err(Error::Invalid("a sheaf is a contravariant diagram".into()));
        }
        Ok(VecSheaf { diagram })
    }

    pub fn constant(space: FinitePoset, dim: usize) -> Self {
        VecSheaf {
            diagram: PosetDiagram::constant(space, Variance::Contravariant, dim),
        }
    }

    pub fn zero(space: FinitePoset) -> Self {
        Self::constant(space, 0)
    }

    /// Dimension one at `p` and zero elsewhere; valid when `p` is maximal,
    /// so no nonzero restriction is needed.
    pub fn skyscraper_at_maximal(space: FinitePoset, p: usize) -> Result<Self> {
        if space.above(p).len() != 1 {
            return Err(Error::Invalid(format!("`{}` is not maximal", space.name(p))));
        }
        let dims = (0..space.len()).map(|x| usize::from(x == p)).collect();
        let mut maps = BTreeMap::new();
        for q in 0..space.len() {
            for r in space.above(q).iter().filter(|&r| r != q) {
                maps.insert((q, r), Matrix::zeros(usize::from(q == p), usize::from(r == p)));
            }
        }
        Self::new(space, dims, maps)
    }

    pub fn diagram(&self) -> &PosetDiagram<T> {
        &self.diagram
    }

    pub fn space(&self) -> &FinitePoset {
        &self.diagram.shape
    }

    pub fn dims(&self) -> &[usize] {
        &self.diagram.dims
    }

    pub fn dim(&self, p: usize) -> usize {
        self.diagram.dims[p]
    }

    /// `F(p) → F(q)` for `q ≤ p`.
    pub fn restriction(&self, p: usize, q: usize) -> Matrix<T> {
        self.diagram.map(q, p)
    }

    fn check_open(&self, u: SubsetMask) -> Result<()> {
        self.space().check_subset(u)?;
        if !self.space().is_downset(u) {
            return Err(Error::WrongSubsetKind {
                expected: "open (a down-set)",
                detail: format!("{:?}", self.space().subset_names(u)),
            });
        }
        Ok(())
    }

    /// `Γ(U, F)`: the limit over the open `U`.
    pub fn sections(&self, u: SubsetMask) -> Result<Limit<T>> {
        self.check_open(u)?;
        Ok(self.diagram.limit_over(u))
    }

    /// Restriction `Γ(U) → Γ(V)` for opens `V ⊆ U`.
    pub fn section_restriction(&self, u: SubsetMask, v: SubsetMask) -> Result<Matrix<T>> {
        if !v.is_subset_of(u) {
            return Err(Error::Invalid("restriction needs V ⊆ U".into()));
        }
        self.sections(u)?.map_to(&self.sections(v)?)
    }

    /// `j^*`: the sheaf on the open `U` with the induced order.
    pub fn restrict_open(&self, u: SubsetMask) -> Result<VecSheaf<T>> {
        self.check_open(u)?;
        Ok(VecSheaf {
            diagram: self.diagram.restrict(u).0,
        })
    }

    /// `i^*`: the sheaf on the closed `C` with the induced order.
    pub fn restrict_closed(&self, c: SubsetMask) -> Result<VecSheaf<T>> {
        self.space().check_subset(c)?;
        if !self.space().is_upset(c) {
            return Err(Error::WrongSubsetKind {
                expected: "closed (an up-set)",
                detail: format!("{:?}", self.space().subset_names(c)),
            });
        }
        Ok(VecSheaf {
            diagram: self.diagram.restrict(c).0,
        })
    }

    /// `f^*F` for a monotone `f : Q → X`: `(f^*F)(q) = F(f(q))`.
    pub fn pullback(&self, f: &crate::MonotoneMap) -> Result<VecSheaf<T>> {
        Ok(VecSheaf {
            diagram: self.diagram.precompose(f)?,
        })
    }
}

/// Positions in `big` of the elements of `small`, matched by name.
fn embed_by_name(small: &FinitePoset, big: &FinitePoset) -> Result<Vec<usize>> {
    small.name_map(big)
}

/// `j_!`: extension by zero from an open `U ⊆ X`, where `g` lives on the
/// subposet induced on `U`.
pub fn extend_zero<T: Field>(g: &VecSheaf<T>, x: &FinitePoset) -> Result<VecSheaf<T>> {
    let pos = embed_by_name(g.space(), x)?;
    let u = SubsetMask::from_indices(pos.iter().copied());
    if !x.is_downset(u) {
        return Err(Error::WrongSubsetKind {
            expected: "open (a down-set)",
            detail: format!("{:?}", x.subset_names(u)),
        });
    }
    let mut back = vec![usize::MAX; x.len()];
    for (k, &p) in pos.iter().enumerate() {
        back[p] = k;
    }
    let dims: Vec<usize> = (0..x.len())
        .map(|p| if u.contains(p) { g.dim(back[p]) } else { 0 })
        .collect();
    let mut maps = BTreeMap::new();
    for q in 0..x.len() {
        for p in x.above(q).iter().filter(|&p| p != q) {
            let m = if u.contains(p) {
                g.restriction(back[p], back[q])
            } else {
                Matrix::zeros(dims[q], 0)
            };
            maps.insert((q, p), m);
        }
    }
    VecSheaf::new(x.clone(), dims, maps)
}

/// `i_*` from a closed `C ⊆ X`: `(i_*H)(p) = Γ(C ∩ ↓p, H)`, computed slice
/// by slice as a limit. `h` lives on the subposet induced on `C`.
pub fn pushforward_closed<T: Field>(h: &VecSheaf<T>, x: &FinitePoset) -> Result<VecSheaf<T>> {
    let slices = closed_slices(h, x)?;
    let dims: Vec<usize> = slices.iter().map(|l| l.dim()).collect();
    let mut maps = BTreeMap::new();
    for q in 0..x.len() {
        for p in x.above(q).iter().filter(|&p| p != q) {
            maps.insert((q, p), slices[p].map_to(&slices[q])?);
        }
    }
    VecSheaf::new(x.clone(), dims, maps)
}

/// `Γ(C ∩ ↓p, H)` for every `p ∈ X`, as limits of `H`'s diagram.
fn closed_slices<T: Field>(h: &VecSheaf<T>, x: &FinitePoset) -> Result<Vec<Limit<T>>> {
    let pos = embed_by_name(h.space(), x)?;
    let c = SubsetMask::from_indices(pos.iter().copied());
    if !x.is_upset(c) {
        return Err(Error::WrongSubsetKind {
            expected: "closed (an up-set)",
            detail: format!("{:?}", x.subset_names(c)),
        });
    }
    Ok((0..x.len())
        .map(|p| {
            let slice = SubsetMask::from_indices(
                pos.iter()
                    .enumerate()
                    .filter(|&(_, &xp)| x.leq(xp, p))
                    .map(|(k, _)| k),
            );
            h.diagram.limit_over(slice)
        })
        .collect())
}

#[cfg(test)]
mod tests;

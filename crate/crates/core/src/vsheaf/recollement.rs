//! Open-closed recollement: units, counits and pointwise exactness of
//! `0 → j_!j^*F → F → i_*i^*F → 0`.

use super::{closed_slices, extend_zero, pushforward_closed, VecSheaf};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poset::{FinitePoset, SubsetMask};
use crate::scalar::Field;

/// A natural transformation between sheaves on the same space, one matrix
/// per point.
#[derive(Clone, Debug, PartialEq)]
pub struct SheafMorphism<T> {
    pub components: Vec<Matrix<T>>,
}

impl<T: Field> SheafMorphism<T> {
    pub fn identity(f: &VecSheaf<T>) -> Self {
        SheafMorphism {
            components: f.dims().iter().map(|&d| Matrix::identity(d)).collect(),
        }
    }

    /// Shapes fit and every naturality square commutes.
    pub fn is_natural(&self, src: &VecSheaf<T>, dst: &VecSheaf<T>) -> bool {
        let x = src.space();
        if dst.space() != x || self.components.len() != x.len() {
            return false;
        }
        for p in 0..x.len() {
            let c = &self.components[p];
            if c.rows() != dst.dim(p) || c.cols() != src.dim(p) {
                return false;
            }
        }
        (0..x.len()).all(|p| {
            x.below(p).iter().filter(|&q| q != p).all(|q| {
                dst.restriction(p, q).mul(&self.components[p])
                    == self.components[q].mul(&src.restriction(p, q))
            })
        })
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &SheafMorphism<T>) -> SheafMorphism<T> {
        SheafMorphism {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| b.mul(a))
                .collect(),
        }
    }
}

fn complement_closed(x: &FinitePoset, u: SubsetMask) -> Result<SubsetMask> {
    x.check_subset(u)?;
    if !x.is_downset(u) {
        return Err(Error::WrongSubsetKind {
            expected: "open (a down-set)",
            detail: format!("{:?}", x.subset_names(u)),
        });
    }
    Ok(u.complement(x.len()))
}

/// Counit `j_!j^*F → F`: identity on `U`, zero elsewhere.
pub fn counit_open<T: Field>(f: &VecSheaf<T>, u: SubsetMask) -> Result<SheafMorphism<T>> {
    complement_closed(f.space(), u)?;
    Ok(SheafMorphism {
        components: (0..f.space().len())
            .map(|p| {
                if u.contains(p) {
                    Matrix::identity(f.dim(p))
                } else {
                    Matrix::zeros(f.dim(p), 0)
                }
            })
            .collect(),
    })
}

/// Unit `F → i_*i^*F` for the closed `C`: at `p`, the family of restrictions
/// to the points of `C ∩ ↓p`.
pub fn unit_closed<T: Field>(f: &VecSheaf<T>, c: SubsetMask) -> Result<SheafMorphism<T>> {
    let x = f.space();
    let h = f.restrict_closed(c)?;
    let pos = h.space().name_map(x)?;
    let slices = closed_slices(&h, x)?;
    let components = (0..x.len())
        .map(|p| {
            let legs: Vec<Matrix<T>> = slices[p]
                .members
                .iter()
                .map(|&k| f.restriction(p, pos[k]))
                .collect();
            slices[p].induced_map(f.dim(p), &legs)
        })
        .collect::<Result<_>>()?;
    Ok(SheafMorphism { components })
}

/// Counit `i^*i_*H → H` on the closed subposet carrying `h`: the leg of the
/// slice limit at the point itself.
pub fn counit_closed<T: Field>(h: &VecSheaf<T>, x: &FinitePoset) -> Result<SheafMorphism<T>> {
    let pos = h.space().name_map(x)?;
    let slices = closed_slices(h, x)?;
    Ok(SheafMorphism {
        components: (0..h.space().len())
            .map(|k| slices[pos[k]].projection(k))
            .collect(),
    })
}

/// `i_*φ` for a morphism `φ : H → H'` of sheaves on the closed subposet.
fn push_morphism<T: Field>(
    phi: &SheafMorphism<T>,
    h: &VecSheaf<T>,
    h2: &VecSheaf<T>,
    x: &FinitePoset,
) -> Result<SheafMorphism<T>> {
    let s1 = closed_slices(h, x)?;
    let s2 = closed_slices(h2, x)?;
    let components = (0..x.len())
        .map(|p| {
            let legs: Vec<Matrix<T>> = s2[p]
                .members
                .iter()
                .map(|&k| phi.components[k].mul(&s1[p].projection(k)))
                .collect();
            s2[p].induced_map(s1[p].dim(), &legs)
        })
        .collect::<Result<_>>()?;
    Ok(SheafMorphism { components })
}

/// Pointwise exactness of `0 → j_!j^*F → F → i_*i^*F → 0` for the open `U`.
pub fn recollement_exactness_check<T: Field>(f: &VecSheaf<T>, u: SubsetMask) -> Result<bool> {
    let x = f.space();
    let c = complement_closed(x, u)?;
    let e = extend_zero(&f.restrict_open(u)?, x)?;
    let g = pushforward_closed(&f.restrict_closed(c)?, x)?;
    let alpha = counit_open(f, u)?;
    let beta = unit_closed(f, c)?;
    if !alpha.is_natural(&e, f) || !beta.is_natural(f, &g) {
        return Ok(false);
    }
    Ok((0..x.len()).all(|p| {
        let a = &alpha.components[p];
        let b = &beta.components[p];
        let ra = a.rank();
        let rb = b.rank();
        b.mul(a).is_zero() && ra == e.dim(p) && rb == g.dim(p) && ra + rb == f.dim(p)
    }))
}

/// Triangle identities for `j_! ⊣ j^*` at `G = j^*F` and at `F`.
pub fn adjunction_triangles_open<T: Field>(f: &VecSheaf<T>, u: SubsetMask) -> Result<bool> {
    let x = f.space();
    complement_closed(x, u)?;
    let g = f.restrict_open(u)?;
    let jg = extend_zero(&g, x)?;
    // unit G → j^*j_!G is the identity once j^*j_!G is recomputed
    let back = jg.restrict_open(u)?;
    if back != g {
        return Ok(false);
    }
    let eta = SheafMorphism::identity(&g);
    let eps_f = counit_open(f, u)?;
    // j^*ε_F ∘ η_{j^*F} = id
    let pos = g.space().name_map(x)?;
    let restricted = SheafMorphism {
        components: pos.iter().map(|&p| eps_f.components[p].clone()).collect(),
    };
    if eta.then(&restricted) != SheafMorphism::identity(&g) {
        return Ok(false);
    }
    // ε_{j_!G} ∘ j_!η_G = id
    let eps_jg = counit_open(&jg, u)?;
    let j_eta = SheafMorphism {
        components: (0..x.len())
            .map(|p| match pos.iter().position(|&q| q == p) {
                Some(k) => eta.components[k].clone(),
                None => Matrix::zeros(0, 0),
            })
            .collect(),
    };
    Ok(j_eta.then(&eps_jg) == SheafMorphism::identity(&jg) && eps_f.is_natural(&jg, f))
}

/// Triangle identities for `i^* ⊣ i_*` at `F` and at `H = i^*F`.
pub fn adjunction_triangles_closed<T: Field>(f: &VecSheaf<T>, c: SubsetMask) -> Result<bool> {
    let x = f.space();
    let h = f.restrict_closed(c)?;
    let pos = h.space().name_map(x)?;
    let ih = pushforward_closed(&h, x)?;
    let eta_f = unit_closed(f, c)?;
    if !eta_f.is_natural(f, &ih) {
        return Ok(false);
    }
    let eps_h = counit_closed(&h, x)?;
    let back = ih.restrict_closed(c)?;
    if !eps_h.is_natural(&back, &h) {
        return Ok(false);
    }
    // ε_{i^*F} ∘ i^*η_F = id on i^*F
    let i_eta = SheafMorphism {
        components: pos.iter().map(|&p| eta_f.components[p].clone()).collect(),
    };
    if i_eta.then(&eps_h) != SheafMorphism::identity(&h) {
        return Ok(false);
    }
    // i_*ε_H ∘ η_{i_*H} = id on i_*H
    let eta_ih = unit_closed(&ih, c)?;
    let push_eps = push_morphism(&eps_h, &back, &h, x)?;
    Ok(eta_ih.then(&push_eps) == SheafMorphism::identity(&ih))
}

//! Commutative squares of vector spaces and their (co)cartesianness.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Field;

/// ```text
/// A0 --top--> A1
/// |left       |right
/// v           v
/// B0 --bot--> B1
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct Square<T> {
    pub top: Matrix<T>,
    pub left: Matrix<T>,
    pub right: Matrix<T>,
    pub bottom: Matrix<T>,
}

/// Verdicts for a square; the horizontal maps are `top` and `bottom`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SquareVerdict {
    pub is_pullback: bool,
    pub is_pushout: bool,
    /// `ker(top) → ker(bottom)` is an isomorphism.
    pub kernels_iso: bool,
    /// `coker(top) → coker(bottom)` is an isomorphism.
    pub cokernels_iso: bool,
    pub kernel_map_surjective: bool,
    pub cokernel_map_injective: bool,
}

impl<T: Field> Square<T> {
    pub fn new(top: Matrix<T>, left: Matrix<T>, right: Matrix<T>, bottom: Matrix<T>) -> Result<Self> {
        let sq = Square {
            top,
            left,
            right,
            bottom,
        };
        sq.check()?;
        Ok(sq)
    }

    fn check(&self) -> Result<()> {
        let (a0, a1, b0, b1) = (self.top.cols(), self.top.rows(), self.left.rows(), self.right.rows());
        if self.left.cols() != a0 || self.right.cols() != a1 || self.bottom.cols() != b0 || self.bottom.rows() != b1
        {
            return Err(Error::DimensionMismatch("square maps do not fit together".into()));
        }
        if self.right.mul(&self.top) != self.bottom.mul(&self.left) {
            return Err(Error::NotFunctorial("square does not commute".into()));
        }
        Ok(())
    }

    /// `(top; left) : A0 → A1 ⊕ B0`.
    fn pair_map(&self) -> Matrix<T> {
        Matrix::vstack(self.top.cols(), &[&self.top, &self.left])
    }

    /// `[right, −bottom] : A1 ⊕ B0 → B1`.
    fn difference_map(&self) -> Matrix<T> {
        let neg = self.bottom.scale(&-T::one());
        Matrix::hstack(self.right.rows(), &[&self.right, &neg])
    }
}

/// Pullback and pushout tests by rank, and the induced maps on horizontal
/// kernels and cokernels.
///
/// In an abelian category a square is a pullback iff the kernel map is an
/// isomorphism and the cokernel map is injective, and a pushout iff the
/// cokernel map is an isomorphism and the kernel map is surjective. Both
/// equivalences, and the combined form
/// `(kernels iso ∧ cokernels iso) ⟺ (pullback ∧ pushout)`, are checked on
/// every call; a disagreement is reported as an internal error.
pub fn bicartesian_square_check<T: Field>(sq: &Square<T>) -> Result<SquareVerdict> {
    sq.check()?;
    let a0 = sq.top.cols();
    let pair = sq.pair_map();
    let diff = sq.difference_map();
    let pair_rank = pair.rank();
    let diff_rank = diff.rank();
    let middle = diff.cols();
    let ker_diff = middle - diff_rank;
    let is_pullback = pair_rank == a0 && ker_diff == a0;
    let is_pushout = diff_rank == sq.right.rows() && ker_diff == pair_rank;

    // induced map on kernels: ker(top) → ker(bottom) via left
    let kt = sq.top.kernel();
    let kb = sq.bottom.kernel();
    let image = sq.left.mul(&kt);
    let kmap = kb
        .solve(&image)
        .ok_or_else(|| Error::Internal("left does not map ker(top) into ker(bottom)".into()))?;
    let k_rank = kmap.rank();
    let kernel_map_injective = k_rank == kt.cols();
    let kernel_map_surjective = k_rank == kb.cols();

    // induced map on cokernels: coker(top) → coker(bottom) via right
    let qt = sq.top.cokernel_map();
    let qb = sq.bottom.cokernel_map();
    let target = qb.mul(&sq.right);
    // c · qt = target; solve qtᵀ cᵀ = targetᵀ
    let cmap = qt
        .transpose()
        .solve(&target.transpose())
        .ok_or_else(|| Error::Internal("right does not factor through the cokernels".into()))?
        .transpose();
    let c_rank = cmap.rank();
    let cokernel_map_injective = c_rank == qt.rows();
    let cokernel_map_surjective = c_rank == qb.rows();

    let verdict = SquareVerdict {
        is_pullback,
        is_pushout,
        kernels_iso: kernel_map_injective && kernel_map_surjective,
        cokernels_iso: cokernel_map_injective && cokernel_map_surjective,
        kernel_map_surjective,
        cokernel_map_injective,
    };
    if verdict.is_pullback != (verdict.kernels_iso && verdict.cokernel_map_injective) {
        return Err(Error::Internal(format!("pullback criterion disagrees: {verdict:?}")));
    }
    if verdict.is_pushout != (verdict.cokernels_iso && verdict.kernel_map_surjective) {
        return Err(Error::Internal(format!("pushout criterion disagrees: {verdict:?}")));
    }
    if (verdict.kernels_iso && verdict.cokernels_iso) != (verdict.is_pullback && verdict.is_pushout) {
        return Err(Error::Internal(format!("bicartesian criterion disagrees: {verdict:?}")));
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{QMatrix, Rational};

    fn q(rows: &[&[i64]], cols: usize) -> QMatrix {
        QMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rational::from_int(v)).collect())
                .collect(),
            cols,
        )
        .unwrap()
    }

    #[test]
    fn identity_square() {
        let i = QMatrix::identity(2);
        let v = bicartesian_square_check(&Square::new(i.clone(), i.clone(), i.clone(), i).unwrap()).unwrap();
        assert!(v.is_pullback && v.is_pushout && v.kernels_iso && v.cokernels_iso);
    }

    #[test]
    fn constructed_pullback() {
        // cospan k → k ← k along identity: pullback is the diagonal k
        let one = q(&[&[1]], 1);
        let v = bicartesian_square_check(&Square::new(one.clone(), one.clone(), one.clone(), one).unwrap()).unwrap();
        assert!(v.is_pullback);
        // k² with projections onto a cospan k → 0 ← k is bicartesian
        let p1 = q(&[&[1, 0]], 2);
        let p2 = q(&[&[0, 1]], 2);
        let to_zero = QMatrix::zeros(0, 1);
        let v = bicartesian_square_check(&Square::new(p1, p2, to_zero.clone(), to_zero).unwrap()).unwrap();
        assert!(v.is_pullback);
        assert!(v.is_pushout);
    }

    #[test]
    fn kernels_iso_but_not_pullback() {
        // A0 = B0 = B1 = 0, A1 = k: kernels agree (both zero) yet A0 is not
        // the pullback k ×_0 0 = k
        let top = QMatrix::zeros(1, 0);
        let left = QMatrix::zeros(0, 0);
        let right = QMatrix::zeros(0, 1);
        let bottom = QMatrix::zeros(0, 0);
        let v = bicartesian_square_check(&Square::new(top, left, right, bottom).unwrap()).unwrap();
        assert!(v.kernels_iso);
        assert!(!v.is_pullback);
        assert!(!v.cokernel_map_injective);
    }

    #[test]
    fn non_commuting_rejected() {
        let one = q(&[&[1]], 1);
        let two = q(&[&[2]], 1);
        assert!(Square::new(one.clone(), one.clone(), one, two).is_err());
    }
}

//! Dense matrices over a generic scalar with exact elimination.
//!
//! Matrices act on column vectors: an `r × c` matrix maps a `c`-dimensional
//! space into an `r`-dimensional one. Row-major storage.

use std::fmt;

use num_traits::Num;

use crate::error::{Error, Result};
use crate::scalar::{Field, IntegerRing};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.data[r * self.cols + c])?;
            }
        }
        write!(f, "]")
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Matrix")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("data", &self.data)
            .finish()
    }
}

impl<T: Clone + Num> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from row vectors; `cols` is needed for the zero-row case.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let nrows = rows.len();
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: nrows,
            cols,
            data,
        })
    }

    /// 0/1 matrix sending basis vector `j` to basis vector `image[j]`.
    pub fn from_index_map(target_dim: usize, image: &[usize]) -> Self {
        let mut m = Self::zeros(target_dim, image.len());
        for (j, &i) in image.iter().enumerate() {
            m.data[i * image.len() + j] = T::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    /// Matrix product `self * rhs`. Panics on a shape mismatch.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs.data[k * rhs.cols + j];
                    if b.is_zero() {
                        continue;
                    }
                    let cur = std::mem::replace(&mut out.data[i * rhs.cols + j], T::zero());
                    out.data[i * rhs.cols + j] = cur + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}x{} after {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(self.mul(rhs))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    /// Side-by-side concatenation `[A | B | ...]`; all blocks share a row count.
    pub fn hstack(rows: usize, blocks: &[&Self]) -> Self {
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack row mismatch");
            for r in 0..rows {
                for c in 0..b.cols {
                    out.data[r * cols + off + c] = b.get(r, c).clone();
                }
            }
            off += b.cols;
        }
        out
    }

    /// Vertical concatenation; all blocks share a column count.
    pub fn vstack(cols: usize, blocks: &[&Self]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            data.extend(b.data.iter().cloned());
        }
        Matrix { rows, cols, data }
    }

    pub fn block_diag(blocks: &[&Self]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for r in 0..b.rows {
                for c in 0..b.cols {
                    out.data[(r0 + r) * cols + c0 + c] = b.get(r, c).clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), self.cols, |r, c| self.get(idx[r], c).clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |r, c| self.get(r, idx[c]).clone())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }
}

impl<T: Field> Matrix<T> {
    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_negligible()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = T::one() / m.get(row, col).clone();
            for c in 0..m.cols {
                let v = m.get(row, c).clone() * inv.clone();
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col).clone();
                if factor.is_negligible() {
                    continue;
                }
                for c in 0..m.cols {
                    let v = m.get(r, c).clone() - factor.clone() * m.get(row, c).clone();
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space, one basis vector per column.
    pub fn kernel(&self) -> Self {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Self::zeros(self.cols, free.len());
        for (j, &f) in free.iter().enumerate() {
            k.set(f, j, T::one());
            for (i, &p) in pivots.iter().enumerate() {
                k.set(p, j, -r.get(i, f).clone());
            }
        }
        k
    }

    /// Some `X` with `self * X = rhs`, or `None` if the system is inconsistent.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        assert_eq!(self.rows, rhs.rows, "solve row mismatch");
        let aug = Self::hstack(self.rows, &[self, rhs]);
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Self::zeros(self.cols, rhs.cols);
        for (i, &p) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(p, j, r.get(i, self.cols + j).clone());
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let x = self.solve(&Self::identity(self.rows))?;
        if self.rank() == self.rows {
            Some(x)
        } else {
            None
        }
    }

    /// A surjection from the target onto the cokernel: its kernel is the
    /// image of `self`.
    pub fn cokernel_map(&self) -> Self {
        self.transpose().kernel().transpose()
    }

    /// Column basis for the image.
    pub fn image_basis(&self) -> Self {
        let (_, pivots) = self.rref();
        self.select_cols(&pivots)
    }
}

impl<T: IntegerRing> Matrix<T> {
    /// Nonzero invariant factors (Smith normal form diagonal), all positive.
    pub fn invariant_factors(&self) -> Vec<T> {
        let mut a = self.clone();
        let (m, n) = (a.rows, a.cols);
        let mut out = Vec::new();
        let mut t = 0;
        while t < m.min(n) {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for r in t..m {
                for c in t..n {
                    let v = a.get(r, c);
                    if v.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(br, bc)| v.abs() < a.get(br, bc).abs()) {
                        best = Some((r, c));
                    }
                }
            }
            let Some((br, bc)) = best else { break };
            a.swap_rows(t, br);
            a.swap_cols(t, bc);
            loop {
                let mut clean = true;
                for r in t + 1..m {
                    if a.get(r, t).is_zero() {
                        continue;
                    }
                    let q = a.get(r, t).clone() / a.get(t, t).clone();
                    for c in t..n {
                        let v = a.get(r, c).clone() - q.clone() * a.get(t, c).clone();
                        a.set(r, c, v);
                    }
                    if !a.get(r, t).is_zero() {
                        clean = false;
                    }
                }
                for c in t + 1..n {
                    if a.get(t, c).is_zero() {
                        continue;
                    }
                    let q = a.get(t, c).clone() / a.get(t, t).clone();
                    for r in t..m {
                        let v = a.get(r, c).clone() - q.clone() * a.get(r, t).clone();
                        a.set(r, c, v);
                    }
                    if !a.get(t, c).is_zero() {
                        clean = false;
                    }
                }
                if !clean {
                    let mut best = (t, t);
                    for r in t..m {
                        if !a.get(r, t).is_zero() && a.get(r, t).abs() < a.get(best.0, best.1).abs()
                        {
                            best = (r, t);
                        }
                    }
                    for c in t..n {
                        if !a.get(t, c).is_zero() && a.get(t, c).abs() < a.get(best.0, best.1).abs()
                        {
                            best = (t, c);
                        }
                    }
                    a.swap_rows(t, best.0);
                    a.swap_cols(t, best.1);
                    continue;
                }
                let pivot = a.get(t, t).clone();
                let offender = (t + 1..m)
                    .flat_map(|r| (t + 1..n).map(move |c| (r, c)))
                    .find(|&(r, c)| !(a.get(r, c).clone() % pivot.clone()).is_zero());
                match offender {
                    Some((r, _)) => {
                        for c in t..n {
                            let v = a.get(t, c).clone() + a.get(r, c).clone();
                            a.set(t, c, v);
                        }
                    }
                    None => break,
                }
            }
            out.push(a.get(t, t).abs());
            t += 1;
        }
        out
    }

    /// Rank over the fraction field.
    pub fn integer_rank(&self) -> usize {
        self.invariant_factors().len()
    }

    /// Number of invariant factors different from one: the torsion part of
    /// the cokernel needs exactly this many generators.
    pub fn torsion_generators(&self) -> usize {
        self.invariant_factors()
            .iter()
            .filter(|d| !d.is_one())
            .count()
    }

    /// True when the map is onto the target lattice `T^rows`.
    pub fn is_integrally_surjective(&self) -> bool {
        let f = self.invariant_factors();
        f.len() == self.rows && f.iter().all(|d| d.is_one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{QMatrix, Rational, ZMatrix};
    use num_bigint::BigInt;

    fn q(rows: &[&[i64]]) -> QMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        QMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rational::from_int(v)).collect())
                .collect(),
            cols,
        )
        .unwrap()
    }

    fn z(rows: &[&[i64]]) -> ZMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        ZMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
            cols,
        )
        .unwrap()
    }

    #[test]
    fn rank_and_kernel() {
        let m = q(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.cols(), 1);
        assert!(m.mul(&k).is_zero());
    }

    #[test]
    fn solve_consistent_and_not() {
        let a = q(&[&[1, 1], &[0, 1]]);
        let b = q(&[&[3], &[1]]);
        let x = a.solve(&b).unwrap();
        assert_eq!(a.mul(&x), b);
        let singular = q(&[&[1, 1], &[1, 1]]);
        assert!(singular.solve(&q(&[&[1], &[2]])).is_none());
    }

    #[test]
    fn inverse_roundtrip() {
        let a = q(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), QMatrix::identity(2));
        assert!(q(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn smith_invariants() {
        // diag(2, 6) in disguise
        let m = z(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let f: Vec<i64> = m
            .invariant_factors()
            .iter()
            .map(|d| i64::try_from(d).unwrap())
            .collect();
        assert_eq!(f, vec![2, 6, 12]);
        assert!(z(&[&[1, 0], &[0, 1]]).is_integrally_surjective());
        assert!(!z(&[&[2]]).is_integrally_surjective());
        assert_eq!(z(&[&[2]]).torsion_generators(), 1);
    }

    #[test]
    fn empty_shapes() {
        let m = QMatrix::zeros(0, 3);
        assert_eq!(m.rank(), 0);
        assert_eq!(m.kernel().cols(), 3);
        let n = QMatrix::zeros(3, 0);
        assert_eq!(n.kernel().cols(), 0);
        assert!(ZMatrix::zeros(0, 2).is_integrally_surjective());
    }

    #[test]
    fn float_instantiation() {
        let m = Matrix::<f64>::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0 + 1e-12]], 2).unwrap();
        assert_eq!(m.rank(), 1);
    }
}

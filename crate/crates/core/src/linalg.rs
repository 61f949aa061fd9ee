//! Dense arbitrary-precision integer vectors and matrices.
//!
//! Everything here is exact. Entries are [`BigInt`] so that right-hand sides
//! and iterates of any magnitude can be represented without overflow.

use std::fmt;
use std::ops::{Add, Index, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// An integer vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IntVec(Vec<BigInt>);

impl IntVec {
    pub fn new(entries: Vec<BigInt>) -> Self {
        IntVec(entries)
    }

    pub fn zeros(len: usize) -> Self {
        IntVec(vec![BigInt::zero(); len])
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        IntVec(entries.iter().map(|&e| BigInt::from(e)).collect())
    }

    /// Unit vector `e_index` scaled by `value`.
    pub fn unit(len: usize, index: usize, value: i64) -> Self {
        let mut v = Self::zeros(len);
        v.0[index] = BigInt::from(value);
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[BigInt] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [BigInt] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<BigInt> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BigInt> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.first_negative().is_none()
    }

    /// Index of the first strictly negative entry, if any.
    pub fn first_negative(&self) -> Option<usize> {
        self.0.iter().position(Signed::is_negative)
    }

    /// `true` iff every entry is `<= 0`.
    pub fn is_nonpositive(&self) -> bool {
        self.0.iter().all(|e| !e.is_positive())
    }

    pub fn l1_norm(&self) -> BigInt {
        self.0.iter().map(|e| e.abs()).sum()
    }

    pub fn max_abs(&self) -> BigInt {
        self.0.iter().map(|e| e.abs()).max().unwrap_or_default()
    }

    /// Number of nonzero entries.
    pub fn support_size(&self) -> usize {
        self.0.iter().filter(|e| !e.is_zero()).count()
    }

    pub fn dot(&self, other: &IntVec) -> Result<BigInt> {
        check_len(self.len(), other.len())?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn scaled(&self, factor: &BigInt) -> IntVec {
        IntVec(self.0.iter().map(|e| e * factor).collect())
    }

    /// `self - factor * other`
    pub fn sub_scaled(&self, factor: &BigInt, other: &IntVec) -> Result<IntVec> {
        check_len(self.len(), other.len())?;
        Ok(IntVec(
            self.0.iter().zip(&other.0).map(|(a, b)| a - factor * b).collect(),
        ))
    }

    pub fn checked_add(&self, other: &IntVec) -> Result<IntVec> {
        check_len(self.len(), other.len())?;
        Ok(IntVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    pub fn checked_sub(&self, other: &IntVec) -> Result<IntVec> {
        check_len(self.len(), other.len())?;
        Ok(IntVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    /// Concatenates several vectors.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a IntVec>) -> IntVec {
        IntVec(parts.into_iter().flat_map(|p| p.0.iter().cloned()).collect())
    }

    pub fn slice(&self, start: usize, end: usize) -> IntVec {
        IntVec(self.0[start..end].to_vec())
    }
}

impl From<Vec<BigInt>> for IntVec {
    fn from(v: Vec<BigInt>) -> Self {
        IntVec(v)
    }
}

impl From<&[i64]> for IntVec {
    fn from(v: &[i64]) -> Self {
        IntVec::from_i64s(v)
    }
}

impl<const N: usize> From<[i64; N]> for IntVec {
    fn from(v: [i64; N]) -> Self {
        IntVec::from_i64s(&v)
    }
}

impl FromIterator<BigInt> for IntVec {
    fn from_iter<I: IntoIterator<Item = BigInt>>(iter: I) -> Self {
        IntVec(iter.into_iter().collect())
    }
}

impl Index<usize> for IntVec {
    type Output = BigInt;
    fn index(&self, i: usize) -> &BigInt {
        &self.0[i]
    }
}

impl<'a> IntoIterator for &'a IntVec {
    type Item = &'a BigInt;
    type IntoIter = std::slice::Iter<'a, BigInt>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl Neg for &IntVec {
    type Output = IntVec;
    fn neg(self) -> IntVec {
        IntVec(self.0.iter().map(|e| -e).collect())
    }
}

impl Neg for IntVec {
    type Output = IntVec;
    fn neg(self) -> IntVec {
        IntVec(self.0.into_iter().map(|e| -e).collect())
    }
}

/// Panics on length mismatch; use [`IntVec::checked_add`] for fallible code.
impl Add for &IntVec {
    type Output = IntVec;
    fn add(self, rhs: &IntVec) -> IntVec {
        self.checked_add(rhs).expect("vector lengths differ")
    }
}

/// Panics on length mismatch; use [`IntVec::checked_sub`] for fallible code.
impl Sub for &IntVec {
    type Output = IntVec;
    fn sub(self, rhs: &IntVec) -> IntVec {
        self.checked_sub(rhs).expect("vector lengths differ")
    }
}

impl fmt::Display for IntVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}

/// Componentwise `max(v_i, 0)`.
pub fn positive_part(v: &IntVec) -> IntVec {
    v.iter()
        .map(|e| if e.is_positive() { e.clone() } else { BigInt::zero() })
        .collect()
}

/// Componentwise `-min(v_i, 0)`, so that `v = v⁺ - v⁻`.
pub fn negative_part(v: &IntVec) -> IntVec {
    v.iter()
        .map(|e| if e.is_negative() { -e } else { BigInt::zero() })
        .collect()
}

/// The conformal order `u ⊑ v`: same closed orthant and `|u_i| <= |v_i|`.
pub fn conformal_leq(u: &IntVec, v: &IntVec) -> Result<bool> {
    check_len(v.len(), u.len())?;
    Ok(u.iter().zip(v.iter()).all(|(a, b)| conformal_entry(a, b)))
}

#[inline]
pub(crate) fn conformal_entry(a: &BigInt, b: &BigInt) -> bool {
    if a.is_zero() {
        return true;
    }
    if a.is_positive() {
        b >= a
    } else {
        b <= a
    }
}

/// A dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::from(1);
        }
        m
    }

    /// Builds a matrix from `i64` rows. `cols` is needed for the zero-row case.
    pub fn from_rows_i64(cols: usize, rows: &[Vec<i64>]) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            entries.extend(row.iter().map(|&e| BigInt::from(e)));
        }
        Self::new(rows.len(), cols, entries)
    }

    /// Builds a matrix from rows; every row must have `cols` entries.
    pub fn from_rows(cols: usize, rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let nrows = rows.len();
        let mut entries = Vec::with_capacity(nrows * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        Self::new(nrows, cols, entries)
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[IntVec]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            check_len(rows, col.len())?;
            for i in 0..rows {
                m.entries[i * columns.len() + j] = col[i].clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> IntVec {
        IntVec(self.row(i).to_vec())
    }

    pub fn column(&self, j: usize) -> IntVec {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul_vec(&self, v: &IntVec) -> Result<IntVec> {
        check_len(self.cols, v.len())?;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v.iter())
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * other.get(k, j);
                    out.entries[i * other.cols + j] += prod;
                }
            }
        }
        Ok(out)
    }

    /// `true` iff `M v = 0`.
    pub fn annihilates(&self, v: &IntVec) -> Result<bool> {
        Ok(self.mul_vec(v)?.is_zero())
    }

    pub fn max_abs(&self) -> BigInt {
        self.entries.iter().map(|e| e.abs()).max().unwrap_or_default()
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.rows != other.rows {
            return Err(Error::Dimension(format!(
                "hstack needs equal row counts, got {} and {}",
                self.rows, other.rows
            )));
        }
        let cols = self.cols + other.cols;
        let mut entries = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            entries.extend_from_slice(self.row(i));
            entries.extend_from_slice(other.row(i));
        }
        IntMatrix::new(self.rows, cols, entries)
    }

    /// Places `other` below `self`.
    pub fn vstack(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "vstack needs equal column counts, got {} and {}",
                self.cols, other.cols
            )));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        IntMatrix::new(self.rows + other.rows, self.cols, entries)
    }

    pub fn negated(&self) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: IntVec = self.row_vec(i);
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// The n-fold matrix `[A,B]^(n)`: `n` copies of `B` side by side on top,
/// block-diagonal copies of `A` below. Size `(s + n r) x (n q)`.
pub fn nfold_matrix(a: &IntMatrix, b: &IntMatrix, n: usize) -> Result<IntMatrix> {
    if a.cols() != b.cols() {
        return Err(Error::Dimension(format!(
            "A has {} columns but B has {}",
            a.cols(),
            b.cols()
        )));
    }
    if n == 0 {
        return Err(Error::Dimension("n must be at least 1".into()));
    }
    let (r, s, q) = (a.rows(), b.rows(), a.cols());
    let mut m = IntMatrix::zeros(s + n * r, n * q);
    for k in 0..n {
        for i in 0..s {
            for j in 0..q {
                m.set(i, k * q + j, b.get(i, j).clone());
            }
        }
        for i in 0..r {
            for j in 0..q {
                m.set(s + k * r + i, k * q + j, a.get(i, j).clone());
            }
        }
    }
    Ok(m)
}

/// A vector `x = (x^1, ..., x^n)` split into `n` blocks of `q` entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockVector {
    flat: IntVec,
    q: usize,
}

impl BlockVector {
    pub fn new(flat: IntVec, q: usize) -> Result<Self> {
        if q == 0 || !flat.len().is_multiple_of(q) {
            return Err(Error::Dimension(format!(
                "length {} is not a positive multiple of block size {q}",
                flat.len()
            )));
        }
        Ok(BlockVector { flat, q })
    }

    pub fn from_blocks(blocks: &[IntVec]) -> Result<Self> {
        let q = blocks.first().map(IntVec::len).unwrap_or(0);
        if let Some(bad) = blocks.iter().find(|b| b.len() != q) {
            return Err(Error::LengthMismatch {
                expected: q,
                actual: bad.len(),
            });
        }
        Self::new(IntVec::concat(blocks), q)
    }

    pub fn n(&self) -> usize {
        self.flat.len() / self.q
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn flat(&self) -> &IntVec {
        &self.flat
    }

    pub fn into_flat(self) -> IntVec {
        self.flat
    }

    /// Block `k`, 0-based.
    pub fn block(&self, k: usize) -> &[BigInt] {
        &self.flat.as_slice()[k * self.q..(k + 1) * self.q]
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[BigInt]> {
        self.flat.as_slice().chunks(self.q)
    }

    pub fn block_vecs(&self) -> Vec<IntVec> {
        self.blocks().map(|b| IntVec::new(b.to_vec())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(e: &[i64]) -> IntVec {
        IntVec::from_i64s(e)
    }

    #[test]
    fn sign_split() {
        let x = v(&[1, -2, 0]);
        assert_eq!(positive_part(&x), v(&[1, 0, 0]));
        assert_eq!(negative_part(&x), v(&[0, 2, 0]));
        assert_eq!(positive_part(&v(&[0, 0])), v(&[0, 0]));
        assert_eq!(negative_part(&v(&[0, 0])), v(&[0, 0]));
        let g = v(&[1, -1, -1, 1]);
        assert_eq!(positive_part(&g), v(&[1, 0, 0, 1]));
        assert_eq!(negative_part(&g), v(&[0, 1, 1, 0]));
    }

    #[test]
    fn conformal_examples() {
        assert!(conformal_leq(&v(&[1, -1]), &v(&[2, -1])).unwrap());
        assert!(!conformal_leq(&v(&[1, -1]), &v(&[1, 1])).unwrap());
        assert!(conformal_leq(&v(&[1, -1, -1, 1]), &v(&[2, -2, -2, 2])).unwrap());
        assert!(!conformal_leq(&v(&[2, -2, -2, 2]), &v(&[1, -1, -1, 1])).unwrap());
        assert!(matches!(
            conformal_leq(&v(&[1]), &v(&[1, 2])),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn nfold_of_unit_pair() {
        let a = IntMatrix::from_rows_i64(2, &[vec![1, 1]]).unwrap();
        let b = IntMatrix::identity(2);
        let m = nfold_matrix(&a, &b, 2).unwrap();
        let expected = IntMatrix::from_rows_i64(
            4,
            &[
                vec![1, 0, 1, 0],
                vec![0, 1, 0, 1],
                vec![1, 1, 0, 0],
                vec![0, 0, 1, 1],
            ],
        )
        .unwrap();
        assert_eq!(m, expected);

        let m4 = nfold_matrix(&a, &b, 4).unwrap();
        let expected4 = IntMatrix::from_rows_i64(
            8,
            &[
                vec![1, 0, 1, 0, 1, 0, 1, 0],
                vec![0, 1, 0, 1, 0, 1, 0, 1],
                vec![1, 1, 0, 0, 0, 0, 0, 0],
                vec![0, 0, 1, 1, 0, 0, 0, 0],
                vec![0, 0, 0, 0, 1, 1, 0, 0],
                vec![0, 0, 0, 0, 0, 0, 1, 1],
            ],
        )
        .unwrap();
        assert_eq!(m4, expected4);
    }

    #[test]
    fn single_fold_is_vertical_stack() {
        let a = IntMatrix::from_rows_i64(3, &[vec![1, -2, 3], vec![0, 4, 5]]).unwrap();
        let b = IntMatrix::from_rows_i64(3, &[vec![7, 8, 9]]).unwrap();
        assert_eq!(nfold_matrix(&a, &b, 1).unwrap(), b.vstack(&a).unwrap());
    }

    #[test]
    fn nfold_rejects_column_mismatch() {
        let a = IntMatrix::from_rows_i64(2, &[vec![1, 1]]).unwrap();
        let b = IntMatrix::identity(3);
        assert!(matches!(nfold_matrix(&a, &b, 2), Err(Error::Dimension(_))));
    }

    #[test]
    fn block_views() {
        let x = BlockVector::new(v(&[1, -1, 0, 0, 0, 0, -1, 1]), 2).unwrap();
        assert_eq!(x.n(), 4);
        assert_eq!(x.block(3), v(&[-1, 1]).as_slice());
        let rebuilt = BlockVector::from_blocks(&x.block_vecs()).unwrap();
        assert_eq!(rebuilt, x);
        assert!(BlockVector::new(v(&[1, 2, 3]), 2).is_err());
    }
}

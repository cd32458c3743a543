use std::fmt;
use std::ops::{Index, IndexMut};

use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};

/// Default relative pivot tolerance for [`Matrix::rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Relative threshold under which a matrix power counts as zero.
const NILPOTENT_TOL: f64 = 1e-12;

/// Small dense row-major matrix of finite reals.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::BadMatrixData {
                rows,
                cols,
                len: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if let Some(bad) = rows.iter().find(|r| r.as_ref().len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "ragged rows: expected {cols} columns, found {}",
                bad.as_ref().len()
            )));
        }
        let data = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::from_row_major(rows.len(), cols, data)
    }

    /// Column vector.
    pub fn column(values: &[f64]) -> Result<Self> {
        Self::from_row_major(values.len(), 1, values.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Largest absolute entry, 0 for an empty matrix.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mat_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mat_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if self.cols != x.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by a vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "shapes {}x{} and {}x{} differ",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// `[self | other]`
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "hstack needs equal row counts, got {} and {}",
                self.rows, other.rows
            )));
        }
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            out.data[i * out.cols..i * out.cols + self.cols].copy_from_slice(self.row(i));
            out.data[i * out.cols + self.cols..(i + 1) * out.cols].copy_from_slice(other.row(i));
        }
        Ok(out)
    }

    /// `[self; other]`
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "vstack needs equal column counts, got {} and {}",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn powi(&self, k: usize) -> Result<Matrix> {
        self.require_square()?;
        let mut out = Matrix::identity(self.rows);
        for _ in 0..k {
            out = out.mat_mul(self)?;
        }
        Ok(out)
    }

    /// Numerical rank by Gaussian elimination with partial pivoting.
    ///
    /// A pivot counts when its magnitude exceeds `rel_tol · max(1, max|entry|)`
    /// of the original matrix.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let threshold = rel_tol * self.max_abs().max(1.0);
        let mut work = self.clone();
        let mut rank = 0;
        for col in 0..work.cols {
            if rank == work.rows {
                break;
            }
            let (pivot_row, pivot) = (rank..work.rows)
                .map(|r| (r, work[(r, col)].abs()))
                .fold((rank, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= threshold {
                continue;
            }
            work.swap_rows(rank, pivot_row);
            let p = work[(rank, col)];
            for r in rank + 1..work.rows {
                let factor = work[(r, col)] / p;
                if factor == 0.0 {
                    continue;
                }
                for c in col..work.cols {
                    let v = work[(rank, c)];
                    work[(r, c)] -= factor * v;
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    /// Smallest `k ≤ n` with `Aᵏ = 0`, or `None` if the matrix is not nilpotent.
    pub fn nilpotency_index(&self) -> Result<Option<usize>> {
        self.require_square()?;
        let threshold = NILPOTENT_TOL * self.max_abs().max(1.0);
        let mut power = self.clone();
        for k in 1..=self.rows.max(1) {
            if power.max_abs() <= threshold {
                return Ok(Some(k));
            }
            power = power.mat_mul(self)?;
        }
        Ok(None)
    }

    /// `exp(A·t)` for nilpotent `A`, summed exactly as `Σ_{j<k} (A·t)ʲ / j!`.
    pub fn expm_nilpotent(&self, t: f64) -> Result<Matrix> {
        let k = self.nilpotency_index()?.ok_or(Error::NotNilpotent)?;
        let at = self.scale(t);
        let mut sum = Matrix::identity(self.rows);
        let mut term = Matrix::identity(self.rows);
        for j in 1..k {
            term = term.mat_mul(&at)?.scale(1.0 / j as f64);
            sum = sum.add(&term)?;
        }
        Ok(sum)
    }

    /// Monic characteristic polynomial `[1, c₁, …, cₙ]` of `det(λI - A)`
    /// by the Faddeev–LeVerrier recursion.
    pub fn char_poly(&self) -> Result<Vec<f64>> {
        self.require_square()?;
        let n = self.rows;
        let mut coeffs = Vec::with_capacity(n + 1);
        coeffs.push(1.0);
        let mut m = Matrix::identity(n);
        for k in 1..=n {
            let am = self.mat_mul(&m)?;
            let ck = -am.trace() / k as f64;
            coeffs.push(ck);
            m = am;
            for i in 0..n {
                m[(i, i)] += ck;
            }
        }
        Ok(coeffs)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

/// Serializes as nested row-major arrays.
impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            seq.serialize_element(self.row(i))?;
        }
        seq.end()
    }
}

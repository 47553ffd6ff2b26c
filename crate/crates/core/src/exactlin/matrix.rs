use std::fmt;
use std::ops::Index;

use crate::scalar::Field;

use super::LinAlgError;

/// Dense row-major matrix over an exact field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

impl<T: Field> Matrix<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<T>) -> Result<Self, LinAlgError> {
        if entries.len() != rows * cols {
            return Err(LinAlgError::Shape { rows, cols, len: entries.len() });
        }
        Ok(Self { rows, cols, entries })
    }

    /// Builds a matrix from a list of rows. All rows must share one length;
    /// an empty row list gives a `0 × cols` matrix with `cols = 0`.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self, LinAlgError> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(LinAlgError::RaggedRow { row: bad });
        }
        let entries = rows.iter().flat_map(|r| r.iter().cloned()).collect();
        Self::new(rows.len(), cols, entries)
    }

    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Result<Self, LinAlgError> {
        if let Some(bad) = columns.iter().position(|c| c.len() != rows) {
            return Err(LinAlgError::RaggedRow { row: bad });
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i].clone()))
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(T::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Matrix product. Panics on a dimension mismatch.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        Self::from_fn(self.rows, rhs.cols, |i, j| (0..self.cols).fold(T::zero(), |acc, k| acc + self[(i, k)].clone() * rhs[(k, j)].clone()))
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), self.cols, |i, j| self[(idx[i], j)].clone())
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])].clone())
    }

    /// Horizontal concatenation `[self | rhs]`. Panics if row counts differ.
    pub fn hstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows, "hstack row mismatch");
        Self::from_fn(
            self.rows,
            self.cols + rhs.cols,
            |i, j| {
                if j < self.cols {
                    self[(i, j)].clone()
                } else {
                    rhs[(i, j - self.cols)].clone()
                }
            },
        )
    }

    pub fn scale_row(&mut self, i: usize, by: &T) {
        for x in &mut self.entries[i * self.cols..(i + 1) * self.cols] {
            *x = x.clone() * by.clone();
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn at(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, v: T) {
        self.entries[i * self.cols + j] = v;
    }

    /// Fraction-free (Bareiss) forward elimination on a copy.
    ///
    /// Returns the eliminated matrix, the number of pivots, and the parity of
    /// row swaps. Every division is exact: intermediate entries are minors of
    /// the input.
    fn bareiss(&self) -> (Self, usize, bool) {
        let mut m = self.clone();
        let mut prev = T::one();
        let mut r = 0;
        let mut odd_swaps = false;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.at(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                m.swap_rows(p, r);
                odd_swaps = !odd_swaps;
            }
            let pivot = m.at(r, c).clone();
            for i in r + 1..m.rows {
                let lead = m.at(i, c).clone();
                for j in c + 1..m.cols {
                    let v = (m.at(i, j).clone() * pivot.clone() - lead.clone() * m.at(r, j).clone()) / prev.clone();
                    m.set(i, j, v);
                }
                m.set(i, c, T::zero());
            }
            prev = pivot;
            r += 1;
        }
        (m, r, odd_swaps)
    }

    /// Rank over the field, by fraction-free elimination.
    pub fn rank(&self) -> usize {
        self.bareiss().1
    }

    /// Determinant of a square matrix (1 for the empty matrix). Panics if not square.
    pub fn determinant(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        if self.rows == 0 {
            return T::one();
        }
        let (m, r, odd) = self.bareiss();
        if r < self.rows {
            return T::zero();
        }
        let d = m.at(self.rows - 1, self.cols - 1).clone();
        if odd {
            -d
        } else {
            d
        }
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.at(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = T::one() / m.at(r, c).clone();
            m.scale_row(r, &inv);
            for i in 0..m.rows {
                if i == r || m.at(i, c).is_zero() {
                    continue;
                }
                let f = m.at(i, c).clone();
                for j in c..m.cols {
                    let v = m.at(i, j).clone() - f.clone() * m.at(r, j).clone();
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    /// Canonical kernel basis as the columns of a `cols × (cols - rank)` matrix.
    ///
    /// The basis is put in reduced column echelon form (pivot entries 1, pivot
    /// rows chosen top to bottom), so two matrices with the same kernel give
    /// identical output.
    pub fn kernel_basis(&self) -> Self {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let raw: Vec<Vec<T>> = free
            .iter()
            .map(|&f| {
                let mut v = vec![T::zero(); self.cols];
                v[f] = T::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r.at(row, f).clone();
                }
                v
            })
            .collect();
        if raw.is_empty() {
            return Self::zeros(self.cols, 0);
        }
        let as_rows = Self::from_rows(&raw).expect("uniform kernel vectors");
        as_rows.rref().0.transpose()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &self.entries[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.entries[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

//! Dense vectors and matrices over GF(q) with exact Gauss-Jordan elimination.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::field::{FieldError, Fp, PrimeField};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FVector {
    field: PrimeField,
    data: Vec<Fp>,
}

impl FVector {
    pub fn new(field: PrimeField, data: Vec<Fp>) -> Self {
        assert!(
            data.iter().all(|x| x.modulus() == field.modulus()),
            "vector entries must belong to {field}"
        );
        Self { field, data }
    }

    pub fn zeros(field: PrimeField, len: usize) -> Self {
        Self {
            field,
            data: vec![field.zero(); len],
        }
    }

    /// Standard basis vector `e_index` of length `len`.
    pub fn unit(field: PrimeField, len: usize, index: usize) -> Self {
        let mut v = Self::zeros(field, len);
        v.data[index] = field.one();
        v
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[Fp] {
        &self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Fp> {
        self.data.iter()
    }

    pub fn values(&self) -> Vec<u64> {
        self.data.iter().map(|x| x.value()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn dot(&self, other: &FVector) -> Result<Fp, FieldError> {
        self.same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(self.field.zero(), |acc, (&a, &b)| acc + a * b))
    }

    pub fn add(&self, other: &FVector) -> Result<FVector, FieldError> {
        self.same_shape(other)?;
        Ok(FVector {
            field: self.field,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &FVector) -> Result<FVector, FieldError> {
        self.same_shape(other)?;
        Ok(FVector {
            field: self.field,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        })
    }

    pub fn scale(&self, c: Fp) -> FVector {
        FVector {
            field: self.field,
            data: self.data.iter().map(|&a| a * c).collect(),
        }
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: Fp, other: &FVector) -> Result<(), FieldError> {
        self.same_shape(other)?;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
        Ok(())
    }

    fn same_shape(&self, other: &FVector) -> Result<(), FieldError> {
        if self.field != other.field {
            return Err(FieldError::ModulusMismatch(
                self.field.modulus(),
                other.field.modulus(),
            ));
        }
        if self.len() != other.len() {
            return Err(FieldError::DimensionMismatch(format!(
                "vector lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }
}

impl Index<usize> for FVector {
    type Output = Fp;

    fn index(&self, i: usize) -> &Fp {
        &self.data[i]
    }
}

impl IndexMut<usize> for FVector {
    fn index_mut(&mut self, i: usize) -> &mut Fp {
        &mut self.data[i]
    }
}

impl fmt::Debug for FVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.iter()).finish()
    }
}

/// Row-major dense matrix over GF(q).
#[derive(Clone, PartialEq, Eq)]
pub struct FMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<Fp>,
}

impl FMatrix {
    pub fn new(field: PrimeField, rows: usize, cols: usize, data: Vec<Fp>) -> Result<Self, FieldError> {
        if data.len() != rows * cols {
            return Err(FieldError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| x.modulus() != field.modulus()) {
            return Err(FieldError::ModulusMismatch(field.modulus(), bad.modulus()));
        }
        Ok(Self {
            field,
            rows,
            cols,
            data,
        })
    }

    /// Builds a matrix from rows of integer representatives (reduced mod q).
    pub fn from_rows<R: AsRef<[u64]>>(field: PrimeField, rows: &[R]) -> Result<Self, FieldError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(FieldError::DimensionMismatch("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.as_ref().iter().map(|&v| field.elem(v)))
            .collect();
        Self::new(field, rows.len(), cols, data)
    }

    pub fn from_fn(field: PrimeField, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Fp) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let x = f(r, c);
                assert_eq!(x.modulus(), field.modulus());
                data.push(x);
            }
        }
        Self {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        Self::from_fn(field, n, n, |r, c| if r == c { field.one() } else { field.zero() })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Fp {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Fp) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[Fp] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> FVector {
        FVector::new(self.field, (0..self.rows).map(|r| self.get(r, c)).collect())
    }

    /// Rows as vectors of integer representatives; handy for comparisons in reports.
    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|x| x.value()).collect())
            .collect()
    }

    /// Submatrix made of the given row and column indices, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> FMatrix {
        FMatrix::from_fn(self.field, rows.len(), cols.len(), |r, c| self.get(rows[r], cols[c]))
    }

    pub fn mul(&self, other: &FMatrix) -> Result<FMatrix, FieldError> {
        if self.field != other.field {
            return Err(FieldError::ModulusMismatch(
                self.field.modulus(),
                other.field.modulus(),
            ));
        }
        if self.cols != other.rows {
            return Err(FieldError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let zero = self.field.zero();
        Ok(FMatrix::from_fn(self.field, self.rows, other.cols, |r, c| {
            (0..self.cols).fold(zero, |acc, i| acc + self.get(r, i) * other.get(i, c))
        }))
    }

    pub fn mul_vec(&self, v: &FVector) -> Result<FVector, FieldError> {
        if self.field != v.field() {
            return Err(FieldError::ModulusMismatch(self.field.modulus(), v.field().modulus()));
        }
        if self.cols != v.len() {
            return Err(FieldError::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let zero = self.field.zero();
        Ok(FVector::new(
            self.field,
            (0..self.rows)
                .map(|r| {
                    self.row(r)
                        .iter()
                        .zip(v.iter())
                        .fold(zero, |acc, (&a, &b)| acc + a * b)
                })
                .collect(),
        ))
    }

    /// Exact inverse by Gauss-Jordan elimination on `[M | I]`.
    pub fn inverse(&self) -> Result<FMatrix, FieldError> {
        if self.rows != self.cols {
            return Err(FieldError::DimensionMismatch(format!(
                "cannot invert a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut aug = FMatrix::zeros(self.field, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, self.field.one());
        }
        let pivots = aug.reduce(n);
        if pivots.len() < n {
            return Err(FieldError::Singular);
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        let rows: Vec<usize> = (0..n).collect();
        Ok(aug.select(&rows, &cols))
    }

    /// Returns some `x` with `M x = y` if `y` is in the column space of `M`.
    ///
    /// The solution is the one read off the reduced row echelon form with
    /// free variables set to zero; pivots are taken at the lowest row index
    /// holding a nonzero entry.
    pub fn solve_in_colspace(&self, y: &FVector) -> Option<FVector> {
        assert_eq!(self.rows, y.len(), "right-hand side length must equal row count");
        assert_eq!(self.field, y.field());
        let mut aug = FMatrix::zeros(self.field, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, y[r]);
        }
        let pivots = aug.reduce(self.cols);
        let rank = pivots.len();
        if (rank..self.rows).any(|r| !aug.get(r, self.cols).is_zero()) {
            return None;
        }
        let mut x = FVector::zeros(self.field, self.cols);
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(r, self.cols);
        }
        Some(x)
    }

    /// In-place Gauss-Jordan reduction over the first `pivot_cols` columns.
    /// Returns the pivot column of each leading row.
    fn reduce(&mut self, pivot_cols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..pivot_cols {
            if pivot_row == self.rows {
                break;
            }
            let Some(found) = (pivot_row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(found, pivot_row);
            let scale = self.get(pivot_row, col).inv().expect("pivot is nonzero");
            for c in 0..self.cols {
                let v = self.get(pivot_row, c) * scale;
                self.set(pivot_row, c, v);
            }
            for r in 0..self.rows {
                if r == pivot_row {
                    continue;
                }
                let factor = self.get(r, col);
                if factor.is_zero() {
                    continue;
                }
                for c in 0..self.cols {
                    let v = self.get(r, c) - factor * self.get(pivot_row, c);
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl fmt::Debug for FMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

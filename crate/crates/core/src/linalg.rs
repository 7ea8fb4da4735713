//! Matrices and subspaces over GF(q).
//!
//! Subspaces are always stored by their reduced row-echelon basis, which is
//! unique, so equality and ordering of subspaces reduce to comparing bases.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::ffield::FieldSpec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("operands over different fields GF({left}) and GF({right})")]
    FieldMismatch { left: u32, right: u32 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("entry {value} at ({row}, {col}) is not an element of GF({q})")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        value: u32,
        q: u32,
    },
    #[error("subspaces live in different ambient spaces ({left} vs {right})")]
    AmbientMismatch { left: usize, right: usize },
    #[error("linear system is underdetermined (rank {rank} < {unknowns} unknowns)")]
    Underdetermined { rank: usize, unknowns: usize },
    #[error("linear system is inconsistent")]
    Inconsistent,
}

/// Dense row-major matrix over GF(q).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(field: &FieldSpec, rows: usize, cols: usize) -> Self {
        Self {
            field: field.clone(),
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from row-major entries, validating every entry.
    pub fn from_flat(
        field: &FieldSpec,
        rows: usize,
        cols: usize,
        data: Vec<u32>,
    ) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let q = field.q();
        if let Some(pos) = data.iter().position(|&v| v >= q) {
            return Err(LinalgError::EntryOutOfRange {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
                value: data[pos],
                q,
            });
        }
        Ok(Self {
            field: field.clone(),
            rows,
            cols,
            data,
        })
    }

    pub fn from_rows(field: &FieldSpec, rows: &[Vec<u32>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::Shape("ragged rows".into()));
        }
        Self::from_flat(field, rows.len(), cols, rows.concat())
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        assert!(v < self.field.q(), "entry {v} outside GF({})", self.field.q());
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    fn same_field(&self, other: &Matrix) -> Result<(), LinalgError> {
        if self.field != other.field {
            return Err(LinalgError::FieldMismatch {
                left: self.field.q(),
                right: other.field.q(),
            });
        }
        Ok(())
    }

    /// Vertical concatenation. Blocks with zero rows are allowed.
    pub fn vstack(blocks: &[&Matrix]) -> Result<Matrix, LinalgError> {
        let Some(first) = blocks.first() else {
            return Err(LinalgError::Shape("vstack of no blocks".into()));
        };
        let cols = first.cols;
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            first.same_field(b)?;
            if b.cols != cols {
                return Err(LinalgError::Shape(format!(
                    "vstack of {} and {} columns",
                    cols, b.cols
                )));
            }
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        Ok(Matrix {
            field: first.field.clone(),
            rows,
            cols,
            data,
        })
    }

    pub fn hstack(&self, right: &Matrix) -> Result<Matrix, LinalgError> {
        self.same_field(right)?;
        if self.rows != right.rows {
            return Err(LinalgError::Shape(format!(
                "hstack of {} and {} rows",
                self.rows, right.rows
            )));
        }
        let cols = self.cols + right.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(right.row(r));
        }
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols,
            data,
        })
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix, LinalgError> {
        self.same_field(rhs)?;
        if self.cols != rhs.rows {
            return Err(LinalgError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * rhs.cols + j;
                    out.data[idx] = f.add_raw(out.data[idx], f.mul_raw(a, rhs.get(k, j)));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[u32]) -> Result<Vec<u32>, LinalgError> {
        if x.len() != self.cols {
            return Err(LinalgError::Shape(format!(
                "vector of length {} for {} columns",
                x.len(),
                self.cols
            )));
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .fold(0, |acc, (&a, &b)| f.add_raw(acc, f.mul_raw(a, b)))
            })
            .collect())
    }

    /// In-place reduction to RREF. Returns the pivot columns.
    fn reduce(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut pr = 0;
        for c in 0..cols {
            if pr == self.rows {
                break;
            }
            let Some(sel) = (pr..self.rows).find(|&r| self.data[r * cols + c] != 0) else {
                continue;
            };
            if sel != pr {
                for j in 0..cols {
                    self.data.swap(sel * cols + j, pr * cols + j);
                }
            }
            let inv = f.inv_raw(self.data[pr * cols + c]).unwrap();
            for j in c..cols {
                let v = &mut self.data[pr * cols + j];
                *v = f.mul_raw(*v, inv);
            }
            for r in 0..self.rows {
                if r == pr {
                    continue;
                }
                let factor = self.data[r * cols + c];
                if factor == 0 {
                    continue;
                }
                for j in c..cols {
                    let t = f.mul_raw(factor, self.data[pr * cols + j]);
                    let v = &mut self.data[r * cols + j];
                    *v = f.sub_raw(*v, t);
                }
            }
            pivots.push(c);
            pr += 1;
        }
        pivots
    }

    /// Reduced row-echelon form and its (strictly increasing) pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.reduce();
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn row_space(&self) -> Subspace {
        Subspace::from_generators(self)
    }

    /// Solves `self * x = y` when the solution is unique.
    pub fn solve_unique(&self, y: &[u32]) -> Result<Vec<u32>, LinalgError> {
        if y.len() != self.rows {
            return Err(LinalgError::Shape(format!(
                "right-hand side of length {} for {} rows",
                y.len(),
                self.rows
            )));
        }
        let rhs = Matrix::from_flat(&self.field, self.rows, 1, y.to_vec())?;
        let (red, pivots) = self.hstack(&rhs)?.rref();
        if pivots.last() == Some(&self.cols) {
            return Err(LinalgError::Inconsistent);
        }
        if pivots.len() < self.cols {
            return Err(LinalgError::Underdetermined {
                rank: pivots.len(),
                unknowns: self.cols,
            });
        }
        Ok((0..self.cols).map(|i| red.get(i, self.cols)).collect())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix[{}x{} over GF({})]", self.rows, self.cols, self.field.q())?;
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(u32::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// A subspace of GF(q)^n held by its canonical (RREF) basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    /// Row space of `generators`.
    pub fn from_generators(generators: &Matrix) -> Self {
        let (red, pivots) = generators.rref();
        let k = pivots.len();
        let basis = Matrix {
            field: red.field.clone(),
            rows: k,
            cols: red.cols,
            data: red.data[..k * red.cols].to_vec(),
        };
        Self { basis, pivots }
    }

    pub fn zero(field: &FieldSpec, ambient: usize) -> Self {
        Self {
            basis: Matrix::zeros(field, 0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: &FieldSpec, ambient: usize) -> Self {
        Self {
            basis: Matrix::identity(field, ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Wraps a basis already known to be in RREF without zero rows.
    pub(crate) fn from_canonical(basis: Matrix, pivots: Vec<usize>) -> Self {
        debug_assert_eq!(basis.rows, pivots.len());
        Self { basis, pivots }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.basis.field
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn compatible(&self, other: &Subspace) -> Result<(), LinalgError> {
        self.basis.same_field(&other.basis)?;
        if self.ambient() != other.ambient() {
            return Err(LinalgError::AmbientMismatch {
                left: self.ambient(),
                right: other.ambient(),
            });
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.compatible(other)?;
        Ok(Subspace::from_generators(&Matrix::vstack(&[
            &self.basis,
            &other.basis,
        ])?))
    }

    /// `dim(self ∩ other)` via `dim U + dim V - dim(U + V)`.
    pub fn intersection_dim(&self, other: &Subspace) -> Result<usize, LinalgError> {
        Ok(self.dim() + other.dim() - self.sum(other)?.dim())
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool, LinalgError> {
        Ok(self.sum(other)?.dim() == self.dim())
    }

    /// Orthogonal complement under the standard bilinear form.
    pub fn dual(&self) -> Subspace {
        let n = self.ambient();
        let f = self.field();
        let free: Vec<usize> = (0..n).filter(|c| !self.pivots.contains(c)).collect();
        let mut gens = Matrix::zeros(f, free.len(), n);
        for (row, &fc) in free.iter().enumerate() {
            gens.data[row * n + fc] = 1;
            for (i, &pc) in self.pivots.iter().enumerate() {
                gens.data[row * n + pc] = f.neg_raw(self.basis.get(i, fc));
            }
        }
        Subspace::from_generators(&gens)
    }
}

impl Ord for Subspace {
    /// Ambient, then dimension, then pivot columns, then basis entries
    /// row-major. Within one Grassmannian this is exactly the enumeration
    /// order of [`crate::grassmann::enumerate_grassmannian`].
    fn cmp(&self, other: &Self) -> Ordering {
        (self.ambient(), self.dim(), &self.pivots, &self.basis.data).cmp(&(
            other.ambient(),
            other.dim(),
            &other.pivots,
            &other.basis.data,
        ))
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for r in 0..self.dim() {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", self.basis.row(r))?;
        }
        write!(f, "> in GF({})^{}", self.field().q(), self.ambient())
    }
}

/// Dimension of the span of a family of subspaces (rank of stacked bases).
pub fn span_dim(spaces: &[&Subspace]) -> Result<usize, LinalgError> {
    let Some(first) = spaces.first() else {
        return Ok(0);
    };
    for s in &spaces[1..] {
        first.compatible(s)?;
    }
    let bases: Vec<&Matrix> = spaces.iter().map(|s| &s.basis).collect();
    Ok(Matrix::vstack(&bases)?.rank())
}

fn big_pow(q: u64, e: u64) -> BigUint {
    num_traits::pow(BigUint::from(q), e as usize)
}

/// Gaussian binomial `[n k]_q`, exact. Returns 0 when `k > n`.
pub fn gaussian_binomial(n: u64, k: u64, q: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= big_pow(q, n - i) - 1u32;
        den *= big_pow(q, k - i) - 1u32;
    }
    num / den
}

/// Number of `m x n` matrices over GF(q) of rank exactly `s`. Zero when `s`
/// exceeds `min(m, n)`.
pub fn count_rank_matrices(m: u64, n: u64, s: u64, q: u64) -> BigUint {
    if s > m.min(n) {
        return BigUint::zero();
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for j in 0..s {
        num *= (big_pow(q, m) - big_pow(q, j)) * (big_pow(q, n) - big_pow(q, j));
        den *= big_pow(q, s) - big_pow(q, j);
    }
    num / den
}

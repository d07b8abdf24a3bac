//! Dense matrices over a [`Field`].
//!
//! Everything here is exact Gaussian elimination with the first nonzero pivot
//! in column order; matrices in this crate are at most a few hundred wide.

use std::fmt;

use thiserror::Error;

use crate::gf::{Elem, Field};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("locators are not pairwise distinct")]
    DuplicateLocators,
    #[error("matrix is singular")]
    Singular,
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("selected columns have rank {rank}, need {needed}")]
    RankDeficient { rank: usize, needed: usize },
    #[error("enumeration of {0} codewords exceeds the limit")]
    TooLarge(u128),
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<u32> = self.row(r).iter().map(|e| e.0).collect();
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Elem::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Elem::ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Elem>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Shape(format!("{} entries for {rows}x{cols}", data.len())));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Elem>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::Shape("ragged rows".into()));
        }
        Ok(Matrix { rows: rows.len(), cols, data: rows.concat() })
    }

    pub fn column(values: &[Elem]) -> Self {
        Matrix { rows: values.len(), cols: 1, data: values.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [Elem] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<Elem> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn as_slice(&self) -> &[Elem] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let data = idx.iter().flat_map(|&r| self.row(r).iter().copied()).collect();
        Matrix { rows: idx.len(), cols: self.cols, data }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, idx.len());
        for r in 0..self.rows {
            for (j, &c) in idx.iter().enumerate() {
                m[(r, j)] = self[(r, c)];
            }
        }
        m
    }

    /// Row-wise concatenation `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Result<Self, LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::Shape(format!("hstack {} vs {} rows", self.rows, other.rows)));
        }
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            m.row_mut(r)[..self.cols].copy_from_slice(self.row(r));
            m.row_mut(r)[self.cols..].copy_from_slice(other.row(r));
        }
        Ok(m)
    }

    pub fn mul(&self, f: &Field, rhs: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::Shape(format!("{}x{} times {}x{}", self.rows, self.cols, rhs.rows, rhs.cols)));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let v = f.add(out[(r, c)], f.mul(a, rhs[(k, c)]));
                    out[(r, c)] = v;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, f: &Field, v: &[Elem]) -> Result<Vec<Elem>, LinalgError> {
        if self.cols != v.len() {
            return Err(LinalgError::Shape(format!("{}x{} times {}", self.rows, self.cols, v.len())));
        }
        Ok((0..self.rows).map(|r| f.dot(self.row(r), v)).collect())
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Elem;

    fn index(&self, (r, c): (usize, usize)) -> &Elem {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Elem {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Entry `(i, j)` is `locators[j] ^ row_exponents[i]`.
pub fn vandermonde(f: &Field, locators: &[Elem], row_exponents: &[u64]) -> Result<Matrix, LinalgError> {
    let mut sorted = locators.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(LinalgError::DuplicateLocators);
    }
    let mut m = Matrix::zeros(row_exponents.len(), locators.len());
    for (i, &t) in row_exponents.iter().enumerate() {
        for (j, &x) in locators.iter().enumerate() {
            m[(i, j)] = f.pow(x, t);
        }
    }
    Ok(m)
}

/// Reduced row echelon form, returning the pivot columns.
pub fn rref(f: &Field, a: &Matrix) -> (Matrix, Vec<usize>) {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows {
            break;
        }
        let Some(p) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else { continue };
        if p != row {
            for c in 0..m.cols {
                m.data.swap(p * m.cols + c, row * m.cols + c);
            }
        }
        let inv = f.inv(m[(row, col)]).expect("pivot is nonzero");
        for c in 0..m.cols {
            m[(row, c)] = f.mul(m[(row, c)], inv);
        }
        for r in 0..m.rows {
            let factor = m[(r, col)];
            if r == row || factor.is_zero() {
                continue;
            }
            for c in 0..m.cols {
                let v = f.sub(m[(r, c)], f.mul(factor, m[(row, c)]));
                m[(r, c)] = v;
            }
        }
        pivots.push(col);
        row += 1;
    }
    (m, pivots)
}

pub fn rank(f: &Field, a: &Matrix) -> usize {
    rref(f, a).1.len()
}

/// Solves `a x = b` for square invertible or overdetermined consistent `a`.
pub fn solve(f: &Field, a: &Matrix, b: &Matrix) -> Result<Matrix, LinalgError> {
    if a.rows != b.rows {
        return Err(LinalgError::Shape(format!("{} equations, {} right-hand rows", a.rows, b.rows)));
    }
    let n = a.cols;
    let (r, pivots) = rref(f, &a.hstack(b)?);
    if pivots.iter().any(|&p| p >= n) {
        return Err(LinalgError::Inconsistent);
    }
    if pivots.len() < n {
        return Err(LinalgError::Singular);
    }
    let mut x = Matrix::zeros(n, b.cols);
    for i in 0..n {
        x.row_mut(i).copy_from_slice(&r.row(i)[n..]);
    }
    Ok(x)
}

pub fn solve_vec(f: &Field, a: &Matrix, b: &[Elem]) -> Result<Vec<Elem>, LinalgError> {
    Ok(solve(f, a, &Matrix::column(b))?.data)
}

pub fn inverse(f: &Field, a: &Matrix) -> Result<Matrix, LinalgError> {
    if a.rows != a.cols {
        return Err(LinalgError::Shape(format!("inverse of {}x{}", a.rows, a.cols)));
    }
    solve(f, a, &Matrix::identity(a.rows))
}

/// Rows form a basis of `{x : a x = 0}`.
pub fn null_space(f: &Field, a: &Matrix) -> Matrix {
    let (r, pivots) = rref(f, a);
    let free: Vec<usize> = (0..a.cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Matrix::zeros(free.len(), a.cols);
    for (k, &fc) in free.iter().enumerate() {
        basis[(k, fc)] = Elem::ONE;
        for (i, &pc) in pivots.iter().enumerate() {
            basis[(k, pc)] = f.neg(r[(i, fc)]);
        }
    }
    basis
}

/// Builds `A*` (`h x rows(v)`, rank `h`) with `A* v` equal to the identity on
/// `target_cols` and zero on `zero_cols`.
///
/// The joint submatrix `v[:, target ++ zero]` must be square and invertible;
/// `A*` is the first `h` rows of its inverse.
pub fn partial_identity_transform(
    f: &Field,
    v: &Matrix,
    target_cols: &[usize],
    zero_cols: &[usize],
) -> Result<Matrix, LinalgError> {
    let h = target_cols.len();
    let joint: Vec<usize> = target_cols.iter().chain(zero_cols).copied().collect();
    if joint.len() != v.rows {
        return Err(LinalgError::Shape(format!("{} target + {} zero columns for {} rows", h, zero_cols.len(), v.rows)));
    }
    if joint.iter().any(|&c| c >= v.cols) {
        return Err(LinalgError::Shape("column index out of range".into()));
    }
    let sub = v.select_cols(&joint);
    let inv = inverse(f, &sub).map_err(|e| match e {
        LinalgError::Singular | LinalgError::Inconsistent => {
            LinalgError::RankDeficient { rank: rank(f, &sub), needed: v.rows }
        }
        other => other,
    })?;
    Ok(inv.select_rows(&(0..h).collect::<Vec<_>>()))
}

/// Minimum Hamming weight over all nonzero `x G`, where `G` has one generator
/// per row. Enumerates `q^rows` messages.
pub fn min_distance_bruteforce(f: &Field, generator: &Matrix, limit: u128) -> Result<usize, LinalgError> {
    let q = f.order() as u128;
    let total = q.checked_pow(generator.rows as u32).unwrap_or(u128::MAX);
    if total > limit {
        return Err(LinalgError::TooLarge(total));
    }
    let k = generator.rows;
    let n = generator.cols;
    let mut coeffs = vec![0u32; k];
    let mut word = vec![Elem::ZERO; n];
    let mut best = usize::MAX;
    // Odometer over coefficient vectors; a step at `pos` moves its coefficient
    // to the next representation and updates the word by the difference.
    loop {
        let mut pos = 0;
        loop {
            if pos == k {
                return Ok(best);
            }
            let old = Elem(coeffs[pos]);
            let wrapped = coeffs[pos] + 1 == f.order();
            coeffs[pos] = if wrapped { 0 } else { coeffs[pos] + 1 };
            let delta = f.sub(Elem(coeffs[pos]), old);
            for (w, &g) in word.iter_mut().zip(generator.row(pos)) {
                *w = f.add(*w, f.mul(delta, g));
            }
            if !wrapped {
                break;
            }
            pos += 1;
        }
        let weight = word.iter().filter(|e| !e.is_zero()).count();
        if weight > 0 {
            best = best.min(weight);
        }
    }
}

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{ExactError, Rational};

/// Dense row-major matrix over [`Rational`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self, ExactError> {
        if entries.len() != rows * cols {
            return Err(ExactError::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(Matrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds a matrix from rows; every row must have the same length.
    pub fn from_rows(rows: &[Vec<Rational>]) -> Result<Self, ExactError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(ExactError::DimensionMismatch { expected: cols, found: row.len() });
            }
            entries.extend(row.iter().cloned());
        }
        Ok(Matrix { rows: rows.len(), cols, entries })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Rational>], height: usize) -> Result<Self, ExactError> {
        let mut m = Matrix::zeros(height, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != height {
                return Err(ExactError::DimensionMismatch { expected: height, found: col.len() });
            }
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        Ok(m)
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<Rational>> =
            rows.iter().map(|r| r.iter().map(|&x| Rational::from(x)).collect()).collect();
        Matrix::from_rows(&rows).expect("ragged integer rows")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Result<Vec<Rational>, ExactError> {
        if x.len() != self.cols {
            return Err(ExactError::DimensionMismatch { expected: self.cols, found: x.len() });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Scales every row by the lcm of its denominators. Returns the integer rows
    /// together with the per-row scale factors.
    fn integer_rows(&self) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
        let mut out = Vec::with_capacity(self.rows);
        let mut scales = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let row = self.row(i);
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            out.push(row.iter().map(|x| x.numer() * (&l / x.denom())).collect());
            scales.push(l);
        }
        (out, scales)
    }
}

/// Fraction-free (Bareiss) reduction of an integer matrix to row echelon form in
/// place. Returns the pivot columns and the number of row swaps performed.
/// Entries below and left of each pivot are zeroed; every division is exact.
fn bareiss_echelon(m: &mut [Vec<BigInt>], cols: usize) -> (Vec<usize>, usize) {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut swaps = 0;
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            m.swap(p, r);
            swaps += 1;
        }
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = (&m[i][j] * &m[r][c] - &m[i][c] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        // Rows above r keep their entries; only the trailing block is updated.
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    (pivots, swaps)
}

/// Exact determinant via fraction-free elimination.
pub fn det(m: &Matrix) -> Result<Rational, ExactError> {
    if m.rows != m.cols {
        return Err(ExactError::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(Rational::one());
    }
    let (mut rows, scales) = m.integer_rows();
    let (pivots, swaps) = bareiss_echelon(&mut rows, n);
    if pivots.len() < n {
        return Ok(Rational::zero());
    }
    let mut d = rows[n - 1][n - 1].clone();
    if swaps % 2 == 1 {
        d = -d;
    }
    let scale = scales.iter().fold(BigInt::one(), |acc, s| acc * s);
    Ok(Rational::new(d, scale))
}

/// Exact rank via fraction-free elimination.
pub fn rank(m: &Matrix) -> usize {
    let (mut rows, _) = m.integer_rows();
    bareiss_echelon(&mut rows, m.cols).0.len()
}

/// Full solution set of `A x = b`: `particular + span(kernel)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: Vec<Rational>,
    pub kernel: Vec<Vec<Rational>>,
}

impl AffineSolution {
    pub fn is_unique(&self) -> bool {
        self.kernel.is_empty()
    }

    /// `particular + Σ coeffs[i] · kernel[i]`.
    pub fn point(&self, coeffs: &[Rational]) -> Vec<Rational> {
        let mut x = self.particular.clone();
        for (c, k) in coeffs.iter().zip(&self.kernel) {
            for (xi, ki) in x.iter_mut().zip(k) {
                *xi += c * ki;
            }
        }
        x
    }
}

/// Solves `A x = b` exactly. Returns `Ok(None)` when the system is inconsistent.
pub fn solve_affine(a: &Matrix, b: &[Rational]) -> Result<Option<AffineSolution>, ExactError> {
    if b.len() != a.rows {
        return Err(ExactError::DimensionMismatch { expected: a.rows, found: b.len() });
    }
    let n = a.cols;
    let mut aug = Matrix::zeros(a.rows, n + 1);
    for (i, bi) in b.iter().enumerate() {
        for j in 0..n {
            aug.set(i, j, a.get(i, j).clone());
        }
        aug.set(i, n, bi.clone());
    }
    let (mut rows, _) = aug.integer_rows();
    let (pivots, _) = bareiss_echelon(&mut rows, n + 1);
    if pivots.last() == Some(&n) {
        return Ok(None);
    }

    // Back substitution over the rationals on the (small) echelon form.
    let echelon: Vec<Vec<Rational>> = rows[..pivots.len()]
        .iter()
        .map(|r| r.iter().cloned().map(Rational::from_integer).collect())
        .collect();
    let is_pivot: Vec<bool> = (0..n).map(|c| pivots.contains(&c)).collect();
    let back_solve = |free: &[Rational], rhs_on: bool| -> Vec<Rational> {
        let mut x = free.to_vec();
        for (r, &pc) in pivots.iter().enumerate().rev() {
            let row = &echelon[r];
            let mut acc = if rhs_on { row[n].clone() } else { Rational::zero() };
            for j in pc + 1..n {
                if !row[j].is_zero() && !x[j].is_zero() {
                    acc -= &row[j] * &x[j];
                }
            }
            x[pc] = acc / &row[pc];
        }
        x
    };

    let particular = back_solve(&vec![Rational::zero(); n], true);
    let kernel = (0..n)
        .filter(|&c| !is_pivot[c])
        .map(|f| {
            let mut free = vec![Rational::zero(); n];
            free[f] = Rational::one();
            back_solve(&free, false)
        })
        .collect();
    Ok(Some(AffineSolution { particular, kernel }))
}

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::rational::Rational;
use crate::error::{Error, Result};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::invalid("ragged matrix rows"));
        }
        Ok(Self {
            rows: n_rows,
            cols: n_cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Build from columns; every column must have `rows` entries.
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::invalid("column length does not match row count"));
            }
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
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

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                m[(i, k)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        if x.len() != self.cols {
            return Err(Error::invalid(format!(
                "vector of length {} cannot multiply a {}x{} matrix",
                x.len(),
                self.rows,
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }
}

impl std::ops::Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|r| r.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Scale each row by the lcm of its denominators, giving an integer matrix with
/// the same row space and the same solution set.
fn integer_rows(m: &RationalMatrix, rhs: Option<&[Rational]>) -> Vec<Vec<BigInt>> {
    (0..m.rows)
        .map(|i| {
            let mut row: Vec<&Rational> = m.row(i).iter().collect();
            if let Some(b) = rhs {
                row.push(&b[i]);
            }
            let lcm = row
                .iter()
                .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
            row.iter()
                .map(|r| r.numer() * (&lcm / r.denom()))
                .collect()
        })
        .collect()
}

/// Fraction-free (Bareiss) forward elimination over the first `elim_cols`
/// columns, skipping columns without a pivot. Returns the pivot columns in order.
/// Every intermediate entry is a minor of the input, so the exact divisions
/// never leave the integers.
fn bareiss_echelon(m: &mut [Vec<BigInt>], elim_cols: usize) -> Vec<usize> {
    let n_rows = m.len();
    let width = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..elim_cols {
        if r == n_rows {
            break;
        }
        let Some(p) = (r..n_rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..n_rows {
            for j in c + 1..width {
                let v = (&m[r][c] * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Exact rank by fraction-free elimination.
pub fn rank(a: &RationalMatrix) -> usize {
    if a.rows == 0 || a.cols == 0 {
        return 0;
    }
    let mut m = integer_rows(a, None);
    bareiss_echelon(&mut m, a.cols).len()
}

/// Solve `A x = b` for `A` with at least as many rows as columns.
///
/// Returns the unique solution when the columns of `A` are linearly independent
/// and the system is consistent, `None` otherwise.
pub fn solve_square_system(a: &RationalMatrix, b: &[Rational]) -> Result<Option<Vec<Rational>>> {
    if b.len() != a.rows {
        return Err(Error::invalid(format!(
            "right-hand side has length {} but the matrix has {} rows",
            b.len(),
            a.rows
        )));
    }
    if a.cols > a.rows {
        return Err(Error::invalid(format!(
            "system has more unknowns ({}) than equations ({})",
            a.cols, a.rows
        )));
    }
    let n = a.cols;
    if n == 0 {
        return Ok(if b.iter().all(Zero::is_zero) {
            Some(Vec::new())
        } else {
            None
        });
    }
    let mut m = integer_rows(a, Some(b));
    let pivots = bareiss_echelon(&mut m, n);
    if pivots.len() < n {
        return Ok(None);
    }
    // Rows below the triangle must reduce to 0 = 0.
    if m[n..].iter().any(|row| !row[n].is_zero()) {
        return Ok(None);
    }
    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Rational::from_integer(m[i][n].clone());
        for j in i + 1..n {
            acc -= Rational::from_integer(m[i][j].clone()) * &x[j];
        }
        x[i] = acc / Rational::from_integer(m[i][i].clone());
    }
    Ok(Some(x))
}

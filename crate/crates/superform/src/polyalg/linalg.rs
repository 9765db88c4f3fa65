use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rat;

/// A dense matrix over the rationals, row-major.
///
/// Only the handful of exact operations the crate needs: multiplication,
/// rank (fraction-free elimination over the integers), reduced row echelon
/// form and kernels.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            assert_eq!(row.len(), ncols, "ragged rows");
            data.extend(row);
        }
        Mat {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rat) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.at(i, j).clone());
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "shape mismatch");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let add = a * rhs.at(k, j);
                    let cur = out.at(i, j) + &add;
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn vstack(blocks: &[Mat]) -> Mat {
        assert!(!blocks.is_empty());
        let cols = blocks[0].cols;
        let mut rows = Vec::new();
        for b in blocks {
            assert_eq!(b.cols, cols, "column count mismatch");
            for i in 0..b.rows {
                rows.push(b.row(i).to_vec());
            }
        }
        if rows.is_empty() {
            return Mat::zeros(0, cols);
        }
        Mat::from_rows(rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rat::is_zero)
    }

    /// Rank by fraction-free (Bareiss) elimination on the integer matrix
    /// obtained by clearing each row's denominators.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| clear_denominators(self.row(i)))
            .collect();
        let mut prev = BigInt::one();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(pivot) = (rank..self.rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, pivot);
            for r in rank + 1..self.rows {
                for c in col + 1..self.cols {
                    let num = &m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c];
                    m[r][c] = num / &prev;
                }
                m[r][col] = BigInt::zero();
            }
            prev = m[rank][col].clone();
            rank += 1;
        }
        rank
    }

    /// Reduced row echelon form together with the pivot column indices.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for col in 0..m.cols {
            let Some(pivot) = (lead..m.rows).find(|&r| !m.at(r, col).is_zero()) else {
                continue;
            };
            for j in 0..m.cols {
                let tmp = m.at(pivot, j).clone();
                m.set(pivot, j, m.at(lead, j).clone());
                m.set(lead, j, tmp);
            }
            let inv = m.at(lead, col).recip();
            for j in 0..m.cols {
                let scaled = m.at(lead, j) * &inv;
                m.set(lead, j, scaled);
            }
            for r in 0..m.rows {
                if r == lead || m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col).clone();
                for j in 0..m.cols {
                    let val = m.at(r, j) - &(&factor * m.at(lead, j));
                    m.set(r, j, val);
                }
            }
            pivots.push(col);
            lead += 1;
            if lead == m.rows {
                break;
            }
        }
        (m, pivots)
    }

    /// A basis of `{ v : self * v = 0 }`, one vector per non-pivot column.
    pub fn null_space(&self) -> Vec<Vec<Rat>> {
        let (rref, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = vec![Rat::zero(); self.cols];
            v[free] = Rat::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -rref.at(r, free);
            }
            basis.push(v);
        }
        basis
    }

    /// Determinant of a square matrix, by fraction-free elimination with a
    /// rational correction for the row scalings.
    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Rat::one();
        }
        let mut scale = Rat::one();
        let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for i in 0..n {
            let (cleared, factor) = clear_denominators_with_factor(self.row(i));
            scale = scale * factor;
            m.push(cleared);
        }
        let mut prev = BigInt::one();
        let mut sign = 1i64;
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
                return Rat::zero();
            };
            if pivot != col {
                m.swap(col, pivot);
                sign = -sign;
            }
            for r in col + 1..n {
                for c in col + 1..n {
                    let num = &m[col][col] * &m[r][c] - &m[r][col] * &m[col][c];
                    m[r][c] = num / &prev;
                }
                m[r][col] = BigInt::zero();
            }
            prev = m[col][col].clone();
        }
        let det_int = Rat::from(m[n - 1][n - 1].clone());
        let signed = if sign < 0 { -det_int } else { det_int };
        signed / scale
    }

    /// Determinant of the square submatrix with the given rows and columns.
    pub fn minor_det(&self, rows: &[usize], cols: &[usize]) -> Rat {
        assert_eq!(rows.len(), cols.len());
        let sub = Mat::from_rows(
            rows.iter()
                .map(|&i| cols.iter().map(|&j| self.at(i, j).clone()).collect())
                .collect(),
        );
        if rows.is_empty() {
            return Rat::one();
        }
        sub.det()
    }
}

fn clear_denominators(row: &[Rat]) -> Vec<BigInt> {
    clear_denominators_with_factor(row).0
}

/// Returns the integer row and the factor by which it was multiplied.
fn clear_denominators_with_factor(row: &[Rat]) -> (Vec<BigInt>, Rat) {
    let mut lcm = BigInt::one();
    for x in row {
        lcm = lcm.lcm(x.denom());
    }
    let ints = row
        .iter()
        .map(|x| {
            let scaled = x * &Rat::from(lcm.clone());
            debug_assert!(scaled.denom().is_one());
            scaled.numer().clone()
        })
        .collect();
    (ints, Rat::from(lcm))
}

/// Scale a rational row to a primitive integer row, preserving sign (the
/// scaling factor is positive). Returns all zeros for the zero row.
pub(crate) fn primitive_integer_row(row: &[Rat]) -> Vec<BigInt> {
    let ints = clear_denominators(row);
    let mut gcd = BigInt::zero();
    for x in &ints {
        gcd = gcd.gcd(x);
    }
    if gcd.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &gcd).collect()
}

/// Positive-leading-sign variant used to canonicalize equality rows.
pub(crate) fn primitive_signed_row(row: &[Rat]) -> Vec<BigInt> {
    let mut ints = primitive_integer_row(row);
    if let Some(first) = ints.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in &mut ints {
                *x = -x.clone();
            }
        }
    }
    ints
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(Rat::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

//! Small dense complex matrices with partial-pivot elimination.
//!
//! The transmission systems are 3×3, 3×4 or 4×4, so everything here is
//! written for clarity rather than blocking or vectorisation.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::C64;

#[derive(Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row slices. Panics on ragged input.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(nr * nc);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), nc, "ragged rows");
            data.extend_from_slice(r);
        }
        CMat { rows: nr, cols: nc, data }
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let c: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&c)
    }

    pub fn from_columns(cols: &[Vec<C64>]) -> Self {
        let nc = cols.len();
        let nr = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(nr, nc);
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), nr, "ragged columns");
            for (i, &v) in c.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut m = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..other.cols {
                    m[(i, j)] += a * other[(k, j)];
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Euclidean norms of the rows.
    pub fn row_norms(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .collect()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn lu(&self) -> Option<Lu> {
        Lu::new(self)
    }

    /// Determinant by partial-pivot elimination. Square matrices only.
    pub fn det(&self) -> C64 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        match Lu::new(self) {
            Some(lu) => lu.det(),
            None => C64::new(0.0, 0.0),
        }
    }

    pub fn solve(&self, b: &[C64]) -> Option<Vec<C64>> {
        Lu::new(self).map(|lu| lu.solve(b))
    }

    /// Numerical rank by row reduction with partial pivoting.
    ///
    /// A pivot counts when it exceeds `rel_tol` times the largest entry.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let mut a = self.clone();
        let tol = rel_tol * self.max_abs().max(f64::MIN_POSITIVE);
        let mut rank = 0;
        for col in 0..a.cols {
            if rank == a.rows {
                break;
            }
            let (piv, pmax) = (rank..a.rows)
                .map(|i| (i, a[(i, col)].norm()))
                .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax <= tol {
                continue;
            }
            a.swap_rows(piv, rank);
            let p = a[(rank, col)];
            for i in rank + 1..a.rows {
                let f = a[(i, col)] / p;
                if f != C64::new(0.0, 0.0) {
                    for j in col..a.cols {
                        let v = a[(rank, j)];
                        a[(i, j)] -= f * v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Minimum-norm solution `x = Aᴴ (A Aᴴ)⁻¹ b` of a full-row-rank wide system.
    pub fn min_norm_solve(&self, b: &[C64]) -> Option<Vec<C64>> {
        let ah = self.adjoint();
        let gram = self.matmul(&ah);
        let y = gram.solve(b)?;
        Some(ah.mul_vec(&y))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>12.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Packed LU factors with row permutation, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    lu: CMat,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    /// Returns `None` when a pivot is exactly zero or not finite.
    pub fn new(a: &CMat) -> Option<Self> {
        assert_eq!(a.rows, a.cols, "LU of a non-square matrix");
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let mut piv = k;
            let mut pmax = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > pmax {
                    pmax = v;
                    piv = i;
                }
            }
            if pmax == 0.0 || !pmax.is_finite() {
                return None;
            }
            if piv != k {
                lu.swap_rows(piv, k);
                perm.swap(piv, k);
                swaps += 1;
            }
            let p = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / p;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    let v = lu[(k, j)];
                    lu[(i, j)] -= f * v;
                }
            }
        }
        Some(Lu { n, lu, perm, swaps })
    }

    pub fn det(&self) -> C64 {
        let mut d = C64::new(if self.swaps.is_multiple_of(2) { 1.0 } else { -1.0 }, 0.0);
        for k in 0..self.n {
            d *= self.lu[(k, k)];
        }
        d
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let v = x[k];
                x[i] -= self.lu[(i, k)] * v;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let v = x[k];
                x[i] -= self.lu[(i, k)] * v;
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }
}

/// Max-norm of a complex vector.
pub fn norm_inf(v: &[C64]) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

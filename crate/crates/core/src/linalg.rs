//! Dense exact linear algebra over a field: reduced row echelon form,
//! rank, solving, nullspaces and inverses.
//!
//! Used both over Gaussian rationals (pointwise checks) and over rational
//! functions (frame changes of basis, witness solves).

use std::fmt;

use num_traits::{One, Zero};

use crate::coeffs::{Chart, GaussianRational, RationalFn};

/// The operations Gauss-Jordan elimination needs. `weight` is a size
/// heuristic used to pick cheap pivots.
pub trait Field: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn add_elem(&self, o: &Self) -> Self;
    fn sub_elem(&self, o: &Self) -> Self;
    fn mul_elem(&self, o: &Self) -> Self;
    fn neg_elem(&self) -> Self;
    fn inv_elem(&self) -> Option<Self>;
    fn weight(&self) -> usize;
}

impl Field for GaussianRational {
    fn zero_like(&self) -> Self {
        GaussianRational::zero()
    }
    fn one_like(&self) -> Self {
        GaussianRational::one()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_elem(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_elem(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_elem(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_elem(&self) -> Self {
        -self
    }
    fn inv_elem(&self) -> Option<Self> {
        self.inv()
    }
    fn weight(&self) -> usize {
        self.bit_size() as usize
    }
}

impl Field for RationalFn {
    fn zero_like(&self) -> Self {
        RationalFn::zero(self.chart())
    }
    fn one_like(&self) -> Self {
        RationalFn::one(self.chart())
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_elem(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_elem(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_elem(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_elem(&self) -> Self {
        -self
    }
    fn inv_elem(&self) -> Option<Self> {
        self.inv()
    }
    fn weight(&self) -> usize {
        RationalFn::weight(self)
    }
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn filled(rows: usize, cols: usize, value: F) -> Self {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn identity(n: usize, zero: &F) -> Self {
        let mut m = Self::filled(n, n, zero.zero_like());
        for i in 0..n {
            m[(i, i)] = zero.one_like();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn mul(&self, o: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let zero = self.data.first().or(o.data.first()).expect("empty product").zero_like();
        let mut out = Matrix::filled(self.rows, o.cols, zero);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero_elem() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero_elem() {
                        out[(i, j)] = out[(i, j)].add_elem(&a.mul_elem(b));
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = v[0].zero_like();
                for (a, x) in self.row(i).iter().zip(v) {
                    if !a.is_zero_elem() && !x.is_zero_elem() {
                        acc = acc.add_elem(&a.mul_elem(x));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Field::is_zero_elem)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Gauss-Jordan elimination in place on the first `ncols` columns.
    /// Returns the pivot columns. Pivots are chosen by smallest weight.
    fn reduce(&mut self, ncols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..ncols {
            if r == self.rows {
                break;
            }
            let best = (r..self.rows).filter(|&i| !self[(i, c)].is_zero_elem()).min_by_key(|&i| self[(i, c)].weight());
            let Some(p) = best else { continue };
            self.swap_rows(r, p);
            let inv = self[(r, c)].inv_elem().expect("nonzero pivot is invertible");
            for j in c..self.cols {
                if !self[(r, j)].is_zero_elem() {
                    self[(r, j)] = self[(r, j)].mul_elem(&inv);
                }
            }
            let pivot_row: Vec<F> = self.row(r).to_vec();
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero_elem() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for j in c..self.cols {
                    if !pivot_row[j].is_zero_elem() {
                        self[(i, j)] = self[(i, j)].sub_elem(&f.mul_elem(&pivot_row[j]));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix<F>, Vec<usize>) {
        let mut m = self.clone();
        let p = m.reduce(self.cols);
        (m, p)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A particular solution of `self * x = b` (free variables set to
    /// zero), or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(self.rows, b.len(), "dimension mismatch");
        let mut aug = Matrix::filled(self.rows, self.cols + 1, b.first()?.zero_like());
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let pivots = aug.reduce(self.cols);
        for i in pivots.len()..self.rows {
            if !aug[(i, self.cols)].is_zero_elem() {
                return None;
            }
        }
        let mut x = vec![b[0].zero_like(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug[(r, self.cols)].clone();
        }
        Some(x)
    }

    /// Basis of the right nullspace.
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        let Some(zero) = self.data.first().map(Field::zero_like) else {
            return Vec::new();
        };
        let (m, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![zero.clone(); self.cols];
                v[f] = zero.one_like();
                for (r, &c) in pivots.iter().enumerate() {
                    v[c] = m[(r, f)].neg_elem();
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<Matrix<F>> {
        if self.rows != self.cols || self.rows == 0 {
            return None;
        }
        let n = self.rows;
        let zero = self.data[0].zero_like();
        let mut aug = Matrix::filled(n, 2 * n, zero.clone());
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = zero.one_like();
        }
        if aug.reduce(n).len() < n {
            return None;
        }
        let mut inv = Matrix::filled(n, n, zero);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Some(inv)
    }
}

impl<F> std::ops::Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F> std::ops::IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

/// Evaluates a rational-function matrix at a point.
pub fn eval_matrix(m: &Matrix<RationalFn>, point: &[GaussianRational]) -> crate::Result<Matrix<GaussianRational>> {
    let mut rows = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        rows.push(m.row(i).iter().map(|x| x.eval(point)).collect::<crate::Result<Vec<_>>>()?);
    }
    Ok(Matrix::from_rows(rows))
}

/// Zero matrix of rational functions on `chart`.
pub fn zeros(chart: Chart, rows: usize, cols: usize) -> Matrix<RationalFn> {
    Matrix::filled(rows, cols, RationalFn::zero(chart))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    fn m(rows: &[&[i64]]) -> Matrix<GaussianRational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(a.mul_vec(&ns[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = m(&[&[1, 1], &[1, -1]]);
        let x = a.solve(&[q(3), q(1)]).unwrap();
        assert_eq!(x, vec![q(2), q(1)]);
        let b = m(&[&[1, 1], &[2, 2]]);
        assert!(b.solve(&[q(1), q(3)]).is_none());
    }

    #[test]
    fn inverse_roundtrip_over_rational_functions() {
        let c = Chart::new(2);
        let z1 = RationalFn::var(c, 0);
        let one = RationalFn::one(c);
        let a = Matrix::from_rows(vec![vec![z1.clone(), one.clone()], vec![one.clone(), RationalFn::zero(c)]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2, &one));
        let sing = Matrix::from_rows(vec![vec![z1.clone(), z1.clone()], vec![one.clone(), one.clone()]]);
        assert!(sing.inverse().is_none());
    }
}

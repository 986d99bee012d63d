use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{int_to_rat, Rat};

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Display> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| self.data[i * self.cols + j].to_string())
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl<T: Clone + Zero> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Builds a `dim × cols.len()` matrix whose columns are the inputs.
    pub fn from_cols(dim: usize, cols: &[Vec<T>]) -> Self {
        let mut m = Mat::zeros(dim, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), dim, "column length mismatch");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn to_cols(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// Keeps the first `n` columns.
    pub fn truncate_cols(&self, n: usize) -> Self {
        let mut m = Mat::zeros(self.rows, n);
        for i in 0..self.rows {
            for j in 0..n {
                m[(i, j)] = self[(i, j)].clone();
            }
        }
        m
    }
}

impl<T: Clone + Zero + One> Mat<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T>
    where
        for<'a> &'a T: Mul<&'a T, Output = T>,
    {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a, T> Mul<&'a Mat<T>> for &'a Mat<T>
where
    T: Clone + Zero,
    for<'b> &'b T: Mul<&'b T, Output = T>,
{
    type Output = Mat<T>;

    fn mul(self, rhs: &'a Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, rhs.rows, "matrix shape mismatch");
        let mut out: Mat<T> = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let p = a * &rhs[(k, j)];
                    out[(i, j)] = out[(i, j)].clone() + p;
                }
            }
        }
        out
    }
}

/// Outcome of [`Mat::solve`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<Rat>),
    Inconsistent,
    Underdetermined,
}

impl Solution {
    pub fn unique(self) -> Option<Vec<Rat>> {
        match self {
            Solution::Unique(x) => Some(x),
            _ => None,
        }
    }
}

impl Mat<BigInt> {
    pub fn to_rat(&self) -> Mat<Rat> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(int_to_rat).collect(),
        }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        self.to_rat().rank()
    }

    pub fn det(&self) -> BigInt {
        self.to_rat().det().to_integer()
    }
}

impl Mat<Rat> {
    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Mat<Rat>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                m[(r, j)] = &m[(r, j)] * &inv;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for j in c..m.cols {
                    let sub = &factor * &m[(r, j)];
                    m[(i, j)] -= sub;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Rat::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let pivot = m[(c, c)].clone();
            det *= &pivot;
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let factor = &m[(i, c)] / &pivot;
                for j in c..n {
                    let sub = &factor * &m[(c, j)];
                    m[(i, j)] -= sub;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Mat<Rat>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Mat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rat::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Exact solution of `A x = b`, distinguishing inconsistent systems
    /// from those with a positive-dimensional solution set.
    pub fn solve(&self, b: &[Rat]) -> Solution {
        assert_eq!(b.len(), self.rows, "right-hand side length mismatch");
        let mut aug = Mat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Solution::Inconsistent;
        }
        if pivots.len() < self.cols {
            return Solution::Underdetermined;
        }
        Solution::Unique((0..self.cols).map(|i| r[(i, self.cols)].clone()).collect())
    }

    /// Integer matrix `q·A` with `q` the lcm of all denominators.
    pub fn clear_denominators(&self) -> (Mat<BigInt>, BigInt) {
        let q = super::common_denominator(self.data.iter());
        let qr = int_to_rat(&q);
        let data = self.data.iter().map(|x| (x * &qr).to_integer()).collect();
        (
            Mat {
                rows: self.rows,
                cols: self.cols,
                data,
            },
            q,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::super::{frac, rat};
    use super::*;
    use proptest::prelude::*;

    fn rmat(rows: &[&[i64]]) -> Mat<Rat> {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let b = vec![frac(1, 2), rat(-3), frac(7, 5)];
        assert_eq!(Mat::identity(3).solve(&b), Solution::Unique(b));
    }

    #[test]
    fn all_ones_dual_vector() {
        // <u, e_i> = 1 on the standard basis forces u = (1, ..., 1)
        let a = Mat::<Rat>::identity(4);
        let x = a.solve(&vec![rat(1); 4]).unique().unwrap();
        assert_eq!(x, vec![rat(1); 4]);
    }

    #[test]
    fn box_coefficients_for_f() {
        // f = (e_1 + ... + e_6)/3 in the cone over e_1..e_6
        let a = Mat::<Rat>::identity(6);
        let f = vec![frac(1, 3); 6];
        assert_eq!(a.solve(&f).unique().unwrap(), vec![frac(1, 3); 6]);
    }

    #[test]
    fn inconsistent_and_underdetermined() {
        let a = rmat(&[&[1, 1], &[1, 1]]);
        assert_eq!(a.solve(&[rat(1), rat(2)]), Solution::Inconsistent);
        assert_eq!(a.solve(&[rat(1), rat(1)]), Solution::Underdetermined);
        let tall = rmat(&[&[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(
            tall.solve(&[rat(1), rat(2), rat(3)]),
            Solution::Unique(vec![rat(1), rat(2)])
        );
        assert_eq!(tall.solve(&[rat(1), rat(2), rat(4)]), Solution::Inconsistent);
    }

    #[test]
    fn det_and_inverse() {
        let a = rmat(&[&[2, 1], &[0, 1]]);
        assert_eq!(a.det(), rat(2));
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, Mat::identity(2));
        assert!(rmat(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    proptest! {
        #[test]
        fn solutions_satisfy_system(
            entries in proptest::collection::vec(-4i64..5, 9),
            rhs in proptest::collection::vec(-6i64..7, 3),
        ) {
            let a = Mat::from_rows(entries.chunks(3).map(|r| r.iter().map(|&x| rat(x)).collect()).collect());
            let b: Vec<Rat> = rhs.iter().map(|&x| rat(x)).collect();
            match a.solve(&b) {
                Solution::Unique(x) => prop_assert_eq!(a.mul_vec(&x), b),
                Solution::Inconsistent => prop_assert!(a.rank() < 3),
                Solution::Underdetermined => prop_assert!(a.rank() < 3),
            }
        }
    }
}

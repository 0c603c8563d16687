//! Smith normal form over the integers.
//!
//! Pivoting always picks the nonzero entry of smallest absolute value in the
//! remaining submatrix, ties broken by row-major position, so output is a
//! deterministic function of the input.

use super::matrix::Matrix;
use super::scalar::Int;

/// `u * m * v == d` with `u`, `v` unimodular and `d` diagonal, each diagonal
/// entry dividing the next. The inverses of `u` and `v` are tracked alongside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith<T> {
    pub u: Matrix<T>,
    pub d: Matrix<T>,
    pub v: Matrix<T>,
    pub u_inv: Matrix<T>,
    pub v_inv: Matrix<T>,
}

impl<T: Int> Smith<T> {
    /// The `min(rows, cols)` diagonal entries of `d`, nonnegative, zeros last.
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

struct Reducer<T> {
    a: Matrix<T>,
    u: Matrix<T>,
    u_inv: Matrix<T>,
    v: Matrix<T>,
    v_inv: Matrix<T>,
}

impl<T: Int> Reducer<T> {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
        self.v_inv.swap_rows(i, j);
    }

    fn add_row(&mut self, dst: usize, src: usize, c: &T) {
        self.a.add_row_multiple(dst, src, c);
        self.u.add_row_multiple(dst, src, c);
        self.u_inv.add_col_multiple(src, dst, &-c.clone());
    }

    fn add_col(&mut self, dst: usize, src: usize, c: &T) {
        self.a.add_col_multiple(dst, src, c);
        self.v.add_col_multiple(dst, src, c);
        self.v_inv.add_row_multiple(src, dst, &-c.clone());
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    fn pivot(&self, k: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in k..self.a.rows() {
            for j in k..self.a.cols() {
                let x = &self.a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.a[(bi, bj)].abs() <= x.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    /// Clears row and column `k` by division with remainder. Returns `false`
    /// if a nonzero remainder was left behind.
    fn eliminate(&mut self, k: usize) -> bool {
        let p = self.a[(k, k)].clone();
        let mut clean = true;
        for i in k + 1..self.a.rows() {
            if self.a[(i, k)].is_zero() {
                continue;
            }
            let q = self.a[(i, k)].clone() / p.clone();
            self.add_row(i, k, &-q);
            clean &= self.a[(i, k)].is_zero();
        }
        for j in k + 1..self.a.cols() {
            if self.a[(k, j)].is_zero() {
                continue;
            }
            let q = self.a[(k, j)].clone() / p.clone();
            self.add_col(j, k, &-q);
            clean &= self.a[(k, j)].is_zero();
        }
        clean
    }

    fn first_non_multiple(&self, k: usize) -> Option<usize> {
        let p = &self.a[(k, k)];
        (k + 1..self.a.rows())
            .find(|&i| (k + 1..self.a.cols()).any(|j| !self.a[(i, j)].is_multiple_of(p)))
    }
}

/// Computes the Smith normal form of `m`. Total: an empty matrix gives
/// identity transforms and an empty diagonal.
pub fn smith_normal_form<T: Int>(m: &Matrix<T>) -> Smith<T> {
    let mut r = Reducer {
        a: m.clone(),
        u: Matrix::identity(m.rows()),
        u_inv: Matrix::identity(m.rows()),
        v: Matrix::identity(m.cols()),
        v_inv: Matrix::identity(m.cols()),
    };
    for k in 0..m.rows().min(m.cols()) {
        loop {
            let Some((pi, pj)) = r.pivot(k) else { break };
            r.swap_rows(k, pi);
            r.swap_cols(k, pj);
            if !r.eliminate(k) {
                continue;
            }
            if let Some(i) = r.first_non_multiple(k) {
                r.add_row(k, i, &T::one());
                continue;
            }
            if r.a[(k, k)].is_negative() {
                r.negate_row(k);
            }
            break;
        }
    }
    Smith {
        u: r.u,
        d: r.a,
        v: r.v,
        u_inv: r.u_inv,
        v_inv: r.v_inv,
    }
}

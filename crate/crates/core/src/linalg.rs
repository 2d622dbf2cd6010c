//! Dense matrices over [`Coefficient`]: the bodies of super matrices.
//!
//! Exact determinants and characteristic polynomials use fraction-free
//! Bareiss elimination; numeric determinants use partially pivoted LU.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::coeff::{Backend, Coefficient};
use crate::error::{Error, Result};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    backend: Backend,
    data: Vec<Coefficient>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize, backend: Backend) -> Self {
        Mat { rows, cols, backend, data: vec![Coefficient::zero(backend); rows * cols] }
    }

    pub fn identity(n: usize, backend: Backend) -> Self {
        let mut m = Self::zeros(n, n, backend);
        for i in 0..n {
            m[(i, i)] = Coefficient::one(backend);
        }
        m
    }

    pub fn from_rows(backend: Backend, rows: Vec<Vec<Coefficient>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let data = rows.into_iter().flatten().map(|x| x.to_backend(backend)).collect();
        Ok(Mat { rows: r, cols: c, backend, data })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|row| row.iter().map(|&x| Coefficient::from_int(x, Backend::Exact)).collect())
            .collect();
        Self::from_rows(Backend::Exact, rows).expect("rectangular")
    }

    pub fn diag(entries: &[Coefficient]) -> Self {
        let backend = entries.first().map_or(Backend::Exact, Coefficient::backend);
        let mut m = Self::zeros(entries.len(), entries.len(), backend);
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.to_backend(backend);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> Vec<Coefficient> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_backend(&self, backend: Backend) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            backend,
            data: self.data.iter().map(|c| c.to_backend(backend)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Coefficient::is_zero)
    }

    pub fn is_negligible(&self, tol: f64) -> bool {
        self.data.iter().all(|c| c.is_negligible(tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Coefficient::abs).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: &Coefficient) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            backend: self.backend.join(c.backend()),
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    /// `self - λ·I`
    pub fn shift(&self, lambda: &Coefficient) -> Self {
        let mut m = self.to_backend(self.backend.join(lambda.backend()));
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] = &m[(i, i)] - lambda;
        }
        m
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.rows, self.backend);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack(blocks: &[Mat]) -> Result<Mat> {
        let Some(first) = blocks.first() else {
            return Err(Error::Shape("nothing to stack".into()));
        };
        if blocks.iter().any(|b| b.cols != first.cols) {
            return Err(Error::Shape("column counts differ".into()));
        }
        let backend = blocks.iter().fold(first.backend, |acc, b| acc.join(b.backend));
        let data = blocks.iter().flat_map(|b| b.to_backend(backend).data).collect();
        Ok(Mat { rows: blocks.iter().map(|b| b.rows).sum(), cols: first.cols, backend, data })
    }

    pub fn det(&self) -> Result<Coefficient> {
        if !self.is_square() {
            return Err(Error::Shape(format!("determinant of a {}×{} matrix", self.rows, self.cols)));
        }
        match self.backend {
            Backend::Exact => Ok(bareiss_det(self.data.clone(), self.rows, Coefficient::one(Backend::Exact))),
            Backend::Numeric => Ok(lu_det(self)),
        }
    }

    /// det(t·I − self)
    pub fn charpoly(&self) -> Result<Poly> {
        if !self.is_square() {
            return Err(Error::Shape("characteristic polynomial of a non-square matrix".into()));
        }
        let n = self.rows;
        let t = Poly::t(self.backend);
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let a = Poly::constant(self[(i, j)].clone());
                entries.push(if i == j { &t - &a } else { -&a });
            }
        }
        Ok(bareiss_det(entries, n, Poly::one(self.backend)))
    }

    /// Row-reduced echelon form and its pivot columns. Entries with modulus
    /// at most `tol` count as zero on the numeric backend.
    pub fn rref(&self, tol: f64) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let pick = match m.backend {
                Backend::Exact => (row..m.rows).find(|&i| !m[(i, col)].is_zero()),
                Backend::Numeric => (row..m.rows)
                    .filter(|&i| m[(i, col)].abs() > tol)
                    .max_by(|&a, &b| m[(a, col)].abs().total_cmp(&m[(b, col)].abs())),
            };
            let Some(p) = pick else { continue };
            m.swap_rows(row, p);
            let inv = m[(row, col)].inv().expect("pivot is nonzero");
            for j in 0..m.cols {
                m[(row, j)] = &m[(row, j)] * &inv;
            }
            for i in 0..m.rows {
                if i == row || m[(i, col)].is_zero() {
                    continue;
                }
                let factor = m[(i, col)].clone();
                for j in 0..m.cols {
                    let v = &m[(i, j)] - &(&factor * &m[(row, j)]);
                    m[(i, j)] = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.rref(tol).1.len()
    }

    /// Basis of the right null space, one vector per free column.
    pub fn nullspace(&self, tol: f64) -> Vec<Vec<Coefficient>> {
        let (r, pivots) = self.rref(tol);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Coefficient::zero(self.backend); self.cols];
                v[f] = Coefficient::one(self.backend);
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -&r[(row, f)];
                }
                v
            })
            .collect()
    }

    /// Gauss–Jordan inverse; `None` when singular (up to `tol` on the numeric backend).
    pub fn inverse(&self, tol: f64) -> Option<Mat> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Mat::zeros(n, 2 * n, self.backend);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Coefficient::one(self.backend);
        }
        let (r, pivots) = aug.rref(tol);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Mat::zeros(n, n, self.backend);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_complex())
    }

    /// Numeric eigenvalues (Schur form).
    pub fn numeric_eigenvalues(&self) -> Result<Vec<Complex64>> {
        if !self.is_square() {
            return Err(Error::Shape("eigenvalues of a non-square matrix".into()));
        }
        complex_eigenvalues(self.to_nalgebra())
    }
}

pub(crate) fn complex_eigenvalues(m: nalgebra::DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = nalgebra::Schur::try_new(m, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Inconsistent("Schur iteration did not converge".into()))?;
    let eig = schur
        .eigenvalues()
        .ok_or_else(|| Error::Inconsistent("Schur form has no eigenvalue diagonal".into()))?;
    Ok(eig.iter().copied().collect())
}

/// Ring operations needed by fraction-free elimination.
trait ExactDomain: Clone {
    fn is_zero(&self) -> bool;
    fn mul(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Division whose remainder is known to vanish.
    fn div_exact(&self, o: &Self) -> Self;
    fn zero_like(&self) -> Self;
}

impl ExactDomain for Coefficient {
    fn is_zero(&self) -> bool {
        Coefficient::is_zero(self)
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn zero_like(&self) -> Self {
        Coefficient::zero(self.backend())
    }
}

impl ExactDomain for Poly {
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, o: &Self) -> Self {
        Poly::div_exact(self, o)
    }
    fn zero_like(&self) -> Self {
        Poly::zero(self.backend())
    }
}

/// Bareiss determinant of the `n×n` row-major matrix `m`.
fn bareiss_det<T: ExactDomain>(mut m: Vec<T>, n: usize, one: T) -> T {
    if n == 0 {
        return one;
    }
    let mut prev = one;
    let mut negate = false;
    for k in 0..n - 1 {
        if m[k * n + k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i * n + k].is_zero()) else {
                return prev.zero_like();
            };
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i * n + j].mul(&m[k * n + k]).sub(&m[i * n + k].mul(&m[k * n + j]));
                m[i * n + j] = v.div_exact(&prev);
            }
        }
        prev = m[k * n + k].clone();
    }
    let det = m[n * n - 1].clone();
    if negate {
        det.neg()
    } else {
        det
    }
}

fn lu_det(a: &Mat) -> Coefficient {
    let n = a.rows;
    let mut m: Vec<Complex64> = a.data.iter().map(Coefficient::to_complex).collect();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n).max_by(|&x, &y| m[x * n + k].norm().total_cmp(&m[y * n + k].norm())).unwrap();
        if m[p * n + k].norm() == 0.0 {
            return Coefficient::Numeric(Complex64::new(0.0, 0.0));
        }
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            det = -det;
        }
        let pivot = m[k * n + k];
        det *= pivot;
        for i in k + 1..n {
            let f = m[i * n + k] / pivot;
            for j in k..n {
                let v = m[k * n + j];
                m[i * n + j] -= f * v;
            }
        }
    }
    Coefficient::Numeric(det)
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Coefficient;
    fn index(&self, (i, j): (usize, usize)) -> &Coefficient {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Coefficient {
        &mut self.data[i * self.cols + j]
    }
}

/// Panics on shape mismatch.
impl<'a> Mul<&'a Mat> for &'a Mat {
    type Output = Mat;
    fn mul(self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        let backend = self.backend.join(o.backend);
        let mut out = Mat::zeros(self.rows, o.cols, backend);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    out[(i, j)] = &out[(i, j)] + &(a * &o[(k, j)]);
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a Mat> for &'a Mat {
    type Output = Mat;
    fn add(self, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix sum shape mismatch");
        Mat {
            rows: self.rows,
            cols: self.cols,
            backend: self.backend.join(o.backend),
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a Mat> for &'a Mat {
    type Output = Mat;
    fn sub(self, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix difference shape mismatch");
        Mat {
            rows: self.rows,
            cols: self.cols,
            backend: self.backend.join(o.backend),
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Leibniz expansion over polynomials, independent of elimination.
    fn leibniz_charpoly(a: &Mat) -> Poly {
        let n = a.rows();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = Poly::zero(Backend::Exact);
        permute(&mut perm, 0, &mut |p| {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let mut term = Poly::one(Backend::Exact);
            for i in 0..n {
                let entry = -&Poly::constant(a[(i, p[i])].clone());
                let entry = if i == p[i] { &Poly::t(Backend::Exact) + &entry } else { entry };
                term = &term * &entry;
            }
            total = if inversions % 2 == 0 { &total + &term } else { &total - &term };
        });
        total
    }

    fn permute(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
        if k == p.len() {
            f(p);
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            permute(p, k + 1, f);
            p.swap(k, i);
        }
    }

    #[test]
    fn charpoly_matches_leibniz() {
        let cases = [
            Mat::from_ints(&[&[1, 2], &[3, 4]]),
            Mat::from_ints(&[&[0, 1, 0], &[0, 0, 1], &[2, -1, 3]]),
            Mat::from_ints(&[&[2, 0, 0, 1], &[1, -1, 3, 0], &[0, 0, 0, 5], &[4, 1, 1, -2]]),
            Mat::from_ints(&[&[0, 0], &[0, 0]]),
        ];
        for a in cases {
            assert_eq!(a.charpoly().unwrap(), leibniz_charpoly(&a));
        }
    }

    #[test]
    fn det_with_pivoting() {
        let a = Mat::from_ints(&[&[0, 1, 2], &[1, 0, 3], &[4, -3, 8]]);
        assert_eq!(a.det().unwrap(), Coefficient::from_int(-2, Backend::Exact));
        let numeric = a.to_backend(Backend::Numeric).det().unwrap();
        assert!((numeric.re_f64() + 2.0).abs() < 1e-12);
        assert!(Mat::from_ints(&[&[1, 2], &[2, 4]]).det().unwrap().is_zero());
    }

    #[test]
    fn inverse_and_nullspace() {
        let a = Mat::from_ints(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse(0.0).unwrap();
        assert_eq!(&a * &inv, Mat::identity(2, Backend::Exact));
        assert!(Mat::from_ints(&[&[1, 2], &[2, 4]]).inverse(0.0).is_none());

        let k = Mat::from_ints(&[&[1, 2, 3], &[2, 4, 6]]);
        let basis = k.nullspace(0.0);
        assert_eq!(basis.len(), 2);
        for v in basis {
            let col = Mat::from_rows(Backend::Exact, v.into_iter().map(|x| vec![x]).collect()).unwrap();
            assert!((&k * &col).is_zero());
        }
    }

    #[test]
    fn numeric_eigenvalues_of_rotation() {
        let mut eig = Mat::from_ints(&[&[0, 1], &[-1, 0]]).numeric_eigenvalues().unwrap();
        eig.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((eig[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((eig[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }
}

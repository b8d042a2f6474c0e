//! Small dense and tridiagonal complex linear algebra.
//!
//! Dense eigenvalues use Householder reduction to Hessenberg form followed by
//! single-shift complex QR with Wilkinson shifts. Sizes here are at most a few
//! dozen, so nothing is blocked.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        Ok(Self {
            rows: n,
            cols: m,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn diag(d: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex<T>>> {
        self.data.chunks(self.cols.max(1)).map(<[_]>::to_vec).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[Complex<T>]) {
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * c).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        self.data
            .chunks(self.cols)
            .map(|row| row.iter().zip(v).fold(Complex::zero(), |acc, (&a, &b)| acc + a * b))
            .collect()
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, x| acc + x.norm_sqr()).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, x| acc.max(x.norm()))
    }

    /// Frobenius norm of `self - self^dagger`.
    pub fn hermiticity_defect(&self) -> T {
        (self - &self.adjoint()).frobenius()
    }

    /// `(A + A^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale(Complex::from(T::lit(0.5)))
    }

    /// Spectral norm from the largest eigenvalue of `A^dagger A`.
    pub fn spectral_norm(&self) -> Result<T> {
        let g = &self.adjoint() * self;
        let ev = hermitian_eigenvalues(&g)?;
        Ok(ev.last().copied().unwrap_or(T::zero()).max(T::zero()).sqrt())
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &Mat<T> {
    type Output = Mat<T>;
    fn mul(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &Mat<T> {
    type Output = Mat<T>;
    fn add(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &Mat<T> {
    type Output = Mat<T>;
    fn sub(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: Mat<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn new(a: &Mat<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidInput("LU needs a square matrix".into()));
        }
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let tiny = a.max_abs() * T::epsilon() * T::lit(n as f64);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| lu[(x, k)].norm().partial_cmp(&lu[(y, k)].norm()).unwrap())
                .unwrap();
            if lu[(p, k)].norm() <= tiny {
                return Err(Error::SingularMatrix);
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    lu.data.swap(p * n + j, k * n + j);
                }
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.lu.rows;
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                x[i] = x[i] - l * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[(i, j)];
                x[i] = x[i] - u * x[j];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    pub fn solve_mat(&self, b: &Mat<T>) -> Mat<T> {
        let mut out = Mat::zeros(b.rows, b.cols);
        for j in 0..b.cols {
            out.set_col(j, &self.solve(&b.col(j)));
        }
        out
    }

    pub fn inverse(&self) -> Mat<T> {
        self.solve_mat(&Mat::identity(self.lu.rows))
    }
}

/// 1-norm condition number estimate via the explicit inverse.
pub fn condition_number<T: Real>(a: &Mat<T>) -> Result<T> {
    let inv = Lu::new(a)?.inverse();
    let norm1 = |m: &Mat<T>| {
        (0..m.cols)
            .map(|j| (0..m.rows).fold(T::zero(), |acc, i| acc + m[(i, j)].norm()))
            .fold(T::zero(), T::max)
    };
    Ok(norm1(a) * norm1(&inv))
}

/// Eigenvalues and unit-norm right eigenvectors (as columns).
#[derive(Debug, Clone)]
pub struct Eigen<T> {
    pub values: Vec<Complex<T>>,
    pub vectors: Mat<T>,
}

/// Reduces `a` to upper Hessenberg form in place and returns the unitary `Q`
/// with `a_in = Q H Q^dagger`.
fn hessenberg<T: Real>(h: &mut Mat<T>) -> Mat<T> {
    let n = h.rows;
    let mut q = Mat::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        if xnorm == T::zero() {
            continue;
        }
        let phase = if x[0].norm() > T::zero() {
            x[0] / x[0].norm()
        } else {
            Complex::one()
        };
        let mut v = x;
        v[0] += phase * xnorm;
        let vnorm = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        for z in &mut v {
            *z /= vnorm;
        }
        let two = Complex::from(T::lit(2.0));
        // H <- P H with P = I - 2 v v^dagger on rows k+1..n.
        for j in 0..n {
            let dot = v
                .iter()
                .enumerate()
                .fold(Complex::zero(), |acc, (r, vr)| acc + vr.conj() * h[(k + 1 + r, j)]);
            for (r, vr) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= two * *vr * dot;
            }
        }
        // H <- H P and Q <- Q P on columns k+1..n.
        for m in [&mut *h, &mut q] {
            for i in 0..n {
                let dot = v
                    .iter()
                    .enumerate()
                    .fold(Complex::zero(), |acc, (c, vc)| acc + m[(i, k + 1 + c)] * *vc);
                for (c, vc) in v.iter().enumerate() {
                    m[(i, k + 1 + c)] -= two * dot * vc.conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex::zero();
        }
    }
    q
}

/// Givens rotation `[c, s; -conj(s), c]` (c real) mapping `(a, b)` to `(r, 0)`.
fn givens<T: Real>(a: Complex<T>, b: Complex<T>) -> (T, Complex<T>) {
    let bn = b.norm();
    if bn == T::zero() {
        return (T::one(), Complex::zero());
    }
    let an = a.norm();
    if an == T::zero() {
        return (T::zero(), b.conj() / bn);
    }
    let r = an.hypot(bn);
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

/// Right-multiplies columns `k, k+1` (rows `0..upto`) by the adjoint rotation.
fn rotate_cols<T: Real>(m: &mut Mat<T>, k: usize, c: T, s: Complex<T>, upto: usize) {
    for i in 0..upto {
        let (x, y) = (m[(i, k)], m[(i, k + 1)]);
        m[(i, k)] = x * c + y * s.conj();
        m[(i, k + 1)] = -x * s + y * c;
    }
}

fn wilkinson_shift<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    let m = (a + d) * half;
    let disc = ((a - d) * (a - d) * T::lit(0.25) + b * c).sqrt();
    let (l1, l2) = (m + disc, m - disc);
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Schur form `A = Z T Z^dagger` by shifted QR on the Hessenberg form.
fn schur<T: Real>(a: &Mat<T>) -> Result<(Mat<T>, Mat<T>)> {
    let n = a.rows;
    let mut t = a.clone();
    let mut z = hessenberg(&mut t);
    if n < 2 {
        return Ok((t, z));
    }
    let eps = T::epsilon();
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let scale = t[(l - 1, l - 1)].norm() + t[(l, l)].norm();
            let scale = if scale == T::zero() { t.max_abs() } else { scale };
            if t[(l, l - 1)].norm() <= eps * scale {
                t[(l, l - 1)] = Complex::zero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 60 * n {
            return Err(Error::NoConvergence("QR iteration".into()));
        }
        let mu = if iter % 11 == 10 {
            // Exceptional shift to break cycles.
            t[(hi, hi)] + Complex::from(t[(hi, hi - 1)].norm() * T::lit(1.5))
        } else {
            wilkinson_shift(t[(hi - 1, hi - 1)], t[(hi - 1, hi)], t[(hi, hi - 1)], t[(hi, hi)])
        };
        for k in l..=hi {
            t[(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(t[(k, k)], t[(k + 1, k)]);
            for j in k..n {
                let (x, y) = (t[(k, j)], t[(k + 1, j)]);
                t[(k, j)] = x * c + s * y;
                t[(k + 1, j)] = -s.conj() * x + y * c;
            }
            rots.push((c, s));
        }
        for (k, &(c, s)) in (l..hi).zip(&rots) {
            rotate_cols(&mut t, k, c, s, (k + 2).min(hi) + 1);
            rotate_cols(&mut z, k, c, s, n);
        }
        for k in l..=hi {
            t[(k, k)] += mu;
        }
    }
    Ok((t, z))
}

/// Eigenvalues of a general complex matrix.
pub fn eigenvalues<T: Real>(a: &Mat<T>) -> Result<Vec<Complex<T>>> {
    if !a.is_square() {
        return Err(Error::InvalidInput("eigenvalues need a square matrix".into()));
    }
    let (t, _) = schur(a)?;
    Ok((0..a.rows).map(|i| t[(i, i)]).collect())
}

/// Eigenvalues and right eigenvectors of a general complex matrix.
pub fn eig<T: Real>(a: &Mat<T>) -> Result<Eigen<T>> {
    if !a.is_square() {
        return Err(Error::InvalidInput("eig needs a square matrix".into()));
    }
    let n = a.rows;
    let (t, z) = schur(a)?;
    let floor = t.max_abs().max(T::min_positive_value()) * T::epsilon();
    let mut y = Mat::zeros(n, n);
    for k in 0..n {
        let lam = t[(k, k)];
        y[(k, k)] = Complex::one();
        for i in (0..k).rev() {
            let mut acc = Complex::<T>::zero();
            for j in i + 1..=k {
                acc += t[(i, j)] * y[(j, k)];
            }
            let mut den = t[(i, i)] - lam;
            if den.norm() < floor {
                den = Complex::from(floor);
            }
            y[(i, k)] = -acc / den;
        }
    }
    let mut v = &z * &y;
    for k in 0..n {
        let col = v.col(k);
        let nrm = col.iter().fold(T::zero(), |acc, x| acc + x.norm_sqr()).sqrt();
        let unit: Vec<_> = col.iter().map(|&x| x / nrm).collect();
        v.set_col(k, &unit);
    }
    Ok(Eigen {
        values: (0..n).map(|i| t[(i, i)]).collect(),
        vectors: v,
    })
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues<T: Real>(a: &Mat<T>) -> Result<Vec<T>> {
    let mut ev: Vec<T> = eigenvalues(&a.hermitian_part())?.into_iter().map(|z| z.re).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(ev)
}

/// Tridiagonal matrix with `lower[i] = A[i+1][i]`, `upper[i] = A[i][i+1]`.
#[derive(Debug, Clone)]
pub struct Tridiag<T> {
    pub lower: Vec<Complex<T>>,
    pub diag: Vec<Complex<T>>,
    pub upper: Vec<Complex<T>>,
}

impl<T: Real> Tridiag<T> {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * v[i];
                if i > 0 {
                    acc += self.lower[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    acc += self.upper[i] * v[i + 1];
                }
                acc
            })
            .collect()
    }

    pub fn shifted(&self, sigma: Complex<T>) -> Self {
        Self {
            lower: self.lower.clone(),
            diag: self.diag.iter().map(|&d| d - sigma).collect(),
            upper: self.upper.clone(),
        }
    }

    pub fn to_dense(&self) -> Mat<T> {
        let n = self.len();
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i + 1, i)] = self.lower[i];
                m[(i, i + 1)] = self.upper[i];
            }
        }
        m
    }
}

/// LU of a tridiagonal matrix with partial pivoting; `U` gains a second
/// superdiagonal from row swaps.
#[derive(Debug, Clone)]
pub struct TridiagLu<T> {
    l: Vec<Complex<T>>,
    u0: Vec<Complex<T>>,
    u1: Vec<Complex<T>>,
    u2: Vec<Complex<T>>,
    swapped: Vec<bool>,
}

impl<T: Real> TridiagLu<T> {
    pub fn new(a: &Tridiag<T>) -> Result<Self> {
        let n = a.len();
        let mut d = a.diag.clone();
        let mut du = a.upper.clone();
        let mut dl = a.lower.clone();
        let mut du2 = vec![Complex::zero(); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let scale = d
            .iter()
            .chain(&du)
            .chain(&dl)
            .fold(T::zero(), |acc, z| acc.max(z.norm()));
        let tiny = scale * T::epsilon();
        for i in 0..n.saturating_sub(1) {
            if d[i].norm() >= dl[i].norm() {
                if d[i].norm() <= tiny {
                    return Err(Error::SingularMatrix);
                }
                let f = dl[i] / d[i];
                dl[i] = f;
                d[i + 1] -= f * du[i];
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - f * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if n > 0 && d[n - 1].norm() <= tiny {
            return Err(Error::SingularMatrix);
        }
        Ok(Self {
            l: dl,
            u0: d,
            u1: du,
            u2: du2,
            swapped,
        })
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.u0.len();
        let mut x = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                x.swap(i, i + 1);
            }
            let xi = x[i];
            x[i + 1] -= self.l[i] * xi;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            if i + 1 < n {
                acc -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                acc -= self.u2[i] * x[i + 2];
            }
            x[i] = acc / self.u0[i];
        }
        x
    }
}

/// Orthonormalizes the columns of `v` in place (modified Gram-Schmidt, twice).
/// Returns false if a column collapses.
pub fn orthonormalize<T: Real>(v: &mut [Vec<Complex<T>>]) -> bool {
    for k in 0..v.len() {
        for _ in 0..2 {
            for j in 0..k {
                let dot = inner(&v[j], &v[k]);
                let (head, tail) = v.split_at_mut(k);
                for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                    *x -= dot * *y;
                }
            }
        }
        let nrm = inner(&v[k], &v[k]).re.sqrt();
        if !(nrm > T::zero()) {
            return false;
        }
        for x in &mut v[k] {
            *x /= nrm;
        }
    }
    true
}

/// `a^dagger b`.
pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn triangular_eigenvalues() {
        let a = Mat::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(2.0, 0.0)]]).unwrap();
        let mut ev = eigenvalues(&a).unwrap();
        ev.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        assert!((ev[0] - 1.0).norm() < 1e-14 && (ev[1] - 2.0).norm() < 1e-14);
    }

    #[test]
    fn rotation_has_imaginary_pair() {
        let a = Mat::from_rows(&[vec![c(0.0, 0.0), c(-1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]).unwrap();
        let e = eig(&a).unwrap();
        for (k, lam) in e.values.iter().enumerate() {
            assert!((lam.norm() - 1.0).abs() < 1e-14 && lam.re.abs() < 1e-14);
            let v = e.vectors.col(k);
            let r: f64 = a.mul_vec(&v).iter().zip(&v).map(|(x, y)| (x - lam * y).norm()).sum();
            assert!(r < 1e-13);
        }
    }

    #[test]
    fn tridiagonal_solve_matches_dense() {
        let t = Tridiag {
            lower: vec![c(1.0, 2.0), c(5.0, 0.0), c(0.0, -3.0)],
            diag: vec![c(1e-3, 0.0), c(0.0, 1.0), c(2.0, 0.0), c(1.0, 1.0)],
            upper: vec![c(4.0, 0.0), c(1.0, -1.0), c(0.5, 0.0)],
        };
        let b = vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, -1.0), c(0.3, 0.0)];
        let x = TridiagLu::new(&t).unwrap().solve(&b);
        let y = Lu::new(&t.to_dense()).unwrap().solve(&b);
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).norm() < 1e-12);
        }
        let back = t.mul_vec(&x);
        for (p, q) in back.iter().zip(&b) {
            assert!((p - q).norm() < 1e-12);
        }
    }
}

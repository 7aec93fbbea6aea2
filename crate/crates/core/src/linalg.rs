//! Small dense complex matrices and a cyclic Jacobi eigensolver for
//! Hermitian input.
//!
//! Everything here targets matrices of side at most 64. Storage is row-major.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const C0: Complex64 = Complex64::new(0.0, 0.0);
pub const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Off-diagonal Frobenius norm (relative to `max(1, ‖A‖_F)`) at which Jacobi stops.
pub const JACOBI_TOL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues within this distance below zero are treated as rounding noise.
pub const PSD_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![C0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C1;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMat { rows, cols, data }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(CMat { rows, cols, data })
    }

    pub fn from_real_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        m
    }

    /// `|v⟩⟨v|` scaled by `weight`.
    pub fn outer(v: &[Complex64], weight: f64) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj() * weight)
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn kron(&self, other: &CMat) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| {
            self[(i / r2, j / c2)] * other[(i % r2, j % c2)]
        })
    }

    pub fn mat_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols, "mat_vec: dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Largest entrywise deviation `|A_ij − conj(A_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermitian_deviation() <= tol
    }

    /// Matrix function `V f(Λ) V†` for Hermitian input.
    pub fn hermitian_map(&self, f: impl Fn(f64) -> f64) -> Self {
        let eig = eigh(self);
        let n = self.rows;
        let fvals: Vec<f64> = eig.values.iter().map(|&x| f(x)).collect();
        Self::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| eig.vectors[(i, k)] * eig.vectors[(j, k)].conj() * fvals[k])
                .sum()
        })
    }

    /// PSD square root; eigenvalues below zero are clamped to 0.
    pub fn psd_sqrt(&self) -> Self {
        self.hermitian_map(|x| x.max(0.0).sqrt())
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols, rhs.rows, "matmul: inner dimension mismatch");
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }
}

impl Add for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues are sorted in
/// decreasing order; column `k` of `vectors` belongs to `values[k]`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
    pub sweeps: usize,
    pub converged: bool,
}

fn off_diagonal_norm(a: &CMat) -> f64 {
    let n = a.rows;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// Only the Hermitian part of `m` is used. Each rotation first strips the
/// phase of the pivot `a_pq = r·e^{iα}` and then applies the real symmetric
/// Jacobi rotation, so the accumulated transform stays exactly unitary.
pub fn eigh(m: &CMat) -> HermitianEigen {
    assert!(m.is_square(), "eigh: matrix must be square");
    let n = m.rows;
    // symmetrize so that rounding in the input cannot leak into the rotations
    let mut a = CMat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let mut v = CMat::identity(n);
    let scale = a.frobenius_norm().max(1.0);

    let mut sweeps = 0;
    let mut converged = off_diagonal_norm(&a) <= JACOBI_TOL * scale;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE {
                    continue;
                }
                let e = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U restricted to (p, q): [[c, s·e], [−s·ē, c]]
                let u_pq = e * s;
                let u_qp = -(e.conj()) * s;
                // A ← A U (columns p, q)
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * c;
                }
                // A ← U† A (rows p, q)
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c + aqk * u_qp.conj();
                    a[(q, k)] = apk * u_pq.conj() + aqk * c;
                }
                a[(p, q)] = C0;
                a[(q, p)] = C0;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * c;
                }
            }
        }
        converged = off_diagonal_norm(&a) <= JACOBI_TOL * scale;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = CMat::from_fn(n, n, |i, j| v[(i, order[j])]);
    HermitianEigen {
        values,
        vectors,
        sweeps,
        converged,
    }
}

/// Eigenvalues of a Hermitian matrix, decreasing.
pub fn eigvalsh(m: &CMat) -> Vec<f64> {
    if m.rows == 2 && m.cols == 2 {
        let (a, b) = eig2(m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
        return vec![a, b];
    }
    eigh(m).values
}

/// Closed-form eigenvalues (decreasing) of the Hermitian 2×2 `[[a, z], [z̄, d]]`.
pub fn eig2(a: f64, d: f64, z: Complex64) -> (f64, f64) {
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let rad = (half * half + z.norm_sqr()).sqrt();
    (mean + rad, mean - rad)
}

/// Sum of singular values.
pub fn trace_norm(m: &CMat) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.rows, m.cols));
    }
    if m.hermitian_deviation() <= 1e-12 * m.frobenius_norm().max(1.0) {
        return Ok(eigvalsh(m).iter().map(|x| x.abs()).sum());
    }
    let mtm = &m.adjoint() * m;
    Ok(eigvalsh(&mtm).iter().map(|&x| x.max(0.0).sqrt()).sum())
}

/// Largest entrywise deviation of `V†V` from the identity.
pub fn isometry_deviation(v: &CMat) -> f64 {
    let g = &v.adjoint() * v;
    let id = CMat::identity(v.cols());
    (&g - &id)
        .as_slice()
        .iter()
        .fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn vec_norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reconstruct(e: &HermitianEigen) -> CMat {
        let d = CMat::from_real_diag(&e.values);
        &(&e.vectors * &d) * &e.vectors.adjoint()
    }

    #[test]
    fn diagonalizes_complex_hermitian() {
        let m = CMat::from_rows(
            3,
            3,
            vec![
                c(2.0, 0.0),
                c(1.0, -1.0),
                c(0.0, 0.5),
                c(1.0, 1.0),
                c(3.0, 0.0),
                c(-0.25, 0.0),
                c(0.0, -0.5),
                c(-0.25, 0.0),
                c(-1.0, 0.0),
            ],
        )
        .unwrap();
        let e = eigh(&m);
        assert!(e.converged);
        assert!((&reconstruct(&e) - &m).frobenius_norm() < 1e-12);
        assert!(isometry_deviation(&e.vectors) < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        let tr: f64 = e.values.iter().sum();
        assert!((tr - 4.0).abs() < 1e-12);
    }

    #[test]
    fn already_diagonal_needs_no_sweeps() {
        let m = CMat::from_real_diag(&[0.25, 0.75]);
        let e = eigh(&m);
        assert_eq!(e.sweeps, 0);
        assert_eq!(e.values, vec![0.75, 0.25]);
    }

    #[test]
    fn degenerate_spectrum() {
        // |+⟩⟨+| ⊗ I/2 has spectrum {1/2, 1/2, 0, 0}
        let plus = CMat::from_fn(2, 2, |_, _| c(0.5, 0.0));
        let m = plus.kron(&CMat::from_real_diag(&[0.5, 0.5]));
        let vals = eigvalsh(&m);
        for (got, want) in vals.iter().zip([0.5, 0.5, 0.0, 0.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn eig2_matches_jacobi() {
        let m = CMat::from_rows(2, 2, vec![c(0.3, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.7, 0.0)])
            .unwrap();
        let (a, b) = eig2(0.3, 0.7, c(0.1, 0.2));
        let e = eigh(&m);
        assert!((a - e.values[0]).abs() < 1e-14);
        assert!((b - e.values[1]).abs() < 1e-14);
    }

    #[test]
    fn trace_norm_identity_and_non_square() {
        assert!((trace_norm(&CMat::identity(5)).unwrap() - 5.0).abs() < 1e-14);
        assert_eq!(
            trace_norm(&CMat::zeros(2, 3)),
            Err(Error::NotSquare(2, 3))
        );
    }

    #[test]
    fn trace_norm_non_hermitian() {
        // singular values of [[0, 2], [0, 0]] are {2, 0}
        let m = CMat::from_rows(2, 2, vec![C0, c(2.0, 0.0), C0, C0]).unwrap();
        assert!((trace_norm(&m).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let m = CMat::from_rows(2, 2, vec![c(0.6, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.4, 0.0)])
            .unwrap();
        let r = m.psd_sqrt();
        assert!((&(&r * &r) - &m).frobenius_norm() < 1e-13);
    }
}

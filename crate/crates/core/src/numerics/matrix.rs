use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use super::rng::RngStream;
use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Condition-number ceiling above which a Gram matrix is treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Dense complex matrix, column-major.
///
/// Columns are contiguous because every channel matrix in the simulator is a
/// stack of per-UE column vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for c in 0..cols {
            for r in 0..rows {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from column-major storage.
    pub fn from_column_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_columns(rows: usize, columns: &[Vec<Complex64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::Dimension(format!(
                    "column {j} has length {}, expected {rows}",
                    c.len()
                )));
            }
            data.extend_from_slice(c);
        }
        Ok(Self {
            rows,
            cols: columns.len(),
            data,
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn column_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[Complex64]> {
        // chunks_exact panics on a zero chunk size; a 0-row matrix has no storage anyway
        self.data.chunks_exact(self.rows.max(1))
    }

    /// Copy of the first `n` columns.
    pub fn leading_columns(&self, n: usize) -> Self {
        let n = n.min(self.cols);
        Self {
            rows: self.rows,
            cols: n,
            data: self.data[..n * self.rows].to_vec(),
        }
    }

    pub fn push_column(&mut self, column: &[Complex64]) -> Result<()> {
        if self.cols > 0 && column.len() != self.rows {
            return Err(Error::Dimension(format!(
                "column length {} does not match {} rows",
                column.len(),
                self.rows
            )));
        }
        if self.cols == 0 {
            self.rows = column.len();
        }
        self.data.extend_from_slice(column);
        self.cols += 1;
        Ok(())
    }

    pub fn row(&self, i: usize) -> Vec<Complex64> {
        (0..self.cols).map(|j| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            let dst = j * self.rows;
            for k in 0..self.cols {
                let s = rhs[(k, j)];
                if s == ZERO {
                    continue;
                }
                let src = self.column(k);
                for (o, a) in out.data[dst..dst + self.rows].iter_mut().zip(src) {
                    *o += a * s;
                }
            }
        }
        Ok(out)
    }

    /// `self * x` for a vector `x`.
    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        let mut out = vec![ZERO; self.rows];
        for (k, &s) in x.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.column(k)) {
                *o += a * s;
            }
        }
        Ok(out)
    }

    /// `self^H * self`.
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut g = Self::zeros(n, n);
        for j in 0..n {
            for i in 0..=j {
                let v = inner(self.column(i), self.column(j));
                g[(i, j)] = v;
                g[(j, i)] = v.conj();
            }
        }
        g
    }

    /// `self^H * x`.
    pub fn adjoint_mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.columns().map(|c| inner(c, x)).collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[c * self.rows + r]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[c * self.rows + r]
    }
}

/// `x^H y`.
#[inline]
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        re += a.re * b.re + a.im * b.im;
        im += a.re * b.im - a.im * b.re;
    }
    Complex64::new(re, im)
}

/// `x^T y` without conjugation.
#[inline]
pub fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        re += a.re * b.re - a.im * b.im;
        im += a.re * b.im + a.im * b.re;
    }
    Complex64::new(re, im)
}

#[inline]
pub fn norm_sqr(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// Dense real matrix, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn column_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// `self^T * self`.
    pub fn gram(&self) -> Self {
        let mut g = Self::zeros(self.cols, self.cols);
        for i in 0..self.cols {
            for j in 0..self.cols {
                g[(i, j)] = self
                    .column(i)
                    .iter()
                    .zip(self.column(j))
                    .map(|(a, b)| a * b)
                    .sum();
            }
        }
        g
    }

    /// `self * x` for a complex vector `x`.
    pub fn mul_complex_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        out.fill(ZERO);
        for (k, s) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.column(k)) {
                o.re += a * s.re;
                o.im += a * s.im;
            }
        }
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[c * self.rows + r]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[c * self.rows + r]
    }
}

/// Cholesky factor `G = L L^H` of a Hermitian positive-definite matrix.
#[derive(Debug, Clone)]
pub struct HermitianCholesky {
    n: usize,
    // lower triangle, column-major
    l: Vec<Complex64>,
    condition: f64,
}

impl HermitianCholesky {
    pub fn factor(g: &ComplexMatrix) -> Result<Self> {
        let n = g.rows();
        if g.cols() != n {
            return Err(Error::Dimension(format!(
                "cholesky needs a square matrix, got {}x{}",
                g.rows(),
                g.cols()
            )));
        }
        let mut l = vec![ZERO; n * n];
        let scale = (0..n).map(|i| g[(i, i)].re.abs()).fold(0.0, f64::max);
        let (mut dmin, mut dmax) = (f64::INFINITY, 0.0f64);
        for j in 0..n {
            let mut d = g[(j, j)].re;
            for k in 0..j {
                d -= l[k * n + j].norm_sqr();
            }
            if !(d > scale * f64::EPSILON) {
                return Err(Error::SingularMatrix {
                    condition: f64::INFINITY,
                });
            }
            let ljj = d.sqrt();
            dmin = dmin.min(ljj);
            dmax = dmax.max(ljj);
            l[j * n + j] = Complex64::new(ljj, 0.0);
            for i in j + 1..n {
                let mut s = g[(i, j)];
                for k in 0..j {
                    s -= l[k * n + i] * l[k * n + j].conj();
                }
                l[j * n + i] = s / ljj;
            }
        }
        // Squared pivot spread: a cheap lower estimate of the 2-norm condition.
        let condition = if n == 0 { 1.0 } else { (dmax / dmin).powi(2) };
        if !(condition <= MAX_CONDITION) {
            return Err(Error::SingularMatrix { condition });
        }
        Ok(Self { n, l, condition })
    }

    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solve `G x = b` in place.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[k * n + i] * b[k];
            }
            b[i] = s / self.l[i * n + i].re;
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= self.l[i * n + k].conj() * b[k];
            }
            b[i] = s / self.l[i * n + i].re;
        }
    }

    pub fn inverse(&self) -> ComplexMatrix {
        let mut inv = ComplexMatrix::identity(self.n);
        for j in 0..self.n {
            self.solve_in_place(inv.column_mut(j));
        }
        inv
    }
}

/// Left pseudo-inverse `(H^H H)^{-1} H^H` of a tall full-column-rank matrix.
pub fn pseudo_inverse_left(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    if h.rows() < h.cols() {
        return Err(Error::Dimension(format!(
            "left pseudo-inverse needs rows >= cols, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let chol = HermitianCholesky::factor(&h.gram())?;
    chol.inverse().matmul(&h.adjoint())
}

/// `M x Q` matrix with orthonormal real columns, from Householder QR of a
/// seeded Gaussian matrix.
pub fn orthonormal_real_basis(m: usize, q: usize, stream: &RngStream) -> Result<RealMatrix> {
    if q > m {
        return Err(Error::Dimension(format!(
            "cannot fit {q} orthonormal columns in dimension {m}"
        )));
    }
    if q == 0 {
        return Err(Error::Dimension("basis needs at least one column".into()));
    }
    let mut rng = stream.rng();
    let mut a = RealMatrix::zeros(m, q);
    for x in a.data.iter_mut() {
        *x = rng.sample(StandardNormal);
    }

    // Householder vectors stored below the diagonal of `a` plus the leading entry.
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(q);
    for k in 0..q {
        let x = &a.column(k)[k..];
        let alpha = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut v = x.to_vec();
        let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
        v[0] += sign * alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        if vnorm2 > 0.0 {
            for j in k..q {
                let col = &mut a.column_mut(j)[k..];
                let proj: f64 =
                    v.iter().zip(col.iter()).map(|(a, b)| a * b).sum::<f64>() * 2.0 / vnorm2;
                for (c, vi) in col.iter_mut().zip(&v) {
                    *c -= proj * vi;
                }
            }
        }
        vs.push(v);
    }

    // Accumulate Q = H_0 H_1 ... H_{q-1} applied to the first q identity columns.
    let mut basis = RealMatrix::zeros(m, q);
    for j in 0..q {
        basis[(j, j)] = 1.0;
    }
    for k in (0..q).rev() {
        let v = &vs[k];
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in 0..q {
            let col = &mut basis.column_mut(j)[k..];
            let proj: f64 =
                v.iter().zip(col.iter()).map(|(a, b)| a * b).sum::<f64>() * 2.0 / vnorm2;
            for (c, vi) in col.iter_mut().zip(v) {
                *c -= proj * vi;
            }
        }
    }
    Ok(basis)
}

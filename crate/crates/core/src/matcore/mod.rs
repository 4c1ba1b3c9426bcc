//! Dense complex matrices and the handful of matrix functions the splitting
//! analysis needs: commutators, the matrix exponential, the spectral norm and
//! the logarithmic norm.
//!
//! Matrices are small (the corpus tops out at a few dozen rows) and stored
//! row-major in a flat `Vec`. Fallible methods (`add`, `mul`, ...) check
//! dimensions; the `std::ops` impls on references panic on mismatch and are
//! meant for code where the dimensions are fixed by construction.

mod eigen;
mod expm;
mod norms;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use eigen::{hermitian_eigen, hermitian_eigenvalues, HermitianEigen};
pub use expm::{expm, Exponential};
pub use norms::{lognorm, opnorm2, LogNorm};

pub type C64 = Complex64;

#[inline]
pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMat {
    dim: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        CMat {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = c(1.0);
        }
        m
    }

    /// Builds a matrix from a flat row-major buffer of length `dim²`.
    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        let m = CMat { dim, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self::from_vec(dim, data)
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_vec(dim, data)
    }

    /// Real-valued convenience constructor.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&x| c(x)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn from_diag(diag: &[C64]) -> Result<Self> {
        let n = diag.len();
        Self::from_fn(n, |i, j| if i == j { diag[i] } else { C64::new(0.0, 0.0) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            Some(k) => Err(Error::NonFinite {
                row: k / self.dim,
                col: k % self.dim,
            }),
            None => Ok(()),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.check_finite().is_ok()
    }

    fn same_dim(&self, other: &CMat) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &CMat) -> Result<CMat> {
        self.same_dim(other)?;
        Ok(self.zip_with(other, |x, y| x + y))
    }

    pub fn sub(&self, other: &CMat) -> Result<CMat> {
        self.same_dim(other)?;
        Ok(self.zip_with(other, |x, y| x - y))
    }

    pub fn mul(&self, other: &CMat) -> Result<CMat> {
        self.same_dim(other)?;
        Ok(self.matmul(other))
    }

    pub fn scale(&self, s: C64) -> CMat {
        self.map(|z| s * z)
    }

    pub fn scale_real(&self, s: f64) -> CMat {
        self.map(|z| z * s)
    }

    pub fn adjoint(&self) -> CMat {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    /// `XY − YX`.
    pub fn commutator(&self, other: &CMat) -> Result<CMat> {
        self.same_dim(other)?;
        Ok(commutator_unchecked(self, other))
    }

    /// `½(X + X*)`.
    pub fn hermitian_part(&self) -> CMat {
        let n = self.dim;
        CMat::from_fn_unchecked(n, |i, j| 0.5 * (self[(i, j)] + self[(j, i)].conj()))
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        self.data
            .chunks(self.dim)
            .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim;
        (0..n).all(|i| (0..n).all(|j| i == j || self[(i, j)] == C64::new(0.0, 0.0)))
    }

    /// `‖X − X*‖_max ≤ tol·max(1, ‖X‖_max)`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.symmetry_residual(1.0) <= tol * self.max_abs_entry().max(1.0)
    }

    /// `‖X + X*‖_max ≤ tol·max(1, ‖X‖_max)`.
    pub fn is_skew_hermitian(&self, tol: f64) -> bool {
        self.symmetry_residual(-1.0) <= tol * self.max_abs_entry().max(1.0)
    }

    fn symmetry_residual(&self, sign: f64) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj() * sign).norm());
            }
        }
        worst
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Integer power by repeated multiplication (`n = 0` gives `I`).
    pub fn powi(&self, n: u32) -> CMat {
        let mut out = CMat::identity(self.dim);
        for _ in 0..n {
            out = out.matmul(self);
        }
        out
    }

    pub(crate) fn from_fn_unchecked(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        CMat { dim, data }
    }

    pub(crate) fn map(&self, f: impl Fn(C64) -> C64) -> CMat {
        CMat {
            dim: self.dim,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    fn zip_with(&self, other: &CMat, f: impl Fn(C64, C64) -> C64) -> CMat {
        CMat {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(&x, &y)| f(x, y)).collect(),
        }
    }

    /// `self += s·other`
    pub(crate) fn axpy(&mut self, s: C64, other: &CMat) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        for (x, &y) in self.data.iter_mut().zip(&other.data) {
            *x += s * y;
        }
    }

    pub(crate) fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                for (o, &b) in row.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        CMat { dim: n, data: out }
    }

    /// `self · diag(d)`
    pub(crate) fn mul_diag_right(&self, d: &[C64]) -> CMat {
        let n = self.dim;
        let mut out = self.clone();
        for row in out.data.chunks_mut(n) {
            for (x, &s) in row.iter_mut().zip(d) {
                *x *= s;
            }
        }
        out
    }
}

pub(crate) fn commutator_unchecked(x: &CMat, y: &CMat) -> CMat {
    let xy = x.matmul(y);
    let yx = y.matmul(x);
    xy.zip_with(&yx, |p, q| p - q)
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.dim && j < self.dim, "index ({i}, {j}) out of range");
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.dim && j < self.dim, "index ({i}, {j}) out of range");
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        self.zip_with(rhs, |x, y| x + y)
    }
}

impl Sub for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        self.zip_with(rhs, |x, y| x - y)
    }
}

impl Mul for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        self.matmul(rhs)
    }
}

impl Mul<&CMat> for f64 {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        rhs.scale_real(self)
    }
}

impl Mul<&CMat> for C64 {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        rhs.scale(self)
    }
}

impl Neg for &CMat {
    type Output = CMat;
    fn neg(self) -> CMat {
        self.map(|z| -z)
    }
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat({}x{}) [", self.dim, self.dim)?;
        for row in self.data.chunks(self.dim) {
            let cells: Vec<String> = row.iter().map(|z| format!("{:+.6e}{:+.6e}i", z.re, z.im)).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nilpotent_pair() -> (CMat, CMat) {
        let a = CMat::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let b = CMat::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap();
        (a, b)
    }

    fn sample() -> CMat {
        CMat::from_rows(&[
            vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.25)],
            vec![C64::new(3.0, -1.0), C64::new(0.0, 0.75)],
        ])
        .unwrap()
    }

    #[test]
    fn identities() {
        let x = sample();
        assert_eq!(CMat::zeros(2).add(&x).unwrap(), x);
        assert_eq!(CMat::identity(2).mul(&x).unwrap(), x);
        let h = &x + &x.adjoint();
        assert_eq!(h.adjoint(), h);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let x = sample();
        let y = CMat::identity(3);
        assert!(matches!(x.add(&y), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(x.mul(&y), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(x.commutator(&y), Err(Error::DimensionMismatch { .. })));
        assert!(CMat::from_vec(2, vec![c(1.0); 3]).is_err());
    }

    #[test]
    fn construction_rejects_non_finite() {
        let err = CMat::from_real_rows(&[&[1.0, f64::NAN], &[0.0, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { row: 0, col: 1 }));
    }

    #[test]
    fn commutator_of_nilpotent_pair() {
        let (a, b) = nilpotent_pair();
        let ab = a.commutator(&b).unwrap();
        assert_eq!(ab, CMat::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap());
        let aab = a.commutator(&ab).unwrap();
        assert_eq!(aab, CMat::from_real_rows(&[&[0.0, -2.0], &[0.0, 0.0]]).unwrap());
        assert!(a.commutator(&a).unwrap().is_zero());
    }

    #[test]
    fn diagonal_products() {
        let x = sample();
        let d = [C64::new(2.0, 0.0), C64::new(0.0, 1.0)];
        let dm = CMat::from_diag(&d).unwrap();
        assert_eq!(x.mul_diag_right(&d), &x * &dm);
    }
}

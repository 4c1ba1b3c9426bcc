//! Matrix exponential by scaling and squaring around a diagonal Padé(6,6)
//! core.
//!
//! The input is scaled by `2^-s` until its Frobenius norm is at most 0.5; at
//! that radius the Padé(6,6) truncation error is below 1e-19, so the
//! accuracy is set by rounding in the `s` squarings.

use super::{c, hermitian_eigen, CMat, HermitianEigen, C64};
use crate::error::{Error, Result};

const PADE_ORDER: usize = 6;
const SCALED_NORM: f64 = 0.5;
const NORMAL_TOL: f64 = 1e-12;

fn pade_coefficients() -> [f64; PADE_ORDER + 1] {
    let m = PADE_ORDER as f64;
    let mut b = [1.0; PADE_ORDER + 1];
    for k in 1..=PADE_ORDER {
        let kf = k as f64;
        b[k] = b[k - 1] * (m - kf + 1.0) / (kf * (2.0 * m - kf + 1.0));
    }
    b
}

pub fn expm(x: &CMat) -> Result<CMat> {
    x.check_finite()?;
    let n = x.dim();
    let norm = x.frobenius_norm();
    if norm == 0.0 {
        return Ok(CMat::identity(n));
    }
    let squarings = if norm > SCALED_NORM {
        (norm / SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let scaled = x.scale_real(2f64.powi(-squarings));
    let mut result = pade(&scaled)?;
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    Ok(result)
}

fn pade(x: &CMat) -> Result<CMat> {
    let b = pade_coefficients();
    let n = x.dim();
    let eye = CMat::identity(n);
    let x2 = x.matmul(x);
    let x4 = x2.matmul(&x2);
    let x6 = x2.matmul(&x4);

    let mut odd = eye.scale_real(b[1]);
    odd.axpy(c(b[3]), &x2);
    odd.axpy(c(b[5]), &x4);
    let u = x.matmul(&odd);

    let mut v = eye.scale_real(b[0]);
    v.axpy(c(b[2]), &x2);
    v.axpy(c(b[4]), &x4);
    v.axpy(c(b[6]), &x6);

    solve(&(&v - &u), &(&v + &u))
}

/// Solves `A X = B` by LU with partial pivoting.
pub(crate) fn solve(a: &CMat, b: &CMat) -> Result<CMat> {
    let n = a.dim();
    let mut lu = a.clone();
    let mut rhs = b.clone();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| lu[(i, col)].norm().total_cmp(&lu[(j, col)].norm()))
            .expect("non-empty range");
        if lu[(pivot, col)].norm() == 0.0 {
            return Err(Error::InvalidArgument("singular Padé denominator".into()));
        }
        if pivot != col {
            for k in 0..n {
                let tmp = lu[(col, k)];
                lu[(col, k)] = lu[(pivot, k)];
                lu[(pivot, k)] = tmp;
                let tmp = rhs[(col, k)];
                rhs[(col, k)] = rhs[(pivot, k)];
                rhs[(pivot, k)] = tmp;
            }
        }
        let d = lu[(col, col)];
        for row in col + 1..n {
            let f = lu[(row, col)] / d;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for k in col..n {
                let v = lu[(col, k)];
                lu[(row, k)] -= f * v;
            }
            for k in 0..n {
                let v = rhs[(col, k)];
                rhs[(row, k)] -= f * v;
            }
        }
    }
    for row in (0..n).rev() {
        for k in 0..n {
            let mut acc = rhs[(row, k)];
            for j in row + 1..n {
                acc -= lu[(row, j)] * rhs[(j, k)];
            }
            rhs[(row, k)] = acc / lu[(row, row)];
        }
    }
    Ok(rhs)
}

/// `s ↦ e^{sX}` for a fixed generator `X`.
///
/// Diagonal, Hermitian and skew-Hermitian generators (checked to 1e-12) are
/// diagonalized once and exponentiated through their spectrum; anything else
/// goes through [`expm`] at every call.
#[derive(Clone, Debug)]
pub struct Exponential {
    generator: CMat,
    kind: Kind,
}

#[derive(Clone, Debug)]
enum Kind {
    Diagonal(Vec<C64>),
    /// `X = V diag(λ) V*`.
    Hermitian(HermitianEigen),
    /// `X = i V diag(λ) V*`.
    SkewHermitian(HermitianEigen),
    General,
}

impl Exponential {
    pub fn new(generator: &CMat) -> Result<Self> {
        generator.check_finite()?;
        let kind = if generator.is_diagonal() {
            Kind::Diagonal(generator.diagonal())
        } else if generator.is_hermitian(NORMAL_TOL) {
            Kind::Hermitian(hermitian_eigen(&generator.hermitian_part())?)
        } else if generator.is_skew_hermitian(NORMAL_TOL) {
            let h = generator.scale(C64::new(0.0, -1.0)).hermitian_part();
            Kind::SkewHermitian(hermitian_eigen(&h)?)
        } else {
            Kind::General
        };
        Ok(Exponential {
            generator: generator.clone(),
            kind,
        })
    }

    /// Same as [`Exponential::new`] but never takes the spectral path.
    pub fn general(generator: &CMat) -> Result<Self> {
        generator.check_finite()?;
        Ok(Exponential {
            generator: generator.clone(),
            kind: Kind::General,
        })
    }

    pub fn generator(&self) -> &CMat {
        &self.generator
    }

    pub fn is_spectral(&self) -> bool {
        !matches!(self.kind, Kind::General)
    }

    /// `e^{sX}`.
    pub fn at(&self, s: f64) -> CMat {
        if s == 0.0 {
            return CMat::identity(self.generator.dim());
        }
        match &self.kind {
            Kind::Diagonal(d) => {
                let e: Vec<C64> = d.iter().map(|&z| (z * s).exp()).collect();
                CMat::from_fn_unchecked(e.len(), |i, j| if i == j { e[i] } else { C64::new(0.0, 0.0) })
            }
            Kind::Hermitian(eig) => spectral(eig, |l| c((s * l).exp())),
            Kind::SkewHermitian(eig) => spectral(eig, |l| C64::new(0.0, s * l).exp()),
            Kind::General => expm(&self.generator.scale_real(s)).expect("finite generator"),
        }
    }
}

fn spectral(eig: &HermitianEigen, f: impl Fn(f64) -> C64) -> CMat {
    let d: Vec<C64> = eig.values.iter().map(|&l| f(l)).collect();
    eig.vectors.mul_diag_right(&d).matmul(&eig.vectors.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::opnorm2;

    fn rel_err(x: &CMat, reference: &CMat) -> f64 {
        opnorm2(&(x - reference)) / opnorm2(reference)
    }

    #[test]
    fn pade_coefficients_match_closed_form() {
        let b = pade_coefficients();
        let expected = [1.0, 0.5, 5.0 / 44.0, 1.0 / 66.0, 1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0];
        for (x, y) in b.iter().zip(expected) {
            assert!((x - y).abs() <= 1e-15 * y);
        }
    }

    #[test]
    fn zero_gives_identity() {
        assert_eq!(expm(&CMat::zeros(3)).unwrap(), CMat::identity(3));
    }

    #[test]
    fn diagonal_input() {
        let d = CMat::from_real_rows(&[&[1.5, 0.0], &[0.0, -3.0]]).unwrap();
        let e = expm(&d).unwrap();
        let reference = CMat::from_real_rows(&[&[1.5f64.exp(), 0.0], &[0.0, (-3.0f64).exp()]]).unwrap();
        assert!(rel_err(&e, &reference) < 1e-13);
    }

    #[test]
    fn nilpotent_series_terminates() {
        for t in [0.1, 1.0, 7.5] {
            let x = CMat::from_real_rows(&[&[0.0, t], &[0.0, 0.0]]).unwrap();
            let reference = CMat::from_real_rows(&[&[1.0, t], &[0.0, 1.0]]).unwrap();
            assert!(rel_err(&expm(&x).unwrap(), &reference) < 1e-13, "t = {t}");
        }
    }

    #[test]
    fn hyperbolic_rotation() {
        for t in [0.01, 0.5, 3.0, 14.0] {
            let x = CMat::from_real_rows(&[&[0.0, t], &[t, 0.0]]).unwrap();
            let (ch, sh) = (t.cosh(), t.sinh());
            let reference = CMat::from_real_rows(&[&[ch, sh], &[sh, ch]]).unwrap();
            assert!(rel_err(&expm(&x).unwrap(), &reference) < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn rejects_non_finite() {
        // construct a finite matrix then poison it through arithmetic
        let x = CMat::from_real_rows(&[&[f64::MAX, 0.0], &[0.0, 0.0]]).unwrap();
        let y = &x + &x;
        assert!(matches!(expm(&y), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn spectral_path_agrees_with_pade() {
        let skew = CMat::from_rows(&[
            vec![C64::new(0.0, 1.0), C64::new(2.0, 0.5)],
            vec![C64::new(-2.0, 0.5), C64::new(0.0, -0.3)],
        ])
        .unwrap();
        let herm = CMat::from_rows(&[
            vec![c(1.0), C64::new(0.5, -0.25)],
            vec![C64::new(0.5, 0.25), c(-2.0)],
        ])
        .unwrap();
        for x in [skew, herm] {
            let fast = Exponential::new(&x).unwrap();
            assert!(fast.is_spectral());
            for s in [-1.0, 0.3, 2.0] {
                let reference = expm(&x.scale_real(s)).unwrap();
                assert!(rel_err(&fast.at(s), &reference) < 1e-13);
            }
        }
        let general = CMat::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(!Exponential::new(&general).unwrap().is_spectral());
    }
}

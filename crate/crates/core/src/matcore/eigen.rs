//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `h_pq` with a diagonal
//! unitary and then applies the classical real Jacobi rotation, so every step
//! is unitary and the iteration converges unconditionally.

use super::{c, CMat, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: CMat,
}

/// Eigenvalues of the Hermitian part of `h`, ascending.
pub fn hermitian_eigenvalues(h: &CMat) -> Result<Vec<f64>> {
    Ok(jacobi(h, false)?.0)
}

/// Full eigendecomposition `h = V diag(λ) V*`. `h` must be Hermitian to `1e-12`.
pub fn hermitian_eigen(h: &CMat) -> Result<HermitianEigen> {
    if !h.is_hermitian(1e-12) {
        return Err(Error::InvalidArgument("matrix is not Hermitian".into()));
    }
    let (values, vectors) = jacobi(h, true)?;
    Ok(HermitianEigen {
        values,
        vectors: vectors.expect("vectors requested"),
    })
}

fn jacobi(h: &CMat, want_vectors: bool) -> Result<(Vec<f64>, Option<CMat>)> {
    h.check_finite()?;
    let n = h.dim();
    let mut a = h.hermitian_part();
    let mut v = want_vectors.then(|| CMat::identity(n));

    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok((vec![0.0; n], v));
    }
    let threshold = scale * f64::EPSILON * 0.5;

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= threshold {
            let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a[(i, i)].re, i)).collect();
            pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
            let values = pairs.iter().map(|p| p.0).collect();
            let vectors = v.map(|v| CMat::from_fn_unchecked(n, |i, j| v[(i, pairs[j].1)]));
            return Ok((values, vectors));
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, v.as_mut(), p, q);
            }
        }
    }
    Err(Error::InvalidArgument(format!(
        "Jacobi iteration did not converge in {MAX_SWEEPS} sweeps"
    )))
}

fn off_diagonal_norm(a: &CMat) -> f64 {
    let n = a.dim();
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

fn rotate(a: &mut CMat, v: Option<&mut CMat>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // phase removal: diag(1, e^{-iφ}) turns the pivot into the real value r
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;

    // W = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
    let w_pp = c(cs);
    let w_pq = c(sn);
    let w_qp = -sn * phase.conj();
    let w_qq = cs * phase.conj();

    let n = a.dim();
    // A <- A W (columns)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * w_pp + akq * w_qp;
        a[(k, q)] = akp * w_pq + akq * w_qq;
    }
    // A <- W* A (rows)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = w_pp.conj() * apk + w_qp.conj() * aqk;
        a[(q, k)] = w_pq.conj() * apk + w_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = c(a[(p, p)].re);
    a[(q, q)] = c(a[(q, q)].re);

    if let Some(v) = v {
        for k in 0..n {
            let vkp = v[(k, p)];
            let vkq = v[(k, q)];
            v[(k, p)] = vkp * w_pp + vkq * w_qp;
            v[(k, q)] = vkp * w_pq + vkq * w_qq;
        }
    }
}

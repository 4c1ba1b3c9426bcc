use super::{hermitian_eigenvalues, CMat, C64};

const POWER_MAX_ITERS: usize = 10_000;
const POWER_RTOL: f64 = 1e-14;

/// Logarithmic norm for the Euclidean norm: the largest eigenvalue of
/// `½(X + X*)`. Unlike a norm it can be negative.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogNorm(pub f64);

impl LogNorm {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn lognorm(x: &CMat) -> LogNorm {
    let values = hermitian_eigenvalues(x).expect("finite matrix");
    LogNorm(*values.last().expect("non-empty spectrum"))
}

/// Spectral norm (largest singular value).
///
/// Power iteration on `X*X` from the normalized all-ones vector; falls back to
/// the Jacobi eigenvalues of `X*X` when the iteration stalls or lands below the
/// largest column norm (start vector orthogonal to the dominant subspace).
pub fn opnorm2(x: &CMat) -> f64 {
    let n = x.dim();
    let gram = x.adjoint().matmul(x);
    let column_bound = (0..n)
        .map(|j| (0..n).map(|i| x[(i, j)].norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max);
    if column_bound == 0.0 {
        return 0.0;
    }

    let mut v = vec![C64::new(1.0 / (n as f64).sqrt(), 0.0); n];
    let mut rayleigh = f64::NAN;
    let mut converged = false;
    for _ in 0..POWER_MAX_ITERS {
        let w = apply(&gram, &v);
        let next: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        v = w.into_iter().map(|z| z / norm).collect();
        if (next - rayleigh).abs() <= POWER_RTOL * next.abs() {
            rayleigh = next;
            converged = true;
            break;
        }
        rayleigh = next;
    }

    if converged && rayleigh >= column_bound * (1.0 - 1e-12) {
        rayleigh.sqrt()
    } else {
        let values = hermitian_eigenvalues(&gram).expect("finite matrix");
        values.last().copied().unwrap_or(0.0).max(0.0).sqrt()
    }
}

fn apply(m: &CMat, v: &[C64]) -> Vec<C64> {
    let n = m.dim();
    (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::c;

    #[test]
    fn simple_norms() {
        assert!((opnorm2(&CMat::identity(4)) - 1.0).abs() < 1e-15);
        let d = CMat::from_real_rows(&[&[3.0, 0.0], &[0.0, -4.0]]).unwrap();
        assert!((opnorm2(&d) - 4.0).abs() < 1e-14);
        assert_eq!(opnorm2(&CMat::zeros(3)), 0.0);
    }

    #[test]
    fn start_vector_in_kernel_falls_back() {
        // X·1 = 0 and X*X·1 = 0; the true norm is 2
        let x = CMat::from_real_rows(&[&[1.0, -1.0], &[1.0, -1.0]]).unwrap();
        assert!((opnorm2(&x) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn lognorm_cases() {
        assert!((lognorm(&CMat::identity(3).scale_real(-1.0)).value() + 1.0).abs() < 1e-15);
        let skew = CMat::from_rows(&[
            vec![C64::new(0.0, 2.0), c(1.0)],
            vec![c(-1.0), C64::new(0.0, -0.5)],
        ])
        .unwrap();
        assert_eq!(lognorm(&skew).value(), 0.0);
        // Hermitian part of [[0,1],[0,0]] is [[0,½],[½,0]]
        let nil = CMat::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!((lognorm(&nil).value() - 0.5).abs() < 1e-15);
    }
}

//! Empirical orders and leading error coefficients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::error_forms::error_direct;
use crate::matcore::{opnorm2, CMat};
use crate::splittings::{Method, OperatorPair};

/// Errors below this norm are treated as rounding noise.
pub const NOISE_FLOOR: f64 = 1e-13;
/// Largest admissible starting time for [`extract_leading`].
pub const MAX_LEADING_T0: f64 = 0.5;
const RICHARDSON_DEPTH: usize = 4;

/// Least-squares line through `(log₂ t_k, log₂ ‖E(t_k)‖)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderFit {
    /// Local order plus one.
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute deviation of a data point from the line.
    pub residual: f64,
    pub k_range: (i32, i32),
}

/// Fits the error decay of `m` over `t_k = t0·2⁻ᵏ`, `k = k_min..=k_max`.
pub fn fit_local_order(p: &OperatorPair, m: Method, t0: f64, k_min: i32, k_max: i32) -> Result<OrderFit> {
    if k_max - k_min < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least four grid points, got k = {k_min}..={k_max}"
        )));
    }
    if !(t0.is_finite() && t0 > 0.0) {
        return Err(Error::InvalidArgument(format!("t0 = {t0} must be finite and > 0")));
    }
    let mut points = Vec::new();
    for k in k_min..=k_max {
        let t = t0 * 2f64.powi(-k);
        let norm = opnorm2(&error_direct(p, m, t)?);
        if !(norm >= NOISE_FLOOR) {
            return Err(Error::NoiseFloor { t, norm });
        }
        points.push((t.log2(), norm.log2()));
    }
    let (slope, intercept) = least_squares(&points);
    let residual = points
        .iter()
        .map(|&(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0, f64::max);
    Ok(OrderFit {
        slope,
        intercept,
        residual,
        k_range: (k_min, k_max),
    })
}

fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Richardson limit of `E_m(t)/t^q` (`q = 2` for Lie–Trotter, `3` otherwise)
/// from `t = t0·2⁻ᵏ`, `k = 0..=4`, eliminating integer powers of `t`.
pub fn extract_leading(p: &OperatorPair, m: Method, t0: f64) -> Result<CMat> {
    let q = m
        .local_error_power()
        .ok_or_else(|| Error::InvalidArgument(format!("{m} has no splitting error")))?;
    if !(t0.is_finite() && t0 > 0.0 && t0 <= MAX_LEADING_T0) {
        return Err(Error::InvalidArgument(format!(
            "t0 = {t0} must lie in (0, {MAX_LEADING_T0}]"
        )));
    }
    let mut column: Vec<CMat> = (0..=RICHARDSON_DEPTH)
        .map(|k| {
            let t = t0 * 2f64.powi(-(k as i32));
            Ok(error_direct(p, m, t)?.scale_real(t.powi(-q)))
        })
        .collect::<Result<_>>()?;
    let first_change = (&column[1] - &column[0]).max_abs_entry();
    let mut diagonal = vec![column[0].clone()];
    for level in 1..=RICHARDSON_DEPTH {
        let factor = 2f64.powi(level as i32);
        column = column
            .windows(2)
            .map(|w| (&w[1].scale_real(factor) - &w[0]).scale_real(1.0 / (factor - 1.0)))
            .collect();
        diagonal.push(column[0].clone());
    }
    let value = column.pop().expect("one entry left");
    let last_change = (&diagonal[RICHARDSON_DEPTH] - &diagonal[RICHARDSON_DEPTH - 1]).max_abs_entry();
    if !value.is_finite() || last_change > first_change.max(NOISE_FLOOR) {
        return Err(Error::Divergent(
            diagonal
                .windows(2)
                .map(|w| (&w[1] - &w[0]).max_abs_entry())
                .collect(),
        ));
    }
    Ok(value)
}

/// The leading coefficient predicted by Taylor expansion:
/// `½[A,B]`, `(1/12)[A−B,[A,B]]` and `−(1/24)[A+2B,[A,B]]` for the forward
/// methods, with `A` and `B` exchanged for the reversed ones.
pub fn leading_target(p: &OperatorPair, m: Method) -> Result<CMat> {
    let (canonical, swap) = m.canonical();
    let swapped;
    let pair = if swap {
        swapped = p.swapped();
        &swapped
    } else {
        p
    };
    match canonical {
        Method::LieTrotter => Ok(pair.comm_ab().scale_real(0.5)),
        Method::PalindromicLieTrotter => Ok((pair.comm_a_ab() - pair.comm_b_ab()).scale_real(1.0 / 12.0)),
        Method::Strang => {
            let mut v = pair.comm_a_ab().clone();
            v.axpy(2.0.into(), pair.comm_b_ab());
            Ok(v.scale_real(-1.0 / 24.0))
        }
        _ => Err(Error::InvalidArgument(format!("{m} has no splitting error"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{generate, ProblemKind, ProblemSpec};

    #[test]
    fn least_squares_recovers_a_line() {
        let points: Vec<(f64, f64)> = (0..6).map(|i| (i as f64, 3.0 * i as f64 - 2.0)).collect();
        let (s, b) = least_squares(&points);
        assert!((s - 3.0).abs() < 1e-14 && (b + 2.0).abs() < 1e-14);
    }

    #[test]
    fn lie_trotter_nilpotent_slope() {
        let p = generate(&ProblemSpec::nilpotent()).unwrap();
        let fit = fit_local_order(&p, Method::LieTrotter, 1.0, 2, 8).unwrap();
        assert!((fit.slope - 2.0).abs() < 0.05, "{fit:?}");
        assert!(fit.residual >= 0.0);
        assert_eq!(fit.k_range, (2, 8));
    }

    #[test]
    fn strang_skew_slope() {
        let p = generate(&ProblemSpec::random(ProblemKind::RandomSkew, 8, 17)).unwrap();
        let fit = fit_local_order(&p, Method::Strang, 1.0, 2, 8).unwrap();
        assert!((fit.slope - 3.0).abs() < 0.05, "{fit:?}");
    }

    #[test]
    fn commuting_pair_hits_noise_floor() {
        let p = generate(&ProblemSpec::random(ProblemKind::CommutingDiag, 4, 2)).unwrap();
        for m in [Method::LieTrotter, Method::PalindromicLieTrotter, Method::Strang] {
            assert!(matches!(fit_local_order(&p, m, 1.0, 2, 8), Err(Error::NoiseFloor { .. })));
        }
    }

    #[test]
    fn fit_rejects_short_grid() {
        let p = generate(&ProblemSpec::nilpotent()).unwrap();
        assert!(fit_local_order(&p, Method::LieTrotter, 1.0, 2, 4).is_err());
    }

    #[test]
    fn leading_terms_on_nilpotent_pair() {
        let p = generate(&ProblemSpec::nilpotent()).unwrap();
        for m in Method::ALL.iter().copied().filter(|&m| m != Method::Exact) {
            let estimate = extract_leading(&p, m, 0.25).unwrap();
            let target = leading_target(&p, m).unwrap();
            assert!((&estimate - &target).max_abs_entry() < 1e-4, "{m}");
        }
        // [A,B] = diag(1,−1)
        let lt = leading_target(&p, Method::LieTrotter).unwrap();
        assert_eq!(lt, CMat::from_real_rows(&[&[0.5, 0.0], &[0.0, -0.5]]).unwrap());
    }

    #[test]
    fn leading_rejects_large_t0() {
        let p = generate(&ProblemSpec::nilpotent()).unwrap();
        assert!(extract_leading(&p, Method::Strang, 0.75).is_err());
        assert!(extract_leading(&p, Method::Exact, 0.25).is_err());
    }
}

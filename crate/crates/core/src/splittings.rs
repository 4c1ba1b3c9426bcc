//! Splitting propagators for a fixed operator pair.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{commutator_unchecked, lognorm, opnorm2, CMat, Exponential};

/// The pair `(A, B)` together with everything downstream code keeps asking
/// for: the commutators `[A,B]`, `[A,[A,B]]`, `[B,[A,B]]`, their spectral
/// norms, the log-norms of `A`, `B`, `A+B` and `ω = μ[A] + μ[B] − μ[A+B]`.
#[derive(Clone, Debug)]
pub struct OperatorPair {
    a: Exponential,
    b: Exponential,
    sum: Exponential,
    ab: CMat,
    a_ab: CMat,
    b_ab: CMat,
    norm_ab: f64,
    norm_a_ab: f64,
    norm_b_ab: f64,
    mu_a: f64,
    mu_b: f64,
    mu_sum: f64,
}

impl OperatorPair {
    pub fn new(a: CMat, b: CMat) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: b.dim(),
            });
        }
        a.check_finite()?;
        b.check_finite()?;
        let sum = &a + &b;
        let ab = commutator_unchecked(&a, &b);
        let a_ab = commutator_unchecked(&a, &ab);
        let b_ab = commutator_unchecked(&b, &ab);
        Ok(OperatorPair {
            norm_ab: opnorm2(&ab),
            norm_a_ab: opnorm2(&a_ab),
            norm_b_ab: opnorm2(&b_ab),
            mu_a: lognorm(&a).value(),
            mu_b: lognorm(&b).value(),
            mu_sum: lognorm(&sum).value(),
            a: Exponential::new(&a)?,
            b: Exponential::new(&b)?,
            sum: Exponential::new(&sum)?,
            ab,
            a_ab,
            b_ab,
        })
    }

    /// The pair `(B, A)`; the reversed splittings are the plain ones applied
    /// to this.
    pub fn swapped(&self) -> Self {
        OperatorPair::new(self.b().clone(), self.a().clone()).expect("already validated")
    }

    pub fn dim(&self) -> usize {
        self.ab.dim()
    }

    pub fn a(&self) -> &CMat {
        self.a.generator()
    }

    pub fn b(&self) -> &CMat {
        self.b.generator()
    }

    /// `A + B`.
    pub fn sum(&self) -> &CMat {
        self.sum.generator()
    }

    /// `[A, B]`
    pub fn comm_ab(&self) -> &CMat {
        &self.ab
    }

    /// `[A, [A, B]]`
    pub fn comm_a_ab(&self) -> &CMat {
        &self.a_ab
    }

    /// `[B, [A, B]]`
    pub fn comm_b_ab(&self) -> &CMat {
        &self.b_ab
    }

    pub fn norm_comm_ab(&self) -> f64 {
        self.norm_ab
    }

    pub fn norm_comm_a_ab(&self) -> f64 {
        self.norm_a_ab
    }

    pub fn norm_comm_b_ab(&self) -> f64 {
        self.norm_b_ab
    }

    pub fn mu_a(&self) -> f64 {
        self.mu_a
    }

    pub fn mu_b(&self) -> f64 {
        self.mu_b
    }

    pub fn mu_sum(&self) -> f64 {
        self.mu_sum
    }

    pub fn omega(&self) -> f64 {
        self.mu_a + self.mu_b - self.mu_sum
    }

    /// `e^{sA}`
    pub fn exp_a(&self, s: f64) -> CMat {
        self.a.at(s)
    }

    /// `e^{sB}`
    pub fn exp_b(&self, s: f64) -> CMat {
        self.b.at(s)
    }

    /// `e^{s(A+B)}`
    pub fn exp_sum(&self, s: f64) -> CMat {
        self.sum.at(s)
    }

    pub fn commutes(&self) -> bool {
        self.ab.is_zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    /// `e^{tA} e^{tB}`
    #[serde(rename = "LT")]
    LieTrotter,
    /// `e^{tB} e^{tA}`
    #[serde(rename = "LT_REV")]
    LieTrotterReversed,
    /// `½(e^{tA} e^{tB} + e^{tB} e^{tA})`
    #[serde(rename = "PLT")]
    PalindromicLieTrotter,
    /// `e^{tA/2} e^{tB} e^{tA/2}`
    #[serde(rename = "STRANG")]
    Strang,
    /// `e^{tB/2} e^{tA} e^{tB/2}`
    #[serde(rename = "STRANG_REV")]
    StrangReversed,
    /// `e^{t(A+B)}`
    #[serde(rename = "EXACT")]
    Exact,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::LieTrotter,
        Method::LieTrotterReversed,
        Method::PalindromicLieTrotter,
        Method::Strang,
        Method::StrangReversed,
        Method::Exact,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::LieTrotter => "LT",
            Method::LieTrotterReversed => "LT_REV",
            Method::PalindromicLieTrotter => "PLT",
            Method::Strang => "STRANG",
            Method::StrangReversed => "STRANG_REV",
            Method::Exact => "EXACT",
        }
    }

    /// Power of `t` in the local error: 2 for Lie–Trotter, 3 for the
    /// second-order methods. `None` for the exact propagator.
    pub fn local_error_power(self) -> Option<i32> {
        match self {
            Method::LieTrotter | Method::LieTrotterReversed => Some(2),
            Method::PalindromicLieTrotter | Method::Strang | Method::StrangReversed => Some(3),
            Method::Exact => None,
        }
    }

    /// Whether `Y(t)⁻¹ = Y(−t)` holds for every pair.
    pub fn is_time_symmetric(self) -> bool {
        matches!(self, Method::Strang | Method::StrangReversed | Method::Exact)
    }

    /// The non-reversed method and whether the pair has to be swapped to
    /// evaluate it.
    pub fn canonical(self) -> (Method, bool) {
        match self {
            Method::LieTrotterReversed => (Method::LieTrotter, true),
            Method::StrangReversed => (Method::Strang, true),
            m => (m, false),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method tag `{s}`")))
    }
}

/// `Y_m(A, B; t)`. Negative `t` is accepted (needed for the symmetry test).
pub fn propagator(p: &OperatorPair, m: Method, t: f64) -> Result<CMat> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time {t} is not finite")));
    }
    Ok(match m {
        Method::LieTrotter => &p.exp_a(t) * &p.exp_b(t),
        Method::LieTrotterReversed => &p.exp_b(t) * &p.exp_a(t),
        Method::PalindromicLieTrotter => {
            let (ea, eb) = (p.exp_a(t), p.exp_b(t));
            let mut y = &ea * &eb;
            y.axpy(1.0.into(), &(&eb * &ea));
            y.scale_real(0.5)
        }
        Method::Strang => {
            let half = p.exp_a(0.5 * t);
            &(&half * &p.exp_b(t)) * &half
        }
        Method::StrangReversed => {
            let half = p.exp_b(0.5 * t);
            &(&half * &p.exp_a(t)) * &half
        }
        Method::Exact => p.exp_sum(t),
    })
}

/// `n` steps of size `t/n`.
pub fn step_n(p: &OperatorPair, m: Method, t: f64, n: u32) -> Result<CMat> {
    if n == 0 {
        return Err(Error::InvalidArgument("step count must be positive".into()));
    }
    let one = propagator(p, m, t / n as f64)?;
    Ok(one.powi(n))
}

/// `‖Y(t)·Y(−t) − I‖₂`; zero for time-symmetric methods.
pub fn symmetry_defect(p: &OperatorPair, m: Method, t: f64) -> Result<f64> {
    let fwd = propagator(p, m, t)?;
    let bwd = propagator(p, m, -t)?;
    Ok(opnorm2(&(&(&fwd * &bwd) - &CMat::identity(p.dim()))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{expm, C64};

    fn nilpotent() -> OperatorPair {
        let a = CMat::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let b = CMat::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap();
        OperatorPair::new(a, b).unwrap()
    }

    fn diagonal_pair() -> OperatorPair {
        let a = CMat::from_diag(&[C64::new(0.3, 1.0), C64::new(-0.7, 0.2), C64::new(0.1, -0.4)]).unwrap();
        let b = CMat::from_diag(&[C64::new(-0.2, 0.5), C64::new(0.4, 0.0), C64::new(0.9, 0.3)]).unwrap();
        OperatorPair::new(a, b).unwrap()
    }

    #[test]
    fn tags_round_trip_and_unknown_rejected() {
        for m in Method::ALL {
            assert_eq!(m.tag().parse::<Method>().unwrap(), m);
        }
        assert!("YOSHIDA".parse::<Method>().is_err());
    }

    #[test]
    fn zero_time_is_identity() {
        let p = nilpotent();
        for m in Method::ALL {
            assert_eq!(propagator(&p, m, 0.0).unwrap(), CMat::identity(2));
        }
    }

    #[test]
    fn commuting_pair_is_exact() {
        let p = diagonal_pair();
        let exact = propagator(&p, Method::Exact, 0.8).unwrap();
        for m in Method::ALL {
            let y = propagator(&p, m, 0.8).unwrap();
            assert!(opnorm2(&(&y - &exact)) < 1e-11, "{m}");
        }
    }

    #[test]
    fn lie_trotter_on_nilpotent_pair() {
        // e^{tA} e^{tB} = [[1, t], [0, 1]] [[1, 0], [t, 1]]
        for t in [0.1, 0.5, 2.0] {
            let y = propagator(&nilpotent(), Method::LieTrotter, t).unwrap();
            let expected = CMat::from_real_rows(&[&[1.0 + t * t, t], &[t, 1.0]]).unwrap();
            assert!((&y - &expected).max_abs_entry() < 1e-14);
        }
    }

    #[test]
    fn exact_matches_expm() {
        let p = nilpotent();
        let y = propagator(&p, Method::Exact, 0.7).unwrap();
        let direct = expm(&p.sum().scale_real(0.7)).unwrap();
        assert!((&y - &direct).max_abs_entry() < 1e-14);
    }

    #[test]
    fn step_count_validation_and_semigroup() {
        let p = nilpotent();
        assert!(step_n(&p, Method::Strang, 1.0, 0).is_err());
        assert_eq!(
            step_n(&p, Method::Strang, 0.4, 1).unwrap(),
            propagator(&p, Method::Strang, 0.4).unwrap()
        );
        let exact = propagator(&p, Method::Exact, 1.0).unwrap();
        for n in [2, 5, 16] {
            let y = step_n(&p, Method::Exact, 1.0, n).unwrap();
            assert!(opnorm2(&(&y - &exact)) < 1e-11);
        }
    }

    #[test]
    fn global_order_one_for_lie_trotter() {
        let p = nilpotent();
        let exact = propagator(&p, Method::Exact, 1.0).unwrap();
        let errs: Vec<f64> = [1, 2, 4, 8, 16]
            .iter()
            .map(|&n| opnorm2(&(&step_n(&p, Method::LieTrotter, 1.0, n).unwrap() - &exact)))
            .collect();
        for w in errs.windows(2).skip(1) {
            let ratio = w[0] / w[1];
            assert!((ratio - 2.0).abs() < 0.25, "ratio {ratio}");
        }
    }

    #[test]
    fn symmetry_defects_on_nilpotent_pair() {
        let p = nilpotent();
        assert!(symmetry_defect(&p, Method::Strang, 0.5).unwrap() <= 1e-12);
        assert!(symmetry_defect(&p, Method::LieTrotter, 0.5).unwrap() >= 1e-4);
        assert!(symmetry_defect(&p, Method::PalindromicLieTrotter, 0.5).unwrap() > 1e-6);
    }

    #[test]
    fn nilpotent_cache() {
        let p = nilpotent();
        assert_eq!(p.comm_ab(), &CMat::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap());
        assert_eq!(p.comm_a_ab(), &p.a().scale_real(-2.0));
        assert_eq!(p.comm_b_ab(), &p.b().scale_real(2.0));
        assert_eq!(p.omega(), p.mu_a() + p.mu_b() - p.mu_sum());
    }

    #[test]
    fn mismatched_pair_rejected() {
        assert!(OperatorPair::new(CMat::identity(2), CMat::identity(3)).is_err());
    }
}

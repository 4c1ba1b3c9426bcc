//! Logarithmic-norm error bounds for the three splittings.
//!
//! With `x = ωt`, `ω = μ[A] + μ[B] − μ[A+B]` and `cᵢ` the 2-norms of
//! `[A,B]`, `[A,[A,B]]`, `[B,[A,B]]`:
//!
//! ```text
//! LT:     e^{tμ[A+B]} (1 − (1 − x)eˣ)/ω² · c1
//! PLT:    e^{tμ[A+B]} (1 + x/2) ((1 + x/2)e⁻ˣ − (1 − x/2))/ω³ · (c2 + c3)
//!           + 3((1 + x + x²/3)e⁻ˣ − (1 − x²/6))/ω⁴ · c1²
//! Strang: ¼ e^{tμ[A+B]} ((1 − x + x²/2)eˣ − 1)/ω³ · (c2 + 2c3)
//! ```
//!
//! Each numerator vanishes to order `x²`–`x⁴` at `ω = 0`. For `|x|` below
//! [`SERIES_THRESHOLD`] the bounds are summed as Taylor series in `x`;
//! otherwise the closed forms are evaluated in double-double arithmetic so
//! that the cancellation near the threshold costs no accuracy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::error_forms::error_direct;
use crate::matcore::opnorm2;
use crate::splittings::{Method, OperatorPair};

/// `|ωt|` below which the series is used.
pub const SERIES_THRESHOLD: f64 = 1e-2;
const SERIES_TERMS: usize = 16;
/// Relative slack allowed when comparing a measured error with its bound.
pub const DOMINANCE_SLACK: f64 = 1e-10;
/// A measured error is the difference of two computed propagators, so it is
/// only resolved down to a few ulps of `‖e^{t(A+B)}‖`; errors below this floor
/// (commuting pairs, `t → 0`) count as dominated.
pub const ROUNDOFF_FLOOR_ULPS: f64 = 64.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub t: f64,
    /// `μ[A+B]`
    pub mu_ab: f64,
    pub omega: f64,
    /// `‖[A,B]‖₂`
    pub c1: f64,
    /// `‖[A,[A,B]]‖₂`
    pub c2: f64,
    /// `‖[B,[A,B]]‖₂`
    pub c3: f64,
}

impl BoundInputs {
    pub fn from_pair(p: &OperatorPair, t: f64) -> Self {
        BoundInputs {
            t,
            mu_ab: p.mu_sum(),
            omega: p.omega(),
            c1: p.norm_comm_ab(),
            c2: p.norm_comm_a_ab(),
            c3: p.norm_comm_b_ab(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.t.is_finite() && self.t >= 0.0) {
            return Err(Error::InvalidArgument(format!("time {} must be finite and ≥ 0", self.t)));
        }
        if !(self.mu_ab.is_finite() && self.omega.is_finite()) {
            return Err(Error::InvalidArgument("μ[A+B] and ω must be finite".into()));
        }
        for c in [self.c1, self.c2, self.c3] {
            if !(c.is_finite() && c >= 0.0) {
                return Err(Error::InvalidArgument(format!("commutator norm {c} must be finite and ≥ 0")));
            }
        }
        Ok(())
    }

    fn x(&self) -> f64 {
        self.omega * self.t
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluationPath {
    ClosedForm,
    SeriesFallback,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub value: f64,
    pub path: EvaluationPath,
}

/// Which bound to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundKind {
    LieTrotter,
    Palindromic,
    Strang,
}

impl BoundKind {
    /// Bound for `m`; reversed methods use the forward bound on the swapped
    /// pair, see [`check_bound`].
    pub fn for_method(m: Method) -> Result<Self> {
        match m.canonical().0 {
            Method::LieTrotter => Ok(BoundKind::LieTrotter),
            Method::PalindromicLieTrotter => Ok(BoundKind::Palindromic),
            Method::Strang => Ok(BoundKind::Strang),
            _ => Err(Error::InvalidArgument(format!("no error bound for {m}"))),
        }
    }
}

pub fn bound_lt(inputs: &BoundInputs) -> Result<BoundValue> {
    evaluate(BoundKind::LieTrotter, inputs)
}

pub fn bound_plt(inputs: &BoundInputs) -> Result<BoundValue> {
    evaluate(BoundKind::Palindromic, inputs)
}

pub fn bound_strang(inputs: &BoundInputs) -> Result<BoundValue> {
    evaluate(BoundKind::Strang, inputs)
}

/// Evaluates `kind`, choosing the series for `|ωt| < SERIES_THRESHOLD`.
pub fn evaluate(kind: BoundKind, inputs: &BoundInputs) -> Result<BoundValue> {
    let path = if inputs.x().abs() < SERIES_THRESHOLD {
        EvaluationPath::SeriesFallback
    } else {
        EvaluationPath::ClosedForm
    };
    Ok(BoundValue {
        value: evaluate_with(kind, inputs, path)?,
        path,
    })
}

/// Evaluates `kind` along a forced path. The closed form is undefined at
/// `ω = 0`.
pub fn evaluate_with(kind: BoundKind, inputs: &BoundInputs, path: EvaluationPath) -> Result<f64> {
    inputs.validate()?;
    let x = inputs.x();
    if path == EvaluationPath::ClosedForm && x == 0.0 {
        return Err(Error::InvalidArgument("the closed form needs ωt ≠ 0".into()));
    }
    let f = |g: fn(f64) -> f64, series: fn(usize) -> f64| match path {
        EvaluationPath::SeriesFallback => sum_series(x, series),
        EvaluationPath::ClosedForm => g(x),
    };
    let t = inputs.t;
    let growth = (t * inputs.mu_ab).exp();
    let value = match kind {
        BoundKind::LieTrotter => growth * (t * t * inputs.c1 * f(closed::lt, series::lt)),
        BoundKind::Palindromic => {
            let first = growth * (1.0 + 0.5 * x) * (t.powi(3) * (inputs.c2 + inputs.c3) * f(closed::plt_a, series::plt_a));
            let second = t.powi(4) * inputs.c1 * inputs.c1 * f(closed::plt_b, series::plt_b);
            first + second
        }
        BoundKind::Strang => 0.25 * growth * (t.powi(3) * (inputs.c2 + 2.0 * inputs.c3) * f(closed::strang, series::strang)),
    };
    if !value.is_finite() {
        return Err(Error::InvalidArgument(format!("bound overflows for ωt = {x}, tμ = {}", t * inputs.mu_ab)));
    }
    Ok(value)
}

/// The `ω → 0` limits: `½t²c1`, `t³(c2+c3)/12 + t⁴c1²/8`, `t³(c2+2c3)/24`,
/// times `e^{tμ[A+B]}` where the bound carries it.
pub fn omega_zero_limit(kind: BoundKind, inputs: &BoundInputs) -> f64 {
    let t = inputs.t;
    let growth = (t * inputs.mu_ab).exp();
    match kind {
        BoundKind::LieTrotter => growth * 0.5 * t * t * inputs.c1,
        BoundKind::Palindromic => {
            growth * t.powi(3) / 12.0 * (inputs.c2 + inputs.c3) + t.powi(4) / 8.0 * inputs.c1 * inputs.c1
        }
        BoundKind::Strang => growth * t.powi(3) / 24.0 * (inputs.c2 + 2.0 * inputs.c3),
    }
}

fn sum_series(x: f64, coefficient: fn(usize) -> f64) -> f64 {
    (0..SERIES_TERMS).rev().fold(0.0, |acc, j| acc * x + coefficient(j))
}

/// Taylor coefficients of the bounds divided by their leading power of `t`.
mod series {
    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    fn sign(j: usize) -> f64 {
        if j.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// `(1 − (1 − x)eˣ)/x²`
    pub fn lt(j: usize) -> f64 {
        (j + 1) as f64 / factorial(j + 2)
    }

    /// `((1 + x/2)e⁻ˣ − (1 − x/2))/x³`
    pub fn plt_a(j: usize) -> f64 {
        sign(j) * (j + 1) as f64 / (2.0 * factorial(j + 3))
    }

    /// `3((1 + x + x²/3)e⁻ˣ − (1 − x²/6))/x⁴`
    pub fn plt_b(j: usize) -> f64 {
        sign(j) * ((j + 3) * (j + 1)) as f64 / factorial(j + 4)
    }

    /// `((1 − x + x²/2)eˣ − 1)/x³`
    pub fn strang(j: usize) -> f64 {
        ((j + 2) * (j + 1)) as f64 / (2.0 * factorial(j + 3))
    }
}

/// The same functions as [`series`], in closed form.
mod closed {
    use super::dd::Dd;

    pub fn lt(x: f64) -> f64 {
        let xd = Dd::from(x);
        let num = Dd::from(1.0) - (Dd::from(1.0) - xd) * xd.exp();
        (num / (xd * xd)).to_f64()
    }

    pub fn plt_a(x: f64) -> f64 {
        let xd = Dd::from(x);
        let half = xd * Dd::from(0.5);
        let num = (Dd::from(1.0) + half) * (-xd).exp() - (Dd::from(1.0) - half);
        (num / (xd * xd * xd)).to_f64()
    }

    pub fn plt_b(x: f64) -> f64 {
        let xd = Dd::from(x);
        let x2 = xd * xd;
        let num = (Dd::from(1.0) + xd + x2 / Dd::from(3.0)) * (-xd).exp() - (Dd::from(1.0) - x2 / Dd::from(6.0));
        (Dd::from(3.0) * num / (x2 * x2)).to_f64()
    }

    pub fn strang(x: f64) -> f64 {
        let xd = Dd::from(x);
        let x2 = xd * xd;
        let num = (Dd::from(1.0) - xd + x2 * Dd::from(0.5)) * xd.exp() - Dd::from(1.0);
        (num / (x2 * xd)).to_f64()
    }
}

/// Double-double arithmetic: an unevaluated sum `hi + lo` with
/// `|lo| ≤ ulp(hi)/2`, good for about 32 significant digits.
mod dd {
    use std::ops::{Add, Div, Mul, Neg, Sub};

    #[derive(Clone, Copy, Debug, PartialEq)]
    pub struct Dd {
        hi: f64,
        lo: f64,
    }

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        (s, b - (s - a))
    }

    fn two_prod(a: f64, b: f64) -> (f64, f64) {
        let p = a * b;
        (p, a.mul_add(b, -p))
    }

    const LN2: Dd = Dd {
        hi: std::f64::consts::LN_2,
        lo: 2.319_046_813_846_299_6e-17,
    };
    const REDUCTION_SQUARINGS: i32 = 8;
    const TAYLOR_TERMS: u32 = 14;

    impl Dd {
        pub fn to_f64(self) -> f64 {
            self.hi + self.lo
        }

        fn ldexp(self, k: i32) -> Dd {
            let s = 2f64.powi(k);
            Dd {
                hi: self.hi * s,
                lo: self.lo * s,
            }
        }

        /// `eˣ` by `x = k ln 2 + r`, a Taylor series for `e^{r/256}` and eight
        /// squarings.
        pub fn exp(self) -> Dd {
            if self.hi > 709.0 {
                return Dd::from(f64::INFINITY);
            }
            if self.hi < -745.0 {
                return Dd::from(0.0);
            }
            let k = (self.hi / LN2.hi).round();
            let r = (self - LN2 * Dd::from(k)).ldexp(-REDUCTION_SQUARINGS);
            let mut term = Dd::from(1.0);
            let mut sum = Dd::from(1.0);
            for n in 1..=TAYLOR_TERMS {
                term = term * r / Dd::from(n as f64);
                sum = sum + term;
            }
            for _ in 0..REDUCTION_SQUARINGS {
                sum = sum * sum;
            }
            sum.ldexp(k as i32)
        }
    }

    impl From<f64> for Dd {
        fn from(x: f64) -> Dd {
            Dd { hi: x, lo: 0.0 }
        }
    }

    impl Add for Dd {
        type Output = Dd;
        fn add(self, o: Dd) -> Dd {
            let (s, e) = two_sum(self.hi, o.hi);
            let (t, f) = two_sum(self.lo, o.lo);
            let (s, e) = quick_two_sum(s, e + t);
            let (hi, lo) = quick_two_sum(s, e + f);
            Dd { hi, lo }
        }
    }

    impl Neg for Dd {
        type Output = Dd;
        fn neg(self) -> Dd {
            Dd {
                hi: -self.hi,
                lo: -self.lo,
            }
        }
    }

    impl Sub for Dd {
        type Output = Dd;
        fn sub(self, o: Dd) -> Dd {
            self + (-o)
        }
    }

    impl Mul for Dd {
        type Output = Dd;
        fn mul(self, o: Dd) -> Dd {
            let (p, e) = two_prod(self.hi, o.hi);
            let e = e + (self.hi * o.lo + self.lo * o.hi);
            let (hi, lo) = quick_two_sum(p, e);
            Dd { hi, lo }
        }
    }

    impl Div for Dd {
        type Output = Dd;
        fn div(self, o: Dd) -> Dd {
            let q1 = self.hi / o.hi;
            let r = self - o * Dd::from(q1);
            let q2 = r.hi / o.hi;
            let r = r - o * Dd::from(q2);
            let q3 = r.hi / o.hi;
            let (hi, lo) = quick_two_sum(q1, q2);
            Dd { hi, lo } + Dd::from(q3)
        }
    }

}

/// Measured error against its bound at one time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub measured: f64,
    pub bound: f64,
    pub path: EvaluationPath,
    /// `measured ≤ bound·(1 + 1e−10) + roundoff_floor`
    pub satisfied: bool,
    pub roundoff_floor: f64,
    /// `measured / bound`; `0` when the bound vanishes and the measured error
    /// is below the rounding floor.
    pub slack_ratio: f64,
}

/// Compares `‖E_m(t)‖₂` with the matching bound; reversed methods use the
/// forward bound on the swapped pair.
pub fn check_bound(p: &OperatorPair, m: Method, t: f64) -> Result<BoundReport> {
    let kind = BoundKind::for_method(m)?;
    let inputs = if m.canonical().1 {
        BoundInputs::from_pair(&p.swapped(), t)
    } else {
        BoundInputs::from_pair(p, t)
    };
    let bound = evaluate(kind, &inputs)?;
    let measured = opnorm2(&error_direct(p, m, t)?);
    let roundoff_floor = ROUNDOFF_FLOOR_ULPS * f64::EPSILON * opnorm2(&p.exp_sum(t)).max(1.0);
    let slack_ratio = if measured <= roundoff_floor && bound.value == 0.0 {
        0.0
    } else {
        measured / bound.value
    };
    Ok(BoundReport {
        measured,
        bound: bound.value,
        path: bound.path,
        satisfied: measured <= bound.value * (1.0 + DOMINANCE_SLACK) + roundoff_floor,
        roundoff_floor,
        slack_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{generate, ProblemKind, ProblemSpec};

    fn inputs(t: f64, omega: f64, c1: f64, c2: f64, c3: f64) -> BoundInputs {
        BoundInputs {
            t,
            mu_ab: 0.0,
            omega,
            c1,
            c2,
            c3,
        }
    }

    fn rel(x: f64, y: f64) -> f64 {
        (x - y).abs() / y.abs()
    }

    #[test]
    fn omega_zero_values() {
        let lt = bound_lt(&inputs(1.0, 0.0, 1.0, 0.0, 0.0)).unwrap();
        assert_eq!(lt.value, 0.5);
        assert_eq!(lt.path, EvaluationPath::SeriesFallback);
        let plt = bound_plt(&inputs(1.0, 0.0, 1.0, 1.0, 1.0)).unwrap();
        assert!(rel(plt.value, 2.0 / 12.0 + 1.0 / 8.0) < 1e-15);
        let plt = bound_plt(&inputs(1.0, 0.0, 1.0, 1.0, 0.0)).unwrap();
        assert!(rel(plt.value, 1.0 / 12.0 + 1.0 / 8.0) < 1e-15);
        let s = bound_strang(&inputs(1.0, 0.0, 0.0, 1.0, 0.0)).unwrap();
        assert!(rel(s.value, 1.0 / 24.0) < 1e-15);
        for t in [0.1, 0.7, 3.0] {
            let i = inputs(t, 0.0, 1.7, 0.0, 0.0);
            assert_eq!(bound_lt(&i).unwrap().value, 0.5 * t * t * 1.7);
        }
    }

    #[test]
    fn commuting_inputs_give_zero() {
        for omega in [-0.4, 0.0, 0.3, 2.0] {
            let i = inputs(0.8, omega, 0.0, 0.0, 0.0);
            assert_eq!(bound_lt(&i).unwrap().value, 0.0);
            assert_eq!(bound_plt(&i).unwrap().value, 0.0);
            assert_eq!(bound_strang(&i).unwrap().value, 0.0);
        }
    }

    #[test]
    fn closed_form_reference_values() {
        // 40-digit references
        let lt = bound_lt(&inputs(1.0, 0.5, 1.0, 0.0, 0.0)).unwrap();
        assert_eq!(lt.path, EvaluationPath::ClosedForm);
        assert!(rel(lt.value, 0.702_557_458_599_743_7) < 1e-14);
        let plt = bound_plt(&inputs(1.0, 0.3, 1.0, 1.0, 1.0)).unwrap();
        assert!(rel(plt.value, 0.272_093_658_147_828_7) < 1e-14);
        let s = bound_strang(&inputs(0.8, 0.4, 0.0, 1.0, 1.0)).unwrap();
        assert!(rel(s.value, 0.081_513_530_653_732_27) < 1e-14);
        let plt = bound_plt(&BoundInputs {
            t: 2.0,
            mu_ab: -0.3,
            omega: 2.5,
            c1: 1.3,
            c2: 0.4,
            c3: 2.1,
        })
        .unwrap();
        assert!(rel(plt.value, 0.891_792_540_378_931_4) < 1e-14);
    }

    #[test]
    fn negative_omega() {
        let i = BoundInputs {
            t: 1.5,
            mu_ab: 0.2,
            omega: -0.7,
            c1: 1.3,
            c2: 0.4,
            c3: 2.1,
        };
        assert!(rel(bound_lt(&i).unwrap().value, 1.012_162_422_028_571_1) < 1e-14);
        assert!(rel(bound_plt(&i).unwrap().value, 2.706_045_556_765_350_1) < 1e-14);
        assert!(rel(bound_strang(&i).unwrap().value, 0.406_071_746_639_079_84) < 1e-14);
    }

    #[test]
    fn seam_continuity() {
        for kind in [BoundKind::LieTrotter, BoundKind::Palindromic, BoundKind::Strang] {
            for omega in [SERIES_THRESHOLD, -SERIES_THRESHOLD] {
                let i = inputs(1.0, omega, 1.0, 1.0, 1.0);
                let closed = evaluate_with(kind, &i, EvaluationPath::ClosedForm).unwrap();
                let series = evaluate_with(kind, &i, EvaluationPath::SeriesFallback).unwrap();
                assert!(rel(closed, series) < 1e-14, "{kind:?} ω={omega}: {closed} vs {series}");
            }
        }
    }

    #[test]
    fn limit_recovery() {
        for kind in [BoundKind::LieTrotter, BoundKind::Palindromic, BoundKind::Strang] {
            let base = inputs(1.0, 0.0, 1.0, 1.0, 1.0);
            let limit = omega_zero_limit(kind, &base);
            let deviations: Vec<f64> = (4..=12)
                .map(|k| {
                    let i = BoundInputs {
                        omega: 10f64.powi(-k),
                        ..base
                    };
                    rel(evaluate(kind, &i).unwrap().value, limit)
                })
                .collect();
            assert!(deviations.windows(2).all(|w| w[1] <= w[0]), "{deviations:?}");
            assert!(*deviations.last().unwrap() <= 1e-9);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(bound_lt(&inputs(-1.0, 0.0, 1.0, 0.0, 0.0)).is_err());
        assert!(bound_plt(&inputs(1.0, f64::NAN, 1.0, 0.0, 0.0)).is_err());
        assert!(bound_strang(&inputs(1.0, 0.0, -1.0, 0.0, 0.0)).is_err());
        assert!(evaluate_with(BoundKind::Strang, &inputs(1.0, 0.0, 1.0, 1.0, 1.0), EvaluationPath::ClosedForm).is_err());
    }

    #[test]
    fn nilpotent_lie_trotter() {
        let p = generate(&ProblemSpec::nilpotent()).unwrap();
        let report = check_bound(&p, Method::LieTrotter, 0.1).unwrap();
        // ω = ½ + ½ − 1 = 0, so the bound is e^{0.1}·½·0.01·‖diag(1,−1)‖
        assert!(rel(report.bound, 0.1f64.exp() * 0.005) < 1e-14);
        assert!((report.measured - 5.0e-3).abs() < 1e-5);
        assert!(report.satisfied);
    }

    #[test]
    fn skew_pairs_are_dominated() {
        let p = generate(&ProblemSpec::random(ProblemKind::RandomSkew, 4, 21)).unwrap();
        assert_eq!(p.omega(), 0.0);
        for m in [
            Method::LieTrotter,
            Method::LieTrotterReversed,
            Method::PalindromicLieTrotter,
            Method::Strang,
            Method::StrangReversed,
        ] {
            let report = check_bound(&p, m, 0.5).unwrap();
            assert!(report.satisfied, "{m}: {report:?}");
        }
        let c = generate(&ProblemSpec::random(ProblemKind::CommutingDiag, 4, 1)).unwrap();
        let report = check_bound(&c, Method::Strang, 0.5).unwrap();
        assert!(report.measured < report.roundoff_floor && report.satisfied);
        assert!(check_bound(&c, Method::Exact, 0.5).is_err());
    }
}

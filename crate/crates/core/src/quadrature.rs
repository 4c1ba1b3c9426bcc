//! Gauss–Legendre quadrature for matrix-valued integrals over the nested
//! domains `0 ≤ η ≤ ξ ≤ τ ≤ t`.
//!
//! Integrals are iterated, not symmetrized: the inner variable runs over
//! `[0, outer]` with the same `n`-point rule affinely mapped, so a double
//! integral costs `n²` integrand evaluations. Nodes are accumulated in a fixed
//! order, which makes every result bit-reproducible.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::matcore::{opnorm2, CMat};

pub const DEFAULT_NODES: usize = 24;
pub const MAX_NODES: usize = 192;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    fn compute(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let dp = legendre(n, x).1;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared, lazily built rule for `n` points.
pub fn gauss_legendre(n: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("node cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(GaussLegendre::compute(n)))
        .clone()
}

/// An `n`-point-per-level iterated Gauss–Legendre rule.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    nodes_per_level: usize,
    rule: Arc<GaussLegendre>,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self::new(DEFAULT_NODES).expect("valid default")
    }
}

impl QuadratureRule {
    pub fn new(nodes_per_level: usize) -> Result<Self> {
        if nodes_per_level == 0 {
            return Err(Error::InvalidArgument("quadrature needs at least one node".into()));
        }
        Ok(QuadratureRule {
            nodes_per_level,
            rule: gauss_legendre(nodes_per_level),
        })
    }

    pub fn nodes_per_level(&self) -> usize {
        self.nodes_per_level
    }

    /// Nodes and weights mapped to `[lo, hi]`.
    pub fn mapped(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.rule
            .nodes
            .iter()
            .zip(&self.rule.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    /// `∫_lo^hi f`, with `f` allowed to fail. Non-finite values are reported
    /// with their node.
    pub fn try_integrate(&self, lo: f64, hi: f64, mut f: impl FnMut(f64) -> Result<CMat>) -> Result<CMat> {
        let mut acc: Option<CMat> = None;
        for (x, w) in self.mapped(lo, hi) {
            let v = f(x)?;
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand { node: vec![x] });
            }
            match acc.as_mut() {
                Some(a) => a.axpy(w.into(), &v),
                None => acc = Some(v.scale_real(w)),
            }
        }
        Ok(acc.expect("at least one node"))
    }

    /// `∫₀ᵗ f(τ) dτ`
    pub fn integrate1(&self, f: impl Fn(f64) -> CMat, t: f64) -> Result<CMat> {
        check_time(t)?;
        self.try_integrate(0.0, t, |tau| Ok(f(tau)))
    }

    /// `∫₀ᵗ ∫₀^τ f(τ, ξ) dξ dτ`
    pub fn integrate2(&self, f: impl Fn(f64, f64) -> CMat, t: f64) -> Result<CMat> {
        check_time(t)?;
        self.try_integrate(0.0, t, |tau| {
            self.try_integrate(0.0, tau, |xi| {
                let v = f(tau, xi);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFiniteIntegrand { node: vec![tau, xi] })
                }
            })
        })
    }

    /// `∫₀ᵗ ∫₀^τ ∫₀^ξ f(τ, ξ, η) dη dξ dτ`
    pub fn integrate3(&self, f: impl Fn(f64, f64, f64) -> CMat, t: f64) -> Result<CMat> {
        check_time(t)?;
        self.try_integrate(0.0, t, |tau| {
            self.try_integrate(0.0, tau, |xi| {
                self.try_integrate(0.0, xi, |eta| {
                    let v = f(tau, xi, eta);
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(Error::NonFiniteIntegrand { node: vec![tau, xi, eta] })
                    }
                })
            })
        })
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!("integration length {t} must be finite and ≥ 0")));
    }
    Ok(())
}

/// Integrand over one of the nested simplices.
pub enum Integrand<'a> {
    Single(&'a dyn Fn(f64) -> CMat),
    Double(&'a dyn Fn(f64, f64) -> CMat),
    Triple(&'a dyn Fn(f64, f64, f64) -> CMat),
}

impl Integrand<'_> {
    pub fn levels(&self) -> usize {
        match self {
            Integrand::Single(_) => 1,
            Integrand::Double(_) => 2,
            Integrand::Triple(_) => 3,
        }
    }

    pub fn integrate(&self, rule: &QuadratureRule, t: f64) -> Result<CMat> {
        match self {
            Integrand::Single(f) => rule.integrate1(f, t),
            Integrand::Double(f) => rule.integrate2(f, t),
            Integrand::Triple(f) => rule.integrate3(f, t),
        }
    }
}

/// Result of a refinement run.
#[derive(Clone, Debug)]
pub struct Refined {
    pub value: CMat,
    /// 2-norm difference between the last two rules.
    pub delta: f64,
    pub nodes_per_level: usize,
}

/// Evaluates `eval` with 24, 48, 96, 192 nodes per level until two successive
/// results differ by less than `tol` in the 2-norm.
pub fn refine_with(tol: f64, mut eval: impl FnMut(&QuadratureRule) -> Result<CMat>) -> Result<Refined> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let mut n = DEFAULT_NODES;
    let mut previous = eval(&QuadratureRule::new(n)?)?;
    loop {
        n *= 2;
        let current = eval(&QuadratureRule::new(n)?)?;
        let delta = opnorm2(&(&current - &previous));
        if delta < tol {
            return Ok(Refined {
                value: current,
                delta,
                nodes_per_level: n,
            });
        }
        if n >= MAX_NODES {
            return Err(Error::QuadratureNotConverged {
                delta,
                nodes: n,
                tol,
                previous: Box::new(previous),
                last: Box::new(current),
            });
        }
        previous = current;
    }
}

pub fn refine_until(f: &Integrand<'_>, t: f64, tol: f64) -> Result<Refined> {
    refine_with(tol, |rule| f.integrate(rule, t))
}

//! Deterministic test problems.
//!
//! Random entries come from SplitMix64, so any implementation can reproduce
//! the corpus bit for bit:
//!
//! ```text
//! state ← state + 0x9E3779B97F4A7C15            (wrapping)
//! z ← state
//! z ← (z ⊕ (z ≫ 30)) · 0xBF58476D1CE4E5B9      (wrapping)
//! z ← (z ⊕ (z ≫ 27)) · 0x94D049BB133111EB      (wrapping)
//! output z ⊕ (z ≫ 31)
//! ```
//!
//! An output `z` maps to `u = (z ≫ 11) · 2⁻⁵³ ∈ [0, 1)` and a matrix entry is
//! `(2u − 1) + i(2u' − 1)` from two consecutive draws, filled row-major, `A`
//! before `B`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{c, opnorm2, CMat, C64};
use crate::splittings::OperatorPair;

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[−1, 1)`.
    pub fn next_signed(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }

    fn next_complex(&mut self) -> C64 {
        let re = self.next_signed();
        C64::new(re, self.next_signed())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    RandomGeneral,
    RandomHermitian,
    RandomSkew,
    CommutingDiag,
    #[serde(rename = "nilpotent_2x2")]
    Nilpotent2x2,
    #[serde(rename = "schrodinger_1d")]
    Schrodinger1d,
}

impl ProblemKind {
    pub fn tag(self) -> &'static str {
        match self {
            ProblemKind::RandomGeneral => "random_general",
            ProblemKind::RandomHermitian => "random_hermitian",
            ProblemKind::RandomSkew => "random_skew",
            ProblemKind::CommutingDiag => "commuting_diag",
            ProblemKind::Nilpotent2x2 => "nilpotent_2x2",
            ProblemKind::Schrodinger1d => "schrodinger_1d",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Potential `V(x)` on `[0, 1]` for the Schrödinger problem.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Potential {
    /// `4(x − ½)²`
    #[default]
    Harmonic,
    /// `−1` on `[0.3, 0.7]`, `0` elsewhere
    Well,
    /// `cos 2πx`
    Cosine,
}

impl FromStr for Potential {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "harmonic" => Ok(Potential::Harmonic),
            "well" => Ok(Potential::Well),
            "cosine" => Ok(Potential::Cosine),
            _ => Err(Error::InvalidArgument(format!("unknown potential `{s}`"))),
        }
    }
}

impl Potential {
    pub fn tag(self) -> &'static str {
        match self {
            Potential::Harmonic => "harmonic",
            Potential::Well => "well",
            Potential::Cosine => "cosine",
        }
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Potential::Harmonic => 4.0 * (x - 0.5) * (x - 0.5),
            Potential::Well => {
                if (0.3..=0.7).contains(&x) {
                    -1.0
                } else {
                    0.0
                }
            }
            Potential::Cosine => (2.0 * std::f64::consts::PI * x).cos(),
        }
    }
}

pub const DEFAULT_DIM: usize = 4;
pub const DEFAULT_GRID_POINTS: usize = 32;
pub const DEFAULT_SCHRODINGER_SCALE: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub kind: ProblemKind,
    /// Matrix dimension; fixed to 2 for the nilpotent pair and to
    /// `grid_points` for the Schrödinger pair.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Target 2-norm of each generated operator (1 by default, 10 for the
    /// Schrödinger kinetic part).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<Potential>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
}

impl Default for ProblemSpec {
    fn default() -> Self {
        ProblemSpec {
            id: None,
            kind: ProblemKind::RandomGeneral,
            dim: None,
            seed: 0,
            scale: None,
            potential: None,
            grid_points: None,
        }
    }
}

impl ProblemSpec {
    pub fn random(kind: ProblemKind, dim: usize, seed: u64) -> Self {
        ProblemSpec {
            kind,
            dim: Some(dim),
            seed,
            ..ProblemSpec::default()
        }
    }

    pub fn nilpotent() -> Self {
        ProblemSpec {
            kind: ProblemKind::Nilpotent2x2,
            ..ProblemSpec::default()
        }
    }

    pub fn schrodinger(grid_points: usize, potential: Potential) -> Self {
        ProblemSpec {
            kind: ProblemKind::Schrodinger1d,
            grid_points: Some(grid_points),
            potential: Some(potential),
            ..ProblemSpec::default()
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = Some(scale);
        self
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = Some(id.into());
        self
    }

    pub fn scale(&self) -> f64 {
        self.scale.unwrap_or(match self.kind {
            ProblemKind::Schrodinger1d => DEFAULT_SCHRODINGER_SCALE,
            _ => 1.0,
        })
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            ProblemKind::Nilpotent2x2 => self.dim.unwrap_or(2),
            ProblemKind::Schrodinger1d => self.grid_points(),
            _ => self.dim.unwrap_or(DEFAULT_DIM),
        }
    }

    pub fn grid_points(&self) -> usize {
        self.grid_points.or(self.dim).unwrap_or(DEFAULT_GRID_POINTS)
    }

    /// Identifier used in reports: the explicit `id`, or one built from kind
    /// and seed.
    pub fn label(&self) -> String {
        if let Some(id) = &self.id {
            return id.clone();
        }
        match self.kind {
            ProblemKind::Nilpotent2x2 => self.kind.tag().to_string(),
            ProblemKind::Schrodinger1d => format!(
                "schrodinger_1d-n{}-{}",
                self.grid_points(),
                self.potential.unwrap_or_default().tag()
            ),
            kind => format!("{kind}-d{}-s{}", self.dim(), self.seed),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let scale = self.scale();
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidArgument(format!("scale {scale} must be finite and > 0")));
        }
        match self.kind {
            ProblemKind::Nilpotent2x2 if self.dim() != 2 => Err(Error::InvalidArgument(format!(
                "nilpotent_2x2 has dimension 2, not {}",
                self.dim()
            ))),
            ProblemKind::Schrodinger1d => {
                if let (Some(d), Some(g)) = (self.dim, self.grid_points) {
                    if d != g {
                        return Err(Error::InvalidArgument(format!(
                            "schrodinger_1d dimension {d} differs from grid_points {g}"
                        )));
                    }
                }
                if self.grid_points() < 8 {
                    return Err(Error::InvalidArgument(format!(
                        "schrodinger_1d needs at least 8 grid points, got {}",
                        self.grid_points()
                    )));
                }
                Ok(())
            }
            _ if self.potential.is_some() || self.grid_points.is_some() => Err(Error::InvalidArgument(format!(
                "potential and grid_points only apply to schrodinger_1d, not {}",
                self.kind
            ))),
            _ if self.dim() < 2 => Err(Error::InvalidArgument(format!(
                "dimension must be at least 2, got {}",
                self.dim()
            ))),
            _ => Ok(()),
        }
    }
}

fn random_matrix(rng: &mut SplitMix64, n: usize) -> CMat {
    CMat::from_fn_unchecked(n, |_, _| rng.next_complex())
}

fn rescaled(m: &CMat, scale: f64) -> Result<CMat> {
    let norm = opnorm2(m);
    if norm == 0.0 {
        return Err(Error::InvalidArgument("generated a zero matrix".into()));
    }
    Ok(m.scale_real(scale / norm))
}

pub fn generate(spec: &ProblemSpec) -> Result<OperatorPair> {
    spec.validate()?;
    let n = spec.dim();
    let scale = spec.scale();
    let mut rng = SplitMix64::new(spec.seed);
    let (a, b) = match spec.kind {
        ProblemKind::RandomGeneral => {
            let a = random_matrix(&mut rng, n);
            let b = random_matrix(&mut rng, n);
            (rescaled(&a, scale)?, rescaled(&b, scale)?)
        }
        ProblemKind::RandomHermitian => {
            let a = random_matrix(&mut rng, n).hermitian_part();
            let b = random_matrix(&mut rng, n).hermitian_part();
            (rescaled(&a, scale)?, rescaled(&b, scale)?)
        }
        ProblemKind::RandomSkew => {
            let a = skew_part(&random_matrix(&mut rng, n));
            let b = skew_part(&random_matrix(&mut rng, n));
            (rescaled(&a, scale)?, rescaled(&b, scale)?)
        }
        ProblemKind::CommutingDiag => {
            let da: Vec<C64> = (0..n).map(|_| rng.next_complex()).collect();
            let db: Vec<C64> = (0..n).map(|_| rng.next_complex()).collect();
            (
                rescaled(&CMat::from_diag(&da)?, scale)?,
                rescaled(&CMat::from_diag(&db)?, scale)?,
            )
        }
        ProblemKind::Nilpotent2x2 => (
            CMat::from_real_rows(&[&[0.0, scale], &[0.0, 0.0]])?,
            CMat::from_real_rows(&[&[0.0, 0.0], &[scale, 0.0]])?,
        ),
        ProblemKind::Schrodinger1d => schrodinger(n, spec.potential.unwrap_or_default(), scale)?,
    };
    OperatorPair::new(a, b)
}

fn skew_part(m: &CMat) -> CMat {
    (m - &m.adjoint()).scale_real(0.5)
}

/// `A = i·L·(scale/‖L‖₂)` with `L` the zero-boundary second-difference
/// Laplacian on `N` interior points of `[0, 1]`, and `B = −i·diag V(xⱼ)`.
fn schrodinger(n: usize, potential: Potential, scale: f64) -> Result<(CMat, CMat)> {
    let h = 1.0 / (n as f64 + 1.0);
    let laplacian = CMat::from_fn_unchecked(n, |i, j| {
        if i == j {
            c(-2.0 / (h * h))
        } else if i.abs_diff(j) == 1 {
            c(1.0 / (h * h))
        } else {
            c(0.0)
        }
    });
    let normalizer = scale / opnorm2(&laplacian);
    let a = laplacian.scale(C64::new(0.0, normalizer));
    let v: Vec<C64> = (1..=n)
        .map(|j| C64::new(0.0, -potential.eval(j as f64 * h)))
        .collect();
    Ok((a, CMat::from_diag(&v)?))
}

/// The seven problems used by default: three random general and Hermitian
/// pairs, two skew-Hermitian pairs (all 4×4, unit scale), the nilpotent pair
/// and the 32-point harmonic Schrödinger pair.
pub fn default_corpus() -> Vec<ProblemSpec> {
    vec![
        ProblemSpec::random(ProblemKind::RandomGeneral, 4, 1),
        ProblemSpec::random(ProblemKind::RandomGeneral, 4, 2),
        ProblemSpec::random(ProblemKind::RandomHermitian, 4, 3),
        ProblemSpec::random(ProblemKind::RandomSkew, 4, 4),
        ProblemSpec::random(ProblemKind::RandomSkew, 4, 5),
        ProblemSpec::nilpotent(),
        ProblemSpec::schrodinger(DEFAULT_GRID_POINTS, Potential::Harmonic),
    ]
}

//! Batch experiments: a TOML configuration in, a table of pass/fail rows out.
//!
//! ```toml
//! methods = ["LT", "PLT", "STRANG"]
//! t_grid = { t0 = 1.0, ratio = 0.5, count = 4 }
//! checks = ["representations", "bounds"]
//! quad_tol = 1e-9
//!
//! [[problems]]
//! kind = "random_skew"
//! dim = 4
//! seed = 7
//!
//! [[problems]]
//! kind = "schrodinger_1d"
//! grid_points = 32
//! potential = "harmonic"
//!
//! [output]
//! format = "csv"
//! path = "rows.csv"
//! ```
//!
//! Every field except `problems` has a default; see
//! [`ExperimentConfig::default_corpus`].

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundInputs, BoundKind, EvaluationPath, SERIES_THRESHOLD};
use crate::error::{Error, Result};
use crate::error_forms::{error_direct, evaluate, ErrorForm};
use crate::matcore::opnorm2;
use crate::order_lab::{self, extract_leading, fit_local_order, leading_target};
use crate::problems::{self, generate, ProblemSpec};
use crate::splittings::{symmetry_defect, Method, OperatorPair};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Representations,
    Bounds,
    Orders,
    Leading,
    Symmetry,
}

impl Check {
    pub const ALL: [Check; 5] = [
        Check::Representations,
        Check::Bounds,
        Check::Orders,
        Check::Leading,
        Check::Symmetry,
    ];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TGrid {
    List(Vec<f64>),
    Geometric { t0: f64, ratio: f64, count: usize },
}

impl TGrid {
    pub fn points(&self) -> Vec<f64> {
        match self {
            TGrid::List(ts) => ts.clone(),
            TGrid::Geometric { t0, ratio, count } => (0..*count).map(|k| t0 * ratio.powi(k as i32)).collect(),
        }
    }
}

impl Default for TGrid {
    fn default() -> Self {
        TGrid::List(vec![0.1, 0.5, 1.0])
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: OutputFormat,
    /// Standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrderSettings {
    pub t0: f64,
    pub k_min: i32,
    pub k_max: i32,
    pub slope_tol: f64,
}

impl Default for OrderSettings {
    fn default() -> Self {
        OrderSettings {
            t0: 1.0,
            k_min: 2,
            k_max: 8,
            slope_tol: 0.05,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LeadingSettings {
    pub t0: f64,
    /// Largest admissible entrywise deviation from the Taylor coefficient.
    pub tol: f64,
}

impl Default for LeadingSettings {
    fn default() -> Self {
        LeadingSettings { t0: 0.25, tol: 1e-4 }
    }
}

pub const DEFAULT_QUAD_TOL: f64 = 1e-9;
pub const MAX_QUAD_TOL: f64 = 1e-4;
const REPRESENTATION_TOL: f64 = 1e-9;
const COMPOSITION_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-12;
/// A non-symmetric method must show a defect well above what symmetric ones reach.
const ASYMMETRY_MIN: f64 = 100.0 * SYMMETRY_TOL;
const LIMIT_RTOL: f64 = 1e-12;
const SEAM_RTOL: f64 = 1e-11;

fn default_methods() -> Vec<Method> {
    vec![
        Method::LieTrotter,
        Method::LieTrotterReversed,
        Method::PalindromicLieTrotter,
        Method::Strang,
        Method::StrangReversed,
    ]
}

fn default_checks() -> BTreeSet<Check> {
    Check::ALL.into_iter().collect()
}

fn default_quad_tol() -> f64 {
    DEFAULT_QUAD_TOL
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problems: Vec<ProblemSpec>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub t_grid: TGrid,
    #[serde(default = "default_checks")]
    pub checks: BTreeSet<Check>,
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub order: OrderSettings,
    #[serde(default)]
    pub leading: LeadingSettings,
}

impl ExperimentConfig {
    /// Seven problems, the five splittings, `t ∈ {0.1, 0.5, 1}`, every check.
    pub fn default_corpus() -> Self {
        ExperimentConfig {
            problems: problems::default_corpus(),
            methods: default_methods(),
            t_grid: TGrid::default(),
            checks: default_checks(),
            quad_tol: DEFAULT_QUAD_TOL,
            output: OutputSpec::default(),
            order: OrderSettings::default(),
            leading: LeadingSettings::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let config_err = |msg: String| Err(Error::Config(msg));
        if self.problems.is_empty() {
            return config_err("`problems` must not be empty".into());
        }
        if self.methods.is_empty() {
            return config_err("`methods` must not be empty".into());
        }
        let ts = self.t_grid.points();
        if ts.is_empty() {
            return config_err("`t_grid` must not be empty".into());
        }
        if let Some(t) = ts.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return config_err(format!("`t_grid` entry {t} must be finite and > 0"));
        }
        if !(self.quad_tol > 0.0 && self.quad_tol <= MAX_QUAD_TOL) {
            return config_err(format!("`quad_tol` {} must lie in (0, {MAX_QUAD_TOL:e}]", self.quad_tol));
        }
        if self.order.k_max - self.order.k_min < 3 || !(self.order.t0 > 0.0) || !(self.order.slope_tol > 0.0) {
            return config_err(format!("invalid `order` settings {:?}", self.order));
        }
        if !(self.leading.t0 > 0.0 && self.leading.t0 <= order_lab::MAX_LEADING_T0) || !(self.leading.tol > 0.0) {
            return config_err(format!("invalid `leading` settings {:?}", self.leading));
        }
        for (i, spec) in self.problems.iter().enumerate() {
            spec.validate()
                .map_err(|e| Error::Config(format!("problems[{i}]: {e}")))?;
        }
        Ok(())
    }

    /// Replaces every seed by `seed.wrapping_add(index)`.
    pub fn override_seeds(&mut self, seed: u64) {
        for (i, spec) in self.problems.iter_mut().enumerate() {
            spec.seed = seed.wrapping_add(i as u64);
        }
    }
}

/// One outcome. `pass` holds iff `|measured − reference| ≤ tolerance`,
/// except for `bound` rows (`measured ≤ reference + tolerance`, the tolerance
/// being the relative slack plus the rounding floor) and `asymmetry` rows
/// (`measured ≥ reference`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub problem_id: String,
    pub method: String,
    pub t: f64,
    pub check: String,
    pub measured: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

impl ResultRow {
    fn new(problem: &str, method: Method, t: f64, check: impl Into<String>) -> Self {
        ResultRow {
            problem_id: problem.to_string(),
            method: method.tag().to_string(),
            t,
            check: check.into(),
            measured: f64::NAN,
            reference: 0.0,
            tolerance: 0.0,
            pass: false,
            detail: String::new(),
        }
    }

    fn within(mut self, measured: f64, reference: f64, tolerance: f64) -> Self {
        self.measured = measured;
        self.reference = reference;
        self.tolerance = tolerance;
        self.pass = (measured - reference).abs() <= tolerance;
        self
    }

    fn detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    fn failed(mut self, err: &Error) -> Self {
        if let Error::QuadratureNotConverged { delta, tol, .. } = err {
            self.measured = *delta;
            self.tolerance = *tol;
        }
        self.pass = false;
        self.detail = err.to_string();
        self
    }
}

impl fmt::Display for ResultRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} t={} {} measured={:e} reference={:e} tol={:e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.problem_id,
            self.method,
            self.t,
            self.check,
            self.measured,
            self.reference,
            self.tolerance,
        )?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

/// Runs every selected check; rows come back sorted by problem, method, `t`
/// and check name.
pub fn run(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let ts = config.t_grid.points();
    let mut rows = Vec::new();
    for spec in &config.problems {
        let id = spec.label();
        let pair = generate(spec)?;
        for &m in &config.methods {
            if m == Method::Exact {
                if config.checks.contains(&Check::Symmetry) {
                    for &t in &ts {
                        rows.push(symmetry_row(&id, &pair, m, t));
                    }
                }
                continue;
            }
            for &check in &config.checks {
                match check {
                    Check::Representations => {
                        for &t in &ts {
                            rows.extend(representation_rows(&id, &pair, m, t, config.quad_tol));
                        }
                    }
                    Check::Bounds => {
                        for &t in &ts {
                            rows.extend(bound_rows(&id, &pair, m, t));
                        }
                    }
                    Check::Orders => rows.push(order_row(&id, &pair, m, &config.order)),
                    Check::Leading => rows.push(leading_row(&id, &pair, m, &config.leading)),
                    Check::Symmetry => {
                        for &t in &ts {
                            rows.push(symmetry_row(&id, &pair, m, t));
                        }
                    }
                }
            }
        }
    }
    rows.sort_by(|x, y| {
        (&x.problem_id, &x.method)
            .cmp(&(&y.problem_id, &y.method))
            .then(x.t.total_cmp(&y.t))
            .then(x.check.cmp(&y.check))
    });
    Ok(rows)
}

fn representation_rows(id: &str, p: &OperatorPair, m: Method, t: f64, quad_tol: f64) -> Vec<ResultRow> {
    let direct = match error_direct(p, m, t) {
        Ok(e) => e,
        Err(e) => return vec![ResultRow::new(id, m, t, "representation").failed(&e)],
    };
    ErrorForm::for_method(m)
        .iter()
        .map(|&form| {
            let row = ResultRow::new(id, m, t, format!("representation:{}", form.tag()));
            match evaluate(p, m, form, t, quad_tol) {
                Ok(r) => {
                    let tolerance = if form.uses_quadrature() {
                        REPRESENTATION_TOL.max(10.0 * r.delta)
                    } else {
                        COMPOSITION_TOL
                    };
                    let detail = if form.uses_quadrature() {
                        format!("quadrature delta {:.2e} with {} nodes per level", r.delta, r.nodes_per_level)
                    } else {
                        "algebraic identity".to_string()
                    };
                    row.within(opnorm2(&(&r.value - &direct)), 0.0, tolerance).detail(detail)
                }
                Err(e) => row.failed(&e),
            }
        })
        .collect()
}

fn bound_rows(id: &str, p: &OperatorPair, m: Method, t: f64) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    let row = ResultRow::new(id, m, t, "bound");
    match bounds::check_bound(p, m, t) {
        Ok(report) => {
            let mut row = row;
            row.measured = report.measured;
            row.reference = report.bound;
            row.tolerance = report.bound * bounds::DOMINANCE_SLACK + report.roundoff_floor;
            row.pass = report.satisfied;
            let finding = if !report.satisfied && p.omega() != 0.0 {
                "; finding: bound violated for ω ≠ 0"
            } else {
                ""
            };
            rows.push(row.detail(format!(
                "omega {:.3e}, ratio {:.4}, {}{finding}",
                p.omega(),
                report.slack_ratio,
                path_tag(report.path)
            )));
        }
        Err(e) => {
            rows.push(row.failed(&e));
            return rows;
        }
    }

    let Ok(kind) = BoundKind::for_method(m) else {
        return rows;
    };
    let pair_inputs = if m.canonical().1 {
        BoundInputs::from_pair(&p.swapped(), t)
    } else {
        BoundInputs::from_pair(p, t)
    };
    if pair_inputs.omega == 0.0 {
        let row = ResultRow::new(id, m, t, "bound_limit");
        rows.push(match bounds::evaluate(kind, &pair_inputs) {
            Ok(v) => {
                let limit = bounds::omega_zero_limit(kind, &pair_inputs);
                row.within(v.value, limit, LIMIT_RTOL * limit).detail("ω = 0 limit formula")
            }
            Err(e) => row.failed(&e),
        });
    }

    let seam_inputs = BoundInputs {
        omega: SERIES_THRESHOLD / t,
        ..pair_inputs
    };
    let closed = bounds::evaluate_with(kind, &seam_inputs, EvaluationPath::ClosedForm);
    let series = bounds::evaluate_with(kind, &seam_inputs, EvaluationPath::SeriesFallback);
    let row = ResultRow::new(id, m, t, "bound_seam");
    rows.push(match (closed, series) {
        (Ok(c), Ok(s)) => {
            let rel = if s == 0.0 && c == 0.0 {
                0.0
            } else {
                (c - s).abs() / s.abs()
            };
            row.within(rel, 0.0, SEAM_RTOL)
                .detail(format!("closed form vs series at ωt = {SERIES_THRESHOLD:e}"))
        }
        (Err(e), _) | (_, Err(e)) => row.failed(&e),
    });
    rows
}

fn path_tag(path: EvaluationPath) -> &'static str {
    match path {
        EvaluationPath::ClosedForm => "closed form",
        EvaluationPath::SeriesFallback => "series",
    }
}

fn order_row(id: &str, p: &OperatorPair, m: Method, settings: &OrderSettings) -> ResultRow {
    let row = ResultRow::new(id, m, settings.t0, "order");
    if p.commutes() {
        return commuting_row(row, p, m, settings.t0, order_lab::NOISE_FLOOR);
    }
    let expected = m.local_error_power().unwrap_or(0) as f64;
    match fit_local_order(p, m, settings.t0, settings.k_min, settings.k_max) {
        Ok(fit) => row.within(fit.slope, expected, settings.slope_tol).detail(format!(
            "k = {}..{}, residual {:.3e}",
            fit.k_range.0, fit.k_range.1, fit.residual
        )),
        Err(e) => row.failed(&e),
    }
}

/// Splittings of a commuting pair are exact: record the rounding-level error.
fn commuting_row(row: ResultRow, p: &OperatorPair, m: Method, t: f64, tolerance: f64) -> ResultRow {
    match error_direct(p, m, t) {
        Ok(e) => row.within(opnorm2(&e), 0.0, tolerance).detail("commuting pair, splitting is exact"),
        Err(e) => row.failed(&e),
    }
}

fn leading_row(id: &str, p: &OperatorPair, m: Method, settings: &LeadingSettings) -> ResultRow {
    let row = ResultRow::new(id, m, settings.t0, "leading");
    if p.commutes() {
        return commuting_row(row, p, m, settings.t0, settings.tol);
    }
    let outcome = extract_leading(p, m, settings.t0).and_then(|est| Ok((est, leading_target(p, m)?)));
    match outcome {
        Ok((estimate, target)) => row
            .within((&estimate - &target).max_abs_entry(), 0.0, settings.tol)
            .detail(format!("largest coefficient entry {:.3e}", target.max_abs_entry())),
        Err(e) => row.failed(&e),
    }
}

fn symmetry_row(id: &str, p: &OperatorPair, m: Method, t: f64) -> ResultRow {
    let defect = match symmetry_defect(p, m, t) {
        Ok(d) => d,
        Err(e) => return ResultRow::new(id, m, t, "symmetry").failed(&e),
    };
    if m.is_time_symmetric() || p.commutes() {
        ResultRow::new(id, m, t, "symmetry")
            .within(defect, 0.0, SYMMETRY_TOL)
            .detail("‖Y(t)Y(−t) − I‖")
    } else {
        let mut row = ResultRow::new(id, m, t, "asymmetry");
        row.measured = defect;
        row.reference = ASYMMETRY_MIN;
        row.pass = defect >= ASYMMETRY_MIN;
        row.detail("‖Y(t)Y(−t) − I‖ must exceed the symmetric level")
    }
}

pub const CSV_HEADER: [&str; 9] = [
    "problem_id",
    "method",
    "t",
    "check",
    "measured",
    "reference",
    "tolerance",
    "pass",
    "detail",
];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.problem_id.clone(),
            r.method.clone(),
            format_f64(r.t),
            r.check.clone(),
            format_f64(r.measured),
            format_f64(r.reference),
            format_f64(r.tolerance),
            r.pass.to_string(),
            r.detail.clone(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(rows: &[ResultRow], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows).map_err(|e| Error::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}

pub fn write_rows<W: Write>(rows: &[ResultRow], format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(rows, out),
        OutputFormat::Json => write_json(rows, out),
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// One line of the error-versus-bound table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub t: f64,
    pub method: String,
    pub error_norm: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// `‖E_m(t)‖₂` and its bound on `t = t0·2⁻ᵏ`, `k = 0..count`.
pub fn error_bound_table(p: &OperatorPair, methods: &[Method], t0: f64, count: usize) -> Result<Vec<TableRow>> {
    let mut table = Vec::new();
    for k in 0..count {
        let t = t0 * 2f64.powi(-(k as i32));
        for &m in methods.iter().filter(|&&m| m != Method::Exact) {
            let report = bounds::check_bound(p, m, t)?;
            table.push(TableRow {
                t,
                method: m.tag().to_string(),
                error_norm: report.measured,
                bound: report.bound,
                ratio: report.slack_ratio,
            });
        }
    }
    Ok(table)
}

pub fn write_table_csv<W: Write>(table: &[TableRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "method", "error_norm", "bound", "ratio"]).map_err(csv_err)?;
    for r in table {
        w.write_record([
            format_f64(r.t),
            r.method.clone(),
            format_f64(r.error_norm),
            format_f64(r.bound),
            format_f64(r.ratio),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// JSON schema of [`ExperimentConfig`].
pub fn config_schema() -> serde_json::Value {
    let methods: Vec<&str> = Method::ALL.iter().map(|m| m.tag()).collect();
    serde_json::json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "ExperimentConfig",
        "type": "object",
        "required": ["problems"],
        "additionalProperties": false,
        "properties": {
            "problems": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "type": "object",
                    "required": ["kind"],
                    "additionalProperties": false,
                    "properties": {
                        "id": {"type": "string"},
                        "kind": {"enum": ["random_general", "random_hermitian", "random_skew", "commuting_diag", "nilpotent_2x2", "schrodinger_1d"]},
                        "dim": {"type": "integer", "minimum": 2, "default": problems::DEFAULT_DIM},
                        "seed": {"type": "integer", "minimum": 0, "default": 0},
                        "scale": {"type": "number", "exclusiveMinimum": 0, "description": "1 by default, 10 for schrodinger_1d"},
                        "potential": {"enum": ["harmonic", "well", "cosine"], "default": "harmonic"},
                        "grid_points": {"type": "integer", "minimum": 8, "default": problems::DEFAULT_GRID_POINTS}
                    }
                }
            },
            "methods": {
                "type": "array",
                "minItems": 1,
                "items": {"enum": methods},
                "default": ["LT", "LT_REV", "PLT", "STRANG", "STRANG_REV"]
            },
            "t_grid": {
                "oneOf": [
                    {"type": "array", "minItems": 1, "items": {"type": "number", "exclusiveMinimum": 0}},
                    {
                        "type": "object",
                        "required": ["t0", "ratio", "count"],
                        "properties": {
                            "t0": {"type": "number", "exclusiveMinimum": 0},
                            "ratio": {"type": "number", "exclusiveMinimum": 0},
                            "count": {"type": "integer", "minimum": 1}
                        }
                    }
                ],
                "default": [0.1, 0.5, 1.0]
            },
            "checks": {
                "type": "array",
                "items": {"enum": ["representations", "bounds", "orders", "leading", "symmetry"]},
                "uniqueItems": true,
                "default": ["representations", "bounds", "orders", "leading", "symmetry"]
            },
            "quad_tol": {"type": "number", "exclusiveMinimum": 0, "maximum": MAX_QUAD_TOL, "default": DEFAULT_QUAD_TOL},
            "output": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "format": {"enum": ["csv", "json"], "default": "csv"},
                    "path": {"type": "string"}
                }
            },
            "order": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "t0": {"type": "number", "default": 1.0},
                    "k_min": {"type": "integer", "default": 2},
                    "k_max": {"type": "integer", "default": 8},
                    "slope_tol": {"type": "number", "default": 0.05}
                }
            },
            "leading": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "t0": {"type": "number", "maximum": order_lab::MAX_LEADING_T0, "default": 0.25},
                    "tol": {"type": "number", "default": 1e-4}
                }
            }
        }
    })
}

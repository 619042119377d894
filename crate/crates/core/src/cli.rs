//! Config-driven experiment runner behind the `semifix` binary.
//!
//! Each subcommand reads one or more TOML experiment files, validates them
//! completely, runs, and writes a text report and (where applicable) a CSV.
//! Exit codes: 0 pass, 1 a mathematical check failed, 2 config or usage
//! error, 3 a search or iteration budget ran out.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactreal::{ExactReal, Rational};
use crate::fixedsets::{
    bruck_check, combined_map, counterexample_demo, equal_weights, make_basis, rotation_necessity_demo,
    verify_main_theorem, FixedSetError, Mapping, ParameterBasis, VerifyOptions,
};
use crate::geometry::{ConvexSet, NormKind, Vector};
use crate::iterate::{
    browder_sweep, run_cesaro, run_halpern, run_ishikawa, run_km, run_rode_trace, ConvergenceTrace, IterateError,
    Schedule,
};
use crate::kronecker::{scan, KroneckerError, KroneckerProblem, DEFAULT_SEARCH_CAP};
use crate::semigroup::{
    check_nonexpansive, check_semigroup_law, make_broken_square, make_diagonal_matexp, make_identity, make_matexp,
    make_rotation, make_translation_counterexample, Parameter, SemigroupError, SemigroupInstance,
};

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Pass = 0,
    MathFailure = 1,
    ConfigError = 2,
    BudgetExhausted = 3,
}

impl Outcome {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("check failed: {0}")]
    Math(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn outcome(&self) -> Outcome {
        match self {
            CliError::Config(_) | CliError::Io { .. } => Outcome::ConfigError,
            CliError::Budget(_) => Outcome::BudgetExhausted,
            CliError::Math(_) => Outcome::MathFailure,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

impl From<SemigroupError> for CliError {
    fn from(e: SemigroupError) -> Self {
        CliError::Math(e.to_string())
    }
}

impl From<KroneckerError> for CliError {
    fn from(e: KroneckerError) -> Self {
        match e {
            KroneckerError::NotFound { .. } | KroneckerError::SearchBudgetExceeded { .. } => {
                CliError::Budget(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<FixedSetError> for CliError {
    fn from(e: FixedSetError) -> Self {
        match e {
            FixedSetError::Semigroup(s) => s.into(),
            FixedSetError::Kronecker(k) => k.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<IterateError> for CliError {
    fn from(e: IterateError) -> Self {
        match e {
            IterateError::BudgetExceeded { .. } | IterateError::WordBudgetExceeded { .. } => {
                CliError::Budget(e.to_string())
            }
            IterateError::NoConvergence { .. } | IterateError::Semigroup(_) => CliError::Math(e.to_string()),
            IterateError::FixedSet(f) => f.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

// ---------------------------------------------------------------------------
// Config

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisConfig>,
    #[serde(default)]
    pub scheme: SchemeConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    Identity,
    TranslationCounterexample,
    Rotation,
    Matexp,
    DiagonalMatexp,
    BrokenSquare,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub kind: InstanceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    /// `euclidean`, `l1`, `linf` or `lp:<p>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Whole,
    Ball,
    Box,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub kind: DomainKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisConfig {
    /// Parameter vectors as rational literals, e.g. `["1", "1/2"]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ps: Option<Vec<Vec<String>>>,
    /// Exact literals such as `"sqrt(2)"` or `"(1 + sqrt(5))/2"`.
    pub alphas: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    /// `reciprocal` or `power:<gamma>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x1: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone_bound: Option<f64>,
    /// Parameters of the mappings in a convex combination, as exact literals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<Vec<String>>>,
    /// Required final oracle distance (or residual) for a passing run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pass_below: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_path: Option<PathBuf>,
    /// Keep every `stride`-th CSV row of a trace (plus the last).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stride: Option<u64>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(config_err)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

// ---------------------------------------------------------------------------
// Building typed objects from config

pub fn parse_norm(s: &str) -> Result<NormKind, CliError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "euclidean" | "l2" => Ok(NormKind::Euclidean),
        "l1" => Ok(NormKind::L1),
        "linf" => Ok(NormKind::LInf),
        other => {
            let p = other
                .strip_prefix("lp:")
                .and_then(|p| p.parse::<f64>().ok())
                .ok_or_else(|| CliError::Config(format!("unknown norm {s:?}")))?;
            NormKind::lp(p).map_err(config_err)
        }
    }
}

pub fn parse_schedule(s: &str) -> Result<Schedule, CliError> {
    match s.trim() {
        "reciprocal" => Ok(Schedule::Reciprocal),
        other => other
            .strip_prefix("power:")
            .and_then(|g| g.parse::<f64>().ok())
            .map(Schedule::PowerLaw)
            .ok_or_else(|| CliError::Config(format!("unknown schedule {s:?}"))),
    }
}

fn parse_exact(s: &str) -> Result<ExactReal, CliError> {
    s.parse::<ExactReal>().map_err(config_err)
}

fn parse_rational(s: &str) -> Result<Rational, CliError> {
    let x = parse_exact(s)?;
    if !x.is_rational() {
        return Err(CliError::Config(format!("{s:?} is not rational")));
    }
    Ok(x.rational_part().clone())
}

fn vector(xs: &[f64], what: &str) -> Result<Vector, CliError> {
    Vector::new(xs.to_vec()).map_err(|e| CliError::Config(format!("{what}: {e}")))
}

fn need<T: Clone>(value: &Option<T>, what: &str) -> Result<T, CliError> {
    value.clone().ok_or_else(|| CliError::Config(format!("missing key {what}")))
}

pub fn build_instance(cfg: &InstanceConfig) -> Result<SemigroupInstance, CliError> {
    let sg = match cfg.kind {
        InstanceKind::Identity => make_identity(cfg.n.unwrap_or(1), cfg.dim.unwrap_or(1)),
        InstanceKind::TranslationCounterexample => make_translation_counterexample(),
        InstanceKind::Rotation => make_rotation(cfg.period.unwrap_or(1.0)).map_err(config_err)?,
        InstanceKind::DiagonalMatexp => make_diagonal_matexp(need(&cfg.n, "instance.n")?),
        InstanceKind::Matexp => {
            let mu = need(&cfg.mu, "instance.mu")?;
            let b = vector(&need(&cfg.b, "instance.b")?, "instance.b")?;
            let q = match &cfg.q {
                Some(q) => q.clone(),
                None => (0..b.dim())
                    .map(|i| (0..b.dim()).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                    .collect(),
            };
            make_matexp(cfg.n.unwrap_or(mu.len()), mu, q, b).map_err(config_err)?
        }
        InstanceKind::BrokenSquare => make_broken_square(),
    };
    if let Some(dim) = cfg.dim {
        if dim != sg.dim() {
            return Err(CliError::Config(format!("instance.dim = {dim} but the instance acts on R^{}", sg.dim())));
        }
    }
    let sg = match &cfg.norm {
        Some(n) => sg.with_norm(parse_norm(n)?),
        None => sg,
    };
    match &cfg.domain {
        Some(d) => {
            let domain = build_domain(d, sg.dim())?;
            sg.with_domain(domain).map_err(config_err)
        }
        None => Ok(sg),
    }
}

fn build_domain(cfg: &DomainConfig, dim: usize) -> Result<ConvexSet, CliError> {
    let set = match cfg.kind {
        DomainKind::Whole => ConvexSet::WholeSpace(dim),
        DomainKind::Ball => {
            let center = match &cfg.center {
                Some(c) => vector(c, "domain.center")?,
                None => Vector::zeros(dim),
            };
            ConvexSet::ball(center, cfg.radius.unwrap_or(1.0)).map_err(config_err)?
        }
        DomainKind::Box => ConvexSet::cube(
            vector(&need(&cfg.lo, "domain.lo")?, "domain.lo")?,
            vector(&need(&cfg.hi, "domain.hi")?, "domain.hi")?,
        )
        .map_err(config_err)?,
    };
    if set.dim() != dim {
        return Err(CliError::Config(format!("domain has dimension {}, expected {dim}", set.dim())));
    }
    Ok(set)
}

pub fn build_alphas(cfg: &BasisConfig) -> Result<Vec<ExactReal>, CliError> {
    cfg.alphas.iter().map(|a| parse_exact(a)).collect()
}

/// Basis from config; `ps` defaults to the unit vectors.
pub fn build_basis(cfg: &BasisConfig) -> Result<ParameterBasis, CliError> {
    let alphas = build_alphas(cfg)?;
    let n = alphas.len();
    let ps: Vec<Vec<Rational>> = match &cfg.ps {
        Some(ps) => ps
            .iter()
            .map(|p| p.iter().map(|c| parse_rational(c)).collect())
            .collect::<Result<_, _>>()?,
        None => (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| Rational::from_integer(i64::from(i == j).into()))
                    .collect()
            })
            .collect(),
    };
    make_basis(ps, alphas).map_err(config_err)
}

fn require_instance(cfg: &ExperimentConfig) -> Result<SemigroupInstance, CliError> {
    build_instance(cfg.instance.as_ref().ok_or_else(|| CliError::Config("missing [instance]".into()))?)
}

fn require_basis(cfg: &ExperimentConfig, sg: &SemigroupInstance) -> Result<ParameterBasis, CliError> {
    let basis = build_basis(cfg.basis.as_ref().ok_or_else(|| CliError::Config("missing [basis]".into()))?)?;
    if basis.n() != sg.n() {
        return Err(CliError::Config(format!(
            "basis has {} parameters, instance expects {}",
            basis.n(),
            sg.n()
        )));
    }
    Ok(basis)
}

fn point_or(value: &Option<Vec<f64>>, what: &str, default: Vector, dim: usize) -> Result<Vector, CliError> {
    let v = match value {
        Some(xs) => vector(xs, what)?,
        None => default,
    };
    if v.dim() != dim {
        return Err(CliError::Config(format!("{what} has dimension {}, expected {dim}", v.dim())));
    }
    Ok(v)
}

fn positive(value: f64, what: &str) -> Result<f64, CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(CliError::Config(format!("{what} must be positive, got {value}")))
    }
}

// ---------------------------------------------------------------------------
// Experiments

/// Result of one experiment before it is written out.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub report: String,
    pub csv: Option<String>,
    pub outcome: Outcome,
}

impl Output {
    fn new(report: String, csv: Option<String>, passed: bool) -> Self {
        Output {
            report,
            csv,
            outcome: if passed { Outcome::Pass } else { Outcome::MathFailure },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    CheckSemigroup,
    KroneckerSearch,
    VerifyTheorem,
    Iterate,
    Counterexample,
    Bruck,
    Necessity,
}

/// Validates `cfg` for `experiment` and runs it.
pub fn run_experiment(experiment: Experiment, cfg: &ExperimentConfig) -> Result<Output, CliError> {
    match experiment {
        Experiment::CheckSemigroup => check_semigroup(cfg),
        Experiment::KroneckerSearch => kronecker_search(cfg),
        Experiment::VerifyTheorem => verify_theorem(cfg),
        Experiment::Iterate => iterate(cfg),
        Experiment::Counterexample => counterexample(cfg),
        Experiment::Bruck => bruck(cfg),
        Experiment::Necessity => necessity(cfg),
    }
}

fn check_semigroup(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let sg = require_instance(cfg)?;
    let count = cfg.scheme.samples.unwrap_or(200);
    let tol = positive(cfg.scheme.tol.unwrap_or(1e-10), "scheme.tol")?;
    let seed = cfg.seed();
    let mut reports = vec![check_semigroup_law(&sg, count, tol, seed)?];
    if sg.claims_nonexpansive() {
        reports.push(check_nonexpansive(&sg, sg.norm(), count, tol, seed.wrapping_add(1))?);
    }
    let mut text = format!("instance {}\n", sg.label());
    let mut csv = String::from("check,samples,tol,max_violation,pass\n");
    for r in &reports {
        writeln!(text, "{r}").unwrap();
        writeln!(csv, "{},{},{:e},{:e},{}", r.check, r.samples, r.tol, r.max_violation, r.passed).unwrap();
    }
    let passed = reports.iter().all(|r| r.passed);
    writeln!(text, "verdict: {}", if passed { "PASS" } else { "FAIL" }).unwrap();
    Ok(Output::new(text, Some(csv), passed))
}

fn kronecker_search(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let basis = cfg.basis.as_ref().ok_or_else(|| CliError::Config("missing [basis]".into()))?;
    let alphas = build_alphas(basis)?;
    let target = need(&cfg.scheme.target, "scheme.target")?;
    let eps = need(&cfg.scheme.eps, "scheme.eps")?;
    let k_max = cfg.scheme.k_max.unwrap_or(DEFAULT_SEARCH_CAP);
    let count = cfg.scheme.count.unwrap_or(1);
    let problem = KroneckerProblem::new(alphas, target, eps).map_err(config_err)?;
    let hits = scan(&problem, k_max, count, &mut |_| {});
    let mut csv = String::from("k");
    for j in 1..=problem.dim() {
        write!(csv, ",frac_{j}").unwrap();
    }
    csv.push_str(",max_dev\n");
    let mut text = format!(
        "alphas [{}], target [{}], eps {:e}, k_max {k_max}\n",
        problem.alphas().iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
        problem.target().iter().map(|t| format!("{t:?}")).collect::<Vec<_>>().join(", "),
        eps
    );
    for h in &hits {
        write!(csv, "{}", h.k).unwrap();
        for f in &h.fracs {
            write!(csv, ",{f:?}").unwrap();
        }
        writeln!(csv, ",{:e}", h.max_dev).unwrap();
        writeln!(text, "k = {}: max deviation {:.6e}", h.k, h.max_dev).unwrap();
    }
    let complete = hits.len() >= count;
    writeln!(text, "found {} of {count} requested indices", hits.len()).unwrap();
    Ok(Output {
        report: text,
        csv: Some(csv),
        outcome: if complete { Outcome::Pass } else { Outcome::BudgetExhausted },
    })
}

fn verify_theorem(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let sg = require_instance(cfg)?;
    let basis = require_basis(cfg, &sg)?;
    let default_z = match sg.common_fixed_set() {
        Some(f) => f.project(&Vector::zeros(sg.dim())).unwrap_or_else(|| Vector::zeros(sg.dim())),
        None => Vector::zeros(sg.dim()),
    };
    let z = point_or(&cfg.scheme.z, "scheme.z", default_z, sg.dim())?;
    let defaults = VerifyOptions::default();
    let opts = VerifyOptions {
        samples: cfg.scheme.samples.unwrap_or(defaults.samples),
        tol: positive(cfg.scheme.tol.unwrap_or(defaults.tol), "scheme.tol")?,
        eps: positive(cfg.scheme.eps.unwrap_or(defaults.eps), "scheme.eps")?,
        cone_bound: positive(cfg.scheme.cone_bound.unwrap_or(defaults.cone_bound), "scheme.cone_bound")?,
        k_max: cfg.scheme.k_max.unwrap_or(defaults.k_max),
        seed: cfg.seed(),
    };
    let report = verify_main_theorem(&sg, &basis, &z, &opts)?;
    Ok(Output::new(report.to_text(), Some(report.to_csv()), report.passed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SchemeName {
    Cesaro,
    Km,
    Browder,
    Halpern,
    Rode,
    Ishikawa,
}

fn scheme_name(cfg: &SchemeConfig) -> Result<SchemeName, CliError> {
    match need(&cfg.name, "scheme.name")?.as_str() {
        "cesaro" => Ok(SchemeName::Cesaro),
        "km" => Ok(SchemeName::Km),
        "browder" => Ok(SchemeName::Browder),
        "halpern" => Ok(SchemeName::Halpern),
        "rode" => Ok(SchemeName::Rode),
        "ishikawa" => Ok(SchemeName::Ishikawa),
        other => Err(CliError::Config(format!("unknown scheme {other:?}"))),
    }
}

fn iterate(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let sg = require_instance(cfg)?;
    let basis = require_basis(cfg, &sg)?;
    let sc = &cfg.scheme;
    let name = scheme_name(sc)?;
    let k = need(&sc.k, "scheme.K")?;
    let dim = sg.dim();
    let x1 = point_or(&sc.x1, "scheme.x1", Vector::zeros(dim), dim)?;
    let combined = || -> Result<Mapping, CliError> {
        let weights = sc.weights.clone().unwrap_or_else(|| equal_weights(basis.n()));
        Ok(combined_map(&sg, &basis, &weights)?)
    };
    let stride = match cfg.output.stride {
        Some(0) => return Err(CliError::Config("output.stride must be positive".into())),
        Some(s) => s,
        None => 1,
    };
    if let Some(t) = sc.pass_below {
        positive(t, "scheme.pass_below")?;
    }
    let trace = match name {
        SchemeName::Cesaro => run_cesaro(&combined()?, &x1, k)?,
        SchemeName::Km => run_km(&combined()?, &x1, k)?,
        SchemeName::Browder => {
            let s_map = combined()?;
            let u = point_or(&sc.u, "scheme.u", x1.clone(), dim)?;
            let s_values = match &sc.s {
                Some(s) => s.clone(),
                None => (1..=k).map(|i| 1.0 / (i + 1) as f64).collect(),
            };
            let tol = positive(sc.tol.unwrap_or(1e-12), "scheme.tol")?;
            browder_sweep(&s_map, &u, &s_values, tol, sc.max_iter.unwrap_or(1_000_000))?
        }
        SchemeName::Halpern => {
            let s_map = combined()?;
            let u = point_or(&sc.u, "scheme.u", x1.clone(), dim)?;
            let schedule = match &sc.schedule {
                Some(s) => parse_schedule(s)?,
                None => Schedule::Reciprocal,
            };
            run_halpern(&s_map, &u, &x1, &schedule, k)?
        }
        SchemeName::Rode => run_rode_trace(&sg, &basis, &x1, k)?,
        SchemeName::Ishikawa => run_ishikawa(&sg, &basis, &x1, k)?,
    };
    let final_dist = trace.last_oracle_dist();
    let final_measure = final_dist.unwrap_or_else(|| trace.last_residual());
    let passed = sc.pass_below.is_none_or(|t| final_measure <= t);
    let mut text = format!("scheme {} on {} for K = {k}\n", trace.scheme, sg.label());
    writeln!(text, "map applications {}", trace.budget.max_map_applications).unwrap();
    writeln!(text, "final residual {:.6e}", trace.last_residual()).unwrap();
    match final_dist {
        Some(d) => writeln!(text, "final oracle distance {d:.6e}").unwrap(),
        None => writeln!(text, "no fixed-set oracle").unwrap(),
    }
    if let Some(t) = sc.pass_below {
        writeln!(text, "threshold {t:e} => {}", if passed { "PASS" } else { "FAIL" }).unwrap();
    }
    Ok(Output::new(text, Some(thin(&trace, stride).to_csv()), passed))
}

fn thin(trace: &ConvergenceTrace, stride: u64) -> ConvergenceTrace {
    if stride <= 1 {
        return trace.clone();
    }
    let last = trace.len() - 1;
    let keep: Vec<usize> = (0..trace.len()).filter(|&i| (i as u64).is_multiple_of(stride) || i == last).collect();
    ConvergenceTrace {
        scheme: trace.scheme.clone(),
        ks: keep.iter().map(|&i| trace.ks[i]).collect(),
        iterates: keep.iter().map(|&i| trace.iterates[i].clone()).collect(),
        residuals: keep.iter().map(|&i| trace.residuals[i]).collect(),
        oracle_dist: trace.oracle_dist.as_ref().map(|d| keep.iter().map(|&i| d[i]).collect()),
        budget: trace.budget,
    }
}

fn counterexample(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let report = counterexample_demo(cfg.seed())?;
    Ok(Output::new(report.to_text(), Some(report.to_csv()), report.passed))
}

fn bruck(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let sg = require_instance(cfg)?;
    let sc = &cfg.scheme;
    let params: Vec<Parameter> = need(&sc.params, "scheme.params")?
        .iter()
        .map(|p| {
            let coords = p.iter().map(|c| parse_exact(c).map(|x| x.to_f64())).collect::<Result<Vec<_>, _>>()?;
            Parameter::new(coords).map_err(config_err)
        })
        .collect::<Result<_, _>>()?;
    if params.iter().any(|p| p.len() != sg.n()) {
        return Err(CliError::Config(format!("scheme.params must have {} coordinates", sg.n())));
    }
    let maps: Vec<Mapping> = params.iter().map(|p| Mapping::from_semigroup(&sg, p)).collect();
    let weights = sc.weights.clone().unwrap_or_else(|| vec![1.0 / maps.len() as f64; maps.len()]);
    let tol = positive(sc.tol.unwrap_or(1e-9), "scheme.tol")?;
    let count = sc.samples.unwrap_or(1000);
    let witness = match &sc.z {
        Some(z) => Some(point_or(&Some(z.clone()), "scheme.z", Vector::zeros(sg.dim()), sg.dim())?),
        None => sg.common_fixed_set().and_then(|f| f.project(&Vector::zeros(sg.dim()))),
    };
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(cfg.seed());
    let mut probes = Vec::with_capacity(count);
    if let Some(w) = &witness {
        probes.push(w.clone());
    }
    while probes.len() < count {
        probes.push(crate::semigroup::sample_domain(sg.domain(), &mut rng));
    }
    let report = bruck_check(&maps, &weights, &probes, witness.as_ref(), tol, sg.norm())?;
    let mut text = format!("convex combination of {} mappings of {}\n", maps.len(), sg.label());
    let mut csv = String::from("probe_id,combined_residual,max_map_residual,agree\n");
    for (i, p) in report.probes.iter().enumerate() {
        writeln!(csv, "{i},{:e},{:e},{}", p.combined_residual, p.max_map_residual, p.agree).unwrap();
    }
    let disagreements = report.probes.iter().filter(|p| !p.agree).count();
    writeln!(text, "probes {}, tol {tol:e}, disagreements {disagreements}", report.probes.len()).unwrap();
    writeln!(text, "verdict: {}", if report.all_agree { "PASS" } else { "FAIL" }).unwrap();
    Ok(Output::new(text, Some(csv), report.all_agree))
}

fn necessity(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let sg = match &cfg.instance {
        Some(i) => build_instance(i)?,
        None => make_rotation(1.0).map_err(config_err)?,
    };
    if !matches!(sg.family(), crate::semigroup::Family::Rotation { period } if *period == 1.0) {
        return Err(CliError::Config("necessity runs on the rotation family with period 1".into()));
    }
    let count = cfg.scheme.samples.unwrap_or(1000);
    let r = rotation_necessity_demo(&sg, count, cfg.seed())?;
    let sqrt3 = 3f64.sqrt();
    let irr_ok = r.min_irrational_residual >= 0.05;
    let rat_ok = r.rational_pair_residuals.0 <= 1e-9 && r.rational_pair_residuals.1 <= 1e-9;
    let moved_ok = (r.moved_residual - sqrt3).abs() <= 1e-9;
    let mut text = String::new();
    writeln!(text, "times (1, sqrt 2): min residual of T(sqrt 2) over {} probes with |x| >= 0.1: {:.6e}", r.probes, r.min_irrational_residual).unwrap();
    writeln!(
        text,
        "times (1, 2): residuals of (1, 0) are {:.3e} and {:.3e}",
        r.rational_pair_residuals.0, r.rational_pair_residuals.1
    )
    .unwrap();
    writeln!(text, "T(1/3) moves (1, 0) by {:.12} (sqrt 3 = {sqrt3:.12})", r.moved_residual).unwrap();
    let passed = irr_ok && rat_ok && moved_ok;
    writeln!(text, "verdict: {}", if passed { "PASS" } else { "FAIL" }).unwrap();
    let csv = format!(
        "quantity,value\nmin_irrational_residual,{:e}\nrational_residual_1,{:e}\nrational_residual_2,{:e}\nmoved_residual,{:e}\n",
        r.min_irrational_residual, r.rational_pair_residuals.0, r.rational_pair_residuals.1, r.moved_residual
    );
    Ok(Output::new(text, Some(csv), passed))
}

// ---------------------------------------------------------------------------
// Command line

#[derive(Debug, Parser)]
#[command(name = "semifix", version, about = "Common fixed points of commuting nonexpansive semigroups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample the semigroup law and nonexpansiveness.
    CheckSemigroup(RunArgs),
    /// Find indices k with frac(k alpha) near a target.
    KroneckerSearch(RunArgs),
    /// Check that n+1 mappings pin down the common fixed set.
    VerifyTheorem(RunArgs),
    /// Run a convergence scheme and write its trace.
    Iterate(RunArgs),
    /// Translation family whose averaged map fixes every point.
    Counterexample(RunArgs),
    /// Compare fixed points of a convex combination with those of its parts.
    Bruck(RunArgs),
    /// Rotations at rational versus irrational time ratios.
    Necessity(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Experiment file; repeat to run several.
    #[arg(long = "config", value_name = "PATH")]
    configs: Vec<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads across config files.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| CliError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs one experiment file end to end; returns its outcome and any
/// report text destined for standard output.
fn run_one(experiment: Experiment, config: Option<&Path>, args: &RunArgs) -> (Outcome, String) {
    let result = (|| {
        let mut cfg = match config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = args.seed {
            cfg.seed = Some(seed);
        }
        if let Some(csv) = &args.csv {
            cfg.output.csv_path = Some(csv.clone());
        }
        if let Some(report) = &args.report {
            cfg.output.report_path = Some(report.clone());
        }
        let out = run_experiment(experiment, &cfg)?;
        if let (Some(path), Some(csv)) = (&cfg.output.csv_path, &out.csv) {
            write_file(path, csv)?;
        }
        let stdout = match &cfg.output.report_path {
            Some(path) => {
                write_file(path, &out.report)?;
                String::new()
            }
            None => out.report.clone(),
        };
        Ok::<_, CliError>((out.outcome, stdout))
    })();
    match result {
        Ok(r) => r,
        Err(e) => {
            let name = config.map_or_else(|| "<defaults>".to_string(), |p| p.display().to_string());
            eprintln!("{name}: {e}");
            (e.outcome(), String::new())
        }
    }
}

/// Parses `argv`, runs, and returns the process exit code. With several
/// configs the code is the largest of the individual codes.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Outcome::ConfigError.code() } else { 0 };
        }
    };
    let (experiment, args) = match cli.command {
        Command::CheckSemigroup(a) => (Experiment::CheckSemigroup, a),
        Command::KroneckerSearch(a) => (Experiment::KroneckerSearch, a),
        Command::VerifyTheorem(a) => (Experiment::VerifyTheorem, a),
        Command::Iterate(a) => (Experiment::Iterate, a),
        Command::Counterexample(a) => (Experiment::Counterexample, a),
        Command::Bruck(a) => (Experiment::Bruck, a),
        Command::Necessity(a) => (Experiment::Necessity, a),
    };
    let needs_config = !matches!(experiment, Experiment::Counterexample | Experiment::Necessity);
    if args.configs.is_empty() && needs_config {
        eprintln!("--config is required for this subcommand");
        return Outcome::ConfigError.code();
    }
    if args.configs.len() > 1 && (args.csv.is_some() || args.report.is_some()) {
        eprintln!("--csv and --report apply to a single --config");
        return Outcome::ConfigError.code();
    }
    if args.jobs == 0 {
        eprintln!("--jobs must be at least 1");
        return Outcome::ConfigError.code();
    }
    if args.configs.is_empty() {
        let (outcome, text) = run_one(experiment, None, &args);
        print!("{text}");
        return outcome.code();
    }

    let results: Vec<Mutex<Option<(Outcome, String)>>> = args.configs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..args.jobs.min(args.configs.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = args.configs.get(i) else { break };
                let r = run_one(experiment, Some(path), &args);
                *results[i].lock().expect("result slot") = Some(r);
            });
        }
    });
    let mut worst = Outcome::Pass;
    for slot in results {
        let (outcome, text) = slot.into_inner().expect("result slot").expect("every config ran");
        print!("{text}");
        worst = worst.max(outcome);
    }
    worst.code()
}


#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![-1e6f64..1e6, Just(0.0), Just(1e-300), Just(0.1)]
    }

    fn scheme() -> impl Strategy<Value = SchemeConfig> {
        (
            proptest::option::of(prop_oneof![Just("km".to_string()), Just("halpern".to_string())]),
            proptest::option::of(1u64..1_000_000),
            proptest::option::of(proptest::collection::vec(finite(), 0..4)),
            proptest::option::of(finite()),
            proptest::option::of(proptest::collection::vec(proptest::collection::vec("[a-z0-9()/+ ]{0,12}", 1..3), 0..3)),
        )
            .prop_map(|(name, k, u, tol, params)| SchemeConfig {
                name,
                k,
                u,
                tol,
                params,
                ..SchemeConfig::default()
            })
    }

    proptest! {
        #[test]
        fn configs_round_trip(seed in proptest::option::of(any::<u32>()), scheme in scheme(), stride in proptest::option::of(1u64..100)) {
            let cfg = ExperimentConfig {
                seed: seed.map(u64::from),
                instance: Some(InstanceConfig {
                    kind: InstanceKind::Matexp,
                    n: Some(1),
                    dim: None,
                    period: None,
                    mu: Some(vec![vec![0.5]]),
                    q: None,
                    b: Some(vec![2.0]),
                    norm: Some("lp:4".into()),
                    domain: None,
                }),
                basis: Some(BasisConfig { ps: Some(vec![vec!["1/3".into()]]), alphas: vec!["sqrt(2)".into()] }),
                scheme,
                output: OutputConfig { csv_path: Some("a/b.csv".into()), report_path: None, stride },
            };
            prop_assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        }
    }
}

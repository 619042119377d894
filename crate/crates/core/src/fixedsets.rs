//! Fixed-point sets of a semigroup, reduced to `n + 1` mappings.
//!
//! Given parameters `p_1..p_n` spanning `R^n` and reals `α_1..α_n` with
//! `{1, α_1, ..., α_n}` independent over the rationals, put
//! `p_0 = Σ α_j p_j`. A point fixed by `T(p_0), T(p_1), ..., T(p_n)` is then
//! fixed by every `T(p)`. [`verify_main_theorem`] walks that argument stage
//! by stage on a concrete instance, replacing each limit by a Kronecker
//! index found at finite precision, and reports residuals per stage.
//!
//! Fixed sets are never materialized; every set identity is checked
//! pointwise through residuals at probe points.

use std::fmt::{self, Write as _};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exactreal::{
    is_independent_over_q, rational_from_f64, rational_rank, rational_to_f64, solve_rational, ExactReal,
    Rational,
};
use crate::geometry::{ConvexSet, NormKind, Vector};
use crate::kronecker::{beta_shift, find_hit, KroneckerError, KroneckerProblem};
use crate::semigroup::{
    continuity_modulus, make_translation_counterexample, sample_domain, AffineSubspace, FixedSet, Parameter,
    SemigroupError, SemigroupInstance,
};

/// Default fixed-point tolerance for float evaluations.
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FixedSetError {
    #[error("malformed basis: {0}")]
    Shape(String),
    #[error("basis parameters are linearly dependent")]
    UsualIndependenceViolated,
    #[error("{{1, alphas}} is not linearly independent over Q")]
    QIndependenceViolated,
    #[error("p0 = sum alpha_j p_j has negative coordinate {index}")]
    P0NotNonnegative { index: usize },
    #[error("decomposition residual {residual:e} exceeds tolerance")]
    SolveFailed { residual: f64 },
    #[error("bad weights: {0}")]
    BadWeights(String),
    #[error("the {0} norm is not strictly convex")]
    NormNotStrictlyConvex(NormKind),
    #[error("no common fixed point witness supplied, or the witness is not fixed")]
    NoCommonFixedPointWitness,
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    Kronecker(#[from] KroneckerError),
}

/// Validated data `(p_1..p_n, α_1..α_n, p_0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterBasis {
    ps: Vec<Parameter>,
    ps_exact: Vec<Vec<Rational>>,
    alphas: Vec<ExactReal>,
    p0: Parameter,
    p0_exact: Vec<ExactReal>,
}

/// Builds a basis from rational parameter coordinates.
pub fn make_basis(ps: Vec<Vec<Rational>>, alphas: Vec<ExactReal>) -> Result<ParameterBasis, FixedSetError> {
    let n = ps.len();
    if n == 0 {
        return Err(FixedSetError::Shape("at least one parameter is required".into()));
    }
    if alphas.len() != n {
        return Err(FixedSetError::Shape(format!("{n} parameters but {} alphas", alphas.len())));
    }
    if let Some(p) = ps.iter().find(|p| p.len() != n) {
        return Err(FixedSetError::Shape(format!(
            "parameters must have {n} coordinates, found {}",
            p.len()
        )));
    }
    let float_ps = ps
        .iter()
        .map(|p| Parameter::new(p.iter().map(rational_to_f64).collect()))
        .collect::<Result<Vec<_>, _>>()?;
    if rational_rank(ps.clone()) != n {
        return Err(FixedSetError::UsualIndependenceViolated);
    }
    if !is_independent_over_q(&alphas, true) {
        return Err(FixedSetError::QIndependenceViolated);
    }
    let mut p0_exact = Vec::with_capacity(n);
    for i in 0..n {
        let coord = alphas
            .iter()
            .zip(&ps)
            .fold(ExactReal::zero(), |acc, (a, p)| acc + a.scale(&p[i]));
        if coord.is_negative() {
            return Err(FixedSetError::P0NotNonnegative { index: i });
        }
        p0_exact.push(coord);
    }
    let p0 = Parameter::new(p0_exact.iter().map(ExactReal::to_f64).collect())?;
    let alpha_f: Vec<f64> = alphas.iter().map(ExactReal::to_f64).collect();
    let recomputed = Parameter::combination(&alpha_f, &float_ps).ok();
    debug_assert!(recomputed.is_none_or(|r| r.max_abs_diff(&p0) <= 1e-12 * (1.0 + norm_inf(&p0))));
    Ok(ParameterBasis {
        ps: float_ps,
        ps_exact: ps,
        alphas,
        p0,
        p0_exact,
    })
}

/// Builds a basis from float parameters, read as the rationals they denote.
pub fn make_basis_f64(ps: Vec<Parameter>, alphas: Vec<ExactReal>) -> Result<ParameterBasis, FixedSetError> {
    let exact = ps
        .iter()
        .map(|p| p.coords().iter().map(|&x| rational_from_f64(x)).collect())
        .collect();
    make_basis(exact, alphas)
}

/// The canonical basis `e_1..e_n` with `α_k = sqrt(k-th prime)`.
pub fn prime_root_basis(n: usize) -> ParameterBasis {
    let primes = first_primes(n);
    let alphas = primes.into_iter().map(ExactReal::sqrt).collect();
    make_basis_f64((0..n).map(|j| Parameter::unit(n, j)).collect(), alphas)
        .expect("square roots of distinct primes are independent over Q")
}

fn first_primes(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if (2..c).take_while(|d| d * d <= c).all(|d| !c.is_multiple_of(d)) {
            out.push(c);
        }
        c += 1;
    }
    out
}

fn norm_inf(p: &Parameter) -> f64 {
    p.coords().iter().fold(0.0, |m, x| f64::max(m, x.abs()))
}

impl ParameterBasis {
    pub fn n(&self) -> usize {
        self.ps.len()
    }

    pub fn ps(&self) -> &[Parameter] {
        &self.ps
    }

    pub fn alphas(&self) -> &[ExactReal] {
        &self.alphas
    }

    pub fn p0(&self) -> &Parameter {
        &self.p0
    }

    pub fn p0_exact(&self) -> &[ExactReal] {
        &self.p0_exact
    }

    /// `p_0, p_1, ..., p_n` in that order.
    pub fn all_parameters(&self) -> Vec<Parameter> {
        std::iter::once(self.p0.clone()).chain(self.ps.iter().cloned()).collect()
    }

    /// `Σ λ_j p_j` for nonnegative-result coefficient vectors.
    pub fn compose(&self, lambdas: &[f64]) -> Result<Parameter, SemigroupError> {
        Parameter::combination(lambdas, &self.ps)
    }
}

/// Coordinates `λ` with `Σ λ_j p_j = p`, solved exactly over the rationals.
pub fn decompose(basis: &ParameterBasis, p: &Parameter) -> Result<Vec<f64>, FixedSetError> {
    let n = basis.n();
    if p.len() != n {
        return Err(FixedSetError::Shape(format!("parameter has {} coordinates, basis needs {n}", p.len())));
    }
    // Row i holds the i-th coordinate of every p_j.
    let a: Vec<Vec<Rational>> = (0..n)
        .map(|i| basis.ps_exact.iter().map(|pj| pj[i].clone()).collect())
        .collect();
    let rhs: Vec<Rational> = p.coords().iter().map(|&x| rational_from_f64(x)).collect();
    let lambda = solve_rational(a, rhs).ok_or(FixedSetError::SolveFailed {
        residual: f64::INFINITY,
    })?;
    let lambda: Vec<f64> = lambda.iter().map(rational_to_f64).collect();
    let mut residual = 0.0f64;
    let mut p_norm = 0.0f64;
    for i in 0..n {
        let back: f64 = lambda.iter().zip(&basis.ps).map(|(l, pj)| l * pj.coords()[i]).sum();
        residual += (back - p.coords()[i]).powi(2);
        p_norm += p.coords()[i].powi(2);
    }
    let residual = residual.sqrt();
    if residual > 1e-10 * (1.0 + p_norm.sqrt()) {
        return Err(FixedSetError::SolveFailed { residual });
    }
    Ok(lambda)
}

pub type MapFn = Arc<dyn Fn(&Vector) -> Result<Vector, SemigroupError> + Send + Sync>;

/// A single mapping `C → C`, such as `T(p)`, `S` or `S_j`.
#[derive(Clone)]
pub struct Mapping {
    apply: MapFn,
    domain: ConvexSet,
    norm: NormKind,
    label: String,
    nonexpansive: bool,
    fixed_set: Option<FixedSet>,
}

impl fmt::Debug for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Mapping")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("norm", &self.norm)
            .finish()
    }
}

impl Mapping {
    pub fn new(
        label: impl Into<String>,
        domain: ConvexSet,
        norm: NormKind,
        nonexpansive: bool,
        apply: MapFn,
    ) -> Self {
        Mapping {
            apply,
            domain,
            norm,
            label: label.into(),
            nonexpansive,
            fixed_set: None,
        }
    }

    pub fn identity(domain: ConvexSet) -> Self {
        let whole = FixedSet::Affine(AffineSubspace::whole(domain.dim()));
        Mapping::new("I", domain, NormKind::Euclidean, true, Arc::new(|x: &Vector| Ok(x.clone())))
            .with_fixed_set(whole)
    }

    /// `x ↦ a x` on `R^dim`; fixes only the origin unless `a = 1`.
    pub fn scaling(dim: usize, a: f64) -> Self {
        let fixed = if a == 1.0 {
            AffineSubspace::whole(dim)
        } else {
            AffineSubspace::point(Vector::zeros(dim))
        };
        Mapping::new(
            format!("{a}*I"),
            ConvexSet::WholeSpace(dim),
            NormKind::Euclidean,
            a.abs() <= 1.0,
            Arc::new(move |x: &Vector| Ok(x.scale(a))),
        )
        .with_fixed_set(FixedSet::Affine(fixed))
    }

    /// `T(p)` of an instance as a standalone mapping.
    pub fn from_semigroup(sg: &SemigroupInstance, p: &Parameter) -> Self {
        let owned = sg.clone();
        let param = p.clone();
        let mapping = Mapping::new(
            format!("T{p}"),
            sg.domain().clone(),
            sg.norm(),
            sg.claims_nonexpansive(),
            Arc::new(move |x: &Vector| owned.evaluate(&param, x)),
        );
        match sg.fixed_set(p) {
            Some(f) => mapping.with_fixed_set(f),
            None => mapping,
        }
    }

    /// `Σ w_j maps[j]`. Weights are not validated here.
    pub fn convex_combination(label: impl Into<String>, maps: &[Mapping], weights: &[f64]) -> Self {
        assert_eq!(maps.len(), weights.len(), "one weight per mapping");
        assert!(!maps.is_empty(), "at least one mapping");
        let parts: Vec<(f64, Mapping)> = weights.iter().copied().zip(maps.iter().cloned()).collect();
        let domain = maps[0].domain.clone();
        let norm = maps[0].norm;
        let nonexpansive = maps.iter().all(|m| m.nonexpansive);
        let out_domain = domain.clone();
        Mapping::new(
            label,
            domain,
            norm,
            nonexpansive,
            Arc::new(move |x: &Vector| {
                let mut acc = Vector::zeros(x.dim());
                for (w, m) in &parts {
                    acc = acc.lincomb(1.0, &m.apply(x)?, *w);
                }
                Ok(if out_domain.contains(&acc, 0.0) {
                    acc
                } else {
                    out_domain.project(&acc)
                })
            }),
        )
    }

    /// `(1 - a) x + a m(x)`.
    pub fn averaged(&self, a: f64) -> Mapping {
        let inner = self.clone();
        let mut out = Mapping::new(
            format!("avg({a}, {})", self.label),
            self.domain.clone(),
            self.norm,
            self.nonexpansive,
            Arc::new(move |x: &Vector| Ok(x.lincomb(1.0 - a, &inner.apply(x)?, a))),
        );
        out.fixed_set = self.fixed_set.clone();
        out
    }

    pub fn with_norm(mut self, norm: NormKind) -> Self {
        self.norm = norm;
        self
    }

    /// Attaches a closed-form fixed-point set, used as a convergence oracle.
    pub fn with_fixed_set(mut self, fixed_set: FixedSet) -> Self {
        self.fixed_set = Some(fixed_set);
        self
    }

    pub fn fixed_set(&self) -> Option<&FixedSet> {
        self.fixed_set.as_ref()
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector, SemigroupError> {
        if x.dim() != self.domain.dim() {
            return Err(SemigroupError::PointDimension {
                expected: self.domain.dim(),
                got: x.dim(),
            });
        }
        if !self.domain.contains(x, crate::semigroup::DOMAIN_TOL) {
            return Err(SemigroupError::OutOfDomain);
        }
        (self.apply)(x)
    }

    pub fn domain(&self) -> &ConvexSet {
        &self.domain
    }

    pub fn norm(&self) -> NormKind {
        self.norm
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn claims_nonexpansive(&self) -> bool {
        self.nonexpansive
    }

    /// `‖m(x) - x‖` in the mapping's norm.
    pub fn residual(&self, x: &Vector) -> Result<f64, SemigroupError> {
        Ok(self.apply(x)?.distance(x, self.norm))
    }

    pub fn is_fixed(&self, x: &Vector, tol: f64) -> Result<bool, SemigroupError> {
        Ok(self.residual(x)? <= tol)
    }
}

fn check_weights(weights: &[f64], count: usize, allow_one: bool) -> Result<(), FixedSetError> {
    if weights.len() != count {
        return Err(FixedSetError::BadWeights(format!(
            "expected {count} weights, got {}",
            weights.len()
        )));
    }
    for &w in weights {
        let ok = w > 0.0 && (w < 1.0 || (allow_one && w == 1.0));
        if !ok {
            return Err(FixedSetError::BadWeights(format!("weight {w} outside the allowed interval")));
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(FixedSetError::BadWeights(format!("weights sum to {sum}, not 1")));
    }
    Ok(())
}

/// `S = λ_0 T(p_0) + λ_1 T(p_1) + ... + λ_n T(p_n)`.
pub fn combined_map(
    sg: &SemigroupInstance,
    basis: &ParameterBasis,
    weights: &[f64],
) -> Result<Mapping, FixedSetError> {
    if basis.n() != sg.n() {
        return Err(FixedSetError::Shape(format!(
            "basis is {}-dimensional, semigroup has {} parameters",
            basis.n(),
            sg.n()
        )));
    }
    check_weights(weights, basis.n() + 1, false)?;
    let maps: Vec<Mapping> = basis
        .all_parameters()
        .iter()
        .map(|p| Mapping::from_semigroup(sg, p))
        .collect();
    let s = Mapping::convex_combination("S", &maps, weights);
    // With a common fixed point and a strictly convex norm, F(S) is the
    // common fixed set of the whole family.
    Ok(match sg.common_fixed_set() {
        Some(f @ FixedSet::Affine(_)) if sg.norm().is_strictly_convex() => s.with_fixed_set(f),
        _ => s,
    })
}

/// Equal weights `1/(n+1)`.
pub fn equal_weights(n: usize) -> Vec<f64> {
    vec![1.0 / (n + 1) as f64; n + 1]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Hypothesis,
    BetaShift,
    UnitCube,
    Cone,
    Full,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Hypothesis, Stage::BetaShift, Stage::UnitCube, Stage::Cone, Stage::Full];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Hypothesis => "a_hypothesis",
            Stage::BetaShift => "b_beta_shift",
            Stage::UnitCube => "c_unit_cube",
            Stage::Cone => "d_cone",
            Stage::Full => "e_full",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub id: String,
    pub residual: f64,
    pub pass: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageReport {
    pub stage: Stage,
    pub probes: Vec<Probe>,
    pub max_residual: f64,
    pub passed: bool,
    pub notes: Vec<String>,
}

impl StageReport {
    fn new(stage: Stage) -> Self {
        StageReport {
            stage,
            probes: Vec::new(),
            max_residual: 0.0,
            passed: true,
            notes: Vec::new(),
        }
    }

    fn push(&mut self, id: impl Into<String>, residual: f64, tol: f64, note: impl Into<String>) {
        let pass = residual <= tol;
        self.max_residual = self.max_residual.max(residual);
        self.passed &= pass;
        self.probes.push(Probe {
            id: id.into(),
            residual,
            pass,
            note: note.into(),
        });
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub samples: usize,
    pub tol: f64,
    /// Box half-width of the Kronecker search in the unit-cube stage.
    pub eps: f64,
    /// Side of the box `[0, L]^n` sampled in the cone stage.
    pub cone_bound: f64,
    pub k_max: u64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: 100,
            tol: DEFAULT_TOL,
            eps: 1e-3,
            cone_bound: 10.0,
            k_max: crate::kronecker::DEFAULT_SEARCH_CAP,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub instance: String,
    pub z: Vector,
    pub tol: f64,
    pub stages: Vec<StageReport>,
    /// Passing the full stage (which includes `p_0..p_n`) implies passing the
    /// hypothesis stage; false would indicate an internal inconsistency.
    pub forward_inclusion_consistent: bool,
    pub passed: bool,
}

impl VerifyReport {
    pub fn stage(&self, stage: Stage) -> &StageReport {
        self.stages.iter().find(|s| s.stage == stage).expect("every stage is reported")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "fixed-point reduction check on {} at z = ({})", self.instance, self.z).unwrap();
        writeln!(out, "tolerance {:e}", self.tol).unwrap();
        for s in &self.stages {
            writeln!(
                out,
                "stage {}: {} probes, max residual {:.6e} => {}",
                s.stage.name(),
                s.probes.len(),
                s.max_residual,
                if s.passed { "PASS" } else { "FAIL" }
            )
            .unwrap();
            for note in &s.notes {
                writeln!(out, "  note: {note}").unwrap();
            }
        }
        if !self.stage(Stage::Hypothesis).passed {
            writeln!(out, "z is not fixed by T(p_0), ..., T(p_n); later stages are reported for contrast").unwrap();
        }
        writeln!(out, "forward inclusion consistent: {}", self.forward_inclusion_consistent).unwrap();
        writeln!(out, "verdict: {}", if self.passed { "PASS" } else { "FAIL" }).unwrap();
        out
    }

    /// `stage,probe_id,residual,pass`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("stage,probe_id,residual,pass\n");
        for s in &self.stages {
            for p in &s.probes {
                writeln!(out, "{},{},{:.6e},{}", s.stage.name(), p.id, p.residual, p.pass).unwrap();
            }
        }
        out
    }
}

fn sample_box<R: Rng>(n: usize, side: f64, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.0..side)).collect()
}

/// Runs the five-stage check that `z` fixed by `T(p_0), ..., T(p_n)` is a
/// common fixed point of the whole family.
///
/// Stages: (a) residuals at `p_0..p_n`; (b) the shifted parameter
/// `p_0' = Σ β_j p_j` with `β_j = α_j + ℓ`; (c) points `Σ λ_j p_j` with
/// `λ ∈ [0,1)^n`, reached through Kronecker indices of the `β`'s; (d) points
/// `Σ λ_j p_j` with `λ ∈ [0, L]^n`; (e) arbitrary `p ∈ [0,10]^n` via the
/// `+m` shift of its coordinates. Later stages still run when (a) fails.
pub fn verify_main_theorem(
    sg: &SemigroupInstance,
    basis: &ParameterBasis,
    z: &Vector,
    opts: &VerifyOptions,
) -> Result<VerifyReport, FixedSetError> {
    if basis.n() != sg.n() {
        return Err(FixedSetError::Shape(format!(
            "basis is {}-dimensional, semigroup has {} parameters",
            basis.n(),
            sg.n()
        )));
    }
    let n = basis.n();
    let tol = opts.tol;
    let norm = sg.norm();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let res = |p: &Parameter| -> Result<f64, FixedSetError> { Ok(sg.evaluate(p, z)?.distance(z, norm)) };

    // (a) hypothesis
    let mut a = StageReport::new(Stage::Hypothesis);
    for (j, p) in basis.all_parameters().iter().enumerate() {
        a.push(format!("p{j}"), res(p)?, tol, format!("T{p}"));
    }

    // (b) beta shift: p0' = Σ β_j p_j = p0 + ℓ Σ p_j
    let mut b = StageReport::new(Stage::BetaShift);
    let shift = beta_shift(basis.alphas())?;
    let p0_shift_exact: Vec<ExactReal> = (0..n)
        .map(|i| {
            shift
                .betas
                .iter()
                .zip(&basis.ps_exact)
                .fold(ExactReal::zero(), |acc, (beta, p)| acc + beta.scale(&p[i]))
        })
        .collect();
    let p0_shift = Parameter::new(p0_shift_exact.iter().map(ExactReal::to_f64).collect())?;
    let ell = shift.ell as f64;
    let sum_ps: Vec<f64> = (0..n).map(|i| basis.ps.iter().map(|p| p.coords()[i]).sum()).collect();
    let via_identity: Vec<f64> = (0..n).map(|i| basis.p0.coords()[i] + ell * sum_ps[i]).collect();
    let identity_gap = p0_shift
        .coords()
        .iter()
        .zip(&via_identity)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs() / (1.0 + y.abs())));
    b.push("identity", identity_gap, 1e-10, format!("p0' = p0 + {} (p_1 + ... + p_n)", shift.ell));
    b.push("p0_shifted", res(&p0_shift)?, tol, format!("T{p0_shift}"));
    let mut composed = z.clone();
    for p in basis.ps.iter().rev() {
        composed = sg.power_apply(p, shift.ell, &composed)?;
    }
    composed = sg.evaluate(&basis.p0, &composed)?;
    b.push(
        "composition",
        composed.distance(z, norm),
        tol,
        "T(p0) T(p_1)^l ... T(p_n)^l z",
    );
    b.notes.push(format!(
        "ell = {}, betas = [{}]",
        shift.ell,
        shift.betas.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
    ));

    // (c) unit cube via Kronecker indices of the betas
    let mut c = StageReport::new(Stage::UnitCube);
    let mut worst_closeness = 0.0f64;
    let mut largest_k = 0u64;
    for s in 0..opts.samples {
        let lambda = sample_box(n, 1.0, &mut rng);
        let target_point = basis.compose(&lambda)?;
        let problem = KroneckerProblem::new(shift.betas.clone(), lambda.clone(), opts.eps)?;
        match find_hit(&problem, opts.k_max) {
            Ok(hit) => {
                largest_k = largest_k.max(hit.k);
                let reached = basis.compose(&hit.fracs)?;
                let at_reached = sg.evaluate(&reached, z)?;
                let at_target = sg.evaluate(&target_point, z)?;
                let closeness = at_reached.distance(&at_target, norm);
                worst_closeness = worst_closeness.max(closeness);
                let r = at_reached.distance(z, norm).max(at_target.distance(z, norm));
                c.push(format!("s{s}"), r, tol, format!("k={} closeness={closeness:.3e}", hit.k));
            }
            Err(KroneckerError::NotFound { k_max }) => {
                c.push(format!("s{s}"), f64::INFINITY, tol, format!("no Kronecker index up to {k_max}"));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let modulus = continuity_modulus(sg, z, 1e-6, 3)?;
    let p_scale: f64 = basis.ps.iter().map(|p| p.coords().iter().map(|x| x.abs()).sum::<f64>()).sum();
    c.notes.push(format!(
        "eps {:e}, largest index {largest_k}, worst |T(q)z - T(sum lambda p)z| = {worst_closeness:.3e}, \
         continuity bound {:.3e}",
        opts.eps,
        modulus.max_ratio * opts.eps * p_scale
    ));

    // (d) cone [0, L]^n
    let mut d = StageReport::new(Stage::Cone);
    for s in 0..opts.samples {
        let lambda = sample_box(n, opts.cone_bound, &mut rng);
        d.push(format!("s{s}"), res(&basis.compose(&lambda)?)?, tol, "");
    }

    // (e) all of R_+^n; p_0..p_n first so that (e) subsumes (a)
    let mut e = StageReport::new(Stage::Full);
    let mut full_params: Vec<(String, Parameter)> = basis
        .all_parameters()
        .into_iter()
        .enumerate()
        .map(|(j, p)| (format!("p{j}"), p))
        .collect();
    for s in 0..opts.samples {
        let p = Parameter::new(sample_box(n, crate::semigroup::PARAM_BOX, &mut rng))?;
        full_params.push((format!("s{s}"), p));
    }
    for (id, p) in &full_params {
        let lambda = decompose(basis, p)?;
        let m = lambda
            .iter()
            .map(|l| l.abs().floor() + 1.0)
            .fold(0.0f64, f64::max);
        let shifted: Vec<f64> = lambda.iter().map(|l| l + m).collect();
        let r_direct = res(p)?;
        let r_shifted = res(&basis.compose(&shifted)?)?;
        e.push(id.clone(), r_direct.max(r_shifted), tol, format!("m={m}"));
    }

    let stages = vec![a, b, c, d, e];
    let forward_inclusion_consistent = !(stages[4].passed && !stages[0].passed);
    debug_assert!(forward_inclusion_consistent);
    let passed = stages.iter().all(|s| s.passed);
    Ok(VerifyReport {
        instance: sg.label().to_string(),
        z: z.clone(),
        tol,
        stages,
        forward_inclusion_consistent,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruckProbe {
    pub x: Vector,
    pub combined_residual: f64,
    pub max_map_residual: f64,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruckReport {
    pub tol: f64,
    pub probes: Vec<BruckProbe>,
    pub all_agree: bool,
}

/// Checks `F(Σ w_j T_j) = ∩ F(T_j)` pointwise at `probes`: each probe is
/// fixed by the combination iff it is fixed by every map.
pub fn bruck_check(
    maps: &[Mapping],
    weights: &[f64],
    probes: &[Vector],
    witness: Option<&Vector>,
    tol: f64,
    norm: NormKind,
) -> Result<BruckReport, FixedSetError> {
    if !norm.is_strictly_convex() {
        return Err(FixedSetError::NormNotStrictlyConvex(norm));
    }
    if maps.is_empty() {
        return Err(FixedSetError::Shape("at least one mapping is required".into()));
    }
    check_weights(weights, maps.len(), true)?;
    let maps: Vec<Mapping> = maps.iter().map(|m| m.clone().with_norm(norm)).collect();
    let witness = witness.ok_or(FixedSetError::NoCommonFixedPointWitness)?;
    for m in &maps {
        if !m.is_fixed(witness, tol)? {
            return Err(FixedSetError::NoCommonFixedPointWitness);
        }
    }
    let combined = Mapping::convex_combination("S", &maps, weights);
    let mut out = Vec::with_capacity(probes.len());
    for x in probes {
        let combined_residual = combined.residual(x)?;
        let mut max_map_residual = 0.0f64;
        for m in &maps {
            max_map_residual = max_map_residual.max(m.residual(x)?);
        }
        let agree = (combined_residual <= tol) == (max_map_residual <= tol);
        out.push(BruckProbe {
            x: x.clone(),
            combined_residual,
            max_map_residual,
            agree,
        });
    }
    let all_agree = out.iter().all(|p| p.agree);
    Ok(BruckReport {
        tol,
        probes: out,
        all_agree,
    })
}

/// Report on the translation family whose combined map fixes everything
/// although the family has no common fixed point.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleReport {
    pub weights: [ExactReal; 3],
    pub weight_sum: ExactReal,
    pub cancellation: ExactReal,
    /// `(x, |Sx - x|, |T(e_1)x - x|)` per probe.
    pub probes: Vec<(f64, f64, f64)>,
    pub max_s_residual: f64,
    pub max_unit_deviation: f64,
    pub passed: bool,
}

impl CounterexampleReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "translation family T(l1 e1 + l2 e2) x = x + l1 - l2 on R").unwrap();
        writeln!(out, "p0 = sqrt(2) e1 + sqrt(3) e2, p1 = e1, p2 = e2").unwrap();
        for (i, w) in self.weights.iter().enumerate() {
            writeln!(out, "weight {i} = {w}").unwrap();
        }
        writeln!(out, "exact weight sum = {}", self.weight_sum).unwrap();
        writeln!(
            out,
            "exact cancellation w0 (sqrt(2) - sqrt(3)) + w1 - w2 = {}",
            self.cancellation
        )
        .unwrap();
        writeln!(out, "probes: {}", self.probes.len()).unwrap();
        writeln!(out, "max |Sx - x| = {:.3e}", self.max_s_residual).unwrap();
        writeln!(out, "max ||T(e1)x - x| - 1| = {:.3e}", self.max_unit_deviation).unwrap();
        writeln!(out, "common fixed set empty, F(S) = R: {}", if self.passed { "PASS" } else { "FAIL" }).unwrap();
        out
    }

    /// `probe_id,x,s_residual,t_e1_residual`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("probe_id,x,s_residual,t_e1_residual\n");
        for (i, (x, s, t)) in self.probes.iter().enumerate() {
            writeln!(out, "{i},{x:?},{s:.6e},{t:.17}").unwrap();
        }
        out
    }
}

/// Exact weights `((sqrt2+sqrt3+1)/6, (3-sqrt2)/6, (2-sqrt3)/6)`.
pub fn counterexample_weights() -> [ExactReal; 3] {
    let parse = |s: &str| s.parse::<ExactReal>().expect("valid literal");
    [
        parse("(sqrt(2) + sqrt(3) + 1)/6"),
        parse("(3 - sqrt(2))/6"),
        parse("(2 - sqrt(3))/6"),
    ]
}

pub fn counterexample_demo(seed: u64) -> Result<CounterexampleReport, FixedSetError> {
    let sg = make_translation_counterexample();
    let basis = prime_root_basis(2);
    let weights = counterexample_weights();
    let weight_sum = weights.iter().fold(ExactReal::zero(), |acc, w| acc + w);
    let shift0 = "sqrt(2) - sqrt(3)".parse::<ExactReal>().expect("valid literal");
    let cancellation = &weights[0] * &shift0 + &weights[1] - &weights[2];
    let float_weights: Vec<f64> = weights.iter().map(ExactReal::to_f64).collect();
    let s = combined_map(&sg, &basis, &float_weights)?;
    let t_e1 = Mapping::from_semigroup(&sg, &Parameter::unit(2, 0));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs = vec![17.5];
    xs.extend((1..100).map(|_| rng.gen_range(-1000.0..=1000.0)));
    let mut probes = Vec::with_capacity(xs.len());
    let mut max_s_residual = 0.0f64;
    let mut max_unit_deviation = 0.0f64;
    for x in xs {
        let v = Vector::from_slice(&[x]);
        let rs = s.residual(&v)?;
        let rt = t_e1.residual(&v)?;
        max_s_residual = max_s_residual.max(rs);
        max_unit_deviation = max_unit_deviation.max((rt - 1.0).abs());
        probes.push((x, rs, rt));
    }
    let passed = weight_sum == ExactReal::one()
        && cancellation.is_zero()
        && max_s_residual <= 1e-9
        && max_unit_deviation <= 1e-9;
    Ok(CounterexampleReport {
        weights,
        weight_sum,
        cancellation,
        probes,
        max_s_residual,
        max_unit_deviation,
        passed,
    })
}

/// Compares fixed points of a one-parameter family at two times.
#[derive(Debug, Clone, PartialEq)]
pub struct PairProbe {
    pub x: Vector,
    pub residual_a: f64,
    pub residual_b: f64,
}

pub fn pair_residuals(
    sg: &SemigroupInstance,
    a: f64,
    b: f64,
    probes: &[Vector],
) -> Result<Vec<PairProbe>, FixedSetError> {
    let ta = Mapping::from_semigroup(sg, &Parameter::new(vec![a])?);
    let tb = Mapping::from_semigroup(sg, &Parameter::new(vec![b])?);
    probes
        .iter()
        .map(|x| {
            Ok(PairProbe {
                x: x.clone(),
                residual_a: ta.residual(x)?,
                residual_b: tb.residual(x)?,
            })
        })
        .collect()
}

/// Irrational versus rational time ratios on a rotation family.
#[derive(Debug, Clone, PartialEq)]
pub struct NecessityReport {
    /// Smallest `T(sqrt 2)` residual over probes with `‖x‖ >= 0.1`.
    pub min_irrational_residual: f64,
    pub probes: usize,
    /// Residuals of `(1, 0)` under `T(1)` and `T(2)`.
    pub rational_pair_residuals: (f64, f64),
    /// Residual of `(1, 0)` under `T(1/3)`.
    pub moved_residual: f64,
}

/// Runs both halves of the one-parameter comparison on `sg` (a rotation of
/// period 1): with times `(1, sqrt 2)` only the origin survives, with `(1, 2)`
/// the point `(1, 0)` is fixed by both but not by `T(1/3)`.
pub fn rotation_necessity_demo(
    sg: &SemigroupInstance,
    probe_count: usize,
    seed: u64,
) -> Result<NecessityReport, FixedSetError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probes = vec![Vector::from_slice(&[1.0, 0.0])];
    while probes.len() < probe_count {
        let x = sample_domain(sg.domain(), &mut rng);
        if x.euclidean() >= 0.1 {
            probes.push(x);
        }
    }
    let sqrt2 = ExactReal::sqrt(2).to_f64();
    let irr = pair_residuals(sg, 1.0, sqrt2, &probes)?;
    let min_irrational_residual = irr.iter().map(|p| p.residual_b).fold(f64::INFINITY, f64::min);
    let e1 = Vector::from_slice(&[1.0, 0.0]);
    let rat = pair_residuals(sg, 1.0, 2.0, std::slice::from_ref(&e1))?;
    let third = Mapping::from_semigroup(sg, &Parameter::new(vec![1.0 / 3.0])?);
    Ok(NecessityReport {
        min_irrational_residual,
        probes: probes.len(),
        rational_pair_residuals: (rat[0].residual_a, rat[0].residual_b),
        moved_residual: third.residual(&e1)?,
    })
}

/// Exact integer `m = max_j([|λ_j|] + 1)` for exact coordinates.
pub fn exact_shift(lambdas: &[ExactReal]) -> BigInt {
    lambdas
        .iter()
        .map(|l| l.floor_abs() + BigInt::from(1))
        .max()
        .unwrap_or_else(BigInt::zero)
}

/// Convenience: `m` as an `f64` for float coordinates.
pub fn float_shift(lambdas: &[f64]) -> f64 {
    exact_shift(&lambdas.iter().map(|&l| ExactReal::from_f64(l)).collect::<Vec<_>>())
        .to_f64()
        .unwrap_or(f64::INFINITY)
}

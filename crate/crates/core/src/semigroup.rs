//! n-parameter semigroups `p ↦ T(p)` on a convex domain, builtin instances
//! with closed-form fixed sets, and sampling checkers for the semigroup law
//! and nonexpansiveness.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{ConvexSet, GeometryError, NormKind, Vector};

/// Membership tolerance for inputs and outputs of [`SemigroupInstance::evaluate`].
pub const DOMAIN_TOL: f64 = 1e-9;

/// Side of the parameter box `[0, PARAM_BOX]^n` sampled by the checkers.
pub const PARAM_BOX: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemigroupError {
    #[error("parameter coordinate {index} is negative ({value})")]
    NegativeParameter { index: usize, value: f64 },
    #[error("parameter coordinate {index} is not finite")]
    NonFiniteParameter { index: usize },
    #[error("parameter has {got} coordinates, instance expects {expected}")]
    ParameterDimension { expected: usize, got: usize },
    #[error("point lies outside the domain")]
    OutOfDomain,
    #[error("point has dimension {got}, instance works in dimension {expected}")]
    PointDimension { expected: usize, got: usize },
    #[error("rate matrix entry mu[{row}][{col}] = {value} must be finite and nonnegative")]
    NegativeRate { row: usize, col: usize, value: f64 },
    #[error("eigenbasis is not orthogonal (max |Q^T Q - I| = {0:e})")]
    NotOrthogonal(f64),
    #[error("malformed instance: {0}")]
    Shape(String),
    #[error("rotation period must be positive and finite, got {0}")]
    BadPeriod(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A point of `R_+^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameter(Vec<f64>);

impl Parameter {
    pub fn new(coords: Vec<f64>) -> Result<Self, SemigroupError> {
        for (index, &value) in coords.iter().enumerate() {
            if !value.is_finite() {
                return Err(SemigroupError::NonFiniteParameter { index });
            }
            if value < 0.0 {
                return Err(SemigroupError::NegativeParameter { index, value });
            }
        }
        // Normalize -0.0 so that formatting is stable.
        Ok(Parameter(coords.into_iter().map(|x| x + 0.0).collect()))
    }

    pub fn zeros(n: usize) -> Self {
        Parameter(vec![0.0; n])
    }

    /// The unit vector `e_j` (zero-based `j`).
    pub fn unit(n: usize, j: usize) -> Self {
        let mut c = vec![0.0; n];
        c[j] = 1.0;
        Parameter(c)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn add(&self, other: &Parameter) -> Parameter {
        assert_eq!(self.len(), other.len(), "parameter dimension mismatch");
        Parameter(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `sum_j c_j * ps[j]`; fails if the result leaves `R_+^n`.
    pub fn combination(coeffs: &[f64], ps: &[Parameter]) -> Result<Parameter, SemigroupError> {
        assert_eq!(coeffs.len(), ps.len(), "one coefficient per parameter");
        let n = ps.first().map_or(0, Parameter::len);
        let mut out = vec![0.0; n];
        for (c, p) in coeffs.iter().zip(ps) {
            for (o, x) in out.iter_mut().zip(&p.0) {
                *o += c * x;
            }
        }
        Parameter::new(out)
    }

    pub fn max_abs_diff(&self, other: &Parameter) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()))
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x:?}")?;
        }
        f.write_str(")")
    }
}

/// An affine subspace `base + span(basis)` with an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSubspace {
    base: Vector,
    basis: Vec<Vector>,
}

impl AffineSubspace {
    /// Panics unless `basis` is orthonormal to 1e-12 and dimensions agree.
    pub fn new(base: Vector, basis: Vec<Vector>) -> Self {
        for (i, u) in basis.iter().enumerate() {
            assert_eq!(u.dim(), base.dim(), "basis vector dimension");
            for (j, w) in basis.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((u.dot(w) - want).abs() <= 1e-12, "basis not orthonormal");
            }
        }
        AffineSubspace { base, basis }
    }

    pub fn point(p: Vector) -> Self {
        AffineSubspace {
            base: p,
            basis: Vec::new(),
        }
    }

    pub fn whole(dim: usize) -> Self {
        AffineSubspace {
            base: Vector::zeros(dim),
            basis: (0..dim).map(|j| Vector::unit(dim, j)).collect(),
        }
    }

    pub fn base(&self) -> &Vector {
        &self.base
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn project(&self, x: &Vector) -> Vector {
        let offset = x - &self.base;
        self.basis
            .iter()
            .fold(self.base.clone(), |acc, u| acc.lincomb(1.0, u, offset.dot(u)))
    }

    pub fn distance(&self, x: &Vector) -> f64 {
        (x - &self.project(x)).euclidean()
    }

    /// `base + sum_i c_i u_i` with `c_i` uniform in `[-radius, radius]`.
    pub fn sample<R: Rng>(&self, rng: &mut R, radius: f64) -> Vector {
        self.basis.iter().fold(self.base.clone(), |acc, u| {
            acc.lincomb(1.0, u, rng.gen_range(-radius..=radius))
        })
    }
}

/// The fixed-point set of a single mapping of a builtin instance, as an
/// affine subspace of the ambient space (to be intersected with the domain).
#[derive(Debug, Clone, PartialEq)]
pub enum FixedSet {
    Empty,
    Affine(AffineSubspace),
}

impl FixedSet {
    pub fn distance(&self, x: &Vector) -> Option<f64> {
        match self {
            FixedSet::Empty => None,
            FixedSet::Affine(a) => Some(a.distance(x)),
        }
    }

    pub fn project(&self, x: &Vector) -> Option<Vector> {
        match self {
            FixedSet::Empty => None,
            FixedSet::Affine(a) => Some(a.project(x)),
        }
    }
}

pub type Evaluator = Arc<dyn Fn(&Parameter, &Vector) -> Vector + Send + Sync>;

#[derive(Clone)]
pub enum Family {
    Identity,
    /// `T(l1 e1 + l2 e2) x = x + l1 - l2` on the real line.
    TranslationCounterexample,
    /// Planar rotation by `2*pi*t/period`.
    Rotation { period: f64 },
    /// `T(p) = Q diag(exp(-sum_j p_j mu[j][i])) Q^T (x - b) + b`.
    MatExp {
        mu: Vec<Vec<f64>>,
        q: Vec<Vec<f64>>,
        b: Vector,
    },
    Custom { label: String, evaluator: Evaluator },
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Identity => f.write_str("Identity"),
            Family::TranslationCounterexample => f.write_str("TranslationCounterexample"),
            Family::Rotation { period } => f.debug_struct("Rotation").field("period", period).finish(),
            Family::MatExp { mu, q, b } => f
                .debug_struct("MatExp")
                .field("mu", mu)
                .field("q", q)
                .field("b", b)
                .finish(),
            Family::Custom { label, .. } => f.debug_struct("Custom").field("label", label).finish(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SemigroupInstance {
    n: usize,
    domain: ConvexSet,
    family: Family,
    norm: NormKind,
    claims_nonexpansive: bool,
    exact_arithmetic_hint: bool,
}

pub fn make_identity(n: usize, dim: usize) -> SemigroupInstance {
    SemigroupInstance {
        n,
        domain: ConvexSet::WholeSpace(dim),
        family: Family::Identity,
        norm: NormKind::Euclidean,
        claims_nonexpansive: true,
        exact_arithmetic_hint: true,
    }
}

pub fn make_translation_counterexample() -> SemigroupInstance {
    SemigroupInstance {
        n: 2,
        domain: ConvexSet::WholeSpace(1),
        family: Family::TranslationCounterexample,
        norm: NormKind::Euclidean,
        claims_nonexpansive: true,
        exact_arithmetic_hint: true,
    }
}

pub fn make_rotation(period: f64) -> Result<SemigroupInstance, SemigroupError> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(SemigroupError::BadPeriod(period));
    }
    Ok(SemigroupInstance {
        n: 1,
        domain: ConvexSet::WholeSpace(2),
        family: Family::Rotation { period },
        norm: NormKind::Euclidean,
        claims_nonexpansive: true,
        exact_arithmetic_hint: false,
    })
}

/// Commuting family of linear contractions toward `b` with shared
/// eigenbasis `q` (columns) and nonnegative decay rates `mu` (`n × d`).
pub fn make_matexp(
    n: usize,
    mu: Vec<Vec<f64>>,
    q: Vec<Vec<f64>>,
    b: Vector,
) -> Result<SemigroupInstance, SemigroupError> {
    let d = b.dim();
    if n == 0 {
        return Err(SemigroupError::Shape("n must be positive".into()));
    }
    if mu.len() != n || mu.iter().any(|row| row.len() != d) {
        return Err(SemigroupError::Shape(format!("mu must be {n} x {d}")));
    }
    for (row, r) in mu.iter().enumerate() {
        for (col, &value) in r.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(SemigroupError::NegativeRate { row, col, value });
            }
        }
    }
    if q.len() != d || q.iter().any(|row| row.len() != d) {
        return Err(SemigroupError::Shape(format!("Q must be {d} x {d}")));
    }
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let dot: f64 = (0..d).map(|k| q[k][i] * q[k][j]).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - want).abs());
        }
    }
    if worst.is_nan() || worst > 1e-10 {
        return Err(SemigroupError::NotOrthogonal(worst));
    }
    Ok(SemigroupInstance {
        n,
        domain: ConvexSet::WholeSpace(d),
        family: Family::MatExp { mu, q, b },
        norm: NormKind::Euclidean,
        claims_nonexpansive: true,
        exact_arithmetic_hint: false,
    })
}

/// The diagonal instance `T(p)x = (e^{-p_1} x_1, ..., e^{-p_n} x_n)`.
pub fn make_diagonal_matexp(n: usize) -> SemigroupInstance {
    let eye: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    make_matexp(n, eye.clone(), eye, Vector::zeros(n)).expect("identity eigenbasis is valid")
}

/// A custom family with no fixed-set oracle.
pub fn make_custom(
    label: impl Into<String>,
    n: usize,
    domain: ConvexSet,
    claims_nonexpansive: bool,
    evaluator: Evaluator,
) -> SemigroupInstance {
    SemigroupInstance {
        n,
        domain,
        family: Family::Custom {
            label: label.into(),
            evaluator,
        },
        norm: NormKind::Euclidean,
        claims_nonexpansive,
        exact_arithmetic_hint: false,
    }
}

/// Test fixture violating the semigroup law: `T(p)x = x + p_1^2`.
pub fn make_broken_square() -> SemigroupInstance {
    make_custom(
        "broken_square",
        1,
        ConvexSet::WholeSpace(1),
        true,
        Arc::new(|p: &Parameter, x: &Vector| {
            let t = p.coords()[0];
            Vector::from_slice(&[x[0] + t * t])
        }),
    )
}

impl SemigroupInstance {
    /// Replaces the domain. The caller is responsible for invariance.
    pub fn with_domain(mut self, domain: ConvexSet) -> Result<Self, SemigroupError> {
        if domain.dim() != self.dim() {
            return Err(SemigroupError::PointDimension {
                expected: self.dim(),
                got: domain.dim(),
            });
        }
        self.domain = domain;
        Ok(self)
    }

    pub fn with_norm(mut self, norm: NormKind) -> Self {
        self.norm = norm;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &ConvexSet {
        &self.domain
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn norm(&self) -> NormKind {
        self.norm
    }

    pub fn claims_nonexpansive(&self) -> bool {
        self.claims_nonexpansive
    }

    pub fn exact_arithmetic_hint(&self) -> bool {
        self.exact_arithmetic_hint
    }

    pub fn label(&self) -> &str {
        match &self.family {
            Family::Identity => "identity",
            Family::TranslationCounterexample => "translation_counterexample",
            Family::Rotation { .. } => "rotation",
            Family::MatExp { .. } => "matexp",
            Family::Custom { label, .. } => label,
        }
    }

    fn check_point(&self, x: &Vector) -> Result<(), SemigroupError> {
        if x.dim() != self.dim() {
            return Err(SemigroupError::PointDimension {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        if !self.domain.contains(x, DOMAIN_TOL) {
            return Err(SemigroupError::OutOfDomain);
        }
        Ok(())
    }

    /// `T(p)x`. Results are projected back onto the domain when roundoff
    /// pushes them outside it.
    pub fn evaluate(&self, p: &Parameter, x: &Vector) -> Result<Vector, SemigroupError> {
        if p.len() != self.n {
            return Err(SemigroupError::ParameterDimension {
                expected: self.n,
                got: p.len(),
            });
        }
        self.check_point(x)?;
        let y = self.apply_unchecked(p, x);
        if !y.is_finite() {
            return Err(SemigroupError::OutOfDomain);
        }
        if self.domain.contains(&y, 0.0) {
            Ok(y)
        } else {
            Ok(self.domain.project(&y))
        }
    }

    /// Convenience wrapper building the [`Parameter`] from raw coordinates.
    pub fn evaluate_at(&self, p: &[f64], x: &Vector) -> Result<Vector, SemigroupError> {
        self.evaluate(&Parameter::new(p.to_vec())?, x)
    }

    fn apply_unchecked(&self, p: &Parameter, x: &Vector) -> Vector {
        let t = p.coords();
        match &self.family {
            Family::Identity => x.clone(),
            Family::TranslationCounterexample => Vector::from_slice(&[x[0] + t[0] - t[1]]),
            Family::Rotation { period } => {
                let angle = TAU * (t[0].rem_euclid(*period) / period);
                let (s, c) = angle.sin_cos();
                Vector::from_slice(&[c * x[0] - s * x[1], s * x[0] + c * x[1]])
            }
            Family::MatExp { mu, q, b } => {
                let d = b.dim();
                let shifted = x - b;
                let mut y = vec![0.0; d];
                for (i, yi) in y.iter_mut().enumerate() {
                    let rate: f64 = (0..self.n).map(|j| t[j] * mu[j][i]).sum();
                    let proj: f64 = (0..d).map(|k| q[k][i] * shifted[k]).sum();
                    *yi = (-rate).exp() * proj;
                }
                let out: Vec<f64> = (0..d)
                    .map(|k| b[k] + (0..d).map(|i| q[k][i] * y[i]).sum::<f64>())
                    .collect();
                Vector::from_slice(&out)
            }
            Family::Custom { evaluator, .. } => evaluator(p, x),
        }
    }

    /// `T(p)^m x`, with `T(p)^0` the identity.
    pub fn power_apply(&self, p: &Parameter, m: u64, x: &Vector) -> Result<Vector, SemigroupError> {
        self.check_point(x)?;
        let mut y = x.clone();
        for _ in 0..m {
            y = self.evaluate(p, &y)?;
        }
        Ok(y)
    }

    /// Closed-form `F(T(p))`, when the family has one.
    pub fn fixed_set(&self, p: &Parameter) -> Option<FixedSet> {
        let t = p.coords();
        let d = self.dim();
        match &self.family {
            Family::Identity => Some(FixedSet::Affine(AffineSubspace::whole(d))),
            Family::TranslationCounterexample => Some(if t[0] == t[1] {
                FixedSet::Affine(AffineSubspace::whole(1))
            } else {
                FixedSet::Empty
            }),
            Family::Rotation { period } => {
                let turns = t[0] / period;
                Some(if (turns - turns.round()).abs() <= 1e-12 * turns.abs().max(1.0) {
                    FixedSet::Affine(AffineSubspace::whole(2))
                } else {
                    FixedSet::Affine(AffineSubspace::point(Vector::zeros(2)))
                })
            }
            Family::MatExp { mu, q, b } => Some(FixedSet::Affine(self.matexp_fixed(mu, q, b, |i| {
                (0..self.n).all(|j| t[j] * mu[j][i] == 0.0)
            }))),
            Family::Custom { .. } => None,
        }
    }

    /// Closed-form common fixed set of the whole family, when known.
    pub fn common_fixed_set(&self) -> Option<FixedSet> {
        let d = self.dim();
        match &self.family {
            Family::Identity => Some(FixedSet::Affine(AffineSubspace::whole(d))),
            Family::TranslationCounterexample => Some(FixedSet::Empty),
            Family::Rotation { .. } => Some(FixedSet::Affine(AffineSubspace::point(Vector::zeros(2)))),
            Family::MatExp { mu, q, b } => Some(FixedSet::Affine(
                self.matexp_fixed(mu, q, b, |i| mu.iter().all(|row| row[i] == 0.0)),
            )),
            Family::Custom { .. } => None,
        }
    }

    fn matexp_fixed(
        &self,
        _mu: &[Vec<f64>],
        q: &[Vec<f64>],
        b: &Vector,
        keep: impl Fn(usize) -> bool,
    ) -> AffineSubspace {
        let d = b.dim();
        let basis: Vec<Vector> = (0..d)
            .filter(|&i| keep(i))
            .map(|i| Vector::from_slice(&(0..d).map(|k| q[k][i]).collect::<Vec<_>>()))
            .collect();
        // Q is orthogonal to 1e-10; re-orthonormalize so the subspace invariant holds at 1e-12.
        AffineSubspace::new(b.clone(), gram_schmidt(basis))
    }
}

fn gram_schmidt(vs: Vec<Vector>) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::with_capacity(vs.len());
    for v in vs {
        let mut w = v;
        for u in &out {
            w = w.lincomb(1.0, u, -w.dot(u));
        }
        let n = w.euclidean();
        out.push(w.scale(1.0 / n));
    }
    out
}

/// Uniform sample of a point of the domain; the whole space is sampled on
/// the cube `[-10, 10]^d`.
pub fn sample_domain<R: Rng>(domain: &ConvexSet, rng: &mut R) -> Vector {
    match domain {
        ConvexSet::WholeSpace(d) => {
            Vector::from_slice(&(0..*d).map(|_| rng.gen_range(-10.0..=10.0)).collect::<Vec<_>>())
        }
        ConvexSet::Ball { center, radius } => loop {
            let u: Vec<f64> = (0..center.dim()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let u = Vector::from_slice(&u);
            if u.euclidean() <= 1.0 {
                break center.lincomb(1.0, &u, *radius);
            }
        },
        ConvexSet::Box { lo, hi } => Vector::from_slice(
            &lo.coords()
                .iter()
                .zip(hi.coords())
                .map(|(a, b)| if a == b { *a } else { rng.gen_range(*a..=*b) })
                .collect::<Vec<_>>(),
        ),
    }
}

pub fn sample_parameter<R: Rng>(n: usize, rng: &mut R) -> Parameter {
    Parameter((0..n).map(|_| rng.gen_range(0.0..=PARAM_BOX)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub check: String,
    pub samples: usize,
    pub tol: f64,
    pub max_violation: f64,
    /// Human-readable description of the worst sample.
    pub worst_sample: Option<String>,
    pub passed: bool,
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} samples, max violation {:.3e} (tol {:.1e}) => {}",
            self.check,
            self.samples,
            self.max_violation,
            self.tol,
            if self.passed { "PASS" } else { "FAIL" }
        )?;
        if let Some(w) = &self.worst_sample {
            write!(f, "; worst at {w}")?;
        }
        Ok(())
    }
}

/// Samples `(p, q, x)` and measures `|T(p+q)x - T(p)T(q)x|`. The unit pairs
/// `p = q = e_j` are always probed first.
pub fn check_semigroup_law(
    sg: &SemigroupInstance,
    sample_count: usize,
    tol: f64,
    seed: u64,
) -> Result<CheckReport, SemigroupError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = sg.n();
    let mut max_violation = 0.0f64;
    let mut worst = None;
    for s in 0..sample_count {
        let (p, q) = if s < n {
            (Parameter::unit(n, s), Parameter::unit(n, s))
        } else {
            (sample_parameter(n, &mut rng), sample_parameter(n, &mut rng))
        };
        let x = sample_domain(sg.domain(), &mut rng);
        let joint = sg.evaluate(&p.add(&q), &x)?;
        let split = sg.evaluate(&p, &sg.evaluate(&q, &x)?)?;
        let violation = joint.distance(&split, sg.norm());
        if violation > max_violation || worst.is_none() {
            max_violation = max_violation.max(violation);
            worst = Some(format!("p={p}, q={q}, x=({x})"));
        }
    }
    Ok(CheckReport {
        check: "semigroup law T(p+q) = T(p)T(q)".into(),
        samples: sample_count,
        tol,
        max_violation,
        worst_sample: worst,
        passed: max_violation <= tol,
    })
}

/// Samples `(p, x, y)` and measures `max(0, |T(p)x - T(p)y| - |x - y|)` in
/// the given norm.
pub fn check_nonexpansive(
    sg: &SemigroupInstance,
    norm: NormKind,
    sample_count: usize,
    tol: f64,
    seed: u64,
) -> Result<CheckReport, SemigroupError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_violation = 0.0f64;
    let mut worst = None;
    for _ in 0..sample_count {
        let p = sample_parameter(sg.n(), &mut rng);
        let x = sample_domain(sg.domain(), &mut rng);
        let y = sample_domain(sg.domain(), &mut rng);
        let before = x.distance(&y, norm);
        let after = sg.evaluate(&p, &x)?.distance(&sg.evaluate(&p, &y)?, norm);
        let violation = (after - before).max(0.0);
        if violation > max_violation || worst.is_none() {
            max_violation = max_violation.max(violation);
            worst = Some(format!("p={p}, x=({x}), y=({y})"));
        }
    }
    Ok(CheckReport {
        check: format!("nonexpansive in {norm} norm"),
        samples: sample_count,
        tol,
        max_violation,
        worst_sample: worst,
        passed: max_violation <= tol,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityDiagnostic {
    pub step: f64,
    /// Largest observed `|T(p + h e_j)x - T(p)x| / h` over the grid.
    pub max_ratio: f64,
}

/// Estimates a Lipschitz-type modulus of `p ↦ T(p)x` on a uniform grid of
/// `[0, 10]^n`. Diagnostic only: continuity cannot be falsified by sampling.
pub fn continuity_modulus(
    sg: &SemigroupInstance,
    x: &Vector,
    step: f64,
    grid: usize,
) -> Result<ContinuityDiagnostic, SemigroupError> {
    let n = sg.n();
    let grid = grid.max(2);
    let mut max_ratio = 0.0f64;
    let total = grid.pow(n as u32);
    for idx in 0..total {
        let mut rem = idx;
        let coords: Vec<f64> = (0..n)
            .map(|_| {
                let i = rem % grid;
                rem /= grid;
                PARAM_BOX * i as f64 / (grid - 1) as f64
            })
            .collect();
        let p = Parameter::new(coords)?;
        let base = sg.evaluate(&p, x)?;
        for j in 0..n {
            let mut shifted = p.coords().to_vec();
            shifted[j] += step;
            let moved = sg.evaluate(&Parameter::new(shifted)?, x)?;
            max_ratio = max_ratio.max(moved.distance(&base, sg.norm()) / step);
        }
    }
    Ok(ContinuityDiagnostic { step, max_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_slice(xs)
    }

    fn close(a: &Vector, b: &Vector, tol: f64) -> bool {
        a.distance(b, NormKind::LInf) <= tol
    }

    #[test]
    fn counterexample_translations() {
        let sg = make_translation_counterexample();
        assert_eq!(sg.evaluate_at(&[1.0, 0.0], &v(&[5.0])).unwrap(), v(&[6.0]));
        assert_eq!(sg.evaluate_at(&[0.0, 1.0], &v(&[5.0])).unwrap(), v(&[4.0]));
        for c in [0.0, 0.5, 3.25, 7.0] {
            assert_eq!(sg.evaluate_at(&[c, c], &v(&[-2.5])).unwrap(), v(&[-2.5]));
        }
        let y = sg
            .evaluate_at(&[std::f64::consts::SQRT_2, 3f64.sqrt()], &v(&[0.0]))
            .unwrap();
        assert!((y[0] - (-0.317837)).abs() < 1e-6);
        assert_eq!(sg.fixed_set(&Parameter::unit(2, 0)), Some(FixedSet::Empty));
        assert!(matches!(
            sg.fixed_set(&Parameter::new(vec![2.0, 2.0]).unwrap()),
            Some(FixedSet::Affine(_))
        ));
    }

    #[test]
    fn rotation_turns() {
        let sg = make_rotation(2.0).unwrap();
        let x = v(&[0.3, -0.7]);
        assert!(close(&sg.evaluate_at(&[2.0], &x).unwrap(), &x, 1e-15));
        assert!(close(&sg.evaluate_at(&[1.0], &v(&[1.0, 0.0])).unwrap(), &v(&[-1.0, 0.0]), 1e-15));
        assert!(close(&sg.evaluate_at(&[0.5], &v(&[1.0, 0.0])).unwrap(), &v(&[0.0, 1.0]), 1e-15));
        let unit = make_rotation(1.0).unwrap();
        assert!(close(&unit.evaluate_at(&[0.25], &v(&[1.0, 0.0])).unwrap(), &v(&[0.0, 1.0]), 1e-15));
        assert!(make_rotation(0.0).is_err());
    }

    #[test]
    fn matexp_diagonal() {
        let sg = make_diagonal_matexp(2);
        let y = sg.evaluate(&Parameter::unit(2, 0), &v(&[2.0, 3.0])).unwrap();
        assert!(close(&y, &v(&[2.0 * (-1f64).exp(), 3.0]), 1e-15));
        let x = v(&[0.4, -1.2]);
        assert_eq!(sg.evaluate(&Parameter::zeros(2), &x).unwrap(), x);
        let origin = Vector::zeros(2);
        assert_eq!(sg.evaluate_at(&[3.0, 0.2], &origin).unwrap(), origin);
        // F(T(e_1)) = {x_1 = 0}: the line spanned by e_2.
        let f = sg.fixed_set(&Parameter::unit(2, 0)).unwrap();
        assert_eq!(f, FixedSet::Affine(AffineSubspace::new(Vector::zeros(2), vec![v(&[0.0, 1.0])])));
        assert_eq!(f.distance(&v(&[0.25, 9.0])), Some(0.25));
    }

    #[test]
    fn matexp_rejects_bad_input() {
        let b = Vector::zeros(2);
        let eye = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(matches!(
            make_matexp(1, vec![vec![-1.0, 0.0]], eye.clone(), b.clone()),
            Err(SemigroupError::NegativeRate { .. })
        ));
        assert!(matches!(
            make_matexp(1, vec![vec![1.0, 0.0]], vec![vec![1.0, 1.0], vec![0.0, 1.0]], b.clone()),
            Err(SemigroupError::NotOrthogonal(_))
        ));
        assert!(matches!(
            make_matexp(2, vec![vec![1.0, 0.0]], eye, b),
            Err(SemigroupError::Shape(_))
        ));
    }

    #[test]
    fn evaluate_validates() {
        let sg = make_diagonal_matexp(2);
        assert!(matches!(
            sg.evaluate_at(&[-1.0, 0.0], &Vector::zeros(2)),
            Err(SemigroupError::NegativeParameter { index: 0, .. })
        ));
        assert!(matches!(
            sg.evaluate_at(&[1.0], &Vector::zeros(2)),
            Err(SemigroupError::ParameterDimension { .. })
        ));
        let ball = make_rotation(1.0).unwrap().with_domain(ConvexSet::unit_ball(2)).unwrap();
        assert_eq!(ball.evaluate_at(&[0.1], &v(&[2.0, 0.0])), Err(SemigroupError::OutOfDomain));
        let identity = make_identity(3, 2);
        assert_eq!(identity.evaluate_at(&[1.0, 2.0, 3.0], &v(&[4.0, 5.0])).unwrap(), v(&[4.0, 5.0]));
    }

    #[test]
    fn powers() {
        let ce = make_translation_counterexample();
        let x = v(&[0.0]);
        assert_eq!(ce.power_apply(&Parameter::unit(2, 0), 0, &x).unwrap(), x);
        assert_eq!(ce.power_apply(&Parameter::unit(2, 0), 3, &x).unwrap(), v(&[3.0]));
        let scalar = make_diagonal_matexp(1);
        let y = scalar.power_apply(&Parameter::unit(1, 0), 2, &v(&[1.0])).unwrap();
        assert!((y[0] - (-2f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn builtins_satisfy_the_laws() {
        let instances = [
            make_identity(2, 3),
            make_translation_counterexample(),
            make_rotation(1.0).unwrap(),
            make_diagonal_matexp(2),
        ];
        for sg in &instances {
            let law = check_semigroup_law(sg, 1000, 1e-9, 11).unwrap();
            assert!(law.passed, "{}: {law}", sg.label());
            let ne = check_nonexpansive(sg, NormKind::Euclidean, 1000, 1e-9, 12).unwrap();
            assert!(ne.passed, "{}: {ne}", sg.label());
        }
    }

    #[test]
    fn broken_family_detected_at_unit_parameters() {
        let report = check_semigroup_law(&make_broken_square(), 10, 1e-9, 0).unwrap();
        assert!(!report.passed);
        assert!(report.max_violation > 1.0);
        // The first probe is p = q = e_1, where (1+1)^2 - 1 - 1 = 2.
        let single = check_semigroup_law(&make_broken_square(), 1, 1e-9, 0).unwrap();
        assert!((single.max_violation - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_is_not_l1_nonexpansive() {
        let sg = make_rotation(1.0).unwrap();
        let report = check_nonexpansive(&sg, NormKind::L1, 1000, 1e-9, 3).unwrap();
        assert!(!report.passed);
        // Direct witness: 45 degrees takes (1,0) to an L1 norm of sqrt(2).
        let y = sg.evaluate_at(&[0.125], &v(&[1.0, 0.0])).unwrap();
        assert!((crate::geometry::norm(&y, NormKind::L1) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn continuity_diagnostic_is_finite() {
        let sg = make_rotation(1.0).unwrap();
        let diag = continuity_modulus(&sg, &v(&[1.0, 0.0]), 1e-6, 5).unwrap();
        // |d/dt R(2 pi t) x| = 2 pi |x|.
        assert!((diag.max_ratio - TAU).abs() < 1e-4);
    }
}

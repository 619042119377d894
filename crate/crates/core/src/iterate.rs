//! Iteration schemes converging to common fixed points.
//!
//! Every scheme is deterministic and returns a [`ConvergenceTrace`]. When the
//! mapping carries a closed-form fixed set, the trace also records the
//! distance of each iterate to it (or to the projection of the anchor `u`,
//! for Halpern).
//!
//! Products of mappings follow one convention throughout: `A_1 A_2 ... A_m`
//! means `A_1 ∘ A_2 ∘ ... ∘ A_m`, so `A_m` is applied first.

use std::fmt::Write as _;

use thiserror::Error;

use crate::fixedsets::{FixedSetError, Mapping, ParameterBasis};
use crate::geometry::Vector;
use crate::semigroup::{FixedSet, Parameter, SemigroupError, SemigroupInstance};

/// Traces longer than this are thinned.
pub const TRACE_ROWS: u64 = 1000;
/// Default cap on map applications for the mean and word schemes.
pub const DEFAULT_APPLICATION_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IterateError {
    #[error("iteration count must be at least 1")]
    ZeroIterations,
    #[error("s = {0} is outside (0, 1)")]
    SNotInUnitInterval(f64),
    #[error("no convergence after {max_iter} iterations (last step {last_step:e})")]
    NoConvergence { max_iter: u64, last_step: f64 },
    #[error("bad schedule: {0}")]
    BadSchedule(String),
    #[error("{needed} map applications exceed the cap of {cap}")]
    BudgetExceeded { needed: u64, cap: u64 },
    #[error("word of {needed} symbols exceeds the cap of {cap}")]
    WordBudgetExceeded { needed: u64, cap: u64 },
    #[error("the domain must be bounded")]
    DomainNotCompact,
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    FixedSet(#[from] FixedSetError),
}

/// What the trace measures distance to.
#[derive(Debug, Clone, PartialEq)]
pub enum Oracle {
    Set(FixedSet),
    Point(Vector),
}

impl Oracle {
    pub fn distance(&self, x: &Vector) -> Option<f64> {
        match self {
            Oracle::Set(f) => f.distance(x),
            Oracle::Point(p) => Some(x.distance(p, crate::geometry::NormKind::Euclidean)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_iter: u64,
    /// Map applications actually performed by the scheme.
    pub max_map_applications: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    pub scheme: String,
    /// Iteration index of each stored row.
    pub ks: Vec<u64>,
    pub iterates: Vec<Vector>,
    pub residuals: Vec<f64>,
    pub oracle_dist: Option<Vec<f64>>,
    pub budget: Budget,
}

impl ConvergenceTrace {
    pub fn len(&self) -> usize {
        self.ks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ks.is_empty()
    }

    pub fn last_iterate(&self) -> &Vector {
        self.iterates.last().expect("traces are never empty")
    }

    pub fn last_residual(&self) -> f64 {
        *self.residuals.last().expect("traces are never empty")
    }

    pub fn last_oracle_dist(&self) -> Option<f64> {
        self.oracle_dist.as_ref().and_then(|d| d.last().copied())
    }

    /// `k,residual,oracle_dist,x_0,...,x_{d-1}`; missing oracle distances
    /// are left empty.
    pub fn to_csv(&self) -> String {
        let d = self.iterates.first().map_or(0, Vector::dim);
        let mut out = String::from("k,residual,oracle_dist");
        for i in 0..d {
            write!(out, ",x_{i}").unwrap();
        }
        out.push('\n');
        for (row, k) in self.ks.iter().enumerate() {
            write!(out, "{k},{:e},", self.residuals[row]).unwrap();
            if let Some(dist) = &self.oracle_dist {
                write!(out, "{:e}", dist[row]).unwrap();
            }
            for x in self.iterates[row].coords() {
                write!(out, ",{x:e}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Row stride for a run of `k_total` iterations.
pub fn stride_for(k_total: u64) -> u64 {
    if k_total <= TRACE_ROWS {
        1
    } else {
        k_total.div_ceil(TRACE_ROWS)
    }
}

struct Recorder {
    trace: ConvergenceTrace,
    oracle: Option<Oracle>,
    stride: u64,
    first: u64,
    last: u64,
}

impl Recorder {
    fn new(scheme: &str, oracle: Option<Oracle>, first: u64, last: u64) -> Self {
        let oracle_dist = oracle.as_ref().map(|_| Vec::new());
        Recorder {
            trace: ConvergenceTrace {
                scheme: scheme.to_string(),
                ks: Vec::new(),
                iterates: Vec::new(),
                residuals: Vec::new(),
                oracle_dist,
                budget: Budget {
                    max_iter: last - first + 1,
                    max_map_applications: 0,
                },
            },
            oracle,
            stride: stride_for(last - first + 1),
            first,
            last,
        }
    }

    fn wants(&self, k: u64) -> bool {
        k == self.last || (k - self.first).is_multiple_of(self.stride)
    }

    fn record(&mut self, k: u64, x: &Vector, residual: f64) {
        self.trace.ks.push(k);
        self.trace.iterates.push(x.clone());
        self.trace.residuals.push(residual);
        if let (Some(o), Some(d)) = (&self.oracle, &mut self.trace.oracle_dist) {
            d.push(o.distance(x).unwrap_or(f64::NAN));
        }
    }

    fn finish(mut self, applications: u64) -> ConvergenceTrace {
        self.trace.budget.max_map_applications = applications;
        self.trace
    }
}

fn set_oracle(s: &Mapping) -> Option<Oracle> {
    match s.fixed_set() {
        Some(f @ FixedSet::Affine(_)) => Some(Oracle::Set(f.clone())),
        _ => None,
    }
}

/// Cesàro means `x_k = (Sx + S²x + ... + S^k x) / k` for `k = 1..K`.
pub fn run_cesaro(s: &Mapping, x: &Vector, k_total: u64) -> Result<ConvergenceTrace, IterateError> {
    if k_total == 0 {
        return Err(IterateError::ZeroIterations);
    }
    let mut rec = Recorder::new("cesaro", set_oracle(s), 1, k_total);
    let mut power = x.clone();
    let mut mean = Vector::zeros(x.dim());
    let mut applications = 0;
    for k in 1..=k_total {
        power = s.apply(&power)?;
        applications += 1;
        mean = mean.lincomb(1.0 - 1.0 / k as f64, &power, 1.0 / k as f64);
        if rec.wants(k) {
            let r = s.residual(&mean)?;
            applications += 1;
            rec.record(k, &mean, r);
        }
    }
    Ok(rec.finish(applications))
}

/// Half-averaged iteration `y_{k+1} = ½ S y_k + ½ y_k`, recording `y_1..y_K`.
pub fn run_km(s: &Mapping, y1: &Vector, k_total: u64) -> Result<ConvergenceTrace, IterateError> {
    if k_total == 0 {
        return Err(IterateError::ZeroIterations);
    }
    let mut rec = Recorder::new("km", set_oracle(s), 1, k_total);
    let mut y = y1.clone();
    let mut applications = 0;
    for k in 1..=k_total {
        let sy = s.apply(&y)?;
        applications += 1;
        if rec.wants(k) {
            rec.record(k, &y, sy.distance(&y, s.norm()));
        }
        y = y.lincomb(0.5, &sy, 0.5);
    }
    Ok(rec.finish(applications))
}

/// The solution of `x = (1 - s) S x + s u`, by Picard iteration from `u`.
pub fn solve_browder(s_map: &Mapping, u: &Vector, s: f64, tol: f64, max_iter: u64) -> Result<Vector, IterateError> {
    solve_browder_from(s_map, u, s, u, tol, max_iter).map(|(x, _)| x)
}

fn solve_browder_from(
    s_map: &Mapping,
    u: &Vector,
    s: f64,
    start: &Vector,
    tol: f64,
    max_iter: u64,
) -> Result<(Vector, u64), IterateError> {
    if !(s > 0.0 && s < 1.0) {
        return Err(IterateError::SNotInUnitInterval(s));
    }
    let mut z = start.clone();
    let mut step = f64::INFINITY;
    for it in 1..=max_iter {
        let next = s_map.apply(&z)?.lincomb(1.0 - s, u, s);
        step = next.distance(&z, s_map.norm());
        z = next;
        if step <= tol {
            return Ok((z, it));
        }
    }
    Err(IterateError::NoConvergence {
        max_iter,
        last_step: step,
    })
}

/// Solves the implicit problem for each `s_k` in turn, warm-starting from
/// the previous solution. Row `k` holds `x(s_k)`.
pub fn browder_sweep(
    s_map: &Mapping,
    u: &Vector,
    s_values: &[f64],
    tol: f64,
    max_iter: u64,
) -> Result<ConvergenceTrace, IterateError> {
    if s_values.is_empty() {
        return Err(IterateError::ZeroIterations);
    }
    let k_total = s_values.len() as u64;
    let mut rec = Recorder::new("browder", set_oracle(s_map), 1, k_total);
    let mut x = u.clone();
    let mut applications = 0;
    for (k, &s) in (1..).zip(s_values) {
        let (next, used) = solve_browder_from(s_map, u, s, &x, tol, max_iter)?;
        applications += used;
        x = next;
        if rec.wants(k) {
            let r = s_map.residual(&x)?;
            applications += 1;
            rec.record(k, &x, r);
        }
    }
    Ok(rec.finish(applications))
}

/// Anchor weights `t_k`, indexed from `k = 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    /// `t_k = 1/(k+1)`.
    Reciprocal,
    /// `t_k = (k+1)^{-γ}`, `0 < γ ≤ 1`.
    PowerLaw(f64),
    Custom(Vec<f64>),
}

impl Schedule {
    pub fn value(&self, k: u64) -> f64 {
        match self {
            Schedule::Reciprocal => 1.0 / (k + 1) as f64,
            Schedule::PowerLaw(g) => ((k + 1) as f64).powf(-g),
            Schedule::Custom(ts) => ts[(k - 1) as usize],
        }
    }

    /// Checks `t_k ∈ (0,1)` for `k ≤ K`, that the partial sums keep pace
    /// with half of the reciprocal schedule, and that the total variation
    /// stays below 1.
    pub fn validate(&self, k_total: u64) -> Result<(), IterateError> {
        match self {
            Schedule::PowerLaw(g) if !(*g > 0.0 && *g <= 1.0) => {
                return Err(IterateError::BadSchedule(format!("exponent {g} outside (0, 1]")));
            }
            Schedule::Custom(ts) if (ts.len() as u64) < k_total => {
                return Err(IterateError::BadSchedule(format!(
                    "{} values given, {k_total} needed",
                    ts.len()
                )));
            }
            _ => {}
        }
        let mut sum = 0.0;
        let mut reference = 0.0;
        let mut variation = 0.0;
        let mut prev: Option<f64> = None;
        for k in 1..=k_total {
            let t = self.value(k);
            if !(t > 0.0 && t < 1.0) {
                return Err(IterateError::BadSchedule(format!("t_{k} = {t} outside (0, 1)")));
            }
            sum += t;
            reference += 1.0 / (k + 1) as f64;
            if let Some(p) = prev {
                variation += (t - p).abs();
            }
            prev = Some(t);
        }
        if sum < 0.5 * reference {
            return Err(IterateError::BadSchedule(format!(
                "partial sum {sum} decays too fast for a divergent series"
            )));
        }
        if variation > 1.0 {
            return Err(IterateError::BadSchedule(format!("total variation {variation} exceeds 1")));
        }
        Ok(())
    }
}

/// Anchored iteration `y_{k+1} = (1 - t_k) S y_k + t_k u`, recording
/// `y_1..y_K`. The oracle is the projection of `u` onto the fixed set.
pub fn run_halpern(
    s: &Mapping,
    u: &Vector,
    y1: &Vector,
    sched: &Schedule,
    k_total: u64,
) -> Result<ConvergenceTrace, IterateError> {
    if k_total == 0 {
        return Err(IterateError::ZeroIterations);
    }
    sched.validate(k_total)?;
    let oracle = match s.fixed_set() {
        Some(f) => f.project(u).map(Oracle::Point),
        None => None,
    };
    let mut rec = Recorder::new("halpern", oracle, 1, k_total);
    let mut y = y1.clone();
    let mut applications = 0;
    for k in 1..=k_total {
        let sy = s.apply(&y)?;
        applications += 1;
        if rec.wants(k) {
            rec.record(k, &y, sy.distance(&y, s.norm()));
        }
        let t = sched.value(k);
        y = sy.lincomb(1.0 - t, u, t);
    }
    Ok(rec.finish(applications))
}

/// Map applications needed by [`run_rode`] at `k` with `n + 1` parameters.
pub fn rode_applications(n: usize, k: u64) -> Option<u64> {
    let mut total = 0u64;
    let mut level = 1u64;
    for _ in 0..=n {
        level = level.checked_mul(k)?;
        total = total.checked_add(level)?;
    }
    Some(total)
}

/// `k^{-(n+1)} Σ T(Σ_j ν_j p_j) x` over `ν ∈ {1..k}^{n+1}`.
///
/// The grid is walked as a prefix tree, `ν_n` outermost, so each node costs
/// one application of some `T(p_j)`.
pub fn run_rode(sg: &SemigroupInstance, basis: &ParameterBasis, x: &Vector, k: u64) -> Result<Vector, IterateError> {
    run_rode_capped(sg, basis, x, k, DEFAULT_APPLICATION_CAP)
}

pub fn run_rode_capped(
    sg: &SemigroupInstance,
    basis: &ParameterBasis,
    x: &Vector,
    k: u64,
    cap: u64,
) -> Result<Vector, IterateError> {
    if k == 0 {
        return Err(IterateError::ZeroIterations);
    }
    if basis.n() != sg.n() {
        return Err(FixedSetError::Shape(format!(
            "basis is {}-dimensional, semigroup has {} parameters",
            basis.n(),
            sg.n()
        ))
        .into());
    }
    let n = basis.n();
    let needed = rode_applications(n, k).unwrap_or(u64::MAX);
    if needed > cap {
        return Err(IterateError::BudgetExceeded { needed, cap });
    }
    let params = basis.all_parameters();
    let mut sum = Vector::zeros(x.dim());
    rode_walk(sg, &params, n, x, k, &mut sum)?;
    let count = (k as f64).powi(n as i32 + 1);
    Ok(sum.scale(1.0 / count))
}

fn rode_walk(
    sg: &SemigroupInstance,
    params: &[Parameter],
    level: usize,
    x: &Vector,
    k: u64,
    sum: &mut Vector,
) -> Result<(), SemigroupError> {
    let mut y = x.clone();
    for _ in 0..k {
        y = sg.evaluate(&params[level], &y)?;
        if level == 0 {
            *sum = sum.lincomb(1.0, &y, 1.0);
        } else {
            rode_walk(sg, params, level - 1, &y, k, sum)?;
        }
    }
    Ok(())
}

/// Residual `max_j ‖T(p_j) x - x‖` over `p_0..p_n`.
pub fn basis_residual(sg: &SemigroupInstance, basis: &ParameterBasis, x: &Vector) -> Result<f64, SemigroupError> {
    let mut worst = 0.0f64;
    for p in basis.all_parameters() {
        worst = worst.max(sg.evaluate(&p, x)?.distance(x, sg.norm()));
    }
    Ok(worst)
}

/// Rodé means for `k = 1..K`, each computed from scratch.
pub fn run_rode_trace(
    sg: &SemigroupInstance,
    basis: &ParameterBasis,
    x: &Vector,
    k_total: u64,
) -> Result<ConvergenceTrace, IterateError> {
    if k_total == 0 {
        return Err(IterateError::ZeroIterations);
    }
    let mut needed = 0u64;
    for k in 1..=k_total {
        needed = needed.saturating_add(rode_applications(basis.n(), k).unwrap_or(u64::MAX));
    }
    if needed > DEFAULT_APPLICATION_CAP {
        return Err(IterateError::BudgetExceeded {
            needed,
            cap: DEFAULT_APPLICATION_CAP,
        });
    }
    let oracle = match sg.common_fixed_set() {
        Some(f @ FixedSet::Affine(_)) => Some(Oracle::Set(f)),
        _ => None,
    };
    let mut rec = Recorder::new("rode", oracle, 1, k_total);
    for k in 1..=k_total {
        if rec.wants(k) {
            let xk = run_rode(sg, basis, x, k)?;
            let r = basis_residual(sg, basis, &xk)?;
            rec.record(k, &xk, r);
        }
    }
    Ok(rec.finish(needed))
}

/// Length of `W_n(k)`, or `None` on overflow.
pub fn ishikawa_word_len(n: usize, k: u64) -> Option<u64> {
    // len[i] = |W_j(i)| for the current level j, i = 1..k.
    let mut len: Vec<u64> = (0..=k).collect();
    for _ in 1..=n {
        let mut next = vec![0u64; len.len()];
        for i in 1..len.len() {
            next[i] = next[i - 1].checked_add(1)?.checked_add(len[i])?;
        }
        len = next;
    }
    Some(len[k as usize])
}

/// The word `W_n(k)`, listed outermost first: `W_0(m) = 0^m` and
/// `W_j(m) = (j W_{j-1}(1)) (j W_{j-1}(2)) ... (j W_{j-1}(m))`.
pub fn ishikawa_word(n: usize, k: u64) -> Result<Vec<usize>, IterateError> {
    ishikawa_word_capped(n, k, DEFAULT_APPLICATION_CAP)
}

pub fn ishikawa_word_capped(n: usize, k: u64, cap: u64) -> Result<Vec<usize>, IterateError> {
    if k == 0 {
        return Err(IterateError::ZeroIterations);
    }
    let needed = ishikawa_word_len(n, k).unwrap_or(u64::MAX);
    if needed > cap {
        return Err(IterateError::WordBudgetExceeded { needed, cap });
    }
    let mut out = Vec::with_capacity(needed as usize);
    push_word(n, k, &mut out);
    Ok(out)
}

fn push_word(j: usize, m: u64, out: &mut Vec<usize>) {
    if j == 0 {
        out.extend(std::iter::repeat_n(0, m as usize));
        return;
    }
    for i in 1..=m {
        out.push(j);
        push_word(j - 1, i, out);
    }
}

/// Applies a word to `x`, rightmost symbol first.
pub fn apply_word(maps: &[Mapping], word: &[usize], x: &Vector) -> Result<Vector, SemigroupError> {
    word.iter().rev().try_fold(x.clone(), |y, &j| maps[j].apply(&y))
}

/// Total word symbols applied by [`run_ishikawa`] for `k = 1..K`.
pub fn ishikawa_applications(n: usize, k_total: u64) -> Option<u64> {
    (1..=k_total).try_fold(0u64, |acc, k| acc.checked_add(ishikawa_word_len(n, k)?))
}

/// The averaged mappings `S_j = ½ T(p_j) + ½ I`, `j = 0..n`.
pub fn averaged_maps(sg: &SemigroupInstance, basis: &ParameterBasis) -> Vec<Mapping> {
    basis
        .all_parameters()
        .iter()
        .map(|p| Mapping::from_semigroup(sg, p).averaged(0.5))
        .collect()
}

/// Nested products `x_{k+1} = W_n(k) x_1` of the averaged mappings, for
/// `k = 1..K`; row `k` holds `x_k`, starting from `x_1`. Requires a
/// bounded domain.
pub fn run_ishikawa(
    sg: &SemigroupInstance,
    basis: &ParameterBasis,
    x1: &Vector,
    k_total: u64,
) -> Result<ConvergenceTrace, IterateError> {
    if k_total == 0 {
        return Err(IterateError::ZeroIterations);
    }
    if !sg.domain().is_bounded() {
        return Err(IterateError::DomainNotCompact);
    }
    let n = basis.n();
    let needed = ishikawa_applications(n, k_total).unwrap_or(u64::MAX);
    if needed > DEFAULT_APPLICATION_CAP {
        return Err(IterateError::WordBudgetExceeded {
            needed,
            cap: DEFAULT_APPLICATION_CAP,
        });
    }
    let maps = averaged_maps(sg, basis);
    let oracle = match sg.common_fixed_set() {
        Some(f @ FixedSet::Affine(_)) => Some(Oracle::Set(f)),
        _ => None,
    };
    let residual = |x: &Vector| -> Result<f64, SemigroupError> {
        maps.iter().try_fold(0.0f64, |m, s| Ok(m.max(s.residual(x)?)))
    };
    let mut rec = Recorder::new("ishikawa", oracle, 1, k_total + 1);
    rec.record(1, x1, residual(x1)?);
    let mut word = Vec::new();
    for k in 1..=k_total {
        // W_n(k) = W_n(k-1) (n W_{n-1}(k))
        if n == 0 {
            word.push(0);
        } else {
            word.push(n);
            push_word(n - 1, k, &mut word);
        }
        if rec.wants(k + 1) {
            let x = apply_word(&maps, &word, x1)?;
            rec.record(k + 1, &x, residual(&x)?);
        }
    }
    Ok(rec.finish(needed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixedsets::{combined_map, make_basis_f64, prime_root_basis};
    use crate::geometry::{ConvexSet, NormKind};
    use crate::semigroup::{make_diagonal_matexp, make_identity, make_matexp, make_rotation};

    fn v(xs: &[f64]) -> Vector {
        Vector::from_slice(xs)
    }

    fn matexp_s() -> Mapping {
        combined_map(&make_diagonal_matexp(2), &prime_root_basis(2), &[1.0 / 3.0; 3]).unwrap()
    }

    fn scalar_basis() -> ParameterBasis {
        make_basis_f64(vec![Parameter::unit(1, 0)], vec!["sqrt(2)".parse().unwrap()]).unwrap()
    }

    #[test]
    fn cesaro_closed_forms() {
        let id = Mapping::identity(ConvexSet::WholeSpace(2));
        let t = run_cesaro(&id, &v(&[1.0, 2.0]), 5).unwrap();
        assert!(t.iterates.iter().all(|x| *x == v(&[1.0, 2.0])));
        assert!(t.residuals.iter().all(|&r| r == 0.0));

        let half = Mapping::scaling(1, 0.5);
        let t = run_cesaro(&half, &v(&[1.0]), 30).unwrap();
        for (k, x) in t.ks.iter().zip(&t.iterates) {
            let want = (1.0 - 0.5f64.powi(*k as i32)) / *k as f64;
            assert!((x[0] - want).abs() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn cesaro_matches_direct_sum() {
        let s = matexp_s();
        let x = v(&[1.0, -2.0]);
        let t = run_cesaro(&s, &x, 50).unwrap();
        for &k in &[1u64, 7, 50] {
            let mut p = x.clone();
            let mut sum = Vector::zeros(2);
            for _ in 0..k {
                p = s.apply(&p).unwrap();
                sum = &sum + &p;
            }
            let direct = sum.scale(1.0 / k as f64);
            assert!(t.iterates[(k - 1) as usize].distance(&direct, NormKind::LInf) < 1e-10);
        }
    }

    #[test]
    fn km_closed_forms() {
        let half = Mapping::scaling(1, 0.5);
        let t = run_km(&half, &v(&[1.0]), 40).unwrap();
        for (k, x) in t.ks.iter().zip(&t.iterates) {
            assert!((x[0] - 0.75f64.powi(*k as i32 - 1)).abs() < 1e-15);
        }
        let t = run_km(&matexp_s(), &v(&[1.0, 1.0]), 60).unwrap();
        let a = [
            ((-2f64.sqrt()).exp() + (-1f64).exp() + 1.0) / 3.0,
            ((-3f64.sqrt()).exp() + 1.0 + (-1f64).exp()) / 3.0,
        ];
        for (i, ai) in a.iter().enumerate() {
            let observed = t.iterates[59][i] / t.iterates[58][i];
            assert!((observed - (1.0 + ai) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn browder_closed_form() {
        let half = Mapping::scaling(1, 0.5);
        for &s in &[0.5, 0.1, 0.01] {
            let x = solve_browder(&half, &v(&[1.0]), s, 1e-14, 10_000).unwrap();
            let want = s / (1.0 - (1.0 - s) * 0.5);
            assert!((x[0] - want).abs() < 1e-12);
        }
        let id = Mapping::identity(ConvexSet::WholeSpace(2));
        let x = solve_browder(&id, &v(&[3.0, 4.0]), 0.3, 1e-12, 100).unwrap();
        assert!(x.distance(&v(&[3.0, 4.0]), NormKind::LInf) < 1e-14);
        assert_eq!(
            solve_browder(&id, &v(&[3.0, 4.0]), 1.0, 1e-12, 100),
            Err(IterateError::SNotInUnitInterval(1.0))
        );
        let expanding = Mapping::scaling(1, 3.0);
        assert!(matches!(
            solve_browder(&expanding, &v(&[1.0]), 0.1, 1e-12, 100),
            Err(IterateError::NoConvergence { .. })
        ));
    }

    #[test]
    fn browder_sweep_tracks_fixed_set() {
        let s_values: Vec<f64> = (1..=20).map(|k| 1.0 / (k + 1) as f64).collect();
        let t = browder_sweep(&matexp_s(), &v(&[1.0, 1.0]), &s_values, 1e-13, 10_000).unwrap();
        assert_eq!(t.len(), 20);
        let d = t.oracle_dist.unwrap();
        assert!(d.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn halpern_examples() {
        let id = Mapping::identity(ConvexSet::WholeSpace(1));
        let t = run_halpern(&id, &v(&[2.0]), &v(&[0.0]), &Schedule::Reciprocal, 100).unwrap();
        // y_{k+1} - u = (1 - t_k)(y_k - u) telescopes to -2/(k+1).
        let last = t.last_iterate()[0];
        assert!((last - (2.0 - 2.0 / 100.0)).abs() < 1e-12);
        let d = t.oracle_dist.unwrap();
        assert!((d[99] - 2.0 / 100.0).abs() < 1e-12);

        let variation: f64 = (1..=1000u64)
            .map(|k| (Schedule::Reciprocal.value(k + 1) - Schedule::Reciprocal.value(k)).abs())
            .sum();
        assert!((variation - (0.5 - 1.0 / 1002.0)).abs() < 1e-12);
    }

    #[test]
    fn schedules_are_validated() {
        assert!(Schedule::Reciprocal.validate(100_000).is_ok());
        assert!(Schedule::PowerLaw(0.5).validate(1000).is_ok());
        assert!(Schedule::PowerLaw(1.5).validate(10).is_err());
        assert!(Schedule::Custom(vec![0.5; 3]).validate(4).is_err());
        assert!(Schedule::Custom(vec![0.5, 1.0]).validate(2).is_err());
        let fast: Vec<f64> = (1..=1000).map(|k| 1.0 / ((k + 1) as f64).powi(2)).collect();
        assert!(Schedule::Custom(fast).validate(1000).is_err());
    }

    #[test]
    fn fixed_point_start_gives_constant_traces() {
        let s = matexp_s();
        let z = Vector::zeros(2);
        for t in [
            run_cesaro(&s, &z, 20).unwrap(),
            run_km(&s, &z, 20).unwrap(),
            run_halpern(&s, &z, &z, &Schedule::Reciprocal, 20).unwrap(),
        ] {
            assert!(t.iterates.iter().all(|x| x.distance(&z, NormKind::LInf) <= 1e-10), "{}", t.scheme);
        }
    }

    #[test]
    fn thinning_keeps_first_and_last() {
        assert_eq!(stride_for(1000), 1);
        assert_eq!(stride_for(1001), 2);
        let t = run_km(&Mapping::scaling(1, 0.5), &v(&[1.0]), 2501).unwrap();
        assert_eq!(t.ks[0], 1);
        assert_eq!(*t.ks.last().unwrap(), 2501);
        assert_eq!(t.ks[1], 4);
        assert!(t.len() <= 1001);
    }

    #[test]
    fn csv_shape() {
        let t = run_km(&matexp_s(), &v(&[1.0, 1.0]), 3).unwrap();
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k,residual,oracle_dist,x_0,x_1");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("1,"));
        assert_eq!(lines[1].split(',').count(), 5);
    }

    #[test]
    fn rode_scalar_hand_computed() {
        let sg = make_matexp(1, vec![vec![1.0]], vec![vec![1.0]], v(&[0.0])).unwrap();
        let x = run_rode(&sg, &scalar_basis(), &v(&[1.0]), 2).unwrap();
        let r2 = 2f64.sqrt();
        let want = ((-(r2 + 1.0)).exp() + (-(r2 + 2.0)).exp() + (-(2.0 * r2 + 1.0)).exp() + (-(2.0 * r2 + 2.0)).exp())
            / 4.0;
        assert!((x[0] - want).abs() < 1e-12);
    }

    #[test]
    fn rode_matches_naive_grid() {
        let cases: Vec<(SemigroupInstance, ParameterBasis, Vector)> = vec![
            (make_identity(2, 2), prime_root_basis(2), v(&[1.0, -1.0])),
            (make_diagonal_matexp(2), prime_root_basis(2), v(&[1.0, 2.0])),
            (make_rotation(1.0).unwrap(), scalar_basis(), v(&[0.3, 0.7])),
        ];
        for (sg, basis, x) in cases {
            for k in 1..=5u64 {
                let tree = run_rode(&sg, &basis, &x, k).unwrap();
                let n = basis.n();
                let mut sum = Vector::zeros(x.dim());
                let total = k.pow(n as u32 + 1);
                for idx in 0..total {
                    let mut rem = idx;
                    let nu: Vec<f64> = (0..=n)
                        .map(|_| {
                            let d = rem % k;
                            rem /= k;
                            (d + 1) as f64
                        })
                        .collect();
                    let p0 = basis.p0().coords();
                    let coords: Vec<f64> = (0..n)
                        .map(|i| nu[0] * p0[i] + (0..n).map(|j| nu[j + 1] * basis.ps()[j].coords()[i]).sum::<f64>())
                        .collect();
                    sum = &sum + &sg.evaluate_at(&coords, &x).unwrap();
                }
                let naive = sum.scale(1.0 / total as f64);
                assert!(tree.distance(&naive, NormKind::LInf) < 1e-12, "{} k={k}", sg.label());
            }
        }
    }

    #[test]
    fn rode_budget() {
        assert_eq!(rode_applications(1, 2), Some(6));
        assert!(matches!(
            run_rode_capped(&make_identity(2, 1), &prime_root_basis(2), &v(&[0.0]), 10, 100),
            Err(IterateError::BudgetExceeded { needed: 1110, cap: 100 })
        ));
    }

    #[test]
    fn word_examples() {
        assert_eq!(ishikawa_word(0, 3).unwrap(), vec![0, 0, 0]);
        assert_eq!(ishikawa_word(1, 1).unwrap(), vec![1, 0]);
        assert_eq!(ishikawa_word(1, 2).unwrap(), vec![1, 0, 1, 0, 0]);
        for k in 1..=20u64 {
            assert_eq!(ishikawa_word(1, k).unwrap().len() as u64, k + k * (k + 1) / 2);
            assert_eq!(ishikawa_word_len(1, k), Some(k + k * (k + 1) / 2));
        }
        for n in 0..=3 {
            for k in 2..=6u64 {
                let prev = ishikawa_word(n, k - 1).unwrap();
                let cur = ishikawa_word(n, k).unwrap();
                assert_eq!(&cur[..prev.len()], &prev[..]);
                let mut block = vec![n];
                if n == 0 {
                    block.clear();
                    block.push(0);
                } else {
                    block.extend(ishikawa_word(n - 1, k).unwrap());
                }
                assert_eq!(&cur[prev.len()..], &block[..]);
            }
        }
        assert!(matches!(
            ishikawa_word_capped(3, 100, 1000),
            Err(IterateError::WordBudgetExceeded { .. })
        ));
    }

    #[test]
    fn word_evaluation_matches_hand_composition() {
        let sg = make_rotation(1.0).unwrap().with_domain(ConvexSet::unit_ball(2)).unwrap();
        let basis = scalar_basis();
        let maps = averaged_maps(&sg, &basis);
        let x1 = v(&[0.6, -0.2]);
        let word = ishikawa_word(1, 2).unwrap();
        let by_word = apply_word(&maps, &word, &x1).unwrap();
        let (s0, s1) = (&maps[0], &maps[1]);
        let inner = s1.apply(&s0.apply(&s0.apply(&x1).unwrap()).unwrap()).unwrap();
        let hand = s1.apply(&s0.apply(&inner).unwrap()).unwrap();
        assert!(by_word.distance(&hand, NormKind::LInf) < 1e-12);
        let t = run_ishikawa(&sg, &basis, &x1, 2).unwrap();
        assert!(t.iterates[2].distance(&hand, NormKind::LInf) < 1e-12);
    }

    #[test]
    fn ishikawa_on_rotation_ball() {
        let sg = make_rotation(1.0).unwrap().with_domain(ConvexSet::unit_ball(2)).unwrap();
        let t = run_ishikawa(&sg, &scalar_basis(), &v(&[0.8, 0.1]), 20).unwrap();
        assert!(t.last_residual() < 1e-4);
        assert!(t.last_oracle_dist().unwrap() < 1e-4);
        let id = make_identity(1, 2).with_domain(ConvexSet::unit_ball(2)).unwrap();
        let t = run_ishikawa(&id, &scalar_basis(), &v(&[0.5, 0.5]), 5).unwrap();
        assert!(t.iterates.iter().all(|x| *x == v(&[0.5, 0.5])));
        assert_eq!(
            run_ishikawa(&make_rotation(1.0).unwrap(), &scalar_basis(), &v(&[0.5, 0.5]), 5),
            Err(IterateError::DomainNotCompact)
        );
    }
}

//! Certified search in the orbit `k ↦ (frac(k α_1), ..., frac(k α_n))`.
//!
//! When `{1, α_1, ..., α_n}` is independent over the rationals the orbit is
//! dense in the unit cube, so every box around a target point is eventually
//! visited. The scan advances the orbit in floating point (one addition per
//! coordinate per step) and resynchronizes from exact arithmetic every
//! [`RESYNC_PERIOD`] steps. Any float decision that lies within
//! [`FLOAT_MARGIN`] of a box edge or of the wrap point `0 ≡ 1` is settled with
//! exact fractional parts instead, so accepted indices are never artifacts
//! of roundoff.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::exactreal::{is_independent_over_q, ExactReal, Rational};

/// Steps between exact resynchronizations of the float orbit.
pub const RESYNC_PERIOD: u64 = 10_000;

/// Bound on the float orbit error. Between resyncs the drift is at most
/// `RESYNC_PERIOD` times a few ulps of 1, around 1e-11.
pub const FLOAT_MARGIN: f64 = 1e-9;

/// Default cap on scanned indices for [`approx_sequence`].
pub const DEFAULT_SEARCH_CAP: u64 = 100_000_000;

const PROGRESS_EVERY: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KroneckerError {
    #[error("at least one alpha is required")]
    NoAlphas,
    #[error("{alphas} alphas but {targets} target coordinates")]
    DimensionMismatch { alphas: usize, targets: usize },
    #[error("{{1, alphas}} is not linearly independent over Q")]
    IndependenceViolated,
    #[error("target coordinate {index} = {value} is outside [0, 1)")]
    BadTarget { index: usize, value: f64 },
    #[error("eps must be positive and finite, got {0}")]
    BadEps(f64),
    #[error("no index k <= {k_max} reaches the target box")]
    NotFound { k_max: u64 },
    #[error("search cap of {cap} indices exhausted after {} hits", found.len())]
    SearchBudgetExceeded { cap: u64, found: Vec<u64> },
    #[error("dispersion needs K >= 1 and grid >= 2")]
    BadDispersionArgs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KroneckerProblem {
    alphas: Vec<ExactReal>,
    target: Vec<f64>,
    eps: f64,
}

impl KroneckerProblem {
    pub fn new(alphas: Vec<ExactReal>, target: Vec<f64>, eps: f64) -> Result<Self, KroneckerError> {
        if alphas.is_empty() {
            return Err(KroneckerError::NoAlphas);
        }
        if alphas.len() != target.len() {
            return Err(KroneckerError::DimensionMismatch {
                alphas: alphas.len(),
                targets: target.len(),
            });
        }
        if let Some((index, &value)) = target
            .iter()
            .enumerate()
            .find(|(_, t)| !(**t >= 0.0 && **t < 1.0))
        {
            return Err(KroneckerError::BadTarget { index, value });
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(KroneckerError::BadEps(eps));
        }
        if !is_independent_over_q(&alphas, true) {
            return Err(KroneckerError::IndependenceViolated);
        }
        Ok(KroneckerProblem { alphas, target, eps })
    }

    pub fn alphas(&self) -> &[ExactReal] {
        &self.alphas
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }
}

/// `ell = max_j([|α_j|] + 1)` and `β_j = α_j + ell`.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaShift {
    pub ell: u64,
    pub betas: Vec<ExactReal>,
}

pub fn beta_shift(alphas: &[ExactReal]) -> Result<BetaShift, KroneckerError> {
    if alphas.is_empty() {
        return Err(KroneckerError::NoAlphas);
    }
    if !is_independent_over_q(alphas, true) {
        return Err(KroneckerError::IndependenceViolated);
    }
    let ell = alphas
        .iter()
        .map(|a| a.floor_abs() + BigInt::one())
        .max()
        .expect("nonempty")
        .to_u64()
        .expect("shift fits in u64");
    let shift = ExactReal::from_integer(ell as i64);
    let betas: Vec<ExactReal> = alphas.iter().map(|a| a + &shift).collect();
    assert!(betas.iter().all(ExactReal::is_positive), "shifted values must be positive");
    // Adding integers cannot create a rational relation; checked anyway.
    assert!(is_independent_over_q(&betas, true), "shift broke independence");
    Ok(BetaShift { ell, betas })
}

/// Exact `frac(k α_j)` for every coordinate.
pub fn orbit_point(alphas: &[ExactReal], k: u64) -> Vec<ExactReal> {
    let k = Rational::from_integer(BigInt::from(k));
    alphas.iter().map(|a| a.scale(&k).fractional_part()).collect()
}

/// Float orbit with periodic exact resynchronization.
#[derive(Debug, Clone)]
pub struct Orbit {
    alphas: Vec<ExactReal>,
    steps: Vec<f64>,
    current: Vec<f64>,
    k: u64,
}

impl Orbit {
    pub fn new(alphas: &[ExactReal]) -> Self {
        let steps: Vec<f64> = alphas.iter().map(|a| a.fractional_part().to_f64()).collect();
        Orbit {
            alphas: alphas.to_vec(),
            current: vec![0.0; steps.len()],
            steps,
            k: 0,
        }
    }

    pub fn index(&self) -> u64 {
        self.k
    }

    /// Fractional parts at the current index (all zero before the first step).
    pub fn point(&self) -> &[f64] {
        &self.current
    }

    pub fn advance(&mut self) -> &[f64] {
        self.k += 1;
        if self.k.is_multiple_of(RESYNC_PERIOD) {
            for (c, f) in self.current.iter_mut().zip(orbit_point(&self.alphas, self.k)) {
                *c = f.to_f64();
            }
        } else {
            for (c, s) in self.current.iter_mut().zip(&self.steps) {
                *c += s;
                if *c >= 1.0 {
                    *c -= 1.0;
                }
            }
        }
        &self.current
    }
}

/// An index certified to land in the target box.
#[derive(Debug, Clone, PartialEq)]
pub struct KroneckerHit {
    pub k: u64,
    /// Exact fractional parts rounded to `f64`.
    pub fracs: Vec<f64>,
    /// `max_j |frac(k α_j) - target_j|`.
    pub max_dev: f64,
}

enum Verdict {
    Inside,
    Outside,
    Unsure,
}

fn classify(point: &[f64], target: &[f64], eps: f64) -> Verdict {
    let mut unsure = false;
    for (&f, &t) in point.iter().zip(target) {
        if !(FLOAT_MARGIN..=1.0 - FLOAT_MARGIN).contains(&f) {
            // Exact value may sit on the other side of the wrap point.
            unsure = true;
            continue;
        }
        let dev = (f - t).abs();
        if dev > eps + FLOAT_MARGIN {
            return Verdict::Outside;
        }
        if dev >= eps - FLOAT_MARGIN {
            unsure = true;
        }
    }
    if unsure {
        Verdict::Unsure
    } else {
        Verdict::Inside
    }
}

fn exact_inside(problem: &KroneckerProblem, k: u64) -> bool {
    let eps = ExactReal::from_f64(problem.eps);
    orbit_point(&problem.alphas, k)
        .iter()
        .zip(&problem.target)
        .all(|(f, &t)| {
            let dev = f - &ExactReal::from_f64(t);
            dev.abs() < eps
        })
}

fn certify(problem: &KroneckerProblem, k: u64) -> KroneckerHit {
    let fracs: Vec<f64> = orbit_point(&problem.alphas, k).iter().map(ExactReal::to_f64).collect();
    let max_dev = fracs
        .iter()
        .zip(&problem.target)
        .fold(0.0f64, |m, (f, t)| m.max((f - t).abs()));
    KroneckerHit { k, fracs, max_dev }
}

/// Scans `k = 1..=k_max` and collects up to `count` certified hits.
/// `progress` is called with the current index every ten million steps.
pub fn scan(
    problem: &KroneckerProblem,
    k_max: u64,
    count: usize,
    progress: &mut dyn FnMut(u64),
) -> Vec<KroneckerHit> {
    let mut orbit = Orbit::new(&problem.alphas);
    let mut hits = Vec::new();
    while hits.len() < count && orbit.index() < k_max {
        let k = orbit.index() + 1;
        let point = orbit.advance();
        let accepted = match classify(point, &problem.target, problem.eps) {
            Verdict::Inside => true,
            Verdict::Outside => false,
            Verdict::Unsure => exact_inside(problem, k),
        };
        if accepted {
            hits.push(certify(problem, k));
        }
        if k.is_multiple_of(PROGRESS_EVERY) {
            progress(k);
        }
    }
    hits
}

/// The first certified hit with `k <= k_max`.
pub fn find_hit(problem: &KroneckerProblem, k_max: u64) -> Result<KroneckerHit, KroneckerError> {
    scan(problem, k_max, 1, &mut |_| {})
        .pop()
        .ok_or(KroneckerError::NotFound { k_max })
}

/// The smallest `k <= k_max` with `|frac(k α_j) - target_j| < eps` for all `j`.
pub fn find_index(problem: &KroneckerProblem, k_max: u64) -> Result<u64, KroneckerError> {
    find_hit(problem, k_max).map(|h| h.k)
}

/// The first `count` indices landing in the target box, strictly increasing.
pub fn approx_sequence(problem: &KroneckerProblem, count: usize) -> Result<Vec<u64>, KroneckerError> {
    approx_sequence_capped(problem, count, DEFAULT_SEARCH_CAP)
}

pub fn approx_sequence_capped(
    problem: &KroneckerProblem,
    count: usize,
    cap: u64,
) -> Result<Vec<u64>, KroneckerError> {
    let found: Vec<u64> = scan(problem, cap, count, &mut |_| {}).into_iter().map(|h| h.k).collect();
    if found.len() < count {
        return Err(KroneckerError::SearchBudgetExceeded { cap, found });
    }
    Ok(found)
}

/// Largest box distance from a `grid^n` lattice of cell centers to the
/// nearest of the first `k_count` orbit points. No wraparound.
pub fn orbit_dispersion(alphas: &[ExactReal], k_count: u64, grid: usize) -> Result<f64, KroneckerError> {
    if alphas.is_empty() {
        return Err(KroneckerError::NoAlphas);
    }
    if k_count < 1 || grid < 2 {
        return Err(KroneckerError::BadDispersionArgs);
    }
    let n = alphas.len();
    let cells = grid.pow(n as u32);
    let centers: Vec<Vec<f64>> = (0..cells)
        .map(|mut idx| {
            (0..n)
                .map(|_| {
                    let i = idx % grid;
                    idx /= grid;
                    (i as f64 + 0.5) / grid as f64
                })
                .collect()
        })
        .collect();
    let mut best = vec![f64::INFINITY; cells];
    let mut orbit = Orbit::new(alphas);
    for _ in 0..k_count {
        let point = orbit.advance();
        for (b, c) in best.iter_mut().zip(&centers) {
            let d = point
                .iter()
                .zip(c)
                .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            if d < *b {
                *b = d;
            }
        }
    }
    Ok(best.into_iter().fold(0.0, f64::max))
}

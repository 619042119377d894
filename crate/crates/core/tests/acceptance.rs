//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Tolerances and runtime limits are fixed here. Oracles (200-bit integer
//! square roots, exhaustive integer relation search, naive grid sums, hand
//! compositions) are written independently of the library code they check.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use semifix::exactreal::{is_independent_over_q, ExactReal, Rational};
use semifix::fixedsets::{
    bruck_check, combined_map, counterexample_demo, make_basis_f64, prime_root_basis, rotation_necessity_demo,
    verify_main_theorem, FixedSetError, Mapping, ParameterBasis, Stage, VerifyOptions,
};
use semifix::geometry::{ConvexSet, NormKind, Vector};
use semifix::iterate::{
    apply_word, averaged_maps, ishikawa_applications, ishikawa_word, run_cesaro, run_halpern, run_ishikawa, run_km,
    run_rode, solve_browder, Schedule,
};
use semifix::kronecker::{approx_sequence, find_index, orbit_dispersion, KroneckerProblem};
use semifix::semigroup::{
    make_diagonal_matexp, make_identity, make_matexp, make_rotation, make_translation_counterexample,
    sample_domain, Parameter, SemigroupInstance,
};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn v(xs: &[f64]) -> Vector {
    Vector::from_slice(xs)
}

fn er(s: &str) -> ExactReal {
    s.parse().unwrap()
}

fn one_param_basis(alpha: &str) -> ParameterBasis {
    make_basis_f64(vec![Parameter::unit(1, 0)], vec![er(alpha)]).unwrap()
}

// ---------------------------------------------------------------------------
// 200-bit integer oracle

const BITS: usize = 200;

/// Floor of the square root by Newton's method.
fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative());
    if *n < BigInt::from(2) {
        return n.clone();
    }
    let mut x = BigInt::one() << (n.bits() / 2 + 1) as usize;
    loop {
        let y = (&x + n / &x) >> 1usize;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// Integers `lo <= 2^200 x <= hi` for `x = r + Σ c_d sqrt(d)`.
fn scaled_bounds(x: &ExactReal) -> (BigInt, BigInt) {
    let scale = BigInt::one() << BITS;
    let r = x.rational_part();
    let (q, rem) = (r.numer() * &scale).div_mod_floor(r.denom());
    let mut lo = q.clone();
    let mut hi = if rem.is_zero() { q } else { q + 1 };
    for (&d, c) in x.surd_coeffs() {
        let s = isqrt(&(BigInt::from(d) << (2 * BITS)));
        let a = c.numer() * &s;
        let b = c.numer() * (&s + 1);
        let (small, large) = if a <= b { (a, b) } else { (b, a) };
        lo += small.div_floor(c.denom());
        hi += large.div_ceil(c.denom());
    }
    (lo, hi)
}

fn oracle_floor(x: &ExactReal) -> Option<BigInt> {
    let (lo, hi) = scaled_bounds(x);
    let (fl, fh) = (lo >> BITS, hi >> BITS);
    (fl == fh).then_some(fl)
}

fn oracle_frac(x: &ExactReal) -> f64 {
    let (lo, _) = scaled_bounds(x);
    let scale = BigInt::one() << BITS;
    let m = lo.mod_floor(&scale);
    // Keep 64 leading bits; the rest is far below f64 resolution.
    (m >> (BITS - 64)).to_f64().unwrap() / 2f64.powi(64)
}

fn random_exact(rng: &mut ChaCha8Rng) -> ExactReal {
    let radicands = [2u64, 3, 5, 6, 7, 10];
    let rat = |rng: &mut ChaCha8Rng, num: i64, den: i64| {
        Rational::new(BigInt::from(rng.gen_range(-num..=num)), BigInt::from(rng.gen_range(1..=den)))
    };
    let mut x = ExactReal::from_rational(rat(rng, 1_000_000, 1000));
    for _ in 0..rng.gen_range(0..=3) {
        let d = radicands[rng.gen_range(0..radicands.len())];
        x = x + ExactReal::surd(rat(rng, 1000, 100), d);
    }
    x
}

/// The same number written with `sqrt(4d)/2` for every `sqrt(d)`.
fn rewritten(x: &ExactReal) -> ExactReal {
    let mut s = format!("({})", x.rational_part());
    for (d, c) in x.surd_coeffs() {
        s.push_str(&format!(" + ({c})*sqrt({})/2", 4 * d));
    }
    s.parse().unwrap()
}

// ---------------------------------------------------------------------------
// Criteria

fn counterexample() -> Verdict {
    let r = counterexample_demo(1).unwrap();
    let exact = r.weight_sum == ExactReal::one() && r.cancellation.is_zero();
    let in_range = r.probes.len() == 100 && r.probes.iter().all(|(x, _, _)| x.abs() <= 1000.0);
    let unit = r.probes.iter().all(|(_, _, t)| (t - 1.0).abs() <= 1e-9);
    verdict(
        exact && in_range && unit && r.max_s_residual <= 1e-9,
        format!(
            "sum of weights = {}, cancellation = {}, max |Sx-x| = {:.1e} over {} probes, |T(e1)x-x| = 1 at all: {unit}",
            r.weight_sum,
            r.cancellation,
            r.max_s_residual,
            r.probes.len()
        ),
    )
}

fn reduction() -> Verdict {
    let sg = make_diagonal_matexp(2);
    let basis = make_basis_f64(vec![Parameter::unit(2, 0), Parameter::unit(2, 1)], vec![er("sqrt(2)"), er("sqrt(3)")])
        .unwrap();
    let opts = VerifyOptions {
        samples: 100,
        tol: 1e-8,
        eps: 1e-3,
        ..VerifyOptions::default()
    };
    let b = Vector::zeros(2);
    let good = verify_main_theorem(&sg, &basis, &b, &opts).unwrap();
    let enough = good.stages.iter().all(|s| match s.stage {
        Stage::Hypothesis | Stage::BetaShift => true,
        _ => s.probes.len() >= 100,
    });
    let control = verify_main_theorem(&sg, &basis, &(&b + &v(&[1.0, 0.0])), &opts).unwrap();
    let a = control.stage(Stage::Hypothesis);
    let control_ok = !a.passed && a.max_residual >= 0.5;
    verdict(
        good.passed && enough && control_ok,
        format!(
            "z = b: {} stages pass; z = b + (1,0): stage (a) residual {:.3}",
            good.stages.iter().filter(|s| s.passed).count(),
            a.max_residual
        ),
    )
}

fn necessity() -> Verdict {
    let r = rotation_necessity_demo(&make_rotation(1.0).unwrap(), 1000, 3).unwrap();
    let ok = r.min_irrational_residual >= 0.05
        && r.rational_pair_residuals.0 <= 1e-9
        && r.rational_pair_residuals.1 <= 1e-9
        && (r.moved_residual - 3f64.sqrt()).abs() <= 1e-9;
    verdict(
        ok,
        format!(
            "min T(sqrt2) residual {:.3} over {} probes, (1,0) fixed by T(1),T(2), T(1/3) residual {:.12}",
            r.min_irrational_residual, r.probes, r.moved_residual
        ),
    )
}

fn kronecker() -> Verdict {
    let problem = KroneckerProblem::new(vec![ExactReal::sqrt(2)], vec![0.5], 0.01).unwrap();
    let k = find_index(&problem, 1_000_000).unwrap();

    // Brute force: 2^200 frac(j sqrt 2) = isqrt(2 j^2 2^400) mod 2^200.
    let scale = BigInt::one() << BITS;
    let half = BigInt::one() << (BITS - 1);
    let brute = (1u64..)
        .find(|&j| {
            let m = isqrt(&(BigInt::from(2 * j * j) << (2 * BITS))).mod_floor(&scale);
            (m - &half).abs() * 100 < scale
        })
        .unwrap();

    let wide = KroneckerProblem::new(vec![ExactReal::sqrt(2)], vec![0.5], 0.05).unwrap();
    let mut returned = approx_sequence(&wide, 6).unwrap();
    returned.push(k);
    let certified = returned.iter().all(|&j| {
        let eps = if j == k { 0.01 } else { 0.05 };
        let f = ExactReal::sqrt(2).scale_int(j as i64).fractional_part().to_float(1e-12);
        (f - 0.5).abs() < eps
    });
    let dispersion = orbit_dispersion(&[ExactReal::sqrt(2), ExactReal::sqrt(3)], 200_000, 10).unwrap();
    verdict(
        k == 35 && brute == k && certified && dispersion <= 0.02,
        format!("k = {k} (brute force {brute}), indices re-certified: {certified}, dispersion {dispersion:.4}"),
    )
}

fn bruck() -> Verdict {
    let rot = make_rotation(1.0).unwrap();
    let maps = [
        Mapping::identity(ConvexSet::WholeSpace(2)),
        Mapping::from_semigroup(&rot, &Parameter::new(vec![ExactReal::sqrt(2).to_f64()]).unwrap()),
    ];
    let origin = Vector::zeros(2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut probes = vec![origin.clone()];
    while probes.len() < 1000 {
        probes.push(sample_domain(rot.domain(), &mut rng));
    }
    let r = bruck_check(&maps, &[0.5, 0.5], &probes, Some(&origin), 1e-9, NormKind::Euclidean).unwrap();
    let l1 = bruck_check(&maps, &[0.5, 0.5], &probes, Some(&origin), 1e-9, NormKind::L1);
    let rejected = matches!(l1, Err(FixedSetError::NormNotStrictlyConvex(NormKind::L1)));
    verdict(
        r.all_agree && r.probes.len() == 1000 && rejected,
        format!(
            "{} probes agree: {}, L1 rejected as not strictly convex: {rejected}",
            r.probes.len(),
            r.all_agree
        ),
    )
}

fn convergence() -> Verdict {
    let s = combined_map(&make_diagonal_matexp(2), &prime_root_basis(2), &[1.0 / 3.0; 3]).unwrap();
    let x = v(&[1.0, 1.0]);
    let cesaro = run_cesaro(&s, &x, 500).unwrap().last_oracle_dist().unwrap();
    let km = run_km(&s, &x, 500).unwrap().last_oracle_dist().unwrap();
    let half = Mapping::scaling(1, 0.5);
    let browder_err = [0.5, 0.1, 0.01]
        .iter()
        .map(|&sv| {
            let got = solve_browder(&half, &v(&[1.0]), sv, 1e-15, 100_000).unwrap()[0];
            (got - sv / (1.0 - (1.0 - sv) * 0.5)).abs()
        })
        .fold(0.0f64, f64::max);
    let halpern = run_halpern(&s, &x, &x, &Schedule::Reciprocal, 100_000)
        .unwrap()
        .last_oracle_dist()
        .unwrap();
    let parts = [
        ("cesaro", cesaro <= 1e-6),
        ("km", km <= 1e-6),
        ("browder", browder_err <= 1e-10),
        ("halpern", halpern <= 1e-3),
    ];
    let failed: Vec<&str> = parts.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    verdict(
        failed.is_empty(),
        format!(
            "cesaro {cesaro:.2e}, km {km:.2e} (need <= 1e-6 at K=500); browder err {browder_err:.1e}; \
             halpern {halpern:.2e} at K=1e5{}",
            if failed.is_empty() { String::new() } else { format!("; failing: {}", failed.join(", ")) }
        ),
    )
}

fn naive_rode(sg: &SemigroupInstance, basis: &ParameterBasis, x: &Vector, k: u64) -> Vector {
    let params = basis.all_parameters();
    let n = basis.n();
    let total = k.pow(n as u32 + 1);
    let mut sum = Vector::zeros(x.dim());
    for idx in 0..total {
        let mut rem = idx;
        let mut coords = vec![0.0; n];
        for p in &params {
            let nu = (rem % k + 1) as f64;
            rem /= k;
            for (c, pi) in coords.iter_mut().zip(p.coords()) {
                *c += nu * pi;
            }
        }
        sum = &sum + &sg.evaluate_at(&coords, x).unwrap();
    }
    sum.scale(1.0 / total as f64)
}

fn rode() -> Verdict {
    let tilted = make_matexp(
        2,
        vec![vec![1.0, 0.0], vec![0.5, 2.0]],
        vec![vec![0.6, -0.8], vec![0.8, 0.6]],
        v(&[1.0, -1.0]),
    )
    .unwrap();
    let cases: Vec<(SemigroupInstance, ParameterBasis, Vector)> = vec![
        (make_identity(1, 2), one_param_basis("sqrt(2)"), v(&[1.0, -3.0])),
        (make_identity(2, 1), prime_root_basis(2), v(&[4.0])),
        (make_translation_counterexample(), prime_root_basis(2), v(&[2.5])),
        (make_rotation(1.0).unwrap(), one_param_basis("sqrt(2)"), v(&[0.3, 0.7])),
        (make_rotation(0.7).unwrap(), one_param_basis("sqrt(3)"), v(&[-1.0, 0.2])),
        (make_diagonal_matexp(1), one_param_basis("sqrt(2)"), v(&[1.0])),
        (make_diagonal_matexp(2), prime_root_basis(2), v(&[1.0, -2.0])),
        (tilted, prime_root_basis(2), v(&[0.0, 3.0])),
    ];
    let mut worst = 0.0f64;
    for (sg, basis, x) in &cases {
        for k in 1..=5 {
            let tree = run_rode(sg, basis, x, k).unwrap();
            let naive = naive_rode(sg, basis, x, k);
            worst = worst.max(tree.distance(&naive, NormKind::LInf) / (1.0 + naive.euclidean()));
        }
    }
    let scalar = make_matexp(1, vec![vec![1.0]], vec![vec![1.0]], v(&[0.0])).unwrap();
    let got = run_rode(&scalar, &one_param_basis("sqrt(2)"), &v(&[1.0]), 2).unwrap()[0];
    let r2 = 2f64.sqrt();
    let hand = ((-(r2 + 1.0)).exp() + (-(r2 + 2.0)).exp() + (-(2.0 * r2 + 1.0)).exp() + (-(2.0 * r2 + 2.0)).exp())
        / 4.0;
    verdict(
        worst <= 1e-12 && (got - hand).abs() <= 1e-12,
        format!(
            "{} instances, k <= 5: max deviation from naive grid {worst:.1e}; scalar k=2 off by {:.1e}",
            cases.len(),
            (got - hand).abs()
        ),
    )
}

fn ishikawa() -> Verdict {
    let lengths_ok = (1..=20u64).all(|k| ishikawa_word(1, k).unwrap().len() as u64 == k + k * (k + 1) / 2);
    let sg = make_rotation(1.0).unwrap().with_domain(ConvexSet::unit_ball(2)).unwrap();
    let basis = one_param_basis("sqrt(2)");
    let maps = averaged_maps(&sg, &basis);
    let x1 = v(&[0.8, 0.1]);
    let by_word = apply_word(&maps, &ishikawa_word(1, 2).unwrap(), &x1).unwrap();
    let (s0, s1) = (&maps[0], &maps[1]);
    let inner = s1.apply(&s0.apply(&s0.apply(&x1).unwrap()).unwrap()).unwrap();
    let hand = s1.apply(&s0.apply(&inner).unwrap()).unwrap();
    let word_err = by_word.distance(&hand, NormKind::LInf);

    let k_total = (1..).take_while(|&k| ishikawa_applications(1, k).unwrap() <= 1_000_000).last().unwrap();
    let trace = run_ishikawa(&sg, &basis, &x1, k_total).unwrap();
    let first_below = trace.ks.iter().zip(&trace.residuals).find(|(_, r)| **r < 1e-4).map(|(k, _)| *k);
    let used = trace.budget.max_map_applications;
    verdict(
        lengths_ok && word_err <= 1e-12 && first_below.is_some() && used <= 1_000_000,
        format!(
            "word lengths ok: {lengths_ok}; word vs hand {word_err:.1e}; residual < 1e-4 from x_{} \
             ({used} applications for K = {k_total})",
            first_below.map_or("?".into(), |k| k.to_string())
        ),
    )
}

/// Smallest nonzero integer relation with |ν_i| <= bound, by meet in the middle.
fn has_relation(elems: &[[i64; 4]], bound: i64) -> bool {
    let half = elems.len() / 2;
    let (left, right) = elems.split_at(half);
    fn sums(part: &[[i64; 4]], bound: i64) -> Vec<([i64; 4], bool)> {
        let mut out = vec![([0i64; 4], false)];
        for e in part {
            let mut next = Vec::with_capacity(out.len() * (2 * bound as usize + 1));
            for (acc, nonzero) in &out {
                for nu in -bound..=bound {
                    let mut s = *acc;
                    for (si, ei) in s.iter_mut().zip(e) {
                        *si += nu * ei;
                    }
                    next.push((s, *nonzero || nu != 0));
                }
            }
            out = next;
        }
        out
    }
    // Left sums keyed by value; remember whether a nonzero choice reaches it.
    let mut table: HashMap<[i64; 4], (bool, bool)> = HashMap::new();
    for (s, nonzero) in sums(left, bound) {
        let entry = table.entry(s).or_insert((false, false));
        if nonzero {
            entry.1 = true;
        } else {
            entry.0 = true;
        }
    }
    sums(right, bound).into_iter().any(|(s, nonzero)| {
        let neg = [-s[0], -s[1], -s[2], -s[3]];
        match table.get(&neg) {
            Some(&(zero_left, nonzero_left)) => nonzero_left || (nonzero && zero_left),
            None => false,
        }
    })
}

fn exactreal_suite() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut floor_bad = 0;
    let mut frac_bad = 0;
    let mut undecided = 0;
    for _ in 0..1000 {
        let x = random_exact(&mut rng);
        match oracle_floor(&x) {
            Some(f) if f == x.floor() => {}
            Some(_) => floor_bad += 1,
            None => undecided += 1,
        }
        if (x.fractional_part().to_f64() - oracle_frac(&x)).abs() > 2e-15 {
            frac_bad += 1;
        }
    }
    let mut eq_bad = 0;
    for i in 0..1000 {
        let x = random_exact(&mut rng);
        let y = match i % 3 {
            0 => rewritten(&x),
            1 => random_exact(&mut rng),
            _ => &x + &ExactReal::from_rational(Rational::new(BigInt::one(), BigInt::from(10).pow(40))),
        };
        let (xl, xh) = scaled_bounds(&x);
        let (yl, yh) = scaled_bounds(&y);
        let overlap = xl <= yh && yl <= xh;
        if overlap != (x == y) {
            eq_bad += 1;
        }
    }

    // Families in span{1, sqrt2, sqrt3, sqrt6} with coefficients in {-1, 0, 1}.
    // Any relation among such vectors has a solution with entries bounded by
    // 4x4 minors, at most 16 in absolute value, so |ν| <= 50 is exhaustive.
    let basis = [er("1"), er("sqrt(2)"), er("sqrt(3)"), er("sqrt(6)")];
    let mut indep_bad = 0;
    let mut decisions = 0;
    for _ in 0..25 {
        let family: Vec<[i64; 4]> = (0..5)
            .map(|_| {
                let mut c = [0i64; 4];
                for ci in &mut c {
                    *ci = rng.gen_range(-1..=1);
                }
                c
            })
            .collect();
        for mask in 1u32..32 {
            let subset: Vec<[i64; 4]> = (0..5).filter(|i| mask & (1 << i) != 0).map(|i| family[i]).collect();
            let xs: Vec<ExactReal> = subset
                .iter()
                .map(|c| {
                    c.iter()
                        .zip(&basis)
                        .fold(ExactReal::zero(), |acc, (&ci, b)| acc + b.scale_int(ci))
                })
                .collect();
            decisions += 1;
            if is_independent_over_q(&xs, false) == has_relation(&subset, 50) {
                indep_bad += 1;
            }
        }
    }
    let ok = floor_bad == 0 && frac_bad == 0 && undecided == 0 && eq_bad == 0 && indep_bad == 0;
    verdict(
        ok,
        format!(
            "floor {floor_bad}/1000 off ({undecided} undecided), frac {frac_bad}/1000 off, equality {eq_bad}/1000 off, \
             independence {indep_bad}/{decisions} off"
        ),
    )
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

const DETERMINISM_RUNS: &[(&str, &str)] = &[
    ("counterexample", "counterexample"),
    ("verify-theorem", "verify_matexp"),
    ("verify-theorem", "verify_matexp_control"),
    ("necessity", "necessity_rotation"),
    ("kronecker-search", "kronecker_sqrt2"),
    ("kronecker-search", "kronecker_plane"),
    ("bruck", "bruck_rotation"),
    ("iterate", "cesaro_matexp"),
    ("iterate", "km_matexp"),
    ("iterate", "browder_matexp"),
    ("iterate", "halpern_matexp"),
    ("iterate", "rode_scalar"),
    ("iterate", "rode_matexp"),
    ("iterate", "ishikawa_rotation"),
];

fn determinism() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_semifix");
    let root = std::env::temp_dir().join(format!("semifix-acceptance-{}", std::process::id()));
    let mut mismatched = Vec::new();
    let mut bad_exit = Vec::new();
    for (sub, name) in DETERMINISM_RUNS {
        let config = configs_dir().join(format!("{name}.toml"));
        let mut hashes = Vec::new();
        let mut codes = Vec::new();
        for run in 0..3 {
            let csv = root.join(format!("run{run}")).join(format!("{name}.csv"));
            let report = root.join(format!("run{run}")).join(format!("{name}.txt"));
            let status = Command::new(bin)
                .arg(sub)
                .arg("--config")
                .arg(&config)
                .arg("--csv")
                .arg(&csv)
                .arg("--report")
                .arg(&report)
                .status()
                .expect("binary runs");
            codes.push(status.code());
            let bytes = std::fs::read(&csv).unwrap_or_default();
            hashes.push(Sha256::digest(&bytes));
        }
        if hashes.windows(2).any(|w| w[0] != w[1]) {
            mismatched.push(*name);
        }
        if codes.windows(2).any(|w| w[0] != w[1]) || codes[0].is_none_or(|c| c == 2) {
            bad_exit.push(*name);
        }
    }
    let _ = std::fs::remove_dir_all(&root);
    verdict(
        mismatched.is_empty() && bad_exit.is_empty(),
        format!(
            "{} configs x 3 runs: hash mismatches {:?}, unstable or config-error exits {:?}",
            DETERMINISM_RUNS.len(),
            mismatched,
            bad_exit
        ),
    )
}

fn main() {
    type Check = fn() -> Verdict;
    let criteria: [(&str, u64, Check); 10] = [
        ("counterexample reproduction", 1, counterexample),
        ("fixed-point reduction on decay family", 10, reduction),
        ("rational vs irrational rotation times", 1, necessity),
        ("Kronecker engine", 30, kronecker),
        ("convex combination fixed points", 1, bruck),
        ("convergence schemes", 30, convergence),
        ("grid means", 5, rode),
        ("nested products", 30, ishikawa),
        ("exact arithmetic oracle", 10, exactreal_suite),
        ("determinism", 120, determinism),
    ];
    let mut failures = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let passed = result.passed && in_time;
        if !passed {
            failures += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {} [{:.2} s, limit {limit} s{}]",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", exceeded" }
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}

//! Indices k with frac(k alpha) close to a target, and orbit dispersion.

use semifix::exactreal::ExactReal;
use semifix::kronecker::{approx_sequence, beta_shift, find_hit, orbit_dispersion, KroneckerProblem};

fn main() {
    let root2 = vec![ExactReal::sqrt(2)];
    let p = KroneckerProblem::new(root2.clone(), vec![0.5], 0.01).unwrap();
    let hit = find_hit(&p, 1_000_000).unwrap();
    println!("first k with |frac(k sqrt 2) - 0.5| < 0.01: {} (frac {:.6})", hit.k, hit.fracs[0]);

    let p = KroneckerProblem::new(root2, vec![0.5], 0.05).unwrap();
    println!("first hits within 0.05: {:?}", approx_sequence(&p, 6).unwrap());

    let plane = vec![ExactReal::sqrt(2), ExactReal::sqrt(3)];
    let p = KroneckerProblem::new(plane.clone(), vec![0.1, 0.9], 1e-3).unwrap();
    let hit = find_hit(&p, 100_000_000).unwrap();
    println!("(sqrt 2, sqrt 3) near (0.1, 0.9): k = {}, deviation {:.2e}", hit.k, hit.max_dev);

    for k in [1_000u64, 20_000, 200_000] {
        println!("dispersion after {k} points: {:.4}", orbit_dispersion(&plane, k, 10).unwrap());
    }

    let alphas: Vec<ExactReal> = ["-sqrt(5)", "sqrt(7)"].iter().map(|s| s.parse().unwrap()).collect();
    let shift = beta_shift(&alphas).unwrap();
    println!("shift l = {}, betas = {} ; {}", shift.ell, shift.betas[0], shift.betas[1]);
}

//! Grid means of T(nu_0 p_0 + ... + nu_n p_n) x over nu in {1..k}^(n+1).

use semifix::fixedsets::{make_basis_f64, prime_root_basis};
use semifix::geometry::Vector;
use semifix::iterate::{rode_applications, run_rode, run_rode_trace};
use semifix::semigroup::{make_diagonal_matexp, make_matexp, Parameter};

fn main() {
    let scalar = make_matexp(1, vec![vec![1.0]], vec![vec![1.0]], Vector::zeros(1)).unwrap();
    let basis = make_basis_f64(vec![Parameter::unit(1, 0)], vec![semifix::ExactReal::sqrt(2)]).unwrap();
    let x = run_rode(&scalar, &basis, &Vector::from_slice(&[1.0]), 2).unwrap();
    let r2 = 2f64.sqrt();
    let hand = [(r2 + 1.0), (r2 + 2.0), (2.0 * r2 + 1.0), (2.0 * r2 + 2.0)].iter().map(|t| (-t).exp()).sum::<f64>() / 4.0;
    println!("k = 2: {:.15} (four-term average {hand:.15})", x[0]);

    let sg = make_diagonal_matexp(2);
    let trace = run_rode_trace(&sg, &prime_root_basis(2), &Vector::from_slice(&[1.0, -2.0]), 12).unwrap();
    for (k, d) in trace.ks.iter().zip(trace.oracle_dist.as_ref().unwrap()) {
        println!("k = {k:>2}: {:>6} applications, distance {d:.3e}", rode_applications(2, *k).unwrap());
    }
}

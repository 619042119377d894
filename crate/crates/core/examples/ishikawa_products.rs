//! Nested products of averaged mappings on a compact domain.

use semifix::fixedsets::make_basis_f64;
use semifix::geometry::{ConvexSet, Vector};
use semifix::iterate::{ishikawa_applications, ishikawa_word, run_ishikawa};
use semifix::semigroup::{make_rotation, Parameter};

fn main() {
    for (n, k) in [(0, 3), (1, 1), (1, 2), (2, 2)] {
        println!("W_{n}({k}) = {:?}", ishikawa_word(n, k).unwrap());
    }

    let sg = make_rotation(1.0).unwrap().with_domain(ConvexSet::unit_ball(2)).unwrap();
    let basis = make_basis_f64(vec![Parameter::unit(1, 0)], vec![semifix::ExactReal::sqrt(2)]).unwrap();
    let trace = run_ishikawa(&sg, &basis, &Vector::from_slice(&[0.8, 0.1]), 8).unwrap();
    for (k, r) in trace.ks.iter().zip(&trace.residuals) {
        println!("x_{k}: residual {r:.3e}");
    }
    println!("applications for K = 8: {}", ishikawa_applications(1, 8).unwrap());
}

//! Builtin families and sampled checks of the semigroup law and nonexpansiveness.

use semifix::geometry::{NormKind, Vector};
use semifix::semigroup::{
    check_nonexpansive, check_semigroup_law, continuity_modulus, make_broken_square, make_matexp, make_rotation,
};

fn main() {
    let q = vec![vec![0.6, -0.8], vec![0.8, 0.6]];
    let sg = make_matexp(2, vec![vec![1.0, 0.5], vec![0.0, 2.0]], q, Vector::from_slice(&[1.0, 2.0])).unwrap();
    println!("{}", check_semigroup_law(&sg, 500, 1e-10, 1).unwrap());
    println!("{}", check_nonexpansive(&sg, NormKind::Euclidean, 500, 1e-10, 2).unwrap());
    println!("common fixed set: {:?}", sg.common_fixed_set());
    let m = continuity_modulus(&sg, &Vector::from_slice(&[3.0, -1.0]), 1e-6, 5).unwrap();
    println!("continuity ratio at (3, -1): {:.4}", m.max_ratio);

    let rot = make_rotation(1.0).unwrap();
    for norm in [NormKind::Euclidean, NormKind::L1] {
        println!("rotation, {}", check_nonexpansive(&rot, norm, 200, 1e-10, 3).unwrap());
    }

    println!("{}", check_semigroup_law(&make_broken_square(), 50, 1e-10, 4).unwrap());
}

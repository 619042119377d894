//! A user-defined family: independent rotations of two planes by t1 and t2
//! turns, checked and run through the reduction verifier.

use std::sync::Arc;

use semifix::fixedsets::{prime_root_basis, verify_main_theorem, VerifyOptions};
use semifix::geometry::{ConvexSet, Vector};
use semifix::semigroup::{check_nonexpansive, check_semigroup_law, make_custom, Parameter};

fn rotate(a: f64, b: f64, turns: f64) -> (f64, f64) {
    let (s, c) = (std::f64::consts::TAU * turns).sin_cos();
    (c * a - s * b, s * a + c * b)
}

fn main() {
    let sg = make_custom(
        "two_plane_rotation",
        2,
        ConvexSet::WholeSpace(4),
        true,
        Arc::new(|p: &Parameter, x: &Vector| {
            let t = p.coords();
            let (a, b) = rotate(x[0], x[1], t[0]);
            let (c, d) = rotate(x[2], x[3], t[1]);
            Vector::from_slice(&[a, b, c, d])
        }),
    );
    println!("{}", check_semigroup_law(&sg, 200, 1e-9, 1).unwrap());
    println!("{}", check_nonexpansive(&sg, sg.norm(), 200, 1e-9, 2).unwrap());

    let opts = VerifyOptions { samples: 30, ..VerifyOptions::default() };
    let basis = prime_root_basis(2);
    for z in [Vector::zeros(4), Vector::from_slice(&[0.0, 0.0, 1.0, 0.0])] {
        let r = verify_main_theorem(&sg, &basis, &z, &opts).unwrap();
        println!("z = ({z}): {}", if r.passed { "common fixed point" } else { "moved" });
    }
}

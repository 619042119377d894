//! One-parameter rotations: two times with irrational ratio pin the fixed
//! set down, a rational pair does not.

use semifix::fixedsets::rotation_necessity_demo;
use semifix::semigroup::make_rotation;

fn main() {
    let rot = make_rotation(1.0).unwrap();
    let r = rotation_necessity_demo(&rot, 1000, 3).unwrap();
    println!("smallest T(sqrt 2) residual with |x| >= 0.1: {:.4}", r.min_irrational_residual);
    println!("(1, 0) under T(1), T(2): {:.1e}, {:.1e}", r.rational_pair_residuals.0, r.rational_pair_residuals.1);
    println!("(1, 0) under T(1/3): {:.12} (sqrt 3 = {:.12})", r.moved_residual, 3f64.sqrt());
}

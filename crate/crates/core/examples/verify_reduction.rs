//! Checks that a point fixed by T(p0), T(p1), ..., T(pn) is fixed by every T(p).

use semifix::fixedsets::{prime_root_basis, verify_main_theorem, VerifyOptions};
use semifix::geometry::Vector;
use semifix::semigroup::make_matexp;

fn main() {
    let b = Vector::from_slice(&[0.5, -1.0]);
    let sg = make_matexp(2, vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![vec![1.0, 0.0], vec![0.0, 1.0]], b.clone())
        .unwrap();
    let basis = prime_root_basis(2);
    println!("p0 = {}", basis.p0());
    let opts = VerifyOptions::default();

    let report = verify_main_theorem(&sg, &basis, &b, &opts).unwrap();
    print!("{}", report.to_text());

    let moved = Vector::from_slice(&[1.5, -1.0]);
    let report = verify_main_theorem(&sg, &basis, &moved, &opts).unwrap();
    print!("{}", report.to_text());
}

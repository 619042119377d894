//! Fixed points of a convex combination versus those of its parts.

use semifix::fixedsets::{bruck_check, Mapping};
use semifix::geometry::{NormKind, Vector};
use semifix::semigroup::{make_rotation, Parameter};

fn main() {
    let rot = make_rotation(1.0).unwrap();
    let maps = [
        Mapping::from_semigroup(&rot, &Parameter::new(vec![0.0]).unwrap()),
        Mapping::from_semigroup(&rot, &Parameter::new(vec![2f64.sqrt()]).unwrap()),
    ];
    let origin = Vector::zeros(2);
    let probes: Vec<Vector> = (0..8)
        .map(|i| {
            let r = i as f64 / 4.0;
            Vector::from_slice(&[r, 1.0 - r])
        })
        .chain([origin.clone()])
        .collect();
    let report = bruck_check(&maps, &[0.5, 0.5], &probes, Some(&origin), 1e-9, NormKind::Euclidean).unwrap();
    for p in &report.probes {
        println!(
            "x = ({}): |Sx - x| = {:.3e}, max_j |T_j x - x| = {:.3e}, agree {}",
            p.x, p.combined_residual, p.max_map_residual, p.agree
        );
    }
    match bruck_check(&maps, &[0.5, 0.5], &probes, Some(&origin), 1e-9, NormKind::L1) {
        Err(e) => println!("in L1: {e}"),
        Ok(_) => unreachable!(),
    }
}

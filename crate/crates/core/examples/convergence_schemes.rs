//! Cesaro means, half-averaged, Browder and Halpern iterations on a
//! combined decay map whose only fixed point is the origin.

use semifix::fixedsets::{combined_map, prime_root_basis, Mapping};
use semifix::geometry::Vector;
use semifix::iterate::{browder_sweep, run_cesaro, run_halpern, run_km, solve_browder, Schedule};
use semifix::semigroup::make_diagonal_matexp;

fn main() {
    let s = combined_map(&make_diagonal_matexp(2), &prime_root_basis(2), &[1.0 / 3.0; 3]).unwrap();
    let x = Vector::from_slice(&[1.0, 1.0]);

    for trace in [run_cesaro(&s, &x, 500).unwrap(), run_km(&s, &x, 500).unwrap()] {
        println!("{:>8}: distance to fixed set after 500 steps {:.3e}", trace.scheme, trace.last_oracle_dist().unwrap());
    }
    let h = run_halpern(&s, &x, &x, &Schedule::Reciprocal, 100_000).unwrap();
    println!(" halpern: distance to P_F(u) after 1e5 steps {:.3e}", h.last_oracle_dist().unwrap());

    let half = Mapping::scaling(1, 0.5);
    for sv in [0.5, 0.1, 0.01] {
        let xs = solve_browder(&half, &Vector::from_slice(&[1.0]), sv, 1e-14, 10_000).unwrap();
        println!("x = (1 - s) x/2 + s at s = {sv}: {:.12} (closed form {:.12})", xs[0], sv / (1.0 - (1.0 - sv) * 0.5));
    }
    let sweep = browder_sweep(&s, &x, &[0.5, 0.2, 0.1, 0.05, 0.01], 1e-13, 100_000).unwrap();
    for (k, d) in sweep.ks.iter().zip(sweep.oracle_dist.as_ref().unwrap()) {
        println!("browder sweep step {k}: distance {d:.3e}");
    }
    println!("\n{}", run_km(&s, &x, 5).unwrap().to_csv());
}

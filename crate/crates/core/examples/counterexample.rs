//! Without a common fixed point, the averaged map can fix everything.

use semifix::fixedsets::counterexample_demo;

fn main() {
    let report = counterexample_demo(1).unwrap();
    print!("{}", report.to_text());
    for (x, s, t) in report.probes.iter().take(3) {
        println!("x = {x:>10.4}: |Sx - x| = {s:.1e}, |T(e1)x - x| = {t}");
    }
}

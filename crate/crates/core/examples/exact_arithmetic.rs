//! Exact surd arithmetic: parsing, certified floors and independence tests.

use semifix::exactreal::{is_independent_over_q, ExactReal};

fn main() {
    let x: ExactReal = "(sqrt(2) + sqrt(3) + 1)/6".parse().unwrap();
    let y: ExactReal = "(3 - sqrt(2))/6".parse().unwrap();
    let z: ExactReal = "(2 - sqrt(3))/6".parse().unwrap();
    println!("x + y + z = {}", &x + &y + &z);

    let s8: ExactReal = "sqrt(8)".parse().unwrap();
    println!("sqrt(8) = {s8}, squared = {}", &s8 * &s8);

    for k in [29i64, 35, 1000] {
        let kx = ExactReal::sqrt(2).scale_int(k);
        println!("{k} sqrt(2): floor {}, frac {:.12}", kx.floor(), kx.fractional_part().to_f64());
    }

    let families: [&[&str]; 3] = [&["sqrt(2)", "sqrt(3)"], &["sqrt(2)", "sqrt(8)"], &["sqrt(6)", "sqrt(2) + sqrt(3)"]];
    for fam in families {
        let xs: Vec<ExactReal> = fam.iter().map(|s| s.parse().unwrap()).collect();
        println!("{{1, {}}} independent over Q: {}", fam.join(", "), is_independent_over_q(&xs, true));
    }

    let a: ExactReal = "sqrt(2) - 1393/985".parse().unwrap();
    println!("sign of sqrt(2) - 1393/985: {:?} (value {:e})", a.signum(), a.to_f64());
}

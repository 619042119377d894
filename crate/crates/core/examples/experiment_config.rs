//! Runs an experiment described in TOML, as the command-line tool does.

use semifix::cli::{run_experiment, Experiment, ExperimentConfig};

const CONFIG: &str = r#"
[instance]
kind = "diagonal_matexp"
n = 2

[basis]
alphas = ["sqrt(2)", "sqrt(3)"]

[scheme]
name = "halpern"
K = 2000
u = [1.0, 0.5]
x1 = [0.0, 0.0]
schedule = "power:0.75"

[output]
stride = 500
"#;

fn main() {
    let cfg = ExperimentConfig::from_toml(CONFIG).unwrap();
    let out = run_experiment(Experiment::Iterate, &cfg).unwrap();
    print!("{}", out.report);
    print!("{}", out.csv.unwrap());
    println!("exit code {}", out.outcome.code());
    println!("\nnormalized config:\n{}", cfg.to_toml());
}

//! Driving an experiment from a TOML configuration, as the command line does.
//!
//! cargo run --example config_file

use retract_iter::cli::{certify_experiment, Experiment};
use retract_iter::iterate::run_scheme;

const CONFIG: &str = r#"
[space]
dim = 2
norm = "max"

[domain]
kind = "box"
lo = [-1.0, -1.0]
hi = [1.0, 1.0]

[mappings]
t1 = { expr = ["0.5 * x1", "-0.5 * x0"] }
t2 = { builtin = "scaled_sin", c = 0.9 }
retraction = { kind = "projection" }

[scheme]
kind = "paper_b"
alpha = { clipped_harmonic = { eps = 0.1, scale = 1.0 } }
beta = { constant = 0.3 }
x1 = [0.8, -0.4]
reference_p = [0.0, 0.0]

[certify]
samples = 300
n_max = 4
fixed_points = [[0.0, 0.0]]
"#;

fn main() {
    let exp = match Experiment::from_toml(CONFIG, std::path::Path::new(".")) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    let run = &exp.runs[0];
    let trace = run_scheme(&run.cfg, &exp.pair, run.reference_p.as_ref()).expect("run");
    println!(
        "{}: {} rows, {}, x_N = [{}]",
        run.name,
        trace.len(),
        trace.terminal,
        trace.final_x
    );

    let lines = certify_experiment(&exp).expect("certify");
    for l in lines.iter().filter(|l| l.n.is_none_or(|n| n == 1)) {
        println!(
            "{:<26} {:>12.4e} {}",
            l.check,
            l.value,
            if l.pass { "pass" } else { "fail" }
        );
    }

    let bad = CONFIG.replace("x1 = [0.8, -0.4]", "x1 = [1.5, 0.0]");
    println!(
        "\nwith x1 outside K: {}",
        Experiment::from_toml(&bad, std::path::Path::new(".")).unwrap_err()
    );
}

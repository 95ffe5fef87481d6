//! The two-mapping scheme on the builtin interval example, printed row by row.
//!
//! cargo run --example two_mapping_example

use retract_iter::iterate::{run_scheme, RunConfig, Scheme, StepSequence};
use retract_iter::mappings::MappingPair;
use retract_iter::space::Vector;

fn main() -> retract_iter::Result<()> {
    let pair = MappingPair::paper_example();
    let origin = Vector::scalar(0.0)?;

    for x1 in [1.0, -1.0, 0.37, -0.8] {
        let cfg = RunConfig::new(
            Scheme::PaperB,
            StepSequence::Constant(0.5),
            StepSequence::Constant(0.5),
            Vector::scalar(x1)?,
        );
        let trace = run_scheme(&cfg, &pair, Some(&origin))?;
        println!("x1 = {x1}: {} rows, {}", trace.len(), trace.terminal);
        println!(
            "{:>3} {:>24} {:>24} {:>12} {:>12}",
            "n", "x_n", "y_n", "r1", "r2"
        );
        for row in &trace.rows {
            let y = row
                .y
                .as_ref()
                .map_or_else(|| "-".to_string(), |y| y.to_string());
            println!(
                "{:>3} {:>24} {:>24} {:>12.3e} {:>12.3e}",
                row.n,
                row.x.to_string(),
                y,
                row.r1,
                row.r2
            );
        }
        println!();
    }

    // Without the tolerance stop the iterate sits on the fixed point.
    let cfg = RunConfig::new(
        Scheme::PaperB,
        StepSequence::Constant(0.5),
        StepSequence::Constant(0.5),
        Vector::scalar(1.0)?,
    )
    .fixed_length(500);
    let trace = run_scheme(&cfg, &pair, Some(&origin))?;
    println!(
        "fixed length: {} rows, final r_max {:e}",
        trace.len(),
        trace.final_r_max()
    );
    Ok(())
}

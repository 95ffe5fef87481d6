//! Mann, Ishikawa and the two-mapping scheme from a common start, with
//! fitted linear rates.
//!
//! cargo run --example compare_schemes

use retract_iter::diagnostics::rate_estimate;
use retract_iter::iterate::{compare_schemes, RunConfig, Scheme, StepSequence};
use retract_iter::mappings::{Builtin, MappingDef, MappingPair, RetractionDef};
use retract_iter::space::{ConvexDomain, NormSpec, Vector};

fn main() -> retract_iter::Result<()> {
    let k = ConvexDomain::interval(-1.0, 1.0)?;
    let pair = MappingPair::new(
        MappingDef::builtin(Builtin::ScaledSin { c: 0.8 }, k.clone())?,
        MappingDef::builtin(
            Builtin::Affine {
                a: vec![vec![-0.5]],
                b: vec![0.0],
            },
            k.clone(),
        )?,
        RetractionDef::metric_projection(k),
        NormSpec::Euclidean,
    )?;
    let x1 = Vector::scalar(0.9)?;
    let half = StepSequence::Constant(0.5);
    let cfgs: Vec<RunConfig> = [
        (Scheme::Mann, half.clone(), half.clone()),
        (Scheme::Ishikawa, half.clone(), half.clone()),
        (Scheme::PaperB, half.clone(), half.clone()),
        (
            Scheme::PaperB,
            StepSequence::ClippedHarmonic {
                eps: 0.1,
                scale: 1.0,
            },
            half,
        ),
    ]
    .into_iter()
    .map(|(s, a, b)| {
        let mut c = RunConfig::new(s, a, b, x1.clone());
        c.residual_tol = 1e-12;
        c
    })
    .collect();

    let origin = Vector::scalar(0.0)?;
    println!(
        "{:<10} {:>6} {:<12} {:>12} {:>10}",
        "scheme", "rows", "terminal", "final r_max", "rho"
    );
    for (cfg, result) in cfgs
        .iter()
        .zip(compare_schemes(&cfgs, &pair, Some(&origin)))
    {
        let trace = result?;
        let rho = rate_estimate(&trace).ok().and_then(|r| r.rho());
        println!(
            "{:<10} {:>6} {:<12} {:>12.3e} {:>10}",
            cfg.scheme.name(),
            trace.len(),
            trace.terminal.to_string(),
            trace.final_r_max(),
            rho.map_or_else(|| "-".into(), |r| format!("{r:.4}"))
        );
    }
    Ok(())
}

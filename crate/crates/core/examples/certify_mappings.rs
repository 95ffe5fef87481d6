//! Sampled estimates of the asymptotic constants k_n and the total
//! inequality margin for several mappings.
//!
//! cargo run --release --example certify_mappings

use retract_iter::certify::{check_total, estimate_kn, estimate_lipschitz, PhiSpec, SampleSpec};
use retract_iter::iterate::SummableSequence;
use retract_iter::mappings::{Builtin, BuiltinParams, MappingDef, RetractionDef};
use retract_iter::space::ConvexDomain;

fn main() -> retract_iter::Result<()> {
    let k = ConvexDomain::interval(-1.0, 1.0)?;
    let p = RetractionDef::metric_projection(k.clone());
    let samples = SampleSpec::new(2000, 7, k.clone());

    let cases = [
        ("paper_t1", BuiltinParams::default()),
        ("paper_t2", BuiltinParams::default()),
        (
            "scaled_sin",
            BuiltinParams {
                c: Some(0.5),
                ..Default::default()
            },
        ),
        (
            "affine",
            BuiltinParams {
                a: Some(vec![vec![2.0]]),
                ..Default::default()
            },
        ),
        ("outward_shift", BuiltinParams::default()),
    ];
    for (name, params) in cases {
        let m = MappingDef::builtin(Builtin::from_name(name, &params, 1)?, k.clone())?;
        let kn = estimate_kn(&m, &p, &samples, 5)?;
        let ks: Vec<String> = kn.per_n.iter().map(|r| format!("{:.4}", r.value)).collect();
        let total = check_total(
            &m,
            &p,
            &SummableSequence::Zero,
            &SummableSequence::Zero,
            PhiSpec::Identity,
            &samples,
            5,
        )?;
        println!("{:<32} k_n [{}] ({})", m.label(), ks.join(", "), kn.verdict);
        println!(
            "{:<32} nonexpansive margin {:+.3e} ({}), lipschitz {:.4}",
            "",
            total.margin,
            total.verdict,
            estimate_lipschitz(&m, &p, &samples, 1)?
        );
    }

    // The shift compounds under iteration, so a constant lambda_n leaves a margin.
    let m = MappingDef::builtin(Builtin::OutwardShift { delta: 0.1 }, k.clone())?;
    let lambda = SummableSequence::Table {
        values: vec![0.2; 5],
        sum_bound: 1.0,
    };
    let total = check_total(
        &m,
        &p,
        &SummableSequence::Zero,
        &lambda,
        PhiSpec::Identity,
        &samples,
        5,
    )?;
    println!(
        "outward_shift with lambda_n = 0.2: margin {:+.3e} ({})",
        total.margin, total.verdict
    );
    Ok(())
}

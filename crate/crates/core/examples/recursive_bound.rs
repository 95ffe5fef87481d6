//! The perturbed recursion a_{n+1} <= (1 + b_n) a_n + c_n on a real trace
//! and on a synthetic sequence that breaks it.
//!
//! cargo run --example recursive_bound

use retract_iter::certify::PhiSpec;
use retract_iter::diagnostics::{check_trace_bound, compute_bn_cn, verify_recursive_bound};
use retract_iter::iterate::{run_scheme, RunConfig, Scheme, StepSequence, SummableSequence};
use retract_iter::mappings::MappingPair;
use retract_iter::space::Vector;

fn main() -> retract_iter::Result<()> {
    let mu = SummableSequence::InversePower { c: 1.0, p: 2.0 };
    let lambda = SummableSequence::InversePower { c: 1.0, p: 2.0 };
    println!("{:>3} {:>12} {:>12}", "n", "b_n", "c_n");
    for n in 1..=5 {
        let (b, c) = compute_bn_cn(&mu, &lambda, 2.0, 1.0, PhiSpec::Identity, n)?;
        println!("{n:>3} {b:>12.6} {c:>12.6}");
    }

    let cfg = RunConfig::new(
        Scheme::PaperB,
        StepSequence::Constant(0.5),
        StepSequence::Constant(0.5),
        Vector::scalar(-0.6)?,
    )
    .fixed_length(40);
    let trace = run_scheme(
        &cfg,
        &MappingPair::paper_example(),
        Some(&Vector::scalar(0.0)?),
    )?;
    for (label, mu, lambda) in [
        (
            "mu = lambda = 0",
            SummableSequence::Zero,
            SummableSequence::Zero,
        ),
        ("mu = lambda = 1/n^2", mu.clone(), lambda.clone()),
    ] {
        let r = check_trace_bound(&trace, &mu, &lambda, 2.0, 1.0, PhiSpec::Identity, 1e-9)?;
        println!(
            "trace, {label}: {} violations, tail sums ({:.3}, {:.3}), limit {:.3e} ({})",
            r.violations.len(),
            r.tail_sum_b,
            r.tail_sum_c,
            r.limit_estimate,
            r.verdict
        );
    }

    // A sequence that grows geometrically escapes any summable perturbation.
    let a: Vec<f64> = (0..20).map(|n| 1.1f64.powi(n)).collect();
    let b: Vec<f64> = (1..20).map(|n| 1.0 / (n * n) as f64).collect();
    let r = verify_recursive_bound(&a, &b, &b, 1e-9)?;
    println!(
        "geometric growth: {} violations, first at n = {}",
        r.violations.len(),
        r.violations[0].n
    );
    Ok(())
}

//! Idempotence, nonexpansiveness and the sunny property for a few
//! candidate retractions, probed outside the domain.
//!
//! cargo run --release --example retractions

use retract_iter::certify::{check_retraction, SampleSpec};
use retract_iter::mappings::RetractionDef;
use retract_iter::space::{ConvexDomain, Vector};

fn show(label: &str, p: &RetractionDef, samples: &SampleSpec) -> retract_iter::Result<()> {
    let r = check_retraction(p, &samples.exterior()?, &[0.0, 0.5, 1.0, 2.0, 10.0])?;
    println!("{label} ({})", r.verdict);
    for (name, m) in r.metrics() {
        let at = m
            .worst
            .as_ref()
            .map_or_else(String::new, |w| format!(" at [{}]", w.x));
        println!("  {name:<14} {:.3e}{at}", m.value);
    }
    Ok(())
}

fn main() -> retract_iter::Result<()> {
    let interval = ConvexDomain::interval(-1.0, 1.0)?;
    let disk = ConvexDomain::ball(Vector::zeros(2)?, 1.0)?;
    let square = ConvexDomain::boxed(Vector::new(vec![-1.0, -1.0])?, Vector::new(vec![1.0, 1.0])?)?;

    show(
        "clamp onto [-1, 1]",
        &RetractionDef::metric_projection(interval.clone()),
        &SampleSpec::new(500, 1, interval.clone()),
    )?;
    show(
        "radial projection onto the unit disk",
        &RetractionDef::metric_projection(disk.clone()),
        &SampleSpec::new(500, 1, disk),
    )?;
    show(
        "clamp onto [-1, 1]^2",
        &RetractionDef::metric_projection(square.clone()),
        &SampleSpec::new(500, 1, square),
    )?;

    // Folding the outside back in is a retraction but not a sunny one.
    let fold = RetractionDef::expression(
        &["x > 1 ? max(2 - x, -1) : (x < -1 ? min(-2 - x, 1) : x)"],
        interval.clone(),
    )?;
    show(
        "fold at the endpoints",
        &fold,
        &SampleSpec::new(500, 1, interval.clone()),
    )?;

    // Shrinking everything toward 0 does not fix K.
    let shrink = RetractionDef::expression(&["clamp(0.9 * x, -1, 1)"], interval.clone())?;
    show(
        "shrink toward 0",
        &shrink,
        &SampleSpec::new(500, 1, interval),
    )?;
    Ok(())
}

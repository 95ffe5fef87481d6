//! When does P T share its fixed points with T? Weak inwardness decides.
//!
//! cargo run --example fixed_transfer

use retract_iter::certify::{check_fixed_transfer, check_weakly_inward_1d};
use retract_iter::mappings::{registry_get, MappingDef, RetractionDef};
use retract_iter::space::{ConvexDomain, Vector};

fn report(
    label: &str,
    m: &MappingDef,
    p: &RetractionDef,
    candidates: &[f64],
) -> retract_iter::Result<()> {
    let pts: Vec<Vector> = candidates
        .iter()
        .map(|c| Vector::scalar(*c))
        .collect::<Result<_, _>>()?;
    let inward = check_weakly_inward_1d(m)?;
    println!(
        "{label}: T({}) = {}, T({}) = {}, weakly inward: {}",
        inward.lo, inward.t_lo, inward.hi, inward.t_hi, inward.verdict
    );
    for row in check_fixed_transfer(m, p, &pts, 1e-12)? {
        println!(
            "  x = {:<6} |PTx - x| = {:.3e}  |Tx - x| = {:.3e}  agree: {}",
            row.x.to_string(),
            row.pt_residual,
            row.t_residual,
            row.agree()
        );
        if let Some(note) = row.note {
            println!("    {note}");
        }
    }
    Ok(())
}

fn main() -> retract_iter::Result<()> {
    let k = ConvexDomain::interval(-1.0, 1.0)?;
    let id = RetractionDef::identity_on(k.clone());
    report(
        "paper_t1",
        &registry_get("paper_t1")?,
        &id,
        &[0.0, 0.5, 1.0],
    )?;
    report(
        "paper_t2",
        &registry_get("paper_t2")?,
        &id,
        &[0.0, 0.5, -0.5],
    )?;

    let unit = ConvexDomain::interval(0.0, 1.0)?;
    let shift = MappingDef::expression(&["x + 1"], unit.clone())?;
    report(
        "x + 1 on [0, 1]",
        &shift,
        &RetractionDef::metric_projection(unit),
        &[0.0, 0.5, 1.0],
    )?;
    Ok(())
}

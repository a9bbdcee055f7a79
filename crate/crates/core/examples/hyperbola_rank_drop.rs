//! Level sets of F = x1 x2: a hyperbola through (1, 1), but the two axes
//! through (1, 0), where the rank drops at the origin.

use structrank::continuation::{
    manifold_probe, trace_curve, ContinuationOptions, ManifoldProbeOptions,
};
use structrank::datasets;

fn main() -> structrank::Result<()> {
    let sys = datasets::get("xy")?.system.expect("xy has equations");

    let branch = trace_curve(&sys, &[1.0, 1.0], &ContinuationOptions::new(0.05, 400))?;
    let worst = branch
        .points
        .iter()
        .map(|p| (p.x[0] * p.x[1] - 1.0).abs())
        .fold(0.0, f64::max);
    println!(
        "from (1, 1): {} points, max |x1 x2 - 1| = {worst:.2e}",
        branch.points.len()
    );

    let report = manifold_probe(&sys, &[1.0, 0.0], &ManifoldProbeOptions::default())?;
    println!(
        "from (1, 0): {} points sampled, {} rank drops, first near {:?}",
        report.samples,
        report.rank_drops.len(),
        report.rank_drops.first()
    );
    Ok(())
}

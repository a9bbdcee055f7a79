//! Traces the level set of f1 = x3^2, f2 = x3^4 + 1, f3 = x1^2 - x2 + x3^4
//! through (1, 1, 1), which is the parabola x2 = x1^2 in the plane x3 = 1.
//! Writes the branch as CSV to stdout.

use structrank::continuation::{trace_curve, ContinuationOptions};
use structrank::datasets;

fn main() -> structrank::Result<()> {
    let d = datasets::get("eqcep1")?;
    let sys = d.system.expect("eqcep1 has equations");
    let branch = trace_curve(&sys, &[1.0, 1.0, 1.0], &ContinuationOptions::new(0.05, 400))?;
    let worst = branch
        .points
        .iter()
        .map(|p| (p.x[1] - p.x[0] * p.x[0]).abs())
        .fold(0.0, f64::max);
    eprintln!(
        "{} points, max |x2 - x1^2| = {worst:.2e}",
        branch.points.len()
    );
    print!("{}", branch.to_csv());
    Ok(())
}

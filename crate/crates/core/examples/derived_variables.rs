//! Matching overestimates the rank when equations share a linear combination
//! of variables: here f3 and f4 both depend only on z = x1 + 2 x2.

use structrank::datasets;
use structrank::rank::{generic_rank_randomized, MonteCarloConfig};
use structrank::structural::structural_rank;

fn main() -> structrank::Result<()> {
    let d = datasets::get("example5")?;
    let bound = structural_rank(&d.structure.effective_pattern());
    let report =
        generic_rank_randomized(&d.structure, &MonteCarloConfig::default().with_trials(200))?;
    println!("effective-pattern matching bound: {bound}");
    println!(
        "randomized generic rank:          {}",
        report.estimated_rank
    );
    println!("histogram {:?}", report.rank_histogram);
    Ok(())
}

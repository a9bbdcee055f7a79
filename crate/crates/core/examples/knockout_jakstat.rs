//! Which single-species knockout makes the JAK/STAT network robust?

use structrank::datasets;
use structrank::structural::knockout_sweep;

fn main() -> structrank::Result<()> {
    let d = datasets::get("jakstat")?;
    for k in knockout_sweep(d.pattern().expect("plain pattern"))? {
        println!(
            "knock out {:>2}: maxrank {:>2}/{:<2} {}{}",
            k.node + 1,
            k.report.structural_rank,
            k.report.num_equations,
            k.report.classification,
            if k.flips_to_robust {
                "  <- becomes robust"
            } else {
                ""
            }
        );
    }
    Ok(())
}

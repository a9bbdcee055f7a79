//! Random polynomial instances of a structure have Jacobian rank equal to the
//! structural rank at almost every point.
//!
//! Usage: `cargo run --example certify_acr -- [dataset] [trials]`

use structrank::datasets;
use structrank::rank::{certify_acr, MonteCarloConfig};

fn main() -> structrank::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "sole26".into());
    let trials = args.next().and_then(|t| t.parse().ok()).unwrap_or(1000);
    let d = datasets::get(&name)?;
    let pattern = d.pattern().ok_or(structrank::Error::DerivedVariables)?;
    let report = certify_acr(pattern, &MonteCarloConfig::default().with_trials(trials))?;
    println!("{name}: structural rank {}", report.target_rank);
    println!("histogram {:?}", report.rank_histogram);
    println!(
        "agreement {:.1}% ({})",
        100.0 * report.agreement_fraction(),
        if report.passed() { "pass" } else { "fail" }
    );
    Ok(())
}

//! F + c Fmax has maximal rank for all but finitely many c, where Fmax is a
//! rank maximizer. Sweeps c over [-2, 2] at a fixed point.

use structrank::datasets;
use structrank::poly::{sample_system, CoefficientDistribution};
use structrank::rank::{rank_maximizer_sweep, RankTolerance};

fn main() -> structrank::Result<()> {
    let d = datasets::get("eqcep1")?;
    let f = d.system.expect("eqcep1 has equations");
    let f_max = sample_system(&d.structure, 2, 7, CoefficientDistribution::Uniform)?;
    let grid: Vec<f64> = (0..=100).map(|i| -2.0 + 0.04 * i as f64).collect();
    let sweep = rank_maximizer_sweep(
        &f,
        &f_max,
        &[0.4, -0.3, 0.7],
        &grid,
        &RankTolerance::default(),
    )?;
    let max = sweep.iter().map(|&(_, r)| r).max().unwrap_or(0);
    let low: Vec<f64> = sweep
        .iter()
        .filter(|&&(_, r)| r < max)
        .map(|&(c, _)| c)
        .collect();
    println!(
        "max rank {max}; {} of {} grid values fall below it: {low:?}",
        low.len(),
        sweep.len()
    );
    Ok(())
}

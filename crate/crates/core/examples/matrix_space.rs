//! Generic rank of a linear span of matrices: the span of the identity and
//! E12 reaches rank 2, while two multiples of one rank-one matrix stay at rank 1.

use nalgebra::DMatrix;
use structrank::rank::{matrix_space_rank, RankTolerance};

fn main() -> structrank::Result<()> {
    let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
    let b = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    // rank-one matrices whose span never exceeds rank one
    let u = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
    let v = DMatrix::from_row_slice(2, 2, &[3.0, 6.0, 6.0, 12.0]);
    let tol = RankTolerance::default();
    for (name, basis) in [
        ("span(I, E12)", vec![a, b]),
        ("span(u u^T, 3 u u^T)", vec![u, v]),
    ] {
        let r = matrix_space_rank(&basis, 200, 0, &tol)?;
        println!(
            "{name}: generic rank {} {:?}",
            r.estimated_rank, r.rank_histogram
        );
    }
    Ok(())
}

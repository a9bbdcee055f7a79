//! Structural rank and classification of every bundled dataset.

use structrank::datasets;
use structrank::structural::classify;

fn main() {
    println!(
        "{:<14} {:>4} {:>4} {:>5} {:>4}  class",
        "dataset", "M", "N", "rank", "dim"
    );
    for d in datasets::all() {
        let Some(p) = d.pattern() else {
            println!(
                "{:<14} (derived variables, see the derived_variables example)",
                d.name
            );
            continue;
        };
        let r = classify(p);
        println!(
            "{:<14} {:>4} {:>4} {:>5} {:>4}  {}",
            d.name,
            r.num_equations,
            r.num_variables,
            r.structural_rank,
            r.solution_dimension,
            r.classification
        );
    }
}

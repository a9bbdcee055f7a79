//! Fragile systems lose their solutions under small perturbations; robust
//! ones keep them.

use structrank::continuation::{perturbation_probe, PerturbationOptions};
use structrank::datasets;
use structrank::poly::{sample_system, CoefficientDistribution};

fn main() -> structrank::Result<()> {
    let opts = PerturbationOptions::default();

    let eqcep1 = datasets::get("eqcep1")?
        .system
        .expect("eqcep1 has equations");
    let fragile = perturbation_probe(&eqcep1, &[1.0, 1.0, 1.0], &[0.0, 0.1, 0.0], &opts)?;
    println!(
        "eqcep1, delta (0, 0.1, 0): solved {}, residual floor {:.4}",
        fragile.solved, fragile.residual_floor
    );

    let robust4 = datasets::get("robust4")?;
    let sys = sample_system(&robust4.structure, 2, 0, CoefficientDistribution::Uniform)?;
    let p = [0.3, -0.2, 0.5, 0.1];
    let robust = perturbation_probe(&sys, &p, &[1e-3, 0.0, 0.0, 0.0], &opts)?;
    println!(
        "robust4 instance, |delta| = 1e-3: solved {}, solution {:?}",
        robust.solved, robust.solution
    );
    Ok(())
}

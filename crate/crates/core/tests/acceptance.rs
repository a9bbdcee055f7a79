//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance` (add `--release` for timings
//! representative of an optimized build).

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use structrank::continuation::{
    manifold_probe, perturbation_probe, trace_curve, ContinuationOptions, ManifoldProbeOptions,
    PerturbationOptions,
};
use structrank::datasets;
use structrank::matching::{is_valid_matching, maximum_matching};
use structrank::poly::{sample_system, CoefficientDistribution};
use structrank::rank::{
    certify_acr, generic_rank_randomized, numeric_rank, rank_maximizer_sweep, MonteCarloConfig,
    RankTolerance,
};
use structrank::structural::{classify, knockout_sweep, structural_rank, Classification};
use structrank::{DerivedVariableSpec, GeneralizedStructure, Structure, StructurePattern};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("{what} took {elapsed:?}, limit {limit:?}")
    })
}

fn criterion_1() -> Check {
    let expected = [
        ("cep3", 2, 1, Classification::Fragile),
        ("robust4", 4, 0, Classification::Robust),
        ("twogene", 4, 0, Classification::Robust),
        ("jakstat", 11, 1, Classification::Fragile),
        ("trophic5", 4, 1, Classification::Fragile),
        ("trophic5plus", 5, 0, Classification::Robust),
        ("sole26", 20, 6, Classification::Fragile),
        ("robotarm", 3, 3, Classification::Robust),
    ];
    let mut slowest = Duration::ZERO;
    for (name, rank, dim, class) in expected {
        let d = datasets::get(name).map_err(|e| e.to_string())?;
        let p = d.pattern().ok_or(format!("{name} has no plain pattern"))?;
        let t = Instant::now();
        let r = classify(p);
        let elapsed = t.elapsed();
        slowest = slowest.max(elapsed);
        within(elapsed, Duration::from_millis(10), name)?;
        ensure(
            r.structural_rank == rank && r.solution_dimension == dim && r.classification == class,
            || {
                format!(
                    "{name}: got rank {} dim {} {}",
                    r.structural_rank, r.solution_dimension, r.classification
                )
            },
        )?;
        ensure(classify(p) == r, || {
            format!("{name}: classification not deterministic")
        })?;
    }
    Ok(format!("8 datasets, slowest {slowest:?}"))
}

fn criterion_2() -> Check {
    let d = datasets::get("jakstat").map_err(|e| e.to_string())?;
    let t = Instant::now();
    let sweep = knockout_sweep(d.pattern().unwrap()).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    within(elapsed, Duration::from_millis(100), "sweep")?;
    let flips: Vec<usize> = sweep
        .iter()
        .filter(|k| k.flips_to_robust)
        .map(|k| k.node + 1)
        .collect();
    ensure(flips == [12], || format!("flipping nodes {flips:?}"))?;
    // the two sink mRNA species are SOCS3mRNA (10) and CD274mRNA (12)
    ensure(!sweep[9].flips_to_robust, || "node 10 flips".into())?;
    Ok(format!("flips {flips:?} in {elapsed:?}"))
}

fn criterion_3() -> Check {
    let cfg = MonteCarloConfig::default();
    let mut worst = 1.0f64;
    let mut slowest = Duration::ZERO;
    let mut count = 0;
    for d in datasets::all() {
        let Some(p) = d.pattern() else { continue };
        let t = Instant::now();
        let r = certify_acr(p, &cfg).map_err(|e| e.to_string())?;
        let elapsed = t.elapsed();
        within(elapsed, Duration::from_secs(10), d.name)?;
        slowest = slowest.max(elapsed);
        worst = worst.min(r.agreement_fraction());
        count += 1;
        ensure(r.agreement_fraction() >= 0.99, || {
            format!(
                "{}: agreement {:.3}, histogram {:?}",
                d.name,
                r.agreement_fraction(),
                r.rank_histogram
            )
        })?;
    }
    Ok(format!(
        "{count} datasets, worst agreement {worst:.3}, slowest {slowest:?}"
    ))
}

fn criterion_4() -> Check {
    let d = datasets::get("example5").map_err(|e| e.to_string())?;
    let bound = structural_rank(&d.structure.effective_pattern());
    let t = Instant::now();
    let r = generic_rank_randomized(&d.structure, &MonteCarloConfig::default().with_trials(200))
        .map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    within(elapsed, Duration::from_secs(5), "estimate")?;
    ensure(r.estimated_rank == 3 && bound == 4, || {
        format!("estimated {} with bound {bound}", r.estimated_rank)
    })?;
    Ok(format!("rank 3 < bound 4 in {elapsed:?}"))
}

fn criterion_5() -> Check {
    let sys = datasets::get("eqcep1").unwrap().system.unwrap();
    let t = Instant::now();
    let branch = trace_curve(&sys, &[1.0, 1.0, 1.0], &ContinuationOptions::new(0.05, 400))
        .map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    within(elapsed, Duration::from_secs(2), "trace")?;
    let c = [1.0, 2.0, 1.0];
    let mut worst_tangent = 0.0f64;
    for pt in &branch.points {
        let x = &pt.x;
        ensure(
            (x[1] - x[0] * x[0]).abs() <= 1e-6 && (x[2] - 1.0).abs() <= 1e-6,
            || format!("point {x:?} off the parabola"),
        )?;
        let f = sys.evaluate(x).unwrap();
        let res = f
            .iter()
            .zip(c)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        ensure(res <= 1e-8, || format!("residual {res:e} at {x:?}"))?;
        let j = sys.jacobian(x).unwrap().matrix;
        let jt = (j * DVector::from_column_slice(&pt.tangent)).norm();
        worst_tangent = worst_tangent.max(jt);
        ensure(jt <= 1e-6, || format!("|DF t| = {jt:e} at {x:?}"))?;
    }
    ensure(branch.points.len() > 100, || {
        format!("only {} points", branch.points.len())
    })?;
    Ok(format!(
        "{} points, max |DF t| {worst_tangent:.1e}, {elapsed:?}",
        branch.points.len()
    ))
}

fn criterion_6() -> Check {
    let sys = datasets::get("xy").unwrap().system.unwrap();
    let branch = trace_curve(&sys, &[1.0, 1.0], &ContinuationOptions::new(0.05, 400))
        .map_err(|e| e.to_string())?;
    for pt in &branch.points {
        let v = (pt.x[0] * pt.x[1] - 1.0).abs();
        ensure(v <= 1e-6, || format!("|x1 x2 - 1| = {v:e} at {:?}", pt.x))?;
    }
    ensure(!branch.rank_drops().any(|_| true), || {
        "rank drop on the hyperbola".into()
    })?;
    let report = manifold_probe(&sys, &[1.0, 0.0], &ManifoldProbeOptions::default())
        .map_err(|e| e.to_string())?;
    let near = report
        .rank_drops
        .first()
        .ok_or("no rank drop from (1, 0)")?;
    ensure(near.iter().all(|v| v.abs() <= 10.0), || {
        format!("drop outside box at {near:?}")
    })?;
    Ok(format!(
        "hyperbola {} points; drop near ({:.1e}, {:.1e})",
        branch.points.len(),
        near[0],
        near[1]
    ))
}

/// Minimum over x3 in [-3, 3] of the residual of x3^2 = 1, x3^4 + 1 = 2.1.
fn perturbation_floor_oracle() -> (f64, f64) {
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..=60_000 {
        let x = -3.0 + 1e-4 * i as f64;
        let r = ((x * x - 1.0).powi(2) + (x.powi(4) - 1.1).powi(2)).sqrt();
        if r < best.0 {
            best = (r, x);
        }
    }
    best
}

fn criterion_7() -> Check {
    let (oracle, at) = perturbation_floor_oracle();
    ensure(oracle >= 0.02, || format!("oracle floor {oracle}"))?;

    let t = Instant::now();
    let opts = PerturbationOptions::default();
    let eqcep1 = datasets::get("eqcep1").unwrap().system.unwrap();
    let fragile = perturbation_probe(&eqcep1, &[1.0, 1.0, 1.0], &[0.0, 0.1, 0.0], &opts)
        .map_err(|e| e.to_string())?;
    ensure(!fragile.solved && fragile.residual_floor >= 0.02, || {
        format!("solved {} floor {}", fragile.solved, fragile.residual_floor)
    })?;
    ensure((fragile.residual_floor - oracle).abs() <= 1e-3, || {
        format!(
            "floor {} disagrees with oracle {oracle}",
            fragile.residual_floor
        )
    })?;

    let robust4 = datasets::get("robust4").unwrap();
    let sys = sample_system(&robust4.structure, 2, 0, CoefficientDistribution::Uniform)
        .map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let p: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let dir: DVector<f64> = DVector::from_fn(4, |_, _| rng.random_range(-1.0..=1.0));
    let delta: Vec<f64> = (&dir * (1e-3 / dir.norm())).iter().copied().collect();
    let robust = perturbation_probe(&sys, &p, &delta, &opts).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    within(elapsed, Duration::from_secs(5), "probes")?;
    let x = robust
        .solution
        .as_ref()
        .ok_or("robust4 instance not solved")?;
    let dist = x
        .iter()
        .zip(&p)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    ensure(dist <= 1e-2, || format!("solution {dist:e} away from p"))?;
    Ok(format!(
        "floor {:.5} (oracle {oracle:.5} at x3 = {at:.4}); robust4 moved {dist:.1e}; {elapsed:?}",
        fragile.residual_floor
    ))
}

fn random_pattern(rng: &mut ChaCha8Rng, m: usize, n: usize, density: f64) -> StructurePattern {
    let entries: Vec<(usize, usize)> = (0..m)
        .flat_map(|e| (0..n).map(move |v| (e, v)))
        .filter(|_| rng.random_bool(density))
        .collect();
    StructurePattern::new(m, n, entries).unwrap()
}

fn random_structure(rng: &mut ChaCha8Rng) -> Structure {
    let m = rng.random_range(1..=5);
    let n = rng.random_range(1..=5);
    let base = random_pattern(rng, m, n, 0.5);
    if n < 2 || !rng.random_bool(0.3) {
        return Structure::Pattern(base);
    }
    let coeffs = [
        (0, rng.random_range(0.5..2.0)),
        (n - 1, -rng.random_range(0.5..2.0)),
    ];
    let z = DerivedVariableSpec::new("z", coeffs.into_iter().collect()).unwrap();
    let names: Vec<Vec<&str>> = (0..m)
        .map(|_| {
            if rng.random_bool(0.5) {
                vec!["z"]
            } else {
                vec![]
            }
        })
        .collect();
    Structure::Generalized(GeneralizedStructure::new(base, vec![z], &names).unwrap())
}

fn jacobian_vs_finite_differences() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x00fd);
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let s = random_structure(&mut rng);
        let degree = rng.random_range(1..=3);
        let sys = sample_system(&s, degree, trial, CoefficientDistribution::Uniform).unwrap();
        let x: Vec<f64> = (0..s.num_variables())
            .map(|_| rng.random_range(-1.5..1.5))
            .collect();
        let j = sys.jacobian(&x).unwrap().matrix;
        let mut fd = DMatrix::zeros(j.nrows(), j.ncols());
        for i in 0..x.len() {
            let h = 1e-5 * x[i].abs().max(1.0);
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[i] += h;
            xm[i] -= h;
            let (fp, fm) = (sys.evaluate(&xp).unwrap(), sys.evaluate(&xm).unwrap());
            for e in 0..fp.len() {
                fd[(e, i)] = (fp[e] - fm[e]) / (2.0 * h);
            }
        }
        let err = (&j - &fd).amax() / j.amax().max(1.0);
        worst = worst.max(err);
        ensure(err <= 1e-5, || {
            format!("trial {trial}: relative error {err:e}")
        })?;
    }
    Ok(format!("jacobian max rel err {worst:.1e}"))
}

fn numeric_below_structural() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b0d);
    let tol = RankTolerance::default();
    for trial in 0..1000 {
        let m = rng.random_range(1..=8);
        let n = rng.random_range(1..=8);
        let density = rng.random_range(0.1..0.9);
        let p = random_pattern(&mut rng, m, n, density);
        // small integers make exact cancellations likely
        let integers = trial % 2 == 0;
        let a = DMatrix::from_fn(m, n, |e, v| {
            if !p.contains(e, v) {
                0.0
            } else if integers {
                rng.random_range(-2..=2) as f64
            } else {
                rng.random_range(-1.0..1.0)
            }
        });
        let r = numeric_rank(&a, &tol).unwrap();
        let s = structural_rank(&p);
        ensure(r <= s, || {
            format!("trial {trial}: numeric {r} > structural {s}")
        })?;
    }
    Ok("1000 matrices, 0 violations".into())
}

fn sweep_sub_maximal_fraction() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let tol = RankTolerance::default();
    let grid: Vec<f64> = (0..=100).map(|i| -5.0 + 0.1 * i as f64).collect();
    let patterns: Vec<StructurePattern> = datasets::all()
        .iter()
        .filter_map(|d| d.pattern().cloned())
        .collect();
    let (mut low, mut total) = (0usize, 0usize);
    for trial in 0..50u64 {
        let p = patterns[trial as usize % patterns.len()].clone();
        let s = Structure::Pattern(p.clone());
        let f = sample_system(&s, 2, 2 * trial, CoefficientDistribution::Uniform).unwrap();
        let f_max = sample_system(&s, 2, 2 * trial + 1, CoefficientDistribution::Uniform).unwrap();
        let x: Vec<f64> = (0..p.num_variables())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let target = structural_rank(&p);
        for (_, r) in rank_maximizer_sweep(&f, &f_max, &x, &grid, &tol).unwrap() {
            total += 1;
            low += usize::from(r < target);
        }
    }
    let frac = low as f64 / total as f64;
    ensure(frac <= 0.01, || format!("sub-maximal fraction {frac:.4}"))?;
    Ok(format!("sweep sub-maximal {low}/{total}"))
}

/// Minimum vertex cover by brute force over subsets of equations.
fn min_vertex_cover(p: &StructurePattern) -> usize {
    let m = p.num_equations();
    (0u32..1 << m)
        .map(|rows| {
            let mut cols = 0u32;
            for e in (0..m).filter(|e| rows >> e & 1 == 0) {
                for &v in p.row(e) {
                    cols |= 1 << v;
                }
            }
            (rows.count_ones() + cols.count_ones()) as usize
        })
        .min()
        .unwrap()
}

fn exhaustive_small_patterns() -> Check {
    let mut count = 0;
    for m in 1..=4usize {
        for n in 1..=4usize {
            for mask in 0u32..1 << (m * n) {
                let entries = (0..m * n)
                    .filter(|k| mask >> k & 1 == 1)
                    .map(|k| (k / n, k % n));
                let p = StructurePattern::new(m, n, entries).unwrap();
                let matching = maximum_matching(&p);
                let pairs = matching.pairs();
                ensure(
                    pairs.len() == matching.size && is_valid_matching(&p, &pairs),
                    || format!("invalid witness for {m}x{n} mask {mask:#x}"),
                )?;
                let cover = min_vertex_cover(&p);
                ensure(cover == matching.size, || {
                    format!(
                        "{m}x{n} mask {mask:#x}: matching {} but cover {cover}",
                        matching.size
                    )
                })?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} patterns exhaustive"))
}

fn criterion_8() -> Check {
    let t = Instant::now();
    let parts = [
        jacobian_vs_finite_differences()?,
        numeric_below_structural()?,
        sweep_sub_maximal_fraction()?,
        exhaustive_small_patterns()?,
    ];
    let elapsed = t.elapsed();
    within(elapsed, Duration::from_secs(60), "property suites")?;
    Ok(format!("{}; {elapsed:?}", parts.join("; ")))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("structural ranks of annotated datasets", criterion_1),
        ("jakstat knockout flips exactly node 12", criterion_2),
        ("certify_acr agreement on bundled patterns", criterion_3),
        (
            "derived-variable generic rank below matching bound",
            criterion_4,
        ),
        ("eqcep1 branch stays on the parabola", criterion_5),
        ("xy hyperbola and axis rank drop", criterion_6),
        ("perturbation probes, fragile and robust", criterion_7),
        ("property suites", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

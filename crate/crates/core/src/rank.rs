//! Numerical rank and randomized generic-rank estimation.
//!
//! Floating-point rank counts singular values above
//! `max(relative_threshold * sigma_1, absolute_floor)`. The randomized
//! estimators sample polynomial members of a structure at random points;
//! rank drops only on null sets, so the maximum observed rank estimates the
//! generic rank.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{sample_system, CoefficientDistribution, StructuredPolySystem};
use crate::structural::structural_rank;
use crate::structure::{Structure, StructurePattern};

/// Default fraction of trials that must agree for certification to pass.
pub const DEFAULT_PASS_THRESHOLD: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankTolerance {
    pub relative_threshold: f64,
    pub absolute_floor: f64,
}

impl Default for RankTolerance {
    fn default() -> Self {
        Self {
            relative_threshold: 1e-8,
            absolute_floor: 1e-12,
        }
    }
}

impl RankTolerance {
    pub fn new(relative_threshold: f64, absolute_floor: f64) -> Result<Self> {
        let tol = Self {
            relative_threshold,
            absolute_floor,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        let rel = self.relative_threshold;
        if !(rel.is_finite() && rel > 0.0 && rel < 1.0) {
            return Err(Error::invalid(format!(
                "relative threshold {rel} must lie in (0, 1)"
            )));
        }
        if !(self.absolute_floor.is_finite() && self.absolute_floor >= 0.0) {
            return Err(Error::invalid(format!(
                "absolute floor {} must be finite and nonnegative",
                self.absolute_floor
            )));
        }
        Ok(())
    }

    /// Cutoff below which singular values count as zero.
    pub fn cutoff(&self, largest_singular_value: f64) -> f64 {
        (self.relative_threshold * largest_singular_value).max(self.absolute_floor)
    }

    /// Rank from singular values sorted in descending order.
    pub fn rank_of(&self, singular_values: &[f64]) -> usize {
        let Some(&largest) = singular_values.first() else {
            return 0;
        };
        let cutoff = self.cutoff(largest);
        singular_values.iter().take_while(|&&s| s > cutoff).count()
    }
}

pub fn numeric_rank(a: &DMatrix<f64>, tol: &RankTolerance) -> Result<usize> {
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("matrix"));
    }
    if a.is_empty() {
        return Ok(0);
    }
    let mut sv: Vec<f64> = a.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(tol.rank_of(&sv))
}

/// Settings shared by the Monte Carlo estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloConfig {
    pub trials: usize,
    pub degree: u32,
    pub seed: u64,
    pub distribution: CoefficientDistribution,
    pub tolerance: RankTolerance,
    pub pass_threshold: f64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            degree: 2,
            seed: 0,
            distribution: CoefficientDistribution::Uniform,
            tolerance: RankTolerance::default(),
            pass_threshold: DEFAULT_PASS_THRESHOLD,
        }
    }
}

impl MonteCarloConfig {
    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_degree(mut self, degree: u32) -> Self {
        self.degree = degree;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if !(self.pass_threshold > 0.0 && self.pass_threshold <= 1.0) {
            return Err(Error::invalid("pass threshold must lie in (0, 1]"));
        }
        self.tolerance.validate()
    }
}

/// Outcome of a Monte Carlo rank experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificationReport {
    pub trials: usize,
    pub agreement_count: usize,
    /// Maximum observed rank.
    pub estimated_rank: usize,
    /// Rank counted as agreement: the structural rank when certifying a
    /// pattern, otherwise the estimated rank.
    pub target_rank: usize,
    pub rank_histogram: BTreeMap<usize, usize>,
    pub seed: u64,
    pub tolerance: RankTolerance,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub degree: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub distribution: Option<CoefficientDistribution>,
    /// Region points are drawn from.
    pub point_domain: String,
    pub pass_threshold: f64,
}

impl CertificationReport {
    fn from_ranks(
        ranks: &[usize],
        target: Option<usize>,
        seed: u64,
        tolerance: RankTolerance,
    ) -> Self {
        let mut rank_histogram = BTreeMap::new();
        for &r in ranks {
            *rank_histogram.entry(r).or_insert(0) += 1;
        }
        let estimated_rank = ranks.iter().copied().max().unwrap_or(0);
        let target_rank = target.unwrap_or(estimated_rank);
        Self {
            trials: ranks.len(),
            agreement_count: rank_histogram.get(&target_rank).copied().unwrap_or(0),
            estimated_rank,
            target_rank,
            rank_histogram,
            seed,
            tolerance,
            degree: None,
            distribution: None,
            point_domain: "[-1,1]^N".into(),
            pass_threshold: DEFAULT_PASS_THRESHOLD,
        }
    }

    pub fn agreement_fraction(&self) -> f64 {
        self.agreement_count as f64 / self.trials as f64
    }

    pub fn passed(&self) -> bool {
        self.agreement_fraction() >= self.pass_threshold
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trial seed; depends only on `(seed, trial)`, so parallel and
/// sequential runs agree.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    splitmix64(splitmix64(seed) ^ trial as u64)
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

fn sampled_ranks(structure: &Structure, cfg: &MonteCarloConfig) -> Result<Vec<usize>> {
    cfg.validate()?;
    if cfg.degree == 0 {
        return Err(Error::invalid("degree must be at least 1"));
    }
    (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let s = trial_seed(cfg.seed, i);
            let sys = sample_system(structure, cfg.degree, s, cfg.distribution)?;
            let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(s));
            let x = random_point(&mut rng, structure.num_variables());
            numeric_rank(&sys.jacobian(&x)?.matrix, &cfg.tolerance)
        })
        .collect()
}

/// Estimates the generic rank of any structure (derived variables included)
/// as the maximum numeric Jacobian rank over random members and points.
pub fn generic_rank_randomized(
    structure: &Structure,
    cfg: &MonteCarloConfig,
) -> Result<CertificationReport> {
    let ranks = sampled_ranks(structure, cfg)?;
    let mut report = CertificationReport::from_ranks(&ranks, None, cfg.seed, cfg.tolerance);
    report.degree = Some(cfg.degree);
    report.distribution = Some(cfg.distribution);
    report.pass_threshold = cfg.pass_threshold;
    Ok(report)
}

/// Counts trials whose numeric rank equals the structural rank of `p`.
pub fn certify_acr(p: &StructurePattern, cfg: &MonteCarloConfig) -> Result<CertificationReport> {
    let ranks = sampled_ranks(&Structure::Pattern(p.clone()), cfg)?;
    let mut report =
        CertificationReport::from_ranks(&ranks, Some(structural_rank(p)), cfg.seed, cfg.tolerance);
    report.degree = Some(cfg.degree);
    report.distribution = Some(cfg.distribution);
    report.pass_threshold = cfg.pass_threshold;
    Ok(report)
}

/// Rank of random linear combinations (coefficients uniform on `[-1, 1]`)
/// of a matrix basis.
pub fn matrix_space_rank(
    basis: &[DMatrix<f64>],
    trials: usize,
    seed: u64,
    tol: &RankTolerance,
) -> Result<CertificationReport> {
    let first = basis
        .first()
        .ok_or_else(|| Error::invalid("matrix space basis is empty"))?;
    if let Some(bad) = basis.iter().find(|b| b.shape() != first.shape()) {
        return Err(Error::invalid(format!(
            "basis matrices must share a shape: {:?} vs {:?}",
            first.shape(),
            bad.shape()
        )));
    }
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    tol.validate()?;
    let ranks = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, i));
            let mut a = DMatrix::zeros(first.nrows(), first.ncols());
            for b in basis {
                a += b * rng.random_range(-1.0..=1.0);
            }
            numeric_rank(&a, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = CertificationReport::from_ranks(&ranks, None, seed, *tol);
    report.point_domain = "coefficients in [-1,1]^k".into();
    Ok(report)
}

/// Rank of `D(F + c Fmax)(x)` for each `c` on the grid.
pub fn rank_maximizer_sweep(
    f: &StructuredPolySystem,
    f_max: &StructuredPolySystem,
    x: &[f64],
    c_grid: &[f64],
    tol: &RankTolerance,
) -> Result<Vec<(f64, usize)>> {
    if f.structure() != f_max.structure() {
        return Err(Error::structure("systems do not share a structure"));
    }
    let jf = f.jacobian(x)?.matrix;
    let jmax = f_max.jacobian(x)?.matrix;
    c_grid
        .iter()
        .map(|&c| Ok((c, numeric_rank(&(&jf + &jmax * c), tol)?)))
        .collect()
}

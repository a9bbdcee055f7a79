//! Numerical exploration of level sets `SolSet(p) = {x : F(x) = F(p)}`.
//!
//! Near a point where `DF` has rank `rho`, the level set is a manifold of
//! dimension `N - rho` whose tangent space is the kernel of `DF`. The tracer
//! follows one-dimensional level sets with a kernel predictor and a
//! Gauss-Newton corrector (truncated pseudo-inverse step, so `M != N` and
//! `rho < M` are handled alike). Rank drops between consecutive points are
//! caught either directly or by a sign change of
//! `det([U^T DF(x); K^T])`, with `U`, `K` the range and kernel frames of the
//! earlier point.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::FullSvd;
use crate::poly::StructuredPolySystem;
use crate::rank::RankTolerance;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationOptions {
    /// Nominal arclength step.
    pub step: f64,
    /// Upper bound on the number of points in a branch, start point included.
    pub max_points: usize,
    /// Largest accepted distance between consecutive points.
    pub max_step: f64,
    /// Tracing stops when a point leaves `[-R, R]^N`.
    pub domain_radius: f64,
    /// Acceptance threshold for `||F(x) - c||`.
    pub residual_tol: f64,
    /// The corrector stops early once the residual is below this.
    pub corrector_tol: f64,
    pub max_corrector_iterations: usize,
    /// Consecutive step halvings before a branch is abandoned.
    pub max_halvings: usize,
    pub rank_tolerance: RankTolerance,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self::new(0.05, 400)
    }
}

impl ContinuationOptions {
    pub fn new(step: f64, max_points: usize) -> Self {
        Self {
            step,
            max_points,
            max_step: 2.0 * step,
            domain_radius: 10.0,
            residual_tol: 1e-8,
            corrector_tol: 1e-10,
            max_corrector_iterations: 25,
            max_halvings: 10,
            rank_tolerance: RankTolerance::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::invalid(format!(
                "step {} must be positive",
                self.step
            )));
        }
        if self.max_step.is_nan() || self.max_step < self.step {
            return Err(Error::invalid("max_step must be at least step"));
        }
        if self.max_points == 0 {
            return Err(Error::invalid("max_points must be at least 1"));
        }
        if !(self.domain_radius.is_finite() && self.domain_radius > 0.0) {
            return Err(Error::invalid("domain radius must be positive"));
        }
        self.rank_tolerance.validate()
    }
}

/// Tracing direction relative to the initial kernel vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// Why (part of) a branch stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum BranchEvent {
    MaxPoints {
        direction: Direction,
    },
    DomainExit {
        direction: Direction,
    },
    /// The branch returned to its start point.
    Closed,
    /// The Jacobian rank fell below the start rank at or between accepted points.
    RankDrop {
        direction: Direction,
        near: Vec<f64>,
        rank: usize,
    },
    /// Rank above the start rank: the start point itself was exceptional.
    RankJump {
        direction: Direction,
        at: Vec<f64>,
        rank: usize,
    },
    CorrectorFailure {
        direction: Direction,
        at: Vec<f64>,
    },
}

impl BranchEvent {
    pub fn is_rank_drop(&self) -> bool {
        matches!(self, BranchEvent::RankDrop { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub x: Vec<f64>,
    /// `||F(x) - c||`.
    pub residual: f64,
    pub rank: usize,
    /// Orthonormal kernel basis of `DF(x)`.
    pub kernel: Vec<Vec<f64>>,
    /// Unit predictor tangent at `x`.
    pub tangent: Vec<f64>,
    /// Arclength step used to reach this point (0 for the start point).
    pub step: f64,
    pub corrector_iterations: usize,
}

/// A traced piece of `SolSet(p)`, ordered along the curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionBranch {
    pub base_point: Vec<f64>,
    pub target: Vec<f64>,
    pub rank: usize,
    pub dimension: usize,
    /// Position of the base point in `points`.
    pub base_index: usize,
    pub points: Vec<BranchPoint>,
    pub events: Vec<BranchEvent>,
}

impl SolutionBranch {
    pub fn rank_drops(&self) -> impl Iterator<Item = &BranchEvent> {
        self.events.iter().filter(|e| e.is_rank_drop())
    }

    pub fn is_closed(&self) -> bool {
        self.events.contains(&BranchEvent::Closed)
    }

    /// One row per point: coordinates, residual, rank.
    pub fn to_csv(&self) -> String {
        let n = self.base_point.len();
        let mut out = (1..=n)
            .map(|i| format!("x{i}"))
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(",residual,rank\n");
        for p in &self.points {
            for v in &p.x {
                out.push_str(&format!("{v},"));
            }
            out.push_str(&format!("{},{}\n", p.residual, p.rank));
        }
        out
    }
}

/// Local dimension of the level set through a point.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalDimension {
    pub dimension: usize,
    pub rank: usize,
    /// Orthonormal kernel basis, `dimension` vectors of length `N`.
    pub kernel: Vec<Vec<f64>>,
}

pub fn local_dimension(
    sys: &StructuredPolySystem,
    p: &[f64],
    tol: &RankTolerance,
) -> Result<LocalDimension> {
    let state = PointState::at(sys, DVector::from_column_slice(p), tol)?;
    Ok(LocalDimension {
        dimension: state.dimension(),
        rank: state.rank,
        kernel: columns(&state.kernel),
    })
}

fn columns(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.column_iter()
        .map(|c| c.iter().copied().collect())
        .collect()
}

/// Jacobian data at one point.
struct PointState {
    x: DVector<f64>,
    jac: DMatrix<f64>,
    svd: FullSvd,
    rank: usize,
    kernel: DMatrix<f64>,
}

impl PointState {
    fn at(sys: &StructuredPolySystem, x: DVector<f64>, tol: &RankTolerance) -> Result<Self> {
        let jac = sys.jacobian(x.as_slice())?.matrix;
        let svd = FullSvd::new(&jac)?;
        let rank = tol.rank_of(&svd.singular_values);
        let kernel = svd.kernel(rank);
        Ok(Self {
            x,
            jac,
            svd,
            rank,
            kernel,
        })
    }

    fn dimension(&self) -> usize {
        self.x.len() - self.rank
    }

    /// `det([U^T J; K^T])` with this point's range/kernel frames.
    fn frame_det(&self, jac: &DMatrix<f64>) -> f64 {
        let n = self.x.len();
        let range = self.svd.range(self.rank);
        let mut b = DMatrix::zeros(n, n);
        b.rows_mut(0, self.rank)
            .copy_from(&(range.transpose() * jac));
        b.rows_mut(self.rank, n - self.rank)
            .copy_from(&self.kernel.transpose());
        b.determinant()
    }
}

/// Unit vector in the kernel closest to `prev`.
fn align_tangent(kernel: &DMatrix<f64>, prev: &DVector<f64>) -> DVector<f64> {
    let projected = kernel * (kernel.transpose() * prev);
    let norm = projected.norm();
    if norm > 1e-12 {
        projected / norm
    } else {
        kernel.column(0).into_owned()
    }
}

fn segment_distance(a: &DVector<f64>, b: &DVector<f64>, q: &DVector<f64>) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 {
        ((q - a).dot(&ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (a + ab * t - q).norm()
}

/// Level set `F(x) = target` of one system.
struct LevelSet<'a> {
    sys: &'a StructuredPolySystem,
    target: DVector<f64>,
    opts: ContinuationOptions,
}

struct Corrected {
    x: DVector<f64>,
    residual: f64,
    iterations: usize,
}

struct Walk {
    points: Vec<BranchPoint>,
    event: Option<BranchEvent>,
}

impl<'a> LevelSet<'a> {
    fn residual(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(DVector::from_vec(self.sys.evaluate(x.as_slice())?) - &self.target)
    }

    /// Gauss-Newton with truncated pseudo-inverse steps, using at most
    /// `max_rank` singular triplets.
    fn correct(&self, start: DVector<f64>, max_rank: usize) -> Option<Corrected> {
        let tol = &self.opts.rank_tolerance;
        let mut x = start;
        for it in 0..=self.opts.max_corrector_iterations {
            let r = self.residual(&x).ok()?;
            let norm = r.norm();
            if !norm.is_finite() {
                return None;
            }
            if norm <= self.opts.corrector_tol || it == self.opts.max_corrector_iterations {
                return (norm <= self.opts.residual_tol).then_some(Corrected {
                    x,
                    residual: norm,
                    iterations: it,
                });
            }
            let jac = self.sys.jacobian(x.as_slice()).ok()?.matrix;
            let svd = FullSvd::new(&jac).ok()?;
            let rank = tol.rank_of(&svd.singular_values).min(max_rank);
            let dx = svd.solve_truncated(&(-r), rank);
            if !dx.iter().all(|v| v.is_finite()) {
                return None;
            }
            x += dx;
        }
        None
    }

    fn branch_point(
        &self,
        state: &PointState,
        tangent: &DVector<f64>,
        step: f64,
        iterations: usize,
    ) -> Result<BranchPoint> {
        Ok(BranchPoint {
            x: state.x.iter().copied().collect(),
            residual: self.residual(&state.x)?.norm(),
            rank: state.rank,
            kernel: columns(&state.kernel),
            tangent: tangent.iter().copied().collect(),
            step,
            corrector_iterations: iterations,
        })
    }

    /// Steps along the level set from `start` until the budget is used or
    /// something stops the walk. `closure_base` enables return-to-start detection.
    fn walk(
        &self,
        start: &PointState,
        tangent: DVector<f64>,
        budget: usize,
        direction: Direction,
        closure_base: Option<&DVector<f64>>,
    ) -> Result<Walk> {
        let opts = &self.opts;
        let rho = start.rank;
        let mut points = Vec::new();
        let mut h = opts.step;
        let mut halvings = 0;
        let mut tangent = tangent;
        let mut current = PointState::at(self.sys, start.x.clone(), &opts.rank_tolerance)?;
        while points.len() < budget {
            let predicted = &current.x + &tangent * h;
            let corrected = self
                .correct(predicted, rho)
                .filter(|c| (&c.x - &current.x).norm() <= opts.max_step);
            let Some(c) = corrected else {
                h *= 0.5;
                halvings += 1;
                if halvings > opts.max_halvings {
                    return Ok(Walk {
                        points,
                        event: Some(BranchEvent::CorrectorFailure {
                            direction,
                            at: current.x.iter().copied().collect(),
                        }),
                    });
                }
                continue;
            };
            if c.x.amax() > opts.domain_radius {
                return Ok(Walk {
                    points,
                    event: Some(BranchEvent::DomainExit { direction }),
                });
            }
            let next = PointState::at(self.sys, c.x.clone(), &opts.rank_tolerance)?;
            let sign_flip = current.frame_det(&current.jac) * current.frame_det(&next.jac) < 0.0;
            if next.rank < rho || sign_flip {
                let near = if next.rank < rho {
                    next.x.clone()
                } else {
                    (&current.x + &next.x) * 0.5
                };
                return Ok(Walk {
                    points,
                    event: Some(BranchEvent::RankDrop {
                        direction,
                        near: near.iter().copied().collect(),
                        rank: next.rank.min(rho.saturating_sub(1)),
                    }),
                });
            }
            if next.rank > rho {
                return Ok(Walk {
                    points,
                    event: Some(BranchEvent::RankJump {
                        direction,
                        at: next.x.iter().copied().collect(),
                        rank: next.rank,
                    }),
                });
            }
            tangent = align_tangent(&next.kernel, &tangent);
            points.push(self.branch_point(&next, &tangent, h, c.iterations)?);
            let closed = closure_base.is_some_and(|base| {
                points.len() >= 3 && segment_distance(&current.x, &next.x, base) < opts.step / 2.0
            });
            current = next;
            if closed {
                return Ok(Walk {
                    points,
                    event: Some(BranchEvent::Closed),
                });
            }
            halvings = 0;
            h = (2.0 * h).min(opts.step);
        }
        Ok(Walk {
            points,
            event: Some(BranchEvent::MaxPoints { direction }),
        })
    }
}

/// Traces the one-dimensional level set through `p` in both kernel directions.
pub fn trace_curve(
    sys: &StructuredPolySystem,
    p: &[f64],
    opts: &ContinuationOptions,
) -> Result<SolutionBranch> {
    opts.validate()?;
    let start = PointState::at(sys, DVector::from_column_slice(p), &opts.rank_tolerance)?;
    if start.dimension() != 1 {
        return Err(Error::WrongDimension {
            expected: 1,
            found: start.dimension(),
        });
    }
    let target = DVector::from_vec(sys.evaluate(p)?);
    let level = LevelSet {
        sys,
        target: target.clone(),
        opts: *opts,
    };
    let t0: DVector<f64> = start.kernel.column(0).into_owned();
    let base = level.branch_point(&start, &t0, 0.0, 0)?;

    let remaining = opts.max_points - 1;
    let forward = level.walk(
        &start,
        t0.clone(),
        remaining.div_ceil(2),
        Direction::Forward,
        Some(&start.x),
    )?;
    let mut events: Vec<BranchEvent> = forward.event.into_iter().collect();
    let mut backward_points = Vec::new();
    if !events.contains(&BranchEvent::Closed) {
        let budget = remaining - forward.points.len();
        let backward = level.walk(&start, -t0, budget, Direction::Backward, Some(&start.x))?;
        events.extend(backward.event);
        backward_points = backward.points;
    }
    let base_index = backward_points.len();
    let mut points: Vec<BranchPoint> = backward_points.into_iter().rev().collect();
    points.push(base);
    points.extend(forward.points);
    Ok(SolutionBranch {
        base_point: p.to_vec(),
        target: target.iter().copied().collect(),
        rank: start.rank,
        dimension: 1,
        base_index,
        points,
        events,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldProbeOptions {
    /// Number of level-set points to visit (or jitter attempts when the set is 0-dimensional).
    pub samples: usize,
    /// Steps per ray before a new random direction is drawn.
    pub ray_length: usize,
    /// Size of the perturbation used for the isolated-point check.
    pub jitter: f64,
    pub seed: u64,
    pub continuation: ContinuationOptions,
}

impl Default for ManifoldProbeOptions {
    fn default() -> Self {
        Self {
            samples: 50,
            ray_length: 25,
            jitter: 1e-3,
            seed: 0,
            continuation: ContinuationOptions::new(0.1, usize::MAX),
        }
    }
}

/// Outcome of an isolated-point check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsolatedEvidence {
    pub attempts: usize,
    pub converged: usize,
    /// Converged runs that landed back on `p`.
    pub returned: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldProbeReport {
    pub dimension: usize,
    pub rank: usize,
    pub samples: usize,
    pub rank_drops: Vec<Vec<f64>>,
    pub rank_jumps: usize,
    pub corrector_failures: usize,
    pub domain_exits: usize,
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub isolated: Option<IsolatedEvidence>,
}

impl ManifoldProbeReport {
    /// Every visited point kept the start rank.
    pub fn rank_constant(&self) -> bool {
        self.rank_drops.is_empty() && self.rank_jumps == 0
    }

    pub fn isolated_confirmed(&self) -> bool {
        self.isolated
            .is_some_and(|e| e.converged > 0 && e.returned == e.converged)
    }
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Samples `SolSet(p)` along random kernel rays (both senses of each ray)
/// and records any rank change; for 0-dimensional level sets, checks that
/// nearby starts correct back onto `p`.
pub fn manifold_probe(
    sys: &StructuredPolySystem,
    p: &[f64],
    opts: &ManifoldProbeOptions,
) -> Result<ManifoldProbeReport> {
    let copts = opts.continuation;
    copts.validate()?;
    let start = PointState::at(sys, DVector::from_column_slice(p), &copts.rank_tolerance)?;
    let level = LevelSet {
        sys,
        target: DVector::from_vec(sys.evaluate(p)?),
        opts: copts,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut report = ManifoldProbeReport {
        dimension: start.dimension(),
        rank: start.rank,
        samples: 0,
        rank_drops: Vec::new(),
        rank_jumps: 0,
        corrector_failures: 0,
        domain_exits: 0,
        max_residual: 0.0,
        isolated: None,
    };

    if start.dimension() == 0 {
        let mut evidence = IsolatedEvidence {
            attempts: opts.samples,
            converged: 0,
            returned: 0,
        };
        for _ in 0..opts.samples {
            let x0 = &start.x + random_unit(&mut rng, p.len()) * opts.jitter;
            match level.correct(x0, start.rank) {
                Some(c) => {
                    evidence.converged += 1;
                    report.max_residual = report.max_residual.max(c.residual);
                    if (&c.x - &start.x).norm() <= 1e-6 {
                        evidence.returned += 1;
                    }
                }
                None => report.corrector_failures += 1,
            }
        }
        report.isolated = Some(evidence);
        return Ok(report);
    }

    let max_rays = 4 * opts.samples.max(1);
    let mut rays = 0;
    while report.samples < opts.samples && rays < max_rays {
        let coeffs = random_unit(&mut rng, start.dimension());
        let dir = &start.kernel * coeffs;
        for (sense, direction) in [(1.0, Direction::Forward), (-1.0, Direction::Backward)] {
            rays += 1;
            let budget = opts.ray_length.min(opts.samples - report.samples);
            if budget == 0 {
                break;
            }
            let walk = level.walk(&start, &dir * sense, budget, direction, None)?;
            report.samples += walk.points.len();
            for pt in &walk.points {
                report.max_residual = report.max_residual.max(pt.residual);
            }
            match walk.event {
                Some(BranchEvent::RankDrop { near, .. }) => report.rank_drops.push(near),
                Some(BranchEvent::RankJump { .. }) => report.rank_jumps += 1,
                Some(BranchEvent::CorrectorFailure { .. }) => report.corrector_failures += 1,
                Some(BranchEvent::DomainExit { .. }) => report.domain_exits += 1,
                _ => {}
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationOptions {
    pub residual_tol: f64,
    /// Iteration cap per start.
    pub max_newton: usize,
    /// Jittered restarts in addition to the start at `p`.
    pub restarts: usize,
    /// Restart offsets are uniform in `[-jitter, jitter]` per coordinate,
    /// scaled by `max(1, |p|_inf)`.
    pub jitter: f64,
    pub seed: u64,
}

impl Default for PerturbationOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-8,
            max_newton: 100,
            restarts: 20,
            jitter: 0.5,
            seed: 0,
        }
    }
}

/// Result of solving `F(x) = F(p) + delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationProbe {
    pub delta: Vec<f64>,
    pub solved: bool,
    pub solution: Option<Vec<f64>>,
    /// Best residual found over all starts.
    pub residual_floor: f64,
    pub divergent_restarts: usize,
}

/// Levenberg-Marquardt on `||F(x) - target||^2`. Returns the best point,
/// its residual norm, and whether the run diverged.
fn least_squares(
    sys: &StructuredPolySystem,
    target: &DVector<f64>,
    start: DVector<f64>,
    opts: &PerturbationOptions,
) -> (DVector<f64>, f64, bool) {
    let residual = |x: &DVector<f64>| -> Option<DVector<f64>> {
        let r = DVector::from_vec(sys.evaluate(x.as_slice()).ok()?) - target;
        r.iter().all(|v| v.is_finite()).then_some(r)
    };
    let Some(mut r) = residual(&start) else {
        return (start, f64::INFINITY, true);
    };
    let mut x = start;
    let mut cost = r.norm();
    let mut lambda = 1e-3;
    for _ in 0..opts.max_newton {
        if cost <= opts.residual_tol {
            break;
        }
        let Ok(jac) = sys.jacobian(x.as_slice()) else {
            return (x, cost, true);
        };
        let j = jac.matrix;
        let jtj = j.transpose() * &j;
        let g = j.transpose() * &r;
        let mut improved = false;
        let mut last_step = 0.0;
        while lambda < 1e12 {
            let mut a = jtj.clone();
            for i in 0..a.nrows() {
                a[(i, i)] += lambda * jtj[(i, i)].max(1e-9);
            }
            let Some(chol) = a.cholesky() else {
                lambda *= 4.0;
                continue;
            };
            let dx = chol.solve(&(-&g));
            let xn = &x + &dx;
            if let Some(rn) = residual(&xn) {
                let cn = rn.norm();
                if cn < cost {
                    last_step = dx.norm();
                    x = xn;
                    r = rn;
                    cost = cn;
                    lambda = (lambda / 3.0).max(1e-15);
                    improved = true;
                    break;
                }
            }
            lambda *= 4.0;
        }
        if !improved || last_step <= 1e-15 * (1.0 + x.norm()) {
            break;
        }
        if x.amax() > 1e8 {
            return (x, cost, true);
        }
    }
    (x, cost, false)
}

/// Tries to solve the perturbed system `F(x) = F(p) + delta` from `p` and
/// from jittered restarts.
pub fn perturbation_probe(
    sys: &StructuredPolySystem,
    p: &[f64],
    delta: &[f64],
    opts: &PerturbationOptions,
) -> Result<PerturbationProbe> {
    if delta.len() != sys.num_equations() {
        return Err(Error::DimensionMismatch {
            expected: sys.num_equations(),
            found: delta.len(),
        });
    }
    if delta.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("perturbation"));
    }
    let target = DVector::from_vec(sys.evaluate(p)?) + DVector::from_column_slice(delta);
    let base = DVector::from_column_slice(p);
    let scale = opts.jitter * base.amax().max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(DVector<f64>, f64)> = None;
    let mut divergent = 0;
    for k in 0..=opts.restarts {
        let x0 = if k == 0 {
            base.clone()
        } else {
            base.map(|v| v + scale * rng.random_range(-1.0..=1.0))
        };
        let (x, cost, diverged) = least_squares(sys, &target, x0, opts);
        if diverged {
            divergent += 1;
        }
        if cost.is_finite() && best.as_ref().is_none_or(|(_, c)| cost < *c) {
            best = Some((x, cost));
        }
        if best.as_ref().is_some_and(|(_, c)| *c <= opts.residual_tol) {
            break;
        }
    }
    let (solution, floor) = match best {
        Some((x, c)) => (Some(x.iter().copied().collect::<Vec<_>>()), c),
        None => (None, f64::INFINITY),
    };
    let solved = floor <= opts.residual_tol;
    Ok(PerturbationProbe {
        delta: delta.to_vec(),
        solved,
        solution: solution.filter(|_| solved),
        residual_floor: floor,
        divergent_restarts: divergent,
    })
}

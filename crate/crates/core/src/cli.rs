//! Command-line front end. The binary is a thin wrapper around [`run`].

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::continuation::{
    manifold_probe, perturbation_probe, trace_curve, ContinuationOptions, ManifoldProbeOptions,
    PerturbationOptions, SolutionBranch,
};
use crate::datasets;
use crate::error::{Error, Result};
use crate::io::{self, InputFormat, ParsedStructure};
use crate::poly::{sample_system, CoefficientDistribution, StructuredPolySystem};
use crate::rank::{
    certify_acr, generic_rank_randomized, matrix_space_rank, CertificationReport, MonteCarloConfig,
    RankTolerance,
};
use crate::structural::{classify_structure, knockout_sweep, RankReport};
use crate::structure::{Structure, StructurePattern, SystemGraph};

/// Environment variable holding the default `--format`.
pub const FORMAT_ENV: &str = "STRUCTRANK_FORMAT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Dot,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "structrank",
    version,
    about = "Generic Jacobian rank and robustness of structured systems"
)]
pub struct AnalysisRequest {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, env = FORMAT_ENV, default_value = "text")]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Built-in dataset name.
    #[arg(long, conflicts_with = "input")]
    pub dataset: Option<String>,

    /// Structure file (.json, .edges or .pat), or a system JSON for trace and probe.
    pub input: Option<PathBuf>,

    /// Override format detection from the file extension.
    #[arg(long, value_parser = parse_input_format)]
    pub input_format: Option<InputFormat>,
}

fn parse_input_format(s: &str) -> std::result::Result<InputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct ToleranceArgs {
    /// Relative singular-value threshold.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,

    /// Absolute singular-value floor.
    #[arg(long, default_value_t = 1e-12)]
    pub floor: f64,
}

impl ToleranceArgs {
    fn tolerance(&self) -> Result<RankTolerance> {
        RankTolerance::new(self.tol, self.floor)
    }
}

#[derive(Debug, Args)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Total degree of sampled polynomials.
    #[arg(long, default_value_t = 2)]
    pub degree: u32,

    #[arg(long, default_value = "uniform", value_parser = parse_distribution)]
    pub distribution: CoefficientDistribution,

    /// Fraction of agreeing trials needed to pass.
    #[arg(long, default_value_t = crate::rank::DEFAULT_PASS_THRESHOLD)]
    pub pass_threshold: f64,

    #[command(flatten)]
    pub tolerance: ToleranceArgs,
}

fn parse_distribution(s: &str) -> std::result::Result<CoefficientDistribution, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl SamplingArgs {
    fn config(&self) -> Result<MonteCarloConfig> {
        Ok(MonteCarloConfig {
            trials: self.trials,
            degree: self.degree,
            seed: self.seed,
            distribution: self.distribution,
            tolerance: self.tolerance.tolerance()?,
            pass_threshold: self.pass_threshold,
        })
    }
}

/// How trace and probe obtain a concrete system and start point.
#[derive(Debug, Args)]
pub struct SystemArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Start point, comma separated. Defaults to the dataset's base point or a
    /// random point in [-1, 1]^N.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub from: Option<Vec<f64>>,

    /// Seed for sampling a system when the input is only a structure.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 2)]
    pub degree: u32,

    #[command(flatten)]
    pub tolerance: ToleranceArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Structural rank and a matching that witnesses it.
    Rank(InputArgs),
    /// Robust or fragile, with the generic solution-set dimension.
    Classify(InputArgs),
    /// Classify every single-node knockout of a square system.
    Knockout(InputArgs),
    /// Check by random instantiation that generic numeric rank equals the structural rank.
    Certify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Estimate the generic rank by random instantiation; handles derived variables.
    GenericRank {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Trace the one-dimensional solution set through a point.
    Trace {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 400)]
        max_points: usize,
    },
    /// Perturb the target value and try to re-solve, or sample the solution set with --manifold.
    Probe {
        #[command(flatten)]
        system: SystemArgs,
        /// Perturbation of F(p), comma separated.
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            required_unless_present = "manifold"
        )]
        delta: Option<Vec<f64>>,
        #[arg(long)]
        manifold: bool,
        /// Rays (or jittered starts for isolated points) sampled with --manifold.
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
    },
    /// Generic rank of the span of a list of matrices.
    MatrixSpace {
        /// JSON file of the form {"matrices": [[[row], ...], ...]}.
        path: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        tolerance: ToleranceArgs,
    },
}

/// Exit status plus rendered output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (program name first) and executes the request.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match AnalysisRequest::try_parse_from(args) {
        Ok(req) => match execute(&req) {
            Ok(stdout) => Outcome {
                code: 0,
                stdout,
                stderr: String::new(),
            },
            Err(e) => Outcome {
                code: if e.is_input_error() { 2 } else { 1 },
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            },
        },
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            }
        }
    }
}

struct Loaded {
    label: String,
    structure: Structure,
    graph: Option<SystemGraph>,
    system: Option<StructuredPolySystem>,
    base_point: Option<Vec<f64>>,
}

fn load(input: &InputArgs) -> Result<Loaded> {
    match (&input.dataset, &input.input) {
        (Some(name), None) => {
            let d = datasets::get(name)?;
            Ok(Loaded {
                label: d.name.to_string(),
                structure: d.structure,
                graph: d.graph,
                system: d.system,
                base_point: d.base_point,
            })
        }
        (None, Some(path)) => {
            let label = path.display().to_string();
            let format = input.input_format.or_else(|| InputFormat::from_path(path));
            if format == Some(InputFormat::Json) {
                let text = io::read_file(path)?;
                if io::is_system_json(&text) {
                    let sys = io::system_from_json(&text)?;
                    return Ok(Loaded {
                        label,
                        structure: sys.structure().clone(),
                        graph: None,
                        system: Some(sys),
                        base_point: None,
                    });
                }
            }
            let parsed = io::parse_structure(path, input.input_format)?;
            Ok(Loaded {
                label,
                structure: parsed.to_structure(),
                graph: match parsed {
                    ParsedStructure::Graph(g) => Some(g),
                    _ => None,
                },
                system: None,
                base_point: None,
            })
        }
        (None, None) => Err(Error::invalid("give an input file or --dataset")),
        (Some(_), Some(_)) => Err(Error::invalid(
            "give either an input file or --dataset, not both",
        )),
    }
}

fn unsupported_format(format: OutputFormat, command: &str) -> Error {
    Error::invalid(format!("--format {format:?} is not available for {command}").to_lowercase())
}

pub fn execute(req: &AnalysisRequest) -> Result<String> {
    let format = req.format;
    match &req.command {
        Command::Rank(input) => {
            let l = load(input)?;
            let r = classify_structure(&l.structure)?;
            match format {
                OutputFormat::Text => Ok(format!("{}: maxrank {}\n", l.label, r.structural_rank)),
                _ => render_report(&l, &r, format, "rank"),
            }
        }
        Command::Classify(input) => {
            let l = load(input)?;
            let r = classify_structure(&l.structure)?;
            render_report(&l, &r, format, "classify")
        }
        Command::Knockout(input) => knockout(&load(input)?, format),
        Command::Certify { input, sampling } => {
            let l = load(input)?;
            let pattern = l.structure.as_pattern().ok_or(Error::DerivedVariables)?;
            let report = certify_acr(pattern, &sampling.config()?)?;
            render_certification(&l.label, &report, format, "certify", true)
        }
        Command::GenericRank { input, sampling } => {
            let l = load(input)?;
            let report = generic_rank_randomized(&l.structure, &sampling.config()?)?;
            render_certification(&l.label, &report, format, "generic-rank", false)
        }
        Command::Trace {
            system,
            step,
            max_points,
        } => {
            let (sys, p, note) = concrete_system(system)?;
            let mut opts = ContinuationOptions::new(*step, *max_points);
            opts.rank_tolerance = system.tolerance.tolerance()?;
            let branch = trace_curve(&sys, &p, &opts)?;
            render_branch(&branch, &note, format)
        }
        Command::Probe {
            system,
            delta,
            manifold,
            samples,
            restarts,
        } => {
            let (sys, p, note) = concrete_system(system)?;
            let tol = system.tolerance.tolerance()?;
            if *manifold {
                let mut opts = ManifoldProbeOptions {
                    samples: *samples,
                    seed: system.seed,
                    ..ManifoldProbeOptions::default()
                };
                opts.continuation.rank_tolerance = tol;
                let report = manifold_probe(&sys, &p, &opts)?;
                match format {
                    OutputFormat::Json => Ok(to_json(&report)),
                    OutputFormat::Text => {
                        let mut out = note;
                        let _ = writeln!(
                            out,
                            "rank {} at p, local dimension {}",
                            report.rank, report.dimension
                        );
                        if let Some(iso) = report.isolated {
                            let _ = writeln!(
                                out,
                                "isolated point: {}/{} jittered starts converged, {} returned to p",
                                iso.converged, iso.attempts, iso.returned
                            );
                        } else {
                            let _ = writeln!(
                                out,
                                "sampled {} points, max residual {:.3e}",
                                report.samples, report.max_residual
                            );
                            let _ = writeln!(
                                out,
                                "rank drops {}, rank jumps {}, corrector failures {}, domain exits {}",
                                report.rank_drops.len(),
                                report.rank_jumps,
                                report.corrector_failures,
                                report.domain_exits
                            );
                            for x in &report.rank_drops {
                                let _ = writeln!(out, "  rank drop near {}", fmt_point(x));
                            }
                        }
                        let _ = writeln!(
                            out,
                            "{}",
                            if report.rank_constant() {
                                "rank constant: manifold evidence"
                            } else {
                                "rank changed: exceptional point evidence"
                            }
                        );
                        Ok(out)
                    }
                    other => Err(unsupported_format(other, "probe")),
                }
            } else {
                let delta = delta
                    .as_deref()
                    .ok_or_else(|| Error::invalid("--delta is required"))?;
                let opts = PerturbationOptions {
                    restarts: *restarts,
                    seed: system.seed,
                    ..PerturbationOptions::default()
                };
                let probe = perturbation_probe(&sys, &p, delta, &opts)?;
                match format {
                    OutputFormat::Json => Ok(to_json(&probe)),
                    OutputFormat::Text => {
                        let mut out = note;
                        let _ = writeln!(out, "delta {}", fmt_point(&probe.delta));
                        if let Some(x) = &probe.solution {
                            let _ = writeln!(out, "solved: perturbed solution at {}", fmt_point(x));
                        } else {
                            let _ = writeln!(
                                out,
                                "not solved: residual floor {:.6e}",
                                probe.residual_floor
                            );
                        }
                        let _ = writeln!(out, "divergent restarts {}", probe.divergent_restarts);
                        Ok(out)
                    }
                    other => Err(unsupported_format(other, "probe")),
                }
            }
        }
        Command::MatrixSpace {
            path,
            trials,
            seed,
            tolerance,
        } => {
            let basis = read_matrices(path)?;
            let report = matrix_space_rank(&basis, *trials, *seed, &tolerance.tolerance()?)?;
            render_certification(
                &path.display().to_string(),
                &report,
                format,
                "matrix-space",
                false,
            )
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn fmt_point(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn fmt_matching(pairs: &[(usize, usize)]) -> String {
    let parts: Vec<String> = pairs
        .iter()
        .map(|(e, v)| format!("f{}-x{}", e + 1, v + 1))
        .collect();
    parts.join(" ")
}

fn render_report(
    l: &Loaded,
    r: &RankReport,
    format: OutputFormat,
    command: &str,
) -> Result<String> {
    match format {
        OutputFormat::Json => Ok(to_json(r)),
        OutputFormat::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "{}: M = {} equations, N = {} variables",
                l.label, r.num_equations, r.num_variables
            );
            let _ = writeln!(out, "maxrank {}", r.structural_rank);
            let _ = writeln!(out, "class {}", r.classification);
            let _ = writeln!(
                out,
                "generic solution sets are {}-flat",
                r.solution_dimension
            );
            let _ = writeln!(out, "matching {}", fmt_matching(&r.matching));
            Ok(out)
        }
        OutputFormat::Dot => Ok(match &l.graph {
            Some(g) => io::graph_to_dot(g),
            None => io::pattern_to_dot(&l.structure.effective_pattern(), &r.matching),
        }),
        OutputFormat::Csv => Err(unsupported_format(format, command)),
    }
}

#[derive(Serialize, Deserialize)]
struct KnockoutRow {
    node: usize,
    rank: usize,
    #[serde(rename = "M")]
    m: usize,
    class: String,
    dim: usize,
    flips_to_robust: bool,
}

#[derive(Serialize, Deserialize)]
struct KnockoutDocument {
    intact: RankReport,
    knockouts: Vec<KnockoutRow>,
}

fn knockout(l: &Loaded, format: OutputFormat) -> Result<String> {
    let pattern: &StructurePattern = l.structure.as_pattern().ok_or(Error::DerivedVariables)?;
    let intact = classify_structure(&l.structure)?;
    let sweep = knockout_sweep(pattern)?;
    let rows: Vec<KnockoutRow> = sweep
        .iter()
        .map(|k| KnockoutRow {
            node: k.node + 1,
            rank: k.report.structural_rank,
            m: k.report.num_equations,
            class: k.report.classification.to_string(),
            dim: k.report.solution_dimension,
            flips_to_robust: k.flips_to_robust,
        })
        .collect();
    match format {
        OutputFormat::Json => Ok(to_json(&KnockoutDocument {
            intact,
            knockouts: rows,
        })),
        OutputFormat::Csv => {
            let mut out = String::from("node,rank,M,class,dim,flips_to_robust\n");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.node, r.rank, r.m, r.class, r.dim, r.flips_to_robust
                );
            }
            Ok(out)
        }
        OutputFormat::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "{}: intact maxrank {} of {}, {}",
                l.label, intact.structural_rank, intact.num_equations, intact.classification
            );
            let _ = writeln!(out, "{:>5} {:>8} {:>8}  flip", "node", "maxrank", "class");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{:>5} {:>8} {:>8}  {}",
                    r.node,
                    format!("{}/{}", r.rank, r.m),
                    r.class,
                    if r.flips_to_robust {
                        "fragile -> robust"
                    } else {
                        ""
                    }
                );
            }
            let flips: Vec<String> = rows
                .iter()
                .filter(|r| r.flips_to_robust)
                .map(|r| r.node.to_string())
                .collect();
            let _ = writeln!(
                out,
                "knockouts that make the system robust: {}",
                if flips.is_empty() {
                    "none".to_string()
                } else {
                    flips.join(", ")
                }
            );
            Ok(out)
        }
        OutputFormat::Dot => Ok(match &l.graph {
            Some(g) => io::graph_to_dot(g),
            None => io::pattern_to_dot(pattern, &intact.matching),
        }),
    }
}

fn render_certification(
    label: &str,
    r: &CertificationReport,
    format: OutputFormat,
    command: &str,
    against_structure: bool,
) -> Result<String> {
    match format {
        OutputFormat::Json => Ok(to_json(r)),
        OutputFormat::Csv => {
            let mut out = String::from("rank,count\n");
            for (rank, count) in &r.rank_histogram {
                let _ = writeln!(out, "{rank},{count}");
            }
            Ok(out)
        }
        OutputFormat::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "{label}: seed {}, {} trials", r.seed, r.trials);
            if let (Some(d), Some(dist)) = (r.degree, r.distribution) {
                let _ = writeln!(
                    out,
                    "degree {d}, {dist} coefficients, points in {}",
                    r.point_domain
                );
            }
            let _ = writeln!(
                out,
                "tolerance rel {:e}, floor {:e}",
                r.tolerance.relative_threshold, r.tolerance.absolute_floor
            );
            let hist: Vec<String> = r
                .rank_histogram
                .iter()
                .map(|(k, v)| format!("{k}: {v}"))
                .collect();
            let _ = writeln!(out, "rank histogram {{{}}}", hist.join(", "));
            let _ = writeln!(out, "estimated maxrank {}", r.estimated_rank);
            if against_structure {
                let _ = writeln!(
                    out,
                    "structural rank {}, agreement {:.1}% -> {}",
                    r.target_rank,
                    100.0 * r.agreement_fraction(),
                    if r.passed() { "PASS" } else { "FAIL" }
                );
            } else {
                let _ = writeln!(
                    out,
                    "trials at maxrank {:.1}%",
                    100.0 * r.agreement_fraction()
                );
            }
            Ok(out)
        }
        OutputFormat::Dot => Err(unsupported_format(format, command)),
    }
}

fn concrete_system(args: &SystemArgs) -> Result<(StructuredPolySystem, Vec<f64>, String)> {
    let l = load(&args.input)?;
    let mut note = String::new();
    let sys = match l.system {
        Some(s) => s,
        None => {
            let _ = writeln!(
                note,
                "{}: random degree-{} instance, seed {}",
                l.label, args.degree, args.seed
            );
            sample_system(
                &l.structure,
                args.degree,
                args.seed,
                CoefficientDistribution::Uniform,
            )?
        }
    };
    let n = sys.num_variables();
    let p = match (&args.from, l.base_point) {
        (Some(p), _) => p.clone(),
        (None, Some(p)) => p,
        (None, None) => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect()
        }
    };
    if p.len() != n {
        return Err(Error::invalid(format!(
            "--from has {} coordinates, expected {n}",
            p.len()
        )));
    }
    let _ = writeln!(note, "start point p = {}", fmt_point(&p));
    Ok((sys, p, note))
}

fn render_branch(branch: &SolutionBranch, note: &str, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => Ok(to_json(branch)),
        OutputFormat::Csv => Ok(branch.to_csv()),
        OutputFormat::Text => {
            let mut out = note.to_string();
            let _ = writeln!(
                out,
                "rank {}, dimension {}, {} points",
                branch.rank,
                branch.dimension,
                branch.points.len()
            );
            let max_res = branch.points.iter().map(|p| p.residual).fold(0.0, f64::max);
            let _ = writeln!(out, "max residual {max_res:.3e}");
            for e in &branch.events {
                let _ = writeln!(
                    out,
                    "event {}",
                    serde_json::to_string(e).expect("serializable")
                );
            }
            Ok(out)
        }
        OutputFormat::Dot => Err(unsupported_format(format, "trace")),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    matrices: Vec<Vec<Vec<f64>>>,
}

fn read_matrices(path: &std::path::Path) -> Result<Vec<DMatrix<f64>>> {
    let file: MatrixFile = serde_json::from_str(&io::read_file(path)?)?;
    file.matrices
        .iter()
        .enumerate()
        .map(|(k, rows)| {
            let m = rows.len();
            let n = rows.first().map_or(0, Vec::len);
            if m == 0 || n == 0 {
                return Err(Error::invalid(format!("matrix {} is empty", k + 1)));
            }
            if rows.iter().any(|r| r.len() != n) {
                return Err(Error::invalid(format!("matrix {} has ragged rows", k + 1)));
            }
            Ok(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
        })
        .collect()
}

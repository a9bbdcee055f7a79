//! Exact generic rank of structured function spaces.
//!
//! The generic rank of every function space respecting a pattern equals the
//! size of a maximum matching between equations and variables over the
//! allowed entries. A system is robust exactly when that rank equals the
//! number of equations, and its generic solution sets have dimension
//! `N - rank`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::maximum_matching;
use crate::structure::{Structure, StructurePattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    /// Generic Jacobians have full row rank; solutions persist under small perturbations.
    Robust,
    Fragile,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Robust => "robust",
            Classification::Fragile => "fragile",
        })
    }
}

/// Structural rank of a pattern together with its consequences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "ReportWire", try_from = "ReportWire")]
pub struct RankReport {
    pub structural_rank: usize,
    pub num_equations: usize,
    pub num_variables: usize,
    pub classification: Classification,
    pub solution_dimension: usize,
    /// `(equation, variable)` pairs witnessing the rank, 0-based.
    pub matching: Vec<(usize, usize)>,
}

// On-disk form uses 1-based matching indices.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportWire {
    rank: usize,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "N")]
    n: usize,
    class: Classification,
    dim: usize,
    matching: Vec<[usize; 2]>,
}

impl From<RankReport> for ReportWire {
    fn from(r: RankReport) -> Self {
        ReportWire {
            rank: r.structural_rank,
            m: r.num_equations,
            n: r.num_variables,
            class: r.classification,
            dim: r.solution_dimension,
            matching: r.matching.iter().map(|&(e, v)| [e + 1, v + 1]).collect(),
        }
    }
}

impl TryFrom<ReportWire> for RankReport {
    type Error = String;

    fn try_from(w: ReportWire) -> std::result::Result<Self, String> {
        let matching = w
            .matching
            .iter()
            .map(|&[e, v]| {
                if e == 0 || v == 0 {
                    Err("matching indices are 1-based".to_string())
                } else {
                    Ok((e - 1, v - 1))
                }
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if matching.len() != w.rank {
            return Err(format!(
                "matching has {} pairs but rank is {}",
                matching.len(),
                w.rank
            ));
        }
        if w.rank > w.m.min(w.n) || w.dim != w.n - w.rank {
            return Err("inconsistent rank, dimensions and dim".into());
        }
        let expected = if w.rank == w.m {
            Classification::Robust
        } else {
            Classification::Fragile
        };
        if w.class != expected {
            return Err(format!("class '{}' inconsistent with rank", w.class));
        }
        Ok(RankReport {
            structural_rank: w.rank,
            num_equations: w.m,
            num_variables: w.n,
            classification: w.class,
            solution_dimension: w.dim,
            matching,
        })
    }
}

impl RankReport {
    pub fn is_robust(&self) -> bool {
        self.classification == Classification::Robust
    }
}

pub fn structural_rank(p: &StructurePattern) -> usize {
    maximum_matching(p).size
}

pub fn classify(p: &StructurePattern) -> RankReport {
    let matching = maximum_matching(p);
    let rank = matching.size;
    RankReport {
        structural_rank: rank,
        num_equations: p.num_equations(),
        num_variables: p.num_variables(),
        classification: if rank == p.num_equations() {
            Classification::Robust
        } else {
            Classification::Fragile
        },
        solution_dimension: p.num_variables() - rank,
        matching: matching.pairs(),
    }
}

/// Like [`classify`], but refuses structures with derived variables, whose
/// effective-pattern matching overestimates the generic rank.
pub fn classify_structure(s: &Structure) -> Result<RankReport> {
    match s {
        Structure::Pattern(p) => Ok(classify(p)),
        Structure::Generalized(_) => Err(Error::DerivedVariables),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnockoutResult {
    /// 0-based node removed.
    pub node: usize,
    pub report: RankReport,
    /// The intact system is fragile but this knockout is robust.
    pub flips_to_robust: bool,
}

/// Classifies every single-node knockout of a square pattern.
pub fn knockout_sweep(p: &StructurePattern) -> Result<Vec<KnockoutResult>> {
    if !p.is_square() {
        return Err(Error::Unsupported(format!(
            "knockout sweep needs a square pattern, got {}x{}",
            p.num_equations(),
            p.num_variables()
        )));
    }
    let intact_robust = classify(p).is_robust();
    (0..p.num_equations())
        .into_par_iter()
        .map(|node| {
            let report = classify(&p.knockout(node)?);
            Ok(KnockoutResult {
                node,
                flips_to_robust: !intact_robust && report.is_robust(),
                report,
            })
        })
        .collect()
}

//! Generic Jacobian rank and robustness analysis for structured systems of
//! equations.
//!
//! A structured system only says which variables may appear in which
//! equations. Almost every system with a given structure shares the same
//! Jacobian rank `rho`: it is robust when `rho` equals the number of
//! equations, and its solution sets are generically manifolds of dimension
//! `N - rho`. This crate computes `rho` exactly by bipartite matching,
//! estimates it by random instantiation where matching does not apply, and
//! checks the manifold claims numerically with a continuation tracer.
//!
//! ```
//! use structrank::datasets;
//! use structrank::structural::classify;
//!
//! let jakstat = datasets::get("jakstat").unwrap();
//! let report = classify(jakstat.pattern().unwrap());
//! assert_eq!(report.structural_rank, 11);
//! assert_eq!(report.solution_dimension, 1);
//! ```

pub mod cli;
pub mod continuation;
pub mod datasets;
pub mod error;
pub mod io;
pub mod linalg;
pub mod matching;
pub mod poly;
pub mod rank;
pub mod structural;
pub mod structure;

pub use error::{Error, Result};
pub use poly::{sample_system, CoefficientDistribution, StructuredPolySystem};
pub use rank::{numeric_rank, CertificationReport, MonteCarloConfig, RankTolerance};
pub use structural::{classify, knockout_sweep, structural_rank, Classification, RankReport};
pub use structure::{
    DerivedVariableSpec, GeneralizedStructure, SelfLoopPolicy, Structure, StructurePattern,
    SystemGraph,
};

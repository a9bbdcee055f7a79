//! Concrete polynomial members of a structured function space.
//!
//! Each equation is a polynomial in the symbols it is allowed to use: the
//! original variables of its pattern row followed by any derived variables it
//! references. Derived variables stay formal symbols in the coefficient table
//! and are expanded by the chain rule when differentiating, so proportional
//! Jacobian rows come out exactly proportional.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::Structure;

/// A symbol an equation may depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    /// Original variable (0-based).
    Var(usize),
    /// Index into the structure's derived variables.
    Derived(usize),
}

/// Distribution of sampled coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientDistribution {
    /// Uniform on `[-1, 1]`.
    #[default]
    Uniform,
    /// Standard normal.
    Normal,
}

impl CoefficientDistribution {
    fn draw<R: Rng>(self, rng: &mut R) -> f64 {
        match self {
            CoefficientDistribution::Uniform => rng.random_range(-1.0..=1.0),
            CoefficientDistribution::Normal => rng.sample(StandardNormal),
        }
    }
}

impl fmt::Display for CoefficientDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoefficientDistribution::Uniform => "uniform",
            CoefficientDistribution::Normal => "normal",
        })
    }
}

impl FromStr for CoefficientDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "normal" => Ok(Self::Normal),
            other => Err(Error::invalid(format!(
                "unknown distribution '{other}' (expected uniform or normal)"
            ))),
        }
    }
}

/// Exponent vector over an equation's symbols.
pub type Exponents = Vec<u32>;

/// One polynomial equation.
#[derive(Debug, Clone, PartialEq)]
pub struct EquationPoly {
    symbols: Vec<Symbol>,
    terms: BTreeMap<Exponents, f64>,
}

impl EquationPoly {
    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, f64> {
        &self.terms
    }

    fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    fn value(&self, symbol_values: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(exps, &c)| c * monomial(exps, symbol_values, None))
            .sum()
    }

    /// Partial derivatives with respect to each symbol.
    fn symbol_gradient(&self, symbol_values: &[f64]) -> Vec<f64> {
        let mut grad = vec![0.0; self.symbols.len()];
        for (exps, &c) in &self.terms {
            for (s, &a) in exps.iter().enumerate() {
                if a > 0 {
                    grad[s] += c * f64::from(a) * monomial(exps, symbol_values, Some(s));
                }
            }
        }
        grad
    }
}

/// Product of `values[s]^exps[s]`; with `lowered = Some(s)` symbol `s` uses exponent `exps[s] - 1`.
fn monomial(exps: &[u32], values: &[f64], lowered: Option<usize>) -> f64 {
    exps.iter()
        .zip(values)
        .enumerate()
        .fold(1.0, |acc, (s, (&a, &x))| {
            let a = if lowered == Some(s) { a - 1 } else { a };
            if a == 0 {
                acc
            } else {
                acc * x.powi(a as i32)
            }
        })
}

/// All exponent vectors over `k` symbols with total degree at most `degree`, sorted.
pub fn monomial_exponents(k: usize, degree: u32) -> Vec<Exponents> {
    fn rec(k: usize, left: u32, prefix: &mut Exponents, out: &mut Vec<Exponents>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for a in 0..=left {
            prefix.push(a);
            rec(k, left - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, degree, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Symbols equation `e` of `structure` may use, in canonical order.
pub fn equation_symbols(structure: &Structure, e: usize) -> Vec<Symbol> {
    match structure {
        Structure::Pattern(p) => p.row(e).iter().map(|&v| Symbol::Var(v)).collect(),
        Structure::Generalized(g) => g
            .base()
            .row(e)
            .iter()
            .map(|&v| Symbol::Var(v))
            .chain(g.equation_derived(e).map(Symbol::Derived))
            .collect(),
    }
}

/// A polynomial system `F = (f_1, ..., f_M)` respecting a structure.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredPolySystem {
    structure: Structure,
    degree: u32,
    seed: Option<u64>,
    distribution: Option<CoefficientDistribution>,
    equations: Vec<EquationPoly>,
}

/// Jacobian `DF(x)` together with `F(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianEvaluation {
    pub point: Vec<f64>,
    pub matrix: DMatrix<f64>,
    pub residual_target: Vec<f64>,
}

/// Samples a random member of the space: every monomial of total degree at
/// most `degree` over each equation's symbols gets an independent coefficient.
pub fn sample_system(
    structure: &Structure,
    degree: u32,
    seed: u64,
    distribution: CoefficientDistribution,
) -> Result<StructuredPolySystem> {
    if degree == 0 {
        return Err(Error::invalid(
            "degree 0 gives constant equations with identically zero Jacobian rows; use sample_constant_system",
        ));
    }
    Ok(sample_unchecked(structure, degree, seed, distribution))
}

/// Degree-0 sampling, for callers that explicitly want constant equations.
pub fn sample_constant_system(
    structure: &Structure,
    seed: u64,
    distribution: CoefficientDistribution,
) -> StructuredPolySystem {
    sample_unchecked(structure, 0, seed, distribution)
}

fn sample_unchecked(
    structure: &Structure,
    degree: u32,
    seed: u64,
    distribution: CoefficientDistribution,
) -> StructuredPolySystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let equations = (0..structure.num_equations())
        .map(|e| {
            let symbols = equation_symbols(structure, e);
            let terms = monomial_exponents(symbols.len(), degree)
                .into_iter()
                .map(|exps| (exps, distribution.draw(&mut rng)))
                .collect();
            EquationPoly { symbols, terms }
        })
        .collect();
    StructuredPolySystem {
        structure: structure.clone(),
        degree,
        seed: Some(seed),
        distribution: Some(distribution),
        equations,
    }
}

impl StructuredPolySystem {
    /// Builds a system from explicit terms; exponents index the symbols of
    /// [`equation_symbols`] for each equation.
    pub fn from_terms(structure: Structure, equations: Vec<Vec<(Exponents, f64)>>) -> Result<Self> {
        if equations.len() != structure.num_equations() {
            return Err(Error::DimensionMismatch {
                expected: structure.num_equations(),
                found: equations.len(),
            });
        }
        let equations = equations
            .into_iter()
            .enumerate()
            .map(|(e, terms)| {
                let symbols = equation_symbols(&structure, e);
                let mut table = BTreeMap::new();
                for (exps, c) in terms {
                    if exps.len() != symbols.len() {
                        return Err(Error::structure(format!(
                            "equation {} has {} symbols but a term has {} exponents",
                            e + 1,
                            symbols.len(),
                            exps.len()
                        )));
                    }
                    if !c.is_finite() {
                        return Err(Error::NonFinite("coefficient"));
                    }
                    *table.entry(exps).or_insert(0.0) += c;
                }
                Ok(EquationPoly {
                    symbols,
                    terms: table,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let degree = equations
            .iter()
            .map(EquationPoly::total_degree)
            .max()
            .unwrap_or(0);
        Ok(Self {
            structure,
            degree,
            seed: None,
            distribution: None,
            equations,
        })
    }

    /// Builds a system over a plain pattern from exponent vectors of length
    /// `N`; every used variable must be allowed in its equation.
    pub fn from_monomials(
        pattern: crate::structure::StructurePattern,
        equations: Vec<Vec<(Exponents, f64)>>,
    ) -> Result<Self> {
        let n = pattern.num_variables();
        if equations.len() != pattern.num_equations() {
            return Err(Error::DimensionMismatch {
                expected: pattern.num_equations(),
                found: equations.len(),
            });
        }
        let mut local = Vec::with_capacity(equations.len());
        for (e, terms) in equations.into_iter().enumerate() {
            let row = pattern.row(e);
            let mut eq = Vec::with_capacity(terms.len());
            for (exps, c) in terms {
                if exps.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: exps.len(),
                    });
                }
                if let Some(v) = (0..n).find(|&v| exps[v] > 0 && row.binary_search(&v).is_err()) {
                    return Err(Error::structure(format!(
                        "equation {} uses variable {} outside its pattern row",
                        e + 1,
                        v + 1
                    )));
                }
                eq.push((row.iter().map(|&v| exps[v]).collect(), c));
            }
            local.push(eq);
        }
        Self::from_terms(Structure::Pattern(pattern), local)
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn distribution(&self) -> Option<CoefficientDistribution> {
        self.distribution
    }

    pub fn equations(&self) -> &[EquationPoly] {
        &self.equations
    }

    pub fn num_equations(&self) -> usize {
        self.structure.num_equations()
    }

    pub fn num_variables(&self) -> usize {
        self.structure.num_variables()
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.num_variables() {
            return Err(Error::DimensionMismatch {
                expected: self.num_variables(),
                found: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("point"));
        }
        Ok(())
    }

    fn symbol_values(&self, eq: &EquationPoly, x: &[f64], derived: &[f64]) -> Vec<f64> {
        eq.symbols
            .iter()
            .map(|s| match *s {
                Symbol::Var(v) => x[v],
                Symbol::Derived(d) => derived[d],
            })
            .collect()
    }

    fn derived_values(&self, x: &[f64]) -> Vec<f64> {
        self.structure
            .derived()
            .iter()
            .map(|d| d.value(x))
            .collect()
    }

    /// `F(x)`.
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let derived = self.derived_values(x);
        Ok(self
            .equations
            .iter()
            .map(|eq| eq.value(&self.symbol_values(eq, x, &derived)))
            .collect())
    }

    /// Exact `DF(x)`; derived symbols contribute `coeff_i * df/dz` to column `i`.
    pub fn jacobian(&self, x: &[f64]) -> Result<JacobianEvaluation> {
        self.check_point(x)?;
        let derived = self.derived_values(x);
        let specs = self.structure.derived();
        let mut matrix = DMatrix::<f64>::zeros(self.num_equations(), self.num_variables());
        let mut values = Vec::with_capacity(self.num_equations());
        for (e, eq) in self.equations.iter().enumerate() {
            let sv = self.symbol_values(eq, x, &derived);
            values.push(eq.value(&sv));
            for (s, g) in eq.symbols.iter().zip(eq.symbol_gradient(&sv)) {
                match *s {
                    Symbol::Var(v) => matrix[(e, v)] += g,
                    Symbol::Derived(d) => {
                        for (&v, &a) in specs[d].coefficients() {
                            matrix[(e, v)] += a * g;
                        }
                    }
                }
            }
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("Jacobian"));
        }
        Ok(JacobianEvaluation {
            point: x.to_vec(),
            matrix,
            residual_target: values,
        })
    }

    /// `alpha * F + beta * G` for systems over the same structure.
    pub fn linear_combination(alpha: f64, f: &Self, beta: f64, g: &Self) -> Result<Self> {
        if f.structure != g.structure {
            return Err(Error::structure("systems do not share a structure"));
        }
        let equations = f
            .equations
            .iter()
            .zip(&g.equations)
            .map(|(a, b)| {
                let mut terms: BTreeMap<Exponents, f64> = a
                    .terms
                    .iter()
                    .map(|(k, &c)| (k.clone(), alpha * c))
                    .collect();
                for (k, &c) in &b.terms {
                    *terms.entry(k.clone()).or_insert(0.0) += beta * c;
                }
                EquationPoly {
                    symbols: a.symbols.clone(),
                    terms,
                }
            })
            .collect();
        Ok(Self {
            structure: f.structure.clone(),
            degree: f.degree.max(g.degree),
            seed: None,
            distribution: None,
            equations,
        })
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        for eq in &mut out.equations {
            eq.terms.values_mut().for_each(|c| *c *= alpha);
        }
        out.seed = None;
        out.distribution = None;
        out
    }

    /// Reassembles a system from its parts (used by deserialization).
    pub(crate) fn from_parts(
        structure: Structure,
        degree: u32,
        seed: Option<u64>,
        distribution: Option<CoefficientDistribution>,
        equations: Vec<Vec<(Exponents, f64)>>,
    ) -> Result<Self> {
        let mut sys = Self::from_terms(structure, equations)?;
        sys.degree = sys.degree.max(degree);
        sys.seed = seed;
        sys.distribution = distribution;
        Ok(sys)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{DerivedVariableSpec, GeneralizedStructure, StructurePattern};
    use approx::assert_relative_eq;

    fn cep() -> StructurePattern {
        StructurePattern::from_rows(3, &[&[2], &[2], &[0, 1, 2]]).unwrap()
    }

    /// f1 = x3^2, f2 = x3^4 + 1, f3 = x1^2 - x2 + x3^4
    fn eqcep1() -> StructuredPolySystem {
        StructuredPolySystem::from_monomials(
            cep(),
            vec![
                vec![(vec![0, 0, 2], 1.0)],
                vec![(vec![0, 0, 4], 1.0), (vec![0, 0, 0], 1.0)],
                vec![
                    (vec![2, 0, 0], 1.0),
                    (vec![0, 1, 0], -1.0),
                    (vec![0, 0, 4], 1.0),
                ],
            ],
        )
        .unwrap()
    }

    fn xy() -> StructuredPolySystem {
        StructuredPolySystem::from_monomials(
            StructurePattern::full(1, 2).unwrap(),
            vec![vec![(vec![1, 1], 1.0)]],
        )
        .unwrap()
    }

    fn example5() -> Structure {
        let base =
            StructurePattern::from_rows(4, &[&[0, 1, 2, 3], &[0, 1, 2, 3], &[], &[]]).unwrap();
        let z = DerivedVariableSpec::new("z", BTreeMap::from([(0, 1.0), (1, 2.0)])).unwrap();
        GeneralizedStructure::new(base, vec![z], &[vec![], vec![], vec!["z"], vec!["z"]])
            .unwrap()
            .into()
    }

    #[test]
    fn monomial_count() {
        // C(k + d, d)
        assert_eq!(monomial_exponents(3, 2).len(), 10);
        assert_eq!(monomial_exponents(1, 4).len(), 5);
        assert_eq!(monomial_exponents(0, 2), vec![Vec::<u32>::new()]);
    }

    #[test]
    fn eqcep1_values() {
        assert_eq!(
            eqcep1().evaluate(&[1.0, 1.0, 1.0]).unwrap(),
            vec![1.0, 2.0, 1.0]
        );
        assert_eq!(eqcep1().degree(), 4);
    }

    #[test]
    fn eqcep1_jacobian() {
        let j = eqcep1().jacobian(&[1.0, 1.0, 1.0]).unwrap();
        let expected = DMatrix::from_row_slice(3, 3, &[0., 0., 2., 0., 0., 4., 2., -1., 4.]);
        assert_eq!(j.matrix, expected);
        assert_eq!(j.residual_target, vec![1.0, 2.0, 1.0]);
    }

    #[test]
    fn xy_single_monomial() {
        assert_eq!(xy().evaluate(&[2.0, 3.0]).unwrap(), vec![6.0]);
        assert_eq!(
            xy().jacobian(&[0.0, 0.0]).unwrap().matrix,
            DMatrix::from_row_slice(1, 2, &[0.0, 0.0])
        );
        assert_eq!(
            xy().jacobian(&[1.0, 0.0]).unwrap().matrix,
            DMatrix::from_row_slice(1, 2, &[0.0, 1.0])
        );
    }

    #[test]
    fn zero_system() {
        let s =
            StructuredPolySystem::from_terms(cep().into(), vec![vec![], vec![], vec![]]).unwrap();
        assert_eq!(s.evaluate(&[0.3, -2.0, 5.0]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn sampled_support_respects_pattern() {
        let sys = sample_system(&cep().into(), 2, 7, CoefficientDistribution::Uniform).unwrap();
        assert_eq!(sys.equations()[0].symbols(), &[Symbol::Var(2)]);
        assert_eq!(sys.equations()[0].terms().len(), 3);
        assert_eq!(sys.equations()[2].terms().len(), 10);
        let j = sys.jacobian(&[0.4, -0.1, 0.9]).unwrap();
        for e in 0..3 {
            for v in 0..3 {
                if !cep().contains(e, v) {
                    assert_eq!(j.matrix[(e, v)], 0.0);
                }
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        for dist in [
            CoefficientDistribution::Uniform,
            CoefficientDistribution::Normal,
        ] {
            let a = sample_system(&example5(), 2, 42, dist).unwrap();
            let b = sample_system(&example5(), 2, 42, dist).unwrap();
            assert_eq!(a, b);
            let c = sample_system(&example5(), 2, 43, dist).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn degree_zero_needs_explicit_call() {
        assert!(sample_system(&cep().into(), 0, 0, CoefficientDistribution::Uniform).is_err());
        let c = sample_constant_system(&cep().into(), 0, CoefficientDistribution::Uniform);
        let j = c.jacobian(&[1.0, 2.0, 3.0]).unwrap();
        assert!(j.matrix.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn example5_rows_are_proportional() {
        let sys = sample_system(&example5(), 2, 3, CoefficientDistribution::Uniform).unwrap();
        // f3 and f4 are quadratics in the single symbol z
        assert_eq!(sys.equations()[2].symbols(), &[Symbol::Derived(0)]);
        assert_eq!(sys.equations()[2].terms().len(), 3);
        let j = sys.jacobian(&[0.3, -0.7, 0.2, 0.5]).unwrap().matrix;
        for e in [2, 3] {
            // (a f', b f', 0, 0) with a = 1, b = 2
            assert_relative_eq!(j[(e, 1)], 2.0 * j[(e, 0)], max_relative = 1e-15);
            assert_eq!(j[(e, 2)], 0.0);
            assert_eq!(j[(e, 3)], 0.0);
        }
        let det = j[(2, 0)] * j[(3, 1)] - j[(2, 1)] * j[(3, 0)];
        assert!(det.abs() <= 1e-15 * j.norm().powi(2));
    }

    #[test]
    fn evaluate_rejects_bad_points() {
        assert!(matches!(
            xy().evaluate(&[1.0]),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 1
            })
        ));
        assert!(matches!(
            xy().jacobian(&[1.0, f64::NAN]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn from_monomials_rejects_out_of_pattern() {
        let err = StructuredPolySystem::from_monomials(
            cep(),
            vec![vec![(vec![1, 0, 0], 1.0)], vec![], vec![]],
        );
        assert!(matches!(err, Err(Error::Structure(_))));
    }

    #[test]
    fn combination_cancels() {
        let f = sample_system(&cep().into(), 2, 1, CoefficientDistribution::Uniform).unwrap();
        let zero = StructuredPolySystem::linear_combination(1.0, &f, -1.0, &f).unwrap();
        assert_eq!(zero.evaluate(&[0.1, 0.2, 0.3]).unwrap(), vec![0.0; 3]);
        let other = sample_system(&example5(), 2, 1, CoefficientDistribution::Uniform).unwrap();
        assert!(StructuredPolySystem::linear_combination(1.0, &f, 1.0, &other).is_err());
    }
}

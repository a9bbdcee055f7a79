//! Sparsity structures of equation systems.
//!
//! A [`StructurePattern`] records which Jacobian entries may be nonzero:
//! entry `(e, v)` is allowed when variable `v` may appear in equation `e`.
//! The same information can be given as a [`SystemGraph`], where an edge
//! `i -> j` means variable `i` appears in equation `j`. Systems whose
//! equations depend on linear combinations of variables are described by a
//! [`GeneralizedStructure`].
//!
//! All indices are 0-based here; file formats and reports use 1-based indices.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// An `M x N` boolean sparsity pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StructurePattern {
    num_equations: usize,
    num_variables: usize,
    // sorted, deduplicated variable indices per equation
    rows: Vec<Vec<usize>>,
}

impl StructurePattern {
    pub fn new(
        num_equations: usize,
        num_variables: usize,
        allowed: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if num_equations == 0 || num_variables == 0 {
            return Err(Error::EmptySystem(format!(
                "pattern must have at least one equation and one variable, got {num_equations}x{num_variables}"
            )));
        }
        let mut sets = vec![BTreeSet::new(); num_equations];
        for (e, v) in allowed {
            if e >= num_equations || v >= num_variables {
                return Err(Error::structure(format!(
                    "entry ({e}, {v}) outside {num_equations}x{num_variables} pattern"
                )));
            }
            sets[e].insert(v);
        }
        Ok(Self {
            num_equations,
            num_variables,
            rows: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }

    /// Builds a pattern from per-equation variable lists.
    pub fn from_rows(num_variables: usize, rows: &[&[usize]]) -> Result<Self> {
        let allowed = rows
            .iter()
            .enumerate()
            .flat_map(|(e, vars)| vars.iter().map(move |&v| (e, v)));
        Self::new(rows.len(), num_variables, allowed)
    }

    pub fn full(num_equations: usize, num_variables: usize) -> Result<Self> {
        Self::new(
            num_equations,
            num_variables,
            (0..num_equations).flat_map(|e| (0..num_variables).map(move |v| (e, v))),
        )
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, n, (0..n).map(|i| (i, i)))
    }

    pub fn num_equations(&self) -> usize {
        self.num_equations
    }

    pub fn num_variables(&self) -> usize {
        self.num_variables
    }

    pub fn is_square(&self) -> bool {
        self.num_equations == self.num_variables
    }

    /// Variables allowed in equation `e`, ascending.
    pub fn row(&self, e: usize) -> &[usize] {
        &self.rows[e]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn contains(&self, e: usize, v: usize) -> bool {
        self.rows
            .get(e)
            .is_some_and(|row| row.binary_search(&v).is_ok())
    }

    /// All allowed entries in row-major order.
    pub fn allowed(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(e, row)| row.iter().map(move |&v| (e, v)))
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Returns a copy with entry `(e, v)` allowed.
    pub fn with_entry(&self, e: usize, v: usize) -> Result<Self> {
        Self::new(
            self.num_equations,
            self.num_variables,
            self.allowed().chain(std::iter::once((e, v))),
        )
    }

    /// Removes equation `node` and variable `node` from a square pattern.
    pub fn knockout(&self, node: usize) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Unsupported(format!(
                "knockout needs a square pattern, got {}x{}",
                self.num_equations, self.num_variables
            )));
        }
        if node >= self.num_equations {
            return Err(Error::invalid(format!(
                "node {node} out of range for {} nodes",
                self.num_equations
            )));
        }
        if self.num_equations == 1 {
            return Err(Error::EmptySystem(
                "knocking out the only node leaves no equations".into(),
            ));
        }
        let shift = |i: usize| if i > node { i - 1 } else { i };
        let allowed = self
            .allowed()
            .filter(|&(e, v)| e != node && v != node)
            .map(|(e, v)| (shift(e), shift(v)));
        Self::new(self.num_equations - 1, self.num_variables - 1, allowed)
    }

    pub fn transpose(&self) -> Self {
        Self::new(
            self.num_variables,
            self.num_equations,
            self.allowed().map(|(e, v)| (v, e)),
        )
        .expect("transpose of a valid pattern is valid")
    }
}

/// Whether every node of a [`SystemGraph`] implicitly depends on itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SelfLoopPolicy {
    IncludeDiagonal,
    #[default]
    ExcludeDiagonal,
}

impl SelfLoopPolicy {
    pub fn includes_diagonal(self) -> bool {
        matches!(self, SelfLoopPolicy::IncludeDiagonal)
    }
}

/// Directed dependency graph: edge `i -> j` means variable `i` is allowed to
/// appear in equation `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemGraph {
    num_nodes: usize,
    edges: BTreeSet<(usize, usize)>,
    self_loops: SelfLoopPolicy,
}

impl SystemGraph {
    pub fn new(
        num_nodes: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        self_loops: SelfLoopPolicy,
    ) -> Result<Self> {
        if num_nodes == 0 {
            return Err(Error::EmptySystem("graph has no nodes".into()));
        }
        let edges: BTreeSet<_> = edges.into_iter().collect();
        if let Some(&(s, t)) = edges
            .iter()
            .find(|&&(s, t)| s >= num_nodes || t >= num_nodes)
        {
            return Err(Error::structure(format!(
                "edge {s} -> {t} references a node outside 0..{num_nodes}"
            )));
        }
        Ok(Self {
            num_nodes,
            edges,
            self_loops,
        })
    }

    /// Convenience constructor; each bidirectional pair is stored as two directed edges.
    pub fn with_bidirectional(
        num_nodes: usize,
        directed: &[(usize, usize)],
        bidirectional: &[(usize, usize)],
        self_loops: SelfLoopPolicy,
    ) -> Result<Self> {
        let edges = directed
            .iter()
            .copied()
            .chain(bidirectional.iter().flat_map(|&(a, b)| [(a, b), (b, a)]));
        Self::new(num_nodes, edges, self_loops)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn self_loops(&self) -> SelfLoopPolicy {
        self.self_loops
    }

    pub fn to_pattern(&self) -> StructurePattern {
        pattern_from_graph(self)
    }
}

/// Converts a dependency graph to its structure pattern: `(j, i)` is allowed
/// iff edge `i -> j` exists, plus the diagonal under [`SelfLoopPolicy::IncludeDiagonal`].
pub fn pattern_from_graph(g: &SystemGraph) -> StructurePattern {
    let n = g.num_nodes;
    let diagonal = g
        .self_loops
        .includes_diagonal()
        .then_some(0..n)
        .into_iter()
        .flatten()
        .map(|i| (i, i));
    StructurePattern::new(n, n, g.edges.iter().map(|&(i, j)| (j, i)).chain(diagonal))
        .expect("graph invariants guarantee a valid pattern")
}

/// Inverse of [`pattern_from_graph`] for square patterns. Under
/// `IncludeDiagonal` the diagonal is implied by the policy and is not emitted
/// as explicit edges.
pub fn graph_from_pattern(p: &StructurePattern, self_loops: SelfLoopPolicy) -> Result<SystemGraph> {
    if !p.is_square() {
        return Err(Error::Unsupported(format!(
            "a dependency graph needs a square pattern, got {}x{}",
            p.num_equations(),
            p.num_variables()
        )));
    }
    let edges = p
        .allowed()
        .filter(|&(e, v)| !(self_loops.includes_diagonal() && e == v))
        .map(|(e, v)| (v, e));
    SystemGraph::new(p.num_equations(), edges, self_loops)
}

/// A derived variable `z = sum_i a_i x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedVariableSpec {
    name: String,
    coefficients: BTreeMap<usize, f64>,
}

impl DerivedVariableSpec {
    pub fn new(name: impl Into<String>, coefficients: BTreeMap<usize, f64>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::structure("derived variable needs a name"));
        }
        if coefficients.is_empty() {
            return Err(Error::structure(format!(
                "derived variable '{name}' has no coefficients"
            )));
        }
        if let Some((v, c)) = coefficients
            .iter()
            .find(|(_, c)| **c == 0.0 || !c.is_finite())
        {
            return Err(Error::structure(format!(
                "derived variable '{name}' has coefficient {c} for variable {v}; coefficients must be nonzero and finite"
            )));
        }
        Ok(Self { name, coefficients })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coefficients(&self) -> &BTreeMap<usize, f64> {
        &self.coefficients
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coefficients.keys().copied()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.coefficients.iter().map(|(&v, &c)| c * x[v]).sum()
    }
}

/// A structure in which equations may also depend on derived linear
/// combinations of the variables.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedStructure {
    base: StructurePattern,
    derived: Vec<DerivedVariableSpec>,
    // per equation, indices into `derived`
    equation_derived: Vec<BTreeSet<usize>>,
}

impl GeneralizedStructure {
    /// `equation_derived[e]` lists the derived-variable names equation `e` depends on.
    pub fn new<S: AsRef<str>>(
        base: StructurePattern,
        derived: Vec<DerivedVariableSpec>,
        equation_derived: &[Vec<S>],
    ) -> Result<Self> {
        if equation_derived.len() != base.num_equations() {
            return Err(Error::DimensionMismatch {
                expected: base.num_equations(),
                found: equation_derived.len(),
            });
        }
        let mut index = BTreeMap::new();
        for (k, spec) in derived.iter().enumerate() {
            if index.insert(spec.name.clone(), k).is_some() {
                return Err(Error::structure(format!(
                    "derived variable '{}' declared more than once",
                    spec.name
                )));
            }
            if let Some(v) = spec.support().find(|&v| v >= base.num_variables()) {
                return Err(Error::structure(format!(
                    "derived variable '{}' references variable {v} outside 0..{}",
                    spec.name,
                    base.num_variables()
                )));
            }
        }
        let equation_derived = equation_derived
            .iter()
            .enumerate()
            .map(|(e, names)| {
                names
                    .iter()
                    .map(|name| {
                        index.get(name.as_ref()).copied().ok_or_else(|| {
                            Error::structure(format!(
                                "equation {} references undeclared derived variable '{}'",
                                e + 1,
                                name.as_ref()
                            ))
                        })
                    })
                    .collect::<Result<BTreeSet<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            base,
            derived,
            equation_derived,
        })
    }

    pub fn base(&self) -> &StructurePattern {
        &self.base
    }

    pub fn derived(&self) -> &[DerivedVariableSpec] {
        &self.derived
    }

    /// Indices into [`Self::derived`] used by equation `e`.
    pub fn equation_derived(&self, e: usize) -> impl Iterator<Item = usize> + '_ {
        self.equation_derived[e].iter().copied()
    }

    pub fn num_equations(&self) -> usize {
        self.base.num_equations()
    }

    pub fn num_variables(&self) -> usize {
        self.base.num_variables()
    }

    /// Original dependencies plus the supports of referenced derived variables.
    ///
    /// Matching on this pattern only bounds the generic rank from above.
    pub fn effective_pattern(&self) -> StructurePattern {
        let expanded = self
            .equation_derived
            .iter()
            .enumerate()
            .flat_map(|(e, ds)| {
                ds.iter()
                    .flat_map(move |&d| self.derived[d].support().map(move |v| (e, v)))
            });
        StructurePattern::new(
            self.num_equations(),
            self.num_variables(),
            self.base.allowed().chain(expanded),
        )
        .expect("validated structure expands to a valid pattern")
    }
}

pub fn effective_pattern(gs: &GeneralizedStructure) -> StructurePattern {
    gs.effective_pattern()
}

/// Either kind of structure.
#[derive(Debug, Clone, PartialEq)]
pub enum Structure {
    Pattern(StructurePattern),
    Generalized(GeneralizedStructure),
}

impl Structure {
    pub fn num_equations(&self) -> usize {
        match self {
            Structure::Pattern(p) => p.num_equations(),
            Structure::Generalized(g) => g.num_equations(),
        }
    }

    pub fn num_variables(&self) -> usize {
        match self {
            Structure::Pattern(p) => p.num_variables(),
            Structure::Generalized(g) => g.num_variables(),
        }
    }

    pub fn effective_pattern(&self) -> StructurePattern {
        match self {
            Structure::Pattern(p) => p.clone(),
            Structure::Generalized(g) => g.effective_pattern(),
        }
    }

    pub fn as_pattern(&self) -> Option<&StructurePattern> {
        match self {
            Structure::Pattern(p) => Some(p),
            Structure::Generalized(_) => None,
        }
    }

    pub fn derived(&self) -> &[DerivedVariableSpec] {
        match self {
            Structure::Pattern(_) => &[],
            Structure::Generalized(g) => g.derived(),
        }
    }
}

impl From<StructurePattern> for Structure {
    fn from(p: StructurePattern) -> Self {
        Structure::Pattern(p)
    }
}

impl From<GeneralizedStructure> for Structure {
    fn from(g: GeneralizedStructure) -> Self {
        Structure::Generalized(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cep_graph() -> SystemGraph {
        // 1 <-> 3, 2 <-> 3, 3 -> 3 (0-based)
        SystemGraph::new(
            3,
            [(0, 2), (2, 0), (1, 2), (2, 1), (2, 2)],
            SelfLoopPolicy::ExcludeDiagonal,
        )
        .unwrap()
    }

    #[test]
    fn cep_graph_gives_fig1_pattern() {
        let p = pattern_from_graph(&cep_graph());
        assert_eq!(p.rows(), &[vec![2], vec![2], vec![0, 1, 2]]);
        // include-diagonal adds (0,0) and (1,1) on top
        let g = SystemGraph::new(
            3,
            cep_graph().edges().clone(),
            SelfLoopPolicy::IncludeDiagonal,
        )
        .unwrap();
        assert_eq!(
            pattern_from_graph(&g).rows(),
            &[vec![0, 2], vec![1, 2], vec![0, 1, 2]]
        );
    }

    #[test]
    fn empty_graph_gives_empty_pattern() {
        let g = SystemGraph::new(3, [], SelfLoopPolicy::ExcludeDiagonal).unwrap();
        let p = pattern_from_graph(&g);
        assert_eq!(p.nnz(), 0);
        assert_eq!((p.num_equations(), p.num_variables()), (3, 3));
    }

    #[test]
    fn trophic_graph_pattern() {
        let bi: Vec<_> = [0, 1, 2]
            .into_iter()
            .flat_map(|a| [(a, 3), (a, 4)])
            .collect();
        let g =
            SystemGraph::with_bidirectional(5, &[], &bi, SelfLoopPolicy::ExcludeDiagonal).unwrap();
        let p = g.to_pattern();
        for e in 0..3 {
            assert_eq!(p.row(e), &[3, 4]);
        }
        for e in 3..5 {
            assert_eq!(p.row(e), &[0, 1, 2]);
        }
    }

    #[test]
    fn graph_pattern_round_trip() {
        let g = cep_graph();
        let back = graph_from_pattern(&g.to_pattern(), SelfLoopPolicy::ExcludeDiagonal).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn invalid_indices_rejected() {
        assert!(matches!(
            StructurePattern::new(2, 2, [(2, 0)]),
            Err(Error::Structure(_))
        ));
        assert!(StructurePattern::new(0, 2, []).is_err());
        assert!(SystemGraph::new(2, [(0, 2)], SelfLoopPolicy::ExcludeDiagonal).is_err());
    }

    #[test]
    fn duplicates_collapse() {
        let p = StructurePattern::new(1, 2, [(0, 1), (0, 1), (0, 0)]).unwrap();
        assert_eq!(p.row(0), &[0, 1]);
        assert_eq!(p.nnz(), 2);
    }

    fn example5() -> GeneralizedStructure {
        let base =
            StructurePattern::from_rows(4, &[&[0, 1, 2, 3], &[0, 1, 2, 3], &[], &[]]).unwrap();
        let z = DerivedVariableSpec::new("z", BTreeMap::from([(0, 1.0), (1, 2.0)])).unwrap();
        GeneralizedStructure::new(base, vec![z], &[vec![], vec![], vec!["z"], vec!["z"]]).unwrap()
    }

    #[test]
    fn example5_effective_pattern() {
        let p = example5().effective_pattern();
        assert_eq!(
            p.rows(),
            &[vec![0, 1, 2, 3], vec![0, 1, 2, 3], vec![0, 1], vec![0, 1]]
        );
    }

    #[test]
    fn effective_pattern_without_derived_is_base() {
        let base = StructurePattern::from_rows(3, &[&[0], &[1, 2]]).unwrap();
        let gs = GeneralizedStructure::new(base.clone(), vec![], &[Vec::<String>::new(), vec![]])
            .unwrap();
        assert_eq!(gs.effective_pattern(), base);
    }

    #[test]
    fn singleton_derived_support() {
        let base = StructurePattern::new(1, 1, []).unwrap();
        let z = DerivedVariableSpec::new("z", BTreeMap::from([(0, 3.0)])).unwrap();
        let gs = GeneralizedStructure::new(base, vec![z], &[vec!["z"]]).unwrap();
        assert_eq!(gs.effective_pattern().rows(), &[vec![0]]);
    }

    #[test]
    fn undeclared_derived_name_rejected() {
        let base = StructurePattern::new(1, 2, []).unwrap();
        let err = GeneralizedStructure::new(base, vec![], &[vec!["w"]]).unwrap_err();
        assert!(matches!(err, Error::Structure(_)), "{err}");
    }

    #[test]
    fn derived_spec_validation() {
        assert!(DerivedVariableSpec::new("z", BTreeMap::new()).is_err());
        assert!(DerivedVariableSpec::new("z", BTreeMap::from([(0, 0.0)])).is_err());
        let base = StructurePattern::new(1, 2, []).unwrap();
        let z = DerivedVariableSpec::new("z", BTreeMap::from([(5, 1.0)])).unwrap();
        assert!(GeneralizedStructure::new(base.clone(), vec![z.clone(), z], &[vec!["z"]]).is_err());
    }

    #[test]
    fn knockout_identity() {
        let p = StructurePattern::identity(3).unwrap();
        assert_eq!(
            p.knockout(1).unwrap(),
            StructurePattern::identity(2).unwrap()
        );
    }

    #[test]
    fn knockout_single_node_is_empty_system() {
        let p = StructurePattern::identity(1).unwrap();
        assert!(matches!(p.knockout(0), Err(Error::EmptySystem(_))));
    }

    #[test]
    fn knockout_requires_square() {
        let p = StructurePattern::full(2, 3).unwrap();
        assert!(matches!(p.knockout(0), Err(Error::Unsupported(_))));
        assert!(StructurePattern::identity(2).unwrap().knockout(2).is_err());
    }

    #[test]
    fn knockout_compacts_indices() {
        // rows {0:{2}, 1:{2}, 2:{0,1,2}}; drop node 0
        let p = StructurePattern::from_rows(3, &[&[2], &[2], &[0, 1, 2]]).unwrap();
        assert_eq!(p.knockout(0).unwrap().rows(), &[vec![1], vec![0, 1]]);
    }
}

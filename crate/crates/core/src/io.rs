//! File formats: structure JSON, edge lists, pattern matrices, system JSON
//! and DOT export.
//!
//! All indices in files are 1-based.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{
    equation_symbols, CoefficientDistribution, Exponents, StructuredPolySystem, Symbol,
};
use crate::structure::{
    DerivedVariableSpec, GeneralizedStructure, SelfLoopPolicy, Structure, StructurePattern,
    SystemGraph,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    /// Structure JSON (`.json`).
    Json,
    /// Edge list (`.edges`, `.txt`).
    Edges,
    /// Pattern matrix of `0` and `*` (`.pat`).
    Pattern,
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(InputFormat::Json),
            "edges" | "edge-list" | "graph" => Ok(InputFormat::Edges),
            "pattern" | "pat" | "matrix" => Ok(InputFormat::Pattern),
            other => Err(Error::invalid(format!(
                "unknown input format '{other}' (expected json, edges or pattern)"
            ))),
        }
    }
}

impl InputFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "json" => Some(InputFormat::Json),
            "edges" | "txt" => Some(InputFormat::Edges),
            "pat" => Some(InputFormat::Pattern),
            _ => None,
        }
    }
}

/// A structure as it was written in a file.
#[derive(Debug, Clone, PartialEq)]
pub enum ParsedStructure {
    Pattern(StructurePattern),
    Generalized(GeneralizedStructure),
    Graph(SystemGraph),
}

impl ParsedStructure {
    pub fn to_structure(&self) -> Structure {
        match self {
            ParsedStructure::Pattern(p) => Structure::Pattern(p.clone()),
            ParsedStructure::Generalized(g) => Structure::Generalized(g.clone()),
            ParsedStructure::Graph(g) => Structure::Pattern(g.to_pattern()),
        }
    }
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a structure, detecting the format from the extension unless one is given.
pub fn parse_structure(path: &Path, format: Option<InputFormat>) -> Result<ParsedStructure> {
    let format = format
        .or_else(|| InputFormat::from_path(path))
        .ok_or_else(|| {
            Error::invalid(format!(
                "cannot infer the format of {}; pass --input-format",
                path.display()
            ))
        })?;
    parse_structure_str(&read_file(path)?, format)
}

pub fn parse_structure_str(text: &str, format: InputFormat) -> Result<ParsedStructure> {
    match format {
        InputFormat::Json => parse_structure_json(text),
        InputFormat::Edges => parse_edge_list(text).map(ParsedStructure::Graph),
        InputFormat::Pattern => parse_pattern_matrix(text).map(ParsedStructure::Pattern),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureFile {
    variables: usize,
    equations: Vec<EquationEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    derived_vars: Vec<DerivedEntry>,
    #[serde(default)]
    self_loops: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EquationEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    vars: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    derived: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DerivedEntry {
    name: String,
    coeffs: BTreeMap<String, f64>,
}

fn one_based(i: usize, what: &str) -> Result<usize> {
    i.checked_sub(1)
        .ok_or_else(|| Error::structure(format!("{what} indices are 1-based, found 0")))
}

impl StructureFile {
    fn from_structure(s: &Structure, self_loops: bool) -> Self {
        let p = match s {
            Structure::Pattern(p) => p,
            Structure::Generalized(g) => g.base(),
        };
        let equations = (0..p.num_equations())
            .map(|e| EquationEntry {
                name: None,
                vars: p.row(e).iter().map(|v| v + 1).collect(),
                derived: match s {
                    Structure::Pattern(_) => Vec::new(),
                    Structure::Generalized(g) => g
                        .equation_derived(e)
                        .map(|d| g.derived()[d].name().to_string())
                        .collect(),
                },
            })
            .collect();
        let derived_vars = s
            .derived()
            .iter()
            .map(|d| DerivedEntry {
                name: d.name().to_string(),
                coeffs: d
                    .coefficients()
                    .iter()
                    .map(|(v, c)| ((v + 1).to_string(), *c))
                    .collect(),
            })
            .collect();
        StructureFile {
            variables: p.num_variables(),
            equations,
            derived_vars,
            self_loops,
        }
    }

    fn into_structure(self) -> Result<Structure> {
        let m = self.equations.len();
        let n = self.variables;
        let mut allowed = Vec::new();
        for (e, eq) in self.equations.iter().enumerate() {
            for &v in &eq.vars {
                let v = one_based(v, "variable")?;
                if v >= n {
                    return Err(Error::structure(format!(
                        "equation {} references variable {} but there are only {n}",
                        e + 1,
                        v + 1
                    )));
                }
                allowed.push((e, v));
            }
        }
        if self.self_loops {
            if m != n {
                return Err(Error::structure(format!(
                    "self_loops needs a square system, got {m}x{n}"
                )));
            }
            allowed.extend((0..n).map(|i| (i, i)));
        }
        let base = StructurePattern::new(m, n, allowed)?;
        if self.derived_vars.is_empty() {
            if let Some((e, eq)) = self
                .equations
                .iter()
                .enumerate()
                .find(|(_, eq)| !eq.derived.is_empty())
            {
                return Err(Error::structure(format!(
                    "equation {} references undeclared derived variable '{}'",
                    e + 1,
                    eq.derived[0]
                )));
            }
            return Ok(Structure::Pattern(base));
        }
        let derived = self
            .derived_vars
            .into_iter()
            .map(|d| {
                let coeffs = d
                    .coeffs
                    .iter()
                    .map(|(k, &c)| {
                        let v: usize = k.trim().parse().map_err(|_| {
                            Error::structure(format!(
                                "derived variable '{}' has non-integer key '{k}'",
                                d.name
                            ))
                        })?;
                        Ok((one_based(v, "variable")?, c))
                    })
                    .collect::<Result<BTreeMap<_, _>>>()?;
                DerivedVariableSpec::new(d.name, coeffs)
            })
            .collect::<Result<Vec<_>>>()?;
        let names: Vec<Vec<String>> = self.equations.into_iter().map(|eq| eq.derived).collect();
        Ok(Structure::Generalized(GeneralizedStructure::new(
            base, derived, &names,
        )?))
    }
}

pub fn parse_structure_json(text: &str) -> Result<ParsedStructure> {
    let file: StructureFile = serde_json::from_str(text)?;
    Ok(match file.into_structure()? {
        Structure::Pattern(p) => ParsedStructure::Pattern(p),
        Structure::Generalized(g) => ParsedStructure::Generalized(g),
    })
}

pub fn structure_to_json(s: &Structure) -> String {
    serde_json::to_string_pretty(&StructureFile::from_structure(s, false)).expect("serializable")
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

/// Parses an edge list: `i -> j` or `i <-> j` per line, with optional
/// `nodes: N` and `selfloops: on|off` headers and `#` comments. Without a
/// `nodes` header the largest index sets the node count.
pub fn parse_edge_list(text: &str) -> Result<SystemGraph> {
    let mut edges = Vec::new();
    let mut declared_nodes = None;
    let mut policy = SelfLoopPolicy::ExcludeDiagonal;
    let mut largest = 0;
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = strip_comment(raw);
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col = |s: &str| s.as_ptr() as usize - raw.as_ptr() as usize + 1;
        if let Some((key, value)) = trimmed.split_once(':') {
            let value = value.trim();
            match key.trim().to_ascii_lowercase().as_str() {
                "selfloops" | "self_loops" => {
                    policy = match value.to_ascii_lowercase().as_str() {
                        "on" | "true" | "yes" => SelfLoopPolicy::IncludeDiagonal,
                        "off" | "false" | "no" => SelfLoopPolicy::ExcludeDiagonal,
                        _ => {
                            return Err(parse_error(
                                ln,
                                col(value),
                                format!("expected on or off, found '{value}'"),
                            ))
                        }
                    }
                }
                "nodes" => {
                    declared_nodes = Some(value.parse::<usize>().map_err(|_| {
                        parse_error(
                            ln,
                            col(value),
                            format!("expected a node count, found '{value}'"),
                        )
                    })?)
                }
                other => {
                    return Err(parse_error(
                        ln,
                        col(trimmed),
                        format!("unknown header '{other}'"),
                    ))
                }
            }
            continue;
        }
        let (arrow, both) = if let Some(i) = trimmed.find("<->") {
            ((i, 3), true)
        } else if let Some(i) = trimmed.find("->") {
            ((i, 2), false)
        } else {
            return Err(parse_error(
                ln,
                col(trimmed),
                "expected 'i -> j' or 'i <-> j'",
            ));
        };
        let lhs = &trimmed[..arrow.0];
        let rhs = &trimmed[arrow.0 + arrow.1..];
        let node = |s: &str| -> Result<usize> {
            let t = s.trim();
            let at = if t.is_empty() { col(s) } else { col(t) };
            match t.parse::<usize>() {
                Ok(0) => Err(parse_error(ln, at, "node indices are 1-based")),
                Ok(v) => Ok(v - 1),
                Err(_) => Err(parse_error(
                    ln,
                    at,
                    format!("expected a node index, found '{t}'"),
                )),
            }
        };
        let (a, b) = (node(lhs)?, node(rhs)?);
        largest = largest.max(a + 1).max(b + 1);
        edges.push((a, b));
        if both {
            edges.push((b, a));
        }
    }
    let n = declared_nodes.unwrap_or(largest);
    if largest > n {
        return Err(Error::structure(format!(
            "edge references node {largest} but the header declares {n} nodes"
        )));
    }
    SystemGraph::new(n, edges, policy)
}

/// Writes an edge list that [`parse_edge_list`] reads back to the same graph;
/// symmetric pairs are written as `<->`.
pub fn graph_to_edge_list(g: &SystemGraph) -> String {
    let mut out = format!(
        "nodes: {}\nselfloops: {}\n",
        g.num_nodes(),
        if g.self_loops().includes_diagonal() {
            "on"
        } else {
            "off"
        }
    );
    for &(a, b) in g.edges() {
        if a != b && g.edges().contains(&(b, a)) {
            if a < b {
                let _ = writeln!(out, "{} <-> {}", a + 1, b + 1);
            }
        } else {
            let _ = writeln!(out, "{} -> {}", a + 1, b + 1);
        }
    }
    out
}

/// Parses rows of `0` / `*` separated by `/` or newlines. `.` also means zero
/// and `1` or `x` mean allowed; spaces are ignored.
pub fn parse_pattern_matrix(text: &str) -> Result<StructurePattern> {
    let mut rows: Vec<Vec<bool>> = Vec::new();
    let mut widths = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        let mut current = Vec::new();
        let mut row_start = 1;
        for (i, ch) in line.char_indices() {
            let column = line[..i].chars().count() + 1;
            match ch {
                '0' | '.' => current.push(false),
                '*' | '1' | 'x' | 'X' => current.push(true),
                '/' => {
                    rows.push(std::mem::take(&mut current));
                    widths.push((ln + 1, row_start));
                    row_start = column + 1;
                }
                c if c.is_whitespace() => {}
                c => {
                    return Err(parse_error(
                        ln + 1,
                        column,
                        format!("unexpected character '{c}'"),
                    ))
                }
            }
        }
        if !current.is_empty() || line.trim_end().ends_with('/') {
            rows.push(current);
            widths.push((ln + 1, row_start));
        }
    }
    let n = rows.first().map_or(0, Vec::len);
    if let Some(k) = rows.iter().position(|r| r.len() != n) {
        let (line, column) = widths[k];
        return Err(Error::structure(format!(
            "row {} (line {line}, column {column}) has {} entries, expected {n}",
            k + 1,
            rows[k].len()
        )));
    }
    let allowed = rows.iter().enumerate().flat_map(|(e, r)| {
        r.iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(move |(v, _)| (e, v))
    });
    StructurePattern::new(rows.len(), n, allowed)
}

pub fn pattern_to_matrix_string(p: &StructurePattern) -> String {
    let mut out = String::new();
    for e in 0..p.num_equations() {
        for v in 0..p.num_variables() {
            out.push(if p.contains(e, v) { '*' } else { '0' });
        }
        out.push('\n');
    }
    out
}

/// Bipartite DOT graph of a pattern; `highlight` pairs (0-based) are drawn bold.
pub fn pattern_to_dot(p: &StructurePattern, highlight: &[(usize, usize)]) -> String {
    let mut out = String::from("graph structure {\n  rankdir=LR;\n  node [shape=circle];\n");
    for e in 0..p.num_equations() {
        let _ = writeln!(out, "  f{} [shape=box];", e + 1);
    }
    for v in 0..p.num_variables() {
        let _ = writeln!(out, "  x{};", v + 1);
    }
    for (e, v) in p.allowed() {
        let style = if highlight.contains(&(e, v)) {
            " [style=bold, color=red]"
        } else {
            ""
        };
        let _ = writeln!(out, "  x{} -- f{}{style};", v + 1, e + 1);
    }
    out.push_str("}\n");
    out
}

/// Directed DOT graph: an arrow `i -> j` means variable `i` feeds equation `j`.
pub fn graph_to_dot(g: &SystemGraph) -> String {
    let mut out = String::from("digraph system {\n");
    for i in 0..g.num_nodes() {
        let _ = writeln!(out, "  {};", i + 1);
    }
    for &(a, b) in g.edges() {
        let _ = writeln!(out, "  {} -> {};", a + 1, b + 1);
    }
    if g.self_loops().includes_diagonal() {
        out.push_str("  // every node also depends on itself\n");
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    structure: StructureFile,
    degree: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    distribution: Option<CoefficientDistribution>,
    equations: Vec<EquationTerms>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EquationTerms {
    /// Names the exponent positions refer to, e.g. `["x1", "z"]`.
    symbols: Vec<String>,
    terms: Vec<Term>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Term {
    exponents: Exponents,
    coeff: f64,
}

fn symbol_name(s: &Structure, sym: Symbol) -> String {
    match sym {
        Symbol::Var(v) => format!("x{}", v + 1),
        Symbol::Derived(d) => s.derived()[d].name().to_string(),
    }
}

pub fn system_to_json(sys: &StructuredPolySystem) -> String {
    let s = sys.structure();
    let file = SystemFile {
        structure: StructureFile::from_structure(s, false),
        degree: sys.degree(),
        seed: sys.seed(),
        distribution: sys.distribution(),
        equations: sys
            .equations()
            .iter()
            .map(|eq| EquationTerms {
                symbols: eq.symbols().iter().map(|&x| symbol_name(s, x)).collect(),
                terms: eq
                    .terms()
                    .iter()
                    .map(|(exponents, &coeff)| Term {
                        exponents: exponents.clone(),
                        coeff,
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("serializable")
}

pub fn system_from_json(text: &str) -> Result<StructuredPolySystem> {
    let file: SystemFile = serde_json::from_str(text)?;
    let structure = file.structure.into_structure()?;
    if file.equations.len() != structure.num_equations() {
        return Err(Error::DimensionMismatch {
            expected: structure.num_equations(),
            found: file.equations.len(),
        });
    }
    let mut equations = Vec::with_capacity(file.equations.len());
    for (e, eq) in file.equations.into_iter().enumerate() {
        let expected: Vec<String> = equation_symbols(&structure, e)
            .into_iter()
            .map(|x| symbol_name(&structure, x))
            .collect();
        if eq.symbols != expected {
            return Err(Error::structure(format!(
                "equation {} lists symbols {:?} but its structure gives {:?}",
                e + 1,
                eq.symbols,
                expected
            )));
        }
        equations.push(
            eq.terms
                .into_iter()
                .map(|t| (t.exponents, t.coeff))
                .collect(),
        );
    }
    StructuredPolySystem::from_parts(
        structure,
        file.degree,
        file.seed,
        file.distribution,
        equations,
    )
}

/// Whether a JSON document looks like a serialized system rather than a bare structure.
pub fn is_system_json(text: &str) -> bool {
    serde_json::from_str::<serde_json::Value>(text)
        .ok()
        .is_some_and(|v| v.get("structure").is_some())
}

//! Built-in example structures.
//!
//! Graph datasets are stored as edge lists and equation-level datasets as
//! structure JSON under `data/`; both are compiled into the crate.

use crate::error::{Error, Result};
use crate::io::{parse_edge_list, parse_structure_json, ParsedStructure};
use crate::poly::StructuredPolySystem;
use crate::structure::{SelfLoopPolicy, Structure, StructurePattern, SystemGraph};

pub const NAMES: [&str; 11] = [
    "cep3",
    "robust4",
    "example5",
    "eqcep1",
    "robotarm",
    "twogene",
    "jakstat",
    "trophic5",
    "trophic5plus",
    "sole26",
    "xy",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: &'static str,
    pub description: &'static str,
    /// Where the structure comes from.
    pub source: &'static str,
    pub self_loops: SelfLoopPolicy,
    pub structure: Structure,
    /// Published generic rank, where one is stated.
    pub expected_rank: Option<usize>,
    /// Concrete equations, for datasets that come with them.
    pub system: Option<StructuredPolySystem>,
    pub graph: Option<SystemGraph>,
    /// Natural starting point for tracing and probing.
    pub base_point: Option<Vec<f64>>,
}

impl Dataset {
    /// The plain pattern, or `None` for structures with derived variables.
    pub fn pattern(&self) -> Option<&StructurePattern> {
        self.structure.as_pattern()
    }
}

fn graph(text: &str) -> SystemGraph {
    parse_edge_list(text).expect("bundled edge list is valid")
}

fn structure_json(text: &str) -> Structure {
    match parse_structure_json(text).expect("bundled structure is valid") {
        ParsedStructure::Pattern(p) => Structure::Pattern(p),
        ParsedStructure::Generalized(g) => Structure::Generalized(g),
        ParsedStructure::Graph(g) => Structure::Pattern(g.to_pattern()),
    }
}

fn from_graph(
    name: &'static str,
    description: &'static str,
    source: &'static str,
    g: SystemGraph,
) -> Dataset {
    Dataset {
        name,
        description,
        source,
        self_loops: g.self_loops(),
        structure: Structure::Pattern(g.to_pattern()),
        expected_rank: None,
        system: None,
        graph: Some(g),
        base_point: None,
    }
}

fn from_json(
    name: &'static str,
    description: &'static str,
    source: &'static str,
    text: &str,
) -> Dataset {
    Dataset {
        name,
        description,
        source,
        self_loops: SelfLoopPolicy::ExcludeDiagonal,
        structure: structure_json(text),
        expected_rank: None,
        system: None,
        graph: None,
        base_point: None,
    }
}

fn cep3() -> Dataset {
    Dataset {
        expected_rank: Some(2),
        ..from_graph(
            "cep3",
            "two predators feeding on a single prey",
            "competitive exclusion principle (Gause 1934; Hardin 1960)",
            graph(include_str!("../data/cep3.edges")),
        )
    }
}

fn robust4() -> Dataset {
    Dataset {
        expected_rank: Some(4),
        ..from_graph(
            "robust4",
            "two predators sharing two prey",
            "two-prey extension of the competitive exclusion example",
            graph(include_str!("../data/robust4.edges")),
        )
    }
}

fn example5() -> Dataset {
    Dataset {
        expected_rank: Some(3),
        ..from_json(
            "example5",
            "two equations on all variables, two on the combination z = x1 + 2 x2",
            "derived-variable example with a = 1, b = 2",
            include_str!("../data/example5.json"),
        )
    }
}

fn eqcep1() -> Dataset {
    let pattern = graph(include_str!("../data/cep3.edges")).to_pattern();
    // f1 = x3^2, f2 = x3^4 + 1, f3 = x1^2 - x2 + x3^4
    let system = StructuredPolySystem::from_monomials(
        pattern.clone(),
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
    .expect("eqcep1 respects its pattern");
    Dataset {
        name: "eqcep1",
        description: "concrete polynomials on the two-predator one-prey pattern",
        source: "competitive exclusion principle (Gause 1934; Hardin 1960)",
        self_loops: SelfLoopPolicy::ExcludeDiagonal,
        structure: Structure::Pattern(pattern),
        expected_rank: Some(2),
        system: Some(system),
        graph: None,
        base_point: Some(vec![1.0, 1.0, 1.0]),
    }
}

fn robotarm() -> Dataset {
    Dataset {
        expected_rank: Some(3),
        ..from_json(
            "robotarm",
            "three constraints linking shoulder, elbow, wrist and hand coordinates",
            "planar robot arm with two-dimensional joint positions",
            include_str!("../data/robotarm.json"),
        )
    }
}

fn twogene() -> Dataset {
    Dataset {
        expected_rank: Some(4),
        ..from_json(
            "twogene",
            "two genes with mRNA and protein levels",
            "two-gene regulatory network with cross-repression",
            include_str!("../data/twogene.json"),
        )
    }
}

fn jakstat() -> Dataset {
    Dataset {
        expected_rank: Some(11),
        ..from_json(
            "jakstat",
            "IL13-induced JAK2/STAT5 signaling, 12 species",
            "Raia et al., Cancer Research 71 (2011), model MedB-1",
            include_str!("../data/jakstat.json"),
        )
    }
}

fn trophic5_graph() -> SystemGraph {
    graph(include_str!("../data/trophic5.edges"))
}

fn trophic5() -> Dataset {
    Dataset {
        expected_rank: Some(4),
        ..from_graph(
            "trophic5",
            "three predators and two prey",
            "two-level trophic web without intra-level links",
            trophic5_graph(),
        )
    }
}

fn trophic5plus() -> Dataset {
    let base = trophic5_graph();
    let g = SystemGraph::new(
        base.num_nodes(),
        base.edges().iter().copied().chain([(0, 1)]),
        base.self_loops(),
    )
    .expect("valid graph");
    Dataset {
        expected_rank: Some(5),
        ..from_graph(
            "trophic5plus",
            "three predators and two prey, plus predator 1 feeding predator 2",
            "two-level trophic web with one intra-level link 1 -> 2",
            g,
        )
    }
}

fn sole26() -> Dataset {
    Dataset {
        expected_rank: Some(20),
        ..from_graph(
            "sole26",
            "26-species food web",
            "Sole & Montoya, Proc. R. Soc. B 268 (2001)",
            graph(include_str!("../data/sole26.edges")),
        )
    }
}

fn xy() -> Dataset {
    let pattern = StructurePattern::full(1, 2).expect("nonempty");
    let system =
        StructuredPolySystem::from_monomials(pattern.clone(), vec![vec![(vec![1, 1], 1.0)]])
            .expect("x1 x2 respects the full pattern");
    Dataset {
        name: "xy",
        description: "F(x1, x2) = x1 x2",
        source: "level sets of a product: hyperbolas, or the two axes at level 0",
        self_loops: SelfLoopPolicy::ExcludeDiagonal,
        structure: Structure::Pattern(pattern),
        expected_rank: Some(1),
        system: Some(system),
        graph: None,
        base_point: Some(vec![1.0, 1.0]),
    }
}

pub fn get(name: &str) -> Result<Dataset> {
    Ok(match name.to_ascii_lowercase().as_str() {
        "cep3" => cep3(),
        "robust4" => robust4(),
        "example5" => example5(),
        "eqcep1" => eqcep1(),
        "robotarm" => robotarm(),
        "twogene" => twogene(),
        "jakstat" => jakstat(),
        "trophic5" => trophic5(),
        "trophic5plus" => trophic5plus(),
        "sole26" => sole26(),
        "xy" => xy(),
        _ => return Err(Error::UnknownDataset(name.to_string())),
    })
}

pub fn all() -> Vec<Dataset> {
    NAMES
        .iter()
        .map(|n| get(n).expect("listed dataset exists"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structural::classify;

    #[test]
    fn expected_ranks_on_patterns() {
        for d in all() {
            if let (Some(p), Some(r)) = (d.pattern(), d.expected_rank) {
                assert_eq!(classify(p).structural_rank, r, "{}", d.name);
            }
        }
    }

    #[test]
    fn sole26_shape() {
        let r = classify(get("sole26").unwrap().pattern().unwrap());
        assert_eq!(
            (r.num_equations, r.structural_rank, r.solution_dimension),
            (26, 20, 6)
        );
    }

    #[test]
    fn example5_is_generalized() {
        let d = get("example5").unwrap();
        assert!(d.pattern().is_none());
        assert_eq!(
            classify(&d.structure.effective_pattern()).structural_rank,
            4
        );
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(get("nope"), Err(Error::UnknownDataset(_))));
    }

    #[test]
    fn trophic5plus_adds_one_entry() {
        let base = get("trophic5").unwrap();
        let plus = get("trophic5plus").unwrap();
        assert_eq!(
            plus.pattern().unwrap(),
            &base.pattern().unwrap().with_entry(1, 0).unwrap()
        );
    }
}

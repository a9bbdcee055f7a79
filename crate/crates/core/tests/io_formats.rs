use structrank::datasets;
use structrank::io::{
    graph_to_edge_list, parse_edge_list, parse_pattern_matrix, parse_structure,
    parse_structure_json, pattern_to_matrix_string, structure_to_json, system_from_json,
    system_to_json, InputFormat, ParsedStructure,
};
use structrank::poly::{sample_system, CoefficientDistribution};
use structrank::Error;

#[test]
fn three_formats_agree_on_the_cep_pattern() {
    let from_edges = parse_edge_list("1 <-> 3\n2 <-> 3\n3 -> 3\nselfloops: off\n")
        .unwrap()
        .to_pattern();
    let from_matrix = parse_pattern_matrix("00*/00*/***").unwrap();
    let json = r#"{"variables": 3, "equations": [{"name": "f1", "vars": [3]}, {"name": "f2", "vars": [3]},
        {"name": "f3", "vars": [1, 2, 3]}]}"#;
    let ParsedStructure::Pattern(from_json) = parse_structure_json(json).unwrap() else {
        panic!("expected a plain pattern");
    };
    assert_eq!(from_edges, from_matrix);
    assert_eq!(from_json, from_matrix);
    assert_eq!(
        datasets::get("cep3").unwrap().pattern().unwrap(),
        &from_matrix
    );
}

#[test]
fn self_loops_header_adds_diagonal() {
    let g = parse_edge_list("selfloops: on\n1 -> 2\n").unwrap();
    let p = g.to_pattern();
    assert!(p.contains(0, 0) && p.contains(1, 1) && p.contains(1, 0));
    assert_eq!(p.nnz(), 3);
}

#[test]
fn json_self_loops_and_validation() {
    let text =
        r#"{"variables": 2, "equations": [{"vars": [2]}, {"vars": []}], "self_loops": true}"#;
    let p = parse_structure_json(text)
        .unwrap()
        .to_structure()
        .effective_pattern();
    assert_eq!(p.nnz(), 3);
    let out_of_range = r#"{"variables": 2, "equations": [{"vars": [3]}]}"#;
    assert!(matches!(
        parse_structure_json(out_of_range),
        Err(Error::Structure(_))
    ));
    let undeclared = r#"{"variables": 2, "equations": [{"vars": [1], "derived": ["w"]}]}"#;
    assert!(matches!(
        parse_structure_json(undeclared),
        Err(Error::Structure(_))
    ));
}

#[test]
fn every_dataset_round_trips_through_json() {
    for d in datasets::all() {
        let back = parse_structure_json(&structure_to_json(&d.structure))
            .unwrap()
            .to_structure();
        assert_eq!(back, d.structure, "{}", d.name);
        if let Some(g) = &d.graph {
            assert_eq!(
                &parse_edge_list(&graph_to_edge_list(g)).unwrap(),
                g,
                "{}",
                d.name
            );
        }
        if let Some(p) = d.pattern() {
            assert_eq!(
                &parse_pattern_matrix(&pattern_to_matrix_string(p)).unwrap(),
                p
            );
        }
    }
}

#[test]
fn system_json_round_trip_is_exact() {
    for name in ["example5", "jakstat", "robotarm"] {
        let d = datasets::get(name).unwrap();
        let sys = sample_system(&d.structure, 3, 17, CoefficientDistribution::Normal).unwrap();
        let text = system_to_json(&sys);
        let back = system_from_json(&text).unwrap();
        assert_eq!(back, sys, "{name}");
        assert_eq!(system_to_json(&back), text);
    }
    let eqcep1 = datasets::get("eqcep1").unwrap().system.unwrap();
    assert_eq!(system_from_json(&system_to_json(&eqcep1)).unwrap(), eqcep1);
}

#[test]
fn system_json_rejects_mismatched_symbols() {
    let sys = datasets::get("xy").unwrap().system.unwrap();
    let text = system_to_json(&sys).replace("\"x2\"", "\"x9\"");
    assert!(matches!(system_from_json(&text), Err(Error::Structure(_))));
}

#[test]
fn extension_detection_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cep.graph");
    std::fs::write(&path, "1 <-> 3\n2 <-> 3\n3 -> 3\n").unwrap();
    assert!(matches!(
        parse_structure(&path, None),
        Err(Error::InvalidArgument(_))
    ));
    assert!(matches!(
        parse_structure(&path, Some(InputFormat::Edges)).unwrap(),
        ParsedStructure::Graph(_)
    ));
    let missing = dir.path().join("missing.json");
    assert!(matches!(
        parse_structure(&missing, None),
        Err(Error::Io { .. })
    ));
}

#[test]
fn edge_list_declared_node_count() {
    let g = parse_edge_list("nodes: 5\n1 -> 2\n").unwrap();
    assert_eq!(g.num_nodes(), 5);
    assert!(matches!(
        parse_edge_list("nodes: 2\n1 -> 3\n"),
        Err(Error::Structure(_))
    ));
}

use std::fs;
use std::path::PathBuf;

use nodeglass::exploration::Rgb;
use nodeglass::ingest::{
    initial_view, parse_edge_list, parse_gexf, parse_gexf_document, preview, write_edge_list,
    write_gexf, Column, Format, ImportSpec, InitialViewPolicy,
};
use nodeglass::layout::{LayoutParams, Point};
use nodeglass::snapshot::{decode, encode, validate, Metadata};
use nodeglass::AttributeValue;

fn fixture(name: &str) -> Vec<u8> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn lesmis_spec() -> ImportSpec {
    ImportSpec::tsv()
        .with_header(true)
        .columns("source".parse().unwrap(), "target".parse().unwrap())
        .weight(Column::Name("weight".into()))
}

#[test]
fn lesmis_counts() {
    let g = parse_edge_list(&fixture("lesmis.tsv")[..], &lesmis_spec()).unwrap();
    assert_eq!((g.node_count(), g.edge_count()), (77, 254));
    assert!(!g.is_directed());
    assert!(g.edges().iter().all(|e| e.weight.is_some()));
}

#[test]
fn lesmis_preview() {
    let p = preview(&fixture("lesmis.tsv")[..], &lesmis_spec()).unwrap();
    assert_eq!(p.column_names, ["source", "target", "weight"]);
    assert_eq!(p.rows.len(), 10);
    assert_eq!(p.rows[0], ["Napoleon", "Myriel", "1"]);
}

#[test]
fn lesmis_rewrite_is_stable() {
    let g = parse_edge_list(&fixture("lesmis.tsv")[..], &lesmis_spec()).unwrap();
    let text = write_edge_list(&g, Format::Tsv).unwrap();
    let again = parse_edge_list(text.as_bytes(), &lesmis_spec()).unwrap();
    assert_eq!(write_edge_list(&again, Format::Tsv).unwrap(), text);
    assert_eq!((again.node_count(), again.edge_count()), (77, 254));
}

#[test]
fn citations_with_comment_line() {
    let spec = ImportSpec::csv().with_header(true).directed(true);
    let g = parse_edge_list(&fixture("citations.csv")[..], &spec).unwrap();
    assert!(g.is_directed());
    assert_eq!(g.edge_count(), 176);
    assert_eq!(g.node_count(), 60);
}

#[test]
fn cycle8_headerless() {
    let g = parse_edge_list(&fixture("cycle8.csv")[..], &ImportSpec::csv()).unwrap();
    assert_eq!((g.node_count(), g.edge_count()), (8, 8));
}

#[test]
fn small_gexf_values() {
    let g = parse_gexf(&fixture("small.gexf")).unwrap();
    assert!(g.is_directed());
    assert_eq!((g.node_count(), g.edge_count()), (5, 5));
    let n0 = &g.node("n0").unwrap().attributes;
    assert_eq!(n0["label"], AttributeValue::Text("Alpha & Omega".into()));
    assert_eq!(n0["score"], AttributeValue::Number(0.5));
    assert_eq!(n0["open_access"], AttributeValue::Bool(true));
    let n2 = &g.node("n2").unwrap().attributes;
    assert_eq!(n2["field"], AttributeValue::Text("unknown".into()));
    assert!(!n2.contains_key("open_access"));
    assert_eq!(
        g.node("n3").unwrap().attributes["score"],
        AttributeValue::Number(0.002)
    );
    assert_eq!(g.edges()[0].weight, Some(2.5));
    assert_eq!(g.edges()[1].weight, None);
    assert_eq!(g.self_loop_count(), 1);
}

#[test]
fn small_gexf_roundtrip() {
    let g = parse_gexf(&fixture("small.gexf")).unwrap();
    let again = parse_gexf(write_gexf(&g, None).as_bytes()).unwrap();
    assert_eq!(again, g);
}

#[test]
fn small_gexf_viz_reaches_the_view() {
    let doc = parse_gexf_document(&fixture("small.gexf")).unwrap();
    let view = doc
        .initial_view(InitialViewPolicy::WholeGraph, &LayoutParams::default())
        .unwrap();
    assert_eq!(view.layout.position("n0"), Some(Point::new(10.0, 20.0)));
    assert_eq!(view.overrides["n0"].color, Some(Rgb::new(255, 0, 0)));

    let written = write_gexf(&doc.graph, Some(&view));
    let back = parse_gexf_document(written.as_bytes()).unwrap();
    assert_eq!(back.graph, doc.graph);
    assert_eq!(back.viz.positions.len(), 5);
    assert_eq!(back.viz.overrides, doc.viz.overrides);
}

#[test]
fn lesmis_snapshot() {
    let g = parse_edge_list(&fixture("lesmis.tsv")[..], &lesmis_spec()).unwrap();
    let view = initial_view(&g, InitialViewPolicy::WholeGraph, &LayoutParams::default()).unwrap();
    let bytes = encode(&g, &view, &Metadata::new("lesmis")).unwrap();
    assert_eq!(validate(&bytes), Ok(()));
    let json: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(json["graph"]["nodes"].as_array().unwrap().len(), 77);
    let back = decode(&bytes).unwrap();
    assert_eq!(back.graph, g);
    assert_eq!(back.view, view);
}

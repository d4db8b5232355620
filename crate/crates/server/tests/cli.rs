use std::path::{Path, PathBuf};

use clap::Parser;
use dialogkg::graph::{Family, Graph};
use dialogkg_server::cli::{run, Cli};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name).display().to_string()
}

fn dialogkg(args: &[&str]) {
    let cli = Cli::try_parse_from(std::iter::once("dialogkg").chain(args.iter().copied())).unwrap_or_else(|e| panic!("{e}"));
    run(cli).unwrap_or_else(|e| panic!("{args:?}: {e:#}"));
}

fn lines(p: &Path) -> usize {
    std::fs::read_to_string(p).unwrap().lines().count()
}

#[test]
fn every_stage_runs_on_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let out = |name: &str| dir.path().join(name).display().to_string();
    let (corpus, parses, kb, vectors) = (fixture("corpus.jsonl"), fixture("campus.conllu"), fixture("kb.tsv"), fixture("vectors.txt"));

    dialogkg(&["extract", "--corpus", &corpus, "--parses", &parses, "--method", "parsing", "--out", &out("mentions.jsonl")]);
    assert_eq!(lines(dir.path().join("mentions.jsonl").as_path()), 4);

    dialogkg(&["link", "--mentions", &out("mentions.jsonl"), "--kb", &kb, "--vectors", &vectors, "--threshold", "0.5", "--out", &out("linked.jsonl")]);
    dialogkg(&["link", "--parses", &parses, "--kb", &kb, "--level", "entity", "--out", &out("concepts.jsonl")]);
    dialogkg(&[
        "build-edges", "--linked", &out("linked.jsonl"), "--concepts", &out("concepts.jsonl"), "--corpus", &corpus, "--kb", &kb,
        "--parses", &parses, "--min-weight-event", "1", "--min-weight-concept", "1", "--out", &out("edges.jsonl"),
    ]);
    dialogkg(&["assemble", "--kb", &kb, "--edges", &out("edges.jsonl"), "--out", &out("graph.jsonl.gz")]);

    let g = Graph::load(dir.path().join("graph.jsonl.gz")).unwrap();
    assert!(g.stats().event_flows > 0);
    assert_eq!(g.stats().total_triplets as usize, g.edge_count());
    assert!(g.edges().filter(|e| e.family == Family::EventFlow).all(|e| e.weight as usize == e.provenance.len()));

    dialogkg(&["stats", "--graph", &out("graph.jsonl.gz")]);
    dialogkg(&["eval-edges", "--graph", &out("graph.jsonl.gz"), "--pairs", &out("linked.jsonl"), "--subkind", "next_utterance", "--kinds", "event_flow,atomic"]);
    dialogkg(&[
        "scenario", "--graph", &out("graph.jsonl.gz"), "--matches", &out("linked.jsonl"), "--fraction", "0.5", "--corpus", &corpus,
        "--scenario", "campus", "--out", &out("scenario.json"),
    ]);
    let sg: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("scenario.json")).unwrap()).unwrap();
    assert_eq!(sg["scenario"], "campus");

    dialogkg(&["eval-matching", "--corpus", &corpus, "--parses", &parses, "--kb", &kb, "--vectors", &vectors, "--sample", "3", "--seed", "7"]);
    dialogkg(&[
        "bench", "--graph", &out("graph.jsonl.gz"), "--corpus", &corpus, "--parses", &parses, "--vectors", &vectors, "--task", "intent",
        "--mode", "knowledge+history", "--test-fraction", "0.3", "--export", &out("instances.jsonl"),
    ]);
    assert_eq!(lines(dir.path().join("instances.jsonl").as_path()), 12);

    dialogkg(&["translate", "--kb", &kb, "--out", &out("translated.jsonl")]);
    assert_eq!(lines(dir.path().join("translated.jsonl").as_path()), 21);
    dialogkg(&["export-pairs", "--matches", &out("linked.jsonl"), "--k", "2", "--out", &out("pairs.jsonl")]);
    assert_eq!(lines(dir.path().join("pairs.jsonl").as_path()), 2);
}

#[test]
fn bad_arguments_are_rejected() {
    assert!(Cli::try_parse_from(["dialogkg", "extract", "--method", "nope"]).is_err());
    assert!(Cli::try_parse_from(["dialogkg", "link", "--kb", "k", "--out", "o"]).is_err());
    let cli = Cli::try_parse_from(["dialogkg", "stats", "--graph", "/nonexistent/graph.jsonl"]).unwrap();
    assert!(run(cli).is_err());
}

//! Assembles a graph, then reports family counts, neighbor listings,
//! undirected distances, pair connectivity and a scenario subgraph.
//!
//! cargo run -p dialogkg --example graph_metrics

use std::path::PathBuf;

use dialogkg::edges::{EventFlowKind, FlowEdge, FlowKind, Origin, Provenance, TailIdentity};
use dialogkg::graph::{assemble, rank_heads, Direction, Family};
use dialogkg::kb::load_kb;

fn flow(from: &str, to: &str, conv: &str) -> FlowEdge {
    let prov = Provenance { conversation: conv.into(), utterances: vec![0, 1], origin: Origin::Pipeline };
    FlowEdge::new(FlowKind::EventFlow, Some(EventFlowKind::NextUtterance), from, to, None, prov)
}

fn main() -> dialogkg::Result<()> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let kb = load_kb(fixtures.join("kb.tsv"))?;
    let flows = dialogkg::edges::merge_edges([flow("study", "college", "c1"), flow("college", "relax", "c1"), flow("study", "college", "c2")]);
    let g = assemble(&kb, &flows, TailIdentity::Global)?;

    println!("{}", serde_json::to_string_pretty(&g.stats())?);
    for (e, n) in g.neighbors("college", None, Direction::Both)? {
        println!("college {} {:<22} weight {}", e.family.as_str(), n.id, e.weight);
    }

    let atomic = [Family::Atomic];
    println!("study..relax over all edges: {:?}", g.distance("study", "relax", None)?);
    println!("study..relax over atomic only: {:?}", g.distance("study", "relax", Some(&atomic))?);

    let pairs: Vec<(String, String)> =
        [("study", "relax"), ("study", "sleep"), ("urge", "urge")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    let eval = g.edge_evaluation(&pairs, Some(&[Family::EventFlow]))?;
    println!("connectivity {:.2}, avg distance {:?}, excluded {}", eval.connectivity, eval.avg_distance, eval.excluded);

    let matches: Vec<_> = ["study", "study", "college", "relax"]
        .iter()
        .enumerate()
        .map(|(i, h)| dialogkg::link::MentionHeadMatch {
            mention: dialogkg::extract::EventMention {
                text: format!("m{i}"),
                source: dialogkg::extract::MentionSource { conversation: "c1".into(), utterance: i, sub_utterance: 0 },
                driver: None,
                method: dialogkg::extract::Method::Parsing,
                seed: None,
                tokens: vec![],
            },
            head_id: h.to_string(),
            head_text: h.to_string(),
            score: 0.9,
        })
        .collect();
    println!("ranked heads: {:?}", rank_heads(&matches));
    let sg = g.scenario_subgraph("campus", &matches, 0.5)?;
    println!("scenario keeps {:?}: {} nodes, {} edges", sg.heads, sg.nodes.len(), sg.edges.len());
    Ok(())
}

//! Fixtures, random generators and brute-force oracles shared by the
//! integration tests and the acceptance suite.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;

use dialogkg::edges::{EventFlowKind, FlowEdge, FlowKind, LinkedConversation, Origin, Provenance, TailIdentity};
use dialogkg::edit::{EditOp, EditPayload};
use dialogkg::extract::{EventMention, MentionSource, Method};
use dialogkg::graph::{assemble, Family, Graph, NodeKind};
use dialogkg::kb::{HeadLevel, Kb, Relation};
use dialogkg::link::MentionHeadMatch;
use dialogkg::IntentLabel;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn matched(conv: &str, utt: usize, sub: usize, head: &str, score: f64) -> MentionHeadMatch {
    MentionHeadMatch {
        mention: EventMention {
            text: format!("{conv}/{utt}/{sub}"),
            source: MentionSource { conversation: conv.into(), utterance: utt, sub_utterance: sub },
            driver: None,
            method: Method::Parsing,
            seed: None,
            tokens: vec![],
        },
        head_id: head.into(),
        head_text: head.into(),
        score,
    }
}

/// Up to 20 conversations over up to 50 heads, matches in shuffled order.
pub fn random_matches(seed: u64) -> Vec<MentionHeadMatch> {
    let mut r = rng(seed);
    let heads = r.gen_range(1..=50);
    let mut out = Vec::new();
    for c in 0..r.gen_range(1..=20) {
        for u in 0..r.gen_range(1..=8) {
            let mut sub = 0;
            for _ in 0..r.gen_range(0..=3) {
                sub += r.gen_range(0..=1);
                out.push(matched(&format!("c{c:02}"), u, sub, &format!("h{:02}", r.gen_range(0..heads)), 0.8));
            }
        }
    }
    out.shuffle(&mut r);
    out
}

pub type FlowMultiset = BTreeMap<(Option<EventFlowKind>, String, String), u32>;

/// Enumerates adjacent linked pairs by checking every ordered pair of
/// matches against the adjacency definition directly.
pub fn brute_force_flows(matches: &[MentionHeadMatch], cross_product: bool, with_subkind: bool) -> FlowMultiset {
    // Position of a match: (conversation, utterance, sub-utterance, input order).
    let pos: Vec<(&str, usize, usize, usize)> = matches
        .iter()
        .enumerate()
        .map(|(i, m)| (m.mention.source.conversation.as_str(), m.mention.source.utterance, m.mention.source.sub_utterance, i))
        .collect();
    let before = |a: &(&str, usize, usize, usize), b: &(&str, usize, usize, usize)| (a.2, a.3) < (b.2, b.3);
    let mut out = FlowMultiset::new();
    for x in &pos {
        for y in &pos {
            if x.0 != y.0 || x.3 == y.3 {
                continue;
            }
            let (hx, hy) = (&matches[x.3].head_id, &matches[y.3].head_id);
            if hx == hy {
                continue;
            }
            let same_utt = x.1 == y.1;
            let between = pos.iter().any(|z| z.0 == x.0 && z.1 == x.1 && before(x, z) && before(z, y));
            let sub_edge = same_utt && before(x, y) && !between;
            let last = !pos.iter().any(|z| z.0 == x.0 && z.1 == x.1 && before(x, z));
            let first = !pos.iter().any(|z| z.0 == y.0 && z.1 == y.1 && before(z, y));
            let utt_edge = y.1 == x.1 + 1 && (cross_product || (last && first));
            let sk = |k| with_subkind.then_some(k);
            if sub_edge {
                *out.entry((sk(EventFlowKind::NextSubUtterance), hx.clone(), hy.clone())).or_default() += 1;
            }
            if utt_edge {
                *out.entry((sk(EventFlowKind::NextUtterance), hx.clone(), hy.clone())).or_default() += 1;
            }
        }
    }
    out
}

pub fn as_multiset(edges: &[FlowEdge]) -> FlowMultiset {
    let mut out = FlowMultiset::new();
    for e in edges {
        assert_eq!(e.weight as usize, e.provenance.len());
        *out.entry((e.subkind, e.from.clone(), e.to.clone())).or_default() += e.weight;
    }
    out
}

pub fn grouped(matches: Vec<MentionHeadMatch>) -> Vec<LinkedConversation> {
    dialogkg::edges::group_matches(matches)
}

fn prov(i: usize) -> Provenance {
    Provenance { conversation: format!("c{i}"), utterances: vec![i, i + 1], origin: Origin::Pipeline }
}

/// Random graph of at most `max_nodes` nodes: event heads joined by
/// event flows, some heads carrying atomic tails.
pub fn random_graph(seed: u64, max_nodes: usize) -> Graph {
    let mut r = rng(seed);
    let heads = r.gen_range(2..=max_nodes * 2 / 3);
    let mut kb = Kb::new();
    for h in 0..heads {
        kb.add_head(&format!("h{h:03}"), &format!("event {h}"), HeadLevel::Event).unwrap();
    }
    let tails = r.gen_range(0..=(max_nodes - heads).min(heads));
    for t in 0..tails {
        let h = format!("h{:03}", r.gen_range(0..heads));
        kb.add_triple(&h, Relation::ALL[r.gen_range(0..Relation::ALL.len())], &format!("tail {t}")).unwrap();
    }
    let mut flows = Vec::new();
    for i in 0..r.gen_range(0..=heads * 3 / 2) {
        let (a, b) = (r.gen_range(0..heads), r.gen_range(0..heads));
        if a == b {
            continue;
        }
        let sk = if r.gen_bool(0.5) { EventFlowKind::NextUtterance } else { EventFlowKind::NextSubUtterance };
        flows.push(FlowEdge::new(FlowKind::EventFlow, Some(sk), format!("h{a:03}"), format!("h{b:03}"), None, prov(i)));
    }
    let flows = dialogkg::edges::merge_edges(flows);
    assemble(&kb, &flows, TailIdentity::Global).unwrap()
}

/// All-pairs shortest hop counts over undirected edges.
pub fn floyd_warshall(g: &Graph, families: Option<&[Family]>) -> (Vec<String>, Vec<Vec<Option<usize>>>) {
    let ids: Vec<String> = g.nodes().map(|n| n.id.clone()).collect();
    let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let n = ids.len();
    const INF: usize = usize::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for e in g.edges() {
        if families.is_some_and(|fs| !fs.contains(&e.family)) {
            continue;
        }
        let (a, b) = (index[e.from.as_str()], index[e.to.as_str()]);
        if a != b {
            d[a][b] = 1;
            d[b][a] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k] == INF {
                continue;
            }
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    let d = d.into_iter().map(|row| row.into_iter().map(|x| (x < INF).then_some(x)).collect()).collect();
    (ids, d)
}

/// Chain h0 - h1 - h2 - h3 plus an isolated h9.
pub fn chain_graph() -> Graph {
    let mut kb = Kb::new();
    for h in ["h0", "h1", "h2", "h3", "h9"] {
        kb.add_head(h, h, HeadLevel::Event).unwrap();
    }
    let flows: Vec<FlowEdge> = [("h0", "h1"), ("h1", "h2"), ("h2", "h3")]
        .iter()
        .enumerate()
        .map(|(i, (a, b))| FlowEdge::new(FlowKind::EventFlow, Some(EventFlowKind::NextUtterance), *a, *b, None, prov(i)))
        .collect();
    assemble(&kb, &flows, TailIdentity::Global).unwrap()
}

pub fn load_fixture_kb() -> Kb {
    dialogkg::kb::load_kb(fixture("kb.tsv")).unwrap()
}

fn pick<'a, T>(r: &mut ChaCha8Rng, xs: &'a [T]) -> Option<&'a T> {
    xs.choose(r)
}

/// A random edit that may or may not be valid against `g`.
pub fn random_edit(r: &mut ChaCha8Rng, g: &Graph, step: usize) -> EditOp {
    let heads: Vec<&str> = g.nodes().filter(|n| n.kind == NodeKind::EventHead).map(|n| n.id.as_str()).collect();
    let tails: Vec<&str> = g.nodes().filter(|n| n.kind == NodeKind::Tail).map(|n| n.id.as_str()).collect();
    let atomic: Vec<(String, Relation, String)> = g
        .edges()
        .filter(|e| e.family == Family::Atomic)
        .map(|e| (e.from.clone(), e.relation.unwrap(), g.node(&e.to).unwrap().text.clone()))
        .collect();
    let flows: Vec<(u64, Family)> = g.edges().filter(|e| e.family != Family::Atomic).map(|e| (e.id, e.family)).collect();
    let words = ["rest", "sleep", "cry", "call a friend", "eat", "worried", "angry", "take medicine", "study", "insomnia"];
    let relation = Relation::ALL[r.gen_range(0..Relation::ALL.len())];
    let head = pick(r, &heads).copied().unwrap_or("h000").to_string();
    let payload = match r.gen_range(0..7) {
        0 | 1 => EditPayload::AddTail { head, relation, tail: format!("{} {}", words[r.gen_range(0..words.len())], r.gen_range(0..5)) },
        2 => match pick(r, &atomic) {
            Some((h, rel, t)) => EditPayload::ReviseTail { head: h.clone(), relation: *rel, tail: t.clone(), new_tail: format!("{t} v{step}") },
            None => EditPayload::DeleteFlowEdge { edge: 0 },
        },
        3 => match pick(r, &atomic) {
            Some((h, rel, t)) => EditPayload::DeleteTail { head: h.clone(), relation: *rel, tail: t.clone() },
            None => EditPayload::DeleteFlowEdge { edge: 0 },
        },
        4 => {
            let kind = [FlowKind::EventFlow, FlowKind::EmotionCause, FlowKind::EmotionIntent][r.gen_range(0..3)];
            let (from, to, subkind, intent_label) = match kind {
                FlowKind::EventFlow => (
                    pick(r, &heads).copied().unwrap_or("x"),
                    pick(r, &heads).copied().unwrap_or("x"),
                    Some(EventFlowKind::NextUtterance),
                    None,
                ),
                _ => (
                    pick(r, &tails).copied().unwrap_or("x"),
                    pick(r, &tails).copied().unwrap_or("x"),
                    None,
                    (kind == FlowKind::EmotionIntent).then_some(IntentLabel::ALL[r.gen_range(0..5)]),
                ),
            };
            EditPayload::AddFlowEdge { kind, subkind, from: from.into(), to: to.into(), intent_label }
        }
        5 => match flows.iter().filter(|(_, f)| *f == Family::EmotionIntent).collect::<Vec<_>>().choose(r) {
            Some((id, _)) => EditPayload::LabelEdge { edge: *id, intent_label: IntentLabel::ALL[r.gen_range(0..5)] },
            None => EditPayload::DeleteFlowEdge { edge: u64::MAX },
        },
        _ => match pick(r, &flows) {
            Some((id, _)) => EditPayload::DeleteFlowEdge { edge: *id },
            None => EditPayload::DeleteFlowEdge { edge: u64::MAX },
        },
    };
    let base_version = r.gen_bool(0.5).then_some(g.version());
    EditOp { payload, author: format!("annotator{}", r.gen_range(0..3)), timestamp: 1_700_000_000_000 + step as u64, base_version }
}

/// KB with emotion, before and after tails on several heads, so random
/// edits can produce every flow family.
pub fn edit_seed_graph() -> Graph {
    let kb = load_fixture_kb();
    let flows = vec![
        FlowEdge::new(FlowKind::EventFlow, Some(EventFlowKind::NextUtterance), "sleep", "sick", None, prov(0)),
        FlowEdge::new(FlowKind::EmotionCause, None, "tail:angry", "tail:insomnia", None, prov(1)),
        FlowEdge::new(FlowKind::EmotionIntent, None, "tail:uncomfortable", "tail:take medicine", Some(IntentLabel::Ask), prov(2)),
    ];
    assemble(&kb, &flows, TailIdentity::Global).unwrap()
}

//! Event flows from linked conversations, and emotion-cause and
//! emotion-intent edges from annotated turns.
//!
//! cargo run -p dialogkg --example build_dialog_flows

use std::path::PathBuf;

use dialogkg::corpus::{load_corpus, read_conllu};
use dialogkg::edges::{
    build_emotion_cause_edges, build_emotion_intent_edges, build_event_flows, default_surprise_prototypes, group_matches,
    label_reaction_tails, merge_edges, DialogueContext, FlowConfig, FlowEdge, KeywordExtractor, LexiconClassifier,
    SurprisePrototypes, TailIdentity,
};
use dialogkg::extract::{extract_events, ExtractorConfig};
use dialogkg::kb::{load_kb, HeadLevel};
use dialogkg::link::{link_mentions, HashingProvider, Linker, VectorTable};

fn show(title: &str, edges: &[FlowEdge]) {
    println!("{title}:");
    for e in edges {
        let label = e.intent_label.map(|l| format!(" [{}]", l.as_str())).unwrap_or_default();
        println!("  {} -> {}{label}  weight {}", e.from, e.to, e.weight);
    }
}

fn main() -> dialogkg::Result<()> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let kb = load_kb(fixtures.join("kb.tsv"))?;
    let table = VectorTable::load(fixtures.join("vectors.txt"))?;
    let linker = Linker::for_level(&kb, HeadLevel::Event, &table)?;
    let cfg = ExtractorConfig::default();

    let mut matches = Vec::new();
    for p in read_conllu(fixtures.join("campus.conllu"))? {
        matches.extend(link_mentions(&extract_events(&p, &cfg), &linker, &table, 0.5)?);
    }
    let linked = group_matches(matches);
    show("event flows (last match -> first match)", &merge_edges(build_event_flows(&linked, FlowConfig::default())));
    let cross = FlowConfig { cross_product: true, ..Default::default() };
    show("event flows (cross product)", &merge_edges(build_event_flows(&linked, cross)));

    // Turns whose heads are known up front; the lexicon labels reaction tails.
    let provider = HashingProvider::default();
    let prototypes = SurprisePrototypes::embed(&default_surprise_prototypes(), &provider)?;
    let labels = label_reaction_tails(&kb, &LexiconClassifier::default(), &provider, &prototypes, 0.7)?;
    let keywords = KeywordExtractor::default();
    let dialogues = load_corpus(fixtures.join("emotion_flows.jsonl"))?;
    for (conv, utt, head) in [("cause-demo", 1, "sleep"), ("intent-demo", 0, "sick")] {
        let c = dialogues.conversation(conv).expect("fixture conversation");
        let m = dialogkg::link::MentionHeadMatch {
            mention: dialogkg::extract::EventMention {
                text: c.utterances[utt].text.clone(),
                source: dialogkg::extract::MentionSource { conversation: conv.into(), utterance: utt, sub_utterance: 0 },
                driver: None,
                method: dialogkg::extract::Method::Parsing,
                seed: None,
                tokens: vec![],
            },
            head_id: head.into(),
            head_text: kb.head(head).map(|h| h.text.clone()).unwrap_or_default(),
            score: 1.0,
        };
        let ctx = DialogueContext::build(c, None, &[m], &keywords);
        show(&format!("{conv}: emotion_cause"), &build_emotion_cause_edges(&ctx, &kb, &labels, &keywords, TailIdentity::Global));
        show(&format!("{conv}: emotion_intent"), &build_emotion_intent_edges(&ctx, &kb, &labels, &keywords, TailIdentity::Global));
    }
    Ok(())
}

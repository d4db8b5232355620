//! Dialog-flow edges derived from linked conversations.
//!
//! Head-to-head flows connect KB heads whose mentions follow each other
//! within an utterance (`next_sub_utterance`) or across consecutive
//! utterances (`next_utterance`); concept flows do the same for entity-level
//! heads. Tail-to-tail flows hang off heads matched in emotional utterances:
//! `emotion_cause` points from a reaction tail to a preceding-event tail
//! mentioned earlier in the dialogue, `emotion_intent` from a reaction tail
//! to a following-event tail mentioned in the reply, labelled with the
//! reply's intent.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Conversation, ParsedUtterance, Token};
use crate::error::{Error, Result};
use crate::extract::parse_word_list;
use crate::kb::{normalize_ws, Kb, Relation, TailCategory};
use crate::labels::{EmotionLabel, IntentLabel};
use crate::link::{cosine, EmbeddingProvider, EmbeddingVector, MentionHeadMatch};

const DEFAULT_LEXICON: &str = include_str!("../config/emotion_lexicon.tsv");
const DEFAULT_STOPWORDS: &str = include_str!("../config/keyword_stopwords.txt");
const DEFAULT_SURPRISE: &str = include_str!("../config/surprise_prototypes.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    EventFlow,
    ConceptFlow,
    EmotionCause,
    EmotionIntent,
}

impl FlowKind {
    pub const ALL: [FlowKind; 4] = [Self::EventFlow, Self::ConceptFlow, Self::EmotionCause, Self::EmotionIntent];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::EventFlow => "event_flow",
            Self::ConceptFlow => "concept_flow",
            Self::EmotionCause => "emotion_cause",
            Self::EmotionIntent => "emotion_intent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventFlowKind {
    NextUtterance,
    NextSubUtterance,
}

impl std::str::FromStr for EventFlowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "next_utterance" => Ok(Self::NextUtterance),
            "next_sub_utterance" => Ok(Self::NextSubUtterance),
            other => Err(Error::invalid("subkind", format!("`{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    #[default]
    Pipeline,
    Expert,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Provenance {
    /// Conversation id for pipeline edges, annotator name for expert edges.
    pub conversation: String,
    pub utterances: Vec<usize>,
    #[serde(default)]
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowEdge {
    pub kind: FlowKind,
    pub subkind: Option<EventFlowKind>,
    pub from: String,
    pub to: String,
    pub weight: u32,
    pub intent_label: Option<IntentLabel>,
    pub provenance: Vec<Provenance>,
}

pub type EdgeKey = (FlowKind, Option<EventFlowKind>, String, String, Option<IntentLabel>);

impl FlowEdge {
    pub fn new(
        kind: FlowKind,
        subkind: Option<EventFlowKind>,
        from: impl Into<String>,
        to: impl Into<String>,
        intent_label: Option<IntentLabel>,
        provenance: Provenance,
    ) -> Self {
        Self { kind, subkind, from: from.into(), to: to.into(), weight: 1, intent_label, provenance: vec![provenance] }
    }

    pub fn key(&self) -> EdgeKey {
        (self.kind, self.subkind, self.from.clone(), self.to.clone(), self.intent_label)
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        match (self.kind, self.intent_label) {
            (FlowKind::EmotionIntent, None) => return Err("emotion_intent edge needs an intent_label".into()),
            (FlowKind::EmotionIntent, Some(IntentLabel::Other)) => {
                return Err("intent_label must be one of ask, advise, describe, opinion, console".into())
            }
            (FlowKind::EmotionIntent, Some(_)) | (_, None) => {}
            (_, Some(_)) => return Err("only emotion_intent edges carry an intent_label".into()),
        }
        if (self.kind == FlowKind::EventFlow) != self.subkind.is_some() {
            return Err("subkind is required for event_flow edges and forbidden otherwise".into());
        }
        if self.provenance.is_empty() || self.weight as usize != self.provenance.len() {
            return Err(format!("weight {} does not equal provenance count {}", self.weight, self.provenance.len()));
        }
        Ok(())
    }
}

/// Folds duplicate edges together, summing weights and pooling provenance.
/// The result is sorted by key with sorted provenance, so merge order never
/// affects the output.
pub fn merge_edges(edges: impl IntoIterator<Item = FlowEdge>) -> Vec<FlowEdge> {
    let mut merged: BTreeMap<EdgeKey, FlowEdge> = BTreeMap::new();
    for e in edges {
        match merged.entry(e.key()) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let m = o.get_mut();
                m.weight += e.weight;
                m.provenance.extend(e.provenance);
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(e);
            }
        }
    }
    merged
        .into_values()
        .map(|mut e| {
            e.provenance.sort();
            e
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkedConversation {
    pub conversation: String,
    pub matches: Vec<MentionHeadMatch>,
}

/// Groups matches by conversation, keeping first-seen conversation order
/// and sorting each conversation's matches by source position.
pub fn group_matches(matches: Vec<MentionHeadMatch>) -> Vec<LinkedConversation> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, Vec<MentionHeadMatch>> = HashMap::new();
    for m in matches {
        let conv = m.mention.source.conversation.clone();
        if !groups.contains_key(&conv) {
            order.push(conv.clone());
        }
        groups.entry(conv).or_default().push(m);
    }
    order
        .into_iter()
        .map(|c| {
            let mut ms = groups.remove(&c).unwrap_or_default();
            ms.sort_by_key(|m| (m.mention.source.utterance, m.mention.source.sub_utterance));
            LinkedConversation { conversation: c, matches: ms }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FlowConfig {
    /// Connect every head of utterance i to every head of utterance i+1
    /// instead of only the last to the first.
    pub cross_product: bool,
    pub allow_self_loops: bool,
}

fn adjacency(conv: &LinkedConversation, kind: FlowKind, cfg: FlowConfig) -> Vec<FlowEdge> {
    let mut by_utt: BTreeMap<usize, Vec<&MentionHeadMatch>> = BTreeMap::new();
    for m in &conv.matches {
        by_utt.entry(m.mention.source.utterance).or_default().push(m);
    }
    let sub = |k: EventFlowKind| (kind == FlowKind::EventFlow).then_some(k);
    let mut out = Vec::new();
    let mut push = |a: &MentionHeadMatch, b: &MentionHeadMatch, sk: EventFlowKind, utts: Vec<usize>| {
        if a.head_id == b.head_id && !cfg.allow_self_loops {
            return;
        }
        let prov = Provenance { conversation: conv.conversation.clone(), utterances: utts, origin: Origin::Pipeline };
        out.push(FlowEdge::new(kind, sub(sk), &a.head_id, &b.head_id, None, prov));
    };
    for (&u, ms) in &by_utt {
        for w in ms.windows(2) {
            push(w[0], w[1], EventFlowKind::NextSubUtterance, vec![u]);
        }
        let Some(next) = by_utt.get(&(u + 1)) else { continue };
        if cfg.cross_product {
            for a in ms {
                for b in next {
                    push(a, b, EventFlowKind::NextUtterance, vec![u, u + 1]);
                }
            }
        } else {
            push(ms[ms.len() - 1], next[0], EventFlowKind::NextUtterance, vec![u, u + 1]);
        }
    }
    out
}

fn build_flows(linked: &[LinkedConversation], kind: FlowKind, cfg: FlowConfig) -> Vec<FlowEdge> {
    let per_conv: Vec<Vec<FlowEdge>> = linked.par_iter().map(|c| adjacency(c, kind, cfg)).collect();
    merge_edges(per_conv.into_iter().flatten())
}

/// Head-to-head event flows from event-level matches.
pub fn build_event_flows(linked: &[LinkedConversation], cfg: FlowConfig) -> Vec<FlowEdge> {
    build_flows(linked, FlowKind::EventFlow, cfg)
}

/// Head-to-head concept flows from entity-level matches.
pub fn build_concept_flows(linked: &[LinkedConversation], cfg: FlowConfig) -> Vec<FlowEdge> {
    build_flows(linked, FlowKind::ConceptFlow, cfg)
}

pub fn frequency_filter(edges: Vec<FlowEdge>, min_weight: u32) -> Vec<FlowEdge> {
    edges.into_iter().filter(|e| e.weight >= min_weight).collect()
}

/// Maps a tail to joy, sad, angry or other.
pub trait SentimentClassifier: Send + Sync {
    fn classify(&self, text: &str) -> Result<EmotionLabel>;
}

/// Substring lexicon; the longest matching keyword decides the label.
#[derive(Debug, Clone)]
pub struct LexiconClassifier {
    entries: Vec<(String, EmotionLabel)>,
}

impl LexiconClassifier {
    pub fn new(entries: impl IntoIterator<Item = (String, EmotionLabel)>) -> Self {
        let mut entries: Vec<(String, EmotionLabel)> = entries.into_iter().map(|(k, l)| (k.to_lowercase(), l)).collect();
        entries.sort_by(|a, b| b.0.chars().count().cmp(&a.0.chars().count()).then_with(|| a.0.cmp(&b.0)));
        Self { entries }
    }

    /// Parses `keyword<TAB>label` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, l) = line
                .split_once('\t')
                .ok_or_else(|| Error::Syntax { line: i + 1, message: "expected keyword<TAB>label".into() })?;
            let label: EmotionLabel = l.parse().map_err(|e: crate::labels::UnknownLabel| Error::record(i + 1, "label", e.to_string()))?;
            entries.push((k.trim().to_string(), label));
        }
        Ok(Self::new(entries))
    }
}

impl Default for LexiconClassifier {
    fn default() -> Self {
        Self::parse(DEFAULT_LEXICON).expect("built-in lexicon")
    }
}

impl SentimentClassifier for LexiconClassifier {
    fn classify(&self, text: &str) -> Result<EmotionLabel> {
        let text = text.to_lowercase();
        Ok(self.entries.iter().find(|(k, _)| text.contains(k.as_str())).map(|(_, l)| *l).unwrap_or(EmotionLabel::Other))
    }
}

pub fn default_surprise_prototypes() -> Vec<String> {
    parse_word_list(DEFAULT_SURPRISE).into_iter().collect()
}

/// Embedded reference texts for the `surprising` label.
pub struct SurprisePrototypes {
    vectors: Vec<EmbeddingVector>,
}

impl SurprisePrototypes {
    pub fn embed(texts: &[String], provider: &dyn EmbeddingProvider) -> Result<Self> {
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        Ok(Self { vectors: if refs.is_empty() { Vec::new() } else { provider.embed(&refs)? } })
    }

    pub fn similarity(&self, v: &EmbeddingVector) -> Result<f64> {
        self.vectors.iter().map(|p| cosine(v, p)).try_fold(f64::NEG_INFINITY, |acc, s| s.map(|s| acc.max(s)))
    }
}

/// Classifies a reaction tail; an `other` verdict is promoted to
/// `surprising` when the tail is close enough to a surprise prototype.
pub fn label_tail_emotion(
    tail: &str,
    classifier: &dyn SentimentClassifier,
    provider: &dyn EmbeddingProvider,
    prototypes: &SurprisePrototypes,
    surprise_threshold: f64,
) -> Result<EmotionLabel> {
    let label = classifier.classify(tail)?;
    if label != EmotionLabel::Other {
        return Ok(label);
    }
    let sim = prototypes.similarity(&provider.embed_one(tail)?)?;
    Ok(if sim >= surprise_threshold { EmotionLabel::Surprising } else { EmotionLabel::Other })
}

/// Labels every distinct reaction tail in the store, keyed by tail text.
pub fn label_reaction_tails(
    kb: &Kb,
    classifier: &dyn SentimentClassifier,
    provider: &dyn EmbeddingProvider,
    prototypes: &SurprisePrototypes,
    surprise_threshold: f64,
) -> Result<HashMap<String, EmotionLabel>> {
    let tails: BTreeSet<&str> = kb
        .triples()
        .iter()
        .filter(|t| t.relation.category() == TailCategory::Emotion)
        .map(|t| t.tail.as_str())
        .collect();
    tails
        .into_iter()
        .map(|t| Ok((t.to_string(), label_tail_emotion(t, classifier, provider, prototypes, surprise_threshold)?)))
        .collect()
}

#[derive(Debug, Clone)]
pub struct KeywordExtractor {
    pub stopwords: BTreeSet<String>,
}

impl Default for KeywordExtractor {
    fn default() -> Self {
        Self { stopwords: parse_word_list(DEFAULT_STOPWORDS) }
    }
}

impl KeywordExtractor {
    /// Content tokens (POS v, n, a) minus stopwords, lowercased.
    pub fn from_tokens<'a>(&self, tokens: impl IntoIterator<Item = &'a Token>) -> BTreeSet<String> {
        tokens
            .into_iter()
            .filter(|t| matches!(t.pos.as_str(), "v" | "n" | "a"))
            .map(|t| t.form.to_lowercase())
            .filter(|w| !self.stopwords.contains(w))
            .collect()
    }

    /// Words of an unparsed text: runs of alphanumerics, lowercased, minus
    /// stopwords. Unsegmented CJK runs stay whole.
    pub fn from_text(&self, text: &str) -> BTreeSet<String> {
        text.split(|c: char| !c.is_alphanumeric())
            .filter(|w| !w.is_empty())
            .map(str::to_lowercase)
            .filter(|w| !self.stopwords.contains(w))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TurnContext {
    pub index: usize,
    pub emotion: EmotionLabel,
    pub intent: IntentLabel,
    pub keywords: BTreeSet<String>,
    /// Event-level heads matched in this utterance, first-seen order.
    pub heads: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DialogueContext {
    pub conversation: String,
    pub turns: Vec<TurnContext>,
}

impl DialogueContext {
    pub fn build(
        conv: &Conversation,
        parses: Option<&HashMap<usize, ParsedUtterance>>,
        matches: &[MentionHeadMatch],
        keywords: &KeywordExtractor,
    ) -> Self {
        let turns = conv
            .utterances
            .iter()
            .map(|u| {
                let kw = match parses.and_then(|p| p.get(&u.index)) {
                    Some(p) => keywords.from_tokens(p.tokens().map(|(_, t)| t)),
                    None => keywords.from_text(&u.text),
                };
                let mut heads: Vec<String> = Vec::new();
                for m in matches.iter().filter(|m| m.mention.source.conversation == conv.id && m.mention.source.utterance == u.index) {
                    if !heads.contains(&m.head_id) {
                        heads.push(m.head_id.clone());
                    }
                }
                TurnContext { index: u.index, emotion: u.emotion, intent: u.intent, keywords: kw, heads }
            })
            .collect();
        Self { conversation: conv.id.clone(), turns }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailIdentity {
    /// One node per normalized tail text across the whole graph.
    #[default]
    Global,
    /// One node per (head, relation, tail) as in the source KB.
    PerHead,
}

pub fn tail_node_id(identity: TailIdentity, head_id: &str, relation: Relation, text: &str) -> String {
    let text = normalize_ws(text);
    match identity {
        TailIdentity::Global => format!("tail:{}", text.to_lowercase()),
        TailIdentity::PerHead => format!("tail:{head_id}/{relation}/{text}"),
    }
}

fn kept_reaction_tails<'a>(kb: &'a Kb, head: &str, emotion: EmotionLabel, labels: &HashMap<String, EmotionLabel>) -> Vec<&'a crate::kb::KbTriple> {
    kb.tails(head, TailCategory::Emotion).filter(|t| labels.get(&t.tail) == Some(&emotion)).collect()
}

/// Reaction tail → preceding-event tail, when the preceding event shares a
/// keyword with any earlier utterance.
pub fn build_emotion_cause_edges(
    ctx: &DialogueContext,
    kb: &Kb,
    labels: &HashMap<String, EmotionLabel>,
    keywords: &KeywordExtractor,
    identity: TailIdentity,
) -> Vec<FlowEdge> {
    let mut out = Vec::new();
    for (i, turn) in ctx.turns.iter().enumerate() {
        if turn.emotion == EmotionLabel::Other {
            continue;
        }
        for head in &turn.heads {
            let reactions = kept_reaction_tails(kb, head, turn.emotion, labels);
            if reactions.is_empty() {
                continue;
            }
            for before in kb.tails(head, TailCategory::Before) {
                let kw = keywords.from_text(&before.tail);
                let earlier: Vec<usize> = ctx.turns[..i].iter().filter(|t| !t.keywords.is_disjoint(&kw)).map(|t| t.index).collect();
                if earlier.is_empty() {
                    continue;
                }
                let mut utts = earlier;
                utts.push(turn.index);
                for r in &reactions {
                    let prov = Provenance { conversation: ctx.conversation.clone(), utterances: utts.clone(), origin: Origin::Pipeline };
                    out.push(FlowEdge::new(
                        FlowKind::EmotionCause,
                        None,
                        tail_node_id(identity, head, r.relation, &r.tail),
                        tail_node_id(identity, head, before.relation, &before.tail),
                        None,
                        prov,
                    ));
                }
            }
        }
    }
    merge_edges(out)
}

/// Reaction tail → following-event tail, when the following event shares a
/// keyword with the next utterance; labelled with that utterance's intent.
pub fn build_emotion_intent_edges(
    ctx: &DialogueContext,
    kb: &Kb,
    labels: &HashMap<String, EmotionLabel>,
    keywords: &KeywordExtractor,
    identity: TailIdentity,
) -> Vec<FlowEdge> {
    let mut out = Vec::new();
    for pair in ctx.turns.windows(2) {
        let (turn, next) = (&pair[0], &pair[1]);
        if turn.emotion == EmotionLabel::Other || !next.intent.is_edge_label() {
            continue;
        }
        for head in &turn.heads {
            let reactions = kept_reaction_tails(kb, head, turn.emotion, labels);
            if reactions.is_empty() {
                continue;
            }
            for after in kb.tails(head, TailCategory::After) {
                if keywords.from_text(&after.tail).is_disjoint(&next.keywords) {
                    continue;
                }
                for r in &reactions {
                    let prov = Provenance {
                        conversation: ctx.conversation.clone(),
                        utterances: vec![turn.index, next.index],
                        origin: Origin::Pipeline,
                    };
                    out.push(FlowEdge::new(
                        FlowKind::EmotionIntent,
                        None,
                        tail_node_id(identity, head, r.relation, &r.tail),
                        tail_node_id(identity, head, after.relation, &after.tail),
                        Some(next.intent),
                        prov,
                    ));
                }
            }
        }
    }
    merge_edges(out)
}

pub fn read_edges(reader: impl BufRead) -> Result<Vec<FlowEdge>> {
    let edges: Vec<FlowEdge> = crate::io::read_jsonl(reader)?;
    for (i, e) in edges.iter().enumerate() {
        e.validate().map_err(|m| Error::record(i + 1, "edge", m))?;
    }
    Ok(edges)
}

pub fn write_edges(edges: &[FlowEdge], out: impl Write) -> Result<()> {
    crate::io::write_jsonl(edges, out)
}

/// Reads hand-labelled edges, marking every provenance entry as expert.
pub fn read_expert_edges(reader: impl BufRead) -> Result<Vec<FlowEdge>> {
    let mut edges = read_edges(reader)?;
    for e in &mut edges {
        for p in &mut e.provenance {
            p.origin = Origin::Expert;
        }
    }
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{EventMention, MentionSource, Method};

    fn m(conv: &str, utt: usize, sub: usize, head: &str) -> MentionHeadMatch {
        MentionHeadMatch {
            mention: EventMention {
                text: head.into(),
                source: MentionSource { conversation: conv.into(), utterance: utt, sub_utterance: sub },
                driver: None,
                method: Method::Parsing,
                seed: None,
                tokens: vec![],
            },
            head_id: head.into(),
            head_text: head.into(),
            score: 0.9,
        }
    }

    fn pairs(edges: &[FlowEdge]) -> Vec<(&str, &str, Option<EventFlowKind>, u32)> {
        edges.iter().map(|e| (e.from.as_str(), e.to.as_str(), e.subkind, e.weight)).collect()
    }

    #[test]
    fn within_utterance() {
        let linked = group_matches(vec![m("c", 0, 0, "A"), m("c", 0, 1, "B")]);
        let e = build_event_flows(&linked, FlowConfig::default());
        assert_eq!(pairs(&e), vec![("A", "B", Some(EventFlowKind::NextSubUtterance), 1)]);
    }

    #[test]
    fn across_utterances() {
        let linked = group_matches(vec![m("c", 0, 0, "A"), m("c", 1, 0, "B"), m("c", 3, 0, "C")]);
        let e = build_event_flows(&linked, FlowConfig::default());
        assert_eq!(pairs(&e), vec![("A", "B", Some(EventFlowKind::NextUtterance), 1)]);
        assert_eq!(e[0].provenance[0].utterances, vec![0, 1]);
    }

    #[test]
    fn cross_product_mode() {
        let linked = group_matches(vec![m("c", 0, 0, "A"), m("c", 0, 1, "B"), m("c", 1, 0, "C"), m("c", 1, 1, "D")]);
        let default = build_event_flows(&linked, FlowConfig::default());
        let next: Vec<_> = default.iter().filter(|e| e.subkind == Some(EventFlowKind::NextUtterance)).collect();
        assert_eq!(next.len(), 1);
        assert_eq!((next[0].from.as_str(), next[0].to.as_str()), ("B", "C"));
        let cross = build_event_flows(&linked, FlowConfig { cross_product: true, ..Default::default() });
        assert_eq!(cross.iter().filter(|e| e.subkind == Some(EventFlowKind::NextUtterance)).count(), 4);
    }

    #[test]
    fn duplicates_merge_and_weight_tracks_provenance() {
        let linked = group_matches(vec![m("c1", 0, 0, "A"), m("c1", 0, 1, "B"), m("c2", 2, 0, "A"), m("c2", 2, 1, "B")]);
        let e = build_event_flows(&linked, FlowConfig::default());
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].weight, 2);
        assert!(e.iter().all(|e| e.validate().is_ok()));
    }

    #[test]
    fn concept_flows() {
        let one = group_matches(vec![m("c", 0, 0, "cat")]);
        assert!(build_concept_flows(&one, FlowConfig::default()).is_empty());
        let two = group_matches(vec![m("c", 0, 0, "cat"), m("c", 1, 0, "vet")]);
        let e = build_concept_flows(&two, FlowConfig::default());
        assert_eq!(e.len(), 1);
        assert_eq!((e[0].kind, e[0].subkind), (FlowKind::ConceptFlow, None));
    }

    #[test]
    fn frequency_filter_cases() {
        let mk = |w: u32, to: &str| {
            let mut e = FlowEdge::new(FlowKind::EventFlow, Some(EventFlowKind::NextUtterance), "A", to, None, Provenance { conversation: "c".into(), utterances: vec![0], origin: Origin::Pipeline });
            e.weight = w;
            e.provenance = vec![e.provenance[0].clone(); w as usize];
            e
        };
        let edges = vec![mk(1, "x"), mk(2, "y"), mk(3, "z")];
        assert_eq!(frequency_filter(edges.clone(), 1), edges);
        let kept: Vec<_> = frequency_filter(edges.clone(), 2).into_iter().map(|e| e.to).collect();
        assert_eq!(kept, vec!["y", "z"]);
        let twice = frequency_filter(frequency_filter(edges.clone(), 2), 2);
        assert_eq!(twice, frequency_filter(edges, 2));
    }

    #[test]
    fn edge_validation() {
        let p = Provenance { conversation: "c".into(), utterances: vec![0, 1], origin: Origin::Pipeline };
        let ok = FlowEdge::new(FlowKind::EmotionIntent, None, "a", "b", Some(IntentLabel::Ask), p.clone());
        assert!(ok.validate().is_ok());
        let other = FlowEdge { intent_label: Some(IntentLabel::Other), ..ok.clone() };
        assert!(other.validate().is_err());
        let none = FlowEdge { intent_label: None, ..ok.clone() };
        assert!(none.validate().is_err());
        let cause = FlowEdge::new(FlowKind::EmotionCause, None, "a", "b", Some(IntentLabel::Ask), p.clone());
        assert!(cause.validate().is_err());
        let heavy = FlowEdge { weight: 2, ..ok };
        assert!(heavy.validate().is_err());
        let flow = FlowEdge::new(FlowKind::EventFlow, None, "a", "b", None, p);
        assert!(flow.validate().is_err());
    }

    #[test]
    fn lexicon_and_surprise() {
        use crate::link::VectorTable;
        let lex = LexiconClassifier::default();
        assert_eq!(lex.classify("生气").unwrap(), EmotionLabel::Angry);
        assert_eq!(lex.classify("feels uncomfortable").unwrap(), EmotionLabel::Sad);

        let mut t = VectorTable::new(2);
        t.insert("惊讶", vec![1.0, 0.0]).unwrap();
        t.insert("wow", vec![0.9, (1.0f64 - 0.81).sqrt()]).unwrap();
        t.insert("meh", vec![0.3, (1.0f64 - 0.09).sqrt()]).unwrap();
        let protos = SurprisePrototypes::embed(&["惊讶".to_string()], &t).unwrap();
        assert_eq!(label_tail_emotion("wow", &lex, &t, &protos, 0.7).unwrap(), EmotionLabel::Surprising);
        assert_eq!(label_tail_emotion("meh", &lex, &t, &protos, 0.7).unwrap(), EmotionLabel::Other);
    }

    #[test]
    fn expert_edges_marked() {
        let line = r#"{"kind":"emotion_cause","subkind":null,"from":"tail:angry","to":"tail:insomnia","weight":1,"intent_label":null,"provenance":[{"conversation":"li","utterances":[]}]}"#;
        let edges = read_expert_edges(line.as_bytes()).unwrap();
        assert_eq!(edges[0].provenance[0].origin, Origin::Expert);
        let bad = line.replace("\"weight\":1", "\"weight\":3");
        assert!(read_edges(bad.as_bytes()).is_err());
    }

    #[test]
    fn keywords() {
        let kw = KeywordExtractor::default();
        assert_eq!(kw.from_text("Take medicine"), ["medicine", "take"].iter().map(|s| s.to_string()).collect());
        let toks = [Token::new(1, "我", "r", 2, "SBV"), Token::new(2, "失眠", "v", 0, "HED"), Token::new(3, "是", "v", 2, "COO")];
        assert_eq!(kw.from_tokens(&toks), ["失眠".to_string()].into_iter().collect());
    }
}

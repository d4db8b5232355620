//! Knowledge-grounded emotion classification and intent prediction.
//!
//! Each instance pairs an utterance (plus up to two prior turns) with tails
//! sampled from the heads its event mentions link to. Inputs are joined
//! with ` [SEP] `.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, ParseIndex, ParsedUtterance};
use crate::error::{Error, Result};
use crate::extract::{extract_events, ExtractorConfig};
use crate::graph::Graph;
use crate::kb::Relation;
use crate::link::{cosine, link_mentions, EmbeddingProvider, EmbeddingVector, Linker};

pub const SEP: &str = " [SEP] ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Emotion,
    Intent,
}

impl Task {
    pub fn relations(self) -> [Relation; 2] {
        match self {
            Self::Emotion => [Relation::XAttr, Relation::XReact],
            Self::Intent => [Relation::OReact, Relation::OEffect],
        }
    }
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "emotion" => Ok(Self::Emotion),
            "intent" => Ok(Self::Intent),
            other => Err(Error::invalid("task", format!("`{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputMode {
    Base,
    Knowledge,
    History,
    KnowledgeHistory,
}

impl InputMode {
    pub const ALL: [InputMode; 4] = [Self::Base, Self::Knowledge, Self::History, Self::KnowledgeHistory];

    fn knowledge(self) -> bool {
        matches!(self, Self::Knowledge | Self::KnowledgeHistory)
    }

    fn history(self) -> bool {
        matches!(self, Self::History | Self::KnowledgeHistory)
    }
}

impl std::str::FromStr for InputMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "base" => Ok(Self::Base),
            "knowledge" => Ok(Self::Knowledge),
            "history" => Ok(Self::History),
            "knowledge+history" | "knowledge_history" => Ok(Self::KnowledgeHistory),
            other => Err(Error::invalid("mode", format!("`{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledTail {
    pub text: String,
    pub relation: Relation,
    pub head_id: String,
    /// Match score of `head_id` against the utterance.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskInstance {
    pub conversation: String,
    pub utterance: usize,
    /// Up to two prior utterances, oldest first.
    pub history: Vec<String>,
    pub current: String,
    pub knowledge: Vec<SampledTail>,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingConfig {
    pub threshold: f64,
    /// Tails kept per relation.
    pub per_relation: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self { threshold: 0.7, per_relation: 3 }
    }
}

/// Heads linked to `utt` at or above the threshold, best score per head,
/// ranked by score then id.
pub fn matched_heads(
    utt: &ParsedUtterance,
    linker: &Linker,
    provider: &dyn EmbeddingProvider,
    cfg: &ExtractorConfig,
    threshold: f64,
) -> Result<Vec<(String, f64)>> {
    let matches = link_mentions(&extract_events(utt, cfg), linker, provider, threshold)?;
    let mut best: BTreeMap<String, f64> = BTreeMap::new();
    for m in matches {
        let s = best.entry(m.head_id).or_insert(f64::NEG_INFINITY);
        *s = s.max(m.score);
    }
    let mut ranked: Vec<(String, f64)> = best.into_iter().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(ranked)
}

/// Tails under `relations` of the ranked heads, deduplicated by text within
/// each relation and capped at `per_relation`.
pub fn sample_tails(graph: &Graph, heads: &[(String, f64)], relations: &[Relation], per_relation: usize) -> Vec<SampledTail> {
    let mut out = Vec::new();
    for &rel in relations {
        let mut seen = HashSet::new();
        let mut kept = 0;
        'heads: for (head, score) in heads {
            for node in graph.tails(head, rel) {
                if kept == per_relation {
                    break 'heads;
                }
                if seen.insert(node.text.to_lowercase()) {
                    out.push(SampledTail { text: node.text.clone(), relation: rel, head_id: head.clone(), score: *score });
                    kept += 1;
                }
            }
        }
    }
    out
}

pub fn sample_knowledge(
    task: Task,
    utt: &ParsedUtterance,
    graph: &Graph,
    linker: &Linker,
    provider: &dyn EmbeddingProvider,
    cfg: &ExtractorConfig,
    sampling: SamplingConfig,
) -> Result<Vec<SampledTail>> {
    let heads = matched_heads(utt, linker, provider, cfg, sampling.threshold)?;
    Ok(sample_tails(graph, &heads, &task.relations(), sampling.per_relation))
}

/// xAttr and xReact tails of the heads matched to `utt`.
pub fn sample_emotion_knowledge(
    utt: &ParsedUtterance,
    graph: &Graph,
    linker: &Linker,
    provider: &dyn EmbeddingProvider,
    cfg: &ExtractorConfig,
    sampling: SamplingConfig,
) -> Result<Vec<SampledTail>> {
    sample_knowledge(Task::Emotion, utt, graph, linker, provider, cfg, sampling)
}

/// oReact and oEffect tails of the heads matched to `utt`.
pub fn sample_intent_knowledge(
    utt: &ParsedUtterance,
    graph: &Graph,
    linker: &Linker,
    provider: &dyn EmbeddingProvider,
    cfg: &ExtractorConfig,
    sampling: SamplingConfig,
) -> Result<Vec<SampledTail>> {
    sample_knowledge(Task::Intent, utt, graph, linker, provider, cfg, sampling)
}

/// One instance per utterance. Utterances without a parse get no knowledge.
#[allow(clippy::too_many_arguments)]
pub fn build_instances(
    task: Task,
    corpus: &Corpus,
    parses: &ParseIndex,
    graph: &Graph,
    linker: &Linker,
    provider: &dyn EmbeddingProvider,
    cfg: &ExtractorConfig,
    sampling: SamplingConfig,
) -> Result<Vec<TaskInstance>> {
    let jobs: Vec<_> = corpus.conversations.iter().flat_map(|c| c.utterances.iter().map(move |u| (c, u))).collect();
    jobs.par_iter()
        .map(|(conv, u)| {
            let knowledge = match parses.get(&conv.id).and_then(|p| p.get(&u.index)) {
                Some(p) => sample_knowledge(task, p, graph, linker, provider, cfg, sampling)?,
                None => Vec::new(),
            };
            let history = conv.utterances[u.index.saturating_sub(2)..u.index].iter().map(|h| h.text.clone()).collect();
            let label = match task {
                Task::Emotion => u.emotion.as_str(),
                Task::Intent => u.intent.as_str(),
            };
            Ok(TaskInstance {
                conversation: conv.id.clone(),
                utterance: u.index,
                history,
                current: u.text.clone(),
                knowledge,
                label: label.to_string(),
            })
        })
        .collect()
}

/// Joins the pieces selected by `mode`; empty pieces are skipped so no
/// separator is ever doubled, leading or trailing.
pub fn assemble_input(instance: &TaskInstance, mode: InputMode) -> String {
    let mut parts: Vec<&str> = Vec::new();
    if mode.history() {
        parts.extend(instance.history.iter().map(String::as_str));
    }
    parts.push(&instance.current);
    if mode.knowledge() {
        parts.extend(instance.knowledge.iter().map(|k| k.text.as_str()));
    }
    parts.retain(|p| !p.trim().is_empty());
    parts.join(SEP)
}

pub trait TaskClassifier: Send + Sync {
    fn predict(&self, input: &str) -> Result<String>;

    /// False forces the harness to call `predict` from one thread.
    fn concurrent(&self) -> bool {
        true
    }
}

/// Looks inputs up in a table built from gold labels.
#[derive(Debug, Clone, Default)]
pub struct OracleClassifier {
    table: HashMap<String, String>,
}

impl OracleClassifier {
    pub fn fit(instances: &[TaskInstance], mode: InputMode) -> Self {
        Self { table: instances.iter().map(|i| (assemble_input(i, mode), i.label.clone())).collect() }
    }
}

impl TaskClassifier for OracleClassifier {
    fn predict(&self, input: &str) -> Result<String> {
        Ok(self.table.get(input).cloned().unwrap_or_default())
    }
}

/// Always answers with one label.
#[derive(Debug, Clone)]
pub struct ConstantClassifier(pub String);

impl TaskClassifier for ConstantClassifier {
    fn predict(&self, _: &str) -> Result<String> {
        Ok(self.0.clone())
    }
}

/// Predicts the label whose mean input embedding is closest by cosine;
/// ties go to the smallest label.
pub struct NearestCentroidClassifier<'a> {
    provider: &'a dyn EmbeddingProvider,
    centroids: Vec<(String, EmbeddingVector)>,
}

impl<'a> NearestCentroidClassifier<'a> {
    pub fn fit(instances: &[TaskInstance], mode: InputMode, provider: &'a dyn EmbeddingProvider) -> Result<Self> {
        if instances.is_empty() {
            return Err(Error::Empty("training instances"));
        }
        let inputs: Vec<String> = instances.iter().map(|i| assemble_input(i, mode)).collect();
        let refs: Vec<&str> = inputs.iter().map(String::as_str).collect();
        let vectors = provider.embed(&refs)?;
        let mut sums: BTreeMap<&str, (Vec<f64>, usize)> = BTreeMap::new();
        for (inst, v) in instances.iter().zip(&vectors) {
            let e = sums.entry(&inst.label).or_insert_with(|| (vec![0.0; v.dim()], 0));
            let unit = v.scaled(1.0 / v.norm());
            e.0.iter_mut().zip(unit.values()).for_each(|(a, b)| *a += b);
            e.1 += 1;
        }
        let centroids = sums
            .into_iter()
            .filter_map(|(l, (sum, n))| EmbeddingVector::new(sum.into_iter().map(|x| x / n as f64).collect()).ok().map(|v| (l.to_string(), v)))
            .collect();
        Ok(Self { provider, centroids })
    }
}

impl TaskClassifier for NearestCentroidClassifier<'_> {
    fn predict(&self, input: &str) -> Result<String> {
        let q = self.provider.embed_one(input)?;
        let mut best: Option<(&str, f64)> = None;
        for (label, c) in &self.centroids {
            let s = match cosine(&q, c) {
                Ok(s) => s,
                Err(Error::ZeroVector) => continue,
                Err(e) => return Err(e),
            };
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((label, s));
            }
        }
        Ok(best.map(|(l, _)| l.to_string()).unwrap_or_default())
    }
}

/// Seeded train/test split that keeps each conversation on one side. The
/// test side holds `ceil(test_fraction * conversations)` conversations.
pub fn split_by_conversation(instances: Vec<TaskInstance>, test_fraction: f64, seed: u64) -> Result<(Vec<TaskInstance>, Vec<TaskInstance>)> {
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(Error::invalid("test fraction", format!("{test_fraction} not in [0, 1)")));
    }
    let mut convs: Vec<&str> = instances.iter().map(|i| i.conversation.as_str()).collect::<BTreeSet<_>>().into_iter().collect();
    convs.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_test = (test_fraction * convs.len() as f64 - 1e-9).ceil() as usize;
    let test: HashSet<String> = convs[..n_test].iter().map(|c| c.to_string()).collect();
    Ok(instances.into_iter().partition(|i| !test.contains(&i.conversation)))
}

/// Fraction of instances whose assembled input the classifier labels correctly.
pub fn evaluate_task(instances: &[TaskInstance], classifier: &dyn TaskClassifier, mode: InputMode) -> Result<f64> {
    if instances.is_empty() {
        return Err(Error::Empty("instance set"));
    }
    let hit = |i: &TaskInstance| classifier.predict(&assemble_input(i, mode)).map(|p| p == i.label);
    let hits: Vec<bool> = if classifier.concurrent() {
        instances.par_iter().map(hit).collect::<Result<_>>()?
    } else {
        instances.iter().map(hit).collect::<Result<_>>()?
    };
    Ok(hits.iter().filter(|h| **h).count() as f64 / instances.len() as f64)
}

//! `dialogkg` command line: one subcommand per pipeline stage, plus the
//! service.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dialogkg::corpus::{index_parses, load_corpus, read_conllu, validate_parse_alignment, Corpus, ParsedUtterance};
use dialogkg::edges::{
    build_concept_flows, build_emotion_cause_edges, build_emotion_intent_edges, build_event_flows, default_surprise_prototypes,
    frequency_filter, group_matches, label_reaction_tails, merge_edges, read_edges, read_expert_edges, write_edges, DialogueContext,
    EventFlowKind, FlowConfig, FlowEdge, KeywordExtractor, LexiconClassifier, SurprisePrototypes, TailIdentity,
};
use dialogkg::edit::{replay, AuditLog};
use dialogkg::eval::{matching_report, sample_utterances};
use dialogkg::extract::{extract_with, EventMention, ExtractorConfig, Method};
use dialogkg::graph::{assemble, consecutive_pairs, Family, Graph, NodeKind};
use dialogkg::io::{create_writer, load_jsonl, open_reader, save_jsonl};
use dialogkg::kb::{
    default_connectors, default_rules, load_kb, natural_connectors, translate_triples, Head, HeadLevel, HttpTranslationClient,
    IdentityClient, TranslationClient,
};
use dialogkg::link::{
    export_finetune_pairs, link_concepts, link_mentions, EmbeddingProvider, HashingProvider, HttpEmbeddingProvider, Linker,
    MentionHeadMatch, VectorTable,
};
use dialogkg::tasks::{
    build_instances, evaluate_task, split_by_conversation, ConstantClassifier, InputMode, NearestCentroidClassifier, SamplingConfig, Task,
};
use serde::Serialize;

use crate::api::{self, AppState, ServiceConfig};

#[derive(Debug, Parser)]
#[command(name = "dialogkg", version, about = "Build, evaluate and serve a commonsense conversation knowledge graph")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract event mentions from parsed utterances.
    Extract {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        parses: PathBuf,
        #[arg(long, default_value = "parsing")]
        method: Method,
        #[arg(long)]
        out: PathBuf,
    },
    /// Link mentions (or, with --parses, concept words) to KB heads.
    Link {
        #[arg(long, required_unless_present = "parses")]
        mentions: Option<PathBuf>,
        /// Link every v/n/a token of these parses instead of mentions.
        #[arg(long, conflicts_with = "mentions")]
        parses: Option<PathBuf>,
        #[arg(long)]
        kb: PathBuf,
        #[command(flatten)]
        provider: ProviderArgs,
        #[arg(long, default_value_t = 0.7)]
        threshold: f64,
        #[arg(long, value_enum, default_value_t = Level::Event)]
        level: Level,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the four flow-edge families from linked conversations.
    BuildEdges {
        /// Event-level matches from `link`.
        #[arg(long)]
        linked: PathBuf,
        /// Entity-level concept matches from `link --parses --level entity`.
        #[arg(long)]
        concepts: Option<PathBuf>,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        kb: PathBuf,
        /// Parses for utterance keywords; raw text is used without them.
        #[arg(long)]
        parses: Option<PathBuf>,
        /// Hand-labelled edges merged in with expert provenance.
        #[arg(long)]
        expert: Option<PathBuf>,
        #[command(flatten)]
        provider: ProviderArgs,
        #[arg(long, default_value_t = 3)]
        min_weight_event: u32,
        #[arg(long, default_value_t = 2)]
        min_weight_concept: u32,
        /// Pair every match of an utterance with every match of the next.
        #[arg(long)]
        cross_product: bool,
        #[arg(long, default_value_t = 0.7)]
        surprise_threshold: f64,
        #[arg(long, value_enum, default_value_t = Identity::Global)]
        tail_identity: Identity,
        #[arg(long)]
        out: PathBuf,
    },
    /// Merge KB triples and flow edges into one graph file.
    Assemble {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        edges: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Identity::Global)]
        tail_identity: Identity,
        #[arg(long)]
        out: PathBuf,
    },
    /// Connectivity and average distance over consecutive matched pairs.
    EvalEdges {
        #[arg(long)]
        graph: PathBuf,
        /// Matches of an external corpus, as written by `link`.
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long, default_value = "next_utterance")]
        subkind: EventFlowKind,
        /// Comma-separated edge families to traverse; all when absent.
        #[arg(long, value_delimiter = ',')]
        kinds: Vec<Family>,
    },
    /// Per-family edge counts.
    Stats {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Subgraph around the most frequent heads of a scenario.
    Scenario {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        matches: PathBuf,
        #[arg(long, default_value_t = 0.005)]
        fraction: f64,
        /// With --scenario, keeps only matches from that scenario's conversations.
        #[arg(long, requires = "scenario")]
        corpus: Option<PathBuf>,
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Average similarity and matched-head count of an extraction method.
    EvalMatching {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        parses: PathBuf,
        #[arg(long)]
        kb: PathBuf,
        #[command(flatten)]
        provider: ProviderArgs,
        #[arg(long, default_value = "parsing")]
        method: Method,
        #[arg(long, default_value_t = 100)]
        sample: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 0.7)]
        threshold: f64,
    },
    /// Knowledge-grounded emotion or intent classification benchmark. The
    /// provider links utterances to heads; the reference nearest-centroid
    /// classifier embeds assembled inputs with the hashing embedder.
    Bench {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        parses: PathBuf,
        #[command(flatten)]
        provider: ProviderArgs,
        #[arg(long, value_enum)]
        task: TaskArg,
        #[arg(long, default_value = "knowledge")]
        mode: InputMode,
        #[arg(long, default_value_t = 0.7)]
        threshold: f64,
        #[arg(long, default_value_t = 3)]
        per_relation: usize,
        #[arg(long, default_value_t = 0.2)]
        test_fraction: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Writes every instance with its assembled input.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Serve the graph over HTTP with the audited edit endpoint.
    Serve {
        #[arg(long)]
        graph: PathBuf,
        /// Scenario membership of the conversations in --matches.
        #[arg(long, requires = "matches")]
        corpus: Option<PathBuf>,
        #[arg(long, requires = "corpus")]
        matches: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
        /// Edits already in the log are replayed onto the graph at startup.
        #[arg(long, default_value = "audit.jsonl")]
        audit_log: PathBuf,
        /// Environment variable holding the bearer token for edits.
        #[arg(long, default_value = "DIALOGKG_TOKEN")]
        token_env: String,
        #[arg(long, default_value_t = 0.005)]
        fraction: f64,
    },
    /// Replace placeholders and jointly translate every KB triple.
    Translate {
        #[arg(long)]
        kb: PathBuf,
        /// Translation service; the identity client is used when absent.
        #[arg(long)]
        endpoint: Option<String>,
        #[arg(long, default_value = "DIALOGKG_TRANSLATE_TOKEN")]
        token_env: String,
        #[arg(long, value_enum, default_value_t = Connectors::Bracketed)]
        connectors: Connectors,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample (mention, head) pairs for manual labelling.
    ExportPairs {
        #[arg(long)]
        matches: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ProviderArgs {
    /// Vector file (`dim N` header, then `key<TAB>values`).
    #[arg(long, conflicts_with = "endpoint")]
    pub vectors: Option<PathBuf>,
    /// Embedding service URL.
    #[arg(long, requires = "dim")]
    pub endpoint: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value = "DIALOGKG_EMBED_TOKEN")]
    pub embed_token_env: String,
}

impl ProviderArgs {
    /// Vector file, then HTTP service, then the built-in hashing embedder.
    pub fn build(&self) -> Result<Box<dyn EmbeddingProvider>> {
        if let Some(path) = &self.vectors {
            return Ok(Box::new(VectorTable::load(path).with_context(|| format!("loading {}", path.display()))?));
        }
        if let (Some(url), Some(dim)) = (&self.endpoint, self.dim) {
            return Ok(Box::new(HttpEmbeddingProvider::new(url.clone(), dim, std::env::var(&self.embed_token_env).ok())?));
        }
        tracing::warn!("no --vectors or --endpoint; falling back to the hashing embedder");
        Ok(Box::new(HashingProvider::default()))
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Level {
    Event,
    Entity,
}

impl From<Level> for HeadLevel {
    fn from(l: Level) -> Self {
        match l {
            Level::Event => HeadLevel::Event,
            Level::Entity => HeadLevel::Entity,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Identity {
    Global,
    PerHead,
}

impl From<Identity> for TailIdentity {
    fn from(i: Identity) -> Self {
        match i {
            Identity::Global => TailIdentity::Global,
            Identity::PerHead => TailIdentity::PerHead,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TaskArg {
    Emotion,
    Intent,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Connectors {
    Bracketed,
    Natural,
}

fn print_json(v: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn load_graph(path: &Path) -> Result<Graph> {
    Graph::load(path).with_context(|| format!("loading graph {}", path.display()))
}

fn load_matches(path: &Path) -> Result<Vec<MentionHeadMatch>> {
    load_jsonl(path).with_context(|| format!("loading matches {}", path.display()))
}

fn load_edges(path: &Path, expert: bool) -> Result<Vec<FlowEdge>> {
    let r = open_reader(path)?;
    let edges = if expert { read_expert_edges(r) } else { read_edges(r) };
    edges.with_context(|| format!("loading edges {}", path.display()))
}

fn graph_heads(g: &Graph, kind: NodeKind) -> Vec<Head> {
    let level = if kind == NodeKind::EventHead { HeadLevel::Event } else { HeadLevel::Entity };
    g.nodes().filter(|n| n.kind == kind).map(|n| Head { id: n.id.clone(), text: n.text.clone(), level }).collect()
}

/// Matches grouped by the scenario of their conversation.
fn scenario_matches(corpus: &Corpus, matches: Vec<MentionHeadMatch>) -> HashMap<String, Vec<MentionHeadMatch>> {
    let scenario_of: HashMap<&str, &str> =
        corpus.conversations.iter().filter_map(|c| Some((c.id.as_str(), c.scenario_id.as_str())).filter(|(_, s)| !s.is_empty())).collect();
    let mut out: HashMap<String, Vec<MentionHeadMatch>> = HashMap::new();
    for m in matches {
        if let Some(s) = scenario_of.get(m.mention.source.conversation.as_str()) {
            out.entry(s.to_string()).or_default().push(m);
        }
    }
    out
}

fn corpus_parses(corpus: &Corpus, parses: Vec<ParsedUtterance>) -> Vec<ParsedUtterance> {
    let mut missing = 0;
    let mut mismatched = 0;
    for conv in &corpus.conversations {
        let report = validate_parse_alignment(conv, &parses);
        missing += report.missing.len();
        mismatched += report.mismatched.len();
        for m in &report.mismatched {
            tracing::warn!(conversation = %conv.id, utterance = m.utterance_index, "parse text does not match utterance");
        }
    }
    if missing + mismatched > 0 {
        tracing::warn!(missing, mismatched, "parse alignment issues");
    }
    let known: std::collections::HashSet<&str> = corpus.conversations.iter().map(|c| c.id.as_str()).collect();
    parses.into_iter().filter(|p| known.contains(p.conversation_id.as_str())).collect()
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Extract { corpus, parses, method, out } => {
            let corpus = load_corpus(&corpus)?;
            let parses = corpus_parses(&corpus, read_conllu(&parses)?);
            let cfg = ExtractorConfig::default();
            let mentions: Vec<EventMention> = parses.iter().flat_map(|p| extract_with(method, p, &cfg)).collect();
            save_jsonl(&mentions, &out)?;
            print_json(&serde_json::json!({ "utterances": parses.len(), "mentions": mentions.len(), "method": method }))
        }
        Command::Link { mentions, parses, kb, provider, threshold, level, out } => {
            let kb = load_kb(&kb)?;
            let provider = provider.build()?;
            let linker = Linker::for_level(&kb, level.into(), provider.as_ref())?;
            let matches = match (mentions, parses) {
                (Some(path), _) => {
                    let mentions: Vec<EventMention> = load_jsonl(&path)?;
                    link_mentions(&mentions, &linker, provider.as_ref(), threshold)?
                }
                (None, Some(path)) => {
                    let mut all = Vec::new();
                    for p in read_conllu(&path)? {
                        all.extend(link_concepts(&p, &linker, provider.as_ref(), threshold)?);
                    }
                    all
                }
                (None, None) => bail!("one of --mentions or --parses is required"),
            };
            save_jsonl(&matches, &out)?;
            print_json(&serde_json::json!({ "matches": matches.len(), "threshold": threshold }))
        }
        Command::BuildEdges {
            linked,
            concepts,
            corpus,
            kb,
            parses,
            expert,
            provider,
            min_weight_event,
            min_weight_concept,
            cross_product,
            surprise_threshold,
            tail_identity,
            out,
        } => {
            let corpus = load_corpus(&corpus)?;
            let kb = load_kb(&kb)?;
            let parses = match parses {
                Some(p) => index_parses(read_conllu(&p)?),
                None => HashMap::new(),
            };
            let matches = load_matches(&linked)?;
            for m in &matches {
                if corpus.conversation(&m.mention.source.conversation).is_none() {
                    bail!("match references unknown conversation `{}`", m.mention.source.conversation);
                }
            }
            let cfg = FlowConfig { cross_product, ..Default::default() };
            let linked = group_matches(matches.clone());
            let event = frequency_filter(merge_edges(build_event_flows(&linked, cfg)), min_weight_event);
            let concept = match concepts {
                Some(p) => frequency_filter(merge_edges(build_concept_flows(&group_matches(load_matches(&p)?), cfg)), min_weight_concept),
                None => Vec::new(),
            };

            let provider = provider.build()?;
            let prototypes = SurprisePrototypes::embed(&default_surprise_prototypes(), provider.as_ref())?;
            let labels = label_reaction_tails(&kb, &LexiconClassifier::default(), provider.as_ref(), &prototypes, surprise_threshold)?;
            let keywords = KeywordExtractor::default();
            let mut by_conv: HashMap<&str, Vec<MentionHeadMatch>> = HashMap::new();
            for m in &matches {
                by_conv.entry(m.mention.source.conversation.as_str()).or_default().push(m.clone());
            }
            let mut emotion = Vec::new();
            for conv in &corpus.conversations {
                let Some(ms) = by_conv.get(conv.id.as_str()) else { continue };
                let ctx = DialogueContext::build(conv, parses.get(&conv.id), ms, &keywords);
                emotion.extend(build_emotion_cause_edges(&ctx, &kb, &labels, &keywords, tail_identity.into()));
                emotion.extend(build_emotion_intent_edges(&ctx, &kb, &labels, &keywords, tail_identity.into()));
            }
            let mut all: Vec<FlowEdge> = event.into_iter().chain(concept).chain(merge_edges(emotion)).collect();
            if let Some(p) = expert {
                all.extend(load_edges(&p, true)?);
            }
            let all = merge_edges(all);
            let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
            for e in &all {
                *counts.entry(e.kind.as_str()).or_default() += 1;
            }
            write_edges(&all, create_writer(&out)?)?;
            print_json(&counts)
        }
        Command::Assemble { kb, edges, tail_identity, out } => {
            let kb = load_kb(&kb)?;
            let mut flows = Vec::new();
            for p in &edges {
                flows.extend(load_edges(p, false)?);
            }
            let g = assemble(&kb, &merge_edges(flows), tail_identity.into())?;
            g.save(&out)?;
            print_json(&g.stats())
        }
        Command::EvalEdges { graph, pairs, subkind, kinds } => {
            let g = load_graph(&graph)?;
            let pairs = consecutive_pairs(&group_matches(load_matches(&pairs)?), subkind);
            let families = (!kinds.is_empty()).then_some(kinds.as_slice());
            print_json(&g.edge_evaluation(&pairs, families)?)
        }
        Command::Stats { graph } => print_json(&load_graph(&graph)?.stats()),
        Command::Scenario { graph, matches, fraction, corpus, scenario, out } => {
            let g = load_graph(&graph)?;
            let matches = load_matches(&matches)?;
            let (name, matches) = match (corpus, scenario) {
                (Some(c), Some(s)) => {
                    let mut grouped = scenario_matches(&load_corpus(&c)?, matches);
                    let ms = grouped.remove(&s).with_context(|| format!("no matches for scenario `{s}`"))?;
                    (s, ms)
                }
                (_, s) => (s.unwrap_or_else(|| "all".into()), matches),
            };
            let sg = g.scenario_subgraph(&name, &matches, fraction)?;
            match out {
                Some(path) => {
                    serde_json::to_writer(create_writer(&path)?, &sg)?;
                    print_json(&serde_json::json!({ "heads": sg.heads.len(), "nodes": sg.nodes.len(), "edges": sg.edges.len() }))
                }
                None => print_json(&sg),
            }
        }
        Command::EvalMatching { corpus, parses, kb, provider, method, sample, seed, threshold } => {
            let corpus = load_corpus(&corpus)?;
            let parses = corpus_parses(&corpus, read_conllu(&parses)?);
            let kb = load_kb(&kb)?;
            let provider = provider.build()?;
            let linker = Linker::for_level(&kb, HeadLevel::Event, provider.as_ref())?;
            let chosen = sample_utterances(&parses, sample, seed);
            let mut report = matching_report(&chosen, method, &ExtractorConfig::default(), &linker, provider.as_ref(), threshold)?;
            report.seed = Some(seed);
            print_json(&report)
        }
        Command::Bench { graph, corpus, parses, provider, task, mode, threshold, per_relation, test_fraction, seed, export } => {
            let g = load_graph(&graph)?;
            let corpus = load_corpus(&corpus)?;
            let parses = index_parses(read_conllu(&parses)?);
            let provider = provider.build()?;
            let linker = Linker::new(&graph_heads(&g, NodeKind::EventHead), provider.as_ref())?;
            let task = match task {
                TaskArg::Emotion => Task::Emotion,
                TaskArg::Intent => Task::Intent,
            };
            let sampling = SamplingConfig { threshold, per_relation };
            let instances = build_instances(task, &corpus, &parses, &g, &linker, provider.as_ref(), &ExtractorConfig::default(), sampling)?;
            if let Some(path) = export {
                let rows: Vec<serde_json::Value> = instances
                    .iter()
                    .map(|i| serde_json::json!({ "instance": i, "input": dialogkg::tasks::assemble_input(i, mode) }))
                    .collect();
                save_jsonl(&rows, &path)?;
            }
            let with_knowledge = instances.iter().filter(|i| !i.knowledge.is_empty()).count();
            let (train, test) = split_by_conversation(instances, test_fraction, seed)?;
            if train.is_empty() || test.is_empty() {
                bail!("split left an empty side ({} train, {} test); adjust --test-fraction", train.len(), test.len());
            }
            let hashing = HashingProvider::default();
            let clf = NearestCentroidClassifier::fit(&train, mode, &hashing)?;
            let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
            for i in &train {
                *counts.entry(&i.label).or_default() += 1;
            }
            let majority = counts.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map(|(l, _)| l.to_string()).unwrap_or_default();
            print_json(&serde_json::json!({
                "task": format!("{task:?}").to_lowercase(),
                "mode": mode,
                "train": train.len(),
                "test": test.len(),
                "instances_with_knowledge": with_knowledge,
                "accuracy": evaluate_task(&test, &clf, mode)?,
                "majority_baseline": evaluate_task(&test, &ConstantClassifier(majority), mode)?,
            }))
        }
        Command::Serve { graph, corpus, matches, bind, audit_log, token_env, fraction } => {
            let mut g = load_graph(&graph)?;
            let log = AuditLog::open(&audit_log).with_context(|| format!("opening audit log {}", audit_log.display()))?;
            replay(&mut g, log.entries()).context("replaying audit log")?;
            let scenarios = match (corpus, matches) {
                (Some(c), Some(m)) => scenario_matches(&load_corpus(&c)?, load_matches(&m)?),
                _ => HashMap::new(),
            };
            let token = std::env::var(&token_env).ok().filter(|t| !t.is_empty());
            if token.is_none() {
                tracing::warn!(env = %token_env, "no edit token set; POST /edits is open");
            }
            tracing::info!(replayed = log.entries().len(), version = g.version(), "graph ready");
            let state = Arc::new(AppState::new(g, log, scenarios, ServiceConfig { token, default_fraction: fraction }));
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(api::serve(state, &bind)).with_context(|| format!("serving on {bind}"))
        }
        Command::Translate { kb, endpoint, token_env, connectors, out } => {
            let kb = load_kb(&kb)?;
            let client: Box<dyn TranslationClient> = match endpoint {
                Some(url) => Box::new(HttpTranslationClient::from_env(url, &token_env)?),
                None => Box::new(IdentityClient),
            };
            let connectors = match connectors {
                Connectors::Bracketed => default_connectors(),
                Connectors::Natural => natural_connectors(),
            };
            let results = translate_triples(&kb, &default_rules(), &connectors, client.as_ref());
            let mut ok = Vec::with_capacity(results.len());
            let mut failed = 0;
            for (t, r) in kb.triples().iter().zip(results) {
                match r {
                    Ok(x) => ok.push(x),
                    Err(e) => {
                        failed += 1;
                        tracing::warn!(head = %t.head, relation = %t.relation, error = %e, "translation failed");
                    }
                }
            }
            save_jsonl(&ok, &out)?;
            let split_failed = ok.iter().filter(|t| t.split_failed).count();
            print_json(&serde_json::json!({ "translated": ok.len(), "split_failed": split_failed, "errors": failed }))
        }
        Command::ExportPairs { matches, k, seed, out } => {
            let pairs = export_finetune_pairs(&load_matches(&matches)?, k, seed)?;
            save_jsonl(&pairs, &out)?;
            print_json(&serde_json::json!({ "pairs": pairs.len(), "seed": seed }))
        }
    }
}

/// Entry point for the binary: logs to stderr, maps errors to exit code 1.
pub fn main() -> std::process::ExitCode {
    use std::io::IsTerminal;
    tracing_subscriber::fmt().with_writer(std::io::stderr).with_ansi(std::io::stderr().is_terminal()).init();
    match run(Cli::parse()) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::ExitCode::FAILURE
        }
    }
}

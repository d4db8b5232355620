//! Unified store over KB triples and flow edges.
//!
//! Heads keep their KB ids; tails are materialized as nodes whose ids come
//! from [`tail_node_id`]. Every edge, atomic or flow, gets a stable numeric
//! id. Node and edge maps are ordered, so serialization is deterministic.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::edges::{tail_node_id, EventFlowKind, FlowEdge, FlowKind, LinkedConversation, Provenance, TailIdentity};
use crate::error::{Error, Result};
use crate::io::{create_writer, open_reader};
use crate::kb::{HeadLevel, Kb, Relation, TailCategory};
use crate::labels::IntentLabel;
use crate::link::MentionHeadMatch;

pub const FORMAT_NAME: &str = "dialogkg-graph";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    EventHead,
    EntityHead,
    Tail,
}

impl From<HeadLevel> for NodeKind {
    fn from(level: HeadLevel) -> Self {
        match level {
            HeadLevel::Event => Self::EventHead,
            HeadLevel::Entity => Self::EntityHead,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: String,
    pub kind: NodeKind,
    pub text: String,
}

/// Edge family; the first sort key of neighbor listings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Atomic,
    EventFlow,
    ConceptFlow,
    EmotionCause,
    EmotionIntent,
}

impl Family {
    pub const ALL: [Family; 5] = [Self::Atomic, Self::EventFlow, Self::ConceptFlow, Self::EmotionCause, Self::EmotionIntent];

    pub fn flow_kind(self) -> Option<FlowKind> {
        match self {
            Self::Atomic => None,
            Self::EventFlow => Some(FlowKind::EventFlow),
            Self::ConceptFlow => Some(FlowKind::ConceptFlow),
            Self::EmotionCause => Some(FlowKind::EmotionCause),
            Self::EmotionIntent => Some(FlowKind::EmotionIntent),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Atomic => "atomic",
            Self::EventFlow => "event_flow",
            Self::ConceptFlow => "concept_flow",
            Self::EmotionCause => "emotion_cause",
            Self::EmotionIntent => "emotion_intent",
        }
    }
}

impl From<FlowKind> for Family {
    fn from(kind: FlowKind) -> Self {
        match kind {
            FlowKind::EventFlow => Self::EventFlow,
            FlowKind::ConceptFlow => Self::ConceptFlow,
            FlowKind::EmotionCause => Self::EmotionCause,
            FlowKind::EmotionIntent => Self::EmotionIntent,
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|f| f.as_str() == s).ok_or_else(|| Error::invalid("edge family", format!("`{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: u64,
    pub family: Family,
    /// Set for atomic edges only.
    pub relation: Option<Relation>,
    pub subkind: Option<EventFlowKind>,
    pub from: String,
    pub to: String,
    /// Equals the provenance count for flow edges; atomic edges carry 1.
    pub weight: u32,
    pub intent_label: Option<IntentLabel>,
    pub provenance: Vec<Provenance>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GraphStats {
    pub atomic_relations: u64,
    pub event_flows: u64,
    pub concept_flows: u64,
    pub emotion_cause_flows: u64,
    pub emotion_intent_flows: u64,
    pub total_triplets: u64,
}

impl GraphStats {
    pub fn from_family_counts(atomic: u64, event: u64, concept: u64, cause: u64, intent: u64) -> Self {
        Self {
            atomic_relations: atomic,
            event_flows: event,
            concept_flows: concept,
            emotion_cause_flows: cause,
            emotion_intent_flows: intent,
            total_triplets: atomic + event + concept + cause + intent,
        }
    }

    pub fn family(&self, f: Family) -> u64 {
        match f {
            Family::Atomic => self.atomic_relations,
            Family::EventFlow => self.event_flows,
            Family::ConceptFlow => self.concept_flows,
            Family::EmotionCause => self.emotion_cause_flows,
            Family::EmotionIntent => self.emotion_intent_flows,
        }
    }

    fn bump(&mut self, f: Family, up: bool) {
        let slot = match f {
            Family::Atomic => &mut self.atomic_relations,
            Family::EventFlow => &mut self.event_flows,
            Family::ConceptFlow => &mut self.concept_flows,
            Family::EmotionCause => &mut self.emotion_cause_flows,
            Family::EmotionIntent => &mut self.emotion_intent_flows,
        };
        if up {
            *slot += 1;
            self.total_triplets += 1;
        } else {
            *slot -= 1;
            self.total_triplets -= 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Out,
    In,
    Both,
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "out" => Ok(Self::Out),
            "in" => Ok(Self::In),
            "both" => Ok(Self::Both),
            other => Err(Error::invalid("direction", format!("`{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Graph {
    identity: TailIdentity,
    nodes: BTreeMap<String, GraphNode>,
    edges: BTreeMap<u64, Edge>,
    out_adj: HashMap<String, BTreeSet<u64>>,
    in_adj: HashMap<String, BTreeSet<u64>>,
    next_edge_id: u64,
    version: u64,
    stats: GraphStats,
}

/// Builds the graph from a KB and flow edges. Tails are created from the KB;
/// every flow-edge endpoint must already exist afterwards.
pub fn assemble(kb: &Kb, flows: &[FlowEdge], identity: TailIdentity) -> Result<Graph> {
    let mut g = Graph::new(identity);
    for h in kb.heads() {
        g.insert_node(GraphNode { id: h.id.clone(), kind: h.level.into(), text: h.text.clone() })?;
    }
    for t in kb.triples() {
        let tail_id = tail_node_id(identity, &t.head, t.relation, &t.tail);
        if !g.nodes.contains_key(&tail_id) {
            g.insert_node(GraphNode { id: tail_id.clone(), kind: NodeKind::Tail, text: t.tail.clone() })?;
        } else if g.nodes[&tail_id].kind != NodeKind::Tail {
            return Err(Error::invalid("graph", format!("tail id `{tail_id}` collides with a head id")));
        }
        g.insert_edge(Family::Atomic, Some(t.relation), None, &t.head, &tail_id, 1, None, Vec::new());
    }
    let mut dangling = BTreeSet::new();
    for f in flows {
        for end in [&f.from, &f.to] {
            if !g.nodes.contains_key(end) {
                dangling.insert(end.clone());
            }
        }
    }
    if !dangling.is_empty() {
        return Err(Error::DanglingEndpoints(dangling.into_iter().collect()));
    }
    for f in flows {
        f.validate().map_err(|m| Error::invalid("flow edge", format!("{} -> {}: {m}", f.from, f.to)))?;
        g.check_flow_endpoints(f.kind, &f.from, &f.to)
            .map_err(|(_, m)| Error::invalid("flow edge", format!("{} -> {}: {m}", f.from, f.to)))?;
        g.insert_edge(f.kind.into(), None, f.subkind, &f.from, &f.to, f.weight, f.intent_label, f.provenance.clone());
    }
    Ok(g)
}

impl Graph {
    pub fn new(identity: TailIdentity) -> Self {
        Self { identity, ..Self::default() }
    }

    pub fn identity(&self) -> TailIdentity {
        self.identity
    }

    /// Incremented by every committed edit.
    pub fn version(&self) -> u64 {
        self.version
    }

    pub(crate) fn bump_version(&mut self) -> u64 {
        self.version += 1;
        self.version
    }

    pub fn stats(&self) -> GraphStats {
        self.stats
    }

    pub fn node(&self, id: &str) -> Result<&GraphNode> {
        self.nodes.get(id).ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &GraphNode> {
        self.nodes.values()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge(&self, id: u64) -> Option<&Edge> {
        self.edges.get(&id)
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.values()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn tail_id(&self, head: &str, relation: Relation, text: &str) -> String {
        tail_node_id(self.identity, head, relation, text)
    }

    pub(crate) fn insert_node(&mut self, node: GraphNode) -> Result<()> {
        if self.nodes.contains_key(&node.id) {
            return Err(Error::invalid("graph", format!("duplicate node id `{}`", node.id)));
        }
        self.nodes.insert(node.id.clone(), node);
        Ok(())
    }

    /// Removes a node that has no incident edges.
    pub(crate) fn remove_isolated_node(&mut self, id: &str) {
        debug_assert!(self.out_adj.get(id).is_none_or(BTreeSet::is_empty));
        debug_assert!(self.in_adj.get(id).is_none_or(BTreeSet::is_empty));
        self.nodes.remove(id);
        self.out_adj.remove(id);
        self.in_adj.remove(id);
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn insert_edge(
        &mut self,
        family: Family,
        relation: Option<Relation>,
        subkind: Option<EventFlowKind>,
        from: &str,
        to: &str,
        weight: u32,
        intent_label: Option<IntentLabel>,
        provenance: Vec<Provenance>,
    ) -> u64 {
        let id = self.next_edge_id;
        self.next_edge_id += 1;
        let e = Edge { id, family, relation, subkind, from: from.into(), to: to.into(), weight, intent_label, provenance };
        self.out_adj.entry(e.from.clone()).or_default().insert(id);
        self.in_adj.entry(e.to.clone()).or_default().insert(id);
        self.stats.bump(family, true);
        self.edges.insert(id, e);
        id
    }

    pub(crate) fn remove_edge(&mut self, id: u64) -> Option<Edge> {
        let e = self.edges.remove(&id)?;
        if let Some(s) = self.out_adj.get_mut(&e.from) {
            s.remove(&id);
        }
        if let Some(s) = self.in_adj.get_mut(&e.to) {
            s.remove(&id);
        }
        self.stats.bump(e.family, false);
        Some(e)
    }

    pub(crate) fn edge_mut(&mut self, id: u64) -> Option<&mut Edge> {
        self.edges.get_mut(&id)
    }

    /// Moves one endpoint of an edge to another node.
    pub(crate) fn repoint_edge(&mut self, id: u64, from: Option<&str>, to: Option<&str>) {
        let Some(e) = self.edges.get_mut(&id) else { return };
        if let Some(f) = from {
            self.out_adj.get_mut(&e.from).map(|s| s.remove(&id));
            e.from = f.to_string();
            self.out_adj.entry(e.from.clone()).or_default().insert(id);
        }
        if let Some(t) = to {
            self.in_adj.get_mut(&e.to).map(|s| s.remove(&id));
            e.to = t.to_string();
            self.in_adj.entry(e.to.clone()).or_default().insert(id);
        }
    }

    pub fn out_edges(&self, id: &str) -> impl Iterator<Item = &Edge> {
        self.out_adj.get(id).into_iter().flatten().map(|i| &self.edges[i])
    }

    pub fn in_edges(&self, id: &str) -> impl Iterator<Item = &Edge> {
        self.in_adj.get(id).into_iter().flatten().map(|i| &self.edges[i])
    }

    pub fn incident_edges(&self, id: &str) -> Vec<u64> {
        let mut ids: BTreeSet<u64> = BTreeSet::new();
        ids.extend(self.out_adj.get(id).into_iter().flatten());
        ids.extend(self.in_adj.get(id).into_iter().flatten());
        ids.into_iter().collect()
    }

    /// Relation categories under which `id` appears as an atomic tail.
    pub fn tail_categories(&self, id: &str) -> BTreeSet<TailCategory> {
        self.in_edges(id).filter_map(|e| e.relation).map(|r| r.category()).collect()
    }

    /// The atomic edge `head --relation--> tail_id`, if present.
    pub fn atomic_edge(&self, head: &str, relation: Relation, tail_id: &str) -> Option<&Edge> {
        self.out_edges(head).find(|e| e.relation == Some(relation) && e.to == tail_id)
    }

    /// Checks that a flow edge of `kind` may join `from` and `to`; the error
    /// names the offending field.
    pub fn check_flow_endpoints(&self, kind: FlowKind, from: &str, to: &str) -> std::result::Result<(), (&'static str, String)> {
        let node = |field: &'static str, id: &str| self.nodes.get(id).ok_or((field, format!("unknown node `{id}`")));
        let (a, b) = (node("from", from)?, node("to", to)?);
        let need_kind = |field: &'static str, n: &GraphNode, k: NodeKind| {
            if n.kind == k {
                Ok(())
            } else {
                Err((field, format!("`{}` is {:?}, expected {:?}", n.id, n.kind, k)))
            }
        };
        let need_cat = |field: &'static str, n: &GraphNode, c: TailCategory| {
            if n.kind == NodeKind::Tail && self.tail_categories(&n.id).contains(&c) {
                Ok(())
            } else {
                Err((field, format!("`{}` is not a {} tail", n.id, c.name())))
            }
        };
        match kind {
            FlowKind::EventFlow => need_kind("from", a, NodeKind::EventHead).and(need_kind("to", b, NodeKind::EventHead)),
            FlowKind::ConceptFlow => need_kind("from", a, NodeKind::EntityHead).and(need_kind("to", b, NodeKind::EntityHead)),
            FlowKind::EmotionCause => need_cat("from", a, TailCategory::Emotion).and(need_cat("to", b, TailCategory::Before)),
            FlowKind::EmotionIntent => need_cat("from", a, TailCategory::Emotion).and(need_cat("to", b, TailCategory::After)),
        }
    }

    /// Adjacent edges and the node at their other end, ordered by
    /// (family, weight descending, edge id).
    pub fn neighbors(&self, id: &str, families: Option<&[Family]>, direction: Direction) -> Result<Vec<(&Edge, &GraphNode)>> {
        self.node(id)?;
        let keep = |e: &&Edge| families.is_none_or(|fs| fs.contains(&e.family));
        let mut out: Vec<(&Edge, &GraphNode)> = Vec::new();
        if matches!(direction, Direction::Out | Direction::Both) {
            out.extend(self.out_edges(id).filter(keep).map(|e| (e, &self.nodes[&e.to])));
        }
        if matches!(direction, Direction::In | Direction::Both) {
            out.extend(self.in_edges(id).filter(keep).map(|e| (e, &self.nodes[&e.from])));
        }
        out.sort_by(|(a, _), (b, _)| a.family.cmp(&b.family).then(b.weight.cmp(&a.weight)).then(a.id.cmp(&b.id)));
        out.dedup_by_key(|(e, _)| e.id);
        Ok(out)
    }

    /// Atomic tails of `head` under `relation`, in insertion order.
    pub fn tails(&self, head: &str, relation: Relation) -> Vec<&GraphNode> {
        self.out_edges(head).filter(|e| e.relation == Some(relation)).map(|e| &self.nodes[&e.to]).collect()
    }

    /// Case-insensitive substring search over node text, ordered by id.
    pub fn search(&self, query: &str, limit: usize) -> Vec<&GraphNode> {
        let q = query.to_lowercase();
        self.nodes.values().filter(|n| n.text.to_lowercase().contains(&q)).take(limit).collect()
    }

    /// Shortest hop count ignoring edge direction, over edges of the given
    /// families (all families when `None`).
    pub fn distance(&self, a: &str, b: &str, families: Option<&[Family]>) -> Result<Option<usize>> {
        self.node(a)?;
        self.node(b)?;
        if a == b {
            return Ok(Some(0));
        }
        let keep = |e: &Edge| families.is_none_or(|fs| fs.contains(&e.family));
        let mut seen: HashSet<&str> = HashSet::from([a]);
        let mut queue = VecDeque::from([(a, 0usize)]);
        while let Some((n, d)) = queue.pop_front() {
            let next = self
                .out_edges(n)
                .filter(|e| keep(e))
                .map(|e| e.to.as_str())
                .chain(self.in_edges(n).filter(|e| keep(e)).map(|e| e.from.as_str()));
            for m in next {
                if m == b {
                    return Ok(Some(d + 1));
                }
                if seen.insert(m) {
                    queue.push_back((m, d + 1));
                }
            }
        }
        Ok(None)
    }

    /// Hop counts from `a` to every node it reaches, ignoring direction.
    pub fn distances_from(&self, a: &str, families: Option<&[Family]>) -> Result<BTreeMap<String, usize>> {
        self.node(a)?;
        let keep = |e: &Edge| families.is_none_or(|fs| fs.contains(&e.family));
        let mut dist: BTreeMap<String, usize> = BTreeMap::from([(a.to_string(), 0)]);
        let mut queue = VecDeque::from([(a, 0usize)]);
        while let Some((n, d)) = queue.pop_front() {
            let next = self
                .out_edges(n)
                .filter(|e| keep(e))
                .map(|e| e.to.as_str())
                .chain(self.in_edges(n).filter(|e| keep(e)).map(|e| e.from.as_str()));
            for m in next {
                if !dist.contains_key(m) {
                    dist.insert(m.to_string(), d + 1);
                    queue.push_back((m, d + 1));
                }
            }
        }
        Ok(dist)
    }

    /// Connectivity and mean distance over head pairs. Pairs with identical
    /// ends are excluded; mean distance is over connected pairs only.
    pub fn edge_evaluation(&self, pairs: &[(String, String)], families: Option<&[Family]>) -> Result<EdgeEvaluation> {
        let mut eval = EdgeEvaluation::default();
        let mut total = 0usize;
        for (a, b) in pairs {
            if a == b {
                eval.excluded += 1;
                continue;
            }
            match self.distance(a, b, families)? {
                Some(d) => {
                    eval.connected += 1;
                    total += d;
                }
                None => eval.disconnected += 1,
            }
        }
        let n = eval.connected + eval.disconnected;
        if n == 0 {
            return Err(Error::Empty("pair list"));
        }
        eval.connectivity = eval.connected as f64 / n as f64;
        eval.avg_distance = (eval.connected > 0).then(|| total as f64 / eval.connected as f64);
        Ok(eval)
    }

    /// Top `ceil(fraction * N)` matched heads, ranked by match count, then
    /// best score, then id, with their atomic tails and all induced edges.
    pub fn scenario_subgraph(&self, scenario: &str, matches: &[MentionHeadMatch], fraction: f64) -> Result<ScenarioGraph> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::invalid("fraction", format!("{fraction} is outside (0, 1]")));
        }
        let heads = rank_heads(matches.iter().filter(|m| self.contains(&m.head_id)));
        let keep = ((fraction * heads.len() as f64) - 1e-9).ceil().max(0.0) as usize;
        let heads: Vec<String> = heads.into_iter().take(keep).collect();
        let mut members: BTreeSet<&str> = heads.iter().map(String::as_str).collect();
        for h in &heads {
            members.extend(self.out_edges(h).filter(|e| e.family == Family::Atomic).map(|e| e.to.as_str()));
        }
        let edges: Vec<Edge> = self
            .edges
            .values()
            .filter(|e| members.contains(e.from.as_str()) && members.contains(e.to.as_str()))
            .cloned()
            .collect();
        let nodes = members.iter().map(|id| self.nodes[*id].clone()).collect();
        Ok(ScenarioGraph { scenario: scenario.to_string(), heads, nodes, edges })
    }

    pub fn write(&self, mut out: impl Write) -> Result<()> {
        let header = Record::Header {
            format: FORMAT_NAME.into(),
            version: FORMAT_VERSION,
            tail_identity: self.identity,
            next_edge_id: self.next_edge_id,
            graph_version: self.version,
        };
        let mut line = |r: &Record| -> Result<()> {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
            Ok(())
        };
        line(&header)?;
        for n in self.nodes.values() {
            line(&Record::Node(n.clone()))?;
        }
        for e in self.edges.values() {
            line(&Record::Edge(e.clone()))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        buf
    }

    pub fn read(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines().enumerate().filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()));
        let parse = |i: usize, l: std::io::Result<String>| -> Result<Record> {
            serde_json::from_str(&l?).map_err(|e| Error::Syntax { line: i + 1, message: e.to_string() })
        };
        let (i, first) = lines.next().ok_or(Error::Empty("graph file"))?;
        let Record::Header { format, version, tail_identity, next_edge_id, graph_version } = parse(i, first)? else {
            return Err(Error::Syntax { line: i + 1, message: "expected header record".into() });
        };
        if format != FORMAT_NAME {
            return Err(Error::invalid("graph file", format!("format `{format}`")));
        }
        if version != FORMAT_VERSION {
            return Err(Error::Version { found: version, expected: FORMAT_VERSION });
        }
        let mut g = Graph::new(tail_identity);
        let mut edges_seen = false;
        for (i, l) in lines {
            match parse(i, l)? {
                Record::Header { .. } => return Err(Error::Syntax { line: i + 1, message: "duplicate header".into() }),
                Record::Node(n) if !edges_seen => g.insert_node(n).map_err(|e| Error::Syntax { line: i + 1, message: e.to_string() })?,
                Record::Node(_) => return Err(Error::Syntax { line: i + 1, message: "node record after edges".into() }),
                Record::Edge(e) => {
                    edges_seen = true;
                    for end in [&e.from, &e.to] {
                        if !g.nodes.contains_key(end) {
                            return Err(Error::DanglingEndpoints(vec![end.clone()]));
                        }
                    }
                    if g.edges.contains_key(&e.id) || e.id >= next_edge_id {
                        return Err(Error::Syntax { line: i + 1, message: format!("bad edge id {}", e.id) });
                    }
                    g.out_adj.entry(e.from.clone()).or_default().insert(e.id);
                    g.in_adj.entry(e.to.clone()).or_default().insert(e.id);
                    g.stats.bump(e.family, true);
                    g.edges.insert(e.id, e);
                }
            }
        }
        g.next_edge_id = next_edge_id;
        g.version = graph_version;
        Ok(g)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write(create_writer(path)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read(open_reader(path)?)
    }
}

/// Distinct head ids ranked by match count desc, best score desc, id asc.
pub fn rank_heads<'a>(matches: impl IntoIterator<Item = &'a MentionHeadMatch>) -> Vec<String> {
    let mut agg: HashMap<&str, (usize, f64)> = HashMap::new();
    for m in matches {
        let e = agg.entry(m.head_id.as_str()).or_insert((0, f64::NEG_INFINITY));
        e.0 += 1;
        e.1 = e.1.max(m.score);
    }
    let mut ranked: Vec<(&str, usize, f64)> = agg.into_iter().map(|(h, (n, s))| (h, n, s)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(b.2.total_cmp(&a.2)).then(a.0.cmp(b.0)));
    ranked.into_iter().map(|(h, _, _)| h.to_string()).collect()
}

/// Consecutive matched-head pairs of an external corpus, paired the same
/// way flow edges are built.
pub fn consecutive_pairs(linked: &[LinkedConversation], pairing: EventFlowKind) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for conv in linked {
        let mut by_utt: BTreeMap<usize, Vec<&MentionHeadMatch>> = BTreeMap::new();
        for m in &conv.matches {
            by_utt.entry(m.mention.source.utterance).or_default().push(m);
        }
        for (&u, ms) in &by_utt {
            match pairing {
                EventFlowKind::NextSubUtterance => {
                    out.extend(ms.windows(2).map(|w| (w[0].head_id.clone(), w[1].head_id.clone())));
                }
                EventFlowKind::NextUtterance => {
                    if let Some(next) = by_utt.get(&(u + 1)) {
                        out.push((ms[ms.len() - 1].head_id.clone(), next[0].head_id.clone()));
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EdgeEvaluation {
    pub connectivity: f64,
    pub avg_distance: Option<f64>,
    pub connected: usize,
    pub disconnected: usize,
    /// Pairs whose two heads are the same node.
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioGraph {
    pub scenario: String,
    pub heads: Vec<String>,
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum Record {
    Header { format: String, version: u32, tail_identity: TailIdentity, next_edge_id: u64, graph_version: u64 },
    Node(GraphNode),
    Edge(Edge),
}

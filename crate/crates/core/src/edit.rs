//! Audited, versioned graph mutations.
//!
//! An edit is validated in full before anything changes, so a rejected edit
//! leaves the graph untouched. [`validate`] and [`commit`] are split so a
//! caller can make the audit record durable in between.

use std::fs::{File, OpenOptions};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::edges::{EventFlowKind, FlowEdge, FlowKind, Origin, Provenance};
use crate::graph::{Family, Graph, GraphNode, NodeKind};
use crate::kb::{normalize_ws, Relation};
use crate::labels::IntentLabel;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EditError {
    #[error("not found: {0}")]
    NotFound(String),
    #[error("invalid `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("stale edit: based on version {base}, graph is at {current}")]
    Stale { base: u64, current: u64 },
}

fn invalid(field: &str, message: impl Into<String>) -> EditError {
    EditError::Invalid { field: field.into(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", content = "payload", rename_all = "snake_case")]
pub enum EditPayload {
    AddTail { head: String, relation: Relation, tail: String },
    ReviseTail { head: String, relation: Relation, tail: String, new_tail: String },
    DeleteTail { head: String, relation: Relation, tail: String },
    AddFlowEdge {
        kind: FlowKind,
        #[serde(default)]
        subkind: Option<EventFlowKind>,
        from: String,
        to: String,
        #[serde(default)]
        intent_label: Option<IntentLabel>,
    },
    LabelEdge { edge: u64, intent_label: IntentLabel },
    DeleteFlowEdge { edge: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditOp {
    #[serde(flatten)]
    pub payload: EditPayload,
    pub author: String,
    /// Milliseconds since the Unix epoch.
    #[serde(default)]
    pub timestamp: u64,
    /// Graph version the edit was prepared against; `None` skips the check.
    #[serde(default)]
    pub base_version: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditOutcome {
    pub version: u64,
    pub nodes_added: Vec<String>,
    pub nodes_removed: Vec<String>,
    pub edges_added: Vec<u64>,
    pub edges_removed: Vec<u64>,
    pub edges_changed: Vec<u64>,
}

fn expert(author: &str) -> Provenance {
    Provenance { conversation: author.to_string(), utterances: Vec::new(), origin: Origin::Expert }
}

fn require_head(g: &Graph, head: &str) -> Result<(), EditError> {
    match g.node(head) {
        Ok(n) if n.kind != NodeKind::Tail => Ok(()),
        Ok(_) => Err(invalid("payload.head", format!("`{head}` is a tail node"))),
        Err(_) => Err(EditError::NotFound(format!("node `{head}`"))),
    }
}

fn require_tail_text(field: &str, text: &str) -> Result<String, EditError> {
    let t = normalize_ws(text);
    if t.is_empty() {
        return Err(invalid(field, "must not be empty"));
    }
    Ok(t)
}

fn existing_atomic(g: &Graph, head: &str, relation: Relation, tail: &str) -> Result<u64, EditError> {
    let id = g.tail_id(head, relation, tail);
    g.atomic_edge(head, relation, &id)
        .map(|e| e.id)
        .ok_or_else(|| EditError::NotFound(format!("triple ({head}, {relation}, {tail})")))
}

fn require_flow_edge(g: &Graph, edge: u64) -> Result<&crate::graph::Edge, EditError> {
    let e = g.edge(edge).ok_or_else(|| EditError::NotFound(format!("edge {edge}")))?;
    if e.family == Family::Atomic {
        return Err(invalid("payload.edge", format!("edge {edge} is an atomic triple")));
    }
    Ok(e)
}

/// Checks an edit against the current graph without changing it.
pub fn validate(g: &Graph, op: &EditOp) -> Result<(), EditError> {
    if op.author.trim().is_empty() {
        return Err(invalid("author", "must not be empty"));
    }
    if let Some(base) = op.base_version {
        if base != g.version() {
            return Err(EditError::Stale { base, current: g.version() });
        }
    }
    match &op.payload {
        EditPayload::AddTail { head, relation, tail } => {
            require_head(g, head)?;
            let text = require_tail_text("payload.tail", tail)?;
            let id = g.tail_id(head, *relation, &text);
            if g.atomic_edge(head, *relation, &id).is_some() {
                return Err(invalid("payload.tail", "triple already exists"));
            }
            if g.node(&id).is_ok_and(|n| n.kind != NodeKind::Tail) {
                return Err(invalid("payload.tail", format!("`{id}` collides with a head id")));
            }
        }
        EditPayload::ReviseTail { head, relation, tail, new_tail } => {
            require_head(g, head)?;
            existing_atomic(g, head, *relation, tail)?;
            let text = require_tail_text("payload.new_tail", new_tail)?;
            let new_id = g.tail_id(head, *relation, &text);
            if new_id == g.tail_id(head, *relation, tail) {
                return Err(invalid("payload.new_tail", "identical to the current tail"));
            }
            if g.atomic_edge(head, *relation, &new_id).is_some() {
                return Err(invalid("payload.new_tail", "triple already exists"));
            }
            if g.node(&new_id).is_ok_and(|n| n.kind != NodeKind::Tail) {
                return Err(invalid("payload.new_tail", format!("`{new_id}` collides with a head id")));
            }
        }
        EditPayload::DeleteTail { head, relation, tail } => {
            require_head(g, head)?;
            existing_atomic(g, head, *relation, tail)?;
        }
        EditPayload::AddFlowEdge { kind, subkind, from, to, intent_label } => {
            for (field, id) in [("payload.from", from), ("payload.to", to)] {
                if !g.contains(id) {
                    return Err(EditError::NotFound(format!("node `{id}` ({field})")));
                }
            }
            let probe = FlowEdge::new(*kind, *subkind, from, to, *intent_label, expert(&op.author));
            probe.validate().map_err(|m| {
                let field = if m.contains("subkind") { "payload.subkind" } else { "payload.intent_label" };
                invalid(field, m)
            })?;
            g.check_flow_endpoints(*kind, from, to).map_err(|(f, m)| invalid(&format!("payload.{f}"), m))?;
        }
        EditPayload::LabelEdge { edge, intent_label } => {
            let e = require_flow_edge(g, *edge)?;
            if e.family != Family::EmotionIntent {
                return Err(invalid("payload.edge", format!("edge {edge} is {}, not emotion_intent", e.family.as_str())));
            }
            if !intent_label.is_edge_label() {
                return Err(invalid("payload.intent_label", "must be one of ask, advise, describe, opinion, console"));
            }
        }
        EditPayload::DeleteFlowEdge { edge } => {
            require_flow_edge(g, *edge)?;
        }
    }
    Ok(())
}

/// Adds the tail node when missing; returns its id.
fn ensure_tail(g: &mut Graph, head: &str, relation: Relation, text: &str, out: &mut EditOutcome) -> String {
    let id = g.tail_id(head, relation, text);
    if !g.contains(&id) {
        g.insert_node(GraphNode { id: id.clone(), kind: NodeKind::Tail, text: text.to_string() }).expect("checked absent");
        out.nodes_added.push(id.clone());
    }
    id
}

/// Drops flow edges at `tail` whose endpoint categories no longer hold, and
/// the node itself once nothing references it.
fn tidy_tail(g: &mut Graph, tail: &str, out: &mut EditOutcome) {
    for id in g.incident_edges(tail) {
        let e = g.edge(id).expect("incident edge");
        let Some(kind) = e.family.flow_kind() else { continue };
        if g.check_flow_endpoints(kind, &e.from, &e.to).is_err() {
            g.remove_edge(id);
            out.edges_removed.push(id);
        }
    }
    if g.incident_edges(tail).is_empty() {
        g.remove_isolated_node(tail);
        out.nodes_removed.push(tail.to_string());
    }
}

/// Applies a validated edit and bumps the graph version.
///
/// # Panics
/// If `op` was not accepted by [`validate`] against this graph state.
pub fn commit(g: &mut Graph, op: &EditOp) -> EditOutcome {
    let mut out = EditOutcome::default();
    match &op.payload {
        EditPayload::AddTail { head, relation, tail } => {
            let text = normalize_ws(tail);
            let tid = ensure_tail(g, head, *relation, &text, &mut out);
            let id = g.insert_edge(Family::Atomic, Some(*relation), None, head, &tid, 1, None, vec![expert(&op.author)]);
            out.edges_added.push(id);
        }
        EditPayload::ReviseTail { head, relation, tail, new_tail } => {
            let old_edge = existing_atomic(g, head, *relation, tail).expect("validated");
            let old_id = g.edge(old_edge).expect("validated").to.clone();
            let text = normalize_ws(new_tail);
            let new_id = ensure_tail(g, head, *relation, &text, &mut out);
            g.repoint_edge(old_edge, None, Some(&new_id));
            g.edge_mut(old_edge).expect("validated").provenance.push(expert(&op.author));
            out.edges_changed.push(old_edge);
            // A tail left without atomic parents hands its flow edges to the
            // revised tail, which inherits the same relation category.
            if g.in_edges(&old_id).all(|e| e.family != Family::Atomic) {
                for id in g.incident_edges(&old_id) {
                    let e = g.edge(id).expect("incident edge");
                    let from = (e.from == old_id).then_some(new_id.as_str());
                    let to = (e.to == old_id).then_some(new_id.as_str());
                    g.repoint_edge(id, from, to);
                    out.edges_changed.push(id);
                }
            }
            tidy_tail(g, &old_id, &mut out);
        }
        EditPayload::DeleteTail { head, relation, tail } => {
            let id = existing_atomic(g, head, *relation, tail).expect("validated");
            let tid = g.remove_edge(id).expect("validated").to;
            out.edges_removed.push(id);
            tidy_tail(g, &tid, &mut out);
        }
        EditPayload::AddFlowEdge { kind, subkind, from, to, intent_label } => {
            let family = Family::from(*kind);
            let same = g
                .out_edges(from)
                .find(|e| e.family == family && e.to == *to && e.subkind == *subkind && e.intent_label == *intent_label)
                .map(|e| e.id);
            match same {
                Some(id) => {
                    let e = g.edge_mut(id).expect("found");
                    e.weight += 1;
                    e.provenance.push(expert(&op.author));
                    e.provenance.sort();
                    out.edges_changed.push(id);
                }
                None => {
                    let id = g.insert_edge(family, None, *subkind, from, to, 1, *intent_label, vec![expert(&op.author)]);
                    out.edges_added.push(id);
                }
            }
        }
        EditPayload::LabelEdge { edge, intent_label } => {
            g.edge_mut(*edge).expect("validated").intent_label = Some(*intent_label);
            out.edges_changed.push(*edge);
        }
        EditPayload::DeleteFlowEdge { edge } => {
            g.remove_edge(*edge);
            out.edges_removed.push(*edge);
        }
    }
    out.version = g.bump_version();
    out
}

pub fn apply_edit(g: &mut Graph, op: &EditOp) -> Result<EditOutcome, EditError> {
    validate(g, op)?;
    Ok(commit(g, op))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub seq: u64,
    /// Graph version produced by this edit.
    pub version: u64,
    pub op: EditOp,
}

/// Append-only JSONL log of accepted edits, synced to disk on every append.
#[derive(Debug)]
pub struct AuditLog {
    path: PathBuf,
    file: File,
    entries: Vec<AuditEntry>,
}

impl AuditLog {
    /// Opens or creates the log, loading any existing entries.
    pub fn open(path: impl AsRef<Path>) -> crate::Result<Self> {
        let path = path.as_ref().to_path_buf();
        let entries = if path.exists() { crate::io::read_jsonl(BufReader::new(File::open(&path)?))? } else { Vec::new() };
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Self { path, file, entries })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn entries(&self) -> &[AuditEntry] {
        &self.entries
    }

    pub fn append(&mut self, op: &EditOp, version: u64) -> crate::Result<&AuditEntry> {
        let entry = AuditEntry { seq: self.entries.len() as u64, version, op: op.clone() };
        let mut line = serde_json::to_vec(&entry)?;
        line.push(b'\n');
        self.file.write_all(&line)?;
        self.file.sync_data()?;
        self.entries.push(entry);
        Ok(self.entries.last().expect("just pushed"))
    }
}

/// Validates, logs, then commits: the edit is durable before it is visible.
pub fn apply_logged(g: &mut Graph, log: &mut AuditLog, op: &EditOp) -> crate::Result<EditOutcome> {
    validate(g, op)?;
    log.append(op, g.version() + 1)?;
    Ok(commit(g, op))
}

/// Re-applies logged edits in order.
pub fn replay(g: &mut Graph, entries: &[AuditEntry]) -> crate::Result<()> {
    for entry in entries {
        let out = apply_edit(g, &entry.op)?;
        if out.version != entry.version {
            return Err(crate::Error::invalid("audit log", format!("entry {} expected version {}, got {}", entry.seq, entry.version, out.version)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edges::TailIdentity;
    use crate::graph::assemble;
    use crate::kb::{HeadLevel, Kb};

    fn graph() -> Graph {
        let mut kb = Kb::new();
        kb.add_head("h", "PersonX is tired", HeadLevel::Event).unwrap();
        kb.add_triple("h", Relation::XReact, "uncomfortable").unwrap();
        kb.add_triple("h", Relation::XWant, "take medicine").unwrap();
        kb.add_triple("h", Relation::XNeed, "work late").unwrap();
        assemble(&kb, &[], TailIdentity::Global).unwrap()
    }

    fn op(payload: EditPayload) -> EditOp {
        EditOp { payload, author: "ann".into(), timestamp: 0, base_version: None }
    }

    #[test]
    fn add_tail_links_under_head() {
        let mut g = graph();
        let out = apply_edit(&mut g, &op(EditPayload::AddTail { head: "h".into(), relation: Relation::XWant, tail: "to rest".into() })).unwrap();
        assert_eq!(out.nodes_added, vec!["tail:to rest"]);
        assert!(g.tails("h", Relation::XWant).iter().any(|n| n.text == "to rest"));
        assert_eq!(g.version(), 1);
    }

    #[test]
    fn label_other_rejected() {
        let mut g = graph();
        let add = op(EditPayload::AddFlowEdge {
            kind: FlowKind::EmotionIntent,
            subkind: None,
            from: "tail:uncomfortable".into(),
            to: "tail:take medicine".into(),
            intent_label: Some(IntentLabel::Ask),
        });
        let id = apply_edit(&mut g, &add).unwrap().edges_added[0];
        let before = g.to_bytes();
        let err = apply_edit(&mut g, &op(EditPayload::LabelEdge { edge: id, intent_label: IntentLabel::Other })).unwrap_err();
        assert!(matches!(err, EditError::Invalid { ref field, .. } if field == "payload.intent_label"));
        assert_eq!(g.to_bytes(), before);
    }

    #[test]
    fn unlabeled_intent_edge_rejected() {
        let mut g = graph();
        let add = op(EditPayload::AddFlowEdge {
            kind: FlowKind::EmotionIntent,
            subkind: None,
            from: "tail:uncomfortable".into(),
            to: "tail:take medicine".into(),
            intent_label: None,
        });
        assert!(matches!(apply_edit(&mut g, &add), Err(EditError::Invalid { .. })));
        let wrong_direction = op(EditPayload::AddFlowEdge {
            kind: FlowKind::EmotionCause,
            subkind: None,
            from: "tail:uncomfortable".into(),
            to: "tail:take medicine".into(),
            intent_label: None,
        });
        assert!(matches!(apply_edit(&mut g, &wrong_direction), Err(EditError::Invalid { ref field, .. }) if field == "payload.to"));
    }

    #[test]
    fn delete_tail_counts() {
        let mut g = graph();
        let cause = op(EditPayload::AddFlowEdge {
            kind: FlowKind::EmotionCause,
            subkind: None,
            from: "tail:uncomfortable".into(),
            to: "tail:work late".into(),
            intent_label: None,
        });
        apply_edit(&mut g, &cause).unwrap();
        let before = g.stats().total_triplets;
        let out = apply_edit(&mut g, &op(EditPayload::DeleteTail { head: "h".into(), relation: Relation::XNeed, tail: "work late".into() })).unwrap();
        assert_eq!(out.edges_removed.len(), 2);
        assert_eq!(g.stats().total_triplets, before - out.edges_removed.len() as u64);
        assert!(!g.contains("tail:work late"));
    }

    #[test]
    fn unknown_targets_and_stale_versions() {
        let mut g = graph();
        let missing = op(EditPayload::DeleteTail { head: "h".into(), relation: Relation::XNeed, tail: "nope".into() });
        assert!(matches!(apply_edit(&mut g, &missing), Err(EditError::NotFound(_))));
        let stale = EditOp { base_version: Some(5), ..op(EditPayload::DeleteFlowEdge { edge: 0 }) };
        assert_eq!(apply_edit(&mut g, &stale), Err(EditError::Stale { base: 5, current: 0 }));
    }

    #[test]
    fn revise_keeps_flow_edges() {
        let mut g = graph();
        let cause = op(EditPayload::AddFlowEdge {
            kind: FlowKind::EmotionCause,
            subkind: None,
            from: "tail:uncomfortable".into(),
            to: "tail:work late".into(),
            intent_label: None,
        });
        let id = apply_edit(&mut g, &cause).unwrap().edges_added[0];
        let revise = op(EditPayload::ReviseTail { head: "h".into(), relation: Relation::XNeed, tail: "work late".into(), new_tail: "work overtime".into() });
        apply_edit(&mut g, &revise).unwrap();
        assert_eq!(g.edge(id).unwrap().to, "tail:work overtime");
        assert!(!g.contains("tail:work late"));
    }

    #[test]
    fn op_json_shape() {
        let o = op(EditPayload::LabelEdge { edge: 3, intent_label: IntentLabel::Ask });
        let v = serde_json::to_value(&o).unwrap();
        assert_eq!(v["op"], "label_edge");
        assert_eq!(v["payload"]["intent_label"], "ask");
        let back: EditOp = serde_json::from_value(v).unwrap();
        assert_eq!(back, o);
    }

    #[test]
    fn log_replay() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("audit.jsonl");
        let original = graph();
        let mut g = original.clone();
        let mut log = AuditLog::open(&path).unwrap();
        apply_logged(&mut g, &mut log, &op(EditPayload::AddTail { head: "h".into(), relation: Relation::XAttr, tail: "sick".into() })).unwrap();
        apply_logged(&mut g, &mut log, &op(EditPayload::DeleteTail { head: "h".into(), relation: Relation::XWant, tail: "take medicine".into() })).unwrap();
        drop(log);
        let reopened = AuditLog::open(&path).unwrap();
        let mut replayed = original;
        replay(&mut replayed, reopened.entries()).unwrap();
        assert_eq!(replayed.to_bytes(), g.to_bytes());
    }
}

//! Expert edits through the audit log: add and revise tails, label an
//! emotion-intent edge, reject invalid edits, then replay the log.
//!
//! cargo run -p dialogkg --example annotate_graph

use std::path::PathBuf;

use dialogkg::edges::{FlowKind, TailIdentity};
use dialogkg::edit::{apply_logged, replay, AuditLog, EditOp, EditPayload};
use dialogkg::graph::assemble;
use dialogkg::kb::{load_kb, Relation};
use dialogkg::IntentLabel;

fn op(payload: EditPayload) -> EditOp {
    EditOp { payload, author: "annotator".into(), timestamp: 0, base_version: None }
}

fn main() -> dialogkg::Result<()> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let original = assemble(&load_kb(fixtures.join("kb.tsv"))?, &[], TailIdentity::Global)?;
    let mut g = original.clone();
    let dir = std::env::temp_dir().join(format!("dialogkg-annotate-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let mut log = AuditLog::open(dir.join("audit.jsonl"))?;

    let edits = [
        op(EditPayload::AddTail { head: "sick".into(), relation: Relation::XWant, tail: "to lie down".into() }),
        op(EditPayload::ReviseTail { head: "sick".into(), relation: Relation::XWant, tail: "to lie down".into(), new_tail: "to rest".into() }),
        op(EditPayload::AddFlowEdge {
            kind: FlowKind::EmotionIntent,
            subkind: None,
            from: "tail:uncomfortable".into(),
            to: "tail:to rest".into(),
            intent_label: Some(IntentLabel::Advise),
        }),
        op(EditPayload::AddFlowEdge {
            kind: FlowKind::EmotionIntent,
            subkind: None,
            from: "tail:uncomfortable".into(),
            to: "tail:see a doctor".into(),
            intent_label: Some(IntentLabel::Other),
        }),
        op(EditPayload::DeleteTail { head: "sick".into(), relation: Relation::XWant, tail: "fly away".into() }),
    ];
    for e in &edits {
        match apply_logged(&mut g, &mut log, e) {
            Ok(out) => println!("v{}: +nodes {:?} +edges {:?}", out.version, out.nodes_added, out.edges_added),
            Err(err) => println!("rejected: {err}"),
        }
    }
    println!("{}", serde_json::to_string(&g.stats())?);

    let mut replayed = original;
    replay(&mut replayed, AuditLog::open(log.path())?.entries())?;
    println!("replay byte-identical: {}", replayed.to_bytes() == g.to_bytes());
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

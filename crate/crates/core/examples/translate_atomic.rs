//! Placeholder replacement and joint translation of KB triples with a
//! mock client that uppercases its input.
//!
//! cargo run -p dialogkg --example translate_atomic

use dialogkg::kb::{apply_replacements, default_connectors, default_rules, invert_replacements, joint_translate, FnClient, Relation};

fn main() -> dialogkg::Result<()> {
    let rules = default_rules();
    for head in ["PersonX hurts PersonX", "PersonX votes for personY", "PersonX borrows PersonY's car", "PersonX gets ___ as a pet"] {
        let (replaced, log) = apply_replacements(head, &rules);
        assert_eq!(invert_replacements(&replaced, &log), head);
        println!("{head:<32} => {replaced}");
    }

    let upper = FnClient(|s: &str| Ok(s.to_uppercase()));
    let connectors = default_connectors();
    let (head, _) = apply_replacements("PersonX washes PersonX's car", &rules);
    let t = joint_translate(&head, Relation::XWant, "to go for a drive", &connectors, &upper)?;
    println!("joint: ({}, {}, {}) split_failed={}", t.head, t.relation, t.tail, t.split_failed);

    let lossy = FnClient(|s: &str| Ok(s.replace('⟦', "[").replace('⟧', "]").to_uppercase()));
    let t = joint_translate(&head, Relation::XWant, "to go for a drive", &connectors, &lossy)?;
    println!("mangled connector still splits: {} | {}", t.head, t.tail);
    Ok(())
}

//! Links extracted mentions to KB heads by cosine similarity over a
//! vector file, and shows how the threshold trades recall for precision.
//!
//! cargo run -p dialogkg --example link_mentions

use std::path::PathBuf;

use dialogkg::corpus::read_conllu;
use dialogkg::extract::{extract_events, ExtractorConfig};
use dialogkg::kb::{load_kb, HeadLevel};
use dialogkg::link::{export_finetune_pairs, link_mentions, Linker, VectorTable};

fn main() -> dialogkg::Result<()> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let kb = load_kb(fixtures.join("kb.tsv"))?;
    let table = VectorTable::load(fixtures.join("vectors.txt"))?;
    let linker = Linker::for_level(&kb, HeadLevel::Event, &table)?;
    let cfg = ExtractorConfig::default();
    let mentions: Vec<_> = read_conllu(fixtures.join("campus.conllu"))?.iter().flat_map(|p| extract_events(p, &cfg)).collect();

    for threshold in [0.5, 0.7, 0.9] {
        let matches = link_mentions(&mentions, &linker, &table, threshold)?;
        println!("threshold {threshold}: {} of {} mentions linked", matches.len(), mentions.len());
        for m in &matches {
            println!("  {:<12} -> {:<8} {:.3}  ({})", m.mention.text, m.head_id, m.score, m.head_text);
        }
    }
    let all = link_mentions(&mentions, &linker, &table, 0.0)?;
    for pair in export_finetune_pairs(&all, 2, 7)? {
        println!("to label: {} | {}", pair.mention, pair.head);
    }
    Ok(())
}

//! Compares extraction methods by how well their mentions match KB heads
//! across similarity thresholds.
//!
//! cargo run -p dialogkg --example matching_eval

use std::path::PathBuf;

use dialogkg::corpus::read_conllu;
use dialogkg::eval::{matching_report, sample_utterances};
use dialogkg::extract::{ExtractorConfig, Method};
use dialogkg::kb::{HeadLevel, Kb};
use dialogkg::link::{HashingProvider, Linker};

fn main() -> dialogkg::Result<()> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    // Head texts in the corpus language, so surface overlap drives similarity.
    let mut kb = Kb::new();
    for (id, text) in [("urge", "催促商家"), ("study", "学习节奏很快"), ("college", "进大学"), ("relax", "放松一下")] {
        kb.add_head(id, text, HeadLevel::Event)?;
    }
    // Character n-gram hashing covers any mention text, unlike a fixed vector table.
    let table = HashingProvider::default();
    let linker = Linker::for_level(&kb, HeadLevel::Event, &table)?;
    let pool = read_conllu(fixtures.join("campus.conllu"))?;
    let sample = sample_utterances(&pool, 100, 7);

    println!("{:<8} {:>9} {:>8} {:>8} {:>8}", "method", "threshold", "avg_sim", "per_utt", "avg_num");
    for method in [Method::Parsing, Method::PosTemplate, Method::Simple] {
        for t in [0.2, 0.4, 0.6] {
            let r = matching_report(&sample, method, &ExtractorConfig::default(), &linker, &table, t)?;
            println!(
                "{:<8} {:>9.1} {:>8.3} {:>8.3} {:>8.3}",
                method.to_string(),
                t,
                r.avg_similarity,
                r.avg_similarity_per_utterance,
                r.avg_number
            );
        }
    }
    Ok(())
}

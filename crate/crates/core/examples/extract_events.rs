//! Event mentions from dependency-parsed utterances, by each method.
//!
//! cargo run -p dialogkg --example extract_events

use std::path::PathBuf;

use dialogkg::corpus::read_conllu;
use dialogkg::extract::{extract_with, ExtractorConfig, Method};

fn main() -> dialogkg::Result<()> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/golden.conllu");
    let parses = read_conllu(path)?;
    let cfg = ExtractorConfig::default();
    for p in &parses {
        println!("{}", p.text());
        for method in [Method::Parsing, Method::PosTemplate, Method::Simple] {
            let texts: Vec<String> = extract_with(method, p, &cfg).into_iter().map(|m| m.text).collect();
            println!("  {:<12} {texts:?}", method.to_string());
        }
    }
    Ok(())
}

//! Builds knowledge-grounded emotion and intent instances and scores the
//! reference classifiers in every input mode.
//!
//! cargo run -p dialogkg --example graph_tasks

use std::path::PathBuf;

use dialogkg::corpus::{index_parses, load_corpus, read_conllu};
use dialogkg::edges::TailIdentity;
use dialogkg::extract::ExtractorConfig;
use dialogkg::graph::assemble;
use dialogkg::kb::{load_kb, HeadLevel};
use dialogkg::link::{HashingProvider, Linker, VectorTable};
use dialogkg::tasks::{
    assemble_input, build_instances, evaluate_task, ConstantClassifier, InputMode, NearestCentroidClassifier, OracleClassifier,
    SamplingConfig, Task,
};

fn main() -> dialogkg::Result<()> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let kb = load_kb(fixtures.join("kb.tsv"))?;
    let graph = assemble(&kb, &[], TailIdentity::Global)?;
    let corpus = load_corpus(fixtures.join("corpus.jsonl"))?;
    let parses = index_parses(read_conllu(fixtures.join("campus.conllu"))?);
    let table = VectorTable::load(fixtures.join("vectors.txt"))?;
    let linker = Linker::for_level(&kb, HeadLevel::Event, &table)?;
    let sampling = SamplingConfig { threshold: 0.5, per_relation: 2 };
    let hashing = HashingProvider::default();

    for task in [Task::Emotion, Task::Intent] {
        let instances = build_instances(task, &corpus, &parses, &graph, &linker, &table, &ExtractorConfig::default(), sampling)?;
        if let Some(i) = instances.iter().find(|i| !i.knowledge.is_empty()) {
            println!("{task:?} sample input: {}", assemble_input(i, InputMode::KnowledgeHistory));
        }
        for mode in InputMode::ALL {
            let oracle = evaluate_task(&instances, &OracleClassifier::fit(&instances, mode), mode)?;
            let centroid = evaluate_task(&instances, &NearestCentroidClassifier::fit(&instances, mode, &hashing)?, mode)?;
            let constant = evaluate_task(&instances, &ConstantClassifier("other".into()), mode)?;
            println!("  {task:?}/{mode:?}: oracle {oracle:.2}  centroid {centroid:.2}  constant {constant:.2}");
        }
    }
    Ok(())
}

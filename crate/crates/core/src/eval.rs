//! Comparison of extraction methods by how well their mentions match KB heads.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::ParsedUtterance;
use crate::error::{Error, Result};
use crate::extract::{extract_with, ExtractorConfig, Method};
use crate::link::{EmbeddingProvider, Linker};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingReport {
    pub method: Method,
    pub threshold: f64,
    /// Mean best-match score over all mentions.
    pub avg_similarity: f64,
    /// Mean over utterances with at least one mention of their mean score.
    pub avg_similarity_per_utterance: f64,
    /// Mean over utterances of distinct heads matched at `threshold`.
    pub avg_number: f64,
    pub utterance_count: usize,
    pub mention_count: usize,
    pub seed: Option<u64>,
}

struct UtteranceScores {
    scores: Vec<f64>,
    matched: usize,
}

fn score_utterance(
    utt: &ParsedUtterance,
    method: Method,
    cfg: &ExtractorConfig,
    linker: &Linker,
    provider: &dyn EmbeddingProvider,
    threshold: f64,
) -> Result<UtteranceScores> {
    let mentions = extract_with(method, utt, cfg);
    if mentions.is_empty() {
        return Ok(UtteranceScores { scores: Vec::new(), matched: 0 });
    }
    let texts: Vec<&str> = mentions.iter().map(|m| m.text.as_str()).collect();
    let mut scores = Vec::with_capacity(texts.len());
    let mut heads = BTreeSet::new();
    for v in provider.embed(&texts)? {
        if let Some((h, s)) = linker.best(&v)? {
            scores.push(s);
            if s >= threshold {
                heads.insert(h.id.clone());
            }
        }
    }
    Ok(UtteranceScores { scores, matched: heads.len() })
}

/// Runs `method` over the sample and links every mention to its best head.
pub fn matching_report(
    utterances: &[&ParsedUtterance],
    method: Method,
    cfg: &ExtractorConfig,
    linker: &Linker,
    provider: &dyn EmbeddingProvider,
    threshold: f64,
) -> Result<MatchingReport> {
    if utterances.is_empty() {
        return Err(Error::Empty("utterance sample"));
    }
    let per: Vec<UtteranceScores> = utterances
        .par_iter()
        .map(|u| score_utterance(u, method, cfg, linker, provider, threshold))
        .collect::<Result<_>>()?;
    let mention_count: usize = per.iter().map(|p| p.scores.len()).sum();
    let total: f64 = per.iter().flat_map(|p| &p.scores).sum();
    let with_mentions: Vec<f64> =
        per.iter().filter(|p| !p.scores.is_empty()).map(|p| p.scores.iter().sum::<f64>() / p.scores.len() as f64).collect();
    let mean = |xs: &[f64]| if xs.is_empty() { 0.0 } else { xs.iter().sum::<f64>() / xs.len() as f64 };
    Ok(MatchingReport {
        method,
        threshold,
        avg_similarity: if mention_count == 0 { 0.0 } else { total / mention_count as f64 },
        avg_similarity_per_utterance: mean(&with_mentions),
        avg_number: per.iter().map(|p| p.matched as f64).sum::<f64>() / per.len() as f64,
        utterance_count: per.len(),
        mention_count,
        seed: None,
    })
}

/// Seeded sample of `n` utterances without replacement (all when `n`
/// exceeds the pool), in sampled order.
pub fn sample_utterances(pool: &[ParsedUtterance], n: usize, seed: u64) -> Vec<&ParsedUtterance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pool.choose_multiple(&mut rng, n.min(pool.len())).collect()
}

//! Linking mentions to KB heads by embedding cosine similarity.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::ParsedUtterance;
use crate::error::{ClientError, Error, Result};
use crate::extract::{concept_mentions, EventMention};
use crate::kb::{Head, HeadLevel, Kb};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("embedding vector"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("embedding vector", "non-finite component"));
        }
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.iter().map(|v| v * factor).collect())
    }
}

pub fn cosine(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    let dot: f64 = a.0.iter().zip(&b.0).map(|(x, y)| x * y).sum();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

pub trait EmbeddingProvider: Send + Sync {
    fn dim(&self) -> usize;
    fn embed(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>>;

    fn embed_one(&self, text: &str) -> Result<EmbeddingVector> {
        Ok(self.embed(&[text])?.remove(0))
    }
}

/// Fixed text → vector table, typically read from a vector file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VectorTable {
    dim: usize,
    vectors: HashMap<String, EmbeddingVector>,
}

impl VectorTable {
    pub fn new(dim: usize) -> Self {
        Self { dim, vectors: HashMap::new() }
    }

    pub fn insert(&mut self, key: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let v = EmbeddingVector::new(values)?;
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: v.dim() });
        }
        self.vectors.insert(key.into(), v);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read(crate::io::open_reader(path)?)
    }

    /// Reads `dim N` followed by `key<TAB>v1 v2 ... vN` lines.
    pub fn read(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let dim = loop {
            let Some((i, line)) = lines.next() else { return Err(Error::Syntax { line: 1, message: "missing `dim N` header".into() }) };
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let n = line
                .trim()
                .strip_prefix("dim")
                .and_then(|n| n.trim().parse::<usize>().ok())
                .filter(|&n| n > 0)
                .ok_or_else(|| Error::Syntax { line: i + 1, message: format!("expected `dim N` header, got `{line}`") })?;
            break n;
        };
        let mut table = Self::new(dim);
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (key, values) = line
                .split_once('\t')
                .ok_or_else(|| Error::Syntax { line: i + 1, message: "expected key<TAB>values".into() })?;
            let values: Vec<f64> = values
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Syntax { line: i + 1, message: format!("bad component: {e}") })?;
            if values.len() != dim {
                return Err(Error::Syntax { line: i + 1, message: format!("expected {dim} components, found {}", values.len()) });
            }
            table.insert(key, values).map_err(|e| Error::Syntax { line: i + 1, message: e.to_string() })?;
        }
        Ok(table)
    }

    pub fn write(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "dim {}", self.dim)?;
        let mut keys: Vec<&String> = self.vectors.keys().collect();
        keys.sort();
        for k in keys {
            let vals: Vec<String> = self.vectors[k].values().iter().map(|v| v.to_string()).collect();
            writeln!(out, "{k}\t{}", vals.join(" "))?;
        }
        Ok(())
    }
}

impl EmbeddingProvider for VectorTable {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>> {
        texts
            .iter()
            .map(|t| self.vectors.get(*t).cloned().ok_or_else(|| Error::MissingVector(t.to_string())))
            .collect()
    }
}

/// Deterministic bag of character unigrams and bigrams hashed into `dim`
/// buckets. Identical texts get identical vectors; overlapping texts get
/// positive similarity. No model required.
#[derive(Debug, Clone, Copy)]
pub struct HashingProvider {
    pub dim: usize,
}

impl Default for HashingProvider {
    fn default() -> Self {
        Self { dim: 256 }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

impl HashingProvider {
    pub fn vector(&self, text: &str) -> Result<EmbeddingVector> {
        let chars: Vec<char> = text.to_lowercase().chars().filter(|c| !c.is_whitespace()).collect();
        if chars.is_empty() {
            return Err(Error::Empty("text to embed"));
        }
        let mut v = vec![0.0; self.dim];
        let mut buf = [0u8; 8];
        for (i, c) in chars.iter().enumerate() {
            v[(fnv1a(c.encode_utf8(&mut buf).as_bytes()) % self.dim as u64) as usize] += 1.0;
            if let Some(next) = chars.get(i + 1) {
                let bigram: String = [*c, *next].iter().collect();
                v[(fnv1a(bigram.as_bytes()) % self.dim as u64) as usize] += 0.5;
            }
        }
        EmbeddingVector::new(v)
    }
}

impl EmbeddingProvider for HashingProvider {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>> {
        texts.iter().map(|t| self.vector(t)).collect()
    }
}

/// Client for an embedding service speaking `POST {texts}` → `{vectors}`.
pub struct HttpEmbeddingProvider {
    endpoint: String,
    token: Option<String>,
    dim: usize,
    http: reqwest::blocking::Client,
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [&'a str],
}

#[derive(Deserialize)]
struct EmbedResponse {
    vectors: Vec<Vec<f64>>,
}

impl HttpEmbeddingProvider {
    pub fn new(endpoint: impl Into<String>, dim: usize, token: Option<String>) -> Result<Self> {
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(60))
            .build()
            .map_err(|e| Error::invalid("http client", e.to_string()))?;
        Ok(Self { endpoint: endpoint.into(), token, dim, http })
    }
}

impl EmbeddingProvider for HttpEmbeddingProvider {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>> {
        const SERVICE: &str = "embedding";
        let mut req = self.http.post(&self.endpoint).json(&EmbedRequest { texts });
        if let Some(token) = &self.token {
            req = req.bearer_auth(token);
        }
        let resp = req.send().map_err(|e| ClientError::retriable(SERVICE, e.to_string()))?;
        let status = resp.status();
        if status.is_server_error() || status.as_u16() == 429 {
            return Err(ClientError::retriable(SERVICE, format!("status {status}")).into());
        }
        if !status.is_success() {
            return Err(ClientError::fatal(SERVICE, format!("status {status}")).into());
        }
        let body: EmbedResponse = resp.json().map_err(|e| ClientError::fatal(SERVICE, format!("bad response body: {e}")))?;
        if body.vectors.len() != texts.len() {
            return Err(ClientError::fatal(SERVICE, format!("{} vectors for {} texts", body.vectors.len(), texts.len())).into());
        }
        body.vectors
            .into_iter()
            .map(|v| {
                let v = EmbeddingVector::new(v)?;
                if v.dim() != self.dim {
                    return Err(Error::DimensionMismatch { left: self.dim, right: v.dim() });
                }
                Ok(v)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MentionHeadMatch {
    pub mention: EventMention,
    pub head_id: String,
    pub head_text: String,
    pub score: f64,
}

/// Pre-embedded candidate heads, sorted by id so that score ties resolve to
/// the lexicographically smallest id.
pub struct Linker {
    heads: Vec<Head>,
    vectors: Vec<EmbeddingVector>,
}

impl Linker {
    pub fn new<'a>(heads: impl IntoIterator<Item = &'a Head>, provider: &dyn EmbeddingProvider) -> Result<Self> {
        let mut heads: Vec<Head> = heads.into_iter().cloned().collect();
        heads.sort_by(|a, b| a.id.cmp(&b.id));
        let texts: Vec<&str> = heads.iter().map(|h| h.text.as_str()).collect();
        let vectors = if texts.is_empty() { Vec::new() } else { provider.embed(&texts)? };
        Ok(Self { heads, vectors })
    }

    pub fn for_level(kb: &Kb, level: HeadLevel, provider: &dyn EmbeddingProvider) -> Result<Self> {
        Self::new(kb.heads_at(level), provider)
    }

    pub fn heads(&self) -> &[Head] {
        &self.heads
    }

    pub fn scores(&self, query: &EmbeddingVector) -> Result<Vec<f64>> {
        self.vectors.iter().map(|v| cosine(query, v)).collect()
    }

    /// Highest-scoring head regardless of threshold.
    pub fn best(&self, query: &EmbeddingVector) -> Result<Option<(&Head, f64)>> {
        let mut best: Option<(usize, f64)> = None;
        for (i, v) in self.vectors.iter().enumerate() {
            let s = cosine(query, v)?;
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((i, s));
            }
        }
        Ok(best.map(|(i, s)| (&self.heads[i], s)))
    }

    fn to_match(&self, m: &EventMention, query: &EmbeddingVector, threshold: f64) -> Result<Option<MentionHeadMatch>> {
        Ok(self.best(query)?.filter(|(_, s)| *s >= threshold).map(|(h, s)| MentionHeadMatch {
            mention: m.clone(),
            head_id: h.id.clone(),
            head_text: h.text.clone(),
            score: s,
        }))
    }
}

/// Best head for `m` when its cosine score reaches `threshold`.
pub fn link_mention(m: &EventMention, linker: &Linker, provider: &dyn EmbeddingProvider, threshold: f64) -> Result<Option<MentionHeadMatch>> {
    let q = provider.embed_one(&m.text)?;
    linker.to_match(m, &q, threshold)
}

/// Links a batch of mentions with one provider call. Output keeps input order.
pub fn link_mentions(mentions: &[EventMention], linker: &Linker, provider: &dyn EmbeddingProvider, threshold: f64) -> Result<Vec<MentionHeadMatch>> {
    if mentions.is_empty() {
        return Ok(Vec::new());
    }
    let texts: Vec<&str> = mentions.iter().map(|m| m.text.as_str()).collect();
    let vectors = provider.embed(&texts)?;
    let linked: Vec<Option<MentionHeadMatch>> = mentions
        .par_iter()
        .zip(vectors.par_iter())
        .map(|(m, v)| linker.to_match(m, v, threshold))
        .collect::<Result<_>>()?;
    Ok(linked.into_iter().flatten().collect())
}

/// Matches every v/n/a token of `utt` against entity-level heads.
pub fn link_concepts(utt: &ParsedUtterance, entity_linker: &Linker, provider: &dyn EmbeddingProvider, threshold: f64) -> Result<Vec<MentionHeadMatch>> {
    link_mentions(&concept_mentions(utt), entity_linker, provider, threshold)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinetunePair {
    pub mention: String,
    pub head: String,
    /// Left empty for a human annotator to fill with 0 or 1.
    pub label: Option<u8>,
}

/// Uniform sample of `k` matches without replacement, in seeded shuffle order.
pub fn export_finetune_pairs(matches: &[MentionHeadMatch], k: usize, seed: u64) -> Result<Vec<FinetunePair>> {
    if k > matches.len() {
        return Err(Error::invalid("sample size", format!("k = {k} exceeds {} matches", matches.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(matches
        .choose_multiple(&mut rng, k)
        .map(|m| FinetunePair { mention: m.mention.text.clone(), head: m.head_text.clone(), label: None })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{Method, MentionSource};

    fn v(x: &[f64]) -> EmbeddingVector {
        EmbeddingVector::new(x.to_vec()).unwrap()
    }

    pub(crate) fn mention(text: &str) -> EventMention {
        EventMention {
            text: text.into(),
            source: MentionSource { conversation: "c".into(), utterance: 0, sub_utterance: 0 },
            driver: None,
            method: Method::Simple,
            seed: None,
            tokens: vec![],
        }
    }

    fn head(id: &str, text: &str) -> Head {
        Head { id: id.into(), text: text.into(), level: HeadLevel::Event }
    }

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine(&v(&[1.0, 0.0]), &v(&[1.0, 0.0])).unwrap(), 1.0);
        assert_eq!(cosine(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap(), 0.0);
        // 32 / (sqrt(14) * sqrt(77))
        let c = cosine(&v(&[1.0, 2.0, 3.0]), &v(&[4.0, 5.0, 6.0])).unwrap();
        assert!((c - 0.974632).abs() < 1e-6);
    }

    #[test]
    fn cosine_errors() {
        assert!(matches!(cosine(&v(&[1.0]), &v(&[1.0, 0.0])), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(cosine(&v(&[0.0, 0.0]), &v(&[1.0, 0.0])), Err(Error::ZeroVector)));
        assert!(EmbeddingVector::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn identical_text_links_with_score_one() {
        let p = HashingProvider::default();
        let heads = [head("h1", "有人睡不着")];
        let linker = Linker::new(&heads, &p).unwrap();
        let m = link_mention(&mention("有人睡不着"), &linker, &p, 0.7).unwrap().unwrap();
        assert_eq!(m.head_id, "h1");
        assert!((m.score - 1.0).abs() < 1e-12);
    }

    #[test]
    fn below_threshold_is_none() {
        let mut t = VectorTable::new(2);
        t.insert("q", vec![1.0, 0.0]).unwrap();
        t.insert("a", vec![0.6, 0.8]).unwrap();
        t.insert("b", vec![0.0, 1.0]).unwrap();
        let heads = [head("h1", "a"), head("h2", "b")];
        let linker = Linker::new(&heads, &t).unwrap();
        assert!(link_mention(&mention("q"), &linker, &t, 0.7).unwrap().is_none());
        assert_eq!(link_mention(&mention("q"), &linker, &t, 0.5).unwrap().unwrap().head_id, "h1");
    }

    #[test]
    fn ties_go_to_smallest_id() {
        let mut t = VectorTable::new(2);
        t.insert("q", vec![1.0, 0.0]).unwrap();
        t.insert("same", vec![2.0, 0.0]).unwrap();
        let heads = [head("z", "same"), head("b", "same"), head("m", "same")];
        let linker = Linker::new(&heads, &t).unwrap();
        assert_eq!(link_mention(&mention("q"), &linker, &t, 0.0).unwrap().unwrap().head_id, "b");
    }

    #[test]
    fn vector_file_round_trip() {
        let text = "dim 3\n睡不着\t0.1 0.2 0.3\nhappy\t1 0 0\n";
        let t = VectorTable::read(text.as_bytes()).unwrap();
        assert_eq!(t.len(), 2);
        let mut buf = Vec::new();
        t.write(&mut buf).unwrap();
        assert_eq!(VectorTable::read(buf.as_slice()).unwrap(), t);
        assert!(VectorTable::read("dim 2\nx\t1 2 3\n".as_bytes()).is_err());
        assert!(VectorTable::read("x\t1 2\n".as_bytes()).is_err());
        assert!(matches!(t.embed(&["missing"]), Err(Error::MissingVector(_))));
    }

    fn matches(n: usize) -> Vec<MentionHeadMatch> {
        (0..n)
            .map(|i| MentionHeadMatch { mention: mention(&format!("m{i}")), head_id: format!("h{i}"), head_text: format!("head {i}"), score: 0.9 })
            .collect()
    }

    #[test]
    fn finetune_sampling() {
        let ms = matches(100);
        let a = export_finetune_pairs(&ms, 10, 7).unwrap();
        let b = export_finetune_pairs(&ms, 10, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
        assert!(a.iter().all(|p| p.label.is_none()));
        let uniq: std::collections::BTreeSet<_> = a.iter().map(|p| &p.mention).collect();
        assert_eq!(uniq.len(), 10);
        assert!(export_finetune_pairs(&ms, 0, 1).unwrap().is_empty());
        let all = export_finetune_pairs(&ms[..5], 5, 3).unwrap();
        let mut names: Vec<_> = all.iter().map(|p| p.mention.clone()).collect();
        names.sort();
        assert_eq!(names, vec!["m0", "m1", "m2", "m3", "m4"]);
        assert!(export_finetune_pairs(&ms[..5], 6, 3).is_err());
    }
}

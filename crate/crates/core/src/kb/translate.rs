//! Joint head+tail translation around a pluggable translation client.

use std::collections::HashMap;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{apply_replacements, Kb, KbTriple, Relation, ReplacementRule};
use crate::error::{ClientError, Error, Result};

pub trait TranslationClient: Send + Sync {
    fn translate(&self, text: &str) -> Result<String, ClientError>;
}

/// Returns its input unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityClient;

impl TranslationClient for IdentityClient {
    fn translate(&self, text: &str) -> Result<String, ClientError> {
        Ok(text.to_string())
    }
}

/// Exact-match lookup table; unknown inputs pass through unchanged.
#[derive(Debug, Clone, Default)]
pub struct TableClient {
    pub table: HashMap<String, String>,
}

impl TableClient {
    pub fn new(pairs: impl IntoIterator<Item = (impl Into<String>, impl Into<String>)>) -> Self {
        Self { table: pairs.into_iter().map(|(a, b)| (a.into(), b.into())).collect() }
    }
}

impl TranslationClient for TableClient {
    fn translate(&self, text: &str) -> Result<String, ClientError> {
        Ok(self.table.get(text).cloned().unwrap_or_else(|| text.to_string()))
    }
}

/// Wraps a closure, mostly for tests.
pub struct FnClient<F>(pub F);

impl<F> TranslationClient for FnClient<F>
where
    F: Fn(&str) -> Result<String, ClientError> + Send + Sync,
{
    fn translate(&self, text: &str) -> Result<String, ClientError> {
        (self.0)(text)
    }
}

/// Client for a translation service speaking `POST {text}` → `{translation}`.
pub struct HttpTranslationClient {
    endpoint: String,
    token: Option<String>,
    http: reqwest::blocking::Client,
}

#[derive(Serialize)]
struct TranslateRequest<'a> {
    text: &'a str,
}

#[derive(Deserialize)]
struct TranslateResponse {
    translation: String,
}

impl HttpTranslationClient {
    pub fn new(endpoint: impl Into<String>, token: Option<String>) -> Result<Self> {
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(30))
            .build()
            .map_err(|e| Error::invalid("http client", e.to_string()))?;
        Ok(Self { endpoint: endpoint.into(), token, http })
    }

    /// Reads the bearer token from the named environment variable, if set.
    pub fn from_env(endpoint: impl Into<String>, token_var: &str) -> Result<Self> {
        Self::new(endpoint, std::env::var(token_var).ok())
    }
}

impl TranslationClient for HttpTranslationClient {
    fn translate(&self, text: &str) -> Result<String, ClientError> {
        const SERVICE: &str = "translation";
        let mut req = self.http.post(&self.endpoint).json(&TranslateRequest { text });
        if let Some(token) = &self.token {
            req = req.bearer_auth(token);
        }
        let resp = req.send().map_err(|e| ClientError::retriable(SERVICE, e.to_string()))?;
        let status = resp.status();
        if status.is_server_error() || status.as_u16() == 429 {
            return Err(ClientError::retriable(SERVICE, format!("status {status}")));
        }
        if !status.is_success() {
            return Err(ClientError::fatal(SERVICE, format!("status {status}")));
        }
        resp.json::<TranslateResponse>()
            .map(|r| r.translation)
            .map_err(|e| ClientError::fatal(SERVICE, format!("bad response body: {e}")))
    }
}

pub type ConnectorMap = HashMap<Relation, String>;

/// Bracketed markers that translation services tend to copy through verbatim.
pub fn default_connectors() -> ConnectorMap {
    Relation::ALL
        .into_iter()
        .map(|r| (r, format!(" ⟦{}⟧ ", r.name().to_ascii_uppercase())))
        .collect()
}

/// English connecting phrases, for comparing against the bracketed markers.
pub fn natural_connectors() -> ConnectorMap {
    use Relation::*;
    [
        (XIntent, " because they wanted "),
        (XNeed, " but before that needed "),
        (XAttr, " and is seen as "),
        (XReact, " and then feels "),
        (XWant, " and then wants "),
        (XEffect, " and as a result "),
        (OReact, " and others feel "),
        (OWant, " and others want "),
        (OEffect, " and then others "),
        (IsAfter, " after "),
        (IsBefore, " before "),
    ]
    .into_iter()
    .map(|(r, s)| (r, s.to_string()))
    .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslatedTriple {
    pub head: String,
    pub relation: Relation,
    pub tail: String,
    /// The translated connector was not found, so head and tail were
    /// translated separately.
    pub split_failed: bool,
}

fn split_on<'a>(text: &'a str, sep: &str) -> Option<(&'a str, &'a str)> {
    if sep.is_empty() {
        return None;
    }
    let (h, t) = text.split_once(sep)?;
    (!h.is_empty() && !t.is_empty()).then_some((h, t))
}

/// Translates `head + connector + tail` as one sentence and splits the
/// result on the translated connector.
pub fn joint_translate(
    head: &str,
    relation: Relation,
    tail: &str,
    connectors: &ConnectorMap,
    client: &dyn TranslationClient,
) -> Result<TranslatedTriple> {
    let connector = connectors
        .get(&relation)
        .ok_or_else(|| Error::invalid("connector map", format!("no connector for {relation}")))?;
    let sentence = format!("{head}{connector}{tail}");
    let translated = client.translate(&sentence)?;
    let connector_tr = client.translate(connector)?;

    let exact = split_on(&translated, &connector_tr).map(|(h, t)| (h.to_string(), t.to_string()));
    let loose = || {
        split_on(&translated, connector_tr.trim())
            .map(|(h, t)| (h.trim().to_string(), t.trim().to_string()))
            .filter(|(h, t)| !h.is_empty() && !t.is_empty())
    };
    match exact.or_else(loose) {
        Some((h, t)) => Ok(TranslatedTriple { head: h, relation, tail: t, split_failed: false }),
        None => Ok(TranslatedTriple {
            head: client.translate(head)?,
            relation,
            tail: client.translate(tail)?,
            split_failed: true,
        }),
    }
}

/// Replaces placeholders and jointly translates every triple. Calls run in
/// parallel; output follows `kb.triples()` order.
pub fn translate_triples(
    kb: &Kb,
    rules: &[ReplacementRule],
    connectors: &ConnectorMap,
    client: &dyn TranslationClient,
) -> Vec<Result<TranslatedTriple>> {
    kb.triples()
        .par_iter()
        .map(|t: &KbTriple| {
            let head = kb.head(&t.head).map(|h| h.text.as_str()).unwrap_or_default();
            let (head, _) = apply_replacements(head, rules);
            let (tail, _) = apply_replacements(&t.tail, rules);
            joint_translate(&head, t.relation, &tail, connectors, client)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QualityLabel {
    pub triple_id: String,
    pub fluency: u8,
    pub logic: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub fluency: f64,
    pub logic: f64,
    pub count: usize,
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// Mean binary fluency and logic scores, rounded to 3 decimals.
pub fn translation_quality_report(labels: &[QualityLabel]) -> Result<QualityReport> {
    if labels.is_empty() {
        return Err(Error::Empty("quality label set"));
    }
    if let Some(bad) = labels.iter().find(|l| l.fluency > 1 || l.logic > 1) {
        return Err(Error::invalid("quality label", format!("`{}` scores must be 0 or 1", bad.triple_id)));
    }
    let n = labels.len() as f64;
    let fluency = labels.iter().map(|l| f64::from(l.fluency)).sum::<f64>() / n;
    let logic = labels.iter().map(|l| f64::from(l.logic)).sum::<f64>() / n;
    Ok(QualityReport { fluency: round3(fluency), logic: round3(logic), count: labels.len() })
}

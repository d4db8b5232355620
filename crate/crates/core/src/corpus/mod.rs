//! Annotated conversation corpus: scenario records, two-party conversations
//! with per-utterance emotion/intent/cause annotations, and the companion
//! dependency parses.
//!
//! The corpus file holds one JSON record per line. A record with an
//! `utterances` array is a conversation; a record with `topic` and
//! `description` is a scenario.

mod parse;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::labels::{EmotionLabel, IntentLabel};

pub use parse::{
    read_conllu, read_conllu_str, validate_parse_alignment, write_conllu, AlignmentReport,
    ParseMismatch, ParsedUtterance, SubUtterance, Token,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub topic: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    #[serde(skip)]
    pub index: usize,
    pub speaker: String,
    pub text: String,
    #[serde(default)]
    pub emotion: EmotionLabel,
    #[serde(default)]
    pub intent: IntentLabel,
    /// Byte ranges into `text`; always on UTF-8 character boundaries.
    #[serde(default, with = "span_serde")]
    pub cause_spans: Vec<Range<usize>>,
}

impl Utterance {
    pub fn cause_texts(&self) -> impl Iterator<Item = &str> {
        self.cause_spans.iter().map(|r| &self.text[r.clone()])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conversation {
    pub id: String,
    pub scenario_id: String,
    pub utterances: Vec<Utterance>,
}

/// A loaded, validated corpus. Immutable after loading.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub scenarios: Vec<Scenario>,
    pub conversations: Vec<Conversation>,
}

impl Corpus {
    pub fn conversation(&self, id: &str) -> Option<&Conversation> {
        self.conversations.iter().find(|c| c.id == id)
    }

    pub fn scenario(&self, id: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.id == id)
    }

    pub fn utterance_count(&self) -> usize {
        self.conversations.iter().map(|c| c.utterances.len()).sum()
    }
}

mod span_serde {
    use std::ops::Range;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(spans: &[Range<usize>], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[usize; 2]> = spans.iter().map(|r| [r.start, r.end]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Range<usize>>, D::Error> {
        let pairs = Vec::<[usize; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[a, b]| a..b).collect())
    }
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let file = File::open(path)?;
    read_corpus(BufReader::new(file))
}

pub fn read_corpus(reader: impl BufRead) -> Result<Corpus> {
    let mut corpus = Corpus::default();
    let mut conversation_lines = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(trimmed).map_err(|e| Error::Syntax {
            line: line_no,
            message: format!("malformed record: {e}"),
        })?;
        let Value::Object(obj) = value else {
            return Err(Error::record(line_no, "<record>", "expected a JSON object"));
        };
        if obj.contains_key("utterances") {
            corpus.conversations.push(conversation_from(&obj, line_no)?);
            conversation_lines.push(line_no);
        } else if obj.contains_key("topic") || obj.contains_key("description") {
            corpus.scenarios.push(scenario_from(&obj, line_no)?);
        } else {
            return Err(Error::record(line_no, "utterances", "record is neither a conversation nor a scenario"));
        }
    }

    let mut seen = HashSet::new();
    for s in &corpus.scenarios {
        if !seen.insert(s.id.as_str()) {
            return Err(Error::invalid("corpus", format!("duplicate scenario id `{}`", s.id)));
        }
    }
    let mut seen = HashSet::new();
    for (c, line) in corpus.conversations.iter().zip(&conversation_lines) {
        if !seen.insert(c.id.as_str()) {
            return Err(Error::record(*line, "id", format!("duplicate conversation id `{}`", c.id)));
        }
        if !corpus.scenarios.is_empty() && corpus.scenario(&c.scenario_id).is_none() {
            return Err(Error::record(*line, "scenario_id", format!("unknown scenario `{}`", c.scenario_id)));
        }
    }
    Ok(corpus)
}

/// Writes scenarios first, then conversations, one record per line.
pub fn write_corpus(corpus: &Corpus, mut out: impl Write) -> Result<()> {
    for s in &corpus.scenarios {
        serde_json::to_writer(&mut out, s)?;
        out.write_all(b"\n")?;
    }
    for c in &corpus.conversations {
        serde_json::to_writer(&mut out, c)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn str_field(obj: &Map<String, Value>, key: &str, field: &str, line: usize) -> Result<String> {
    match obj.get(key) {
        Some(Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(Error::record(line, field, "expected a string")),
        None => Err(Error::record(line, field, "missing")),
    }
}

fn scenario_from(obj: &Map<String, Value>, line: usize) -> Result<Scenario> {
    let scenario = Scenario {
        id: str_field(obj, "id", "id", line)?,
        topic: str_field(obj, "topic", "topic", line)?,
        description: str_field(obj, "description", "description", line)?,
    };
    if scenario.description.trim().is_empty() {
        return Err(Error::record(line, "description", "must not be empty"));
    }
    Ok(scenario)
}

fn conversation_from(obj: &Map<String, Value>, line: usize) -> Result<Conversation> {
    let id = str_field(obj, "id", "id", line)?;
    let scenario_id = str_field(obj, "scenario_id", "scenario_id", line)?;
    let Some(Value::Array(raw)) = obj.get("utterances") else {
        return Err(Error::record(line, "utterances", "expected an array"));
    };

    let mut utterances = Vec::with_capacity(raw.len());
    for (index, u) in raw.iter().enumerate() {
        let field = |name: &str| format!("utterances[{index}].{name}");
        let Value::Object(u) = u else {
            return Err(Error::record(line, format!("utterances[{index}]"), "expected an object"));
        };
        let speaker = str_field(u, "speaker", &field("speaker"), line)?;
        let text = str_field(u, "text", &field("text"), line)?;
        let emotion = match u.get("emotion") {
            None | Some(Value::Null) => EmotionLabel::Other,
            Some(Value::String(s)) => s
                .parse()
                .map_err(|e: crate::labels::UnknownLabel| Error::record(line, field("emotion"), e.to_string()))?,
            Some(_) => return Err(Error::record(line, field("emotion"), "expected a string")),
        };
        let intent = match u.get("intent") {
            None | Some(Value::Null) => IntentLabel::Other,
            Some(Value::String(s)) => s
                .parse()
                .map_err(|e: crate::labels::UnknownLabel| Error::record(line, field("intent"), e.to_string()))?,
            Some(_) => return Err(Error::record(line, field("intent"), "expected a string")),
        };
        let cause_spans = match u.get("cause_spans") {
            None | Some(Value::Null) => Vec::new(),
            Some(v) => {
                let pairs: Vec<[usize; 2]> = serde_json::from_value(v.clone()).map_err(|_| {
                    Error::record(line, field("cause_spans"), "expected a list of [start, end] byte offsets")
                })?;
                let mut spans = Vec::with_capacity(pairs.len());
                for [start, end] in pairs {
                    if start > end || end > text.len() {
                        return Err(Error::record(
                            line,
                            field("cause_spans"),
                            format!("span {start}..{end} outside text of {} bytes", text.len()),
                        ));
                    }
                    if !text.is_char_boundary(start) || !text.is_char_boundary(end) {
                        return Err(Error::record(
                            line,
                            field("cause_spans"),
                            format!("span {start}..{end} splits a UTF-8 character"),
                        ));
                    }
                    spans.push(start..end);
                }
                spans
            }
        };
        utterances.push(Utterance { index, speaker, text, emotion, intent, cause_spans });
    }

    if utterances.len() < 2 {
        return Err(Error::record(line, "utterances", "a conversation needs at least 2 utterances"));
    }
    let parties: BTreeSet<&str> = utterances.iter().map(|u| u.speaker.as_str()).collect();
    if parties.len() != 2 {
        return Err(Error::record(
            line,
            "utterances.speaker",
            format!("expected exactly two parties, found {}", parties.len()),
        ));
    }
    if let Some(w) = utterances.windows(2).position(|w| w[0].speaker == w[1].speaker) {
        return Err(Error::record(
            line,
            format!("utterances[{}].speaker", w + 1),
            "speakers must alternate",
        ));
    }
    Ok(Conversation { id, scenario_id, utterances })
}

/// Parses grouped by conversation id, then keyed by utterance index.
pub type ParseIndex = HashMap<String, HashMap<usize, ParsedUtterance>>;

pub fn index_parses(parses: Vec<ParsedUtterance>) -> ParseIndex {
    let mut index: ParseIndex = HashMap::new();
    for p in parses {
        index.entry(p.conversation_id.clone()).or_default().insert(p.utterance_index, p);
    }
    index
}

//! ATOMIC-style triple store, relation categories for emotion-flow edges, and
//! the translation pre/post-processing pipeline.

mod replace;
mod translate;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use replace::{apply_replacements, default_rules, invert_replacements, ReplacementLog, ReplacementRule, Substitution};
pub use translate::{
    default_connectors, joint_translate, natural_connectors, translate_triples, translation_quality_report,
    ConnectorMap, FnClient, HttpTranslationClient, IdentityClient, QualityLabel, QualityReport, TableClient,
    TranslatedTriple, TranslationClient,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "xIntent")]
    XIntent,
    #[serde(rename = "xNeed")]
    XNeed,
    #[serde(rename = "xAttr")]
    XAttr,
    #[serde(rename = "xReact")]
    XReact,
    #[serde(rename = "xWant")]
    XWant,
    #[serde(rename = "xEffect")]
    XEffect,
    #[serde(rename = "oReact")]
    OReact,
    #[serde(rename = "oWant")]
    OWant,
    #[serde(rename = "oEffect")]
    OEffect,
    #[serde(rename = "isAfter")]
    IsAfter,
    #[serde(rename = "isBefore")]
    IsBefore,
}

impl Relation {
    pub const ALL: [Relation; 11] = [
        Self::XIntent,
        Self::XNeed,
        Self::XAttr,
        Self::XReact,
        Self::XWant,
        Self::XEffect,
        Self::OReact,
        Self::OWant,
        Self::OEffect,
        Self::IsAfter,
        Self::IsBefore,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::XIntent => "xIntent",
            Self::XNeed => "xNeed",
            Self::XAttr => "xAttr",
            Self::XReact => "xReact",
            Self::XWant => "xWant",
            Self::XEffect => "xEffect",
            Self::OReact => "oReact",
            Self::OWant => "oWant",
            Self::OEffect => "oEffect",
            Self::IsAfter => "isAfter",
            Self::IsBefore => "isBefore",
        }
    }

    pub fn category(self) -> TailCategory {
        categorize_tail(self)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Relation::ALL
            .into_iter()
            .find(|r| r.name() == s.trim())
            .ok_or_else(|| Error::invalid("relation", format!("unknown relation `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailCategory {
    #[serde(rename = "Tail_emotion")]
    Emotion,
    #[serde(rename = "Tail_before")]
    Before,
    #[serde(rename = "Tail_after")]
    After,
    None,
}

impl TailCategory {
    pub fn name(self) -> &'static str {
        match self {
            Self::Emotion => "Tail_emotion",
            Self::Before => "Tail_before",
            Self::After => "Tail_after",
            Self::None => "none",
        }
    }
}

/// Groups relations by the role their tails play in emotion-flow edges:
/// psychological reactions, preceding events, following events.
pub fn categorize_tail(relation: Relation) -> TailCategory {
    use Relation::*;
    match relation {
        XAttr | XReact => TailCategory::Emotion,
        IsAfter | XNeed => TailCategory::Before,
        IsBefore | XWant | XIntent | XEffect | OEffect => TailCategory::After,
        OReact | OWant => TailCategory::None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeadLevel {
    Event,
    Entity,
}

impl FromStr for HeadLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "event" => Ok(Self::Event),
            "entity" => Ok(Self::Entity),
            other => Err(Error::invalid("head level", format!("`{other}` (expected event or entity)"))),
        }
    }
}

impl fmt::Display for HeadLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Event => "event",
            Self::Entity => "entity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Head {
    pub id: String,
    pub text: String,
    pub level: HeadLevel,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KbTriple {
    pub head: String,
    pub relation: Relation,
    pub tail: String,
}

pub fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// In-memory triple store, indexed by head id, relation and head level.
#[derive(Debug, Clone, Default)]
pub struct Kb {
    heads: Vec<Head>,
    head_index: HashMap<String, usize>,
    triples: Vec<KbTriple>,
    by_head: HashMap<String, Vec<usize>>,
    by_relation: HashMap<Relation, Vec<usize>>,
    seen: HashSet<(String, Relation, String)>,
}

impl Kb {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_head(&mut self, id: &str, text: &str, level: HeadLevel) -> Result<()> {
        let text = normalize_ws(text);
        if id.trim().is_empty() {
            return Err(Error::invalid("head", "id must not be empty"));
        }
        if text.is_empty() {
            return Err(Error::invalid("head", format!("head `{id}` has empty text")));
        }
        if let Some(&i) = self.head_index.get(id) {
            let existing = &self.heads[i];
            if existing.text != text || existing.level != level {
                return Err(Error::invalid("head", format!("head id `{id}` redefined with different text or level")));
            }
            return Ok(());
        }
        self.head_index.insert(id.to_string(), self.heads.len());
        self.heads.push(Head { id: id.to_string(), text, level });
        Ok(())
    }

    /// Adds a triple; returns false when it duplicates an existing one.
    pub fn add_triple(&mut self, head_id: &str, relation: Relation, tail: &str) -> Result<bool> {
        let head = self.head(head_id).ok_or_else(|| Error::UnknownNode(head_id.to_string()))?;
        let tail = normalize_ws(tail);
        if tail.is_empty() {
            return Err(Error::invalid("triple", format!("empty tail for head `{head_id}`")));
        }
        if !self.seen.insert((head.text.clone(), relation, tail.clone())) {
            return Ok(false);
        }
        let idx = self.triples.len();
        self.triples.push(KbTriple { head: head_id.to_string(), relation, tail });
        self.by_head.entry(head_id.to_string()).or_default().push(idx);
        self.by_relation.entry(relation).or_default().push(idx);
        Ok(true)
    }

    pub fn head(&self, id: &str) -> Option<&Head> {
        self.head_index.get(id).map(|&i| &self.heads[i])
    }

    pub fn heads(&self) -> &[Head] {
        &self.heads
    }

    pub fn heads_at(&self, level: HeadLevel) -> impl Iterator<Item = &Head> {
        self.heads.iter().filter(move |h| h.level == level)
    }

    pub fn triples(&self) -> &[KbTriple] {
        &self.triples
    }

    pub fn triples_of<'a>(&'a self, head_id: &str) -> impl Iterator<Item = &'a KbTriple> + 'a {
        self.by_head.get(head_id).into_iter().flatten().map(|&i| &self.triples[i])
    }

    pub fn triples_with(&self, relation: Relation) -> impl Iterator<Item = &KbTriple> {
        self.by_relation.get(&relation).into_iter().flatten().map(|&i| &self.triples[i])
    }

    pub fn tails<'a>(&'a self, head_id: &str, category: TailCategory) -> impl Iterator<Item = &'a KbTriple> + 'a {
        self.triples_of(head_id).filter(move |t| categorize_tail(t.relation) == category)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }
}

pub fn load_kb(path: impl AsRef<Path>) -> Result<Kb> {
    read_kb(BufReader::new(File::open(path)?))
}

/// Reads the TSV triple format: `head_id, head_text, head_level, relation, tail`.
pub fn read_kb(reader: impl BufRead) -> Result<Kb> {
    let mut kb = Kb::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 {
            return Err(Error::Syntax { line: line_no, message: format!("expected 5 tab-separated columns, found {}", cols.len()) });
        }
        let level: HeadLevel = cols[2].parse().map_err(|e: Error| Error::record(line_no, "head_level", e.to_string()))?;
        let relation: Relation = cols[3].parse().map_err(|e: Error| Error::record(line_no, "relation", e.to_string()))?;
        kb.add_head(cols[0], cols[1], level).map_err(|e| Error::record(line_no, "head_id", e.to_string()))?;
        kb.add_triple(cols[0], relation, cols[4]).map_err(|e| Error::record(line_no, "tail", e.to_string()))?;
    }
    Ok(kb)
}

pub fn write_kb(kb: &Kb, mut out: impl Write) -> Result<()> {
    for t in kb.triples() {
        let h = kb.head(&t.head).expect("triple head indexed");
        writeln!(out, "{}\t{}\t{}\t{}\t{}", h.id, h.text, h.level, t.relation, t.tail)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_three_rows() {
        assert_eq!(categorize_tail(Relation::XAttr), TailCategory::Emotion);
        assert_eq!(categorize_tail(Relation::IsAfter), TailCategory::Before);
        assert_eq!(categorize_tail(Relation::OReact), TailCategory::None);
        assert_eq!(categorize_tail(Relation::OEffect), TailCategory::After);
    }

    #[test]
    fn dedup_on_load() {
        let tsv = "h1\tPersonX is tired\tevent\txAttr\ttired\nh1\tPersonX is tired\tevent\txAttr\t tired \nh1\tPersonX is tired\tevent\txWant\tto rest\n";
        let kb = read_kb(tsv.as_bytes()).unwrap();
        assert_eq!(kb.len(), 2);
    }

    #[test]
    fn unknown_relation_reports_line() {
        let tsv = "h1\tx\tevent\txAttr\ttired\nh1\tx\tevent\txFoo\ttired\n";
        match read_kb(tsv.as_bytes()).unwrap_err() {
            Error::Record { line, field, .. } => {
                assert_eq!(line, 2);
                assert_eq!(field, "relation");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn indexes() {
        let tsv = "h1\tx\tevent\txAttr\ttired\nh2\tcat\tentity\txReact\thappy\nh1\tx\tevent\tisAfter\tsleeps late\n";
        let kb = read_kb(tsv.as_bytes()).unwrap();
        assert_eq!(kb.triples_of("h1").count(), 2);
        assert_eq!(kb.triples_with(Relation::XReact).count(), 1);
        assert_eq!(kb.heads_at(HeadLevel::Entity).count(), 1);
        assert_eq!(kb.tails("h1", TailCategory::Before).next().unwrap().tail, "sleeps late");
        let mut buf = Vec::new();
        write_kb(&kb, &mut buf).unwrap();
        assert_eq!(read_kb(buf.as_slice()).unwrap().triples(), kb.triples());
    }

    #[test]
    fn conflicting_head_definition() {
        let tsv = "h1\tx\tevent\txAttr\ttired\nh1\ty\tevent\txAttr\ttired\n";
        assert!(read_kb(tsv.as_bytes()).is_err());
    }
}

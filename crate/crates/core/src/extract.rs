//! Event mention extraction from dependency-parsed utterances.
//!
//! The parsing method works per sub-utterance: the token attached to ROOT
//! seeds extraction when it is a verb or an adjective. A verb seed keeps its
//! adverbial dependents and everything after it in its subtree; an
//! adjective seed keeps its subject phrase. Seeds governing several verbs
//! with deep enough subtrees are replaced by those verbs, recursively.
//!
//! Two baselines are provided for comparison: POS templates over the tag
//! sequence, and `simple`, which keeps each filtered sub-utterance verbatim.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{ParsedUtterance, SubUtterance, Token};
use crate::error::{Error, Result};

const DEFAULT_STOP_PHRASES: &str = include_str!("../config/stop_phrases.txt");

/// Splitting punctuation: full-width Chinese marks plus ASCII equivalents.
pub const DEFAULT_PUNCTUATION: &str = "，。！？；、…,.!?;";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractorConfig {
    pub min_sub_utterance_chars: usize,
    pub stop_phrases: BTreeSet<String>,
    pub decompose_verb_count_threshold: usize,
    pub decompose_depth_threshold: usize,
    pub punctuation: BTreeSet<char>,
    /// Particles (POS `u`) removed from the end of a verb-driven mention.
    pub trailing_particles: BTreeSet<String>,
    /// Adverbials dropped from in front of a verb seed.
    pub filtered_adverbs: BTreeSet<String>,
}

pub fn parse_word_list(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

impl Default for ExtractorConfig {
    fn default() -> Self {
        let set = |items: &[&str]| items.iter().map(|s| s.to_string()).collect();
        Self {
            min_sub_utterance_chars: 4,
            stop_phrases: parse_word_list(DEFAULT_STOP_PHRASES),
            decompose_verb_count_threshold: 2,
            decompose_depth_threshold: 2,
            punctuation: DEFAULT_PUNCTUATION.chars().collect(),
            trailing_particles: set(&["了", "吧", "呢", "啊", "吗", "嘛", "呀", "啦", "哦", "哈"]),
            filtered_adverbs: set(&["已经", "在", "正在", "也", "太"]),
        }
    }
}

impl ExtractorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_sub_utterance_chars == 0
            || self.decompose_verb_count_threshold == 0
            || self.decompose_depth_threshold == 0
        {
            return Err(Error::invalid("extractor config", "thresholds must be at least 1"));
        }
        Ok(())
    }

    fn content(&self, text: &str) -> String {
        text.chars().filter(|c| !c.is_whitespace() && !self.punctuation.contains(c)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Driver {
    Verb,
    Adjective,
    Noun,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Parsing,
    PosTemplate,
    Simple,
    /// Single content words linked to entity-level heads.
    Concept,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "parsing" => Ok(Self::Parsing),
            "pos" | "pos_template" => Ok(Self::PosTemplate),
            "simple" => Ok(Self::Simple),
            "concept" => Ok(Self::Concept),
            other => Err(Error::invalid("method", format!("`{other}` (expected parsing, pos or simple)"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Parsing => "parsing",
            Self::PosTemplate => "pos",
            Self::Simple => "simple",
            Self::Concept => "concept",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MentionSource {
    pub conversation: String,
    pub utterance: usize,
    pub sub_utterance: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventMention {
    pub text: String,
    pub source: MentionSource,
    pub driver: Option<Driver>,
    pub method: Method,
    /// Seed token index within the source sub-utterance.
    #[serde(skip)]
    pub seed: Option<usize>,
    /// Token indices (surface order) the text was assembled from.
    #[serde(skip)]
    pub tokens: Vec<usize>,
}

fn source(utt: &ParsedUtterance, su: &SubUtterance) -> MentionSource {
    MentionSource { conversation: utt.conversation_id.clone(), utterance: utt.utterance_index, sub_utterance: su.index }
}

fn assemble(su: &SubUtterance, tokens: &[usize]) -> String {
    tokens.iter().filter_map(|&i| su.token(i)).map(|t| t.form.as_str()).collect()
}

/// Splits raw text after each run of punctuation; pieces keep their
/// trailing punctuation so they concatenate back to the input.
pub fn split_text(text: &str, punctuation: &BTreeSet<char>) -> Vec<String> {
    let mut pieces = Vec::new();
    let mut cur = String::new();
    let mut in_punct = false;
    for c in text.chars() {
        let is_p = punctuation.contains(&c);
        if in_punct && !is_p {
            pieces.push(std::mem::take(&mut cur));
        }
        in_punct = is_p;
        cur.push(c);
    }
    if !cur.is_empty() {
        pieces.push(cur);
    }
    pieces
}

/// Drops sub-utterances that are too short or are stop phrases.
pub fn split_and_filter<'a>(utt: &'a ParsedUtterance, cfg: &ExtractorConfig) -> Vec<&'a SubUtterance> {
    utt.sub_utterances
        .iter()
        .filter(|su| {
            let content = cfg.content(&su.text);
            content.chars().count() >= cfg.min_sub_utterance_chars && !cfg.stop_phrases.contains(&content)
        })
        .collect()
}

fn trim_mention(su: &SubUtterance, mut tokens: Vec<usize>, cfg: &ExtractorConfig) -> Vec<usize> {
    let tok = |i: usize| su.token(i).expect("index from the same tree");
    while tokens.len() > 1 && tok(tokens[0]).pos == "c" {
        tokens.remove(0);
    }
    while tokens.len() > 1 {
        let last = tok(*tokens.last().unwrap());
        if last.pos == "u" && cfg.trailing_particles.contains(&last.form) {
            tokens.pop();
        } else {
            break;
        }
    }
    tokens
}

fn mention(su: &SubUtterance, src: MentionSource, seed: &Token, tokens: Vec<usize>, driver: Driver) -> EventMention {
    EventMention {
        text: assemble(su, &tokens),
        source: src,
        driver: Some(driver),
        method: Method::Parsing,
        seed: Some(seed.index),
        tokens,
    }
}

fn verb_tokens(seed: &Token, su: &SubUtterance, cfg: &ExtractorConfig) -> Vec<usize> {
    let mut keep: BTreeSet<usize> = su
        .children(seed.index)
        .filter(|t| t.deprel == "ADV" && t.index < seed.index && !t.is_punct())
        .filter(|t| !cfg.filtered_adverbs.contains(&t.form))
        .map(|t| t.index)
        .collect();
    keep.insert(seed.index);
    keep.extend(
        su.subtree(seed.index)
            .into_iter()
            .filter(|&i| i > seed.index && !su.token(i).is_some_and(Token::is_punct)),
    );
    trim_mention(su, keep.into_iter().collect(), cfg)
}

fn adjective_tokens(seed: &Token, su: &SubUtterance, cfg: &ExtractorConfig) -> Vec<usize> {
    let mut keep: BTreeSet<usize> = su
        .children(seed.index)
        .filter(|t| t.deprel == "SBV")
        .flat_map(|t| su.subtree(t.index))
        .filter(|&i| !su.token(i).is_some_and(Token::is_punct))
        .collect();
    keep.insert(seed.index);
    trim_mention(su, keep.into_iter().collect(), cfg)
}

/// Verb-driven mention: adverbial dependents before the seed, the seed, and
/// the rest of the seed's subtree after it, minus filtered adverbials,
/// leading conjunctions and trailing particles.
pub fn extract_verb_driven(seed: &Token, utt: &ParsedUtterance, su: &SubUtterance, cfg: &ExtractorConfig) -> EventMention {
    mention(su, source(utt, su), seed, verb_tokens(seed, su, cfg), Driver::Verb)
}

/// Adjective-driven mention: the seed's subject phrase followed by the seed.
pub fn extract_adjective_driven(seed: &Token, utt: &ParsedUtterance, su: &SubUtterance, cfg: &ExtractorConfig) -> EventMention {
    mention(su, source(utt, su), seed, adjective_tokens(seed, su, cfg), Driver::Adjective)
}

fn drive(seed: &Token, utt: &ParsedUtterance, su: &SubUtterance, cfg: &ExtractorConfig) -> Option<EventMention> {
    if seed.is_verb() {
        Some(extract_verb_driven(seed, utt, su, cfg))
    } else if seed.is_adjective() {
        Some(extract_adjective_driven(seed, utt, su, cfg))
    } else {
        None
    }
}

/// Replaces `seed` by the verbs it governs when there are enough of them and
/// their subtrees are deep enough, recursing into each replacement.
fn final_seeds(seed: usize, su: &SubUtterance, cfg: &ExtractorConfig) -> Vec<usize> {
    let verbs: Vec<usize> = su.children(seed).filter(|t| t.is_verb()).map(|t| t.index).collect();
    let deepest = verbs.iter().map(|&v| su.depth(v)).max().unwrap_or(0);
    if verbs.len() >= cfg.decompose_verb_count_threshold && deepest >= cfg.decompose_depth_threshold {
        verbs.into_iter().flat_map(|v| final_seeds(v, su, cfg)).collect()
    } else {
        vec![seed]
    }
}

/// Splits a parsing mention into one mention per governed verb when its seed
/// passes the verb-count and depth thresholds; otherwise returns it as is.
/// Output tokens never leave the input mention's token set.
pub fn secondary_decompose(m: EventMention, utt: &ParsedUtterance, su: &SubUtterance, cfg: &ExtractorConfig) -> Vec<EventMention> {
    let Some(seed) = m.seed else { return vec![m] };
    let seeds = final_seeds(seed, su, cfg);
    if seeds == [seed] {
        return vec![m];
    }
    let allowed: BTreeSet<usize> = m.tokens.iter().copied().collect();
    seeds
        .into_iter()
        .filter_map(|s| su.token(s))
        .filter_map(|t| drive(t, utt, su, cfg))
        .filter_map(|mut out| {
            out.tokens.retain(|i| allowed.contains(i));
            if out.tokens.is_empty() {
                return None;
            }
            out.text = assemble(su, &out.tokens);
            Some(out)
        })
        .collect()
}

/// The parsing method: one or more mentions per surviving sub-utterance
/// whose ROOT-attached token is a verb or adjective.
pub fn extract_events(utt: &ParsedUtterance, cfg: &ExtractorConfig) -> Vec<EventMention> {
    let mut out = Vec::new();
    for su in split_and_filter(utt, cfg) {
        let Some(root) = su.root() else { continue };
        if let Some(m) = drive(root, utt, su, cfg) {
            out.extend(secondary_decompose(m, utt, su, cfg));
        }
    }
    out
}

/// POS sequences that form an event in the template baseline.
pub const POS_TEMPLATES: [&[&str]; 8] = [
    &["v", "v"],
    &["v", "n"],
    &["v", "i"],
    &["v", "u", "z"],
    &["v", "u", "m"],
    &["v", "c", "v"],
    &["v", "c", "i"],
    &["a", "v"],
];

/// Leftmost-longest, non-overlapping scan of the POS tag sequence.
pub fn pos_template_extract(utt: &ParsedUtterance, su: &SubUtterance) -> Vec<EventMention> {
    let tags: Vec<&str> = su.tokens.iter().map(|t| t.pos.as_str()).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < tags.len() {
        let hit = POS_TEMPLATES
            .iter()
            .filter(|tpl| tags[i..].starts_with(tpl))
            .map(|tpl| tpl.len())
            .max();
        match hit {
            Some(len) => {
                let tokens: Vec<usize> = (i + 1..=i + len).collect();
                out.push(EventMention {
                    text: assemble(su, &tokens),
                    source: source(utt, su),
                    driver: Some(if tags[i] == "a" { Driver::Adjective } else { Driver::Verb }),
                    method: Method::PosTemplate,
                    seed: Some(i + 1),
                    tokens,
                });
                i += len;
            }
            None => i += 1,
        }
    }
    out
}

pub fn extract_pos(utt: &ParsedUtterance, cfg: &ExtractorConfig) -> Vec<EventMention> {
    split_and_filter(utt, cfg).into_iter().flat_map(|su| pos_template_extract(utt, su)).collect()
}

/// The punctuation-only baseline: every surviving sub-utterance verbatim.
pub fn simple_extract(utt: &ParsedUtterance, cfg: &ExtractorConfig) -> Vec<EventMention> {
    split_and_filter(utt, cfg)
        .into_iter()
        .map(|su| EventMention {
            text: su.text.clone(),
            source: source(utt, su),
            driver: None,
            method: Method::Simple,
            seed: None,
            tokens: (1..=su.tokens.len()).collect(),
        })
        .collect()
}

pub fn extract_with(method: Method, utt: &ParsedUtterance, cfg: &ExtractorConfig) -> Vec<EventMention> {
    match method {
        Method::Parsing => extract_events(utt, cfg),
        Method::PosTemplate => extract_pos(utt, cfg),
        Method::Simple => simple_extract(utt, cfg),
        Method::Concept => concept_mentions(utt),
    }
}

/// Content words (POS v, n or a) as single-token mentions for concept linking.
pub fn concept_mentions(utt: &ParsedUtterance) -> Vec<EventMention> {
    utt.tokens()
        .filter_map(|(su, t)| {
            let driver = match t.pos.as_str() {
                "v" => Driver::Verb,
                "n" => Driver::Noun,
                "a" => Driver::Adjective,
                _ => return None,
            };
            Some(EventMention {
                text: t.form.clone(),
                source: source(utt, su),
                driver: Some(driver),
                method: Method::Concept,
                seed: Some(t.index),
                tokens: vec![t.index],
            })
        })
        .collect()
}

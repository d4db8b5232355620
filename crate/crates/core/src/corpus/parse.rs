//! Dependency parses in CoNLL-U.
//!
//! Each sentence is one sub-utterance and carries a `# ref = conv/utt/sub`
//! comment binding it to the corpus. The ltp tag goes in XPOS; when XPOS is
//! `_` the UPOS column is used instead.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Conversation;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// 1-based position in the sub-utterance.
    pub index: usize,
    pub form: String,
    pub pos: String,
    /// Governor index, 0 for the root.
    pub head: usize,
    pub deprel: String,
}

impl Token {
    pub fn new(index: usize, form: &str, pos: &str, head: usize, deprel: &str) -> Self {
        Self { index, form: form.into(), pos: pos.into(), head, deprel: deprel.into() }
    }

    pub fn is_verb(&self) -> bool {
        self.pos == "v"
    }

    pub fn is_adjective(&self) -> bool {
        self.pos == "a"
    }

    pub fn is_punct(&self) -> bool {
        self.pos == "wp" || self.deprel == "WP" || self.pos.eq_ignore_ascii_case("punct")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubUtterance {
    pub index: usize,
    pub tokens: Vec<Token>,
    /// Surface text including trailing punctuation.
    pub text: String,
}

impl SubUtterance {
    /// Builds a sub-utterance whose text is the concatenation of token forms.
    pub fn from_tokens(index: usize, tokens: Vec<Token>) -> Self {
        let text = tokens.iter().map(|t| t.form.as_str()).collect();
        Self { index, tokens, text }
    }

    pub fn token(&self, index: usize) -> Option<&Token> {
        index.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    pub fn root(&self) -> Option<&Token> {
        self.tokens.iter().find(|t| t.head == 0)
    }

    pub fn children(&self, index: usize) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(move |t| t.head == index)
    }

    /// Indices of `index` and all its descendants, in surface order.
    pub fn subtree(&self, index: usize) -> Vec<usize> {
        let mut out = vec![index];
        let mut stack = vec![index];
        while let Some(n) = stack.pop() {
            for c in self.children(n) {
                out.push(c.index);
                stack.push(c.index);
            }
        }
        out.sort_unstable();
        out
    }

    /// Number of levels in the subtree rooted at `index`; a leaf has depth 1.
    pub fn depth(&self, index: usize) -> usize {
        1 + self.children(index).map(|c| self.depth(c.index)).max().unwrap_or(0)
    }

    pub fn forms(&self) -> String {
        self.tokens.iter().map(|t| t.form.as_str()).collect()
    }

    /// Checks the tree invariants: contiguous 1-based indices, heads in range,
    /// exactly one root and no cycles.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let n = self.tokens.len();
        if n == 0 {
            return Err("sub-utterance has no tokens".into());
        }
        for (i, t) in self.tokens.iter().enumerate() {
            if t.index != i + 1 {
                return Err(format!("token ids not contiguous: expected {}, found {}", i + 1, t.index));
            }
            if t.head > n {
                return Err(format!("token {} has head {} beyond {} tokens", t.index, t.head, n));
            }
            if t.head == t.index {
                return Err(format!("token {} is its own head", t.index));
            }
        }
        let roots = self.tokens.iter().filter(|t| t.head == 0).count();
        if roots != 1 {
            return Err(format!("expected exactly one ROOT-attached token, found {roots}"));
        }
        for t in &self.tokens {
            let mut cur = t.head;
            let mut steps = 0;
            while cur != 0 {
                steps += 1;
                if steps > n {
                    return Err(format!("dependency cycle through token {}", t.index));
                }
                cur = self.tokens[cur - 1].head;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedUtterance {
    pub conversation_id: String,
    pub utterance_index: usize,
    pub sub_utterances: Vec<SubUtterance>,
}

impl ParsedUtterance {
    pub fn text(&self) -> String {
        self.sub_utterances.iter().map(|s| s.text.as_str()).collect()
    }

    pub fn tokens(&self) -> impl Iterator<Item = (&SubUtterance, &Token)> {
        self.sub_utterances.iter().flat_map(|s| s.tokens.iter().map(move |t| (s, t)))
    }
}

pub fn read_conllu(path: impl AsRef<Path>) -> Result<Vec<ParsedUtterance>> {
    read_conllu_from(BufReader::new(File::open(path)?))
}

pub fn read_conllu_str(text: &str) -> Result<Vec<ParsedUtterance>> {
    read_conllu_from(text.as_bytes())
}

struct Pending {
    start_line: usize,
    reference: Option<(String, usize, usize)>,
    text: Option<String>,
    tokens: Vec<Token>,
}

fn parse_ref(value: &str, line: usize) -> Result<(String, usize, usize)> {
    let mut parts = value.trim().rsplitn(3, '/');
    let sub = parts.next();
    let utt = parts.next();
    let conv = parts.next();
    match (conv, utt, sub) {
        (Some(c), Some(u), Some(s)) if !c.is_empty() => {
            let u = u.parse().map_err(|_| Error::Syntax { line, message: format!("bad utterance index in ref `{value}`") })?;
            let s = s.parse().map_err(|_| Error::Syntax { line, message: format!("bad sub-utterance index in ref `{value}`") })?;
            Ok((c.to_string(), u, s))
        }
        _ => Err(Error::Syntax { line, message: format!("ref must be conv_id/utt_idx/sub_idx, got `{value}`") }),
    }
}

fn read_conllu_from(reader: impl BufRead) -> Result<Vec<ParsedUtterance>> {
    let mut grouped: BTreeMap<(String, usize), BTreeMap<usize, SubUtterance>> = BTreeMap::new();
    let mut order: Vec<(String, usize)> = Vec::new();
    let mut pending: Option<Pending> = None;

    let mut flush = |p: Pending| -> Result<()> {
        if p.tokens.is_empty() && p.reference.is_none() {
            return Ok(());
        }
        let Some((conv, utt, sub)) = p.reference else {
            return Err(Error::Syntax { line: p.start_line, message: "sentence lacks a `# ref = conv/utt/sub` comment".into() });
        };
        let text = p.text.unwrap_or_else(|| p.tokens.iter().map(|t| t.form.as_str()).collect());
        let su = SubUtterance { index: sub, tokens: p.tokens, text };
        su.validate().map_err(|m| Error::Syntax { line: p.start_line, message: m })?;
        let key = (conv, utt);
        let subs = grouped.entry(key.clone()).or_insert_with(|| {
            order.push(key.clone());
            BTreeMap::new()
        });
        if subs.insert(sub, su).is_some() {
            return Err(Error::Syntax {
                line: p.start_line,
                message: format!("duplicate ref {}/{}/{}", key.0, key.1, sub),
            });
        }
        Ok(())
    };

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if let Some(p) = pending.take() {
                flush(p)?;
            }
            continue;
        }
        let p = pending.get_or_insert_with(|| Pending { start_line: line_no, reference: None, text: None, tokens: Vec::new() });
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                match key.trim() {
                    "ref" => p.reference = Some(parse_ref(value, line_no)?),
                    "text" => p.text = Some(value.trim().to_string()),
                    _ => {}
                }
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 8 {
            return Err(Error::Syntax { line: line_no, message: format!("expected 10 tab-separated columns, found {}", cols.len()) });
        }
        // Multiword ranges (1-2) and empty nodes (1.1) are not part of the basic tree.
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let index = cols[0].parse().map_err(|_| Error::Syntax { line: line_no, message: format!("bad token id `{}`", cols[0]) })?;
        let head = cols[6].parse().map_err(|_| Error::Syntax { line: line_no, message: format!("bad head `{}`", cols[6]) })?;
        let pos = if cols[4] != "_" { cols[4] } else { cols[3] };
        p.tokens.push(Token { index, form: cols[1].to_string(), pos: pos.to_string(), head, deprel: cols[7].to_string() });
    }
    if let Some(p) = pending.take() {
        flush(p)?;
    }

    Ok(order
        .into_iter()
        .map(|key| {
            let subs = grouped.remove(&key).unwrap_or_default();
            ParsedUtterance { conversation_id: key.0, utterance_index: key.1, sub_utterances: subs.into_values().collect() }
        })
        .collect())
}

pub fn write_conllu(parses: &[ParsedUtterance], mut out: impl Write) -> Result<()> {
    for p in parses {
        for su in &p.sub_utterances {
            writeln!(out, "# ref = {}/{}/{}", p.conversation_id, p.utterance_index, su.index)?;
            writeln!(out, "# text = {}", su.text)?;
            for t in &su.tokens {
                writeln!(out, "{}\t{}\t_\t_\t{}\t_\t{}\t{}\t_\t_", t.index, t.form, t.pos, t.head, t.deprel)?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseMismatch {
    pub utterance_index: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AlignmentReport {
    /// Utterances with no parse.
    pub missing: Vec<usize>,
    /// Parses whose reassembled text does not reproduce the utterance.
    pub mismatched: Vec<ParseMismatch>,
    /// Parses pointing past the end of the conversation.
    pub orphaned: Vec<usize>,
}

impl AlignmentReport {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.mismatched.is_empty() && self.orphaned.is_empty()
    }
}

fn squash(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

/// Compares parses against the utterances they claim to cover. Text is
/// compared with whitespace removed so tokenised Latin text still aligns.
pub fn validate_parse_alignment(conv: &Conversation, parses: &[ParsedUtterance]) -> AlignmentReport {
    let mut by_index: HashMap<usize, &ParsedUtterance> = HashMap::new();
    let mut report = AlignmentReport::default();
    for p in parses.iter().filter(|p| p.conversation_id == conv.id) {
        if p.utterance_index >= conv.utterances.len() {
            report.orphaned.push(p.utterance_index);
        } else {
            by_index.insert(p.utterance_index, p);
        }
    }
    for u in &conv.utterances {
        let Some(p) = by_index.get(&u.index) else {
            report.missing.push(u.index);
            continue;
        };
        let expected = squash(&u.text);
        let text = squash(&p.text());
        let forms: String = p.sub_utterances.iter().map(|s| squash(&s.forms())).collect();
        if text != expected || forms != expected {
            let found = if forms != expected { forms } else { text };
            report.mismatched.push(ParseMismatch { utterance_index: u.index, expected: u.text.clone(), found });
        }
    }
    report.orphaned.sort_unstable();
    report
}

//! Pattern replacement for ATOMIC placeholders before translation.
//!
//! A rule is a pair of templates whose literal segments are separated by
//! `...` gaps, e.g. `PersonX...PersonY's...` → `Someone...someone else's...`.
//! Segment matching is ASCII case-insensitive and respects word boundaries;
//! a segment made only of underscores matches a whole blank (`___`, `____`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const GAP: &str = "...";

/// (start, literal length, rule index, matched segment spans)
type Candidate = (usize, usize, usize, Vec<(usize, usize)>);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplacementRule {
    pub original_pattern: String,
    pub replaced_pattern: String,
    #[serde(skip)]
    from: Vec<String>,
    #[serde(skip)]
    to: Vec<String>,
}

fn segments(template: &str) -> Vec<String> {
    template.split(GAP).filter(|s| !s.is_empty()).map(str::to_string).collect()
}

impl ReplacementRule {
    pub fn new(original: &str, replaced: &str) -> Result<Self> {
        let gaps = |t: &str| t.matches(GAP).count();
        if gaps(original) != gaps(replaced) {
            return Err(Error::invalid("replacement rule", format!("`{original}` and `{replaced}` have different gap counts")));
        }
        let from = segments(original);
        let to = segments(replaced);
        if from.is_empty() || from.len() != to.len() {
            return Err(Error::invalid("replacement rule", format!("`{original}` → `{replaced}` segments do not correspond")));
        }
        Ok(Self { original_pattern: original.into(), replaced_pattern: replaced.into(), from, to })
    }

    fn literal_len(&self) -> usize {
        self.from.iter().map(String::len).sum()
    }
}

/// The placeholder rules used when translating ATOMIC, highest priority
/// first, followed by single-occurrence fallbacks.
pub fn default_rules() -> Vec<ReplacementRule> {
    [
        ("PersonX...PersonX's...", "Someone...his..."),
        ("PersonX...PersonY's...", "Someone...someone else's..."),
        ("PersonX...PersonX...", "Someone...himself..."),
        ("PersonX...PersonY...", "Someone...someone else..."),
        ("...___...", "...something..."),
        ("PersonX's...", "Someone's..."),
        ("PersonX...", "Someone..."),
        ("...PersonY's...", "...someone else's..."),
        ("...PersonY...", "...someone else..."),
    ]
    .into_iter()
    .map(|(a, b)| ReplacementRule::new(a, b).expect("built-in rule"))
    .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Substitution {
    pub rule: usize,
    pub original: String,
    pub replacement: String,
    /// Byte offset of `replacement` in the replaced text.
    pub at: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplacementLog {
    pub substitutions: Vec<Substitution>,
}

impl ReplacementLog {
    pub fn is_empty(&self) -> bool {
        self.substitutions.is_empty()
    }
}

fn is_word(c: char) -> bool {
    c.is_alphanumeric() || c == '\''
}

fn segment_at(text: &str, pos: usize, seg: &str) -> Option<usize> {
    let rest = &text[pos..];
    if seg.chars().all(|c| c == '_') {
        if text[..pos].ends_with('_') {
            return None;
        }
        let run = rest.len() - rest.trim_start_matches('_').len();
        return (run >= seg.len()).then_some(pos + run);
    }
    if rest.len() < seg.len() || !rest.is_char_boundary(seg.len()) || !rest[..seg.len()].eq_ignore_ascii_case(seg) {
        return None;
    }
    let end = pos + seg.len();
    let before_ok = text[..pos].chars().next_back().is_none_or(|c| !is_word(c));
    let after_ok = text[end..].chars().next().is_none_or(|c| !is_word(c));
    (before_ok && after_ok).then_some(end)
}

fn find_segment(text: &str, seg: &str, from: usize, consumed: &[(usize, usize)]) -> Option<(usize, usize)> {
    text.char_indices()
        .map(|(i, _)| i)
        .filter(|&i| i >= from)
        .filter_map(|i| segment_at(text, i, seg).map(|end| (i, end)))
        .find(|&(s, e)| consumed.iter().all(|&(cs, ce)| e <= cs || s >= ce))
}

/// Applies `rules` leftmost-longest without overlaps; ties on position and
/// length go to the earlier rule. Gap text is left untouched but is still
/// eligible for later matches.
pub fn apply_replacements(text: &str, rules: &[ReplacementRule]) -> (String, ReplacementLog) {
    let mut consumed: Vec<(usize, usize)> = Vec::new();
    let mut hits: Vec<(usize, usize, usize, String)> = Vec::new();

    loop {
        let mut best: Option<Candidate> = None;
        for (ri, rule) in rules.iter().enumerate() {
            let Some(first) = find_segment(text, &rule.from[0], 0, &consumed) else { continue };
            let mut spans = vec![first];
            let mut ok = true;
            for seg in &rule.from[1..] {
                let prev_end = spans.last().unwrap().1;
                let mut taken = consumed.clone();
                taken.extend(spans.iter().copied());
                match find_segment(text, seg, prev_end, &taken) {
                    Some(span) => spans.push(span),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let len: usize = spans.iter().map(|(s, e)| e - s).sum();
            let better = match &best {
                None => true,
                Some((bs, bl, _, _)) => first.0 < *bs || (first.0 == *bs && len > *bl),
            };
            if better {
                best = Some((first.0, len, ri, spans));
            }
        }
        let Some((_, _, ri, spans)) = best else { break };
        debug_assert!(rules[ri].literal_len() <= spans.iter().map(|(s, e)| e - s).sum::<usize>());
        for (k, (s, e)) in spans.into_iter().enumerate() {
            consumed.push((s, e));
            hits.push((s, e, ri, rules[ri].to[k].clone()));
        }
    }

    hits.sort_by_key(|h| h.0);
    let mut out = String::with_capacity(text.len());
    let mut log = ReplacementLog::default();
    let mut cursor = 0;
    for (s, e, rule, replacement) in hits {
        out.push_str(&text[cursor..s]);
        log.substitutions.push(Substitution { rule, original: text[s..e].to_string(), replacement: replacement.clone(), at: out.len() });
        out.push_str(&replacement);
        cursor = e;
    }
    out.push_str(&text[cursor..]);
    (out, log)
}

/// Undoes `apply_replacements` using its log.
pub fn invert_replacements(replaced: &str, log: &ReplacementLog) -> String {
    let mut out = replaced.to_string();
    for sub in log.substitutions.iter().rev() {
        out.replace_range(sub.at..sub.at + sub.replacement.len(), &sub.original);
    }
    out
}

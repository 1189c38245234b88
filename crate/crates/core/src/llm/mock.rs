//! Deterministic extractive backend.
//!
//! Summaries are built from the most distinctive identifiers in the source,
//! optionally prefixed by the first comment line and by the first sentence
//! of the seed context. Rankings order candidates by how many distinct
//! words they share with the query. The output is a pure function of the
//! request, so the whole pipeline can be exercised offline.

use std::collections::{BTreeSet, HashMap};

use super::{estimate_tokens, Backend, ChatRequest, ChatResponse, LlmError, RankCandidate, RequestKind};

const TOP_IDENTIFIERS: usize = 12;
const MIN_TOKEN_LEN: usize = 3;

#[derive(Debug, Clone, Copy, Default)]
pub struct MockBackend;

impl Backend for MockBackend {
    fn name(&self) -> &str {
        "mock"
    }

    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, LlmError> {
        let text = match &request.kind {
            RequestKind::Summarize { source, seed } => summarize(source, seed.as_deref()),
            RequestKind::Rank { query, candidates } => rank(query, candidates),
        };
        Ok(ChatResponse {
            prompt_tokens: request.prompt_estimate().max(1),
            completion_tokens: estimate_tokens(&text),
            text,
        })
    }
}

fn summarize(source: &str, seed: Option<&str>) -> String {
    let mut parts = Vec::new();
    if let Some(seed) = seed.map(first_sentence).filter(|s| !s.is_empty()) {
        parts.push(seed.to_string());
    }
    if let Some(comment) = first_comment(source) {
        parts.push(sentence(&comment));
    }
    let ids = top_identifiers(source, TOP_IDENTIFIERS);
    if ids.is_empty() {
        parts.push("No identifiers.".to_string());
    } else {
        parts.push(format!("{}.", ids.join(", ")));
    }
    parts.join(" ")
}

fn rank(query: &str, candidates: &[RankCandidate]) -> String {
    let query_words = word_set(query);
    let mut scored: Vec<(usize, &RankCandidate, Vec<String>)> = candidates
        .iter()
        .map(|c| {
            let shared: Vec<String> = word_set(&c.summary).intersection(&query_words).cloned().collect();
            (shared.len(), c, shared)
        })
        .collect();
    scored.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.label.cmp(&b.1.label)));

    let mut out = format!(
        "Reasoning: compared the bug report with {} candidate summaries by shared vocabulary.\n",
        candidates.len()
    );
    for (i, (n, c, shared)) in scored.iter().enumerate() {
        let why = if *n == 0 {
            "no shared terms".to_string()
        } else {
            format!("shares {}", shared.join(", "))
        };
        out.push_str(&format!("{}. {} — {}\n", i + 1, c.label, why));
    }
    out
}

/// Alphanumeric/underscore runs of at least three characters.
fn identifier_tokens(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .filter(|t| t.chars().count() >= MIN_TOKEN_LEN)
}

/// The `n` most distinctive identifiers: occurrence count weighted by
/// `ln((lines + 1) / lines containing it)`, so words repeated on every line
/// rank below words concentrated in a few. Ties are broken lexicographically.
pub(crate) fn top_identifiers(text: &str, n: usize) -> Vec<&str> {
    let mut counts: HashMap<&str, (usize, usize)> = HashMap::new();
    let mut lines = 0usize;
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        lines += 1;
        let mut seen = BTreeSet::new();
        for t in identifier_tokens(line) {
            let e = counts.entry(t).or_default();
            e.0 += 1;
            if seen.insert(t) {
                e.1 += 1;
            }
        }
    }
    let mut ranked: Vec<(&str, f64)> = counts
        .into_iter()
        .map(|(t, (tf, df))| (t, tf as f64 * ((lines + 1) as f64 / df as f64).ln()))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.into_iter().take(n).map(|(t, _)| t).collect()
}

/// Lower-cased distinct words, by the same tokenization as identifiers.
pub(crate) fn word_set(text: &str) -> BTreeSet<String> {
    identifier_tokens(text).map(str::to_lowercase).collect()
}

/// First sentence of `text`: up to the first `.`, `!` or `?` followed by
/// whitespace or end of text; otherwise the first line.
pub fn first_sentence(text: &str) -> &str {
    let text = text.trim();
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            match chars.peek() {
                None => return text,
                Some((_, next)) if next.is_whitespace() => return &text[..i + c.len_utf8()],
                _ => {}
            }
        }
    }
    text.lines().next().unwrap_or("").trim()
}

fn first_comment(source: &str) -> Option<String> {
    source.lines().find_map(|line| {
        let l = line.trim();
        let is_comment = l.starts_with("//")
            || l.starts_with("/*")
            || (l.starts_with('*') && !l.starts_with("*/"))
            || l.starts_with("--")
            || l.starts_with("<!--")
            || l.starts_with("\"\"\"")
            || (l.starts_with('#')
                && l[1..].chars().next().is_none_or(|c| c == '#' || c.is_whitespace()));
        if !is_comment {
            return None;
        }
        let body = l
            .trim_start_matches(['/', '*', '#', '-', '!', '<', '"'])
            .trim_end_matches("*/")
            .trim_end_matches("-->")
            .trim_end_matches("\"\"\"")
            .trim();
        (!body.is_empty()).then(|| body.to_string())
    })
}

fn sentence(text: &str) -> String {
    if text.ends_with(['.', '!', '?']) {
        text.to_string()
    } else {
        format!("{text}.")
    }
}

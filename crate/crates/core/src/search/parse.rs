use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedItem {
    pub label: String,
    /// 1-based.
    pub rank: u32,
    pub rationale: String,
}

/// Ranked labels: ranks run 1..=n without gaps and labels are unique.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedList {
    pub items: Vec<RankedItem>,
}

impl RankedList {
    /// Builds a list from `(label, rationale)` pairs in order, dropping
    /// repeated labels and numbering densely from 1.
    pub fn from_ordered<I, L, R>(entries: I) -> Self
    where
        I: IntoIterator<Item = (L, R)>,
        L: Into<String>,
        R: Into<String>,
    {
        let mut seen = HashSet::new();
        let mut items = Vec::new();
        for (label, rationale) in entries {
            let label = label.into();
            if seen.insert(label.clone()) {
                items.push(RankedItem {
                    rank: items.len() as u32 + 1,
                    label,
                    rationale: rationale.into(),
                });
            }
        }
        Self { items }
    }

    pub fn truncated(mut self, k: usize) -> Self {
        self.items.truncate(k);
        self
    }

    pub fn labels(&self) -> Vec<&str> {
        self.items.iter().map(|i| i.label.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn is_well_formed(&self) -> bool {
        let mut seen = HashSet::new();
        self.items
            .iter()
            .enumerate()
            .all(|(i, item)| item.rank as usize == i + 1 && seen.insert(item.label.as_str()))
    }
}

const SEPARATORS: [&str; 4] = [" — ", " – ", " -- ", " - "];

/// Splits `N. label — rationale` (also `N)`), returning `None` for any line
/// that is not a numbered entry.
fn numbered_entry(line: &str) -> Option<(&str, &str)> {
    let line = line.trim();
    let digits = line.bytes().take_while(u8::is_ascii_digit).count();
    if digits == 0 {
        return None;
    }
    let rest = &line[digits..];
    let rest = rest.strip_prefix('.').or_else(|| rest.strip_prefix(')'))?;
    if !rest.starts_with(char::is_whitespace) {
        return None;
    }
    let rest = rest.trim();
    let (label, rationale) = SEPARATORS
        .iter()
        .filter_map(|sep| rest.split_once(sep))
        .min_by_key(|(label, _)| label.len())
        .unwrap_or((rest, ""));
    Some((label.trim(), rationale.trim()))
}

fn clean_label(label: &str) -> &str {
    label
        .trim()
        .trim_matches(|c| c == '`' || c == '*' || c == '"' || c == '\'')
        .trim_end_matches([':', ','])
        .trim()
}

/// Parses a numbered list out of a model reply.
///
/// Non-matching lines (free-form reasoning) are ignored, labels outside
/// `allowed` are dropped, repeats keep their first occurrence, and the
/// survivors are re-ranked densely from 1. An empty result is an error.
pub fn parse_ranked_list<S: AsRef<str>>(text: &str, allowed: &[S]) -> Result<RankedList> {
    let allowed: HashSet<&str> = allowed.iter().map(AsRef::as_ref).collect();
    let entries = text.lines().filter_map(numbered_entry).filter_map(|(label, why)| {
        let label = clean_label(label);
        let label = if allowed.contains(label) {
            label
        } else {
            // Tolerate a trailing path separator on directory labels.
            let trimmed = label.trim_end_matches('/');
            allowed.get(trimmed).copied()?
        };
        Some((label.to_string(), why.to_string()))
    });
    let list = RankedList::from_ordered(entries);
    if list.is_empty() {
        Err(Error::RankParse)
    } else {
        Ok(list)
    }
}

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kb::KnowledgeBase;
use crate::search::BugReport;

/// A bug report with its ground truth: the repositories and `repo_id/path`
/// files changed by the fix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ticket {
    pub id: String,
    #[serde(default)]
    pub title: String,
    pub body: String,
    pub truth_repos: BTreeSet<String>,
    pub truth_files: BTreeSet<String>,
}

impl Ticket {
    pub fn bug(&self) -> BugReport {
        BugReport::new(&self.id, &self.title, &self.body)
    }

    /// Checks the ticket's own invariants and that its truth resolves in `kb`.
    /// The error string says why the ticket cannot be scored.
    pub fn check(&self, kb: &KnowledgeBase) -> std::result::Result<(), String> {
        if self.body.trim().is_empty() {
            return Err("empty body".into());
        }
        if self.truth_repos.is_empty() || self.truth_files.is_empty() {
            return Err("empty ground truth".into());
        }
        for repo in &self.truth_repos {
            if kb.repo(repo).is_none() {
                return Err(format!("unknown repository {repo}"));
            }
        }
        for file in &self.truth_files {
            let repo = file.split_once('/').map_or("", |(r, _)| r);
            if !self.truth_repos.contains(repo) {
                return Err(format!("{file} is outside truth_repos"));
            }
            if kb.resolve_file(file).is_none() {
                return Err(format!("{file} is not in the knowledge base"));
            }
        }
        Ok(())
    }
}

/// Parses one JSON ticket per line; blank lines are skipped.
pub fn parse_tickets(text: &str) -> Result<Vec<Ticket>> {
    let mut tickets = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let t = serde_json::from_str(line).map_err(|e| Error::Dataset {
            line: i + 1,
            message: e.to_string(),
        })?;
        tickets.push(t);
    }
    if tickets.is_empty() {
        return Err(Error::Dataset {
            line: 0,
            message: "dataset contains no tickets".into(),
        });
    }
    Ok(tickets)
}

pub fn load_tickets(path: &Path) -> Result<Vec<Ticket>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_tickets(&text)
}

pub fn write_tickets(path: &Path, tickets: &[Ticket]) -> Result<()> {
    let mut out = String::new();
    for t in tickets {
        out.push_str(&serde_json::to_string(t).expect("tickets serialize"));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::tests::{dir, file, repo};
    use chrono::TimeZone;

    fn ticket(repos: &[&str], files: &[&str]) -> Ticket {
        Ticket {
            id: "T".into(),
            title: String::new(),
            body: "broken".into(),
            truth_repos: repos.iter().map(|s| s.to_string()).collect(),
            truth_files: files.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn parse_reports_line_numbers() {
        let ok = r#"{"id":"1","body":"b","truth_repos":["r"],"truth_files":["r/a"]}"#;
        assert_eq!(parse_tickets(&format!("{ok}\n\n{ok}\n")).unwrap().len(), 2);
        match parse_tickets(&format!("{ok}\nnot json\n")) {
            Err(Error::Dataset { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_tickets("\n \n").is_err());
    }

    #[test]
    fn check_against_kb() {
        let mut kb = KnowledgeBase::new(chrono::Utc.timestamp_opt(0, 0).unwrap(), "m");
        kb.repos.push(repo("r", dir("", vec![], vec![file("a.rs")])));
        assert!(ticket(&["r"], &["r/a.rs"]).check(&kb).is_ok());
        assert!(ticket(&["r"], &["r/b.rs"]).check(&kb).unwrap_err().contains("r/b.rs"));
        assert!(ticket(&["q"], &["r/a.rs"]).check(&kb).is_err());
        assert!(ticket(&["r"], &[]).check(&kb).is_err());
    }
}

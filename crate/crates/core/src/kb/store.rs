use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use super::{base_name, join_path, DirNode, KnowledgeBase, RepoTree, SCHEMA_VERSION};
use crate::error::{Error, Result};

/// Writes `kb` as a single pretty-printed JSON document.
///
/// The document goes to a temporary file next to `path` and is renamed into
/// place, so a failed write never leaves a truncated knowledge base behind.
pub fn save(kb: &KnowledgeBase, path: &Path) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(kb).map_err(|source| Error::Document {
        path: path.to_path_buf(),
        source,
    })?;
    bytes.push(b'\n');

    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(parent).map_err(|e| Error::io(parent, e))?;
    tmp.write_all(&bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<KnowledgeBase> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;

    // Check the version before the full parse so that documents written by a
    // newer layout are reported as such rather than as a shape error.
    #[derive(serde::Deserialize)]
    struct Header {
        schema_version: Option<String>,
    }
    let header: Header = serde_json::from_slice(&bytes).map_err(|source| Error::Document {
        path: path.to_path_buf(),
        source,
    })?;
    let found = header.schema_version.unwrap_or_default();
    if found != SCHEMA_VERSION {
        return Err(Error::SchemaVersion {
            found,
            expected: SCHEMA_VERSION.to_string(),
        });
    }

    let kb: KnowledgeBase = serde_json::from_slice(&bytes).map_err(|source| Error::Document {
        path: path.to_path_buf(),
        source,
    })?;
    validate(&kb)?;
    Ok(kb)
}

/// Checks every structural invariant of the model, naming the first one
/// that fails.
pub fn validate(kb: &KnowledgeBase) -> Result<()> {
    if kb.schema_version.is_empty() {
        return Err(Error::Invariant("schema_version is empty".into()));
    }
    if kb.schema_version != SCHEMA_VERSION {
        return Err(Error::SchemaVersion {
            found: kb.schema_version.clone(),
            expected: SCHEMA_VERSION.to_string(),
        });
    }
    let mut ids = HashSet::new();
    for repo in &kb.repos {
        if repo.repo_id.is_empty() || repo.repo_id.contains('/') {
            return Err(Error::Invariant(format!(
                "repo_id {:?} must be a non-empty single path component",
                repo.repo_id
            )));
        }
        if !ids.insert(repo.repo_id.as_str()) {
            return Err(Error::Invariant(format!(
                "duplicate repo_id {:?}",
                repo.repo_id
            )));
        }
        validate_repo(repo)?;
    }
    Ok(())
}

fn validate_repo(repo: &RepoTree) -> Result<()> {
    let id = &repo.repo_id;
    if repo.seed.text.trim().is_empty() {
        return Err(Error::Invariant(format!("{id}: seed summary is empty")));
    }
    if !repo.root.path.is_empty() {
        return Err(Error::Invariant(format!(
            "{id}: root directory path must be empty, found {:?}",
            repo.root.path
        )));
    }
    let mut seen = HashSet::new();
    let mut edges = 0u64;
    validate_dir(id, &repo.root, &mut seen, &mut edges)?;
    if edges != repo.file_count {
        return Err(Error::Invariant(format!(
            "{id}: file_count is {} but {edges} files are reachable",
            repo.file_count
        )));
    }
    Ok(())
}

fn validate_dir<'a>(
    id: &str,
    dir: &'a DirNode,
    seen: &mut HashSet<&'a str>,
    edges: &mut u64,
) -> Result<()> {
    if !seen.insert(dir.path.as_str()) {
        return Err(Error::Invariant(format!(
            "{id}: path {:?} appears more than once",
            dir.path
        )));
    }
    if dir.contains_files() && dir.summary.trim().is_empty() {
        return Err(Error::Invariant(format!(
            "{id}: directory {:?} holds files but has no summary",
            dir.label()
        )));
    }
    check_child_paths(id, dir, dir.subdirs.iter().map(|d| d.path.as_str()))?;
    check_child_paths(id, dir, dir.files.iter().map(|f| f.path.as_str()))?;

    for file in &dir.files {
        if !seen.insert(file.path.as_str()) {
            return Err(Error::Invariant(format!(
                "{id}: path {:?} appears more than once",
                file.path
            )));
        }
        if file.summary.trim().is_empty() {
            return Err(Error::Invariant(format!(
                "{id}: file {:?} has no summary",
                file.path
            )));
        }
        if file.content_hash.len() != 64 || !file.content_hash.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(Error::Invariant(format!(
                "{id}: file {:?} has a malformed content_hash",
                file.path
            )));
        }
        *edges += 1;
    }
    for sub in &dir.subdirs {
        validate_dir(id, sub, seen, edges)?;
    }
    Ok(())
}

/// Children must be direct descendants of `dir`, in strictly increasing order.
fn check_child_paths<'a>(
    id: &str,
    dir: &DirNode,
    paths: impl Iterator<Item = &'a str>,
) -> Result<()> {
    let mut prev: Option<&str> = None;
    for path in paths {
        let name = base_name(path);
        if name.is_empty() || join_path(&dir.path, name) != path {
            return Err(Error::Invariant(format!(
                "{id}: {path:?} is not a direct child of {:?}",
                dir.label()
            )));
        }
        if let Some(p) = prev {
            if p >= path {
                return Err(Error::Invariant(format!(
                    "{id}: children of {:?} are not in lexicographic order ({p:?} before {path:?})",
                    dir.label()
                )));
            }
        }
        prev = Some(path);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::tests::{dir, file, repo};
    use chrono::TimeZone;

    fn kb_with(repos: Vec<RepoTree>) -> KnowledgeBase {
        let mut kb = KnowledgeBase::new(chrono::Utc.timestamp_opt(0, 0).unwrap(), "mock");
        kb.repos = repos;
        kb
    }

    fn two_repos() -> KnowledgeBase {
        kb_with(vec![
            repo(
                "billing",
                dir(
                    "",
                    vec![dir("src", vec![], vec![file("src/A.java"), file("src/B.java")])],
                    vec![file("pom.xml")],
                ),
            ),
            repo(
                "orders",
                dir("", vec![dir("svc", vec![], vec![file("svc/C.java"), file("svc/D.java")])], vec![]),
            ),
        ])
    }

    #[test]
    fn empty_kb_round_trips() {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("kb.json");
        let kb = kb_with(vec![]);
        save(&kb, &path).unwrap();
        assert_eq!(load(&path).unwrap().repos.len(), 0);
    }

    #[test]
    fn round_trip_and_byte_identical() {
        let tmp = tempfile::tempdir().unwrap();
        let kb = two_repos();
        assert_eq!(kb.file_count(), 5);
        let (p1, p2) = (tmp.path().join("a.json"), tmp.path().join("b.json"));
        save(&kb, &p1).unwrap();
        save(&kb, &p2).unwrap();
        assert_eq!(load(&p1).unwrap(), kb);
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }

    #[test]
    fn duplicate_repo_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("kb.json");
        let mut kb = two_repos();
        kb.repos[1].repo_id = "billing".into();
        save(&kb, &path).unwrap();
        let err = load(&path).unwrap_err();
        assert!(matches!(err, Error::Invariant(ref m) if m.contains("duplicate repo_id")), "{err}");
    }

    #[test]
    fn unknown_version_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("kb.json");
        std::fs::write(&path, r#"{"schema_version":"repolens-kb/99","repos":[]}"#).unwrap();
        assert!(matches!(load(&path), Err(Error::SchemaVersion { .. })));
    }

    #[test]
    fn missing_file_reports_path() {
        let err = load(Path::new("/nonexistent/kb.json")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/kb.json"));
    }

    #[test]
    fn invariant_violations() {
        let mut kb = two_repos();
        kb.repos[0].file_count = 4;
        assert!(validate(&kb).unwrap_err().to_string().contains("file_count"));

        let mut kb = two_repos();
        kb.repos[0].root.subdirs[0].files.reverse();
        assert!(validate(&kb).unwrap_err().to_string().contains("lexicographic"));

        let mut kb = two_repos();
        kb.repos[0].root.subdirs[0].summary.clear();
        assert!(validate(&kb).unwrap_err().to_string().contains("no summary"));

        let mut kb = two_repos();
        kb.repos[1].root.subdirs[0].files[0].path = "elsewhere/C.java".into();
        assert!(validate(&kb).unwrap_err().to_string().contains("direct child"));
    }

    #[test]
    fn save_into_missing_dir_fails_cleanly() {
        let err = save(&two_repos(), Path::new("/nonexistent/dir/kb.json")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}

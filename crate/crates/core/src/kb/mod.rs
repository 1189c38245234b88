//! Hierarchical knowledge base: a repository seed summary at the root of each
//! tree, directory summaries as intermediate nodes and file summaries as
//! leaves.
//!
//! Every child collection is kept in lexicographic order so that iteration
//! and serialization are deterministic. The root directory of a repository
//! has the empty path `""`; [`DirNode::label`] renders it as `"."`.

mod store;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

pub use store::{load, save, validate};

/// Version tag written into every document. `load` rejects anything else.
pub const SCHEMA_VERSION: &str = "repolens-kb/1";

/// Label used for a repository's root directory in prompts and selectors.
pub const ROOT_LABEL: &str = ".";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnowledgeBase {
    pub schema_version: String,
    pub created_at: DateTime<Utc>,
    pub generator_model_id: String,
    pub repos: Vec<RepoTree>,
}

impl KnowledgeBase {
    pub fn new(created_at: DateTime<Utc>, generator_model_id: impl Into<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            created_at,
            generator_model_id: generator_model_id.into(),
            repos: Vec::new(),
        }
    }

    pub fn repo(&self, repo_id: &str) -> Option<&RepoTree> {
        self.repos.iter().find(|r| r.repo_id == repo_id)
    }

    pub fn repo_ids(&self) -> impl Iterator<Item = &str> {
        self.repos.iter().map(|r| r.repo_id.as_str())
    }

    /// Resolves a `"repo_id/path"` label to its file node.
    pub fn resolve_file(&self, label: &str) -> Option<(&RepoTree, &FileNode)> {
        let (repo_id, path) = label.split_once('/')?;
        let repo = self.repo(repo_id)?;
        repo.find_file(path).map(|f| (repo, f))
    }

    pub fn file_count(&self) -> u64 {
        self.repos.iter().map(|r| r.file_count).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepoTree {
    pub repo_id: String,
    pub seed: RepoSummary,
    pub root: DirNode,
    pub file_count: u64,
    pub total_loc: u64,
}

impl RepoTree {
    /// All files, depth-first, children visited in lexicographic name order.
    pub fn walk_files(&self) -> Vec<&FileNode> {
        let mut out = Vec::with_capacity(self.file_count as usize);
        self.root.collect_files(&mut out);
        out
    }

    /// Directories in post-order: every directory after all of its
    /// subdirectories.
    pub fn dirs_post_order(&self) -> Vec<&DirNode> {
        let mut out = Vec::new();
        self.root.collect_post_order(&mut out);
        out
    }

    pub fn find_dir(&self, path: &str) -> Option<&DirNode> {
        let path = normalize_dir_path(path);
        let mut node = &self.root;
        if path.is_empty() {
            return Some(node);
        }
        let mut prefix = String::new();
        for part in path.split('/') {
            prefix = join_path(&prefix, part);
            node = node.subdirs.iter().find(|d| d.path == prefix)?;
        }
        Some(node)
    }

    pub fn find_file(&self, path: &str) -> Option<&FileNode> {
        let parent = parent_path(path);
        self.find_dir(parent)?.files.iter().find(|f| f.path == path)
    }

    /// Directories that directly hold at least one file. These are the
    /// candidates for directory-level filtering.
    pub fn file_bearing_dirs(&self) -> Vec<&DirNode> {
        let mut out: Vec<&DirNode> = Vec::new();
        self.root.collect_pre_order(&mut out);
        out.retain(|d| !d.files.is_empty());
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepoSummary {
    pub text: String,
    pub token_estimate: u64,
    pub inputs_digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirNode {
    pub path: String,
    pub summary: String,
    pub subdirs: Vec<DirNode>,
    pub files: Vec<FileNode>,
}

impl DirNode {
    pub fn new(path: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            summary: String::new(),
            subdirs: Vec::new(),
            files: Vec::new(),
        }
    }

    /// Display label: the path, or `"."` for the repository root.
    pub fn label(&self) -> &str {
        if self.path.is_empty() {
            ROOT_LABEL
        } else {
            &self.path
        }
    }

    pub fn file_count(&self) -> u64 {
        self.files.len() as u64 + self.subdirs.iter().map(DirNode::file_count).sum::<u64>()
    }

    pub fn contains_files(&self) -> bool {
        !self.files.is_empty() || self.subdirs.iter().any(DirNode::contains_files)
    }

    fn collect_files<'a>(&'a self, out: &mut Vec<&'a FileNode>) {
        // Merge the two sorted child lists by name so that `a/x`, `a/y`, `b`
        // come out in name order regardless of node kind.
        let mut dirs = self.subdirs.iter().peekable();
        let mut files = self.files.iter().peekable();
        loop {
            match (dirs.peek(), files.peek()) {
                (Some(d), Some(f)) => {
                    if base_name(&d.path) <= base_name(&f.path) {
                        dirs.next().unwrap().collect_files(out);
                    } else {
                        out.push(files.next().unwrap());
                    }
                }
                (Some(_), None) => dirs.next().unwrap().collect_files(out),
                (None, Some(_)) => out.push(files.next().unwrap()),
                (None, None) => break,
            }
        }
    }

    fn collect_post_order<'a>(&'a self, out: &mut Vec<&'a DirNode>) {
        for d in &self.subdirs {
            d.collect_post_order(out);
        }
        out.push(self);
    }

    fn collect_pre_order<'a>(&'a self, out: &mut Vec<&'a DirNode>) {
        out.push(self);
        for d in &self.subdirs {
            d.collect_pre_order(out);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileNode {
    pub path: String,
    pub language_tag: String,
    pub summary: String,
    pub content_hash: String,
    pub loc: u64,
}

/// Joins a repository-relative directory path and a child name.
pub fn join_path(parent: &str, name: &str) -> String {
    if parent.is_empty() {
        name.to_string()
    } else {
        format!("{parent}/{name}")
    }
}

pub fn parent_path(path: &str) -> &str {
    path.rsplit_once('/').map(|(p, _)| p).unwrap_or("")
}

pub fn base_name(path: &str) -> &str {
    path.rsplit_once('/').map(|(_, n)| n).unwrap_or(path)
}

fn normalize_dir_path(path: &str) -> &str {
    let path = path.trim_end_matches('/');
    if path == ROOT_LABEL {
        ""
    } else {
        path.strip_prefix("./").unwrap_or(path)
    }
}

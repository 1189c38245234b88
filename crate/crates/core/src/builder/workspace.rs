//! Reading a workspace of repositories from disk.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use globset::{Glob, GlobSet, GlobSetBuilder};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kb::base_name;
use crate::llm::estimate_tokens;

/// Marker line appended wherever content was cut to fit a budget.
pub const TRUNCATION_MARKER: &str = "[... truncated ...]";

const SKIPPED_HEADER: &str = "skipped (requires multimodal pipeline):";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorkspaceSpec {
    /// Directory holding one subdirectory per repository.
    #[serde(skip)]
    pub root: PathBuf,
    pub include_globs: Vec<String>,
    pub exclude_globs: Vec<String>,
    pub source_extensions: BTreeSet<String>,
    /// File-name patterns treated as documentation.
    pub attachment_names: Vec<String>,
    pub respect_gitignore: bool,
}

impl Default for WorkspaceSpec {
    fn default() -> Self {
        let exts = [
            "java", "kt", "kts", "scala", "groovy", "rs", "go", "py", "rb", "php", "js", "jsx", "ts", "tsx",
            "c", "h", "cc", "cpp", "hpp", "cs", "swift", "sql",
        ];
        Self {
            root: PathBuf::new(),
            include_globs: vec!["**".into()],
            exclude_globs: vec![
                "**/target/**".into(),
                "**/build/**".into(),
                "**/node_modules/**".into(),
                "**/dist/**".into(),
            ],
            source_extensions: exts.iter().map(|s| s.to_string()).collect(),
            attachment_names: [
                "README*", "*.md", "*.txt", "*.rst", "*.adoc", "*.puml", "*.png", "*.jpg", "*.jpeg", "*.gif",
                "*.svg", "*.pdf",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
            respect_gitignore: true,
        }
    }
}

impl WorkspaceSpec {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self {
            root: root.into(),
            ..Self::default()
        }
    }

    /// Repository ids and roots, sorted by id. Hidden directories are skipped.
    pub fn repositories(&self) -> Result<Vec<(String, PathBuf)>> {
        let entries = std::fs::read_dir(&self.root).map_err(|e| Error::io(&self.root, e))?;
        let mut repos = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(&self.root, e))?;
            let name = entry.file_name().to_string_lossy().into_owned();
            if name.starts_with('.') {
                continue;
            }
            let path = entry.path();
            let ft = entry.file_type().map_err(|e| Error::io(&path, e))?;
            // A symlink whose target is gone still names a repository; reading
            // it fails later and is reported as a repository failure.
            if path.is_dir() || ft.is_symlink() {
                repos.push((name, path));
            }
        }
        repos.sort();
        Ok(repos)
    }

    fn matchers(&self) -> Result<Matchers> {
        Ok(Matchers {
            include: glob_set(&self.include_globs, false)?,
            exclude: glob_set(&self.exclude_globs, false)?,
            attachments: glob_set(&self.attachment_names, true)?,
        })
    }
}

struct Matchers {
    include: GlobSet,
    exclude: GlobSet,
    attachments: GlobSet,
}

impl Matchers {
    fn excluded_dir(&self, rel: &str) -> bool {
        self.exclude.is_match(rel) || self.exclude.is_match(format!("{rel}/_"))
    }
}

fn glob_set(patterns: &[String], case_insensitive: bool) -> Result<GlobSet> {
    let mut b = GlobSetBuilder::new();
    for p in patterns {
        let glob = globset::GlobBuilder::new(p)
            .case_insensitive(case_insensitive)
            .literal_separator(false)
            .build()
            .or_else(|_| Glob::new(p))
            .map_err(|e| Error::Config(format!("bad glob {p:?}: {e}")))?;
        b.add(glob);
    }
    b.build().map_err(|e| Error::Config(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Source,
    Attachment,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScannedFile {
    /// Repository-relative path with `/` separators.
    pub path: String,
    pub kind: FileKind,
}

/// Everything the builder needs to know about one repository's layout.
#[derive(Debug, Clone)]
pub struct RepoScan {
    pub repo_id: String,
    pub root: PathBuf,
    /// Included files in repository-relative path order.
    pub files: Vec<ScannedFile>,
    /// Every included directory except the root, sorted.
    pub dirs: Vec<String>,
    pub warnings: Vec<String>,
}

impl RepoScan {
    pub fn scan(repo_id: &str, root: &Path, spec: &WorkspaceSpec) -> Result<Self> {
        std::fs::read_dir(root).map_err(|e| Error::io(root, e))?;
        let m = spec.matchers()?;

        let root_buf = root.to_path_buf();
        let filter_root = root_buf.clone();
        let exclude = m.exclude.clone();
        let walker = ignore::WalkBuilder::new(root)
            .hidden(true)
            .parents(false)
            .git_ignore(spec.respect_gitignore)
            .git_exclude(false)
            .git_global(false)
            .ignore(false)
            .require_git(false)
            .follow_links(false)
            .filter_entry(move |e| {
                let Ok(rel) = e.path().strip_prefix(&filter_root) else { return true };
                let rel = rel_string(rel);
                if rel.is_empty() || !e.file_type().is_some_and(|t| t.is_dir()) {
                    return true;
                }
                !(exclude.is_match(&rel) || exclude.is_match(format!("{rel}/_")))
            })
            .build();

        let mut files = Vec::new();
        let mut dirs = Vec::new();
        let mut warnings = Vec::new();
        for entry in walker {
            let entry = match entry {
                Ok(e) => e,
                Err(e) => {
                    warnings.push(format!("{repo_id}: {e}"));
                    continue;
                }
            };
            let rel = rel_string(entry.path().strip_prefix(&root_buf).unwrap_or(entry.path()));
            if rel.is_empty() {
                continue;
            }
            let Some(ft) = entry.file_type() else { continue };
            if ft.is_dir() {
                if !m.excluded_dir(&rel) {
                    dirs.push(rel);
                }
                continue;
            }
            if !ft.is_file() || !m.include.is_match(&rel) || m.exclude.is_match(&rel) {
                continue;
            }
            let name = base_name(&rel);
            let ext = name.rsplit_once('.').map(|(_, e)| e.to_ascii_lowercase());
            let kind = if ext.as_deref().is_some_and(|e| spec.source_extensions.contains(e)) {
                FileKind::Source
            } else if m.attachments.is_match(name) {
                FileKind::Attachment
            } else {
                FileKind::Other
            };
            files.push(ScannedFile { path: rel, kind });
        }
        files.sort_by(|a, b| path_order(&a.path, &b.path));
        dirs.sort_by(|a, b| path_order(a, b));
        Ok(Self {
            repo_id: repo_id.to_string(),
            root: root.to_path_buf(),
            files,
            dirs,
            warnings,
        })
    }

    pub fn sources(&self) -> impl Iterator<Item = &ScannedFile> {
        self.files.iter().filter(|f| f.kind == FileKind::Source)
    }

    pub fn attachments(&self) -> impl Iterator<Item = &ScannedFile> {
        self.files.iter().filter(|f| f.kind == FileKind::Attachment)
    }

    pub fn abs(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }
}

fn rel_string(p: &Path) -> String {
    p.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

/// Component-wise ordering, matching depth-first lexicographic traversal.
pub fn path_order(a: &str, b: &str) -> std::cmp::Ordering {
    a.split('/').cmp(b.split('/'))
}

/// Indented listing: the repository root line, then directories before files
/// at every level, each group in lexicographic order.
pub fn render_repo_tree(scan: &RepoScan) -> String {
    #[derive(Default)]
    struct Node {
        dirs: std::collections::BTreeMap<String, Node>,
        files: BTreeSet<String>,
    }
    fn node_at<'a>(root: &'a mut Node, parts: &[&str]) -> &'a mut Node {
        parts
            .iter()
            .fold(root, |n, p| n.dirs.entry((*p).to_string()).or_default())
    }
    let mut root = Node::default();
    for d in &scan.dirs {
        let parts: Vec<&str> = d.split('/').collect();
        node_at(&mut root, &parts);
    }
    for f in &scan.files {
        let parts: Vec<&str> = f.path.split('/').collect();
        let (name, parents) = parts.split_last().unwrap();
        node_at(&mut root, parents).files.insert((*name).to_string());
    }
    fn emit(node: &Node, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        for (name, child) in &node.dirs {
            out.push_str(&format!("{pad}{name}/\n"));
            emit(child, depth + 1, out);
        }
        for name in &node.files {
            out.push_str(&format!("{pad}{name}\n"));
        }
    }
    let mut out = format!("{}/\n", scan.repo_id);
    emit(&root, 1, &mut out);
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Linearized {
    pub text: String,
    /// Files whose content was cut to the per-file share.
    pub truncated: Vec<String>,
    /// Files left out entirely because even their headers did not fit.
    pub omitted: Vec<String>,
    pub warnings: Vec<String>,
}

fn file_header(path: &str) -> String {
    format!("=== {path} ===\n")
}

fn with_newline(mut s: String) -> String {
    if !s.is_empty() && !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

pub(crate) fn read_text(path: &Path) -> std::io::Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

/// Concatenation of `=== path ===` blocks for every source file.
///
/// When the whole text would exceed `token_budget`, each file keeps only the
/// head of its content, all files getting the same character share, and a
/// truncation marker line is added to every cut block.
pub fn linearize(scan: &RepoScan, token_budget: u64) -> Linearized {
    let mut out = Linearized::default();
    let mut blocks: Vec<(String, String)> = Vec::new();
    for f in scan.sources() {
        match read_text(&scan.abs(&f.path)) {
            Ok(text) => blocks.push((f.path.clone(), with_newline(text))),
            Err(e) => out.warnings.push(format!("{}/{}: skipped unreadable file: {e}", scan.repo_id, f.path)),
        }
    }

    let full: String = blocks
        .iter()
        .map(|(p, c)| format!("{}{c}", file_header(p)))
        .collect();
    if estimate_tokens(&full) <= token_budget {
        out.text = full;
        return out;
    }

    let budget_chars = (token_budget as usize).saturating_mul(4);
    let marker_len = TRUNCATION_MARKER.chars().count() + 1;
    let headers: Vec<usize> = blocks.iter().map(|(p, _)| file_header(p).chars().count()).collect();

    // Keep as many whole headers (plus a marker each) as fit, then split the
    // remainder evenly among the kept files.
    let omitted_line = |n: usize| format!("[... {n} more files omitted ...]\n");
    let mut kept = blocks.len();
    loop {
        let omitted = blocks.len() - kept;
        let tail = if omitted > 0 { omitted_line(omitted).chars().count() } else { 0 };
        let fixed: usize = headers[..kept].iter().sum::<usize>() + kept * marker_len + tail;
        if fixed <= budget_chars || kept == 0 {
            break;
        }
        kept -= 1;
    }
    let omitted = blocks.len() - kept;
    let tail = if omitted > 0 { omitted_line(omitted) } else { String::new() };
    let fixed: usize = headers[..kept].iter().sum::<usize>() + kept * marker_len + tail.chars().count();
    let share = budget_chars.saturating_sub(fixed).checked_div(kept).unwrap_or(0);

    let mut text = String::new();
    for (path, content) in &blocks[..kept] {
        text.push_str(&file_header(path));
        if content.chars().count() <= share {
            text.push_str(content);
        } else {
            let head: String = content.chars().take(share.saturating_sub(1)).collect();
            text.push_str(&head);
            if !head.is_empty() {
                text.push('\n');
            }
            text.push_str(TRUNCATION_MARKER);
            text.push('\n');
            out.truncated.push(path.clone());
        }
    }
    text.push_str(&tail);
    out.omitted = blocks[kept..].iter().map(|(p, _)| p.clone()).collect();
    if !out.omitted.is_empty() {
        out.warnings.push(format!(
            "{}: {} files omitted from the seed source to respect the budget",
            scan.repo_id,
            out.omitted.len()
        ));
    }
    out.text = text;
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Attachments {
    pub text: String,
    pub skipped: Vec<String>,
}

fn is_image_name(name: &str) -> bool {
    let lower = name.to_ascii_lowercase();
    [".png", ".jpg", ".jpeg", ".gif", ".bmp", ".svg", ".pdf", ".tif", ".tiff", ".webp"]
        .iter()
        .any(|ext| lower.ends_with(ext))
}

/// Text of every documentation file under a `=== path ===` header. Images
/// and other binary files are listed in a trailing skip section instead.
pub fn ingest_attachments(scan: &RepoScan) -> Attachments {
    let mut out = Attachments::default();
    for f in scan.attachments() {
        let path = scan.abs(&f.path);
        let text = if is_image_name(&f.path) {
            None
        } else {
            std::fs::read(&path)
                .ok()
                .filter(|b| !b.iter().take(8192).any(|&c| c == 0))
                .and_then(|b| String::from_utf8(b).ok())
        };
        match text {
            Some(t) => {
                out.text.push_str(&file_header(&f.path));
                out.text.push_str(&with_newline(t));
            }
            None => out.skipped.push(f.path.clone()),
        }
    }
    if !out.skipped.is_empty() {
        out.text.push_str(SKIPPED_HEADER);
        out.text.push('\n');
        for s in &out.skipped {
            out.text.push_str(&format!("- {s}\n"));
        }
    }
    out
}

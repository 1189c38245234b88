//! Offline knowledge-base construction.
//!
//! For each repository the builder first generates the seed context from
//! the repository tree, a linearized copy of the source and the text
//! attachments. Every file is then summarized with the seed in its prompt,
//! and finally directories are summarized bottom-up from their children.
//! [`incremental_update`] reuses every summary whose inputs are unchanged.

mod cost;
pub mod workspace;

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use chrono::{DateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::kb::{join_path, parent_path, DirNode, FileNode, KnowledgeBase, RepoSummary, RepoTree, ROOT_LABEL};
use crate::llm::{estimate_tokens, ChatRequest, Gateway, LlmError, ModelParams, RequestKind};
use crate::prompts::{PromptCatalog, TemplateId};

pub use cost::{estimate_build_cost, BuildCostEstimate, StageTokens};
pub use workspace::{
    ingest_attachments, linearize, render_repo_tree, Attachments, FileKind, Linearized, RepoScan, WorkspaceSpec,
    TRUNCATION_MARKER,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BuildBudget {
    /// Cap on the linearized source fed to seed generation.
    pub seed_source_token_budget: u64,
    /// Cap on each rendered file-summary prompt.
    pub file_token_budget: u64,
    pub summary_max_tokens: u32,
}

impl Default for BuildBudget {
    fn default() -> Self {
        Self {
            seed_source_token_budget: 60_000,
            file_token_budget: 8_000,
            summary_max_tokens: 400,
        }
    }
}

impl BuildBudget {
    pub fn validate(&self) -> Result<()> {
        if self.seed_source_token_budget == 0 || self.file_token_budget == 0 || self.summary_max_tokens == 0 {
            return Err(Error::Config("build budgets must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Seed,
    File,
    Directory,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Seed => "seed",
            Stage::File => "file",
            Stage::Directory => "directory",
        }
    }
}

/// One line of the build log: one gateway call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildLogEntry {
    pub stage: Stage,
    pub repo_id: String,
    /// Repository-relative path (`"."` for the root and for seed calls).
    pub path: String,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub duration_ms: u64,
}

impl BuildLogEntry {
    pub fn to_line(&self) -> String {
        format!(
            "{}\t{}/{}\t{}\t{}\t{}",
            self.stage.as_str(),
            self.repo_id,
            self.path,
            self.prompt_tokens,
            self.completion_tokens,
            self.duration_ms
        )
    }
}

#[derive(Debug, Clone)]
pub struct BuildOutput {
    pub kb: KnowledgeBase,
    /// Calls in completion order.
    pub log: Vec<BuildLogEntry>,
    pub warnings: Vec<String>,
}

impl BuildOutput {
    pub fn stage_totals(&self) -> BTreeMap<Stage, StageTokens> {
        let mut totals = BTreeMap::new();
        for e in &self.log {
            let t: &mut StageTokens = totals.entry(e.stage).or_default();
            t.calls += 1;
            t.prompt_tokens += e.prompt_tokens;
            t.completion_tokens += e.completion_tokens;
        }
        totals
    }

    pub fn log_text(&self) -> String {
        self.log.iter().map(|e| e.to_line() + "\n").collect()
    }
}

/// Everything a summarization call needs besides its inputs.
#[derive(Debug, Clone, Copy)]
pub struct BuildContext<'a> {
    pub gateway: &'a Gateway,
    pub prompts: &'a PromptCatalog,
    pub model: &'a ModelParams,
    pub budget: BuildBudget,
    /// Timestamp for the produced knowledge base. When unset, the
    /// `SOURCE_DATE_EPOCH` environment variable is honoured, then the clock.
    pub created_at: Option<DateTime<Utc>>,
}

impl<'a> BuildContext<'a> {
    pub fn new(gateway: &'a Gateway, prompts: &'a PromptCatalog, model: &'a ModelParams, budget: BuildBudget) -> Self {
        Self {
            gateway,
            prompts,
            model,
            budget,
            created_at: None,
        }
    }

    pub fn created_at(mut self, at: DateTime<Utc>) -> Self {
        self.created_at = Some(at);
        self
    }

    fn timestamp(&self) -> DateTime<Utc> {
        if let Some(at) = self.created_at {
            return at;
        }
        std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.trim().parse::<i64>().ok())
            .and_then(|secs| Utc.timestamp_opt(secs, 0).single())
            .unwrap_or_else(Utc::now)
    }

    fn request(&self, system: String, user: String, kind: RequestKind) -> ChatRequest {
        let mut req = self.model.request(system, user, kind);
        req.max_output_tokens = self.budget.summary_max_tokens;
        req
    }

    /// One summarize call; an empty completion is retried once.
    fn summarize(&self, req: &ChatRequest, what: &str) -> Result<(String, u64, u64)> {
        for _ in 0..2 {
            let resp = self.gateway.complete(req)?;
            let text = resp.text.trim();
            if !text.is_empty() {
                return Ok((text.to_string(), resp.prompt_tokens, resp.completion_tokens));
            }
        }
        Err(Error::Llm(LlmError::Malformed(format!("empty summary for {what} after one retry"))))
    }
}

/// Collects build log entries from concurrent workers.
#[derive(Default)]
struct Session {
    log: Mutex<Vec<BuildLogEntry>>,
}

impl Session {
    fn record(&self, stage: Stage, repo_id: &str, path: &str, tokens: (u64, u64), started: Instant) {
        self.log.lock().unwrap().push(BuildLogEntry {
            stage,
            repo_id: repo_id.to_string(),
            path: if path.is_empty() { ROOT_LABEL.to_string() } else { path.to_string() },
            prompt_tokens: tokens.0,
            completion_tokens: tokens.1,
            duration_ms: started.elapsed().as_millis() as u64,
        });
    }
}

/// SHA-256 over length-prefixed parts, hex-encoded.
pub fn inputs_digest(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    hex::encode(h.finalize())
}

pub fn content_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Physical lines.
pub fn count_lines(text: &str) -> u64 {
    if text.is_empty() {
        0
    } else {
        text.lines().count() as u64
    }
}

pub fn language_tag(path: &str) -> String {
    let ext = path.rsplit_once('.').map(|(_, e)| e.to_ascii_lowercase()).unwrap_or_default();
    let tag = match ext.as_str() {
        "java" => "java",
        "kt" | "kts" => "kotlin",
        "rs" => "rust",
        "py" => "python",
        "go" => "go",
        "js" | "jsx" => "javascript",
        "ts" | "tsx" => "typescript",
        "c" | "h" => "c",
        "cc" | "cpp" | "hpp" => "cpp",
        "cs" => "csharp",
        "rb" => "ruby",
        "scala" => "scala",
        "groovy" => "groovy",
        "swift" => "swift",
        "php" => "php",
        "sql" => "sql",
        "" => "text",
        other => other,
    };
    tag.to_string()
}

/// Generates the repository seed context with the repository-summary template.
pub fn build_seed_context(
    repo_id: &str,
    tree_text: &str,
    linearized_source: &str,
    attachments_text: &str,
    ctx: &BuildContext<'_>,
) -> Result<RepoSummary> {
    Ok(seed_call(repo_id, tree_text, linearized_source, attachments_text, ctx)?.0)
}

fn seed_call(
    repo_id: &str,
    tree_text: &str,
    source: &str,
    attachments: &str,
    ctx: &BuildContext<'_>,
) -> Result<(RepoSummary, (u64, u64))> {
    if tree_text.trim().is_empty() {
        return Err(Error::Precondition("repository tree text is empty".into()));
    }
    let attachments_value = if attachments.trim().is_empty() { "(none)" } else { attachments };
    let prompt = ctx.prompts.render(
        TemplateId::RepoSummary,
        &[
            ("repo_id", repo_id),
            ("tree", tree_text),
            ("source", source),
            ("attachments", attachments_value),
        ],
    )?;
    let req = ctx.request(
        prompt.system,
        prompt.user,
        RequestKind::Summarize {
            source: format!("{tree_text}\n{attachments}\n{source}"),
            seed: None,
        },
    );
    let (text, p, c) = ctx.summarize(&req, &format!("repository {repo_id}"))?;
    let summary = RepoSummary {
        token_estimate: estimate_tokens(&text),
        inputs_digest: inputs_digest(&[tree_text, source, attachments]),
        text,
    };
    Ok((summary, (p, c)))
}

fn seed_value(seed: Option<&RepoSummary>) -> &str {
    seed.map(|s| s.text.as_str()).unwrap_or("(none)")
}

/// Renders the file-summary request, head-truncating `content` so that the
/// prompt estimate stays within `file_token_budget`.
pub fn file_request(
    path: &str,
    content: &str,
    seed: Option<&RepoSummary>,
    ctx: &BuildContext<'_>,
) -> Result<ChatRequest> {
    let language = language_tag(path);
    let render = |content: &str| {
        ctx.prompts.render(
            TemplateId::FileSummary,
            &[("seed", seed_value(seed)), ("path", path), ("language", &language), ("content", content)],
        )
    };
    let empty = render("")?;
    let budget = ctx.budget.file_token_budget;
    let system_tokens = estimate_tokens(&empty.system);
    let user_capacity = budget.saturating_sub(system_tokens) as usize * 4;
    let overhead = empty.user.chars().count();
    let marker = TRUNCATION_MARKER.chars().count() + 1;
    if overhead + marker >= user_capacity {
        return Err(Error::Precondition(format!(
            "file_token_budget {budget} leaves no room for the content of {path}"
        )));
    }
    let available = user_capacity - overhead;

    let body = if content.chars().count() <= available {
        content.to_string()
    } else {
        let head: String = content.chars().take(available - marker).collect();
        format!("{head}\n{TRUNCATION_MARKER}")
    };
    let prompt = render(&body)?;
    Ok(ctx.request(
        prompt.system,
        prompt.user,
        RequestKind::Summarize {
            source: body,
            seed: seed.map(|s| s.text.clone()),
        },
    ))
}

/// Summarizes one file in the context of its repository seed. Passing no
/// seed produces an isolated summary.
pub fn summarize_file(path: &str, content: &str, seed: Option<&RepoSummary>, ctx: &BuildContext<'_>) -> Result<String> {
    let req = file_request(path, content, seed, ctx)?;
    Ok(ctx.summarize(&req, path)?.0)
}

/// A summarized child of a directory, file or subdirectory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChildSummary {
    pub path: String,
    pub is_dir: bool,
    pub summary: String,
}

pub fn directory_request(
    dir_path: &str,
    child_files: &[ChildSummary],
    child_dirs: &[ChildSummary],
    seed: Option<&RepoSummary>,
    ctx: &BuildContext<'_>,
) -> Result<ChatRequest> {
    if child_files.is_empty() && child_dirs.is_empty() {
        return Err(Error::Precondition(format!("directory {dir_path:?} has no summarized children")));
    }
    let mut children: Vec<&ChildSummary> = child_files.iter().chain(child_dirs).collect();
    children.sort_by(|a, b| workspace::path_order(&a.path, &b.path));
    let block: String = children
        .iter()
        .map(|c| {
            let kind = if c.is_dir { "directory" } else { "file" };
            format!("- {} ({kind}): {}\n", c.path, c.summary)
        })
        .collect();
    let label = if dir_path.is_empty() { ROOT_LABEL } else { dir_path };
    let prompt = ctx.prompts.render(
        TemplateId::DirSummary,
        &[("seed", seed_value(seed)), ("path", label), ("children", &block)],
    )?;
    Ok(ctx.request(
        prompt.system,
        prompt.user,
        RequestKind::Summarize {
            source: block,
            seed: seed.map(|s| s.text.clone()),
        },
    ))
}

pub fn summarize_directory(
    dir_path: &str,
    child_files: &[ChildSummary],
    child_dirs: &[ChildSummary],
    seed: Option<&RepoSummary>,
    ctx: &BuildContext<'_>,
) -> Result<String> {
    let req = directory_request(dir_path, child_files, child_dirs, seed, ctx)?;
    Ok(ctx.summarize(&req, dir_path)?.0)
}

/// Builds a knowledge base for every repository in the workspace.
pub fn build_knowledge_base(spec: &WorkspaceSpec, ctx: &BuildContext<'_>) -> Result<BuildOutput> {
    run_build(spec, None, ctx)
}

/// Rebuilds only what changed since `kb` was produced: file summaries whose
/// content hash differs, directories with a changed descendant, and seeds
/// whose inputs digest differs.
pub fn incremental_update(kb: &KnowledgeBase, spec: &WorkspaceSpec, ctx: &BuildContext<'_>) -> Result<BuildOutput> {
    run_build(spec, Some(kb), ctx)
}

fn run_build(spec: &WorkspaceSpec, previous: Option<&KnowledgeBase>, ctx: &BuildContext<'_>) -> Result<BuildOutput> {
    ctx.budget.validate()?;
    let repos = spec.repositories()?;
    if repos.is_empty() {
        return Err(Error::Precondition(format!(
            "workspace {} contains no repositories",
            spec.root.display()
        )));
    }

    let session = Session::default();
    let mut completed = Vec::new();
    let mut trees = Vec::new();
    let mut warnings = Vec::new();
    for (repo_id, root) in &repos {
        let prev = previous.and_then(|kb| kb.repo(repo_id));
        let built = RepoScan::scan(repo_id, root, spec).and_then(|scan| {
            warnings.extend(scan.warnings.iter().cloned());
            build_repo(&scan, prev, ctx, &session, &mut warnings)
        });
        match built {
            Ok(tree) => {
                completed.push(repo_id.clone());
                trees.push(tree);
            }
            Err(e) => {
                return Err(Error::BuildAborted {
                    repo: repo_id.clone(),
                    reason: e.to_string(),
                    completed,
                })
            }
        }
    }

    let log = session.log.into_inner().unwrap();
    let kb = match previous {
        Some(prev) if log.is_empty() && prev.repos == trees => prev.clone(),
        _ => {
            let mut kb = KnowledgeBase::new(ctx.timestamp(), ctx.model.model_id.clone());
            kb.repos = trees;
            kb
        }
    };
    Ok(BuildOutput { kb, log, warnings })
}

struct SourceFile {
    path: String,
    text: String,
    hash: String,
    loc: u64,
}

fn build_repo(
    scan: &RepoScan,
    previous: Option<&RepoTree>,
    ctx: &BuildContext<'_>,
    session: &Session,
    warnings: &mut Vec<String>,
) -> Result<RepoTree> {
    let repo_id = scan.repo_id.as_str();

    let tree_text = render_repo_tree(scan);
    let lin = linearize(scan, ctx.budget.seed_source_token_budget);
    warnings.extend(lin.warnings.iter().cloned());
    let att = ingest_attachments(scan);
    let digest = inputs_digest(&[&tree_text, &lin.text, &att.text]);

    let seed = match previous {
        Some(prev) if prev.seed.inputs_digest == digest => prev.seed.clone(),
        _ => {
            let started = Instant::now();
            let (seed, tokens) = seed_call(repo_id, &tree_text, &lin.text, &att.text, ctx)?;
            session.record(Stage::Seed, repo_id, "", tokens, started);
            seed
        }
    };

    let mut sources = Vec::new();
    for f in scan.sources() {
        match std::fs::read(scan.abs(&f.path)) {
            Ok(bytes) => {
                let text = String::from_utf8_lossy(&bytes).into_owned();
                sources.push(SourceFile {
                    hash: content_hash(&bytes),
                    loc: count_lines(&text),
                    path: f.path.clone(),
                    text,
                });
            }
            Err(e) => warnings.push(format!("{repo_id}/{}: skipped unreadable file: {e}", f.path)),
        }
    }

    let prev_files: HashMap<&str, &FileNode> = previous
        .map(|p| p.walk_files().into_iter().map(|f| (f.path.as_str(), f)).collect())
        .unwrap_or_default();
    let pending: Vec<&SourceFile> = sources
        .iter()
        .filter(|s| prev_files.get(s.path.as_str()).is_none_or(|f| f.content_hash != s.hash))
        .collect();
    let fresh = summarize_files_concurrently(repo_id, &pending, &seed, ctx, session)?;

    let mut nodes: Vec<(FileNode, bool)> = Vec::with_capacity(sources.len());
    for s in &sources {
        let (summary, changed) = match fresh.get(s.path.as_str()) {
            Some(text) => (text.clone(), true),
            None => (prev_files[s.path.as_str()].summary.clone(), false),
        };
        nodes.push((
            FileNode {
                path: s.path.clone(),
                language_tag: language_tag(&s.path),
                summary,
                content_hash: s.hash.clone(),
                loc: s.loc,
            },
            changed,
        ));
    }

    let prev_root = previous.map(|p| &p.root);
    let (root, _) = assemble_dir("", nodes, prev_root, &seed, ctx, session, repo_id)?;
    let total_loc = sources.iter().map(|s| s.loc).sum();
    Ok(RepoTree {
        repo_id: repo_id.to_string(),
        seed,
        file_count: root.file_count(),
        total_loc,
        root,
    })
}

fn summarize_files_concurrently<'s>(
    repo_id: &str,
    pending: &[&'s SourceFile],
    seed: &RepoSummary,
    ctx: &BuildContext<'_>,
    session: &Session,
) -> Result<HashMap<&'s str, String>> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<String>>>> = Mutex::new((0..pending.len()).map(|_| None).collect());
    let workers = ctx.gateway.max_inflight().min(pending.len()).max(1);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(file) = pending.get(i) else { break };
                let started = Instant::now();
                let out = file_request(&file.path, &file.text, Some(seed), ctx)
                    .and_then(|req| ctx.summarize(&req, &file.path))
                    .map(|(text, p, c)| {
                        session.record(Stage::File, repo_id, &file.path, (p, c), started);
                        text
                    });
                results.lock().unwrap()[i] = Some(out);
            });
        }
    });
    let mut out = HashMap::with_capacity(pending.len());
    for (file, r) in pending.iter().zip(results.into_inner().unwrap()) {
        let text = r.expect("every pending file is processed")?;
        out.insert(file.path.as_str(), text);
    }
    Ok(out)
}

/// Builds the directory at `path` from the files beneath it, summarizing it
/// after all of its subdirectories. Returns the node and whether its summary
/// was regenerated.
#[allow(clippy::too_many_arguments)]
fn assemble_dir(
    path: &str,
    files: Vec<(FileNode, bool)>,
    previous: Option<&DirNode>,
    seed: &RepoSummary,
    ctx: &BuildContext<'_>,
    session: &Session,
    repo_id: &str,
) -> Result<(DirNode, bool)> {
    let mut direct = Vec::new();
    let mut by_child: BTreeMap<String, Vec<(FileNode, bool)>> = BTreeMap::new();
    for (f, changed) in files {
        let parent = parent_path(&f.path);
        if parent == path {
            direct.push((f, changed));
        } else {
            let rest = if path.is_empty() { parent } else { &parent[path.len() + 1..] };
            let child = join_path(path, rest.split('/').next().unwrap());
            by_child.entry(child).or_default().push((f, changed));
        }
    }

    let mut node = DirNode::new(path);
    let mut changed = direct.iter().any(|(_, c)| *c);
    let mut children: Vec<(String, Vec<(FileNode, bool)>)> = by_child.into_iter().collect();
    children.sort_by(|a, b| workspace::path_order(&a.0, &b.0));
    for (child_path, child_files) in children {
        let prev_child = previous.and_then(|p| p.subdirs.iter().find(|d| d.path == child_path));
        let (sub, sub_changed) = assemble_dir(&child_path, child_files, prev_child, seed, ctx, session, repo_id)?;
        changed |= sub_changed;
        node.subdirs.push(sub);
    }
    direct.sort_by(|a, b| a.0.path.cmp(&b.0.path));
    node.files = direct.into_iter().map(|(f, _)| f).collect();

    if !node.contains_files() {
        return Ok((node, false));
    }
    let same_children = previous.is_some_and(|p| {
        p.files.iter().map(|f| &f.path).eq(node.files.iter().map(|f| &f.path))
            && p.subdirs.iter().map(|d| &d.path).eq(node.subdirs.iter().map(|d| &d.path))
    });
    match previous {
        Some(p) if !changed && same_children && !p.summary.is_empty() => {
            node.summary = p.summary.clone();
            Ok((node, false))
        }
        _ => {
            let file_children: Vec<ChildSummary> = node
                .files
                .iter()
                .map(|f| ChildSummary {
                    path: f.path.clone(),
                    is_dir: false,
                    summary: f.summary.clone(),
                })
                .collect();
            let dir_children: Vec<ChildSummary> = node
                .subdirs
                .iter()
                .filter(|d| !d.summary.is_empty())
                .map(|d| ChildSummary {
                    path: d.path.clone(),
                    is_dir: true,
                    summary: d.summary.clone(),
                })
                .collect();
            let started = Instant::now();
            let req = directory_request(path, &file_children, &dir_children, Some(seed), ctx)?;
            let (text, p, c) = ctx.summarize(&req, node.label())?;
            session.record(Stage::Directory, repo_id, path, (p, c), started);
            node.summary = text;
            Ok((node, true))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::MockBackend;

    fn ctx_parts() -> (Gateway, PromptCatalog, ModelParams) {
        (Gateway::mock(), PromptCatalog::bundled(), ModelParams::default())
    }

    #[test]
    fn seed_mentions_dominant_identifier() {
        let (gw, pc, mp) = ctx_parts();
        let ctx = BuildContext::new(&gw, &pc, &mp, BuildBudget::default());
        let src = "class PartyAccount { PartyAccount a; PartyAccount b; PartyAccount c; }";
        let s1 = build_seed_context("party", "party/\n  A.java\n", src, "", &ctx).unwrap();
        assert!(s1.text.contains("PartyAccount"));
        let s2 = build_seed_context("party", "party/\n  A.java\n", src, "", &ctx).unwrap();
        assert_eq!(s1, s2);
        assert!(matches!(build_seed_context("party", "", src, "", &ctx), Err(Error::Precondition(_))));
    }

    #[test]
    fn file_summary_with_and_without_seed() {
        let (gw, pc, mp) = ctx_parts();
        let ctx = BuildContext::new(&gw, &pc, &mp, BuildBudget::default());
        let seed = RepoSummary {
            text: "Billing domain. It issues invoices.".into(),
            token_estimate: 8,
            inputs_digest: String::new(),
        };
        let src = "public class RevisionValidator { boolean RevisionValidator() {} }";
        let seeded = summarize_file("v/RevisionValidator.java", src, Some(&seed), &ctx).unwrap();
        let isolated = summarize_file("v/RevisionValidator.java", src, None, &ctx).unwrap();
        assert!(seeded.starts_with("Billing domain."));
        assert!(seeded.contains("RevisionValidator"));
        assert!(!isolated.contains("Billing domain."));
        assert_eq!(seeded, format!("Billing domain. {isolated}"));
    }

    #[test]
    fn oversized_file_is_truncated_within_budget() {
        let (gw, pc, mp) = ctx_parts();
        let budget = BuildBudget {
            file_token_budget: 600,
            ..BuildBudget::default()
        };
        let ctx = BuildContext::new(&gw, &pc, &mp, budget);
        let content = "int value = 1;\n".repeat(1000);
        let req = file_request("Big.java", &content, None, &ctx).unwrap();
        assert!(req.user_text.contains(TRUNCATION_MARKER));
        assert!(req.prompt_estimate() <= 600, "{}", req.prompt_estimate());

        let tiny = BuildBudget {
            file_token_budget: 10,
            ..BuildBudget::default()
        };
        let ctx = BuildContext::new(&gw, &pc, &mp, tiny);
        assert!(file_request("Big.java", &content, None, &ctx).is_err());
    }

    #[test]
    fn empty_completion_retried_then_error() {
        struct Empty(AtomicUsize);
        impl crate::llm::Backend for Empty {
            fn name(&self) -> &str {
                "empty"
            }
            fn complete(&self, _: &ChatRequest) -> std::result::Result<crate::llm::ChatResponse, LlmError> {
                self.0.fetch_add(1, Ordering::SeqCst);
                Ok(crate::llm::ChatResponse {
                    text: "  ".into(),
                    prompt_tokens: 1,
                    completion_tokens: 0,
                })
            }
        }
        let backend = std::sync::Arc::new(Empty(AtomicUsize::new(0)));
        let gw = Gateway::from_arc(backend.clone());
        let pc = PromptCatalog::bundled();
        let mp = ModelParams::default();
        let ctx = BuildContext::new(&gw, &pc, &mp, BuildBudget::default());
        assert!(summarize_file("A.java", "class A {}", None, &ctx).is_err());
        assert_eq!(backend.0.load(Ordering::SeqCst), 2);
    }

    #[test]
    fn directory_prompt_orders_children() {
        let gw = Gateway::new(MockBackend);
        let pc = PromptCatalog::bundled();
        let mp = ModelParams::default();
        let ctx = BuildContext::new(&gw, &pc, &mp, BuildBudget::default());
        let child = |p: &str, s: &str| ChildSummary {
            path: p.into(),
            is_dir: false,
            summary: s.into(),
        };
        let files = [child("svc/b.java", "InvoiceTotals work"), child("svc/a.java", "InvoiceTotals check")];
        let req = directory_request("svc", &files, &[], None, &ctx).unwrap();
        let a = req.user_text.find("svc/a.java").unwrap();
        let b = req.user_text.find("svc/b.java").unwrap();
        assert!(a < b);
        let summary = summarize_directory("svc", &files[..1], &[], None, &ctx).unwrap();
        assert!(summary.contains("InvoiceTotals"));
        assert!(directory_request("svc", &[], &[], None, &ctx).is_err());
    }

    #[test]
    fn helpers() {
        assert_eq!(count_lines(""), 0);
        assert_eq!(count_lines("a\nb"), 2);
        assert_eq!(count_lines("a\nb\n"), 2);
        assert_eq!(language_tag("x/Y.java"), "java");
        assert_eq!(language_tag("Makefile"), "text");
        assert_ne!(inputs_digest(&["ab", "c"]), inputs_digest(&["a", "bc"]));
    }
}

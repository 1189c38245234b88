//! Online two-phase search: repository routing, then directory filtering and
//! file ranking inside each routed repository.
//!
//! Every model interaction is appended to the audit trail of the result, so
//! the repository → directory → file path that produced a ranking can be
//! inspected afterwards.

mod parse;

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kb::{FileNode, KnowledgeBase, RepoTree};
use crate::llm::{Gateway, ModelParams, RankCandidate, RequestKind};
use crate::prompts::{PromptCatalog, TemplateId};

pub use parse::{parse_ranked_list, RankedItem, RankedList};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BugReport {
    pub id: String,
    #[serde(default)]
    pub title: String,
    pub body: String,
}

impl BugReport {
    pub fn new(id: impl Into<String>, title: impl Into<String>, body: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            title: title.into(),
            body: body.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.body.trim().is_empty() {
            return Err(Error::Precondition(format!("bug report {:?} has an empty body", self.id)));
        }
        Ok(())
    }

    /// Title and body as presented to the model.
    pub fn text(&self) -> String {
        if self.title.trim().is_empty() {
            self.body.trim().to_string()
        } else {
            format!("{}\n\n{}", self.title.trim(), self.body.trim())
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MergeStrategy {
    /// Concatenate per-repository rankings in routing order, drop repeats,
    /// keep the first `k_files`.
    #[default]
    RepoOrderConcat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub k_repos: usize,
    pub k_dirs: usize,
    pub k_files: usize,
    pub use_directory_filtering: bool,
    pub merge_strategy: MergeStrategy,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            k_repos: 3,
            k_dirs: 5,
            k_files: 10,
            use_directory_filtering: true,
            merge_strategy: MergeStrategy::RepoOrderConcat,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_repos == 0 || self.k_dirs == 0 || self.k_files == 0 {
            return Err(Error::Config("k_repos, k_dirs and k_files must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStage {
    Route,
    FilterDirs,
    RankFiles,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditStep {
    pub stage: SearchStage,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repo_id: Option<String>,
    pub prompt_text: String,
    pub response_text: String,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    /// Set on the step after which the deterministic fallback ranking was used.
    #[serde(default)]
    pub fallback: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenTotals {
    pub prompt: u64,
    pub completion: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepoLocalization {
    pub repo_id: String,
    /// Empty for the flat variant.
    pub filtered_dirs: RankedList,
    /// Repository-relative file paths.
    pub ranked_files: RankedList,
    /// Number of file summaries shown to the ranking prompt.
    pub candidate_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepoFailure {
    pub repo_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalizationResult {
    pub bug_id: String,
    pub routed_repos: RankedList,
    pub per_repo: Vec<RepoLocalization>,
    /// `repo_id/path` labels.
    pub merged_files: RankedList,
    pub audit: Vec<AuditStep>,
    pub token_totals: TokenTotals,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped_repos: Vec<RepoFailure>,
}

impl LocalizationResult {
    pub fn fallbacks(&self) -> impl Iterator<Item = &AuditStep> {
        self.audit.iter().filter(|s| s.fallback)
    }

    pub fn stage_prompt_tokens(&self, stage: SearchStage) -> u64 {
        self.audit.iter().filter(|s| s.stage == stage).map(|s| s.prompt_tokens).sum()
    }

    /// Writes the audit trail as JSON lines, one step per line.
    pub fn write_audit(&self, path: &Path) -> Result<()> {
        let mut out = Vec::new();
        for step in &self.audit {
            serde_json::to_writer(&mut out, step).map_err(|source| Error::Document {
                path: path.to_path_buf(),
                source,
            })?;
            out.push(b'\n');
        }
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&out).map_err(|e| Error::io(path, e))
    }
}

fn sum_tokens(audit: &[AuditStep]) -> TokenTotals {
    audit.iter().fold(TokenTotals::default(), |t, s| TokenTotals {
        prompt: t.prompt + s.prompt_tokens,
        completion: t.completion + s.completion_tokens,
    })
}

const REPROMPT_SUFFIX: &str = "\n\nYour previous reply did not contain a usable list. Reply again and end with the numbered list in exactly the requested form, using only labels from the candidates above.";

pub struct Searcher<'a> {
    pub gateway: &'a Gateway,
    pub prompts: &'a PromptCatalog,
    pub model: &'a ModelParams,
}

struct RankSpec<'c> {
    stage: SearchStage,
    repo_id: Option<&'c str>,
    template: TemplateId,
    bug: &'c BugReport,
    candidates: Vec<RankCandidate>,
    k: usize,
}

impl<'a> Searcher<'a> {
    pub fn new(gateway: &'a Gateway, prompts: &'a PromptCatalog, model: &'a ModelParams) -> Self {
        Self { gateway, prompts, model }
    }

    /// One ranking completion with a single re-prompt on parse failure and a
    /// lexicographic fallback after that.
    fn rank_call(&self, spec: RankSpec<'_>, audit: &mut Vec<AuditStep>) -> Result<RankedList> {
        let k = spec.k.min(spec.candidates.len());
        let block: String = spec
            .candidates
            .iter()
            .map(|c| format!("- {}: {}\n", c.label, c.summary))
            .collect();
        let bug_text = spec.bug.text();
        let k_text = k.to_string();
        let mut values = vec![("bug", bug_text.as_str()), ("candidates", block.as_str()), ("k", k_text.as_str())];
        if let Some(repo) = spec.repo_id {
            values.push(("repo_id", repo));
        }
        let prompt = self.prompts.render(spec.template, &values)?;
        let mut req = self.model.request(
            prompt.system,
            prompt.user,
            RequestKind::Rank {
                query: bug_text.clone(),
                candidates: spec.candidates.clone(),
            },
        );
        let allowed: Vec<&str> = spec.candidates.iter().map(|c| c.label.as_str()).collect();

        for attempt in 0..2 {
            if attempt == 1 {
                req.user_text.push_str(REPROMPT_SUFFIX);
            }
            let mut step = AuditStep {
                stage: spec.stage,
                repo_id: spec.repo_id.map(str::to_string),
                prompt_text: format!("{}\n\n{}", req.system_text, req.user_text),
                response_text: String::new(),
                prompt_tokens: 0,
                completion_tokens: 0,
                fallback: false,
                error: None,
            };
            match self.gateway.complete(&req) {
                Ok(resp) => {
                    step.response_text = resp.text;
                    step.prompt_tokens = resp.prompt_tokens;
                    step.completion_tokens = resp.completion_tokens;
                }
                Err(e) => {
                    step.error = Some(e.to_string());
                    audit.push(step);
                    return Err(e.into());
                }
            }
            let parsed = parse_ranked_list(&step.response_text, &allowed);
            audit.push(step);
            if let Ok(list) = parsed {
                return Ok(list.truncated(k));
            }
        }

        if let Some(last) = audit.last_mut() {
            last.fallback = true;
        }
        let mut labels = allowed;
        labels.sort_unstable();
        Ok(RankedList::from_ordered(labels.into_iter().map(|l| (l, "fallback"))).truncated(k))
    }

    /// Phase 1: ranks repositories by comparing the bug report with every
    /// repository seed summary.
    pub fn route(
        &self,
        bug: &BugReport,
        kb: &KnowledgeBase,
        k_repos: usize,
        audit: &mut Vec<AuditStep>,
    ) -> Result<RankedList> {
        bug.validate()?;
        if kb.repos.is_empty() {
            return Err(Error::Precondition("knowledge base has no repositories".into()));
        }
        let candidates = kb
            .repos
            .iter()
            .map(|r| RankCandidate {
                label: r.repo_id.clone(),
                summary: r.seed.text.clone(),
            })
            .collect();
        self.rank_call(
            RankSpec {
                stage: SearchStage::Route,
                repo_id: None,
                template: TemplateId::Route,
                bug,
                candidates,
                k: k_repos,
            },
            audit,
        )
    }

    /// Phase 2, step 1: ranks the repository's file-bearing directories.
    pub fn filter_directories(
        &self,
        bug: &BugReport,
        repo: &RepoTree,
        k_dirs: usize,
        audit: &mut Vec<AuditStep>,
    ) -> Result<RankedList> {
        let candidates: Vec<RankCandidate> = repo
            .file_bearing_dirs()
            .into_iter()
            .filter(|d| !d.summary.is_empty())
            .map(|d| RankCandidate {
                label: d.label().to_string(),
                summary: d.summary.clone(),
            })
            .collect();
        if candidates.is_empty() {
            return Err(Error::Precondition(format!("{} has no summarized directories", repo.repo_id)));
        }
        self.rank_call(
            RankSpec {
                stage: SearchStage::FilterDirs,
                repo_id: Some(&repo.repo_id),
                template: TemplateId::FilterDirs,
                bug,
                candidates,
                k: k_dirs,
            },
            audit,
        )
    }

    /// Phase 2, step 2: ranks candidate files (repository-relative labels).
    pub fn rank_files(
        &self,
        bug: &BugReport,
        repo_id: &str,
        candidates: &[&FileNode],
        k_files: usize,
        audit: &mut Vec<AuditStep>,
    ) -> Result<RankedList> {
        if candidates.is_empty() {
            return Err(Error::Precondition(format!("no candidate files in {repo_id}")));
        }
        let candidates = candidates
            .iter()
            .map(|f| RankCandidate {
                label: f.path.clone(),
                summary: f.summary.clone(),
            })
            .collect();
        self.rank_call(
            RankSpec {
                stage: SearchStage::RankFiles,
                repo_id: Some(repo_id),
                template: TemplateId::RankFiles,
                bug,
                candidates,
                k: k_files,
            },
            audit,
        )
    }

    fn localize_repo(
        &self,
        bug: &BugReport,
        repo: &RepoTree,
        cfg: &SearchConfig,
        filtering: bool,
        audit: &mut Vec<AuditStep>,
    ) -> Result<RepoLocalization> {
        let (filtered_dirs, candidates) = if filtering {
            let dirs = self.filter_directories(bug, repo, cfg.k_dirs, audit)?;
            let mut files = Vec::new();
            for label in dirs.labels() {
                if let Some(d) = repo.find_dir(label) {
                    files.extend(d.files.iter());
                }
            }
            (dirs, files)
        } else {
            (RankedList::default(), repo.walk_files())
        };
        let ranked_files = self.rank_files(bug, &repo.repo_id, &candidates, cfg.k_files, audit)?;
        Ok(RepoLocalization {
            repo_id: repo.repo_id.clone(),
            filtered_dirs,
            ranked_files,
            candidate_count: candidates.len(),
        })
    }

    fn run(&self, bug: &BugReport, kb: &KnowledgeBase, cfg: &SearchConfig, filtering: bool) -> Result<LocalizationResult> {
        cfg.validate()?;
        let mut audit = Vec::new();
        let routed_repos = self.route(bug, kb, cfg.k_repos, &mut audit)?;

        let mut per_repo = Vec::new();
        let mut skipped_repos = Vec::new();
        for repo_id in routed_repos.labels() {
            let repo = kb.repo(repo_id).expect("routing only returns known repositories");
            match self.localize_repo(bug, repo, cfg, filtering, &mut audit) {
                Ok(r) => per_repo.push(r),
                Err(e) => {
                    log::warn!("{}: skipping {repo_id}: {e}", bug.id);
                    skipped_repos.push(RepoFailure {
                        repo_id: repo_id.to_string(),
                        reason: e.to_string(),
                    });
                }
            }
        }
        if per_repo.is_empty() {
            return Err(Error::AllReposFailed);
        }

        let merged_files = merge(cfg, &per_repo);
        let token_totals = sum_tokens(&audit);
        Ok(LocalizationResult {
            bug_id: bug.id.clone(),
            routed_repos,
            per_repo,
            merged_files,
            audit,
            token_totals,
            skipped_repos,
        })
    }

    /// Hierarchical localization, or the flat variant when
    /// `cfg.use_directory_filtering` is off.
    pub fn localize(&self, bug: &BugReport, kb: &KnowledgeBase, cfg: &SearchConfig) -> Result<LocalizationResult> {
        self.run(bug, kb, cfg, cfg.use_directory_filtering)
    }

    /// Routing followed by one ranking over every file summary of each routed
    /// repository, with no directory filtering.
    pub fn localize_flat(&self, bug: &BugReport, kb: &KnowledgeBase, cfg: &SearchConfig) -> Result<LocalizationResult> {
        self.run(bug, kb, cfg, false)
    }
}

fn merge(cfg: &SearchConfig, per_repo: &[RepoLocalization]) -> RankedList {
    match cfg.merge_strategy {
        MergeStrategy::RepoOrderConcat => {
            let mut seen = HashSet::new();
            let entries = per_repo
                .iter()
                .flat_map(|r| {
                    r.ranked_files
                        .items
                        .iter()
                        .map(move |i| (format!("{}/{}", r.repo_id, i.label), i.rationale.clone()))
                })
                .filter(|(l, _)| seen.insert(l.clone()));
            RankedList::from_ordered(entries).truncated(cfg.k_files)
        }
    }
}

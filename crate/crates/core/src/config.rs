//! TOML configuration shared by every command.
//!
//! Relative paths in a config file are resolved against the file's directory.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::builder::{BuildBudget, WorkspaceSpec};
use crate::error::{Error, Result};
use crate::llm::{CostModel, Gateway, MockBackend, ModelParams, RemoteBackend, RetryPolicy};
use crate::prompts::PromptCatalog;
use crate::search::SearchConfig;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    #[default]
    Mock,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BackendConfig {
    pub kind: BackendKind,
    /// Base of an OpenAI-compatible API, e.g. `https://api.openai.com/v1`.
    pub base_url: String,
    pub build_model_id: String,
    pub search_model_id: String,
    pub max_inflight: usize,
    pub max_retries: u32,
    pub timeout_secs: u64,
    pub temperature: f32,
    /// Output cap for routing and ranking completions.
    pub search_max_output_tokens: u32,
}

impl Default for BackendConfig {
    fn default() -> Self {
        Self {
            kind: BackendKind::Mock,
            base_url: String::new(),
            build_model_id: "gpt-4.1-mini".into(),
            search_model_id: "gpt-4.1".into(),
            max_inflight: 4,
            max_retries: 4,
            timeout_secs: 120,
            temperature: 0.0,
            search_max_output_tokens: 1024,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorkspaceSection {
    /// Workspace root; a command-line path takes precedence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root: Option<PathBuf>,
    #[serde(flatten)]
    pub spec: WorkspaceSpec,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub prompt_dir: Option<PathBuf>,
    pub workspace: WorkspaceSection,
    pub budgets: BuildBudget,
    pub backend: BackendConfig,
    pub search: SearchConfig,
    pub cost_model: CostModel,
}

/// The documented default configuration.
pub const DEFAULT_CONFIG: &str = r#"# repolens configuration. Every key is optional; the values below are the defaults.
# Relative paths are resolved against the directory of this file.

# Directory with replacement prompt templates (same file names as the bundled ones).
# prompt_dir = "prompts"

[workspace]
# root = "workspace"
include_globs = ["**"]
exclude_globs = ["**/target/**", "**/build/**", "**/node_modules/**", "**/dist/**"]
respect_gitignore = true

[budgets]
seed_source_token_budget = 60000
file_token_budget = 8000
summary_max_tokens = 400

[backend]
# "mock" runs fully offline; "remote" calls an OpenAI-compatible API with the
# key taken from REPOLENS_API_KEY.
kind = "mock"
base_url = ""
build_model_id = "gpt-4.1-mini"
search_model_id = "gpt-4.1"
max_inflight = 4
max_retries = 4
timeout_secs = 120
temperature = 0.0
search_max_output_tokens = 1024

[search]
k_repos = 3
k_dirs = 5
k_files = 10
use_directory_filtering = true
merge_strategy = "repo-order-concat"

[cost_model]
price_per_million_prompt_tokens = 0.40
price_per_million_completion_tokens = 1.60
"#;

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads, resolves relative paths and validates a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.prompt_dir = cfg.prompt_dir.map(|p| resolve(base, &p));
        cfg.workspace.root = cfg.workspace.root.map(|p| resolve(base, &p));
        cfg.validate()?;
        Ok(cfg)
    }

    /// `path` when given, else the built-in defaults.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::load(p),
            None => Ok(Self::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.budgets.validate()?;
        self.search.validate()?;
        self.cost_model.validate().map_err(Error::Config)?;
        let b = &self.backend;
        if b.kind == BackendKind::Remote {
            if b.base_url.trim().is_empty() {
                return Err(Error::Config("backend.kind = \"remote\" requires backend.base_url".into()));
            }
            if b.build_model_id.trim().is_empty() || b.search_model_id.trim().is_empty() {
                return Err(Error::Config("backend.kind = \"remote\" requires both model ids".into()));
            }
        }
        if b.max_inflight == 0 {
            return Err(Error::Config("backend.max_inflight must be positive".into()));
        }
        if !(0.0..=2.0).contains(&b.temperature) {
            return Err(Error::Config("backend.temperature must lie in [0, 2]".into()));
        }
        if let Some(dir) = &self.prompt_dir {
            if !dir.is_dir() {
                return Err(Error::Config(format!("prompt_dir {} does not exist", dir.display())));
            }
        }
        if let Some(root) = &self.workspace.root {
            if !root.is_dir() {
                return Err(Error::Config(format!("workspace.root {} does not exist", root.display())));
            }
        }
        Ok(())
    }

    pub fn prompts(&self) -> Result<PromptCatalog> {
        match &self.prompt_dir {
            Some(dir) => PromptCatalog::with_overrides(dir),
            None => Ok(PromptCatalog::bundled()),
        }
    }

    pub fn gateway(&self) -> Result<Gateway> {
        let b = &self.backend;
        let retry = RetryPolicy {
            max_retries: b.max_retries,
            ..RetryPolicy::default()
        };
        let gateway = match b.kind {
            BackendKind::Mock => Gateway::new(MockBackend),
            BackendKind::Remote => {
                Gateway::new(RemoteBackend::from_env(&b.base_url, Duration::from_secs(b.timeout_secs))?)
            }
        };
        Ok(gateway.with_retry(retry).with_max_inflight(b.max_inflight))
    }

    fn model(&self, id: &str, max_output_tokens: u32) -> ModelParams {
        ModelParams {
            model_id: match self.backend.kind {
                BackendKind::Mock => "mock".into(),
                BackendKind::Remote => id.into(),
            },
            max_output_tokens,
            temperature: self.backend.temperature,
        }
    }

    pub fn build_model(&self) -> ModelParams {
        self.model(&self.backend.build_model_id, self.budgets.summary_max_tokens)
    }

    pub fn search_model(&self) -> ModelParams {
        self.model(&self.backend.search_model_id, self.backend.search_max_output_tokens)
    }

    /// The workspace spec rooted at `root`, or at `workspace.root`.
    pub fn workspace_spec(&self, root: Option<&Path>) -> Result<WorkspaceSpec> {
        let root = root
            .map(Path::to_path_buf)
            .or_else(|| self.workspace.root.clone())
            .ok_or_else(|| Error::Config("no workspace root given".into()))?;
        Ok(WorkspaceSpec {
            root,
            ..self.workspace.spec.clone()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_text_matches_defaults() {
        let cfg = Config::parse(DEFAULT_CONFIG).unwrap();
        assert_eq!(cfg, Config::default());
        assert_eq!((cfg.search.k_repos, cfg.search.k_dirs, cfg.search.k_files), (3, 5, 10));
        assert_eq!(cfg.backend.temperature, 0.0);
        assert!(cfg.search.use_directory_filtering);
    }

    #[test]
    fn serialized_default_reparses() {
        let text = toml::to_string(&Config::default()).unwrap();
        assert_eq!(Config::parse(&text).unwrap(), Config::default());
    }

    #[test]
    fn remote_requires_base_url() {
        let cfg = Config::parse("[backend]\nkind = \"remote\"\n").unwrap();
        assert!(matches!(cfg.validate(), Err(Error::Config(m)) if m.contains("base_url")));
    }

    #[test]
    fn relative_paths_resolve_against_file() {
        let tmp = tempfile::tempdir().unwrap();
        std::fs::create_dir(tmp.path().join("ws")).unwrap();
        let path = tmp.path().join("repolens.toml");
        std::fs::write(&path, "[workspace]\nroot = \"ws\"\n[search]\nk_files = 4\n").unwrap();
        let cfg = Config::load(&path).unwrap();
        assert_eq!(cfg.workspace.root.as_deref(), Some(tmp.path().join("ws").as_path()));
        assert_eq!(cfg.search.k_files, 4);
        assert_eq!(cfg.search.k_dirs, 5);

        std::fs::write(&path, "prompt_dir = \"missing\"\n").unwrap();
        assert!(Config::load(&path).is_err());
    }

    #[test]
    fn zero_k_rejected() {
        assert!(Config::parse("[search]\nk_dirs = 0\n").unwrap().validate().is_err());
    }
}

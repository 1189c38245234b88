//! Prompt template catalog.
//!
//! Six templates drive the pipeline: three for building the knowledge base
//! (repository seed, file summary, directory summary) and three for search
//! (routing, directory filtering, file ranking). Each template is a text
//! file whose system part and user part are separated by a line holding only
//! `---`. Placeholders are written `{{name}}`.
//!
//! The bundled templates are compiled in; a directory holding files with the
//! same names overrides them one by one.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TemplateId {
    RepoSummary,
    FileSummary,
    DirSummary,
    Route,
    FilterDirs,
    RankFiles,
}

impl TemplateId {
    pub const ALL: [TemplateId; 6] = [
        TemplateId::RepoSummary,
        TemplateId::FileSummary,
        TemplateId::DirSummary,
        TemplateId::Route,
        TemplateId::FilterDirs,
        TemplateId::RankFiles,
    ];

    pub fn file_name(self) -> &'static str {
        match self {
            TemplateId::RepoSummary => "repo_summary.txt",
            TemplateId::FileSummary => "file_summary.txt",
            TemplateId::DirSummary => "dir_summary.txt",
            TemplateId::Route => "route.txt",
            TemplateId::FilterDirs => "filter_dirs.txt",
            TemplateId::RankFiles => "rank_files.txt",
        }
    }

    pub fn placeholders(self) -> &'static [&'static str] {
        match self {
            TemplateId::RepoSummary => &["repo_id", "tree", "source", "attachments"],
            TemplateId::FileSummary => &["seed", "path", "language", "content"],
            TemplateId::DirSummary => &["seed", "path", "children"],
            TemplateId::Route => &["bug", "candidates", "k"],
            TemplateId::FilterDirs | TemplateId::RankFiles => &["bug", "repo_id", "candidates", "k"],
        }
    }

    fn bundled(self) -> &'static str {
        match self {
            TemplateId::RepoSummary => include_str!("../prompts/repo_summary.txt"),
            TemplateId::FileSummary => include_str!("../prompts/file_summary.txt"),
            TemplateId::DirSummary => include_str!("../prompts/dir_summary.txt"),
            TemplateId::Route => include_str!("../prompts/route.txt"),
            TemplateId::FilterDirs => include_str!("../prompts/filter_dirs.txt"),
            TemplateId::RankFiles => include_str!("../prompts/rank_files.txt"),
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    system: String,
    user: String,
}

/// A rendered prompt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prompt {
    pub system: String,
    pub user: String,
}

impl Template {
    pub fn parse(id: TemplateId, text: &str) -> Result<Self> {
        let text = text.replace("\r\n", "\n");
        let (system, user) = match text.split_once("\n---\n") {
            Some((s, u)) => (s.trim().to_string(), u.trim_end().to_string()),
            None => (String::new(), text.trim_end().to_string()),
        };
        let template = Template { system, user };
        for name in template.placeholder_names() {
            if !id.placeholders().contains(&name.as_str()) {
                return Err(Error::Template {
                    template: id.file_name().into(),
                    message: format!("unknown placeholder {{{{{name}}}}}"),
                });
            }
        }
        Ok(template)
    }

    fn placeholder_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        for part in [&self.system, &self.user] {
            let mut rest = part.as_str();
            while let Some(start) = rest.find("{{") {
                let after = &rest[start + 2..];
                match after.find("}}") {
                    Some(end) => {
                        names.push(after[..end].trim().to_string());
                        rest = &after[end + 2..];
                    }
                    None => break,
                }
            }
        }
        names
    }

    /// Single left-to-right pass; substituted values are never re-scanned.
    fn fill(id: TemplateId, text: &str, values: &[(&str, &str)]) -> Result<String> {
        let mut out = String::with_capacity(text.len() + values.iter().map(|(_, v)| v.len()).sum::<usize>());
        let mut rest = text;
        while let Some(start) = rest.find("{{") {
            let after = &rest[start + 2..];
            let Some(end) = after.find("}}") else { break };
            let name = after[..end].trim();
            let value = values
                .iter()
                .find(|(k, _)| *k == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::Template {
                    template: id.file_name().into(),
                    message: format!("no value supplied for {{{{{name}}}}}"),
                })?;
            out.push_str(&rest[..start]);
            out.push_str(value);
            rest = &after[end + 2..];
        }
        out.push_str(rest);
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct PromptCatalog {
    templates: Vec<Template>,
}

impl Default for PromptCatalog {
    fn default() -> Self {
        Self::bundled()
    }
}

impl PromptCatalog {
    pub fn bundled() -> Self {
        let templates = TemplateId::ALL
            .iter()
            .map(|&id| Template::parse(id, id.bundled()).expect("bundled templates are valid"))
            .collect();
        Self { templates }
    }

    /// Bundled templates, with any same-named file in `dir` taking precedence.
    pub fn with_overrides(dir: &Path) -> Result<Self> {
        if !dir.is_dir() {
            return Err(Error::Config(format!("prompt_dir {} is not a directory", dir.display())));
        }
        let mut catalog = Self::bundled();
        for id in TemplateId::ALL {
            let path = dir.join(id.file_name());
            if path.exists() {
                let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                catalog.templates[id.index()] = Template::parse(id, &text)?;
            }
        }
        Ok(catalog)
    }

    pub fn render(&self, id: TemplateId, values: &[(&str, &str)]) -> Result<Prompt> {
        let t = &self.templates[id.index()];
        Ok(Prompt {
            system: Template::fill(id, &t.system, values)?,
            user: Template::fill(id, &t.user, values)?,
        })
    }
}

//! Command implementations behind the `repolens` binary.
//!
//! Every command writes results to `out`, diagnostics to `err`, and returns
//! the process exit status.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::builder::{
    build_knowledge_base, estimate_build_cost, incremental_update, BuildContext, Stage, StageTokens,
};
use crate::config::{Config, DEFAULT_CONFIG};
use crate::error::{Error, Result};
use crate::eval::{compare_ablation, evaluate_dataset, format_ablation_table, format_report_table, load_tickets};
use crate::kb::{self, KnowledgeBase};
use crate::llm::{estimate_cost, CostModel};
use crate::search::{BugReport, LocalizationResult, Searcher};

#[derive(Debug, Parser)]
#[command(name = "repolens", version, about = "Bug localization across many repositories")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build (or incrementally update) a knowledge base from a workspace.
    Build(BuildArgs),
    /// Localize one bug report.
    Localize(LocalizeArgs),
    /// Evaluate a ticket dataset.
    Eval(EvalArgs),
    /// Print a stored summary.
    Inspect(InspectArgs),
    /// Print the default configuration file.
    InitConfig,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    /// Directory with one subdirectory per repository.
    #[arg(long, short)]
    pub workspace: Option<PathBuf>,
    /// Knowledge base file to write.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Reuse unchanged summaries from the existing file at `--out`.
    #[arg(long)]
    pub incremental: bool,
    /// Estimate tokens and cost without calling the model or writing a file.
    #[arg(long)]
    pub dry_run: bool,
    /// Write one tab-separated line per model call.
    #[arg(long)]
    pub log_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LocalizeArgs {
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub kb: PathBuf,
    /// Bug report text, or a path to a file containing it.
    pub bug: String,
    #[arg(long)]
    pub bug_id: Option<String>,
    /// Number of files to return.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub k_repos: Option<usize>,
    #[arg(long)]
    pub k_dirs: Option<usize>,
    /// Skip directory filtering and rank all files of each routed repository.
    #[arg(long)]
    pub flat: bool,
    /// Write the audit trail as JSON lines.
    #[arg(long)]
    pub audit_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub kb: PathBuf,
    /// Ticket dataset, one JSON object per line.
    #[arg(long)]
    pub tickets: PathBuf,
    /// Also evaluate without directory filtering and print the comparison.
    #[arg(long)]
    pub ablate: bool,
    /// Write the full report as JSON.
    #[arg(long)]
    pub report_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(long)]
    pub kb: PathBuf,
    /// `repo_id`, `repo_id/dir` or `repo_id/path/to/file`. Omit to list repositories.
    pub selector: Option<String>,
}

/// Runs a parsed command line.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Build(a) => cmd_build(&a, out, err),
        Command::Localize(a) => cmd_localize(&a, out, err),
        Command::Eval(a) => cmd_eval(&a, out, err),
        Command::Inspect(a) => cmd_inspect(&a, out),
        Command::InitConfig => out.write_all(DEFAULT_CONFIG.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn w(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<output>", e))
}

fn stage_table(stages: &std::collections::BTreeMap<Stage, StageTokens>, cm: &CostModel) -> String {
    let mut s = format!("{:<10}{:>8}{:>14}{:>14}\n", "stage", "calls", "prompt", "completion");
    let (mut p, mut c) = (0, 0);
    for (stage, t) in stages {
        s.push_str(&format!(
            "{:<10}{:>8}{:>14}{:>14}\n",
            stage.as_str(),
            t.calls,
            t.prompt_tokens,
            t.completion_tokens
        ));
        p += t.prompt_tokens;
        c += t.completion_tokens;
    }
    s.push_str(&format!("{:<10}{:>8}{:>14}{:>14}\n", "total", "", p, c));
    s.push_str(&format!("estimated cost: ${:.4}\n", estimate_cost(p, c, cm)));
    s
}

pub fn cmd_build(args: &BuildArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let cfg = Config::load_or_default(args.config.as_deref())?;
    let spec = cfg.workspace_spec(args.workspace.as_deref())?;
    if !spec.root.is_dir() {
        return Err(Error::Precondition(format!("workspace {} does not exist", spec.root.display())));
    }
    let prompts = cfg.prompts()?;
    if args.dry_run {
        let est = estimate_build_cost(&spec, cfg.budgets, &cfg.cost_model, &prompts)?;
        w(out, "dry run: no model calls made, nothing written\n")?;
        return w(out, &stage_table(&est.stages, &cfg.cost_model));
    }

    let gateway = cfg.gateway()?;
    let model = cfg.build_model();
    let ctx = BuildContext::new(&gateway, &prompts, &model, cfg.budgets);
    let output = if args.incremental && args.out.exists() {
        let previous = kb::load(&args.out)?;
        incremental_update(&previous, &spec, &ctx)?
    } else {
        if args.incremental {
            let _ = writeln!(err, "note: {} does not exist, building from scratch", args.out.display());
        }
        build_knowledge_base(&spec, &ctx)?
    };
    for warning in &output.warnings {
        let _ = writeln!(err, "warning: {warning}");
    }
    kb::save(&output.kb, &args.out)?;
    if let Some(path) = &args.log_out {
        std::fs::write(path, output.log_text()).map_err(|e| Error::io(path, e))?;
    }
    w(
        out,
        &format!(
            "wrote {} ({} repositories, {} files)\n",
            args.out.display(),
            output.kb.repos.len(),
            output.kb.file_count()
        ),
    )?;
    w(out, &stage_table(&output.stage_totals(), &cfg.cost_model))
}

fn read_bug(args: &LocalizeArgs) -> Result<BugReport> {
    let path = Path::new(&args.bug);
    let (default_id, body) = if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        (stem, text)
    } else {
        ("bug".to_string(), args.bug.clone())
    };
    let bug = BugReport::new(args.bug_id.clone().unwrap_or(default_id), "", body);
    bug.validate()?;
    Ok(bug)
}

fn print_localization(res: &LocalizationResult, flat: bool, out: &mut dyn Write) -> Result<()> {
    let mut s = String::from("Routed repositories:\n");
    for i in &res.routed_repos.items {
        s.push_str(&format!("  {}. {} — {}\n", i.rank, i.label, i.rationale));
    }
    if !flat {
        for r in &res.per_repo {
            s.push_str(&format!("Filtered directories ({}):\n", r.repo_id));
            for i in &r.filtered_dirs.items {
                s.push_str(&format!("  {}. {} — {}\n", i.rank, i.label, i.rationale));
            }
        }
    }
    s.push_str("Ranked files:\n");
    for i in &res.merged_files.items {
        s.push_str(&format!("  {}. {} — {}\n", i.rank, i.label, i.rationale));
    }
    for skipped in &res.skipped_repos {
        s.push_str(&format!("Skipped {}: {}\n", skipped.repo_id, skipped.reason));
    }
    s.push_str(&format!(
        "Audit: {} steps, {} prompt tokens, {} completion tokens\n",
        res.audit.len(),
        res.token_totals.prompt,
        res.token_totals.completion
    ));
    w(out, &s)
}

/// Loads the config (or defaults) and the knowledge base.
fn search_setup(config: Option<&Path>, kb_path: &Path) -> Result<(Config, KnowledgeBase)> {
    let cfg = Config::load_or_default(config)?;
    let kb = kb::load(kb_path)?;
    Ok((cfg, kb))
}

pub fn cmd_localize(args: &LocalizeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let (mut cfg, kb) = search_setup(args.config.as_deref(), &args.kb)?;
    if let Some(k) = args.k {
        cfg.search.k_files = k;
    }
    if let Some(k) = args.k_repos {
        cfg.search.k_repos = k;
    }
    if let Some(k) = args.k_dirs {
        cfg.search.k_dirs = k;
    }
    if args.flat {
        cfg.search.use_directory_filtering = false;
    }
    cfg.search.validate()?;
    let bug = read_bug(args)?;
    let (gateway, prompts, model) = (cfg.gateway()?, cfg.prompts()?, cfg.search_model());
    let searcher = Searcher::new(&gateway, &prompts, &model);
    let res = searcher.localize(&bug, &kb, &cfg.search)?;
    for step in res.fallbacks() {
        let scope = step.repo_id.as_deref().unwrap_or("workspace");
        let _ = writeln!(
            err,
            "warning: unparseable ranking at {:?} ({scope}); used lexicographic fallback",
            step.stage
        );
    }
    print_localization(&res, !cfg.search.use_directory_filtering, out)?;
    if let Some(path) = &args.audit_out {
        res.write_audit(path)?;
    }
    Ok(())
}

pub fn cmd_eval(args: &EvalArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let (cfg, kb) = search_setup(args.config.as_deref(), &args.kb)?;
    let tickets = load_tickets(&args.tickets)?;
    let (gateway, prompts, model) = (cfg.gateway()?, cfg.prompts()?, cfg.search_model());
    let searcher = Searcher::new(&gateway, &prompts, &model);

    let (json, report) = if args.ablate {
        let r = compare_ablation(&tickets, &kb, &cfg.search, &searcher)?;
        w(out, &format_ablation_table(&r))?;
        (r.to_json(), r.filtered)
    } else {
        let r = evaluate_dataset(&tickets, &kb, &cfg.search, &searcher)?;
        w(out, &format_report_table(&r, "hierarchical"))?;
        (r.to_json(), r)
    };
    for t in &report.invalid {
        let _ = writeln!(err, "invalid ticket {}: {}", t.ticket_id, t.reason);
    }
    for t in &report.failed {
        let _ = writeln!(err, "failed ticket {}: {}", t.ticket_id, t.reason);
    }
    if let Some(path) = &args.report_out {
        std::fs::write(path, json + "\n").map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

fn selectors(kb: &KnowledgeBase) -> Vec<String> {
    let mut all = Vec::new();
    for r in &kb.repos {
        all.push(r.repo_id.clone());
        for d in r.dirs_post_order() {
            if !d.path.is_empty() {
                all.push(format!("{}/{}", r.repo_id, d.path));
            }
        }
        for f in r.walk_files() {
            all.push(format!("{}/{}", r.repo_id, f.path));
        }
    }
    all
}

pub fn cmd_inspect(args: &InspectArgs, out: &mut dyn Write) -> Result<()> {
    let kb = kb::load(&args.kb)?;
    let Some(selector) = args.selector.as_deref() else {
        let mut s = String::new();
        for r in &kb.repos {
            s.push_str(&format!("{}\t{} files\t{} lines\n", r.repo_id, r.file_count, r.total_loc));
        }
        return w(out, &s);
    };
    let (repo_id, rest) = selector.split_once('/').unwrap_or((selector, ""));
    if let Some(repo) = kb.repo(repo_id) {
        if rest.is_empty() {
            return w(out, &format!("{}\n", repo.seed.text));
        }
        if let Some(f) = repo.find_file(rest) {
            return w(
                out,
                &format!("{}\nlanguage: {}\ncontent_hash: {}\nloc: {}\n", f.summary, f.language_tag, f.content_hash, f.loc),
            );
        }
        if let Some(d) = repo.find_dir(rest) {
            return w(out, &format!("{}\n", d.summary));
        }
    }
    let candidates = selectors(&kb);
    let nearest = candidates
        .iter()
        .min_by_key(|c| strsim::levenshtein(c, selector))
        .map(|c| format!("; did you mean {c:?}?"))
        .unwrap_or_default();
    Err(Error::Precondition(format!("no repository, directory or file matches {selector:?}{nearest}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_config_prints_defaults() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let cli = Cli::parse_from(["repolens", "init-config"]);
        assert_eq!(run(cli, &mut out, &mut err), 0);
        assert_eq!(Config::parse(std::str::from_utf8(&out).unwrap()).unwrap(), Config::default());
    }

    #[test]
    fn missing_workspace_names_path() {
        let tmp = tempfile::tempdir().unwrap();
        let missing = tmp.path().join("nowhere");
        let cli = Cli::parse_from([
            "repolens",
            "build",
            "--workspace",
            missing.to_str().unwrap(),
            "--out",
            tmp.path().join("kb.json").to_str().unwrap(),
        ]);
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(cli, &mut out, &mut err), 1);
        assert!(String::from_utf8(err).unwrap().contains("nowhere"));
    }
}

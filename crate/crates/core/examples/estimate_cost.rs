//! Dry-run cost estimate: renders every prompt a build would send, without
//! calling a model, and extrapolates to a large industrial workspace.
//!
//! cargo run --example estimate_cost [-- <workspace>]
//!
//! The extrapolation target is a 46-repository Java system with 7,077 source
//! files and about 1.1M lines, whose one-off build was reported to cost
//! roughly $80. The figure printed here only needs to land in the same order
//! of magnitude; it depends on the price table and the summary length.

use std::path::PathBuf;

use repolens::builder::{estimate_build_cost, BuildBudget, Stage, WorkspaceSpec};
use repolens::llm::{estimate_cost, CostModel};
use repolens::prompts::PromptCatalog;
use repolens::synth::{generate_workspace, SynthParams};

const TARGET_REPOS: f64 = 46.0;
const TARGET_FILES: f64 = 7077.0;
const TARGET_LOC: f64 = 1_100_000.0;

fn loc_and_files(root: &std::path::Path, spec: &WorkspaceSpec) -> (f64, f64) {
    let (mut loc, mut files) = (0.0, 0.0);
    for entry in ignore::WalkBuilder::new(root).build().flatten() {
        let path = entry.path();
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        if entry.file_type().is_some_and(|t| t.is_file()) && spec.source_extensions.contains(ext) {
            if path.components().any(|c| c.as_os_str() == "target") {
                continue;
            }
            files += 1.0;
            loc += std::fs::read_to_string(path).map(|t| t.lines().count() as f64).unwrap_or(0.0);
        }
    }
    (loc, files)
}

fn main() -> repolens::Result<()> {
    let _tmp;
    let root = match std::env::args().nth(1) {
        Some(p) => PathBuf::from(p),
        None => {
            _tmp = tempfile::tempdir().expect("temporary directory");
            let params = SynthParams {
                repos: 4,
                dirs_per_repo: 6,
                files_per_dir: 4,
                large_file_ratio: 0.2,
                ..SynthParams::default()
            };
            generate_workspace(_tmp.path(), &params, 7)?;
            _tmp.path().to_path_buf()
        }
    };
    let spec = WorkspaceSpec::new(&root);
    let budget = BuildBudget::default();
    let cm = CostModel::default();
    let est = estimate_build_cost(&spec, budget, &cm, &PromptCatalog::bundled())?;

    println!("{:<10}{:>8}{:>14}{:>14}", "stage", "calls", "prompt", "completion");
    for (stage, t) in &est.stages {
        println!("{:<10}{:>8}{:>14}{:>14}", stage.as_str(), t.calls, t.prompt_tokens, t.completion_tokens);
    }
    println!("this workspace: ${:.4}", est.cost);

    // Seeds scale with repositories, file prompts with lines of code and
    // directory prompts with the number of files.
    let (loc, files) = loc_and_files(&root, &spec);
    let repos = spec.repositories()?.len() as f64;
    let stage = |s: Stage| est.stages.get(&s).copied().unwrap_or_default();
    let (seed, file, dir) = (stage(Stage::Seed), stage(Stage::File), stage(Stage::Directory));
    let scale = |t: u64, by: f64, target: f64| t as f64 / by.max(1.0) * target;
    // Each seed sees the repository's whole source, cut to the seed budget.
    let tokens_per_line = file.prompt_tokens as f64 / loc.max(1.0);
    let seed_per_repo = (tokens_per_line * TARGET_LOC / TARGET_REPOS).min(budget.seed_source_token_budget as f64);
    let prompt = seed_per_repo * TARGET_REPOS
        + scale(file.prompt_tokens, loc, TARGET_LOC)
        + scale(dir.prompt_tokens, files, TARGET_FILES);
    let completion = scale(seed.completion_tokens, repos, TARGET_REPOS)
        + scale(file.completion_tokens, files, TARGET_FILES)
        + scale(dir.completion_tokens, files, TARGET_FILES);
    println!(
        "extrapolated to {TARGET_REPOS} repos / {TARGET_FILES} files / {TARGET_LOC} lines: \
         {:.1}M prompt + {:.1}M completion tokens, ${:.2} (reference build: about $80)",
        prompt / 1e6,
        completion / 1e6,
        estimate_cost(prompt as u64, completion as u64, &cm)
    );
    Ok(())
}

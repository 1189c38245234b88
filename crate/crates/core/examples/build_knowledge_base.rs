//! Builds a knowledge base for the bundled example workspace with the
//! offline mock model and prints its summaries.
//!
//! cargo run --example build_knowledge_base [-- <workspace> [<out.json>]]

use std::path::PathBuf;

use repolens::builder::{build_knowledge_base, BuildBudget, BuildContext, WorkspaceSpec};
use repolens::kb;
use repolens::llm::{Gateway, ModelParams};
use repolens::prompts::PromptCatalog;

fn main() -> repolens::Result<()> {
    let mut args = std::env::args().skip(1);
    let workspace = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/example_workspace"));

    let gateway = Gateway::mock();
    let prompts = PromptCatalog::bundled();
    let model = ModelParams::default();
    let ctx = BuildContext::new(&gateway, &prompts, &model, BuildBudget::default());
    let out = build_knowledge_base(&WorkspaceSpec::new(&workspace), &ctx)?;

    for repo in &out.kb.repos {
        println!("== {} ({} files, {} lines)", repo.repo_id, repo.file_count, repo.total_loc);
        println!("seed: {}", repo.seed.text);
        for dir in repo.dirs_post_order().into_iter().filter(|d| d.contains_files()) {
            println!("  [{}] {}", dir.label(), dir.summary);
        }
    }
    for (stage, t) in out.stage_totals() {
        println!("{:<10} {:>4} calls {:>8} prompt tokens", stage.as_str(), t.calls, t.prompt_tokens);
    }
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(path) = args.next() {
        kb::save(&out.kb, path.as_ref())?;
        println!("saved {path}");
    }
    Ok(())
}

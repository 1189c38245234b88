//! Localizes one bug report across the example workspace and prints every
//! stage of the search together with its audit trail.
//!
//! cargo run --example localize_bug [-- "bug report text"]

use std::path::PathBuf;

use repolens::builder::{build_knowledge_base, BuildBudget, BuildContext, WorkspaceSpec};
use repolens::llm::{Gateway, ModelParams};
use repolens::prompts::PromptCatalog;
use repolens::search::{BugReport, SearchConfig, Searcher};

fn main() -> repolens::Result<()> {
    let text = std::env::args().nth(1).unwrap_or_else(|| {
        "Webhook retries create a second PaymentRecord for the same provider event id.".to_string()
    });
    let workspace = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/example_workspace");

    let gateway = Gateway::mock();
    let prompts = PromptCatalog::bundled();
    let model = ModelParams::default();
    let ctx = BuildContext::new(&gateway, &prompts, &model, BuildBudget::default());
    let kb = build_knowledge_base(&WorkspaceSpec::new(workspace), &ctx)?.kb;

    let searcher = Searcher::new(&gateway, &prompts, &model);
    let result = searcher.localize(&BugReport::new("EXAMPLE-1", "", text), &kb, &SearchConfig::default())?;

    println!("routed: {:?}", result.routed_repos.labels());
    for repo in &result.per_repo {
        println!("{}: directories {:?}", repo.repo_id, repo.filtered_dirs.labels());
    }
    for item in &result.merged_files.items {
        println!("{:>2}. {}  ({})", item.rank, item.label, item.rationale);
    }
    for step in &result.audit {
        println!(
            "audit {:?} {:<18} {:>6} prompt {:>5} completion{}",
            step.stage,
            step.repo_id.as_deref().unwrap_or("-"),
            step.prompt_tokens,
            step.completion_tokens,
            if step.fallback { "  (fallback)" } else { "" }
        );
    }
    println!("tokens: {} prompt, {} completion", result.token_totals.prompt, result.token_totals.completion);
    Ok(())
}

//! Compares hierarchical search with the flat variant that skips directory
//! filtering, on a generated workspace with many directories per repository.
//!
//! cargo run --example ablation [-- <seed>]

use repolens::builder::{build_knowledge_base, BuildBudget, BuildContext, WorkspaceSpec};
use repolens::eval::{compare_ablation, format_ablation_table};
use repolens::llm::{Gateway, ModelParams};
use repolens::prompts::PromptCatalog;
use repolens::search::{SearchConfig, Searcher};
use repolens::synth::{generate_workspace, SynthParams};

fn main() -> repolens::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let tmp = tempfile::tempdir().expect("temporary directory");
    let params = SynthParams {
        repos: 5,
        dirs_per_repo: 8,
        files_per_dir: 4,
        tickets_per_repo: 3,
        ..SynthParams::default()
    };
    let tickets = generate_workspace(tmp.path(), &params, seed)?;

    let gateway = Gateway::mock();
    let prompts = PromptCatalog::bundled();
    let model = ModelParams::default();
    let ctx = BuildContext::new(&gateway, &prompts, &model, BuildBudget::default());
    let kb = build_knowledge_base(&WorkspaceSpec::new(tmp.path()), &ctx)?.kb;
    println!("{} repositories, {} files, {} tickets", kb.repos.len(), kb.file_count(), tickets.len());

    // two directories out of eight keep the ranking prompt small
    let cfg = SearchConfig {
        k_dirs: 2,
        ..SearchConfig::default()
    };
    let searcher = Searcher::new(&gateway, &prompts, &model);
    let report = compare_ablation(&tickets, &kb, &cfg, &searcher)?;
    print!("{}", format_ablation_table(&report));
    Ok(())
}

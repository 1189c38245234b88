//! Localizes a bug with an OpenAI-compatible chat completions endpoint.
//!
//! REPOLENS_API_KEY=... cargo run --example remote_backend -- <base_url> "bug text"
//!
//! `base_url` is the API root, e.g. `https://api.openai.com/v1`. The
//! knowledge base is built with the remote model too, so this makes one
//! call per file and directory of the example workspace.

use std::path::PathBuf;

use repolens::builder::{build_knowledge_base, BuildContext};
use repolens::config::{BackendKind, Config};
use repolens::llm::API_KEY_ENV;
use repolens::search::{BugReport, Searcher};

fn main() -> repolens::Result<()> {
    let mut args = std::env::args().skip(1);
    let (Some(base_url), Some(bug)) = (args.next(), args.next()) else {
        eprintln!("usage: remote_backend <base_url> <bug text>   (credential in {API_KEY_ENV})");
        std::process::exit(2);
    };

    let mut cfg = Config::default();
    cfg.backend.kind = BackendKind::Remote;
    cfg.backend.base_url = base_url;
    cfg.validate()?;

    let gateway = cfg.gateway()?;
    let prompts = cfg.prompts()?;
    let build_model = cfg.build_model();
    let workspace = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/example_workspace");
    let ctx = BuildContext::new(&gateway, &prompts, &build_model, cfg.budgets);
    let kb = build_knowledge_base(&cfg.workspace_spec(Some(&workspace))?, &ctx)?.kb;
    println!("built knowledge base with {} calls", gateway.call_count());

    let search_model = cfg.search_model();
    let searcher = Searcher::new(&gateway, &prompts, &search_model);
    let result = searcher.localize(&BugReport::new("REMOTE-1", "", bug), &kb, &cfg.search)?;
    for item in &result.merged_files.items {
        println!("{:>2}. {}  {}", item.rank, item.label, item.rationale);
    }
    for step in result.fallbacks() {
        eprintln!("warning: {:?} fell back to lexicographic order", step.stage);
    }
    Ok(())
}

//! Loads a saved knowledge base (or builds the example one) and walks its
//! tree, printing every directory and file summary.
//!
//! cargo run --example inspect_kb [-- <kb.json>]

use std::path::PathBuf;

use repolens::builder::{build_knowledge_base, BuildBudget, BuildContext, WorkspaceSpec};
use repolens::kb::{self, DirNode};
use repolens::llm::{Gateway, ModelParams};
use repolens::prompts::PromptCatalog;

fn print_dir(dir: &DirNode, depth: usize) {
    let pad = "  ".repeat(depth);
    println!("{pad}{}/  {}", dir.label(), dir.summary);
    for sub in &dir.subdirs {
        print_dir(sub, depth + 1);
    }
    for f in &dir.files {
        println!("{pad}  {} [{}, {} lines, {}]", kb::base_name(&f.path), f.language_tag, f.loc, &f.content_hash[..12]);
        println!("{pad}    {}", f.summary);
    }
}

fn main() -> repolens::Result<()> {
    let kb = match std::env::args().nth(1) {
        Some(path) => kb::load(path.as_ref())?,
        None => {
            let workspace = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/example_workspace");
            let gateway = Gateway::mock();
            let prompts = PromptCatalog::bundled();
            let model = ModelParams::default();
            let ctx = BuildContext::new(&gateway, &prompts, &model, BuildBudget::default());
            build_knowledge_base(&WorkspaceSpec::new(workspace), &ctx)?.kb
        }
    };
    println!("schema {} by {} at {}", kb.schema_version, kb.generator_model_id, kb.created_at);
    for repo in &kb.repos {
        println!("\n# {}\n{}\n", repo.repo_id, repo.seed.text);
        print_dir(&repo.root, 0);
    }
    Ok(())
}

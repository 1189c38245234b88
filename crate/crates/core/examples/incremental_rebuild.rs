//! Edits one file in a copy of the example workspace and shows which
//! summaries an incremental rebuild regenerates.
//!
//! cargo run --example incremental_rebuild

use std::path::{Path, PathBuf};

use repolens::builder::{build_knowledge_base, incremental_update, BuildBudget, BuildContext, WorkspaceSpec};
use repolens::llm::{Gateway, ModelParams};
use repolens::prompts::PromptCatalog;

fn copy_dir(from: &Path, to: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(to)?;
    for entry in std::fs::read_dir(from)? {
        let entry = entry?;
        let target = to.join(entry.file_name());
        if entry.file_type()?.is_dir() {
            copy_dir(&entry.path(), &target)?;
        } else {
            std::fs::copy(entry.path(), &target)?;
        }
    }
    Ok(())
}

fn main() -> repolens::Result<()> {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let source = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/example_workspace");
    copy_dir(&source, tmp.path()).expect("copy example workspace");
    let spec = WorkspaceSpec::new(tmp.path());

    let gateway = Gateway::mock();
    let prompts = PromptCatalog::bundled();
    let model = ModelParams::default();
    let ctx = BuildContext::new(&gateway, &prompts, &model, BuildBudget::default());
    let first = build_knowledge_base(&spec, &ctx)?;
    println!("full build: {} calls", first.log.len());

    let unchanged = incremental_update(&first.kb, &spec, &ctx)?;
    println!("rebuild with no changes: {} calls", unchanged.log.len());

    let file = tmp
        .path()
        .join("inventory-service/src/main/java/com/acme/inventory/service/ReservationService.java");
    let mut text = std::fs::read_to_string(&file).expect("read source");
    text.push_str("// reservation expiry is measured in minutes\n");
    std::fs::write(&file, text).expect("write source");

    let after = incremental_update(&first.kb, &spec, &ctx)?;
    println!("rebuild after editing one file: {} calls", after.log.len());
    for e in &after.log {
        println!("  {:<10} {}/{}", e.stage.as_str(), e.repo_id, e.path);
    }
    Ok(())
}

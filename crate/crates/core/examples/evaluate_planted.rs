//! Evaluates the bundled ticket dataset against the example workspace and
//! prints routing and file-level metrics.
//!
//! cargo run --example evaluate_planted

use std::path::PathBuf;

use repolens::builder::{build_knowledge_base, BuildBudget, BuildContext, WorkspaceSpec};
use repolens::eval::{evaluate_dataset, format_report_table, load_tickets};
use repolens::llm::{Gateway, ModelParams};
use repolens::prompts::PromptCatalog;
use repolens::search::{SearchConfig, Searcher};

fn main() -> repolens::Result<()> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let tickets = load_tickets(&data.join("tickets.jsonl"))?;

    let gateway = Gateway::mock();
    let prompts = PromptCatalog::bundled();
    let model = ModelParams::default();
    let ctx = BuildContext::new(&gateway, &prompts, &model, BuildBudget::default());
    let kb = build_knowledge_base(&WorkspaceSpec::new(data.join("example_workspace")), &ctx)?.kb;

    let searcher = Searcher::new(&gateway, &prompts, &model);
    let report = evaluate_dataset(&tickets, &kb, &SearchConfig::default(), &searcher)?;
    print!("{}", format_report_table(&report, "hierarchical"));
    for row in &report.per_ticket {
        println!(
            "{:<10} routed={} pass={} rr={:.2} top={}",
            row.ticket_id,
            row.routed_hit,
            row.pass_at_k,
            row.reciprocal_rank,
            row.merged_files.first().map(String::as_str).unwrap_or("-")
        );
    }
    Ok(())
}

use std::path::{Path, PathBuf};

use chrono::{TimeZone, Utc};
use clap::Parser;
use repolens::builder::{build_knowledge_base, BuildBudget, BuildContext, Stage, WorkspaceSpec};
use repolens::cli::{run, Cli};
use repolens::eval::{evaluate_dataset, load_tickets};
use repolens::kb::{self, KnowledgeBase};
use repolens::llm::{Backend, ChatRequest, ChatResponse, Gateway, LlmError, MockBackend, ModelParams, RecordingBackend, RetryPolicy};
use repolens::prompts::PromptCatalog;
use repolens::search::{BugReport, SearchConfig, SearchStage, Searcher};
use repolens::Error;

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn build_example() -> KnowledgeBase {
    let gateway = Gateway::mock();
    let prompts = PromptCatalog::bundled();
    let model = ModelParams::default();
    let ctx = BuildContext::new(&gateway, &prompts, &model, BuildBudget::default())
        .created_at(Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap());
    build_knowledge_base(&WorkspaceSpec::new(data("example_workspace")), &ctx).unwrap().kb
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let cli = Cli::try_parse_from(std::iter::once("repolens").chain(args.iter().copied())).unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(cli, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn example_workspace_shape() {
    let kb = build_example();
    kb::validate(&kb).unwrap();
    assert_eq!(kb.repo_ids().collect::<Vec<_>>(), ["billing-service", "customer-service", "inventory-service"]);
    assert_eq!(kb.file_count(), 29);
    let inventory = kb.repo("inventory-service").unwrap();
    // gitignored directory and documentation never become file nodes
    assert!(inventory.walk_files().iter().all(|f| !f.path.starts_with("local/")));
    let billing = kb.repo("billing-service").unwrap();
    assert!(billing.walk_files().iter().all(|f| f.path.ends_with(".java")));
    assert!(billing.seed.text.starts_with("Billing service."), "{}", billing.seed.text);
}

#[test]
fn seed_prompt_lists_binary_attachment_as_skipped() {
    let rec = std::sync::Arc::new(RecordingBackend::new(MockBackend));
    let gateway = Gateway::from_arc(rec.clone());
    let prompts = PromptCatalog::bundled();
    let model = ModelParams::default();
    let ctx = BuildContext::new(&gateway, &prompts, &model, BuildBudget::default());
    let out = build_knowledge_base(&WorkspaceSpec::new(data("example_workspace")), &ctx).unwrap();
    let seeds: Vec<_> = out.log.iter().filter(|e| e.stage == Stage::Seed).collect();
    assert_eq!(seeds.len(), 3);
    let billing_seed = rec
        .requests()
        .into_iter()
        .find(|r| r.user_text.contains("billing-service") && r.user_text.contains("invoice-flow.puml"))
        .unwrap();
    assert!(billing_seed.user_text.contains("docs/architecture.png"));
    assert!(billing_seed.user_text.contains("multimodal"));
}

#[test]
fn save_load_round_trip_is_byte_identical() {
    let kb = build_example();
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a.json"), tmp.path().join("b.json"));
    kb::save(&kb, &a).unwrap();
    let loaded = kb::load(&a).unwrap();
    assert_eq!(loaded, kb);
    kb::save(&loaded, &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn build_is_deterministic_with_fixed_timestamp() {
    assert_eq!(build_example(), build_example());
}

#[test]
fn dangling_repository_aborts_build_with_completed_list() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::create_dir_all(tmp.path().join("alpha/src")).unwrap();
    std::fs::write(tmp.path().join("alpha/src/Alpha.java"), "class Alpha {}\n").unwrap();
    std::os::unix::fs::symlink(tmp.path().join("missing"), tmp.path().join("zulu")).unwrap();
    let gateway = Gateway::mock();
    let prompts = PromptCatalog::bundled();
    let model = ModelParams::default();
    let ctx = BuildContext::new(&gateway, &prompts, &model, BuildBudget::default());
    match build_knowledge_base(&WorkspaceSpec::new(tmp.path()), &ctx) {
        Err(Error::BuildAborted { repo, completed, .. }) => {
            assert_eq!(repo, "zulu");
            assert_eq!(completed, ["alpha"]);
        }
        other => panic!("expected abort, got {other:?}"),
    }
}

#[test]
fn excluded_build_directories_are_not_indexed() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::create_dir_all(tmp.path().join("svc/src")).unwrap();
    std::fs::create_dir_all(tmp.path().join("svc/target/classes")).unwrap();
    std::fs::write(tmp.path().join("svc/src/Real.java"), "class Real {}\n").unwrap();
    std::fs::write(tmp.path().join("svc/target/classes/Gen.java"), "class Gen {}\n").unwrap();
    let gateway = Gateway::mock();
    let prompts = PromptCatalog::bundled();
    let model = ModelParams::default();
    let ctx = BuildContext::new(&gateway, &prompts, &model, BuildBudget::default());
    let kb = build_knowledge_base(&WorkspaceSpec::new(tmp.path()), &ctx).unwrap().kb;
    let files: Vec<_> = kb.repos[0].walk_files().iter().map(|f| f.path.clone()).collect();
    assert_eq!(files, ["src/Real.java"]);
}

#[test]
fn planted_tickets_rank_first() {
    let kb = build_example();
    let tickets = load_tickets(&data("tickets.jsonl")).unwrap();
    let gateway = Gateway::mock();
    let prompts = PromptCatalog::bundled();
    let model = ModelParams::default();
    let searcher = Searcher::new(&gateway, &prompts, &model);
    let cfg = SearchConfig::default();
    for t in &tickets {
        let r = searcher.localize(&t.bug(), &kb, &cfg).unwrap();
        assert!(t.truth_files.contains(r.merged_files.labels()[0]), "{}: {:?}", t.id, r.merged_files);
        // each stage only narrows what the previous one kept
        assert!(r.routed_repos.labels().iter().all(|id| kb.repo(id).is_some()));
        for pr in &r.per_repo {
            assert!(r.routed_repos.labels().contains(&pr.repo_id.as_str()));
            let dirs = pr.filtered_dirs.labels();
            for path in pr.ranked_files.labels() {
                let parent = repolens::kb::parent_path(path);
                assert!(dirs.iter().any(|d| *d == parent || (*d == "." && parent.is_empty())), "{path}");
            }
        }
    }
    let report = evaluate_dataset(&tickets, &kb, &cfg, &searcher).unwrap();
    assert_eq!(report.aggregates.pass_at_k_mean, 1.0);
    assert!(report.invalid.is_empty() && report.failed.is_empty());
}

#[test]
fn flat_variant_ranks_every_file_of_routed_repos() {
    let kb = build_example();
    let gateway = Gateway::mock();
    let prompts = PromptCatalog::bundled();
    let model = ModelParams::default();
    let searcher = Searcher::new(&gateway, &prompts, &model);
    let bug = BugReport::new("X", "", "InvoiceService applies the discount twice when TaxCalculator rounds");
    let r = searcher.localize_flat(&bug, &kb, &SearchConfig::default()).unwrap();
    assert!(r.audit.iter().all(|a| a.stage != SearchStage::FilterDirs));
    for pr in &r.per_repo {
        assert_eq!(pr.candidate_count as u64, kb.repo(&pr.repo_id).unwrap().file_count);
    }
}

/// Fails every call made inside one repository.
struct FailsIn(&'static str);

impl Backend for FailsIn {
    fn name(&self) -> &str {
        "fails-in"
    }

    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, LlmError> {
        if request.system_text.contains(&format!("\"{}\"", self.0)) {
            return Err(LlmError::Auth("denied".into()));
        }
        MockBackend.complete(request)
    }
}

#[test]
fn failing_repository_is_reported_not_fatal() {
    let kb = build_example();
    let gateway = Gateway::new(FailsIn("inventory-service")).with_retry(RetryPolicy::none());
    let prompts = PromptCatalog::bundled();
    let model = ModelParams::default();
    let searcher = Searcher::new(&gateway, &prompts, &model);
    let bug = BugReport::new("X", "", "stock reservation for a sku expires too early in the warehouse");
    let r = searcher.localize(&bug, &kb, &SearchConfig::default()).unwrap();
    assert!(r.skipped_repos.iter().any(|f| f.repo_id == "inventory-service"));
    assert!(r.merged_files.labels().iter().all(|f| !f.starts_with("inventory-service/")));
    assert!(r.audit.iter().any(|a| a.error.is_some()));
}

#[test]
fn cli_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let kb_path = tmp.path().join("kb.json");
    let ws = data("example_workspace");
    let tickets = data("tickets.jsonl");

    let (code, out, _) = cli(&["build", "--workspace", s(&ws), "--out", s(&kb_path), "--dry-run"]);
    assert_eq!(code, 0);
    assert!(out.contains("dry run"));
    assert!(!kb_path.exists());

    let log = tmp.path().join("build.log");
    let (code, out, err) = cli(&["build", "--workspace", s(&ws), "--out", s(&kb_path), "--log-out", s(&log)]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("3 repositories, 29 files"), "{out}");
    assert_eq!(std::fs::read_to_string(&log).unwrap().lines().count(), 3 + 29 + 39);

    let (code, out, _) = cli(&["build", "--workspace", s(&ws), "--out", s(&kb_path), "--incremental"]);
    assert_eq!(code, 0);
    assert!(out.contains("3 repositories"), "{out}");

    let audit = tmp.path().join("audit.jsonl");
    let bug = "TaxCalculator rounds the tax on an invoice line before the discount";
    let (code, out, _) = cli(&["localize", "--kb", s(&kb_path), bug, "--audit-out", s(&audit)]);
    assert_eq!(code, 0);
    assert!(out.contains("Routed repositories:") && out.contains("Filtered directories"), "{out}");
    let steps: usize = out
        .lines()
        .find_map(|l| l.strip_prefix("Audit: "))
        .and_then(|l| l.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(std::fs::read_to_string(&audit).unwrap().lines().count(), steps);

    let (code, out, _) = cli(&["localize", "--kb", s(&kb_path), bug, "--flat"]);
    assert_eq!(code, 0);
    assert!(!out.contains("Filtered directories"));

    let (code, out, _) = cli(&["eval", "--kb", s(&kb_path), "--tickets", s(&tickets)]);
    assert_eq!(code, 0);
    assert!(out.contains("Pass@10") && out.contains("1.00"), "{out}");

    let (code, out, _) = cli(&["eval", "--kb", s(&kb_path), "--tickets", s(&tickets), "--ablate"]);
    assert_eq!(code, 0);
    assert!(out.contains("w/o filtering"), "{out}");

    let empty = tmp.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    let (code, _, err) = cli(&["eval", "--kb", s(&kb_path), "--tickets", s(&empty)]);
    assert_ne!(code, 0);
    assert!(err.starts_with("error:"));

    let (code, out, _) = cli(&["inspect", "--kb", s(&kb_path)]);
    assert_eq!(code, 0);
    assert!(out.contains("billing-service"));
    let file = "billing-service/src/main/java/com/acme/billing/service/TaxCalculator.java";
    let (code, out, _) = cli(&["inspect", "--kb", s(&kb_path), file]);
    assert_eq!(code, 0);
    assert!(out.contains("content_hash"), "{out}");
    let (code, _, err) = cli(&["inspect", "--kb", s(&kb_path), "billing-servise"]);
    assert_ne!(code, 0);
    assert!(err.contains("billing-service"), "{err}");
}

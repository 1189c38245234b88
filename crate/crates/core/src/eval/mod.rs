//! Evaluation harness: scores localization runs over a ticket dataset.

mod dataset;
mod metrics;
mod report;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kb::KnowledgeBase;
use crate::search::{SearchConfig, SearchStage, Searcher};

pub use dataset::{load_tickets, parse_tickets, write_tickets, Ticket};
pub use metrics::{mean, pass_at_k, recall_at_k, reciprocal_rank};
pub use report::{format_ablation_table, format_report_table};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TicketScore {
    pub ticket_id: String,
    pub routed_hit: bool,
    pub routing_pass_at_k: u8,
    pub routing_recall_at_k: f64,
    pub routing_reciprocal_rank: f64,
    pub pass_at_k: u8,
    pub recall_at_k: f64,
    pub reciprocal_rank: f64,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub stage_prompt_tokens: BTreeMap<SearchStage, u64>,
    /// Audit steps that ended in the deterministic fallback ranking.
    pub fallbacks: usize,
    pub merged_files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcludedTicket {
    pub ticket_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub pass_at_k_mean: f64,
    pub recall_at_k_mean: f64,
    pub mrr: f64,
    pub routing_pass_at_k: f64,
    pub routing_recall_at_k: f64,
    pub routing_mrr: f64,
    pub avg_prompt_tokens: f64,
    pub avg_completion_tokens: f64,
    pub avg_stage_prompt_tokens: BTreeMap<SearchStage, f64>,
}

impl Aggregates {
    /// Arithmetic means over the scored rows.
    pub fn from_rows(rows: &[TicketScore]) -> Self {
        let stages = [SearchStage::Route, SearchStage::FilterDirs, SearchStage::RankFiles];
        Self {
            pass_at_k_mean: mean(rows.iter().map(|r| f64::from(r.pass_at_k))),
            recall_at_k_mean: mean(rows.iter().map(|r| r.recall_at_k)),
            mrr: mean(rows.iter().map(|r| r.reciprocal_rank)),
            routing_pass_at_k: mean(rows.iter().map(|r| f64::from(r.routing_pass_at_k))),
            routing_recall_at_k: mean(rows.iter().map(|r| r.routing_recall_at_k)),
            routing_mrr: mean(rows.iter().map(|r| r.routing_reciprocal_rank)),
            avg_prompt_tokens: mean(rows.iter().map(|r| r.prompt_tokens as f64)),
            avg_completion_tokens: mean(rows.iter().map(|r| r.completion_tokens as f64)),
            avg_stage_prompt_tokens: stages
                .into_iter()
                .filter(|s| rows.iter().any(|r| r.stage_prompt_tokens.contains_key(s)))
                .map(|s| {
                    let avg = mean(rows.iter().map(|r| r.stage_prompt_tokens.get(&s).copied().unwrap_or(0) as f64));
                    (s, avg)
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Sorted by ticket id.
    pub per_ticket: Vec<TicketScore>,
    /// Tickets whose ground truth does not resolve in the knowledge base.
    pub invalid: Vec<ExcludedTicket>,
    /// Tickets whose localization failed outright.
    pub failed: Vec<ExcludedTicket>,
    pub aggregates: Aggregates,
    pub config_echo: SearchConfig,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

fn score(ticket: &Ticket, kb: &KnowledgeBase, cfg: &SearchConfig, searcher: &Searcher<'_>) -> Result<TicketScore> {
    let res = searcher.localize(&ticket.bug(), kb, cfg)?;
    let routed = res.routed_repos.labels();
    let merged = res.merged_files.labels();
    let truth_repos: Vec<&str> = ticket.truth_repos.iter().map(String::as_str).collect();
    let truth_files: Vec<&str> = ticket.truth_files.iter().map(String::as_str).collect();
    let routing_pass = pass_at_k(&routed, &truth_repos, cfg.k_repos);

    let mut stage_prompt_tokens = BTreeMap::new();
    for step in &res.audit {
        *stage_prompt_tokens.entry(step.stage).or_insert(0) += step.prompt_tokens;
    }
    Ok(TicketScore {
        ticket_id: ticket.id.clone(),
        routed_hit: routing_pass == 1,
        routing_pass_at_k: routing_pass,
        routing_recall_at_k: recall_at_k(&routed, &truth_repos, cfg.k_repos)?,
        routing_reciprocal_rank: reciprocal_rank(&routed, &truth_repos),
        pass_at_k: pass_at_k(&merged, &truth_files, cfg.k_files),
        recall_at_k: recall_at_k(&merged, &truth_files, cfg.k_files)?,
        reciprocal_rank: reciprocal_rank(&merged, &truth_files),
        prompt_tokens: res.token_totals.prompt,
        completion_tokens: res.token_totals.completion,
        stage_prompt_tokens,
        fallbacks: res.fallbacks().count(),
        merged_files: merged.iter().map(|s| s.to_string()).collect(),
    })
}

/// Localizes every valid ticket (concurrently, bounded by the gateway's
/// in-flight limit) and scores routing at `k_repos` and files at `k_files`.
pub fn evaluate_dataset(
    tickets: &[Ticket],
    kb: &KnowledgeBase,
    cfg: &SearchConfig,
    searcher: &Searcher<'_>,
) -> Result<EvalReport> {
    if tickets.is_empty() {
        return Err(Error::Precondition("no tickets to evaluate".into()));
    }
    cfg.validate()?;
    let mut sorted: Vec<&Ticket> = tickets.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));

    let mut invalid = Vec::new();
    let mut valid = Vec::new();
    for t in sorted {
        match t.check(kb) {
            Ok(()) => valid.push(t),
            Err(reason) => {
                log::warn!("ticket {} excluded: {reason}", t.id);
                invalid.push(ExcludedTicket {
                    ticket_id: t.id.clone(),
                    reason,
                });
            }
        }
    }

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<TicketScore>>>> = Mutex::new((0..valid.len()).map(|_| None).collect());
    let workers = searcher.gateway.max_inflight().min(valid.len()).max(1);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(t) = valid.get(i) else { break };
                let r = score(t, kb, cfg, searcher);
                results.lock().unwrap()[i] = Some(r);
            });
        }
    });

    let mut per_ticket = Vec::new();
    let mut failed = Vec::new();
    for (t, r) in valid.iter().zip(results.into_inner().unwrap()) {
        match r.expect("every ticket is processed") {
            Ok(row) => per_ticket.push(row),
            Err(e) => {
                log::warn!("ticket {} failed: {e}", t.id);
                failed.push(ExcludedTicket {
                    ticket_id: t.id.clone(),
                    reason: e.to_string(),
                });
            }
        }
    }
    if per_ticket.is_empty() {
        return Err(Error::Precondition(format!(
            "no ticket could be scored ({} invalid, {} failed)",
            invalid.len(),
            failed.len()
        )));
    }
    Ok(EvalReport {
        aggregates: Aggregates::from_rows(&per_ticket),
        per_ticket,
        invalid,
        failed,
        config_echo: cfg.clone(),
    })
}

/// Relative change from `base` to `value` in percent; `None` when `base` is 0.
pub fn percent_change(base: f64, value: f64) -> Option<f64> {
    (base != 0.0).then(|| (value - base) / base * 100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationDeltas {
    pub pass_at_k: Option<f64>,
    pub recall_at_k: Option<f64>,
    pub mrr: Option<f64>,
    pub avg_prompt_tokens: Option<f64>,
    /// Flat minus filtered average prompt tokens.
    pub avg_prompt_tokens_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub filtered: EvalReport,
    pub flat: EvalReport,
    /// Percentage changes of the flat variant relative to the filtered one.
    pub deltas: AblationDeltas,
}

impl AblationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Evaluates with directory filtering on and off over the same tickets.
pub fn compare_ablation(
    tickets: &[Ticket],
    kb: &KnowledgeBase,
    cfg: &SearchConfig,
    searcher: &Searcher<'_>,
) -> Result<AblationReport> {
    let on = SearchConfig {
        use_directory_filtering: true,
        ..cfg.clone()
    };
    let off = SearchConfig {
        use_directory_filtering: false,
        ..cfg.clone()
    };
    let filtered = evaluate_dataset(tickets, kb, &on, searcher)?;
    let flat = evaluate_dataset(tickets, kb, &off, searcher)?;
    let (a, b) = (&filtered.aggregates, &flat.aggregates);
    let deltas = AblationDeltas {
        pass_at_k: percent_change(a.pass_at_k_mean, b.pass_at_k_mean),
        recall_at_k: percent_change(a.recall_at_k_mean, b.recall_at_k_mean),
        mrr: percent_change(a.mrr, b.mrr),
        avg_prompt_tokens: percent_change(a.avg_prompt_tokens, b.avg_prompt_tokens),
        avg_prompt_tokens_abs: b.avg_prompt_tokens - a.avg_prompt_tokens,
    };
    Ok(AblationReport { filtered, flat, deltas })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::tests::{dir, file, repo};
    use crate::kb::{FileNode, RepoSummary, RepoTree};
    use crate::llm::{Gateway, ModelParams};
    use crate::prompts::PromptCatalog;
    use chrono::TimeZone;

    fn f(path: &str, summary: &str) -> FileNode {
        let mut n = file(path);
        n.summary = summary.into();
        n
    }

    fn small_kb() -> KnowledgeBase {
        let mut dd = dir(
            "pay",
            vec![],
            vec![f("pay/Refund.java", "refund reversal ledger"), f("pay/Charge.java", "charge capture card")],
        );
        dd.summary = "payments refund charge".into();
        let mut other = dir("misc", vec![], vec![f("misc/Util.java", "string helpers")]);
        other.summary = "helpers".into();
        let mut r: RepoTree = repo("billing", dir("", vec![other, dd], vec![]));
        r.seed = RepoSummary {
            text: "Billing refund and charge service.".into(),
            token_estimate: 1,
            inputs_digest: String::new(),
        };
        let mut kb = KnowledgeBase::new(chrono::Utc.timestamp_opt(0, 0).unwrap(), "m");
        kb.repos.push(r);
        kb
    }

    fn ticket(id: &str, body: &str, files: &[&str]) -> Ticket {
        Ticket {
            id: id.into(),
            title: String::new(),
            body: body.into(),
            truth_repos: ["billing".to_string()].into(),
            truth_files: files.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn perfect_single_ticket() {
        let gw = Gateway::mock();
        let (pc, mp) = (PromptCatalog::bundled(), ModelParams::default());
        let s = Searcher::new(&gw, &pc, &mp);
        let kb = small_kb();
        let r = evaluate_dataset(
            &[ticket("T1", "refund reversal ledger broken", &["billing/pay/Refund.java"])],
            &kb,
            &SearchConfig::default(),
            &s,
        )
        .unwrap();
        let a = &r.aggregates;
        assert_eq!((a.pass_at_k_mean, a.recall_at_k_mean, a.mrr), (1.0, 1.0, 1.0));
        assert_eq!((a.routing_pass_at_k, a.routing_recall_at_k, a.routing_mrr), (1.0, 1.0, 1.0));
    }

    #[test]
    fn mrr_is_mean_and_invalid_excluded() {
        let gw = Gateway::mock();
        let (pc, mp) = (PromptCatalog::bundled(), ModelParams::default());
        let s = Searcher::new(&gw, &pc, &mp);
        let kb = small_kb();
        let tickets = [
            ticket("B", "charge capture card refund", &["billing/pay/Refund.java"]),
            ticket("A", "charge capture card", &["billing/pay/Charge.java"]),
            ticket("C", "stale", &["billing/gone.java"]),
        ];
        let r = evaluate_dataset(&tickets, &kb, &SearchConfig::default(), &s).unwrap();
        let ids: Vec<_> = r.per_ticket.iter().map(|t| t.ticket_id.as_str()).collect();
        assert_eq!(ids, ["A", "B"]);
        assert_eq!(r.per_ticket[1].reciprocal_rank, 0.5);
        assert_eq!(r.aggregates.mrr, 0.75);
        assert_eq!(r.invalid.len(), 1);
        assert_eq!(r.aggregates, Aggregates::from_rows(&r.per_ticket));
    }

    #[test]
    fn ablation_echo_differs_only_in_flag() {
        let gw = Gateway::mock();
        let (pc, mp) = (PromptCatalog::bundled(), ModelParams::default());
        let s = Searcher::new(&gw, &pc, &mp);
        let cfg = SearchConfig {
            k_dirs: 1,
            ..SearchConfig::default()
        };
        let r = compare_ablation(
            &[ticket("T", "refund ledger", &["billing/pay/Refund.java"])],
            &small_kb(),
            &cfg,
            &s,
        )
        .unwrap();
        let mut echo = r.flat.config_echo.clone();
        assert!(!echo.use_directory_filtering && r.filtered.config_echo.use_directory_filtering);
        echo.use_directory_filtering = true;
        assert_eq!(echo, r.filtered.config_echo);
        assert!(r.flat.per_ticket[0].recall_at_k >= r.filtered.per_ticket[0].recall_at_k);
    }

    #[test]
    fn empty_dataset_is_an_error() {
        let gw = Gateway::mock();
        let (pc, mp) = (PromptCatalog::bundled(), ModelParams::default());
        let s = Searcher::new(&gw, &pc, &mp);
        assert!(evaluate_dataset(&[], &small_kb(), &SearchConfig::default(), &s).is_err());
    }

    #[test]
    fn percent_change_sign() {
        assert_eq!(percent_change(100.0, 144.0), Some(44.0));
        assert_eq!(percent_change(0.0, 1.0), None);
    }
}

use std::fmt::Write;

use super::{AblationReport, EvalReport};

fn tokens(n: f64) -> String {
    if n < 1000.0 {
        format!("{n:.0}")
    } else {
        format!("~{:.1}K", n / 1000.0)
    }
}

fn with_delta(value: String, delta: Option<f64>) -> String {
    match delta {
        Some(d) => format!("{value} ({d:+.0}%)"),
        None => value,
    }
}

fn row(out: &mut String, cells: &[String]) {
    let mut line = String::new();
    for c in cells {
        let _ = write!(line, "{c:<15} ");
    }
    out.push_str(line.trim_end());
    out.push('\n');
}

/// Routing and file-localization tables for one evaluation run.
pub fn format_report_table(report: &EvalReport, label: &str) -> String {
    let a = &report.aggregates;
    let cfg = &report.config_echo;
    let mut out = String::new();
    let _ = writeln!(out, "Repository routing (k={})", cfg.k_repos);
    row(&mut out, &["Approach".into(), format!("Pass@{}", cfg.k_repos), format!("Recall@{}", cfg.k_repos), "MRR".into()]);
    row(
        &mut out,
        &[
            label.into(),
            format!("{:.2}", a.routing_pass_at_k),
            format!("{:.2}", a.routing_recall_at_k),
            format!("{:.2}", a.routing_mrr),
        ],
    );
    out.push('\n');
    let _ = writeln!(out, "File localization (k={})", cfg.k_files);
    row(
        &mut out,
        &[
            "Approach".into(),
            format!("Pass@{}", cfg.k_files),
            format!("Recall@{}", cfg.k_files),
            "MRR".into(),
            "Avg. Tokens".into(),
        ],
    );
    row(
        &mut out,
        &[
            label.into(),
            format!("{:.2}", a.pass_at_k_mean),
            format!("{:.2}", a.recall_at_k_mean),
            format!("{:.2}", a.mrr),
            tokens(a.avg_prompt_tokens),
        ],
    );
    if !a.avg_stage_prompt_tokens.is_empty() {
        let stages: Vec<String> = a
            .avg_stage_prompt_tokens
            .iter()
            .map(|(s, t)| format!("{}={}", serde_json::to_value(s).unwrap().as_str().unwrap(), tokens(*t)))
            .collect();
        let _ = writeln!(out, "\nAvg. prompt tokens by stage: {}", stages.join(", "));
    }
    let _ = writeln!(
        out,
        "Tickets: {} scored, {} invalid, {} failed",
        report.per_ticket.len(),
        report.invalid.len(),
        report.failed.len()
    );
    out
}

/// Side-by-side comparison with percentage changes of the flat variant.
pub fn format_ablation_table(report: &AblationReport) -> String {
    let (a, b, d) = (&report.filtered.aggregates, &report.flat.aggregates, &report.deltas);
    let k = report.filtered.config_echo.k_files;
    let mut out = String::new();
    row(
        &mut out,
        &["Method".into(), format!("Pass@{k}"), format!("Recall@{k}"), "MRR".into(), "Avg. Tokens".into()],
    );
    row(
        &mut out,
        &[
            "hierarchical".into(),
            format!("{:.2}", a.pass_at_k_mean),
            format!("{:.2}", a.recall_at_k_mean),
            format!("{:.2}", a.mrr),
            tokens(a.avg_prompt_tokens),
        ],
    );
    row(
        &mut out,
        &[
            "w/o filtering".into(),
            with_delta(format!("{:.2}", b.pass_at_k_mean), d.pass_at_k),
            with_delta(format!("{:.2}", b.recall_at_k_mean), d.recall_at_k),
            with_delta(format!("{:.2}", b.mrr), d.mrr),
            with_delta(tokens(b.avg_prompt_tokens), d.avg_prompt_tokens),
        ],
    );
    let _ = writeln!(out, "Token delta: {:+.0} prompt tokens per ticket", d.avg_prompt_tokens_abs);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn token_format() {
        assert_eq!(tokens(999.0), "999");
        assert_eq!(tokens(108_000.0), "~108.0K");
        assert_eq!(with_delta("0.67".into(), Some(-18.2)), "0.67 (-18%)");
    }
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{run_build, BuildBudget, BuildContext, Stage, WorkspaceSpec};
use crate::error::Result;
use crate::llm::{estimate_cost, Backend, ChatRequest, ChatResponse, CostModel, Gateway, LlmError, ModelParams};
use crate::prompts::PromptCatalog;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTokens {
    pub calls: u64,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildCostEstimate {
    pub stages: BTreeMap<Stage, StageTokens>,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub cost: f64,
}

/// Stands in for the model during a dry run: every summary is a placeholder
/// as long as the configured summary limit, so downstream prompts are sized
/// for the worst case.
struct PlaceholderBackend {
    summary: String,
    completion_tokens: u64,
}

impl Backend for PlaceholderBackend {
    fn name(&self) -> &str {
        "dry-run"
    }

    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, LlmError> {
        Ok(ChatResponse {
            text: self.summary.clone(),
            prompt_tokens: request.prompt_estimate(),
            completion_tokens: self.completion_tokens,
        })
    }
}

/// Renders every prompt a full build would send and prices the estimated
/// tokens. No model is contacted.
pub fn estimate_build_cost(
    spec: &WorkspaceSpec,
    budget: BuildBudget,
    cm: &CostModel,
    prompts: &PromptCatalog,
) -> Result<BuildCostEstimate> {
    if spec.repositories()?.is_empty() {
        return Ok(BuildCostEstimate {
            stages: BTreeMap::new(),
            prompt_tokens: 0,
            completion_tokens: 0,
            cost: 0.0,
        });
    }
    let words = (budget.summary_max_tokens as usize * 4).div_ceil(8);
    let gateway = Gateway::new(PlaceholderBackend {
        summary: "summary ".repeat(words).trim_end().to_string(),
        completion_tokens: budget.summary_max_tokens as u64,
    })
    .with_max_inflight(8);
    let model = ModelParams::default();
    let ctx = BuildContext::new(&gateway, prompts, &model, budget);
    let out = run_build(spec, None, &ctx)?;

    let stages = out.stage_totals();
    let prompt_tokens = stages.values().map(|s| s.prompt_tokens).sum();
    let completion_tokens = stages.values().map(|s| s.completion_tokens).sum();
    Ok(BuildCostEstimate {
        cost: estimate_cost(prompt_tokens, completion_tokens, cm),
        stages,
        prompt_tokens,
        completion_tokens,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_workspace_costs_nothing() {
        let tmp = tempfile::tempdir().unwrap();
        let est = estimate_build_cost(
            &WorkspaceSpec::new(tmp.path()),
            BuildBudget::default(),
            &CostModel::default(),
            &PromptCatalog::bundled(),
        )
        .unwrap();
        assert_eq!(est.prompt_tokens, 0);
        assert_eq!(est.cost, 0.0);
    }
}

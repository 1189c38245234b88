use serde::{Deserialize, Serialize};

/// Uniform token estimate: `ceil(chars / 4)`, counting Unicode scalar values.
pub fn estimate_tokens(text: &str) -> u64 {
    (text.chars().count() as u64).div_ceil(4)
}

/// Prices in currency units per million tokens.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub price_per_million_prompt_tokens: f64,
    pub price_per_million_completion_tokens: f64,
}

impl Default for CostModel {
    /// Public list prices of gpt-4.1-mini (USD).
    fn default() -> Self {
        Self {
            price_per_million_prompt_tokens: 0.40,
            price_per_million_completion_tokens: 1.60,
        }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<(), String> {
        let ok = |p: f64| p.is_finite() && p >= 0.0;
        if ok(self.price_per_million_prompt_tokens) && ok(self.price_per_million_completion_tokens) {
            Ok(())
        } else {
            Err("cost model prices must be finite and non-negative".into())
        }
    }
}

pub fn estimate_cost(prompt_tokens: u64, completion_tokens: u64, cm: &CostModel) -> f64 {
    (prompt_tokens as f64 * cm.price_per_million_prompt_tokens
        + completion_tokens as f64 * cm.price_per_million_completion_tokens)
        / 1_000_000.0
}

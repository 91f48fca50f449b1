//! Gateway routing: token-budget estimation with a per-category
//! bytes-per-token EMA, the hard boundary decision, the borderline band,
//! and the compression path that extends the short pool's effective
//! capacity without any hardware change.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::compressor::{compress, CompressorConfig};
use crate::workload::{Category, RequestRecord};

const EMA_MIN: f64 = 1.0;
const EMA_MAX: f64 = 32.0;

/// Per-category bytes-per-token estimates, smoothed by an EMA.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenEstimator {
    ema: BTreeMap<Category, f64>,
    /// EMA smoothing rate.
    pub smoothing: f64,
}

impl Default for TokenEstimator {
    fn default() -> Self {
        TokenEstimator::new(4.0, 0.1)
    }
}

impl TokenEstimator {
    pub fn new(initial_bytes_per_token: f64, smoothing: f64) -> Self {
        let ema = [
            Category::Code,
            Category::Prose,
            Category::Rag,
            Category::Conversational,
        ]
        .into_iter()
        .map(|c| (c, initial_bytes_per_token.clamp(EMA_MIN, EMA_MAX)))
        .collect();
        TokenEstimator { ema, smoothing }
    }

    /// Current estimate for a category; unknown categories fall back to prose.
    pub fn bytes_per_token(&self, category: Category) -> f64 {
        self.ema
            .get(&category)
            .or_else(|| self.ema.get(&Category::Prose))
            .copied()
            .unwrap_or(4.0)
    }

    /// `ceil(payload_bytes / c_hat) + max_output_tokens`.
    pub fn estimate_total_tokens(
        &self,
        payload_bytes: u64,
        category: Category,
        max_output_tokens: u64,
    ) -> u64 {
        assert!(payload_bytes >= 1);
        let c_hat = self.bytes_per_token(category);
        (payload_bytes as f64 / c_hat).ceil() as u64 + max_output_tokens
    }

    /// Fold one observed `(bytes, actual tokens)` pair into the category's
    /// estimate, clamped to [1, 32] bytes/token.
    pub fn update(&mut self, category: Category, payload_bytes: u64, actual_tokens: u64) {
        assert!(actual_tokens >= 1);
        let observed = payload_bytes as f64 / actual_tokens as f64;
        let entry = self.ema.entry(category).or_insert(4.0);
        *entry = ((1.0 - self.smoothing) * *entry + self.smoothing * observed)
            .clamp(EMA_MIN, EMA_MAX);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoolChoice {
    Short,
    Long,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteReason {
    BelowBoundary,
    CompressedIntoShort,
    CodeGate,
    Incompressible,
    AboveBand,
}

/// Outcome of routing one request.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoutingDecision {
    pub pool: PoolChoice,
    pub compressed: bool,
    /// Estimated total tokens used for the boundary test.
    pub estimated_total: u64,
    /// Compression budget `T_c = B - L_out` when compression was attempted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    pub reason: RouteReason,
}

/// Route one request against boundary `B` and band width `gamma`.
///
/// Requests at or below the boundary go short untouched. Borderline
/// requests (in `(B, gamma*B]`) are compressed to `T_c = B - L_out` and
/// re-routed short when the category is safe (code is excluded) and the
/// compression fits; otherwise they go long. Requests beyond the band go
/// long. When `prompt_text` is absent, compression success is simulated
/// as a Bernoulli draw with probability `p_c`.
pub fn route(
    request: &RequestRecord,
    boundary: u64,
    gamma: f64,
    p_c: f64,
    compressor_config: &CompressorConfig,
    estimator: &TokenEstimator,
    rng: &mut impl Rng,
) -> RoutingDecision {
    assert!(boundary >= 1 && gamma >= 1.0);
    let l_out = request.output_tokens;
    let estimated_total = match request.payload_bytes {
        Some(bytes) if bytes >= 1 => {
            estimator.estimate_total_tokens(bytes, request.category, l_out)
        }
        _ => request.total_tokens(),
    };

    if estimated_total <= boundary {
        return RoutingDecision {
            pool: PoolChoice::Short,
            compressed: false,
            estimated_total,
            budget: None,
            reason: RouteReason::BelowBoundary,
        };
    }
    let in_band = (estimated_total as f64) <= gamma * boundary as f64;
    if !in_band {
        return RoutingDecision {
            pool: PoolChoice::Long,
            compressed: false,
            estimated_total,
            budget: None,
            reason: RouteReason::AboveBand,
        };
    }
    if request.category == Category::Code {
        return RoutingDecision {
            pool: PoolChoice::Long,
            compressed: false,
            estimated_total,
            budget: None,
            reason: RouteReason::CodeGate,
        };
    }
    if l_out >= boundary {
        // Output alone exceeds the short window: nothing to compress into.
        return RoutingDecision {
            pool: PoolChoice::Long,
            compressed: false,
            estimated_total,
            budget: None,
            reason: RouteReason::Incompressible,
        };
    }
    let budget = boundary - l_out;
    let success = match &request.prompt_text {
        Some(text) => compress(text, budget, compressor_config)
            .map(|r| r.success)
            .unwrap_or(false),
        None => rng.random::<f64>() < p_c,
    };
    if success {
        RoutingDecision {
            pool: PoolChoice::Short,
            compressed: true,
            estimated_total,
            budget: Some(budget),
            reason: RouteReason::CompressedIntoShort,
        }
    } else {
        RoutingDecision {
            pool: PoolChoice::Long,
            compressed: false,
            estimated_total,
            budget: Some(budget),
            reason: RouteReason::Incompressible,
        }
    }
}

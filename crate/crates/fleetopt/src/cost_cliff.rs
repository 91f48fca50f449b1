//! Cost-cliff arithmetic: slot KV memory, the cliff ratio between pool
//! geometries, the classical pool-routing savings heuristic, and a renderer
//! for per-request capacity tables.

use serde::{Deserialize, Serialize};

use crate::queueing::{GpuProfile, PoolConfig};

/// One row of a cost-cliff table: what a request of a given total length
/// consumes in each pool geometry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CliffRow {
    pub total_tokens: u64,
    pub pool: String,
    pub slots_per_gpu: u64,
    /// Fraction of the slot's KV reservation the request actually uses.
    pub kv_utilization: f64,
    /// Throughput-capacity cost relative to a short-pool slot.
    pub cost_ratio: f64,
}

/// KV bytes reserved by one slot of a given context window.
pub fn slot_kv_bytes(context_window: u64, kv_bytes_per_token: u64) -> u64 {
    assert!(context_window >= 1);
    context_window * kv_bytes_per_token
}

/// Cliff ratio `rho = n_max_short / n_max_long`: how many times more
/// per-GPU capacity a short-pool slot offers.
pub fn cliff_ratio(short_pool: &PoolConfig, long_pool: &PoolConfig) -> f64 {
    short_pool.slots_per_gpu as f64 / long_pool.slots_per_gpu as f64
}

/// Classical pool-routing GPU-savings heuristic `alpha * (1 - 1/rho)`.
/// A back-of-envelope figure only; fleet sizing always goes through the
/// Erlang-C inversion.
pub fn pr_savings_estimate(alpha: f64, rho: f64) -> f64 {
    assert!(rho >= 1.0);
    alpha * (1.0 - 1.0 / rho)
}

/// Build a cliff table for requests at and around the boundary.
pub fn cliff_table(
    profile: &GpuProfile,
    short_pool: &PoolConfig,
    long_pool: &PoolConfig,
    totals: &[u64],
) -> Vec<CliffRow> {
    let rho = cliff_ratio(short_pool, long_pool);
    totals
        .iter()
        .map(|&total| {
            let short_fits = total <= short_pool.context_window;
            let pool = if short_fits { short_pool } else { long_pool };
            CliffRow {
                total_tokens: total,
                pool: if short_fits { "short" } else { "long" }.into(),
                slots_per_gpu: pool.slots_per_gpu,
                kv_utilization: (total * profile.kv_bytes_per_token) as f64
                    / pool.slot_kv_bytes(profile) as f64,
                cost_ratio: if short_fits { 1.0 } else { rho },
            }
        })
        .collect()
}

/// Render a cliff table as aligned text.
pub fn render_cliff_table(profile: &GpuProfile, rows: &[CliffRow]) -> String {
    let gib = |bytes: u64| bytes as f64 / (1024.0 * 1024.0 * 1024.0);
    let mut out = String::new();
    out.push_str("total_tokens  pool   slots/gpu  kv_utilized          cost_ratio\n");
    for row in rows {
        let slot_bytes = slot_kv_bytes(
            profile.calib_slots * profile.calib_context / row.slots_per_gpu,
            profile.kv_bytes_per_token,
        );
        out.push_str(&format!(
            "{:>12}  {:<5}  {:>9}  {:>5.1}% of {:>5.1} GiB  {:>8.1}x\n",
            row.total_tokens,
            row.pool,
            row.slots_per_gpu,
            row.kv_utilization * 100.0,
            gib(slot_bytes),
            row.cost_ratio,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::queueing::PoolConfig;

    fn pools(short_ctx: u64) -> (GpuProfile, PoolConfig, PoolConfig) {
        let p = GpuProfile::default();
        let s = PoolConfig::for_context(&p, short_ctx).unwrap();
        let l = PoolConfig::for_context(&p, 65_536).unwrap();
        (p, s, l)
    }

    #[test]
    fn slot_kv_sizes() {
        let gib = 1024.0 * 1024.0 * 1024.0;
        let long = slot_kv_bytes(65_536, 320 * 1024) as f64 / gib;
        assert!((long - 20.0).abs() < 1e-9, "long slot = {long} GiB");
        let short = slot_kv_bytes(8_192, 320 * 1024) as f64 / gib;
        assert!((short - 2.5).abs() < 1e-9);
    }

    #[test]
    fn cliff_ratios_per_boundary() {
        let (_, s8k, long) = {
            let (p, s, l) = pools(8_192);
            (p, s, l)
        };
        assert_eq!(cliff_ratio(&s8k, &long), 8.0);
        let (_, s4k, long) = pools(4_096);
        assert_eq!(cliff_ratio(&s4k, &long), 16.0);
        let (_, s1536, long) = pools(1_536);
        assert!((cliff_ratio(&s1536, &long) - 42.625).abs() < 1e-12);
    }

    #[test]
    fn savings_heuristic() {
        assert!((pr_savings_estimate(0.898, 16.0) - 0.8419).abs() < 1e-4);
        assert_eq!(pr_savings_estimate(0.5, 1.0), 0.0);
        assert_eq!(pr_savings_estimate(0.0, 8.0), 0.0);
    }

    #[test]
    fn table_kv_utilization() {
        let (p, s, l) = pools(8_192);
        let rows = cliff_table(&p, &s, &l, &[8_192, 8_193, 12_000, 65_536]);
        assert_eq!(rows[0].cost_ratio, 1.0);
        assert!((rows[0].kv_utilization - 1.0).abs() < 1e-12);
        assert_eq!(rows[1].cost_ratio, 8.0);
        assert!((rows[1].kv_utilization - 0.125).abs() < 1e-4);
        assert!((rows[3].kv_utilization - 1.0).abs() < 1e-12);
        let text = render_cliff_table(&p, &rows);
        assert!(text.contains("12.5%"));
    }
}

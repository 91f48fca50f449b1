//! Report assembly: JSON payloads consumed by tooling and aligned text
//! tables for humans. Every report embeds the config hash and seed that
//! produced it.

use serde_json::{json, Value};

use crate::math::fnv1a;
use crate::planner::{FleetPlan, PlannerInput, SavingsReport, SweepCell};

/// Stable hash of a serializable config, stamped into reports.
pub fn config_hash<T: serde::Serialize>(config: &T) -> String {
    let canonical = serde_json::to_string(config).unwrap_or_default();
    format!("{:016x}", fnv1a(canonical.as_bytes()))
}

fn cell_json(cell: &SweepCell) -> Value {
    json!({
        "B": cell.boundary,
        "gamma": cell.gamma,
        "alpha": cell.alpha,
        "beta": cell.beta,
        "alpha_prime": cell.alpha_prime,
        "n_s": cell.n_short,
        "n_l": cell.n_long,
        "cost_usd_yr": if cell.feasible { Value::from(cell.cost_per_year) } else { Value::Null },
        "feasible": cell.feasible,
        "infeasible_reason": cell.infeasible_reason,
    })
}

/// Planner report:
/// `{best: {...}, cells: [...], homogeneous: {...}, diagnostics: {...}}`.
pub fn plan_json(
    plan: &FleetPlan,
    input: &PlannerInput,
    decomposition: &SavingsReport,
    retrofit: Option<(f64, f64)>,
) -> Value {
    let best = &plan.best_cell;
    let diag = |d: &Option<crate::planner::PoolDiagnostics>| -> Value {
        match d {
            None => Value::Null,
            Some(d) => json!({
                "arrival_rate": d.arrival_rate,
                "utilization": d.utilization,
                "prefill_p99_ms": d.prefill_p99_s * 1000.0,
                "iter_latency_ms": d.iter_latency_s * 1000.0,
                "wait_budget_ms": d.wait_budget_s * 1000.0,
                "w99_ms": d.w99_s * 1000.0,
                "ttft_p99_ms": d.ttft_p99_s * 1000.0,
            }),
        }
    };
    json!({
        "best": {
            "B": best.boundary,
            "gamma": best.gamma,
            "n_s": best.n_short,
            "n_l": best.n_long,
            "cost_usd_yr": best.cost_per_year,
            "savings": plan.savings_fraction,
        },
        "cells": plan.all_cells.iter().map(cell_json).collect::<Vec<_>>(),
        "homogeneous": {
            "n": plan.homogeneous_n,
            "cost_usd_yr": plan.homogeneous_cost_per_year,
        },
        "diagnostics": {
            "cliff_ratio": plan.cliff_ratio,
            "foc_residual": plan.foc_residual,
            "pr_only_savings": decomposition.pr_only_savings,
            "incremental_estimate": decomposition.incremental_estimate,
            "retrofit_cost_usd_yr": retrofit.map(|(r, _)| r),
            "codesign_cost_usd_yr": retrofit.map(|(_, c)| c),
            "short_pool": diag(&best.short_diagnostics),
            "long_pool": diag(&best.long_diagnostics),
        },
        "config_hash": config_hash(input),
        "seed": input.seed,
    })
}

/// Fleet comparison table: homogeneous baseline, plain pool routing, the
/// gamma-pinned retrofit, and the co-designed optimum.
pub fn render_plan_table(plan: &FleetPlan, retrofit_gamma: f64) -> String {
    let mut rows: Vec<(String, String, String, u64, f64)> = Vec::new();
    rows.push((
        "homogeneous".into(),
        "-".into(),
        "-".into(),
        plan.homogeneous_n,
        plan.homogeneous_cost_per_year,
    ));
    let pr = plan
        .all_cells
        .iter()
        .filter(|c| c.feasible && (c.gamma - 1.0).abs() < 1e-9)
        .min_by(|a, b| {
            a.cost_per_year
                .total_cmp(&b.cost_per_year)
                .then(a.boundary.cmp(&b.boundary))
        });
    if let Some(pr) = pr {
        rows.push((
            format!("pool routing (B={})", pr.boundary),
            pr.n_short.to_string(),
            pr.n_long.to_string(),
            pr.n_short + pr.n_long,
            pr.cost_per_year,
        ));
        if let Some(retro) = plan.all_cells.iter().find(|c| {
            c.feasible
                && c.boundary == pr.boundary
                && (c.gamma - retrofit_gamma).abs() < 1e-9
        }) {
            rows.push((
                format!("retrofit (gamma={retrofit_gamma})"),
                retro.n_short.to_string(),
                retro.n_long.to_string(),
                retro.n_short + retro.n_long,
                retro.cost_per_year,
            ));
        }
    }
    let best = &plan.best_cell;
    rows.push((
        format!("co-design (B={}, gamma*={})", best.boundary, best.gamma),
        best.n_short.to_string(),
        best.n_long.to_string(),
        best.n_short + best.n_long,
        best.cost_per_year,
    ));

    let mut out = String::new();
    out.push_str(&format!(
        "{:<34} {:>6} {:>6} {:>7} {:>14} {:>9}\n",
        "method", "n_s", "n_l", "total", "cost $/yr", "savings"
    ));
    for (method, n_s, n_l, total, cost) in rows {
        let savings = 1.0 - cost / plan.homogeneous_cost_per_year;
        out.push_str(&format!(
            "{:<34} {:>6} {:>6} {:>7} {:>14.0} {:>8.1}%\n",
            method,
            n_s,
            n_l,
            total,
            cost,
            100.0 * savings
        ));
    }
    out
}

/// One row of the simulation validation report.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SimValidationRow {
    pub pool: String,
    pub n_gpus: u64,
    pub rho_ana: f64,
    pub rho_hat: f64,
    pub error: f64,
    pub ttft_p50_ms: f64,
    pub ttft_p99_ms: f64,
}

pub fn sim_json<T: serde::Serialize>(rows: &[SimValidationRow], config: &T, seed: u64) -> Value {
    json!({
        "pools": rows,
        "config_hash": config_hash(config),
        "seed": seed,
    })
}

pub fn render_sim_table(rows: &[SimValidationRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<8} {:>7} {:>9} {:>9} {:>8} {:>12} {:>12}\n",
        "pool", "n_gpus", "rho_ana", "rho_hat", "error", "ttft_p50_ms", "ttft_p99_ms"
    ));
    for r in rows {
        out.push_str(&format!(
            "{:<8} {:>7} {:>9.4} {:>9.4} {:>7.2}% {:>12.1} {:>12.1}\n",
            r.pool,
            r.n_gpus,
            r.rho_ana,
            r.rho_hat,
            100.0 * r.error,
            r.ttft_p50_ms,
            r.ttft_p99_ms
        ));
    }
    out
}

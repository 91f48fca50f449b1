//! Inspect a workload preset end to end: fitted quantiles against anchors,
//! routing fractions, archetype, the full sweep surface with per-pool
//! diagnostics, and the baseline comparisons.
//!
//! ```bash
//! cargo run --release --example workload_report            # all presets
//! cargo run --release --example workload_report agent-heavy
//! ```

use fleetopt::planner::{codesign_vs_retrofit, plan_homogeneous, savings_decomposition, sweep};
use fleetopt::queueing::GpuProfile;
use fleetopt::workload::{borderline_fraction, classify_archetype};
use fleetopt::{presets, Error};

fn report(preset: &presets::WorkloadPreset) -> Result<(), Error> {
    println!("=== {} ===", preset.name);
    let workload = preset.workload()?;
    let dist = &workload.distribution;
    println!("  points: {}  support: [{}, {}]  mean: {:.1}",
        dist.points().len(), dist.support_min(), dist.support_max(), dist.mean());
    for &(p, v) in &preset.anchors {
        let q = dist.quantile(p);
        println!(
            "  anchor p{:>5.3} = {:>6}   fitted q = {:>6}   rel err {:+.2}%",
            p, v, q, 100.0 * (q as f64 - v as f64) / v as f64
        );
    }
    let (alpha, beta) = borderline_fraction(dist, preset.boundary, 1.5);
    println!(
        "  B = {}  alpha = {:.3}  beta(1.5) = {:.3}  archetype {}",
        preset.boundary,
        alpha,
        beta,
        classify_archetype(dist, preset.boundary, 1.5)
    );

    let input = preset.planner_input(GpuProfile::default(), 7)?;
    let homogeneous = plan_homogeneous(&input)?;
    if let Some(d) = &homogeneous.diagnostics {
        println!(
            "  homogeneous: n = {}  prefill99 = {:.3}s  ttft99 = {:.3}s  rho = {:.3}",
            homogeneous.n_gpus, d.prefill_p99_s, d.ttft_p99_s, d.utilization
        );
    }
    let plan = sweep(&input)?;
    println!("  cells (B, gamma -> n_s n_l cost feasible | pool ttft99s):");
    for cell in &plan.all_cells {
        let fmt_d = |d: &Option<fleetopt::planner::PoolDiagnostics>| match d {
            Some(d) => format!("{:.3}", d.ttft_p99_s),
            None => "-".into(),
        };
        println!(
            "    B={:<6} g={:<4} n_s={:<5} n_l={:<5} cost/yr=${:<12.0} {}  short:{} long:{} {}",
            cell.boundary,
            cell.gamma,
            cell.n_short,
            cell.n_long,
            cell.cost_per_year,
            if cell.feasible { "ok " } else { "INF" },
            fmt_d(&cell.short_diagnostics),
            fmt_d(&cell.long_diagnostics),
            cell.infeasible_reason.as_deref().unwrap_or(""),
        );
    }
    println!(
        "  best: B = {}  gamma = {}  n = ({}, {})  savings = {:.1}%",
        plan.best_cell.boundary,
        plan.best_cell.gamma,
        plan.best_cell.n_short,
        plan.best_cell.n_long,
        100.0 * plan.savings_fraction
    );
    let decomposition = savings_decomposition(&plan, workload.compressibility);
    if let Some(pr) = decomposition.pr_only_savings {
        println!(
            "  plain pool routing: {:.1}%   compression estimate: {:.1}pp   cliff {:.1}x",
            100.0 * pr,
            100.0 * decomposition.incremental_estimate,
            decomposition.cliff_ratio
        );
    }
    let (retrofit, codesign) = codesign_vs_retrofit(&input, 1.5)?;
    println!(
        "  retrofit(1.5) = ${:.0}/yr   codesign = ${:.0}/yr   savings {:.1}% vs {:.1}%",
        retrofit,
        codesign,
        100.0 * (1.0 - retrofit / plan.homogeneous_cost_per_year),
        100.0 * (1.0 - codesign / plan.homogeneous_cost_per_year),
    );
    println!();
    Ok(())
}

fn main() {
    let filter: Option<String> = std::env::args().nth(1);
    for preset in presets::all() {
        if let Some(f) = &filter {
            if &preset.name != f {
                continue;
            }
        }
        if let Err(e) = report(&preset) {
            eprintln!("{}: {e}", preset.name);
            std::process::exit(e.exit_code());
        }
    }
}

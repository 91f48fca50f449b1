//! Plan a minimum-cost two-pool fleet for a built-in workload preset and
//! print the comparison against the homogeneous baseline.
//!
//! ```bash
//! cargo run --release --example plan_fleet [azure|lmsys|agent-heavy]
//! ```

use fleetopt::planner::{savings_decomposition, sweep};
use fleetopt::queueing::GpuProfile;
use fleetopt::report::render_plan_table;
use fleetopt::presets;

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "azure".into());
    let preset = presets::by_name(&name).unwrap_or_else(|| {
        eprintln!("unknown preset '{name}'; try azure, lmsys, agent-heavy");
        std::process::exit(2);
    });
    let input = preset
        .planner_input(GpuProfile::default(), 7)
        .expect("preset materializes");
    let plan = sweep(&input).expect("sweep solves");

    println!(
        "workload '{}': lambda = {} req/s, TTFT SLO = {} ms, boundary candidates {:?}",
        preset.name,
        input.workload.arrival_rate,
        input.slo_s * 1000.0,
        input.candidate_boundaries.as_ref().unwrap()
    );
    println!();
    print!("{}", render_plan_table(&plan, 1.5));
    println!();

    let best = &plan.best_cell;
    println!(
        "chosen cell: boundary {} tokens, band width {:.1} (effective short window {} tokens)",
        best.boundary,
        best.gamma,
        (best.gamma * best.boundary as f64) as u64
    );
    println!(
        "traffic split: alpha = {:.3}, beta = {:.3}, alpha' = {:.3}",
        best.alpha, best.beta, best.alpha_prime
    );
    let report = savings_decomposition(&plan, input.workload.compressibility);
    println!(
        "cliff ratio {:.1}x; first-order compression gain {:.1} pp; realized savings {:.1}%",
        report.cliff_ratio,
        100.0 * report.incremental_estimate,
        100.0 * report.realized_savings
    );
    if let Some(d) = &best.long_diagnostics {
        println!(
            "long-pool P99 TTFT {:.0} ms against the {:.0} ms budget",
            d.ttft_p99_s * 1000.0,
            input.slo_s * 1000.0
        );
    }
}

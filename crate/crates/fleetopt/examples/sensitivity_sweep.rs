//! Fleet size and savings across a range of arrival rates: the two-pool
//! split's proportional savings should hold steady as load scales.
//!
//! ```bash
//! cargo run --release --example sensitivity_sweep
//! ```

use fleetopt::planner::sweep;
use fleetopt::queueing::GpuProfile;
use fleetopt::presets;

fn main() {
    let preset = presets::agent_heavy();
    println!(
        "{:>8} {:>8} {:>8} {:>10} {:>8} {:>11} {:>14}",
        "lambda", "homog", "pr", "fleetopt", "gamma*", "pr_saving", "fleet_saving"
    );
    for lambda in [100.0, 200.0, 500.0, 1000.0, 2000.0] {
        let mut preset = preset.clone();
        preset.arrival_rate = lambda;
        let input = preset
            .planner_input(GpuProfile::default(), 7)
            .expect("preset materializes");
        let plan = sweep(&input).expect("sweep solves");
        let pr = plan
            .all_cells
            .iter()
            .filter(|c| c.feasible && (c.gamma - 1.0).abs() < 1e-9)
            .min_by(|a, b| a.cost_per_year.total_cmp(&b.cost_per_year))
            .expect("gamma=1 in grid");
        println!(
            "{:>8.0} {:>8} {:>8} {:>10} {:>8.1} {:>10.1}% {:>13.1}%",
            lambda,
            plan.homogeneous_n,
            pr.n_short + pr.n_long,
            plan.best_cell.n_short + plan.best_cell.n_long,
            plan.best_cell.gamma,
            100.0 * (1.0 - pr.cost_per_year / plan.homogeneous_cost_per_year),
            100.0 * plan.savings_fraction,
        );
    }
}

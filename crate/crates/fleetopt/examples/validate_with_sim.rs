//! Size a pool-routing fleet analytically, then drive the discrete-event
//! simulator against each pool and compare predicted vs measured GPU
//! utilization.
//!
//! ```bash
//! cargo run --release --example validate_with_sim [azure|lmsys|agent-heavy]
//! ```

use fleetopt::planner::sweep;
use fleetopt::queueing::{GpuProfile, PoolConfig};
use fleetopt::simulator::{compare_to_analytic, run_des, SimConfig};
use fleetopt::presets;

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "azure".into());
    let preset = presets::by_name(&name).unwrap_or_else(|| {
        eprintln!("unknown preset '{name}'");
        std::process::exit(2);
    });

    // Validate the plain pool-routing fleet (no compression) at a reduced
    // arrival rate so 30,000 requests cover many service times per pool.
    let mut input = preset
        .planner_input(GpuProfile::default(), 11)
        .expect("preset materializes");
    input.workload.arrival_rate = 50.0;
    input.gamma_grid = vec![1.0];
    let plan = sweep(&input).expect("sweep solves");
    let best = &plan.best_cell;
    println!(
        "pool-routing fleet at lambda = {} req/s: n_short = {}, n_long = {}",
        input.workload.arrival_rate, best.n_short, best.n_long
    );

    let dist = &input.workload.distribution;
    let profile = &input.profile;
    let requests = 30_000;
    println!(
        "{:<6} {:>6} {:>9} {:>9} {:>8} {:>12}",
        "pool", "gpus", "rho_ana", "rho_hat", "error", "ttft_p99_ms"
    );
    let pools = [
        (
            "short",
            best.n_short,
            best.alpha * input.workload.arrival_rate,
            dist.restrict(0.0, best.boundary as f64),
            PoolConfig::for_context(profile, best.boundary).unwrap(),
            best.short_stats.clone(),
        ),
        (
            "long",
            best.n_long,
            (1.0 - best.alpha) * input.workload.arrival_rate,
            dist.restrict(best.boundary as f64, f64::INFINITY),
            PoolConfig::for_context(profile, profile.calib_context).unwrap(),
            best.long_stats.clone(),
        ),
    ];
    for (label, n, lambda_p, restriction, pool, stats) in pools {
        let (Some(restriction), Some(stats)) = (restriction, stats) else {
            continue;
        };
        let mut config = SimConfig::new(lambda_p, requests, 21);
        config.warmup_fraction = 0.2;
        let report = run_des(&restriction, input.output_model, n, profile, &pool, &config)
            .expect("stable pool");
        let error = compare_to_analytic(&report, n, lambda_p, &stats).expect("completions");
        println!(
            "{:<6} {:>6} {:>9.4} {:>9.4} {:>7.2}% {:>12.1}",
            label,
            n,
            lambda_p / (n as f64 * stats.gpu_rate),
            report.measured_utilization,
            100.0 * error,
            report.ttft_p99_s * 1000.0
        );
    }
}

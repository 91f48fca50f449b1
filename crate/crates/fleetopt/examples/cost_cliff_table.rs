//! Show the cost cliff: per-request slot capacity at and just above the
//! short-pool boundary, and the classical savings heuristic it implies.
//!
//! ```bash
//! cargo run --release --example cost_cliff_table [boundary_tokens]
//! ```

use fleetopt::cost_cliff::{cliff_ratio, cliff_table, pr_savings_estimate, render_cliff_table};
use fleetopt::queueing::{GpuProfile, PoolConfig};

fn main() {
    let boundary: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(8192);
    let profile = GpuProfile::default();
    let short = PoolConfig::for_context(&profile, boundary).expect("valid boundary");
    let long = PoolConfig::for_context(&profile, profile.calib_context).expect("valid window");

    let totals = [
        boundary,
        boundary + 1,
        (boundary as f64 * 1.46).round() as u64,
        profile.calib_context,
    ];
    let rows = cliff_table(&profile, &short, &long, &totals);
    print!("{}", render_cliff_table(&profile, &rows));

    let rho = cliff_ratio(&short, &long);
    println!();
    println!(
        "cliff ratio at {boundary}: {rho:.1}x ({} vs {} slots per GPU)",
        short.slots_per_gpu, long.slots_per_gpu
    );
    for alpha in [0.5, 0.74, 0.898] {
        println!(
            "heuristic savings alpha={alpha:.3}: {:.1}%  (upper bound; fleets are sized by \
             queueing inversion, not this formula)",
            100.0 * pr_savings_estimate(alpha, rho)
        );
    }
}

//! Walk through sizing a single pool: calibrate service stats, budget the
//! TTFT target, and invert Erlang-C to the minimum GPU count.
//!
//! ```bash
//! cargo run --release --example size_one_pool
//! ```

use fleetopt::queueing::{
    calibrate, effective_slo, erlang_c, invert_min_servers, iter_latency_ms, prefill_p99,
    utilization, w99_kimura, GpuProfile, PoolConfig,
};
use fleetopt::workload::{EmpiricalDistribution, OutputModel};

fn main() {
    let profile = GpuProfile::default();
    let pool = PoolConfig::for_context(&profile, profile.calib_context).unwrap();
    println!(
        "pool: {} tokens/slot, {} slots/GPU, iteration {} ms",
        pool.context_window,
        pool.slots_per_gpu,
        iter_latency_ms(&profile, pool.slots_per_gpu)
    );

    // A mixed request population and its calibrated service statistics.
    let dist = EmpiricalDistribution::from_weighted(&[
        (600, 0.5),
        (2000, 0.3),
        (8000, 0.15),
        (30_000, 0.05),
    ])
    .unwrap();
    let model = OutputModel::FractionOfTotal { fraction: 0.25 };
    let stats = calibrate(&dist, &profile, &pool, model, 10_000, 7).unwrap();
    println!(
        "calibrated: E[S] = {:.2} s, Cs^2 = {:.3}, mu_gpu = {:.3} req/s",
        stats.mean_service_s, stats.scv, stats.gpu_rate
    );

    // Erlang-C at a glance: waiting probability falls fast with servers.
    for c in [16u64, 64, 256, 1024] {
        println!("  C(c = {c:>5}, rho = 0.85) = {:.3e}", erlang_c(c, 0.85).unwrap());
    }

    let lambda = 40.0;
    let slo_s = 3.0;
    let prefill = prefill_p99(&dist, &profile, &pool, model, 10_000, 7).unwrap();
    let iter_s = iter_latency_ms(&profile, pool.slots_per_gpu) / 1000.0;
    let budget = effective_slo(slo_s, prefill, iter_s);
    println!(
        "P99 prefill {:.3} s + one iteration {:.4} s -> wait budget {:.3} s",
        prefill, iter_s, budget
    );

    let n = invert_min_servers(lambda, &stats, budget, 0.85).unwrap();
    let w99 = w99_kimura(n * pool.slots_per_gpu, stats.slot_rate, lambda, stats.scv).unwrap();
    println!(
        "minimum fleet for lambda = {lambda} req/s: {n} GPUs \
         (utilization {:.3}, P99 wait {:.4} s)",
        utilization(n, lambda, stats.gpu_rate),
        w99
    );
    let w99_minus = w99_kimura((n - 1) * pool.slots_per_gpu, stats.slot_rate, lambda, stats.scv)
        .map(|w| format!("{w:.4} s"))
        .unwrap_or_else(|_| "unstable".into());
    println!(
        "one fewer GPU: utilization {:.3}, P99 wait {w99_minus} (violates a constraint)",
        utilization(n - 1, lambda, stats.gpu_rate)
    );
}

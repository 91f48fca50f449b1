//! Replay synthetic traffic through the gateway router and compare the
//! realized short-pool share against the analytical prediction
//! alpha + beta * p_c.
//!
//! ```bash
//! cargo run --release --example route_traffic
//! ```

use fleetopt::compressor::CompressorConfig;
use fleetopt::presets;
use fleetopt::router::{route, PoolChoice, RouteReason, TokenEstimator};
use fleetopt::workload::{borderline_fraction, sample_requests, Category};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let preset = presets::agent_heavy();
    let workload = preset.workload().expect("preset materializes");
    let boundary = preset.boundary;
    let gamma = 1.5;
    let p_c = workload.compressibility;

    let n = 40_000;
    let records = sample_requests(
        &workload.distribution,
        preset.output_model,
        Some(&workload.category_mix),
        n,
        17,
    );

    let compressor = CompressorConfig::default();
    let estimator = TokenEstimator::default();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut short = 0usize;
    let mut by_reason = std::collections::BTreeMap::<&str, usize>::new();
    let mut band_code = 0usize;
    for record in &records {
        let decision = route(record, boundary, gamma, p_c, &compressor, &estimator, &mut rng);
        if decision.pool == PoolChoice::Short {
            short += 1;
        }
        let label = match decision.reason {
            RouteReason::BelowBoundary => "below_boundary",
            RouteReason::CompressedIntoShort => "compressed_into_short",
            RouteReason::CodeGate => "code_gate",
            RouteReason::Incompressible => "incompressible",
            RouteReason::AboveBand => "above_band",
        };
        *by_reason.entry(label).or_default() += 1;
        if label == "code_gate" && record.category == Category::Code {
            band_code += 1;
        }
    }

    let (alpha, beta) = borderline_fraction(&workload.distribution, boundary, gamma);
    let realized = short as f64 / n as f64;
    println!("boundary {boundary}, gamma {gamma}, p_c {p_c};  {n} requests");
    for (reason, count) in &by_reason {
        println!("  {:<22} {:>6}  ({:.2}%)", reason, count, 100.0 * *count as f64 / n as f64);
    }
    println!("code requests held out of compression: {band_code}");
    println!(
        "short-pool share: realized {:.4} vs analytical alpha {:.4} .. alpha+beta*p_c {:.4}",
        realized,
        alpha,
        alpha + beta * p_c
    );
}

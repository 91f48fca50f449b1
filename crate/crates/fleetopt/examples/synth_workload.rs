//! Build a synthetic token-length distribution from percentile anchors and
//! check how closely the sampled quantiles track them.
//!
//! ```bash
//! cargo run --release --example synth_workload
//! ```

use fleetopt::workload::{classify_archetype, sample_requests, synth_distribution, OutputModel};

fn main() {
    // Mid/tail percentiles of a dispersed agentic workload.
    let anchors = [(0.50, 4096u64), (0.90, 16_384), (0.99, 32_768)];
    let dist = synth_distribution(&anchors, 1).expect("anchors are monotone");

    println!("{} sample points, support [{}, {}]", dist.points().len(),
        dist.support_min(), dist.support_max());
    println!("mean total tokens: {:.0}", dist.mean());
    for &(p, target) in &anchors {
        let q = dist.quantile(p);
        println!(
            "p{:<4} target {:>6}  fitted {:>6}  ({:+.2}%)",
            p * 100.0,
            target,
            q,
            100.0 * (q as f64 - target as f64) / target as f64
        );
    }
    for boundary in [4096u64, 8192, 16_384] {
        println!(
            "F({boundary}) = {:.3}  archetype {}",
            dist.cdf(boundary as f64),
            classify_archetype(&dist, boundary, 1.5)
        );
    }

    // Draw a few records the simulator/calibrator would consume.
    let records = sample_requests(&dist, OutputModel::default(), None, 5, 42);
    println!("sample requests (input/output tokens):");
    for r in &records {
        println!("  {:>6} / {:<5}", r.input_tokens, r.output_tokens);
    }
}

//! Compress a long retrieval-style prompt under a hard token budget and
//! inspect what the extractive pipeline kept.
//!
//! ```bash
//! cargo run --release --example compress_prompt
//! ```

use fleetopt::compressor::{compress, estimate_tokens, with_fidelity, CompressorConfig};

fn sample_prompt() -> String {
    let sections = [
        "System directive: answer strictly from the retrieved context below.",
        "The deployment guide describes a two-pool serving fleet with a short-context tier.",
        "Capacity planning starts from the prompt-length distribution of live traffic.",
        "Retrieved document A discusses KV-cache reservations growing with the context window.",
        "Each slot reserves memory for the worst case, so oversized windows waste capacity.",
        "Retrieved document A also repeats that oversized windows waste accelerator memory.",
        "Retrieved document B lists iteration latency as a base cost plus a per-slot term.",
        "Continuous batching advances every active slot together on each iteration.",
        "Requests occupy a slot for one iteration per output token after prefill completes.",
        "Retrieved document B repeats that decode cost scales with the number of output tokens.",
        "Operational note: utilization above the cap risks instability under bursty arrivals.",
        "A borderline request is one that exceeds the boundary by only a small factor.",
        "Boilerplate disclaimer: this content is provided for planning purposes only.",
        "Boilerplate disclaimer: this content is provided for planning purposes only.",
        "Final instruction: summarize the sizing recommendation in three bullet points.",
        "Remember to cite document identifiers for every claim in the answer.",
    ];
    sections.join(" ")
}

fn main() {
    let config = CompressorConfig::default();
    let prompt = sample_prompt();
    let input_tokens = estimate_tokens(&prompt, config.bytes_per_token);
    let budget = input_tokens * 3 / 4;
    println!("input: {input_tokens} estimated tokens; budget: {budget}");

    let result = with_fidelity(
        compress(&prompt, budget, &config).expect("non-empty prompt"),
        &prompt,
    );
    println!(
        "kept {} sentences -> {} tokens ({:.1}% reduction) in {:.2} ms",
        result.kept_indices.len(),
        result.output_tokens,
        100.0 * result.reduction,
        result.elapsed_ms
    );
    if let Some(f) = result.fidelity {
        println!(
            "fidelity: ROUGE-L recall {:.3}, TF-IDF cosine {:.3}",
            f.rouge_l_recall, f.tfidf_cosine
        );
    }
    println!("kept sentence indices: {:?}", result.kept_indices);
    println!("--- compressed prompt ---");
    println!("{}", result.output_text);
}

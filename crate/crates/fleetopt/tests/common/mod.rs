//! Shared helpers for integration tests: a deterministic prompt-corpus
//! generator producing retrieval/report-style English text with realistic
//! redundancy, plus independent queueing oracles.

use std::sync::{Mutex, MutexGuard, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Serializes acceptance criteria: several assert wall-clock budgets, and
/// the two-core sandbox skews timings when tests share it.
pub fn serial_guard() -> MutexGuard<'static, ()> {
    static LOCK: OnceLock<Mutex<()>> = OnceLock::new();
    LOCK.get_or_init(|| Mutex::new(()))
        .lock()
        .unwrap_or_else(|e| e.into_inner())
}

const SUBJECTS: [&str; 16] = [
    "the retrieval service",
    "the deployment guide",
    "the capacity model",
    "the serving gateway",
    "the batch scheduler",
    "the memory planner",
    "the observability stack",
    "the regression harness",
    "the traffic replay",
    "the admission controller",
    "the token estimator",
    "the context assembler",
    "the cache manager",
    "the rollout playbook",
    "the incident review",
    "the benchmark suite",
];

const VERBS: [&str; 12] = [
    "describes",
    "measures",
    "allocates",
    "reconciles",
    "tracks",
    "summarizes",
    "partitions",
    "reports",
    "estimates",
    "validates",
    "documents",
    "compares",
];

const OBJECTS: [&str; 16] = [
    "per-slot memory reservations",
    "iteration latency under load",
    "the prompt-length distribution",
    "queueing delay percentiles",
    "utilization across both pools",
    "the borderline traffic band",
    "cache residency over time",
    "arrival bursts at peak hours",
    "budget headroom per request",
    "the boundary placement",
    "compression outcomes by category",
    "slot geometry per accelerator",
    "context growth across turns",
    "failure rates during drain",
    "cost per served request",
    "tail behavior at high percentiles",
];

const MODIFIERS: [&str; 12] = [
    "under sustained production traffic",
    "for every context window tier",
    "with seeded reproducibility",
    "across the evaluation corpus",
    "before each quarterly review",
    "using the published constants",
    "without manual intervention",
    "in the steady-state window",
    "after the warmup interval",
    "for audit and rollback",
    "against the analytical bound",
    "within the agreed error budget",
];

const CLAUSES: [&str; 8] = [
    "which keeps the planner honest",
    "so operators can re-run the sweep",
    "because reservations are worst-case",
    "while arrivals remain Poisson",
    "although the tail dominates cost",
    "since decode scales with output length",
    "as the fleet approaches its cap",
    "where the band overlaps the knee",
];

/// One synthetic sentence of roughly `words` words.
fn sentence(rng: &mut ChaCha8Rng, words: usize) -> String {
    let mut parts: Vec<String> = Vec::new();
    loop {
        let mut s = format!(
            "{} {} {} {}",
            SUBJECTS[rng.random_range(0..SUBJECTS.len())],
            VERBS[rng.random_range(0..VERBS.len())],
            OBJECTS[rng.random_range(0..OBJECTS.len())],
            MODIFIERS[rng.random_range(0..MODIFIERS.len())],
        );
        if rng.random::<f64>() < 0.5 {
            s.push_str(", ");
            s.push_str(CLAUSES[rng.random_range(0..CLAUSES.len())]);
        }
        parts.push(s);
        let so_far: usize = parts.iter().map(|p| p.split(' ').count()).sum();
        if so_far >= words {
            break;
        }
        // Chain clauses with connectives to reach long, doc-style sentences.
    }
    let mut text = parts.join(", and ");
    text.push('.');
    // Capitalize the first letter.
    let mut chars = text.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
        None => text,
    }
}

/// Deterministic prompt of roughly `target_tokens` estimated tokens
/// (4 bytes/token), from sentences averaging `avg_words` words, with
/// `redundancy` probability of repeating an earlier sentence.
pub fn prompt(rng: &mut ChaCha8Rng, target_tokens: u64, avg_words: usize, redundancy: f64) -> String {
    let target_bytes = (target_tokens * 4) as usize;
    let mut sentences: Vec<String> = Vec::new();
    let mut bytes = 0usize;
    while bytes < target_bytes {
        let s = if !sentences.is_empty() && rng.random::<f64>() < redundancy {
            sentences[rng.random_range(0..sentences.len())].clone()
        } else {
            let words = avg_words / 2 + rng.random_range(0..avg_words);
            sentence(rng, words)
        };
        bytes += s.len() + 1;
        sentences.push(s);
    }
    sentences.join(" ")
}

/// A corpus of `n` prompts in a token-count range.
pub fn corpus(n: usize, tokens_lo: u64, tokens_hi: u64, avg_words: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let target = rng.random_range(tokens_lo..=tokens_hi);
            prompt(&mut rng, target, avg_words, 0.12)
        })
        .collect()
}

/// Textbook Erlang-C by direct summation; fine for small server counts.
#[allow(dead_code)]
pub fn erlang_c_direct(c: u64, rho: f64) -> f64 {
    let a = c as f64 * rho;
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 0..c {
        if k > 0 {
            term *= a / k as f64;
        }
        sum += term;
    }
    let top = term * a / c as f64 / (1.0 - rho);
    top / (sum + top)
}

/// Waiting probability from the M/M/c birth-death stationary distribution,
/// truncated deep into the geometric tail.
#[allow(dead_code)]
pub fn birth_death_wait_prob(c: u64, rho: f64) -> f64 {
    let a = c as f64 * rho;
    let mut probs = vec![1.0f64];
    let mut p = 1.0;
    for k in 1..=(c + 6000) {
        let service = (k.min(c)) as f64;
        p *= a / service;
        probs.push(p);
    }
    let total: f64 = probs.iter().sum();
    let waiting: f64 = probs.iter().skip(c as usize).sum();
    waiting / total
}

//! Command-line surface: plan, simulate, compress, route-replay, synth,
//! sensitivity, and cliff-table subcommands over the library.
//!
//! Exit codes: 0 success, 2 configuration error, 3 infeasible plan or
//! unstable queue, 4 validation tolerance exceeded.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::compressor::{compress, with_fidelity, CompressorConfig};
use crate::cost_cliff::{cliff_table, render_cliff_table};
use crate::error::{Error, Result};
use crate::math::percentile;
use crate::planner::{codesign_vs_retrofit, savings_decomposition, sweep, PlannerInput};
use crate::presets;
use crate::queueing::{GpuProfile, PoolConfig};
use crate::report;
use crate::router::{route, PoolChoice, TokenEstimator};
use crate::simulator::{compare_to_analytic, run_des_population, SimConfig};
use crate::workload::{
    build_cdf, load_trace, synth_distribution_with, OutputModel, SynthOptions, TraceFormat,
    WorkloadSpec,
};

/// Two-pool GPU fleet capacity planner with compress-and-route.
#[derive(Parser, Debug)]
#[command(name = "fleetopt", version, about)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Derive the minimum-cost two-pool fleet for a workload.
    Plan(PlanArgs),
    /// Cross-check a plan's utilization predictions with the simulator.
    Simulate(SimulateArgs),
    /// Compress prompts under a hard token budget.
    Compress(CompressArgs),
    /// Replay a trace through the gateway router.
    RouteReplay(RouteReplayArgs),
    /// Synthesize a token-length distribution from percentile anchors.
    Synth(SynthArgs),
    /// Fleet sizes and savings across arrival rates.
    Sensitivity(SensitivityArgs),
    /// Per-request slot capacity around the pool boundary.
    CliffTable(CliffTableArgs),
}

/// Workload source plus planner overrides; all hardware constants default
/// to the built-in accelerator profile.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Built-in workload preset name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Request trace path (JSONL or CSV).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<PathBuf>,
    /// Anchor file path (JSON: {"anchors": [[p, tokens], ...], "seed": n}).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchors: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<GpuProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slo_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundaries: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_model: Option<OutputModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Clone)]
struct WorkloadFlags {
    /// JSON run-config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in preset: azure, lmsys, agent-heavy.
    #[arg(long)]
    preset: Option<String>,
    /// Request trace (JSONL or CSV by extension).
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Anchor file (JSON: {"anchors": [[p, tokens], ...], "seed": n}).
    #[arg(long)]
    anchors: Option<PathBuf>,
    /// P99 TTFT target in milliseconds.
    #[arg(long)]
    slo_ms: Option<f64>,
    /// Fleet arrival rate in requests/second.
    #[arg(long)]
    lambda: Option<f64>,
    /// Utilization cap per pool.
    #[arg(long)]
    rho_max: Option<f64>,
    /// Comma-separated band widths, e.g. 1.0,1.5,2.0.
    #[arg(long, value_delimiter = ',')]
    gamma_grid: Option<Vec<f64>>,
    /// Comma-separated candidate boundaries in tokens.
    #[arg(long, value_delimiter = ',')]
    boundaries: Option<Vec<u64>>,
    /// Compressibility of borderline traffic.
    #[arg(long)]
    p_c: Option<f64>,
    /// Monte-Carlo draws per calibration.
    #[arg(long)]
    samples: Option<usize>,
    /// Root seed (falls back to $FLEETOPT_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct PlanArgs {
    #[command(flatten)]
    workload: WorkloadFlags,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    workload: WorkloadFlags,
    /// Requests per pool.
    #[arg(long, default_value_t = 30_000)]
    requests: usize,
    /// Arrival rate the validation runs at (defaults to --lambda).
    #[arg(long)]
    sim_lambda: Option<f64>,
    /// Fail (exit 4) when any pool's |relative error| exceeds this.
    #[arg(long, default_value_t = 0.03)]
    tolerance: f64,
    /// Fraction of earliest completions excluded from statistics.
    #[arg(long, default_value_t = 0.2)]
    warmup: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompressArgs {
    /// JSONL prompts: {"prompt": "...", "category": "..."}.
    #[arg(long)]
    input: PathBuf,
    /// Token budget per prompt.
    #[arg(long)]
    budget: u64,
    /// Also compute ROUGE-L recall and TF-IDF cosine per prompt.
    #[arg(long)]
    fidelity: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RouteReplayArgs {
    /// Request trace (JSONL or CSV).
    #[arg(long)]
    trace: PathBuf,
    /// Short-pool boundary in tokens.
    #[arg(long)]
    boundary: u64,
    /// Band width.
    #[arg(long, default_value_t = 1.5)]
    gamma: f64,
    /// Compressibility used when prompt text is absent.
    #[arg(long, default_value_t = 1.0)]
    p_c: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Write decisions as JSONL here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Anchor file (JSON: {"anchors": [[p, tokens], ...], "seed": n}).
    #[arg(long)]
    anchors: PathBuf,
    /// Sample points.
    #[arg(long, default_value_t = 30_000)]
    points: usize,
    /// Support cap in tokens.
    #[arg(long, default_value_t = 65_536)]
    support_max: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SensitivityArgs {
    #[command(flatten)]
    workload: WorkloadFlags,
    /// Comma-separated arrival rates to evaluate.
    #[arg(long, value_delimiter = ',', required = true)]
    lambdas: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CliffTableArgs {
    /// Short-pool boundary in tokens.
    #[arg(long, default_value_t = 8192)]
    boundary: u64,
}

fn env_seed() -> u64 {
    std::env::var("FLEETOPT_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

#[derive(Deserialize)]
struct AnchorFile {
    anchors: Vec<(f64, u64)>,
    #[serde(default)]
    seed: u64,
}

fn read_anchor_file(path: &Path) -> Result<AnchorFile> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("anchor file: {e}")))
}

fn merge_config(flags: &WorkloadFlags) -> Result<RunConfig> {
    let mut config: RunConfig = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("config file: {e}")))?
        }
        None => RunConfig::default(),
    };
    if flags.preset.is_some() {
        config.preset = flags.preset.clone();
    }
    if flags.trace.is_some() {
        config.trace = flags.trace.clone();
    }
    if flags.anchors.is_some() {
        config.anchors = flags.anchors.clone();
    }
    if flags.slo_ms.is_some() {
        config.slo_ms = flags.slo_ms;
    }
    if flags.lambda.is_some() {
        config.lambda = flags.lambda;
    }
    if flags.rho_max.is_some() {
        config.rho_max = flags.rho_max;
    }
    if flags.gamma_grid.is_some() {
        config.gamma_grid = flags.gamma_grid.clone();
    }
    if flags.boundaries.is_some() {
        config.boundaries = flags.boundaries.clone();
    }
    if flags.p_c.is_some() {
        config.p_c = flags.p_c;
    }
    if flags.samples.is_some() {
        config.samples = flags.samples;
    }
    if flags.seed.is_some() {
        config.seed = flags.seed;
    }
    Ok(config)
}

/// Build a planner input from a merged run config.
fn planner_input_from(config: &RunConfig) -> Result<PlannerInput> {
    let sources = [
        config.preset.is_some(),
        config.trace.is_some(),
        config.anchors.is_some(),
    ]
    .iter()
    .filter(|&&s| s)
    .count();
    if sources != 1 {
        return Err(Error::Config(format!(
            "exactly one workload source required (preset, trace, or anchors); got {sources}"
        )));
    }
    let seed = config.seed.unwrap_or_else(env_seed);
    let profile = config.profile.clone().unwrap_or_default();

    let mut input = if let Some(name) = &config.preset {
        let preset = presets::by_name(name)
            .ok_or_else(|| Error::Config(format!("unknown preset '{name}'")))?;
        preset.planner_input(profile, seed)?
    } else {
        let distribution = if let Some(path) = &config.trace {
            let load = load_trace(path, TraceFormat::from_path(path))?;
            if load.malformed > 0 {
                eprintln!("warning: skipped {} malformed trace lines", load.malformed);
            }
            build_cdf(&load.records)?
        } else {
            let file = read_anchor_file(config.anchors.as_ref().expect("checked"))?;
            synth_distribution_with(
                &file.anchors,
                SynthOptions::default(),
                config.seed.unwrap_or(file.seed),
            )?
        };
        let workload = WorkloadSpec {
            distribution,
            arrival_rate: config.lambda.unwrap_or(1000.0),
            compressibility: config.p_c.unwrap_or(1.0),
            category_mix: Default::default(),
        };
        let mut input = PlannerInput::new(workload, profile, 0.5);
        input.seed = seed;
        input
    };

    // Flag/config overrides on top of source defaults.
    if let Some(slo_ms) = config.slo_ms {
        input.slo_s = slo_ms / 1000.0;
    }
    if let Some(lambda) = config.lambda {
        input.workload.arrival_rate = lambda;
    }
    if let Some(rho_max) = config.rho_max {
        input.rho_max = rho_max;
    }
    if let Some(grid) = &config.gamma_grid {
        input.gamma_grid = grid.clone();
    }
    if let Some(boundaries) = &config.boundaries {
        input.candidate_boundaries = Some(boundaries.clone());
    }
    if let Some(p_c) = config.p_c {
        input.workload.compressibility = p_c;
    }
    if let Some(model) = config.output_model {
        input.output_model = model;
    }
    if let Some(ratio) = config.cost_ratio {
        input.cost_ratio = ratio;
    }
    if let Some(samples) = config.samples {
        input.calibration_samples = samples;
    }
    Ok(input)
}

fn write_or_print(out: &Option<PathBuf>, payload: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(payload).expect("serializable");
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_plan(args: &PlanArgs) -> Result<i32> {
    let config = merge_config(&args.workload)?;
    let input = planner_input_from(&config)?;
    let plan = sweep(&input)?;
    let decomposition = savings_decomposition(&plan, input.workload.compressibility);
    let has_gamma = |g: f64| input.gamma_grid.iter().any(|&x| (x - g).abs() < 1e-9);
    let retrofit = if has_gamma(1.0) && has_gamma(1.5) {
        codesign_vs_retrofit(&input, 1.5).ok()
    } else {
        None
    };
    eprint!("{}", report::render_plan_table(&plan, 1.5));
    write_or_print(&args.out, &report::plan_json(&plan, &input, &decomposition, retrofit))?;
    Ok(0)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<i32> {
    let config = merge_config(&args.workload)?;
    let mut input = planner_input_from(&config)?;
    if let Some(sim_lambda) = args.sim_lambda {
        input.workload.arrival_rate = sim_lambda;
    }
    let plan = sweep(&input)?;
    let best = &plan.best_cell;
    let dist = &input.workload.distribution;
    let boundary = best.boundary;
    let profile = &input.profile;
    let seed = input.seed;

    let mut rows: Vec<report::SimValidationRow> = Vec::new();
    // Short pool: native mass below the boundary plus compressed band mass.
    if best.n_short > 0 {
        let short_pool = PoolConfig::for_context(profile, boundary)?;
        let stats = best
            .short_stats
            .as_ref()
            .ok_or_else(|| Error::Config("plan lacks short-pool stats".into()))?;
        let lambda_s = best.alpha_prime * input.workload.arrival_rate;
        let native = dist
            .restrict(0.0, boundary as f64)
            .ok_or_else(|| Error::EmptyDistribution("short pool".into()))?;
        let band = dist.restrict(boundary as f64, best.gamma * boundary as f64);
        let native_weight = best.alpha / best.alpha_prime.max(f64::MIN_POSITIVE);
        let model = input.output_model;
        let mut sim_config = SimConfig::new(lambda_s, args.requests, seed ^ 0x5103);
        sim_config.warmup_fraction = args.warmup;
        let sim = run_des_population(
            |rng| {
                use rand::Rng;
                match &band {
                    Some(band) if rng.random::<f64>() >= native_weight => {
                        let (_, l_out) = model.split(band.sample(rng));
                        let l_out = l_out.min(boundary - 1);
                        (boundary - l_out, l_out)
                    }
                    _ => model.split(native.sample(rng)),
                }
            },
            best.n_short,
            profile,
            &short_pool,
            &sim_config,
        )?;
        let error = compare_to_analytic(&sim, best.n_short, lambda_s, stats)?;
        rows.push(report::SimValidationRow {
            pool: "short".into(),
            n_gpus: best.n_short,
            rho_ana: lambda_s / (best.n_short as f64 * stats.gpu_rate),
            rho_hat: sim.measured_utilization,
            error,
            ttft_p50_ms: sim.ttft_p50_s * 1000.0,
            ttft_p99_ms: sim.ttft_p99_s * 1000.0,
        });
    }
    // Long pool: the tail beyond the band.
    if best.n_long > 0 {
        let long_pool = {
            let mut p = PoolConfig::for_context(profile, profile.calib_context)?;
            p.cost_per_gpu *= input.cost_ratio;
            p
        };
        let stats = best
            .long_stats
            .as_ref()
            .ok_or_else(|| Error::Config("plan lacks long-pool stats".into()))?;
        let lambda_l = (1.0 - best.alpha_prime) * input.workload.arrival_rate;
        let cut = (best.gamma * boundary as f64).floor();
        let tail = dist
            .restrict(cut, f64::INFINITY)
            .ok_or_else(|| Error::EmptyDistribution("long pool".into()))?;
        let model = input.output_model;
        let mut sim_config = SimConfig::new(lambda_l, args.requests, seed ^ 0x109);
        sim_config.warmup_fraction = args.warmup;
        let sim = run_des_population(
            |rng| model.split(tail.sample(rng)),
            best.n_long,
            profile,
            &long_pool,
            &sim_config,
        )?;
        let error = compare_to_analytic(&sim, best.n_long, lambda_l, stats)?;
        rows.push(report::SimValidationRow {
            pool: "long".into(),
            n_gpus: best.n_long,
            rho_ana: lambda_l / (best.n_long as f64 * stats.gpu_rate),
            rho_hat: sim.measured_utilization,
            error,
            ttft_p50_ms: sim.ttft_p50_s * 1000.0,
            ttft_p99_ms: sim.ttft_p99_s * 1000.0,
        });
    }

    eprint!("{}", report::render_sim_table(&rows));
    write_or_print(&args.out, &report::sim_json(&rows, &input, seed))?;
    let worst = rows
        .iter()
        .map(|r| r.error.abs())
        .fold(0.0f64, f64::max);
    if worst > args.tolerance {
        return Err(Error::ToleranceExceeded(format!(
            "worst pool error {:.2}% > {:.2}%",
            100.0 * worst,
            100.0 * args.tolerance
        )));
    }
    Ok(0)
}

#[derive(Deserialize)]
struct PromptLine {
    prompt: String,
    #[serde(default)]
    category: Option<String>,
}

fn cmd_compress(args: &CompressArgs) -> Result<i32> {
    let file = std::fs::File::open(&args.input)?;
    let reader = std::io::BufReader::new(file);
    let config = CompressorConfig::default();
    let mut results = Vec::new();
    let mut latencies = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: PromptLine =
            serde_json::from_str(&line).map_err(|e| Error::Parse(format!("prompt line: {e}")))?;
        let mut result = compress(&parsed.prompt, args.budget, &config)?;
        if args.fidelity {
            result = with_fidelity(result, &parsed.prompt);
        }
        latencies.push(result.elapsed_ms);
        results.push(serde_json::to_value(&result).expect("serializable"));
        let _ = parsed.category;
    }
    if results.is_empty() {
        return Err(Error::Config("no prompts in input".into()));
    }
    eprintln!(
        "{} prompts  latency p50 {:.2} ms  p95 {:.2} ms  p99 {:.2} ms",
        results.len(),
        percentile(&latencies, 0.50),
        percentile(&latencies, 0.95),
        percentile(&latencies, 0.99),
    );
    write_or_print(
        &args.out,
        &json!({
            "budget": args.budget,
            "results": results,
            "latency_ms": {
                "p50": percentile(&latencies, 0.50),
                "p95": percentile(&latencies, 0.95),
                "p99": percentile(&latencies, 0.99),
            },
        }),
    )?;
    Ok(0)
}

fn cmd_route_replay(args: &RouteReplayArgs) -> Result<i32> {
    let load = load_trace(&args.trace, TraceFormat::from_path(&args.trace))?;
    let compressor = CompressorConfig::default();
    let mut estimator = TokenEstimator::default();
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed.unwrap_or_else(env_seed));
    let mut lines = Vec::with_capacity(load.records.len());
    let mut short = 0usize;
    let mut compressed = 0usize;
    for record in &load.records {
        let decision = route(
            record,
            args.boundary,
            args.gamma,
            args.p_c,
            &compressor,
            &estimator,
            &mut rng,
        );
        if decision.pool == PoolChoice::Short {
            short += 1;
        }
        if decision.compressed {
            compressed += 1;
        }
        // Learn bytes-per-token from observed pairs.
        if let Some(bytes) = record.payload_bytes {
            if record.input_tokens >= 1 && bytes >= 1 {
                estimator.update(record.category, bytes, record.input_tokens);
            }
        }
        lines.push(
            serde_json::to_string(&json!({
                "pool": decision.pool,
                "compressed": decision.compressed,
                "L_total": decision.estimated_total,
                "reason": decision.reason,
            }))
            .expect("serializable"),
        );
    }
    let text = lines.join("\n") + "\n";
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    eprintln!(
        "{} requests  short {:.1}%  compressed {:.1}%",
        load.records.len(),
        100.0 * short as f64 / load.records.len() as f64,
        100.0 * compressed as f64 / load.records.len() as f64,
    );
    Ok(0)
}

fn cmd_synth(args: &SynthArgs) -> Result<i32> {
    let file = read_anchor_file(&args.anchors)?;
    let seed = args.seed.unwrap_or(file.seed);
    let dist = synth_distribution_with(
        &file.anchors,
        SynthOptions {
            points: args.points,
            support_max: args.support_max,
        },
        seed,
    )?;
    let quantiles: Vec<(f64, u64)> = [0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99, 0.999]
        .iter()
        .map(|&p| (p, dist.quantile(p)))
        .collect();
    for &(p, q) in &quantiles {
        eprintln!("p{:<6} {q}", p * 100.0);
    }
    write_or_print(
        &args.out,
        &json!({
            "anchors": file.anchors,
            "seed": seed,
            "mean": dist.mean(),
            "support": [dist.support_min(), dist.support_max()],
            "quantiles": quantiles,
            "points": dist.points(),
        }),
    )?;
    Ok(0)
}

fn cmd_sensitivity(args: &SensitivityArgs) -> Result<i32> {
    if args.lambdas.len() < 2 {
        return Err(Error::Config("need at least 2 lambda values".into()));
    }
    if args.lambdas.iter().any(|&l| l <= 0.0) {
        return Err(Error::Config("lambda values must be > 0".into()));
    }
    let config = merge_config(&args.workload)?;
    let mut rows = Vec::new();
    eprintln!(
        "{:>9} {:>6} {:>6} {:>9} {:>7} {:>10} {:>13}",
        "lambda", "homog", "pr", "fleetopt", "gamma*", "pr_saving", "fleet_saving"
    );
    for &lambda in &args.lambdas {
        let mut input = planner_input_from(&config)?;
        input.workload.arrival_rate = lambda;
        let plan = sweep(&input)?;
        let pr_cell = plan
            .all_cells
            .iter()
            .filter(|c| c.feasible && (c.gamma - 1.0).abs() < 1e-9)
            .min_by(|a, b| a.cost_per_year.total_cmp(&b.cost_per_year));
        let pr_total = pr_cell.map(|c| c.n_short + c.n_long);
        let pr_saving = pr_cell.map(|c| 1.0 - c.cost_per_year / plan.homogeneous_cost_per_year);
        let fleet_total = plan.best_cell.n_short + plan.best_cell.n_long;
        eprintln!(
            "{:>9.0} {:>6} {:>6} {:>9} {:>7} {:>9.1}% {:>12.1}%",
            lambda,
            plan.homogeneous_n,
            pr_total.map_or("-".into(), |n| n.to_string()),
            fleet_total,
            plan.best_cell.gamma,
            100.0 * pr_saving.unwrap_or(f64::NAN),
            100.0 * plan.savings_fraction,
        );
        rows.push(json!({
            "lambda": lambda,
            "homogeneous": plan.homogeneous_n,
            "pr_total": pr_total,
            "pr_saving": pr_saving,
            "fleetopt_total": fleet_total,
            "fleetopt_saving": plan.savings_fraction,
            "gamma_star": plan.best_cell.gamma,
        }));
    }
    write_or_print(
        &args.out,
        &json!({ "rows": rows, "config_hash": report::config_hash(&config) }),
    )?;
    Ok(0)
}

fn cmd_cliff_table(args: &CliffTableArgs) -> Result<i32> {
    let profile = GpuProfile::default();
    let short = PoolConfig::for_context(&profile, args.boundary)?;
    let long = PoolConfig::for_context(&profile, profile.calib_context)?;
    let totals = [
        args.boundary,
        args.boundary + 1,
        (args.boundary as f64 * 1.46).round() as u64,
        profile.calib_context,
    ];
    let rows = cliff_table(&profile, &short, &long, &totals);
    print!("{}", render_cliff_table(&profile, &rows));
    Ok(0)
}

/// Parse argv and run; returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Plan(args) => cmd_plan(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Compress(args) => cmd_compress(args),
        Command::RouteReplay(args) => cmd_route_replay(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Sensitivity(args) => cmd_sensitivity(args),
        Command::CliffTable(args) => cmd_cliff_table(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

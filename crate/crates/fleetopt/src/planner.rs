//! Offline fleet planner: candidate-boundary generation, the (B, gamma)
//! sweep with post-compression recalibration, cost accounting, savings
//! decomposition, and marginal-cost diagnostics.
//!
//! Every sweep cell sizes two independent pools by Erlang-C inversion. The
//! long pool is recalibrated on the post-compression tail `(gamma*B, inf)`
//! — compressing the band away hardens what remains, and skipping that
//! recalibration overstates the benefit of wider bands. The short pool is
//! calibrated on `[1, B]` plus the compressed borderline mass mapped to its
//! budget `T_c = B - L_out`.

use std::collections::HashMap;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::fnv1a;
use crate::queueing::{
    calibrate_population, effective_slo, invert_min_servers, iter_latency_ms,
    prefill_p99_population, utilization, w99_kimura, GpuProfile, PoolConfig, ServiceStats,
};
use crate::workload::{borderline_fraction, EmpiricalDistribution, OutputModel, WorkloadSpec};

pub const HOURS_PER_YEAR: f64 = 8760.0;

/// Everything the planner needs for one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlannerInput {
    pub workload: WorkloadSpec,
    pub profile: GpuProfile,
    /// P99 TTFT target in seconds.
    pub slo_s: f64,
    /// Utilization cap per pool.
    pub rho_max: f64,
    /// Band widths to sweep, ascending, within [1, 2].
    pub gamma_grid: Vec<f64>,
    /// Candidate short-pool boundaries; derived from the CDF when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate_boundaries: Option<Vec<u64>>,
    /// Long-pool GPU cost relative to short-pool (phi = c_l / c_s).
    pub cost_ratio: f64,
    pub output_model: OutputModel,
    /// Monte-Carlo draws per calibration.
    pub calibration_samples: usize,
    pub seed: u64,
}

impl PlannerInput {
    pub fn new(workload: WorkloadSpec, profile: GpuProfile, slo_s: f64) -> Self {
        PlannerInput {
            workload,
            profile,
            slo_s,
            rho_max: 0.85,
            gamma_grid: (0..=10).map(|i| 1.0 + 0.1 * i as f64).collect(),
            candidate_boundaries: None,
            cost_ratio: 1.0,
            output_model: OutputModel::default(),
            calibration_samples: 10_000,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.workload.validate()?;
        if self.slo_s <= 0.0 {
            return Err(Error::Config("slo must be > 0".into()));
        }
        if !(0.0 < self.rho_max && self.rho_max < 1.0) {
            return Err(Error::Config("rho_max must be in (0,1)".into()));
        }
        if self.gamma_grid.is_empty() {
            return Err(Error::Config("gamma grid is empty".into()));
        }
        for pair in self.gamma_grid.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::Config("gamma grid must be strictly ascending".into()));
            }
        }
        let lo = *self.gamma_grid.first().expect("nonempty");
        let hi = *self.gamma_grid.last().expect("nonempty");
        if lo < 1.0 || hi > 2.0 {
            return Err(Error::Config("gamma grid must lie within [1,2]".into()));
        }
        if self.cost_ratio <= 0.0 {
            return Err(Error::Config("cost_ratio must be > 0".into()));
        }
        if self.calibration_samples < 100 {
            return Err(Error::Config("calibration_samples must be >= 100".into()));
        }
        Ok(())
    }

    fn short_pool(&self, boundary: u64) -> Result<PoolConfig> {
        PoolConfig::for_context(&self.profile, boundary)
    }

    fn long_pool(&self) -> Result<PoolConfig> {
        let mut pool = PoolConfig::for_context(&self.profile, self.profile.calib_context)?;
        pool.cost_per_gpu *= self.cost_ratio;
        Ok(pool)
    }
}

/// Per-pool sizing diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolDiagnostics {
    pub arrival_rate: f64,
    pub utilization: f64,
    pub prefill_p99_s: f64,
    pub iter_latency_s: f64,
    pub wait_budget_s: f64,
    pub w99_s: f64,
    /// Queue wait + P99 prefill + one decode iteration.
    pub ttft_p99_s: f64,
}

/// Result of sizing one pool.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoolPlan {
    pub n_gpus: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<ServiceStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<PoolDiagnostics>,
}

/// One `(boundary, gamma)` evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepCell {
    pub boundary: u64,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Post-compression short-pool fraction `alpha + beta * p_c`.
    pub alpha_prime: f64,
    pub n_short: u64,
    pub n_long: u64,
    pub cost_per_year: f64,
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infeasible_reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub short_stats: Option<ServiceStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub long_stats: Option<ServiceStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub short_diagnostics: Option<PoolDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub long_diagnostics: Option<PoolDiagnostics>,
}

/// Planner output: the chosen cell plus the full surface and baseline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FleetPlan {
    pub best_cell: SweepCell,
    pub all_cells: Vec<SweepCell>,
    pub homogeneous_n: u64,
    pub homogeneous_cost_per_year: f64,
    /// 1 - best cost / homogeneous cost.
    pub savings_fraction: f64,
    /// Short-pool slots per GPU over long-pool slots per GPU at the chosen
    /// boundary.
    pub cliff_ratio: f64,
    /// Marginal-GPU-cost imbalance at the best cell (diagnostic only).
    pub foc_residual: f64,
}

/// Candidate short-pool boundaries: CDF deciles rounded to multiples of
/// 256, united with powers of two spanning [p10, p99], filtered to windows
/// that still give at least twice the calibration slot count, capped at 15.
pub fn candidate_boundaries(dist: &EmpiricalDistribution, profile: &GpuProfile) -> Vec<u64> {
    let mut candidates: Vec<u64> = Vec::new();
    for decile in 1..=9 {
        let q = dist.quantile(decile as f64 / 10.0);
        let rounded = ((q as f64 / 256.0).round().max(1.0)) as u64 * 256;
        candidates.push(rounded);
    }
    let p10 = dist.quantile(0.10);
    let p99 = dist.quantile(0.99);
    let mut power = 1u64;
    while power < p10 {
        power <<= 1;
    }
    while power <= p99 {
        candidates.push(power);
        power <<= 1;
    }
    let max_window = profile.calib_context / 2; // keeps slots >= 2x calibration
    candidates.sort_unstable();
    candidates.dedup();
    candidates.retain(|&b| b >= 1 && b <= max_window);
    candidates.truncate(15);
    candidates
}

/// Split the fleet arrival rate at a compression-extended boundary:
/// `lambda_s = (alpha + beta p_c) lambda`, `lambda_l` the rest.
pub fn split_rates(lambda: f64, alpha: f64, beta: f64, p_c: f64) -> (f64, f64) {
    debug_assert!(alpha + beta <= 1.0 + 1e-9);
    let lambda_s = (alpha + beta * p_c) * lambda;
    (lambda_s, lambda - lambda_s)
}

/// The request population a pool is calibrated on.
enum Population<'a> {
    /// Draws from a restricted distribution, split by the output model.
    Plain {
        dist: &'a EmpiricalDistribution,
        output_model: OutputModel,
    },
    /// Short pool under compression: native mass below the boundary plus
    /// borderline requests entering at their full budget `T_c = B - L_out`.
    CompressedShort {
        native: &'a EmpiricalDistribution,
        band: &'a EmpiricalDistribution,
        native_weight: f64,
        boundary: u64,
        output_model: OutputModel,
    },
}

impl Population<'_> {
    fn draw(&self, rng: &mut ChaCha8Rng) -> (u64, u64) {
        match self {
            Population::Plain { dist, output_model } => output_model.split(dist.sample(rng)),
            Population::CompressedShort {
                native,
                band,
                native_weight,
                boundary,
                output_model,
            } => {
                use rand::Rng;
                if rng.random::<f64>() < *native_weight {
                    output_model.split(native.sample(rng))
                } else {
                    let original_total = band.sample(rng);
                    let (_, l_out) = output_model.split(original_total);
                    // Compressed to the full budget; outputs that alone
                    // exceed the boundary are pinned at the window edge.
                    let l_out = l_out.min(boundary - 1);
                    (boundary - l_out, l_out)
                }
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn plan_pool_population(
    population: &Population<'_>,
    arrival_rate: f64,
    profile: &GpuProfile,
    pool: &PoolConfig,
    slo_s: f64,
    rho_max: f64,
    samples: usize,
    seed: u64,
) -> Result<PoolPlan> {
    if arrival_rate <= 0.0 {
        return Ok(PoolPlan {
            n_gpus: 0,
            stats: None,
            diagnostics: None,
        });
    }
    let stats = calibrate_population(|rng| population.draw(rng), profile, pool, samples, seed)?;
    let prefill = prefill_p99_population(|rng| population.draw(rng), profile, pool, samples, seed)?;
    let iter_s = iter_latency_ms(profile, pool.slots_per_gpu) / 1000.0;
    let budget = effective_slo(slo_s, prefill, iter_s);
    if budget < 0.0 {
        return Err(Error::Infeasible(format!(
            "p99 prefill {prefill:.3}s + iteration {iter_s:.3}s exceed SLO {slo_s:.3}s"
        )));
    }
    let n = invert_min_servers(arrival_rate, &stats, budget, rho_max)?;
    let w99 = w99_kimura(n * pool.slots_per_gpu, stats.slot_rate, arrival_rate, stats.scv)?;
    let diagnostics = PoolDiagnostics {
        arrival_rate,
        utilization: utilization(n, arrival_rate, stats.gpu_rate),
        prefill_p99_s: prefill,
        iter_latency_s: iter_s,
        wait_budget_s: budget,
        w99_s: w99,
        ttft_p99_s: w99 + prefill + iter_s,
    };
    Ok(PoolPlan {
        n_gpus: n,
        stats: Some(stats),
        diagnostics: Some(diagnostics),
    })
}

/// Size one pool for a restricted distribution: calibrate, budget the SLO,
/// and invert to the minimum GPU count. A zero arrival rate provisions
/// zero GPUs.
#[allow(clippy::too_many_arguments)]
pub fn plan_pool(
    dist: &EmpiricalDistribution,
    arrival_rate: f64,
    profile: &GpuProfile,
    pool: &PoolConfig,
    output_model: OutputModel,
    slo_s: f64,
    rho_max: f64,
    samples: usize,
    seed: u64,
) -> Result<PoolPlan> {
    plan_pool_population(
        &Population::Plain { dist, output_model },
        arrival_rate,
        profile,
        pool,
        slo_s,
        rho_max,
        samples,
        seed,
    )
}

fn pool_seed(base: u64, tag: &str, boundary: u64, cut: u64) -> u64 {
    base ^ fnv1a(format!("{tag}:{boundary}:{cut}").as_bytes())
}

/// Evaluate the full `(B, gamma)` surface and pick the cheapest feasible
/// cell; ties break toward the smaller boundary, then the smaller gamma.
pub fn sweep(input: &PlannerInput) -> Result<FleetPlan> {
    input.validate()?;
    let dist = &input.workload.distribution;
    let lambda = input.workload.arrival_rate;
    let p_c = input.workload.compressibility;
    let candidates = match &input.candidate_boundaries {
        Some(c) if !c.is_empty() => {
            let mut c = c.clone();
            c.sort_unstable();
            c.dedup();
            c
        }
        _ => candidate_boundaries(dist, &input.profile),
    };
    if candidates.is_empty() {
        return Err(Error::Config("no candidate boundaries".into()));
    }
    let long_pool = input.long_pool()?;

    // Long-pool plans keyed by the integer band cut; cells at different
    // (B, gamma) with the same cut share the same tail.
    let mut long_cache: HashMap<u64, std::result::Result<PoolPlan, String>> = HashMap::new();

    let mut cells: Vec<SweepCell> = Vec::new();
    for &boundary in &candidates {
        let short_pool = input.short_pool(boundary)?;
        let native = dist.restrict(0.0, boundary as f64);
        for &gamma in &input.gamma_grid {
            let (alpha, beta) = borderline_fraction(dist, boundary, gamma);
            let alpha_prime = (alpha + beta * p_c).min(1.0);
            let (lambda_s, lambda_l) = split_rates(lambda, alpha, beta, p_c);
            let cut = (gamma * boundary as f64).floor() as u64;

            let mut cell = SweepCell {
                boundary,
                gamma,
                alpha,
                beta,
                alpha_prime,
                n_short: 0,
                n_long: 0,
                cost_per_year: f64::INFINITY,
                feasible: false,
                infeasible_reason: None,
                short_stats: None,
                long_stats: None,
                short_diagnostics: None,
                long_diagnostics: None,
            };

            // Short pool: native mass plus compressed borderline mass.
            let short_result: std::result::Result<PoolPlan, String> = if lambda_s <= 0.0 {
                Ok(PoolPlan {
                    n_gpus: 0,
                    stats: None,
                    diagnostics: None,
                })
            } else {
                match &native {
                    None => Err("no mass at or below boundary".into()),
                    Some(native_dist) => {
                        let band = dist.restrict(boundary as f64, gamma * boundary as f64);
                        let compressed_weight = beta * p_c;
                        let native_weight = alpha / (alpha + compressed_weight).max(f64::MIN_POSITIVE);
                        let seed = pool_seed(input.seed, "short", boundary, cut);
                        let population = match band {
                            Some(ref band_dist) if compressed_weight > 0.0 => {
                                Population::CompressedShort {
                                    native: native_dist,
                                    band: band_dist,
                                    native_weight,
                                    boundary,
                                    output_model: input.output_model,
                                }
                            }
                            _ => Population::Plain {
                                dist: native_dist,
                                output_model: input.output_model,
                            },
                        };
                        plan_pool_population(
                            &population,
                            lambda_s,
                            &input.profile,
                            &short_pool,
                            input.slo_s,
                            input.rho_max,
                            input.calibration_samples,
                            seed,
                        )
                        .map_err(|e| format!("short pool: {e}"))
                    }
                }
            };

            // Long pool: the post-compression tail beyond the band.
            let long_result: std::result::Result<PoolPlan, String> = if lambda_l <= 1e-12 {
                Ok(PoolPlan {
                    n_gpus: 0,
                    stats: None,
                    diagnostics: None,
                })
            } else {
                long_cache
                    .entry(cut)
                    .or_insert_with(|| match dist.restrict(cut as f64, f64::INFINITY) {
                        None => Err("no mass beyond the band".into()),
                        Some(tail) => plan_pool_population(
                            &Population::Plain {
                                dist: &tail,
                                output_model: input.output_model,
                            },
                            lambda_l,
                            &input.profile,
                            &long_pool,
                            input.slo_s,
                            input.rho_max,
                            input.calibration_samples,
                            pool_seed(input.seed, "long", 0, cut),
                        )
                        .map_err(|e| format!("long pool: {e}")),
                    })
                    .clone()
            };

            match (short_result, long_result) {
                (Ok(short), Ok(long)) => {
                    cell.n_short = short.n_gpus;
                    cell.n_long = long.n_gpus;
                    cell.cost_per_year = (short_pool.cost_per_gpu * short.n_gpus as f64
                        + long_pool.cost_per_gpu * long.n_gpus as f64)
                        * HOURS_PER_YEAR;
                    cell.feasible = true;
                    cell.short_stats = short.stats;
                    cell.long_stats = long.stats;
                    cell.short_diagnostics = short.diagnostics;
                    cell.long_diagnostics = long.diagnostics;
                }
                (Err(reason), _) | (_, Err(reason)) => {
                    cell.infeasible_reason = Some(reason);
                }
            }
            cells.push(cell);
        }
    }

    let best = cells
        .iter()
        .filter(|c| c.feasible)
        .min_by(|a, b| {
            a.cost_per_year
                .total_cmp(&b.cost_per_year)
                .then(a.boundary.cmp(&b.boundary))
                .then(a.gamma.total_cmp(&b.gamma))
        })
        .cloned()
        .ok_or_else(|| {
            let reasons: Vec<String> = cells
                .iter()
                .filter_map(|c| {
                    c.infeasible_reason
                        .as_ref()
                        .map(|r| format!("B={} gamma={}: {r}", c.boundary, c.gamma))
                })
                .take(4)
                .collect();
            Error::Infeasible(format!("all sweep cells infeasible; e.g. {}", reasons.join("; ")))
        })?;

    let homogeneous = plan_homogeneous(input)?;
    let homogeneous_cost = long_pool.cost_per_gpu * homogeneous.n_gpus as f64 * HOURS_PER_YEAR;
    let cliff = input.short_pool(best.boundary)?.slots_per_gpu as f64
        / long_pool.slots_per_gpu as f64;
    let foc = foc_residual(input, &best);
    Ok(FleetPlan {
        savings_fraction: 1.0 - best.cost_per_year / homogeneous_cost,
        best_cell: best,
        all_cells: cells,
        homogeneous_n: homogeneous.n_gpus,
        homogeneous_cost_per_year: homogeneous_cost,
        cliff_ratio: cliff,
        foc_residual: foc,
    })
}

/// Baseline: one pool with long-context geometry serving the whole
/// distribution.
pub fn plan_homogeneous(input: &PlannerInput) -> Result<PoolPlan> {
    input.validate()?;
    let long_pool = input.long_pool()?;
    plan_pool(
        &input.workload.distribution,
        input.workload.arrival_rate,
        &input.profile,
        &long_pool,
        input.output_model,
        input.slo_s,
        input.rho_max,
        input.calibration_samples,
        pool_seed(input.seed, "homogeneous", 0, 0),
    )
}

/// Marginal-GPU-cost imbalance between the pools of a solved cell, on the
/// utilization-cap relaxation `n(lambda) = lambda / (rho_max * mu_gpu)`:
/// `|c_s / (rho_max mu_s) - c_l / (rho_max mu_l)|`. Diagnostic only; the
/// sweep finds the integer optimum directly.
pub fn foc_residual(input: &PlannerInput, cell: &SweepCell) -> f64 {
    let (Some(short), Some(long)) = (&cell.short_stats, &cell.long_stats) else {
        return f64::NAN;
    };
    let c_s = input.profile.gpu_cost_per_hour;
    let c_l = c_s * input.cost_ratio;
    (c_s / (input.rho_max * short.gpu_rate) - c_l / (input.rho_max * long.gpu_rate)).abs()
}

/// Savings breakdown for a solved plan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SavingsReport {
    /// Best plain pool-routing (gamma = 1) savings vs homogeneous, when the
    /// grid contains gamma = 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pr_only_savings: Option<f64>,
    /// First-order incremental gain from compression: `beta p_c (1 - 1/rho)`.
    pub incremental_estimate: f64,
    pub cliff_ratio: f64,
    /// Realized savings of the best cell vs homogeneous.
    pub realized_savings: f64,
}

pub fn savings_decomposition(plan: &FleetPlan, p_c: f64) -> SavingsReport {
    let pr_only = plan
        .all_cells
        .iter()
        .filter(|c| c.feasible && (c.gamma - 1.0).abs() < 1e-9)
        .map(|c| c.cost_per_year)
        .min_by(f64::total_cmp)
        .map(|cost| 1.0 - cost / plan.homogeneous_cost_per_year);
    SavingsReport {
        pr_only_savings: pr_only,
        incremental_estimate: plan.best_cell.beta * p_c * (1.0 - 1.0 / plan.cliff_ratio),
        cliff_ratio: plan.cliff_ratio,
        realized_savings: plan.savings_fraction,
    }
}

/// Compare a retrofit (gamma pinned at `gamma_fixed`, boundary pinned at
/// the plain pool-routing optimum) against the co-designed sweep minimum.
/// Returns `(cost_retrofit, cost_codesign)` per year.
pub fn codesign_vs_retrofit(input: &PlannerInput, gamma_fixed: f64) -> Result<(f64, f64)> {
    if !input
        .gamma_grid
        .iter()
        .any(|&g| (g - gamma_fixed).abs() < 1e-9)
    {
        return Err(Error::Config(format!(
            "gamma_fixed {gamma_fixed} not in the sweep grid"
        )));
    }
    if !input.gamma_grid.iter().any(|&g| (g - 1.0).abs() < 1e-9) {
        return Err(Error::Config(
            "retrofit comparison needs gamma = 1 in the grid".into(),
        ));
    }
    let plan = sweep(input)?;
    let pr_best = plan
        .all_cells
        .iter()
        .filter(|c| c.feasible && (c.gamma - 1.0).abs() < 1e-9)
        .min_by(|a, b| {
            a.cost_per_year
                .total_cmp(&b.cost_per_year)
                .then(a.boundary.cmp(&b.boundary))
        })
        .ok_or_else(|| Error::Infeasible("no feasible plain pool-routing cell".into()))?;
    let retrofit = plan
        .all_cells
        .iter()
        .find(|c| c.boundary == pr_best.boundary && (c.gamma - gamma_fixed).abs() < 1e-9)
        .ok_or_else(|| Error::Infeasible("retrofit cell missing from sweep".into()))?;
    let cost_retrofit = if retrofit.feasible {
        retrofit.cost_per_year
    } else {
        f64::INFINITY
    };
    Ok((cost_retrofit, plan.best_cell.cost_per_year))
}

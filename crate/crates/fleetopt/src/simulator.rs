//! Discrete-event simulator of one pool under Poisson arrivals and
//! continuous batching: a FIFO queue over `n * slots_per_gpu` KV slots,
//! measuring slot utilization and TTFT percentiles to cross-check the
//! analytical model.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::percentile;
use crate::queueing::{iter_latency_ms, GpuProfile, PoolConfig, ServiceStats};
use crate::workload::{EmpiricalDistribution, OutputModel};

/// How iteration latency reacts to batch occupancy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ServiceModel {
    /// Iterations always cost `W + H * slots_per_gpu` (all slots advance in
    /// lockstep at full width, matching the analytical service time).
    LockstepFull,
    /// Iteration latency recomputed from busy slots at admission.
    OccupancyDependent,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    /// Requests to drive through the pool.
    pub requests: usize,
    /// Poisson arrival rate for this pool in requests/second.
    pub arrival_rate: f64,
    /// Fraction of earliest completions excluded from statistics.
    pub warmup_fraction: f64,
    pub service_model: ServiceModel,
    /// Run even when the offered load exceeds capacity.
    pub allow_unstable: bool,
}

impl SimConfig {
    pub fn new(arrival_rate: f64, requests: usize, seed: u64) -> Self {
        SimConfig {
            seed,
            requests,
            arrival_rate,
            warmup_fraction: 0.1,
            service_model: ServiceModel::LockstepFull,
            allow_unstable: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.arrival_rate <= 0.0 {
            return Err(Error::Config("arrival_rate must be > 0".into()));
        }
        if !(0.0..0.5).contains(&self.warmup_fraction) {
            return Err(Error::Config("warmup_fraction must be in [0, 0.5)".into()));
        }
        Ok(())
    }
}

/// Measured behavior of one simulated pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    /// Fraction of slot-time busy over the steady measurement window.
    pub measured_utilization: f64,
    pub ttft_p50_s: f64,
    pub ttft_p99_s: f64,
    pub mean_queue_wait_s: f64,
    pub completed: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EventKind {
    Arrival(usize),
    Departure(usize),
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time && self.seq == other.seq
    }
}
impl Eq for Event {}
// Reversed so the BinaryHeap pops the earliest (time, seq) first.
impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then(other.seq.cmp(&self.seq))
    }
}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Request {
    arrival_s: f64,
    chunks: u64,
    l_out: u64,
}

/// Run the simulation for a pool whose requests come from an arbitrary
/// `(L_in, L_out)` generator (e.g. a compression-extended population).
pub fn run_des_population<F>(
    mut draw: F,
    n_gpus: u64,
    profile: &GpuProfile,
    pool: &PoolConfig,
    config: &SimConfig,
) -> Result<SimReport>
where
    F: FnMut(&mut ChaCha8Rng) -> (u64, u64),
{
    config.validate()?;
    if n_gpus == 0 {
        return Err(Error::Config("simulating a pool with zero GPUs".into()));
    }
    let capacity = n_gpus * pool.slots_per_gpu;
    let full_iter_s = iter_latency_ms(profile, pool.slots_per_gpu) / 1000.0;

    // Pre-generate arrivals: Poisson gaps plus a population draw.
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut requests = Vec::with_capacity(config.requests);
    let mut t = 0.0f64;
    let mut mean_service_probe = 0.0f64;
    for _ in 0..config.requests {
        let gap: f64 = -rng.random::<f64>().ln() / config.arrival_rate;
        t += gap;
        let (l_in, l_out) = draw(&mut rng);
        if l_in + l_out > pool.context_window {
            return Err(Error::ContextOverflow {
                total: l_in + l_out,
                window: pool.context_window,
            });
        }
        let chunks = l_in.div_ceil(profile.chunk_size);
        mean_service_probe += (chunks + l_out) as f64 * full_iter_s;
        requests.push(Request {
            arrival_s: t,
            chunks,
            l_out,
        });
    }
    if config.requests == 0 {
        return Ok(SimReport {
            measured_utilization: 0.0,
            ttft_p50_s: 0.0,
            ttft_p99_s: 0.0,
            mean_queue_wait_s: 0.0,
            completed: 0,
        });
    }
    mean_service_probe /= config.requests as f64;
    let offered = config.arrival_rate * mean_service_probe / capacity as f64;
    if offered >= 1.0 && !config.allow_unstable {
        return Err(Error::UnstableQueue {
            servers: capacity,
            offered,
        });
    }

    // Steady-state measurement window: from the warmup-th arrival to the
    // last arrival, so ramp-up and drain-out are both excluded.
    let warmup_count = (config.warmup_fraction * config.requests as f64).floor() as usize;
    let window_start = requests[warmup_count.min(config.requests - 1)].arrival_s;
    let window_end = requests[config.requests - 1].arrival_s;
    let window = (window_end - window_start).max(f64::MIN_POSITIVE);

    let mut events: BinaryHeap<Event> = BinaryHeap::with_capacity(config.requests * 2);
    let mut seq = 0u64;
    for (idx, req) in requests.iter().enumerate() {
        events.push(Event {
            time: req.arrival_s,
            seq,
            kind: EventKind::Arrival(idx),
        });
        seq += 1;
    }

    let mut busy: u64 = 0;
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut last_t = 0.0f64;
    let mut busy_window_integral = 0.0f64;
    let mut ttfts: Vec<f64> = Vec::with_capacity(config.requests);
    let mut waits: Vec<f64> = Vec::with_capacity(config.requests);
    let mut completed = 0usize;
    let mut admitted = 0usize;

    let admit = |idx: usize,
                     now: f64,
                     busy: &mut u64,
                     events: &mut BinaryHeap<Event>,
                     seq: &mut u64,
                     ttfts: &mut Vec<f64>,
                     waits: &mut Vec<f64>,
                     admitted: &mut usize,
                     requests: &[Request]| {
        *busy += 1;
        *admitted += 1;
        let req = &requests[idx];
        let iter_s = match config.service_model {
            ServiceModel::LockstepFull => full_iter_s,
            ServiceModel::OccupancyDependent => iter_latency_ms(profile, (*busy).max(1)) / 1000.0,
        };
        let service = (req.chunks + req.l_out) as f64 * iter_s;
        let wait = now - req.arrival_s;
        waits.push(wait);
        ttfts.push(wait + (req.chunks as f64 + 1.0) * iter_s);
        events.push(Event {
            time: now + service,
            seq: *seq,
            kind: EventKind::Departure(idx),
        });
        *seq += 1;
    };

    while let Some(event) = events.pop() {
        // Busy-slot integral restricted to the measurement window.
        let overlap = (event.time.min(window_end) - last_t.max(window_start)).max(0.0);
        busy_window_integral += overlap * busy as f64;
        last_t = event.time;

        match event.kind {
            EventKind::Arrival(idx) => {
                if busy < capacity {
                    admit(
                        idx, event.time, &mut busy, &mut events, &mut seq, &mut ttfts,
                        &mut waits, &mut admitted, &requests,
                    );
                } else {
                    queue.push_back(idx);
                }
            }
            EventKind::Departure(_) => {
                busy -= 1;
                completed += 1;
                if let Some(next) = queue.pop_front() {
                    admit(
                        next, event.time, &mut busy, &mut events, &mut seq, &mut ttfts,
                        &mut waits, &mut admitted, &requests,
                    );
                }
            }
        }
        // Work conservation: no idle slot while requests queue.
        debug_assert!(queue.is_empty() || busy == capacity);
    }
    debug_assert_eq!(admitted, completed);
    debug_assert_eq!(completed, config.requests);
    debug_assert_eq!(busy, 0);

    // TTFT/wait vectors are in admission order; completions tracked the
    // same population, so the warmup cut drops the earliest admissions.
    let measured_ttfts = &ttfts[warmup_count.min(ttfts.len())..];
    let measured_waits = &waits[warmup_count.min(waits.len())..];
    let mean_wait = if measured_waits.is_empty() {
        0.0
    } else {
        measured_waits.iter().sum::<f64>() / measured_waits.len() as f64
    };
    Ok(SimReport {
        measured_utilization: busy_window_integral / (capacity as f64 * window),
        ttft_p50_s: if measured_ttfts.is_empty() {
            0.0
        } else {
            percentile(measured_ttfts, 0.50)
        },
        ttft_p99_s: if measured_ttfts.is_empty() {
            0.0
        } else {
            percentile(measured_ttfts, 0.99)
        },
        mean_queue_wait_s: mean_wait,
        completed,
    })
}

/// Run the event-driven FIFO simulation of one pool fed by a (restricted)
/// total-token distribution.
///
/// Each admitted request occupies one slot for its full service time;
/// TTFT is queue wait + prefill + one decode iteration. Deterministic for
/// a fixed seed. Errors when the offered load exceeds capacity unless
/// `allow_unstable` is set.
pub fn run_des(
    dist: &EmpiricalDistribution,
    output_model: OutputModel,
    n_gpus: u64,
    profile: &GpuProfile,
    pool: &PoolConfig,
    config: &SimConfig,
) -> Result<SimReport> {
    run_des_population(
        |rng| output_model.split(dist.sample(rng)),
        n_gpus,
        profile,
        pool,
        config,
    )
}

/// Relative error of the analytical utilization against the measured one:
/// `(rho_ana - rho_hat) / rho_hat`.
pub fn compare_to_analytic(
    report: &SimReport,
    n_gpus: u64,
    arrival_rate: f64,
    stats: &ServiceStats,
) -> Result<f64> {
    if report.measured_utilization <= 0.0 {
        return Err(Error::Config("measured utilization is zero".into()));
    }
    let rho_ana = arrival_rate / (n_gpus as f64 * stats.gpu_rate);
    Ok((rho_ana - report.measured_utilization) / report.measured_utilization)
}

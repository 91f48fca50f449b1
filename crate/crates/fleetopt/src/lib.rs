//! FleetOpt — capacity planning for two-pool LLM GPU fleets.
//!
//! Given a workload's prompt-length CDF and a P99 time-to-first-token target,
//! this crate derives the minimum-cost split of a fleet into a short-context
//! pool and a long-context pool, and implements the gateway mechanism
//! (compress-and-route) that makes the chosen boundary achievable: borderline
//! requests are extractively compressed under a hard token budget so they fit
//! the short pool instead of occupying an oversized long-pool slot.
//!
//! # Architecture
//!
//! ```text
//! ┌──────────┐   CDF, λ   ┌───────────┐  (n_s, n_l, B, γ)  ┌────────────┐
//! │ workload │───────────▶│  planner  │───────────────────▶│ simulator  │
//! │ (traces, │            │ (B,γ sweep│                    │ (DES cross │
//! │  synth)  │            │  Erlang-C)│                    │  -check)   │
//! └──────────┘            └─────┬─────┘                    └────────────┘
//!                               │ boundary B, band γB
//!                         ┌─────┴─────┐      ┌────────────┐
//!                         │  router   │─────▶│ compressor │
//!                         │ (gateway) │      │ (extractive│
//!                         └───────────┘      │  pipeline) │
//!                                            └────────────┘
//! ```
//!
//! The analytical core (`queueing`) models each pool as an M/G/c queue over
//! KV-cache slots: a log-space Erlang-C evaluation, Kimura's P99 waiting-time
//! approximation, and binary-search inversion to the minimum GPU count that
//! meets the TTFT budget under a utilization cap.
//!
//! See the crate examples for runnable entry points per capability
//! (`cargo run --release --example plan_fleet`, etc.). The `fleetopt` binary
//! exposes the same operations as subcommands.

pub mod cli;
pub mod compressor;
pub mod cost_cliff;
pub mod error;
pub mod math;
pub mod planner;
pub mod presets;
pub mod queueing;
pub mod report;
pub mod router;
pub mod simulator;
pub mod workload;

pub use compressor::{compress, CompressionResult, CompressorConfig};
pub use error::{Error, Result};
pub use planner::{FleetPlan, PlannerInput, SweepCell};
pub use queueing::{GpuProfile, PoolConfig, ServiceStats};
pub use router::{route, RoutingDecision, TokenEstimator};
pub use simulator::{run_des, SimConfig, SimReport};
pub use workload::{
    build_cdf, synth_distribution, Category, EmpiricalDistribution, OutputModel, RequestRecord,
    WorkloadSpec,
};

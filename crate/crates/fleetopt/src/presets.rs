//! Ready-made workload presets anchored to published trace statistics:
//! a chat-dominated cloud trace, a multi-turn conversation trace with
//! accumulated context, and a projected agent-heavy mix. Each preset pins
//! the boundary the corresponding deployment was evaluated at, a plausible
//! output-length model, and a TTFT SLO suited to the workload's
//! interactivity, so plans are reproducible end to end.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::planner::PlannerInput;
use crate::queueing::GpuProfile;
use crate::workload::{
    synth_distribution_with, Category, OutputModel, SynthOptions, WorkloadSpec,
};

/// A named synthetic workload with its evaluation configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorkloadPreset {
    pub name: String,
    /// `(percentile, total tokens)` anchors the synthetic CDF must match.
    pub anchors: Vec<(f64, u64)>,
    /// Short-pool boundary this workload is evaluated at.
    pub boundary: u64,
    /// Fleet arrival rate in requests/second.
    pub arrival_rate: f64,
    /// Fraction of borderline traffic that compresses successfully.
    pub compressibility: f64,
    pub output_model: OutputModel,
    /// P99 TTFT target in seconds.
    pub slo_s: f64,
    /// Band widths evaluated: plain routing, the retrofit point, and the
    /// maximum band.
    pub gamma_grid: Vec<f64>,
    pub category_mix: BTreeMap<Category, f64>,
    /// Seed for the synthetic distribution sample.
    pub synth_seed: u64,
}

impl WorkloadPreset {
    /// Materialize the synthetic workload (30,000-point sample).
    pub fn workload(&self) -> Result<WorkloadSpec> {
        let distribution = synth_distribution_with(
            &self.anchors,
            SynthOptions::default(),
            self.synth_seed,
        )?;
        Ok(WorkloadSpec {
            distribution,
            arrival_rate: self.arrival_rate,
            compressibility: self.compressibility,
            category_mix: self.category_mix.clone(),
        })
    }

    /// Planner input at this preset's published boundary and SLO.
    pub fn planner_input(&self, profile: GpuProfile, seed: u64) -> Result<PlannerInput> {
        let workload = self.workload()?;
        let mut input = PlannerInput::new(workload, profile, self.slo_s);
        input.gamma_grid = self.gamma_grid.clone();
        input.candidate_boundaries = Some(vec![self.boundary]);
        input.output_model = self.output_model;
        input.seed = seed;
        Ok(input)
    }
}

fn eval_gamma_grid() -> Vec<f64> {
    vec![1.0, 1.5, 2.0]
}

/// Chat-dominated cloud inference trace (2023): short prompts with a thin
/// tail, evaluated at a 4K boundary. Outputs modeled as a fixed 256-token
/// completion.
pub fn azure() -> WorkloadPreset {
    WorkloadPreset {
        name: "azure".into(),
        anchors: vec![(0.50, 880), (0.898, 4096), (0.976, 6144), (0.99, 7445)],
        boundary: 4096,
        arrival_rate: 1000.0,
        compressibility: 1.0,
        output_model: OutputModel::Constant { tokens: 256 },
        slo_s: 2.0,
        gamma_grid: eval_gamma_grid(),
        category_mix: BTreeMap::from([
            (Category::Conversational, 0.687),
            (Category::Code, 0.313),
        ]),
        synth_seed: 101,
    }
}

/// Multi-turn conversation trace with accumulated context, evaluated at a
/// 1.5K boundary; very short per-turn outputs.
pub fn lmsys_multiturn() -> WorkloadPreset {
    WorkloadPreset {
        name: "lmsys".into(),
        anchors: vec![(0.50, 420), (0.909, 1536), (0.955, 2304), (0.99, 4200)],
        boundary: 1536,
        arrival_rate: 1000.0,
        compressibility: 1.0,
        output_model: OutputModel::Constant { tokens: 192 },
        slo_s: 2.5,
        gamma_grid: eval_gamma_grid(),
        category_mix: BTreeMap::from([
            (Category::Conversational, 0.80),
            (Category::Prose, 0.20),
        ]),
        synth_seed: 102,
    }
}

/// Projected agent-heavy mix (code agents, tool use, retrieval), evaluated
/// at an 8K boundary. Outputs grow superlinearly with context up to a 2K
/// generation cap; a quarter of borderline traffic is code and is never
/// compressed.
pub fn agent_heavy() -> WorkloadPreset {
    WorkloadPreset {
        name: "agent-heavy".into(),
        anchors: vec![(0.50, 4096), (0.74, 8192), (0.90, 16_384), (0.99, 32_768)],
        boundary: 8192,
        arrival_rate: 1000.0,
        compressibility: 0.75,
        output_model: OutputModel::QuadraticCapped {
            coeff: 3.5e-6,
            cap: 640,
        },
        slo_s: 2.1,
        gamma_grid: eval_gamma_grid(),
        category_mix: BTreeMap::from([
            (Category::Code, 0.40),
            (Category::Rag, 0.35),
            (Category::Conversational, 0.25),
        ]),
        synth_seed: 103,
    }
}

/// All built-in presets.
pub fn all() -> Vec<WorkloadPreset> {
    vec![azure(), lmsys_multiturn(), agent_heavy()]
}

/// Look up a preset by name.
pub fn by_name(name: &str) -> Option<WorkloadPreset> {
    all().into_iter()
        .find(|p| p.name == name.to_ascii_lowercase().replace('_', "-"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workload::{borderline_fraction, classify_archetype, Archetype};

    #[test]
    fn presets_materialize_and_match_published_fractions() {
        let azure_wl = azure().workload().unwrap();
        let (alpha, beta) = borderline_fraction(&azure_wl.distribution, 4096, 1.5);
        assert!((alpha - 0.898).abs() <= 0.01, "azure alpha={alpha}");
        assert!((beta - 0.078).abs() <= 0.01, "azure beta={beta}");
        let mean = azure_wl.distribution.mean();
        assert!((mean - 1588.0).abs() / 1588.0 <= 0.05, "azure mean={mean}");

        let lmsys_wl = lmsys_multiturn().workload().unwrap();
        let (alpha, _) = borderline_fraction(&lmsys_wl.distribution, 1536, 1.5);
        assert!((alpha - 0.909).abs() <= 0.01, "lmsys alpha={alpha}");
        assert_eq!(classify_archetype(&lmsys_wl.distribution, 1536, 1.5), Archetype::I);

        let agent_wl = agent_heavy().workload().unwrap();
        let (alpha, _) = borderline_fraction(&agent_wl.distribution, 8192, 1.5);
        assert!((alpha - 0.740).abs() <= 0.01, "agent alpha={alpha}");
        assert_eq!(classify_archetype(&agent_wl.distribution, 8192, 1.5), Archetype::II);
    }

    #[test]
    fn azure_trace_sample_recovers_published_statistics() {
        use crate::workload::{build_cdf, sample_requests, OutputModel};
        let preset = azure();
        let workload = preset.workload().unwrap();
        // A trace-sized sample reproduces the routed fraction...
        let records = sample_requests(
            &workload.distribution,
            preset.output_model,
            Some(&workload.category_mix),
            28_185,
            9,
        );
        let rebuilt = build_cdf(&records).unwrap();
        assert!((rebuilt.cdf(4096.0) - 0.898).abs() <= 0.01);
        // ...and the sample mean total length.
        let mean = records
            .iter()
            .map(|r| r.total_tokens() as f64)
            .sum::<f64>()
            / records.len() as f64;
        assert!((mean - 1588.0).abs() / 1588.0 <= 0.05, "mean={mean}");
        let _ = OutputModel::default();
    }

    #[test]
    fn azure_candidates_include_published_boundary() {
        use crate::planner::candidate_boundaries;
        let workload = azure().workload().unwrap();
        let candidates = candidate_boundaries(&workload.distribution, &GpuProfile::default());
        assert!(candidates.contains(&4096), "{candidates:?}");
        assert!(candidates.len() <= 15);
    }

    #[test]
    fn preset_lookup() {
        assert!(by_name("azure").is_some());
        assert!(by_name("agent-heavy").is_some());
        assert!(by_name("agent_heavy").is_some());
        assert!(by_name("nope").is_none());
    }
}

//! Workload ingestion and modeling: request traces, empirical token-length
//! distributions, routing fractions, archetype classification, and synthetic
//! distributions fitted to published percentile anchors.

use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{nelder_mead, normal_cdf, normal_quantile};

/// Request content category. Only `Code` is excluded from compression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Code,
    Prose,
    Rag,
    Conversational,
}

impl Category {
    /// Unknown categories map to prose.
    pub fn parse(s: &str) -> Category {
        match s.to_ascii_lowercase().as_str() {
            "code" => Category::Code,
            "rag" => Category::Rag,
            "conversational" | "chat" => Category::Conversational,
            _ => Category::Prose,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Category::Code => "code",
            Category::Prose => "prose",
            Category::Rag => "rag",
            Category::Conversational => "conversational",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One serving request as seen by the gateway.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RequestRecord {
    pub input_tokens: u64,
    pub output_tokens: u64,
    pub category: Category,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload_bytes: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_text: Option<String>,
}

impl RequestRecord {
    pub fn total_tokens(&self) -> u64 {
        self.input_tokens + self.output_tokens
    }
}

/// Rule assigning an output-token count to a total token budget. The split
/// is deterministic in the total so pool calibration and simulation agree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum OutputModel {
    /// `l_out = round(fraction * total)`, at least 1.
    FractionOfTotal { fraction: f64 },
    /// Fixed output length regardless of total.
    Constant { tokens: u64 },
    /// `l_out = min(round(coeff * total^2), cap)`: output grows superlinearly
    /// with context (agentic multi-step workloads) up to a generation limit.
    QuadraticCapped { coeff: f64, cap: u64 },
}

impl Default for OutputModel {
    fn default() -> Self {
        OutputModel::FractionOfTotal { fraction: 0.25 }
    }
}

impl OutputModel {
    /// Split a total token budget into `(input, output)`. Output is at least
    /// 1 and at most `total - 1` whenever `total >= 2`.
    pub fn split(&self, total: u64) -> (u64, u64) {
        let total = total.max(1);
        if total == 1 {
            return (1, 0);
        }
        let raw = match *self {
            OutputModel::FractionOfTotal { fraction } => (fraction * total as f64).round() as u64,
            OutputModel::Constant { tokens } => tokens,
            OutputModel::QuadraticCapped { coeff, cap } => {
                let t = total as f64;
                ((coeff * t * t).round() as u64).min(cap)
            }
        };
        let out = raw.clamp(1, total - 1);
        (total - out, out)
    }
}

/// Empirical CDF over total token counts: a right-continuous step function
/// on the exact sample points, no smoothing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    /// `(token_count, cumulative_probability)`, token counts strictly
    /// increasing, cumulative probabilities nondecreasing, last = 1.
    sorted_points: Vec<(u64, f64)>,
}

impl EmpiricalDistribution {
    /// Build from raw totals (any order, duplicates allowed).
    pub fn from_values(values: &[u64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyDistribution("no values".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        let n = sorted.len() as f64;
        let mut points: Vec<(u64, f64)> = Vec::new();
        let mut seen = 0usize;
        let mut i = 0usize;
        while i < sorted.len() {
            let v = sorted[i];
            let mut j = i;
            while j < sorted.len() && sorted[j] == v {
                j += 1;
            }
            seen += j - i;
            points.push((v, seen as f64 / n));
            i = j;
        }
        points.last_mut().expect("nonempty").1 = 1.0;
        Ok(EmpiricalDistribution {
            sorted_points: points,
        })
    }

    /// Build from weighted breakpoints (weights need not be normalized).
    pub fn from_weighted(points: &[(u64, f64)]) -> Result<Self> {
        let total: f64 = points.iter().map(|(_, w)| w).sum();
        if points.is_empty() || total <= 0.0 {
            return Err(Error::EmptyDistribution("no mass".into()));
        }
        let mut sorted: Vec<(u64, f64)> = points.to_vec();
        sorted.sort_by_key(|(v, _)| *v);
        let mut out: Vec<(u64, f64)> = Vec::new();
        let mut acc = 0.0;
        for (v, w) in sorted {
            acc += w / total;
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 = acc,
                _ => out.push((v, acc)),
            }
        }
        out.last_mut().expect("nonempty").1 = 1.0;
        Ok(EmpiricalDistribution { sorted_points: out })
    }

    pub fn support_min(&self) -> u64 {
        self.sorted_points[0].0
    }

    pub fn support_max(&self) -> u64 {
        self.sorted_points[self.sorted_points.len() - 1].0
    }

    pub fn points(&self) -> &[(u64, f64)] {
        &self.sorted_points
    }

    /// F(x): fraction of mass at or below `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        // Last point with token_count <= x.
        let mut lo = 0usize;
        let mut hi = self.sorted_points.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            if (self.sorted_points[mid].0 as f64) <= x {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        if lo == 0 {
            0.0
        } else {
            self.sorted_points[lo - 1].1
        }
    }

    /// Smallest breakpoint with cumulative probability >= p.
    pub fn quantile(&self, p: f64) -> u64 {
        let p = p.clamp(0.0, 1.0);
        let idx = self
            .sorted_points
            .partition_point(|&(_, c)| c < p - 1e-12)
            .min(self.sorted_points.len() - 1);
        self.sorted_points[idx].0
    }

    /// Mean total tokens.
    pub fn mean(&self) -> f64 {
        let mut prev = 0.0;
        let mut acc = 0.0;
        for &(v, c) in &self.sorted_points {
            acc += v as f64 * (c - prev);
            prev = c;
        }
        acc
    }

    /// Restriction to the interval `(above, up_to]`, renormalized to mass 1.
    /// Returns `None` when no mass falls in the interval.
    pub fn restrict(&self, above: f64, up_to: f64) -> Option<EmpiricalDistribution> {
        let lo_mass = self.cdf(above);
        let hi_mass = self.cdf(up_to);
        let mass = hi_mass - lo_mass;
        if mass <= 0.0 {
            return None;
        }
        let mut points: Vec<(u64, f64)> = Vec::new();
        for &(v, c) in &self.sorted_points {
            let vf = v as f64;
            if vf > above && vf <= up_to {
                points.push((v, ((c - lo_mass) / mass).min(1.0)));
            }
        }
        points.last_mut()?.1 = 1.0;
        Some(EmpiricalDistribution {
            sorted_points: points,
        })
    }

    /// Inverse-CDF draw.
    pub fn sample(&self, rng: &mut impl Rng) -> u64 {
        self.quantile(rng.random::<f64>())
    }
}

/// A workload: its length distribution plus arrival and compression traits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorkloadSpec {
    pub distribution: EmpiricalDistribution,
    /// Fleet arrival rate in requests/second.
    pub arrival_rate: f64,
    /// Fraction of borderline requests that compress successfully.
    pub compressibility: f64,
    /// Mix of content categories; fractions sum to 1.
    pub category_mix: BTreeMap<Category, f64>,
}

impl WorkloadSpec {
    pub fn validate(&self) -> Result<()> {
        if self.arrival_rate <= 0.0 {
            return Err(Error::Config("arrival_rate must be > 0".into()));
        }
        if !(0.0..=1.0).contains(&self.compressibility) {
            return Err(Error::Config("compressibility must be in [0,1]".into()));
        }
        let total: f64 = self.category_mix.values().sum();
        if !self.category_mix.is_empty() && (total - 1.0).abs() > 1e-6 {
            return Err(Error::Config(format!(
                "category fractions sum to {total}, expected 1"
            )));
        }
        Ok(())
    }
}

/// Result of loading a trace file: parsed records plus a malformed-line count.
#[derive(Debug, Clone)]
pub struct TraceLoad {
    pub records: Vec<RequestRecord>,
    pub malformed: usize,
}

/// Trace file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Jsonl,
    Csv,
}

impl TraceFormat {
    /// Guess from the file extension; defaults to JSONL.
    pub fn from_path(path: &Path) -> TraceFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => TraceFormat::Csv,
            _ => TraceFormat::Jsonl,
        }
    }
}

#[derive(Deserialize)]
struct JsonlRecord {
    input_tokens: i64,
    output_tokens: i64,
    #[serde(default)]
    category: Option<String>,
    #[serde(default)]
    payload_bytes: Option<u64>,
    #[serde(default)]
    prompt_text: Option<String>,
}

fn validate_record(input_tokens: i64, output_tokens: i64) -> Option<(u64, u64)> {
    if input_tokens < 1 || output_tokens < 0 {
        return None;
    }
    Some((input_tokens as u64, output_tokens as u64))
}

/// Load a request trace. Malformed lines are skipped and counted; a file
/// with zero valid records is an error.
pub fn load_trace(path: &Path, format: TraceFormat) -> Result<TraceLoad> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut records = Vec::new();
    let mut malformed = 0usize;
    match format {
        TraceFormat::Jsonl => {
            for line in reader.lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<JsonlRecord>(&line) {
                    Ok(raw) => match validate_record(raw.input_tokens, raw.output_tokens) {
                        Some((input, output)) => records.push(RequestRecord {
                            input_tokens: input,
                            output_tokens: output,
                            category: Category::parse(raw.category.as_deref().unwrap_or("prose")),
                            payload_bytes: raw.payload_bytes,
                            prompt_text: raw.prompt_text,
                        }),
                        None => malformed += 1,
                    },
                    Err(_) => malformed += 1,
                }
            }
        }
        TraceFormat::Csv => {
            let mut csv_reader = csv::ReaderBuilder::new()
                .has_headers(true)
                .flexible(true)
                .from_reader(reader);
            let headers = csv_reader
                .headers()
                .map_err(|e| Error::Parse(format!("csv header: {e}")))?
                .clone();
            let idx = |name: &str| headers.iter().position(|h| h.trim() == name);
            let (ci, co) = match (idx("input_tokens"), idx("output_tokens")) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(Error::Parse(
                        "csv missing input_tokens/output_tokens columns".into(),
                    ))
                }
            };
            let ccat = idx("category");
            let cbytes = idx("payload_bytes");
            for row in csv_reader.records() {
                let Ok(row) = row else {
                    malformed += 1;
                    continue;
                };
                let parsed = (
                    row.get(ci).and_then(|v| v.trim().parse::<i64>().ok()),
                    row.get(co).and_then(|v| v.trim().parse::<i64>().ok()),
                );
                match parsed {
                    (Some(input), Some(output)) => match validate_record(input, output) {
                        Some((input, output)) => records.push(RequestRecord {
                            input_tokens: input,
                            output_tokens: output,
                            category: Category::parse(
                                ccat.and_then(|c| row.get(c)).unwrap_or("prose"),
                            ),
                            payload_bytes: cbytes
                                .and_then(|c| row.get(c))
                                .and_then(|v| v.trim().parse().ok()),
                            prompt_text: None,
                        }),
                        None => malformed += 1,
                    },
                    _ => malformed += 1,
                }
            }
        }
    }
    if records.is_empty() {
        return Err(Error::ZeroValidRecords);
    }
    Ok(TraceLoad { records, malformed })
}

/// Empirical CDF over total tokens of a trace.
pub fn build_cdf(records: &[RequestRecord]) -> Result<EmpiricalDistribution> {
    if records.is_empty() {
        return Err(Error::EmptyDistribution("no records".into()));
    }
    let totals: Vec<u64> = records.iter().map(RequestRecord::total_tokens).collect();
    EmpiricalDistribution::from_values(&totals)
}

/// Routed fraction `alpha = F(B)` and borderline fraction
/// `beta = F(gamma * B) - F(B)`.
pub fn borderline_fraction(dist: &EmpiricalDistribution, boundary: u64, gamma: f64) -> (f64, f64) {
    assert!(boundary >= 1 && gamma >= 1.0);
    let alpha = dist.cdf(boundary as f64);
    let beta = (dist.cdf(gamma * boundary as f64) - alpha).max(0.0);
    (alpha, beta)
}

/// Workload CDF shape relative to a boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Archetype {
    /// Concentrated below the boundary: F(B) >= 0.90.
    I,
    /// Dispersed across the boundary.
    II,
    /// Concentrated above the boundary: F(B) <= 0.50.
    III,
}

impl fmt::Display for Archetype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Archetype::I => f.write_str("I"),
            Archetype::II => f.write_str("II"),
            Archetype::III => f.write_str("III"),
        }
    }
}

pub fn classify_archetype(dist: &EmpiricalDistribution, boundary: u64, _gamma: f64) -> Archetype {
    let alpha = dist.cdf(boundary as f64);
    if alpha >= 0.90 {
        Archetype::I
    } else if alpha <= 0.50 {
        Archetype::III
    } else {
        Archetype::II
    }
}

/// Options for synthetic distribution generation.
#[derive(Debug, Clone, Copy)]
pub struct SynthOptions {
    /// Number of sample points in the synthetic distribution.
    pub points: usize,
    /// Hard cap on total tokens (long-pool context window).
    pub support_max: u64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            points: 30_000,
            support_max: 65_536,
        }
    }
}

/// Two-component lognormal mixture: weight on component 1 plus the two
/// `(mu, sigma)` pairs in ln-token space.
#[derive(Debug, Clone, Copy)]
struct LognormalMixture {
    weight: f64,
    mu1: f64,
    sigma1: f64,
    mu2: f64,
    sigma2: f64,
}

impl LognormalMixture {
    fn cdf_ln(&self, y: f64) -> f64 {
        self.weight * normal_cdf((y - self.mu1) / self.sigma1)
            + (1.0 - self.weight) * normal_cdf((y - self.mu2) / self.sigma2)
    }

    /// Quantile in ln-token space by bisection.
    fn quantile_ln(&self, p: f64) -> f64 {
        let spread = 14.0 * self.sigma1.max(self.sigma2).max(0.05);
        let mut lo = self.mu1.min(self.mu2) - spread;
        let mut hi = self.mu1.max(self.mu2) + spread;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.cdf_ln(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn mixture_from_params(p: &[f64]) -> LognormalMixture {
    // Parameters: (logit weight, mu1, ln sigma1, mu2, ln sigma2).
    LognormalMixture {
        weight: 1.0 / (1.0 + (-p[0]).exp()),
        mu1: p[1],
        sigma1: p[2].exp().clamp(1e-3, 4.0),
        mu2: p[3],
        sigma2: p[4].exp().clamp(1e-3, 4.0),
    }
}

fn fit_mixture(anchors: &[(f64, u64)]) -> LognormalMixture {
    // Single-lognormal seed through the first and last anchors.
    let (p_a, v_a) = anchors[0];
    let (p_b, v_b) = anchors[anchors.len() - 1];
    let (za, zb) = (normal_quantile(p_a), normal_quantile(p_b));
    let sigma0 = (((v_b as f64).ln() - (v_a as f64).ln()) / (zb - za)).max(0.05);
    let mu0 = (v_a as f64).ln() - za * sigma0;

    let objective = |params: &[f64]| -> f64 {
        let mix = mixture_from_params(params);
        let mut err = 0.0;
        for &(p, v) in anchors {
            let d = mix.quantile_ln(p) - (v as f64).ln();
            err += d * d;
        }
        err
    };

    // Multi-start: symmetric splits of the single-lognormal seed.
    let starts: [[f64; 5]; 4] = [
        [0.8, mu0 - 0.4 * sigma0, (sigma0 * 0.8).ln(), mu0 + 1.2 * sigma0, (sigma0 * 0.6).ln()],
        [1.2, mu0 - 0.2 * sigma0, (sigma0 * 0.9).ln(), mu0 + 1.8 * sigma0, (sigma0 * 0.4).ln()],
        [0.0, mu0 - 0.8 * sigma0, (sigma0 * 0.7).ln(), mu0 + 0.8 * sigma0, (sigma0 * 0.7).ln()],
        [2.0, mu0, sigma0.ln(), mu0 + 2.0 * sigma0, (sigma0 * 0.5).ln()],
    ];
    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in &starts {
        let (params, err) = nelder_mead(objective, start, &[0.4, 0.3, 0.3, 0.3, 0.3], 1200);
        if best.as_ref().is_none_or(|(_, e)| err < *e) {
            best = Some((params, err));
        }
        if best.as_ref().expect("set").1 < 1e-14 {
            break;
        }
    }
    mixture_from_params(&best.expect("at least one start").0)
}

/// Synthesize a token-length distribution matching percentile anchors.
///
/// Fits a two-component lognormal mixture by least squares on log-quantiles
/// and draws a stratified sample from it, so empirical quantiles track the
/// fitted curve closely. Deterministic for a fixed seed. Errors when fewer
/// than two anchors are given, when anchors are non-monotone, or when the
/// sampled quantiles miss an anchor by more than 5%.
pub fn synth_distribution(anchors: &[(f64, u64)], seed: u64) -> Result<EmpiricalDistribution> {
    synth_distribution_with(anchors, SynthOptions::default(), seed)
}

pub fn synth_distribution_with(
    anchors: &[(f64, u64)],
    opts: SynthOptions,
    seed: u64,
) -> Result<EmpiricalDistribution> {
    if anchors.len() < 2 {
        return Err(Error::Config("need at least 2 anchors".into()));
    }
    for pair in anchors.windows(2) {
        if pair[1].0 <= pair[0].0 {
            return Err(Error::Config("anchor percentiles must increase".into()));
        }
        if pair[1].1 <= pair[0].1 {
            return Err(Error::Config("anchor token counts must increase".into()));
        }
    }
    for &(p, v) in anchors {
        if !(0.0 < p && p < 1.0) || v == 0 {
            return Err(Error::Config(format!("bad anchor ({p}, {v})")));
        }
    }

    let mix = fit_mixture(anchors);

    // Stratified inverse-CDF sample: one draw per probability stratum.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = opts.points.max(100);
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let u = (i as f64 + rng.random::<f64>()) / n as f64;
        let v = mix.quantile_ln(u).exp().round().max(1.0);
        values.push((v as u64).clamp(1, opts.support_max));
    }
    let dist = EmpiricalDistribution::from_values(&values)?;

    for &(p, v) in anchors {
        let q = dist.quantile(p) as f64;
        let rel = (q - v as f64).abs() / v as f64;
        if rel > 0.05 {
            return Err(Error::Infeasible(format!(
                "synthetic fit missed anchor p{:.3}={} by {:.1}% (got {})",
                p,
                v,
                rel * 100.0,
                q
            )));
        }
    }
    Ok(dist)
}

/// Draw `n` synthetic requests from a distribution. Totals come from
/// inverse-CDF sampling; the output model splits each total; categories come
/// from `mix` when given (prose otherwise). Deterministic for a fixed seed.
pub fn sample_requests(
    dist: &EmpiricalDistribution,
    output_model: OutputModel,
    mix: Option<&BTreeMap<Category, f64>>,
    n: usize,
    seed: u64,
) -> Vec<RequestRecord> {
    assert!(n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(n);
    for _ in 0..n {
        let total = dist.sample(&mut rng);
        let (input, output) = output_model.split(total);
        let category = match mix {
            Some(mix) if !mix.is_empty() => {
                let draw: f64 = rng.random();
                let mut acc = 0.0;
                let mut chosen = Category::Prose;
                for (&cat, &frac) in mix {
                    acc += frac;
                    if draw < acc {
                        chosen = cat;
                        break;
                    }
                }
                chosen
            }
            _ => Category::Prose,
        };
        records.push(RequestRecord {
            input_tokens: input,
            output_tokens: output,
            category,
            // Payload sized so a 4 bytes/token estimator recovers the total.
            payload_bytes: Some(input * 4),
            prompt_text: None,
        });
    }
    records
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write;

    fn dist(values: &[u64]) -> EmpiricalDistribution {
        EmpiricalDistribution::from_values(values).unwrap()
    }

    #[test]
    fn build_cdf_counts_mass() {
        let records: Vec<RequestRecord> = [100u64, 100, 300]
            .iter()
            .map(|&t| RequestRecord {
                input_tokens: t - 1,
                output_tokens: 1,
                category: Category::Prose,
                payload_bytes: None,
                prompt_text: None,
            })
            .collect();
        let d = build_cdf(&records).unwrap();
        assert!((d.cdf(100.0) - 2.0 / 3.0).abs() < 1e-12);
        assert!((d.cdf(300.0) - 1.0).abs() < 1e-12);
        assert_eq!(d.cdf(99.0), 0.0);
    }

    #[test]
    fn point_mass_cdf() {
        let d = dist(&[500]);
        assert_eq!(d.cdf(499.0), 0.0);
        assert_eq!(d.cdf(500.0), 1.0);
        assert_eq!(d.quantile(0.3), 500);
    }

    #[test]
    fn build_cdf_empty_errors() {
        assert!(build_cdf(&[]).is_err());
    }

    #[test]
    fn restriction_renormalizes() {
        let d = dist(&[100, 200, 300, 400]);
        let r = d.restrict(150.0, 350.0).unwrap();
        assert_eq!(r.support_min(), 200);
        assert_eq!(r.support_max(), 300);
        assert!((r.cdf(200.0) - 0.5).abs() < 1e-12);
        assert!((r.cdf(300.0) - 1.0).abs() < 1e-12);
        assert!(d.restrict(400.0, 1e9).is_none());
    }

    #[test]
    fn borderline_gamma_one_is_empty_band() {
        let d = dist(&[100, 5000, 9000]);
        let (_, beta) = borderline_fraction(&d, 2000, 1.0);
        assert_eq!(beta, 0.0);
    }

    #[test]
    fn borderline_two_point_no_band_mass() {
        let d = EmpiricalDistribution::from_weighted(&[(1000, 0.6), (5000, 0.4)]).unwrap();
        let (alpha, beta) = borderline_fraction(&d, 2000, 1.5);
        assert!((alpha - 0.6).abs() < 1e-12);
        assert_eq!(beta, 0.0);
    }

    #[test]
    fn archetype_thresholds() {
        let concentrated = EmpiricalDistribution::from_weighted(&[(100, 0.95), (9000, 0.05)]).unwrap();
        assert_eq!(classify_archetype(&concentrated, 1000, 1.5), Archetype::I);
        let above = EmpiricalDistribution::from_weighted(&[(100, 0.3), (9000, 0.7)]).unwrap();
        assert_eq!(classify_archetype(&above, 1000, 1.5), Archetype::III);
        let mixed = EmpiricalDistribution::from_weighted(&[(100, 0.7), (9000, 0.3)]).unwrap();
        assert_eq!(classify_archetype(&mixed, 1000, 1.5), Archetype::II);
    }

    #[test]
    fn load_trace_jsonl_and_skip_malformed() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, r#"{{"input_tokens": 10, "output_tokens": 2, "category": "code"}}"#).unwrap();
        writeln!(file, r#"{{"input_tokens": 20, "output_tokens": 0}}"#).unwrap();
        writeln!(file, "not json").unwrap();
        writeln!(file, r#"{{"input_tokens": -5, "output_tokens": 0}}"#).unwrap();
        writeln!(file, r#"{{"input_tokens": 30, "output_tokens": 1, "category": "mystery"}}"#)
            .unwrap();
        let load = load_trace(file.path(), TraceFormat::Jsonl).unwrap();
        assert_eq!(load.records.len(), 3);
        assert_eq!(load.malformed, 2);
        assert_eq!(load.records[0].category, Category::Code);
        assert_eq!(load.records[2].category, Category::Prose);
    }

    #[test]
    fn load_trace_csv() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "input_tokens,output_tokens,category,payload_bytes").unwrap();
        writeln!(file, "100,10,rag,400").unwrap();
        writeln!(file, "bogus,10,rag,400").unwrap();
        writeln!(file, "200,0,conversational,").unwrap();
        let load = load_trace(file.path(), TraceFormat::Csv).unwrap();
        assert_eq!(load.records.len(), 2);
        assert_eq!(load.malformed, 1);
        assert_eq!(load.records[0].payload_bytes, Some(400));
    }

    #[test]
    fn load_trace_empty_errors() {
        let file = tempfile::NamedTempFile::new().unwrap();
        match load_trace(file.path(), TraceFormat::Jsonl) {
            Err(Error::ZeroValidRecords) => {}
            other => panic!("expected ZeroValidRecords, got {other:?}"),
        }
    }

    #[test]
    fn synth_needs_two_anchors() {
        assert!(synth_distribution(&[(0.5, 4096)], 1).is_err());
        assert!(synth_distribution(&[(0.5, 4096), (0.9, 2048)], 1).is_err());
        assert!(synth_distribution(&[(0.9, 4096), (0.5, 8192)], 1).is_err());
    }

    #[test]
    fn synth_matches_anchors_and_is_deterministic() {
        let anchors = [(0.5, 4096u64), (0.9, 16384), (0.99, 32768)];
        let a = synth_distribution(&anchors, 1).unwrap();
        let b = synth_distribution(&anchors, 1).unwrap();
        assert_eq!(a, b);
        let q90 = a.quantile(0.90);
        assert!((15565..=17203).contains(&q90), "q90={q90}");
    }

    #[test]
    fn synth_two_anchor_single_lognormal() {
        let d = synth_distribution(&[(0.5, 1000u64), (0.9, 3000)], 7).unwrap();
        let q50 = d.quantile(0.5) as f64;
        assert!((q50 - 1000.0).abs() / 1000.0 < 0.05);
    }

    #[test]
    fn sample_requests_point_mass_and_replay() {
        let d = dist(&[1000]);
        let a = sample_requests(&d, OutputModel::default(), None, 5, 3);
        assert_eq!(a.len(), 5);
        for r in &a {
            assert_eq!(r.total_tokens(), 1000);
            assert_eq!(r.output_tokens, 250);
        }
        let b = sample_requests(&d, OutputModel::default(), None, 5, 3);
        assert_eq!(
            a.iter().map(RequestRecord::total_tokens).collect::<Vec<_>>(),
            b.iter().map(RequestRecord::total_tokens).collect::<Vec<_>>()
        );
    }

    #[test]
    fn output_model_split_edge_cases() {
        assert_eq!(OutputModel::default().split(1), (1, 0));
        assert_eq!(OutputModel::default().split(2), (1, 1));
        assert_eq!(OutputModel::Constant { tokens: 500 }.split(100), (1, 99));
        let quad = OutputModel::QuadraticCapped { coeff: 1e-6, cap: 2048 };
        assert_eq!(quad.split(65_536).1, 2048);
        assert_eq!(quad.split(10_000).1, 100);
    }

    #[test]
    fn sampling_recovers_cdf_dkw() {
        // Inverse-CDF sampling then rebuilding the CDF stays within the
        // 2/sqrt(n) band at every original breakpoint.
        let d = EmpiricalDistribution::from_weighted(&[
            (100, 0.2),
            (800, 0.3),
            (4096, 0.35),
            (20000, 0.15),
        ])
        .unwrap();
        let n = 30_000;
        let records = sample_requests(&d, OutputModel::default(), None, n, 11);
        let rebuilt = build_cdf(&records).unwrap();
        let bound = 2.0 / (n as f64).sqrt();
        for &(v, c) in d.points() {
            let diff = (rebuilt.cdf(v as f64) - c).abs();
            assert!(diff <= bound, "diff {diff} at {v} exceeds {bound}");
        }
    }

    proptest! {
        #[test]
        fn beta_nondecreasing_in_gamma(
            values in proptest::collection::vec(1u64..50_000, 3..40),
            boundary in 1u64..40_000,
            g1 in 1.0f64..2.0,
            g2 in 1.0f64..2.0,
        ) {
            let d = EmpiricalDistribution::from_values(&values).unwrap();
            let (lo, hi) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
            let (a1, b1) = borderline_fraction(&d, boundary, lo);
            let (a2, b2) = borderline_fraction(&d, boundary, hi);
            prop_assert!((a1 - a2).abs() < 1e-12);
            prop_assert!(b2 + 1e-12 >= b1);
            prop_assert!(a1 + b1 <= 1.0 + 1e-12);
        }

        #[test]
        fn quantile_cdf_consistent(
            values in proptest::collection::vec(1u64..100_000, 1..60),
            p in 0.001f64..1.0,
        ) {
            let d = EmpiricalDistribution::from_values(&values).unwrap();
            let q = d.quantile(p);
            // F(quantile(p)) >= p and any smaller breakpoint has F < p.
            prop_assert!(d.cdf(q as f64) >= p - 1e-9);
        }
    }
}

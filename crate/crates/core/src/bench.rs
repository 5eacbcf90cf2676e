//! Seeded ablation benchmarks, penalized aggregation and obstacle-field
//! generation.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{EnvironmentMap, Obstacle, Workspace};
use crate::error::{Error, Result};
use crate::planner::{plan, ExtendConfig, PlannerConfig, Variant};
use crate::sampler::SamplerConfig;
use crate::Vec3;

/// Failed trials score this multiple of the worst successful value.
pub const PENALTY_FACTOR: f64 = 1.1;

/// Outcome of one planner run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub variant: Variant,
    pub success: bool,
    pub t_first_s: Option<f64>,
    pub iter_first: Option<u64>,
    pub turning_sum_rad: Option<f64>,
    pub path_length_m: Option<f64>,
    pub cost: Option<f64>,
    pub effective_ratio: f64,
    pub collision_checks: u64,
    pub collision_checks_total: u64,
    pub search_s: f64,
}

/// Strategy and budget shared by all trials of a benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrialSetup {
    pub sampler: SamplerConfig,
    pub extend: ExtendConfig,
    pub planner: PlannerConfig,
    /// Mixed into every trial seed.
    pub master_seed: u64,
    /// Record wall-clock times; disable for byte-identical reports.
    pub wall_clock: bool,
}

impl Default for TrialSetup {
    fn default() -> Self {
        Self {
            sampler: SamplerConfig::default(),
            extend: ExtendConfig::default(),
            planner: PlannerConfig::default(),
            master_seed: 0,
            wall_clock: true,
        }
    }
}

/// Generator seeded by the master seed and trial seed. Variants sharing a
/// seed share the stream.
pub fn trial_rng(master_seed: u64, seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(master_seed ^ seed.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn run_trial(variant: Variant, seed: u64, map: &EnvironmentMap, start: &Vec3, goal: &Vec3, setup: &TrialSetup) -> Result<TrialRecord> {
    let cfg = PlannerConfig {
        variant,
        ..setup.planner
    };
    let mut rng = trial_rng(setup.master_seed, seed);
    let rep = plan(map, start, goal, &setup.sampler, &setup.extend, &cfg, &mut rng)?;
    let s = &rep.stats;
    let clock = |v: f64| if setup.wall_clock { v } else { 0.0 };
    let p = rep.path.as_ref();
    Ok(TrialRecord {
        seed,
        variant,
        success: p.is_some(),
        t_first_s: p.and(s.t_first_s).map(clock),
        iter_first: p.and(s.iter_first),
        turning_sum_rad: p.map(|p| p.metrics.turning_sum_rad),
        path_length_m: p.map(|p| p.metrics.length_m),
        cost: p.map(|p| p.metrics.cost),
        effective_ratio: s.effective_ratio(),
        collision_checks: s.collision_checks,
        collision_checks_total: s.collision_checks_total,
        search_s: clock(s.search_s),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyPool {
    /// Penalty from the successes of the same variant.
    #[default]
    PerVariant,
    /// Penalty from the successes of all variants.
    Pooled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    TurningSum,
    PathLength,
    TFirst,
}

impl Metric {
    pub fn of(&self, r: &TrialRecord) -> Option<f64> {
        match self {
            Metric::TurningSum => r.turning_sum_rad,
            Metric::PathLength => r.path_length_m,
            Metric::TFirst => r.t_first_s,
        }
    }
}

/// Score given to failures: 1.1 × the largest successful value. When every
/// success scored exactly zero the smallest positive number is used so the
/// penalty still exceeds them.
pub fn penalty_value(successes: &[f64]) -> Result<f64> {
    let max = successes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if successes.is_empty() || !max.is_finite() {
        return Err(Error::Penalization("no successful trials".into()));
    }
    let p = PENALTY_FACTOR * max;
    Ok(if p > max { p } else { f64::MIN_POSITIVE.max(max + max.abs() * 0.1 + f64::EPSILON) })
}

/// Replaces failures (`None`) by `penalty`.
pub fn penalize(values: &[Option<f64>], penalty: f64) -> Vec<f64> {
    values.iter().map(|v| v.unwrap_or(penalty)).collect()
}

/// Penalized metric values per variant, in (variant, seed) order.
pub fn penalized(records: &[TrialRecord], metric: Metric, pool: PenaltyPool) -> Result<BTreeMap<Variant, (f64, Vec<f64>)>> {
    let groups = group(records);
    let pooled: Vec<f64> = records.iter().filter_map(|r| metric.of(r)).collect();
    let mut out = BTreeMap::new();
    for (v, rs) in groups {
        let values: Vec<Option<f64>> = rs.iter().map(|r| metric.of(r)).collect();
        let own: Vec<f64> = values.iter().flatten().copied().collect();
        let penalty = match pool {
            PenaltyPool::PerVariant => penalty_value(&own).or_else(|_| penalty_value(&pooled)),
            PenaltyPool::Pooled => penalty_value(&pooled),
        }?;
        out.insert(v, (penalty, penalize(&values, penalty)));
    }
    Ok(out)
}

fn group(records: &[TrialRecord]) -> BTreeMap<Variant, Vec<TrialRecord>> {
    let mut g: BTreeMap<Variant, Vec<TrialRecord>> = BTreeMap::new();
    for r in records {
        g.entry(r.variant).or_default().push(r.clone());
    }
    for rs in g.values_mut() {
        rs.sort_by_key(|r| r.seed);
    }
    g
}

pub fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Median; the mean of the two middle values for even lengths.
pub fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    Some(if n % 2 == 1 { s[n / 2] } else { 0.5 * (s[n / 2 - 1] + s[n / 2]) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean_raw: Option<f64>,
    pub median_raw: Option<f64>,
    pub penalty: Option<f64>,
    pub mean_penalized: Option<f64>,
    pub median_penalized: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantSummary {
    pub variant: Variant,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_effective_ratio: f64,
    pub mean_t_first_s: Option<f64>,
    pub mean_collision_checks: f64,
    pub median_collision_checks: f64,
    pub turning_sum_rad: MetricSummary,
    pub path_length_m: MetricSummary,
}

pub fn aggregate(records: &[TrialRecord], pool: PenaltyPool) -> Vec<VariantSummary> {
    let groups = group(records);
    let pen = |m: Metric| penalized(records, m, pool).ok();
    let (turn, len) = (pen(Metric::TurningSum), pen(Metric::PathLength));
    groups
        .iter()
        .map(|(v, rs)| {
            let metric = |m: Metric, p: &Option<BTreeMap<Variant, (f64, Vec<f64>)>>| {
                let raw: Vec<f64> = rs.iter().filter_map(|r| m.of(r)).collect();
                let pv = p.as_ref().and_then(|p| p.get(v));
                MetricSummary {
                    mean_raw: mean(&raw),
                    median_raw: median(&raw),
                    penalty: pv.map(|p| p.0),
                    mean_penalized: pv.and_then(|p| mean(&p.1)),
                    median_penalized: pv.and_then(|p| median(&p.1)),
                }
            };
            let checks: Vec<f64> = rs.iter().map(|r| r.collision_checks as f64).collect();
            let t_first: Vec<f64> = rs.iter().filter_map(|r| r.t_first_s).collect();
            let successes = rs.iter().filter(|r| r.success).count();
            VariantSummary {
                variant: *v,
                trials: rs.len(),
                successes,
                success_rate: successes as f64 / rs.len() as f64,
                mean_effective_ratio: mean(&rs.iter().map(|r| r.effective_ratio).collect::<Vec<_>>()).unwrap_or(0.0),
                mean_t_first_s: mean(&t_first),
                mean_collision_checks: mean(&checks).unwrap_or(0.0),
                median_collision_checks: median(&checks).unwrap_or(0.0),
                turning_sum_rad: metric(Metric::TurningSum, &turn),
                path_length_m: metric(Metric::PathLength, &len),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub seeds: u64,
    /// Iteration budget shared by every trial.
    pub max_iters: usize,
    /// First trial seed; trials use `first_seed..first_seed + seeds`.
    pub first_seed: u64,
    pub variants: Vec<Variant>,
    /// Worker threads; `None` uses all cores.
    pub workers: Option<usize>,
    pub penalty_pool: PenaltyPool,
    pub env_file: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            seeds: 50,
            max_iters: DEFAULT_BENCH_ITERS,
            first_seed: 0,
            variants: Variant::ALL.to_vec(),
            workers: None,
            penalty_pool: PenaltyPool::PerVariant,
            env_file: None,
            output_dir: None,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.seeds == 0 || self.variants.is_empty() || self.max_iters == 0 {
            return Err(Error::Config("bench needs at least one seed and one variant".into()));
        }
        Ok(())
    }
}

/// Iteration budget of the default ablation benchmark.
pub const DEFAULT_BENCH_ITERS: usize = 300;

/// A trial that could not be run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvalidTrial {
    pub seed: u64,
    pub variant: Variant,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub records: Vec<TrialRecord>,
    pub invalid: Vec<InvalidTrial>,
    pub summary: Vec<VariantSummary>,
}

impl BenchResult {
    pub fn summary_of(&self, v: Variant) -> Option<&VariantSummary> {
        self.summary.iter().find(|s| s.variant == v)
    }

    pub fn record(&self, v: Variant, seed: u64) -> Option<&TrialRecord> {
        self.records.iter().find(|r| r.variant == v && r.seed == seed)
    }

    /// Writes `trials.csv`, `summary.csv` and `summary.json` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join("trials.csv"))?;
        for r in &self.records {
            w.serialize(r)?;
        }
        w.flush()?;
        let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
        w.write_record([
            "variant",
            "trials",
            "successes",
            "success_rate",
            "mean_effective_ratio",
            "mean_t_first_s",
            "mean_collision_checks",
            "median_collision_checks",
            "median_turning_raw_rad",
            "median_turning_penalized_rad",
            "mean_turning_penalized_rad",
            "median_length_raw_m",
            "median_length_penalized_m",
            "mean_length_penalized_m",
        ])?;
        let f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for s in &self.summary {
            w.write_record([
                s.variant.to_string(),
                s.trials.to_string(),
                s.successes.to_string(),
                s.success_rate.to_string(),
                s.mean_effective_ratio.to_string(),
                f(s.mean_t_first_s),
                s.mean_collision_checks.to_string(),
                s.median_collision_checks.to_string(),
                f(s.turning_sum_rad.median_raw),
                f(s.turning_sum_rad.median_penalized),
                f(s.turning_sum_rad.mean_penalized),
                f(s.path_length_m.median_raw),
                f(s.path_length_m.median_penalized),
                f(s.path_length_m.mean_penalized),
            ])?;
        }
        w.flush()?;
        fs::write(dir.join("summary.json"), serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// Runs every (variant, seed) pair in parallel and aggregates the results.
pub fn run_bench(map: &EnvironmentMap, start: &Vec3, goal: &Vec3, cfg: &BenchConfig, setup: &TrialSetup) -> Result<BenchResult> {
    cfg.validate()?;
    let jobs: Vec<(Variant, u64)> = cfg
        .variants
        .iter()
        .flat_map(|v| (cfg.first_seed..cfg.first_seed + cfg.seeds).map(move |s| (*v, s)))
        .collect();
    let mut setup = setup.clone();
    setup.planner.max_iters = cfg.max_iters;
    let setup = &setup;
    let run = || -> Vec<(Variant, u64, Result<TrialRecord>)> {
        jobs.par_iter().map(|&(v, s)| (v, s, run_trial(v, s, map, start, goal, setup))).collect()
    };
    let outcomes = match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    let mut records = Vec::new();
    let mut invalid = Vec::new();
    for (variant, seed, out) in outcomes {
        match out {
            Ok(r) => records.push(r),
            Err(Error::InfeasibleInput(reason)) => {
                warn!("excluding {variant} seed {seed}: {reason}");
                invalid.push(InvalidTrial { seed, variant, reason });
            }
            Err(e) => return Err(e),
        }
    }
    records.sort_by_key(|r| (r.variant, r.seed));
    let summary = aggregate(&records, cfg.penalty_pool);
    Ok(BenchResult {
        records,
        invalid,
        summary,
    })
}

/// Random obstacle field description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvSpec {
    #[serde(rename = "workspace_min_m")]
    pub workspace_min: Vec3,
    #[serde(rename = "workspace_max_m")]
    pub workspace_max: Vec3,
    /// Target obstacle volume fraction.
    pub volume_fraction: f64,
    /// Footprint half-width range [m].
    #[serde(rename = "half_width_range_m")]
    pub half_width: [f64; 2],
    /// Obstacle height range [m]; obstacles stand on the workspace floor.
    #[serde(rename = "height_range_m")]
    pub height: [f64; 2],
    /// Points that must keep at least `clear_radius` clearance.
    #[serde(rename = "keep_clear_m")]
    pub keep_clear: Vec<Vec3>,
    #[serde(rename = "clear_radius_m")]
    pub clear_radius: f64,
    pub seed: u64,
    /// Rejected candidate boxes tolerated before giving up.
    pub max_rejections: usize,
    /// Monte-Carlo points used to track the covered fraction.
    pub audit_samples: usize,
    /// Share of boxes centered inside the band around the line between the
    /// first two keep-clear points; 0 spreads boxes uniformly.
    pub band_share: f64,
    /// Half-width of that band in the floor plane [m].
    #[serde(rename = "band_half_width_m")]
    pub band_half_width: f64,
}

impl Default for EnvSpec {
    fn default() -> Self {
        Self {
            workspace_min: Vec3::zeros(),
            workspace_max: Vec3::new(50.0, 50.0, 15.0),
            volume_fraction: 0.12,
            half_width: [1.0, 2.5],
            height: [6.0, 15.0],
            keep_clear: vec![Vec3::new(6.0, 2.0, 10.0), Vec3::new(40.0, 40.0, 5.0)],
            clear_radius: 2.5,
            seed: 7,
            max_rejections: 20_000,
            audit_samples: 40_000,
            band_share: 0.0,
            band_half_width: 8.0,
        }
    }
}

/// Places random floor-standing boxes until the covered volume fraction
/// reaches the target, keeping the listed points clear.
pub fn generate_env(spec: &EnvSpec) -> Result<EnvironmentMap> {
    let ws = Workspace::new(spec.workspace_min, spec.workspace_max)?;
    if !(0.0..1.0).contains(&spec.volume_fraction) {
        return Err(Error::Config("volume fraction must lie in [0, 1)".into()));
    }
    if !(spec.half_width[0] > 0.0 && spec.half_width[0] <= spec.half_width[1] && spec.height[0] > 0.0 && spec.height[0] <= spec.height[1]) {
        return Err(Error::Config("obstacle size ranges must be positive and ordered".into()));
    }
    for p in &spec.keep_clear {
        if !ws.contains(p) {
            return Err(Error::Config(format!("keep-clear point {:?} is outside the workspace", p.as_slice())));
        }
    }
    if !(0.0..=1.0).contains(&spec.band_share) || !(spec.band_half_width > 0.0) {
        return Err(Error::Config("band share must lie in [0, 1] with a positive band width".into()));
    }
    let band = match spec.keep_clear.as_slice() {
        [a, b, ..] if spec.band_share > 0.0 && (a.xy() - b.xy()).norm() > 0.0 => Some((*a, *b)),
        _ => None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let probes: Vec<Vec3> = (0..spec.audit_samples.max(1)).map(|_| ws.sample_uniform(&mut rng)).collect();
    let mut covered = vec![false; probes.len()];
    let mut count = 0usize;
    let mut obstacles = Vec::new();
    let mut rejections = 0;
    let floor = spec.workspace_min.z;
    let top = spec.workspace_max.z;
    while (count as f64) < spec.volume_fraction * probes.len() as f64 {
        let hw = Vec3::new(
            rng.random_range(spec.half_width[0]..=spec.half_width[1]),
            rng.random_range(spec.half_width[0]..=spec.half_width[1]),
            0.5 * rng.random_range(spec.height[0]..=spec.height[1]).min(top - floor),
        );
        let c = match band {
            Some((a, b)) if rng.random::<f64>() < spec.band_share => {
                let t: f64 = rng.random();
                let n = Vec3::new(a.y - b.y, b.x - a.x, 0.0).normalize();
                let p = a + (b - a) * t + n * rng.random_range(-spec.band_half_width..=spec.band_half_width);
                Vec3::new(p.x.clamp(spec.workspace_min.x, spec.workspace_max.x), p.y.clamp(spec.workspace_min.y, spec.workspace_max.y), floor + hw.z)
            }
            _ => Vec3::new(
                rng.random_range(spec.workspace_min.x..spec.workspace_max.x),
                rng.random_range(spec.workspace_min.y..spec.workspace_max.y),
                floor + hw.z,
            ),
        };
        let o = Obstacle::cuboid(c, hw)?;
        if spec.keep_clear.iter().any(|p| o.distance(p) <= spec.clear_radius) {
            rejections += 1;
            if rejections > spec.max_rejections {
                return Err(Error::Generation(format!(
                    "reached {:.3} of the requested {} volume fraction before exhausting placements",
                    count as f64 / probes.len() as f64,
                    spec.volume_fraction
                )));
            }
            continue;
        }
        for (k, p) in probes.iter().enumerate() {
            if !covered[k] && o.contains(p) {
                covered[k] = true;
                count += 1;
            }
        }
        obstacles.push(o);
    }
    EnvironmentMap::new(ws, obstacles)
}

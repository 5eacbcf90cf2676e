//! Command-line front end.
//!
//! Each subcommand reads an optional JSON config (`--config`), applies
//! `--set key.path=value` overrides and any dedicated flags (which are
//! shorthands for the matching config keys), then runs one pipeline stage.
//! Exit status: 0 on success, 2 when the instance is infeasible, 1 on any
//! other error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bench::{generate_env, run_bench};
use crate::config::PipelineConfig;
use crate::dynmodel::verify;
use crate::env::EnvironmentMap;
use crate::error::{Error, Result};
use crate::planner::{plan, PathResult};
use crate::trajopt::{optimize, optimize_in_tube, Trajectory};

#[derive(Debug, Parser)]
#[command(name = "tuberrt", version, about = "Tube-RRT* path search and cable-payload trajectory optimization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search a tube path and write it as JSON (plus an optional node CSV).
    Plan(PlanArgs),
    /// Turn a path into a trajectory with cable tensions.
    Optimize(OptimizeArgs),
    /// Audit a trajectory against the limits and the environment.
    Verify(VerifyArgs),
    /// Run the multi-seed ablation benchmark.
    Bench(BenchArgs),
    /// Generate a random obstacle field.
    GenEnv(GenEnvArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Pipeline config (JSON).
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    /// Override a config key, e.g. `--set planner.max_iters=2000`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[command(flatten)]
    pub common: Common,
    /// Environment JSON.
    #[arg(long)]
    pub env: PathBuf,
    /// Output path JSON.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Also write the search tree as CSV.
    #[arg(long)]
    pub nodes: Option<PathBuf>,
    /// `start_m` as x,y,z.
    #[arg(long = "start-m", value_name = "X,Y,Z")]
    pub start: Option<String>,
    /// `goal_m` as x,y,z.
    #[arg(long = "goal-m", value_name = "X,Y,Z")]
    pub goal: Option<String>,
    /// `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// `planner.max_iters`.
    #[arg(long = "max-iters")]
    pub max_iters: Option<usize>,
    /// `planner.variant` (enhanced, stube, aetube).
    #[arg(long)]
    pub variant: Option<String>,
    /// `planner.r_min_m`.
    #[arg(long = "r-min-m")]
    pub r_min: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Path JSON written by `plan`.
    #[arg(long)]
    pub path: PathBuf,
    /// Output directory for trajectory.csv, trajectory.json and report.json.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Environment JSON; when given the trajectory is kept inside the tube.
    #[arg(long)]
    pub env: Option<PathBuf>,
    /// `optimizer.t_upper_n`.
    #[arg(long = "t-upper-n")]
    pub t_upper: Option<f64>,
    /// `optimizer.alpha_u_deg`.
    #[arg(long = "alpha-u-deg")]
    pub alpha_u_deg: Option<f64>,
    /// `optimizer.v_max_mps`.
    #[arg(long = "v-max-mps")]
    pub v_max: Option<f64>,
    /// `optimizer.a_max_mps2`.
    #[arg(long = "a-max-mps2")]
    pub a_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Trajectory JSON written by `optimize`.
    #[arg(long)]
    pub trajectory: PathBuf,
    /// Environment JSON.
    #[arg(long)]
    pub env: PathBuf,
    /// Output report JSON; printed to stdout when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: Common,
    /// Environment JSON; generated from `env_spec` when omitted.
    #[arg(long)]
    pub env: Option<PathBuf>,
    /// Output directory for trials.csv, summary.csv and summary.json.
    #[arg(long, short)]
    pub out: PathBuf,
    /// `bench.seeds`.
    #[arg(long)]
    pub seeds: Option<u64>,
    /// `bench.max_iters`.
    #[arg(long = "max-iters")]
    pub max_iters: Option<usize>,
    /// `bench.workers`.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Zero all wall-clock fields so reports are byte-identical across runs.
    #[arg(long = "no-wall-clock")]
    pub no_wall_clock: bool,
}

#[derive(Debug, Args)]
pub struct GenEnvArgs {
    #[command(flatten)]
    pub common: Common,
    /// Output environment JSON.
    #[arg(long, short)]
    pub out: PathBuf,
    /// `env_spec.volume_fraction`.
    #[arg(long = "volume-fraction")]
    pub volume_fraction: Option<f64>,
    /// `env_spec.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
}

fn vec_literal(s: &str) -> String {
    format!("[{s}]")
}

fn load(common: &Common, flags: Vec<(&str, Option<String>)>) -> Result<PipelineConfig> {
    let mut overrides = common.overrides.clone();
    overrides.extend(flags.into_iter().filter_map(|(k, v)| v.map(|v| format!("{k}={v}"))));
    let cfg = PipelineConfig::load(common.config.as_deref(), &overrides)?;
    cfg.validate()?;
    Ok(cfg)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    Infeasible,
}

pub fn run_plan(a: &PlanArgs) -> Result<Outcome> {
    let cfg = load(
        &a.common,
        vec![
            ("start_m", a.start.as_deref().map(vec_literal)),
            ("goal_m", a.goal.as_deref().map(vec_literal)),
            ("seed", a.seed.map(|v| v.to_string())),
            ("planner.max_iters", a.max_iters.map(|v| v.to_string())),
            ("planner.variant", a.variant.clone()),
            ("planner.r_min_m", a.r_min.map(|v| v.to_string())),
        ],
    )?;
    let map = EnvironmentMap::load_json(&a.env)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let rep = plan(&map, &cfg.start, &cfg.goal, &cfg.sampler, &cfg.extend, &cfg.planner, &mut rng)?;
    if let Some(p) = &a.nodes {
        rep.write_nodes_csv(p)?;
    }
    match rep.path {
        Some(path) => {
            path.save_json(&a.out)?;
            info!(
                "path with {} waypoints, length {:.2} m, turning {:.2} rad",
                path.waypoints.len(),
                path.metrics.length_m,
                path.metrics.turning_sum_rad
            );
            Ok(Outcome::Done)
        }
        None => {
            warn!("no goal connection after {} iterations", cfg.planner.max_iters);
            Ok(Outcome::Infeasible)
        }
    }
}

pub fn run_optimize(a: &OptimizeArgs) -> Result<Outcome> {
    let cfg = load(
        &a.common,
        vec![
            ("optimizer.t_upper_n", a.t_upper.map(|v| v.to_string())),
            ("optimizer.alpha_u_deg", a.alpha_u_deg.map(|v| v.to_string())),
            ("optimizer.v_max_mps", a.v_max.map(|v| v.to_string())),
            ("optimizer.a_max_mps2", a.a_max.map(|v| v.to_string())),
        ],
    )?;
    let path = PathResult::load_json(&a.path)?;
    let out = match &a.env {
        Some(e) => {
            let map = EnvironmentMap::load_json(e)?;
            optimize_in_tube(&path.waypoints, &map, cfg.planner.r_min, &cfg.optimizer, &cfg.system)?
        }
        None => optimize(&path.waypoints, &cfg.optimizer, &cfg.system)?,
    };
    std::fs::create_dir_all(&a.out)?;
    out.trajectory.write_csv(a.out.join("trajectory.csv"))?;
    out.trajectory.save_json(a.out.join("trajectory.json"))?;
    write_json(&a.out.join("report.json"), &out.report)?;
    info!(
        "trajectory of {:.2} s, objective {:.4}, max tension {:.2} N",
        out.report.duration_s, out.report.objective, out.report.audit.max_tension_n
    );
    Ok(Outcome::Done)
}

pub fn run_verify(a: &VerifyArgs) -> Result<Outcome> {
    let cfg = load(&a.common, Vec::new())?;
    let traj = Trajectory::load_json(&a.trajectory)?;
    let map = EnvironmentMap::load_json(&a.env)?;
    let rep = verify(&traj.spline, &traj.tensions, &cfg.system, &cfg.verify_bounds(), &map);
    match &a.out {
        Some(p) => write_json(p, &rep)?,
        None => println!("{}", serde_json::to_string_pretty(&rep)?),
    }
    for f in &rep.failures {
        warn!("{f}");
    }
    Ok(if rep.pass { Outcome::Done } else { Outcome::Infeasible })
}

pub fn run_bench_cmd(a: &BenchArgs) -> Result<Outcome> {
    let cfg = load(
        &a.common,
        vec![
            ("bench.seeds", a.seeds.map(|v| v.to_string())),
            ("bench.max_iters", a.max_iters.map(|v| v.to_string())),
            ("bench.workers", a.workers.map(|v| v.to_string())),
        ],
    )?;
    let env_file = a.env.clone().or_else(|| cfg.bench.env_file.clone());
    let map = match env_file {
        Some(p) => EnvironmentMap::load_json(p)?,
        None => generate_env(&cfg.env_spec)?,
    };
    let mut setup = cfg.trial_setup();
    setup.wall_clock = !a.no_wall_clock;
    let res = run_bench(&map, &cfg.start, &cfg.goal, &cfg.bench, &setup)?;
    res.write(&a.out)?;
    for s in &res.summary {
        println!(
            "{:<9} success {:>5.2} eff {:.3} checks {:>7.0} turning {:>7.2} length {:>7.2}",
            s.variant.name(),
            s.success_rate,
            s.mean_effective_ratio,
            s.median_collision_checks,
            s.turning_sum_rad.median_penalized.unwrap_or(f64::NAN),
            s.path_length_m.median_penalized.unwrap_or(f64::NAN),
        );
    }
    Ok(Outcome::Done)
}

pub fn run_gen_env(a: &GenEnvArgs) -> Result<Outcome> {
    let cfg = load(
        &a.common,
        vec![
            ("env_spec.volume_fraction", a.volume_fraction.map(|v| v.to_string())),
            ("env_spec.seed", a.seed.map(|v| v.to_string())),
        ],
    )?;
    let map = generate_env(&cfg.env_spec)?;
    map.save_json(&a.out)?;
    info!("{} obstacles written to {}", map.obstacles().len(), a.out.display());
    Ok(Outcome::Done)
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Plan(a) => run_plan(a),
        Command::Optimize(a) => run_optimize(a),
        Command::Verify(a) => run_verify(a),
        Command::Bench(a) => run_bench_cmd(a),
        Command::GenEnv(a) => run_gen_env(a),
    }
}

/// Maps a command result to the process exit status.
pub fn exit_code(result: &Result<Outcome>) -> u8 {
    match result {
        Ok(Outcome::Done) => 0,
        Ok(Outcome::Infeasible) | Err(Error::Infeasible { .. }) | Err(Error::InfeasibleInput(_)) => 2,
        Err(_) => 1,
    }
}

pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = execute(&cli);
    if let Err(e) = &result {
        eprintln!("error: {e}");
    }
    ExitCode::from(exit_code(&result))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Ok(Outcome::Done)), 0);
        assert_eq!(exit_code(&Ok(Outcome::Infeasible)), 2);
        let inf = Err(Error::Infeasible {
            class: "tension".into(),
            detail: String::new(),
        });
        assert_eq!(exit_code(&inf), 2);
        assert_eq!(exit_code(&Err(Error::InfeasibleInput("start".into()))), 2);
        assert_eq!(exit_code(&Err(Error::Config("bad".into()))), 1);
    }

    #[test]
    fn parses_every_subcommand() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from(["tuberrt", "plan", "--env", "e.json", "-o", "p.json", "--start-m", "1,2,3", "--set", "seed=4"]).unwrap();
        assert!(matches!(cli.command, Command::Plan(_)));
        for args in [
            vec!["tuberrt", "optimize", "--path", "p.json", "-o", "out"],
            vec!["tuberrt", "verify", "--trajectory", "t.json", "--env", "e.json"],
            vec!["tuberrt", "bench", "-o", "out", "--seeds", "3"],
            vec!["tuberrt", "gen-env", "-o", "e.json"],
        ] {
            Cli::try_parse_from(args).unwrap();
        }
    }
}

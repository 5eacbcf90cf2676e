//! Three-variant ablation on the default arena.
//!
//! ```text
//! cargo run --release --example ablation -- [seeds] [max_iters]
//! ```

use std::time::Instant;

use tuberrt::bench::{generate_env, run_bench};
use tuberrt::config::PipelineConfig;

fn main() -> anyhow::Result<()> {
    env_logger::init();
    let mut cfg = PipelineConfig::default();
    let mut args = std::env::args().skip(1);
    if let Some(s) = args.next() {
        cfg.bench.seeds = s.parse()?;
    }
    if let Some(m) = args.next() {
        cfg.bench.max_iters = m.parse()?;
    }

    let map = generate_env(&cfg.env_spec)?;
    println!(
        "{} obstacles, tube radius {:.3} m, {} seeds, budget {}",
        map.obstacles().len(),
        cfg.planner.r_min,
        cfg.bench.seeds,
        cfg.bench.max_iters
    );
    let t = Instant::now();
    let res = run_bench(&map, &cfg.start, &cfg.goal, &cfg.bench, &cfg.trial_setup())?;
    println!("{} trials in {:.1} s", res.records.len(), t.elapsed().as_secs_f64());
    println!(
        "{:<9} {:>7} {:>7} {:>9} {:>10} {:>10} {:>10} {:>10}",
        "variant", "success", "eff", "t_first", "checks", "turn_pen", "len_pen", "len_raw"
    );
    for s in &res.summary {
        println!(
            "{:<9} {:>7.2} {:>7.3} {:>9.3} {:>10.0} {:>10.2} {:>10.2} {:>10.2}",
            s.variant.name(),
            s.success_rate,
            s.mean_effective_ratio,
            s.mean_t_first_s.unwrap_or(f64::NAN),
            s.median_collision_checks,
            s.turning_sum_rad.median_penalized.unwrap_or(f64::NAN),
            s.path_length_m.median_penalized.unwrap_or(f64::NAN),
            s.path_length_m.median_raw.unwrap_or(f64::NAN),
        );
    }
    Ok(())
}

//! Plans a tube path across the default arena with each planner variant.
//!
//! ```text
//! cargo run --release --example plan_arena -- [seed] [max_iters]
//! ```
//!
//! Writes `path_<variant>.json` and `nodes_<variant>.csv` to the working
//! directory.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tuberrt::bench::generate_env;
use tuberrt::config::PipelineConfig;
use tuberrt::planner::{plan, PlannerConfig, Variant};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);
    let max_iters: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(3000);

    let cfg = PipelineConfig::default();
    let map = generate_env(&cfg.env_spec)?;
    println!("arena with {} boxes, tube radius {:.3} m", map.obstacles().len(), cfg.planner.r_min);

    for variant in Variant::ALL {
        let pcfg = PlannerConfig {
            variant,
            max_iters,
            ..cfg.planner
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rep = plan(&map, &cfg.start, &cfg.goal, &cfg.sampler, &cfg.extend, &pcfg, &mut rng)?;
        rep.write_nodes_csv(format!("nodes_{}.csv", variant.name()))?;
        match &rep.path {
            Some(p) => {
                p.save_json(format!("path_{}.json", variant.name()))?;
                let m = &p.metrics;
                println!(
                    "{:<9} first hit after {:>5} iterations, {:>6} checks | length {:6.2} m, turning {:5.2} rad, min clearance {:.2} m",
                    variant.name(),
                    rep.stats.iter_first.unwrap_or(0),
                    m.collision_checks,
                    m.length_m,
                    m.turning_sum_rad,
                    m.min_clearance_m
                );
            }
            None => println!("{:<9} no path within {max_iters} iterations", variant.name()),
        }
    }
    Ok(())
}

//! Plans a path through the default arena, optimizes the payload trajectory
//! and cable tensions, and audits the result.
//!
//! ```text
//! cargo run --release --example optimize_path -- [seed]
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tuberrt::bench::generate_env;
use tuberrt::config::PipelineConfig;
use tuberrt::dynmodel::verify;
use tuberrt::planner::plan;
use tuberrt::trajopt::optimize_in_tube;

fn main() -> anyhow::Result<()> {
    env_logger::init();
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1);
    let cfg = PipelineConfig::default();
    let map = generate_env(&cfg.env_spec)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rep = plan(&map, &cfg.start, &cfg.goal, &cfg.sampler, &cfg.extend, &cfg.planner, &mut rng)?;
    let path = rep.path.ok_or_else(|| anyhow::anyhow!("no path found for seed {seed}"))?;
    println!("path: {} waypoints, {:.2} m", path.waypoints.len(), path.metrics.length_m);

    let out = optimize_in_tube(&path.waypoints, &map, cfg.planner.r_min, &cfg.optimizer, &cfg.system)?;
    let r = &out.report;
    println!(
        "trajectory: {} segments, {:.2} s, {} decision variables, {} solver iterations",
        r.segments, r.duration_s, r.decision_size, r.iterations
    );
    println!(
        "objective {:.3} = smoothness {:.3} + force rate {:.3} + force {:.3} + sharing {:.3} + moment {:.3}",
        r.objective, r.terms.smoothness, r.terms.force_rate, r.terms.force_magnitude, r.terms.sharing, r.terms.moment
    );
    println!("narrowest corridor {:.3} m", r.min_corridor_half_width_m.unwrap_or(f64::NAN));
    println!(
        "tensions {:.2}..{:.2} N, max tilt {:.2} deg, equilibrium residual {:.2e} N",
        r.audit.min_tension_n,
        r.audit.max_tension_n,
        r.audit.max_tilt_rad.to_degrees(),
        r.audit.equilibrium_residual_n
    );

    let check = verify(&out.trajectory.spline, &out.trajectory.tensions, &cfg.system, &cfg.verify_bounds(), &map);
    println!(
        "audit at {} samples: {} (min clearance {:.2} m)",
        check.samples,
        if check.pass { "pass" } else { "FAIL" },
        check.min_clearance_along_traj_m
    );
    for f in &check.failures {
        println!("  {f}");
    }
    out.trajectory.write_csv("trajectory.csv")?;
    Ok(())
}

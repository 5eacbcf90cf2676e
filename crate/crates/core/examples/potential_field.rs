//! Expansion directions and step lengths next to a single box.
//!
//! Prints, for points at growing distance from the box face, the repulsive
//! and attractive force magnitudes, the field direction, the fusion weight
//! and the adaptive step for a straight and a right-angle continuation.

use tuberrt::env::{EnvironmentMap, Obstacle, Workspace};
use tuberrt::extend::{adaptive_step, fusion_weight, potential_direction, potential_gradient, ExtendContext, PotentialConfig, StepConfig, GRADIENT_STEP};
use tuberrt::Vec3;

fn main() -> anyhow::Result<()> {
    let ws = Workspace::new(Vec3::new(-20.0, -20.0, 0.0), Vec3::new(20.0, 20.0, 10.0))?;
    let obstacle = Obstacle::cuboid(Vec3::new(0.0, 0.0, 5.0), Vec3::new(2.0, 2.0, 5.0))?;
    let map = EnvironmentMap::new(ws, vec![obstacle])?;
    // Weak attraction so the repulsion shows in the blended direction.
    let pcfg = PotentialConfig {
        k_att: 0.01,
        inflation: Some(1.0),
        ..Default::default()
    };
    let scfg = StepConfig::default();
    let goal = Vec3::new(15.0, 0.5, 5.0);

    println!(
        "{:>5} {:>9} {:>9} {:>26} {:>7} {:>9} {:>9}",
        "gap", "|F_rep|", "|F_att|", "field direction", "weight", "straight", "turn 90"
    );
    for gap in [1.1, 1.25, 1.5, 2.0, 2.5, 3.5] {
        let xi = Vec3::new(-2.0 - gap, 0.5, 5.0);
        let ctx = ExtendContext {
            xi_near: xi,
            xi_parent: Some(xi - Vec3::x()),
            region_density: 0.1,
            mean_density: 0.1,
            d_obs: map.clearance(&xi)?,
        };
        let rep = pcfg.k_rep * potential_gradient(&map, &xi, &pcfg, GRADIENT_STEP).norm();
        let att = pcfg.k_att * (goal - xi).norm();
        let (u, f) = potential_direction(&ctx, &(xi + Vec3::x()), &goal, &map, &pcfg)?;
        let w = fusion_weight(ctx.d_obs, f, &pcfg);
        let straight = adaptive_step(&ctx, &Vec3::x(), &scfg)?;
        let turn = adaptive_step(&ctx, &Vec3::y(), &scfg)?;
        println!(
            "{gap:>5.2} {rep:>9.2e} {att:>9.2e} ({:>7.3}, {:>7.3}, {:>7.3}) {w:>7.3} {straight:>9.3} {turn:>9.3}",
            u.x, u.y, u.z
        );
    }
    Ok(())
}

//! Degenerate two-waypoint instance: the payload hovers, each of the three
//! cables carries a third of its weight straight up.

use tuberrt::dynmodel::SystemParams;
use tuberrt::trajopt::{optimize, tilt_angle, OptConfig};
use tuberrt::Vec3;

fn main() -> anyhow::Result<()> {
    let p = Vec3::new(0.0, 0.0, 5.0);
    let params = SystemParams::default();
    let out = optimize(&[p, p], &OptConfig::default(), &params)?;
    let forces = &out.trajectory.tensions.forces;
    let max_dev = forces
        .iter()
        .flatten()
        .map(|f| (f.norm() - params.m0 * 9.81 / 3.0).abs())
        .fold(0.0, f64::max);
    let max_tilt = forces.iter().flatten().map(tilt_angle).fold(0.0, f64::max);
    println!("cable 1 at t=0: {:?} N", forces[0][0].as_slice());
    println!("largest deviation from m0 g / 3: {max_dev:.2e} N, largest tilt {max_tilt:.2e} rad");
    Ok(())
}

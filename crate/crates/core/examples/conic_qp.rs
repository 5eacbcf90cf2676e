//! The conic layer by itself: a small least-squares problem with a linear
//! equality, a box and a tilt cone, solved and checked.

use tuberrt::trajopt::{cone_slack, solve, ConicProblem, SocConstraint, SolveSettings};
use tuberrt::Vec3;

fn main() -> anyhow::Result<()> {
    // Find the force closest to (3, 0, 4) whose components sum to 6, whose
    // z stays below 5, and which lies within 22 degrees of vertical.
    let alpha = 22f64.to_radians();
    let mut p = ConicProblem::new(3);
    let rows: Vec<_> = (0..3).map(|i| vec![(i, 1.0)]).collect();
    p.add_least_squares(&rows, &[-3.0, 0.0, -4.0], 1.0);
    p.add_eq(vec![(0, 1.0), (1, 1.0), (2, 1.0)], 6.0, "sum");
    p.add_ineq(vec![(2, 1.0)], 5.0, "cap");
    p.socs.push(SocConstraint {
        a: vec![vec![(0, 1.0)], vec![(1, 1.0)]],
        b: vec![0.0, 0.0],
        c: vec![(2, alpha.tan())],
        d: 0.0,
        class: "tilt",
    });
    let sol = solve(&p, &SolveSettings::default())?;
    let f = Vec3::new(sol.x[0], sol.x[1], sol.x[2]);
    println!("status {:?} after {} iterations", sol.status, sol.iterations);
    println!("F = {:?}, objective {:.6}", f.as_slice(), sol.objective);
    println!(
        "sum {:.9}, tilt {:.4} deg, cone slack {:.2e}",
        f.sum(),
        f.xy().norm().atan2(f.z).to_degrees(),
        cone_slack(&f, alpha)
    );
    Ok(())
}

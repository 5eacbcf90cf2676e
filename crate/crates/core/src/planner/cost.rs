//! Composite edge cost, neighborhood radius and path metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extend::angle_between;
use crate::Vec3;

/// Weights and constants of the length-plus-turning edge cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostConfig {
    pub w_length: f64,
    pub w_turn: f64,
    /// Reference edge length [m].
    #[serde(rename = "d_ref_m")]
    pub d_ref: f64,
    /// Reference speed [m/s].
    #[serde(rename = "v_ref_mps")]
    pub v_ref: f64,
    /// Turn duration [s].
    #[serde(rename = "dt_s")]
    pub dt: f64,
}

impl Default for CostConfig {
    fn default() -> Self {
        Self {
            w_length: 1.0,
            w_turn: 1.0,
            d_ref: 2.3,
            v_ref: 1.0,
            dt: 0.01,
        }
    }
}

impl CostConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [self.w_length, self.w_turn, self.d_ref, self.v_ref, self.dt];
        if all.iter().all(|v| *v > 0.0 && v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Config("cost constants must be positive and finite".into()))
        }
    }
}

fn unit(from: &Vec3, to: &Vec3) -> Result<Vec3> {
    let d = to - from;
    let n = d.norm();
    if !(n > 0.0) {
        return Err(Error::Degenerate(format!("coincident points at {:?}", from.as_slice())));
    }
    Ok(d / n)
}

/// Turning-acceleration energy `‖v_ref (u_out − u_in)/Δt‖² Δt`.
pub fn turning_energy(u_in: &Vec3, u_out: &Vec3, v_ref: f64, dt: f64) -> f64 {
    (v_ref * (u_out - u_in) / dt).norm_squared() * dt
}

/// Cost of the edge `xi_p → xi_new` entered from `xi_pp` (`None` at the root).
pub fn edge_cost(xi_pp: Option<&Vec3>, xi_p: &Vec3, xi_new: &Vec3, cfg: &CostConfig) -> Result<f64> {
    let u_out = unit(xi_p, xi_new)?;
    let length = (xi_new - xi_p).norm();
    let turn = match xi_pp {
        Some(pp) => turning_energy(&unit(pp, xi_p)?, &u_out, cfg.v_ref, cfg.dt),
        None => 0.0,
    };
    Ok(cfg.w_length * length / cfg.d_ref + cfg.w_turn * turn)
}

/// Density-corrected RRT* neighborhood radius, capped at `3ε`.
pub fn neighborhood_radius(n: usize, gamma: f64, rho_eff: f64, epsilon: f64) -> f64 {
    let cap = 3.0 * epsilon;
    if n < 2 {
        return cap;
    }
    let nf = n as f64;
    let r = (gamma * nf.ln() / (rho_eff * nf)).cbrt();
    r.min(cap)
}

/// Effective node density `ε_u p_l / μ(free space)`.
pub fn effective_density(uniform_mix: f64, p_l: f64, free_volume: f64) -> f64 {
    uniform_mix * p_l / free_volume
}

/// Total polyline length.
pub fn path_length(points: &[Vec3]) -> f64 {
    points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// Sum of heading changes at interior vertices [rad]. Zero-length segments
/// are skipped.
pub fn turning_sum(points: &[Vec3]) -> f64 {
    let dirs: Vec<Vec3> = points
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| d.norm() > 0.0)
        .map(|d| d.normalize())
        .collect();
    dirs.windows(2).map(|w| angle_between(&w[0], &w[1])).sum()
}

/// Sum of edge costs along a polyline, recomputed from scratch.
pub fn path_cost(points: &[Vec3], cfg: &CostConfig) -> Result<f64> {
    let mut total = 0.0;
    for i in 1..points.len() {
        let pp = if i >= 2 { Some(&points[i - 2]) } else { None };
        total += edge_cost(pp, &points[i - 1], &points[i], cfg)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn collinear_reference_edge_costs_one() {
        let cfg = CostConfig::default();
        let c = edge_cost(Some(&Vec3::new(-1.0, 0.0, 0.0)), &Vec3::zeros(), &Vec3::new(2.3, 0.0, 0.0), &cfg).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn right_angle_energy() {
        let e = turning_energy(&Vec3::x(), &Vec3::y(), 1.0, 0.01);
        assert!((e - 200.0).abs() < 1e-9);
        let cfg = CostConfig::default();
        let c = edge_cost(Some(&Vec3::new(-1.0, 0.0, 0.0)), &Vec3::zeros(), &Vec3::new(0.0, 2.3, 0.0), &cfg).unwrap();
        assert!((c - 201.0).abs() < 1e-9);
    }

    #[test]
    fn root_edge_is_pure_length() {
        let cfg = CostConfig::default();
        let c = edge_cost(None, &Vec3::new(1.0, 2.0, 3.0), &Vec3::new(1.0, 2.0, 7.6), &cfg).unwrap();
        assert!((c - 2.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_points_are_degenerate() {
        let cfg = CostConfig::default();
        let p = Vec3::new(1.0, 1.0, 1.0);
        assert!(matches!(edge_cost(None, &p, &p, &cfg), Err(Error::Degenerate(_))));
        assert!(matches!(edge_cost(Some(&p), &p, &Vec3::zeros(), &cfg), Err(Error::Degenerate(_))));
    }

    #[test]
    fn radius_hand_value() {
        let r = neighborhood_radius(1000, 1.0, 0.01, 3.0);
        let want = (1000f64.ln() / 10.0).cbrt();
        assert!((r - want).abs() < 1e-12);
        assert!((r - 0.8840).abs() < 1e-4);
    }

    #[test]
    fn radius_cap_and_decay() {
        assert_eq!(neighborhood_radius(3, 1e9, 0.01, 3.0), 9.0);
        let mut prev = f64::INFINITY;
        for e in 2..=6 {
            let r = neighborhood_radius(10usize.pow(e), 1.0, 1.0, 3.0);
            assert!(r < prev);
            prev = r;
        }
        assert!(prev < 0.03);
    }

    #[test]
    fn polyline_metrics() {
        let pts = [Vec3::zeros(), Vec3::x(), Vec3::new(1.0, 1.0, 0.0), Vec3::new(1.0, 1.0, 1.0)];
        assert!((path_length(&pts) - 3.0).abs() < 1e-12);
        assert!((turning_sum(&pts) - std::f64::consts::PI).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn cost_is_nonnegative_and_bounded_below_by_length(
            a in prop::array::uniform3(-5.0f64..5.0),
            b in prop::array::uniform3(-5.0f64..5.0),
            c in prop::array::uniform3(-5.0f64..5.0),
        ) {
            let (a, b, c) = (Vec3::from(a), Vec3::from(b), Vec3::from(c));
            prop_assume!((b - a).norm() > 1e-6 && (c - b).norm() > 1e-6);
            let cfg = CostConfig::default();
            let cost = edge_cost(Some(&a), &b, &c, &cfg).unwrap();
            prop_assert!(cost >= (c - b).norm() / cfg.d_ref - 1e-12);
            // Turning energy is bounded by a full reversal.
            prop_assert!(cost <= (c - b).norm() / cfg.d_ref + 4.0 / cfg.dt + 1e-9);
        }
    }
}

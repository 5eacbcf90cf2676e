//! Cable tension profiles and the tilt-cone projection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Vec3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensionProfile {
    /// Sample times [s].
    pub times: Vec<f64>,
    /// `forces[k][i]` is the force of cable `i` on the payload at `times[k]` [N].
    pub forces: Vec<Vec<Vec3>>,
}

impl TensionProfile {
    pub fn cables(&self) -> usize {
        self.forces.first().map_or(0, |f| f.len())
    }

    pub fn samples(&self) -> usize {
        self.times.len()
    }

    /// Forces at `t` by linear interpolation between samples; clamped at
    /// the ends.
    pub fn interpolate(&self, t: f64) -> Vec<Vec3> {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.forces[0].clone();
        }
        if t >= self.times[n - 1] {
            return self.forces[n - 1].clone();
        }
        let k = self.times.partition_point(|&x| x <= t) - 1;
        let w = (t - self.times[k]) / (self.times[k + 1] - self.times[k]);
        self.forces[k]
            .iter()
            .zip(&self.forces[k + 1])
            .map(|(a, b)| a * (1.0 - w) + b * w)
            .collect()
    }

    pub fn max_tension(&self) -> f64 {
        self.forces.iter().flatten().map(|f| f.norm()).fold(0.0, f64::max)
    }

    pub fn min_tension(&self) -> f64 {
        self.forces.iter().flatten().map(|f| f.norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_tilt(&self) -> f64 {
        self.forces.iter().flatten().map(tilt_angle).fold(0.0, f64::max)
    }
}

/// Angle between `f` and the vertical [rad]; zero for the zero vector.
pub fn tilt_angle(f: &Vec3) -> f64 {
    let h = (f.x * f.x + f.y * f.y).sqrt();
    if h == 0.0 && f.z >= 0.0 {
        return 0.0;
    }
    h.atan2(f.z)
}

/// `e₃ᵀF − cos(α)‖F‖`; non-negative inside the tilt cone.
pub fn cone_slack(f: &Vec3, alpha: f64) -> f64 {
    f.z - alpha.cos() * f.norm()
}

/// Euclidean projection onto `{F : e₃ᵀF ≥ cos(α)‖F‖}`.
pub fn project_tilt_cone(f: &Vec3, alpha: f64) -> Vec3 {
    let k = alpha.tan();
    let h = (f.x * f.x + f.y * f.y).sqrt();
    if h <= k * f.z {
        return *f;
    }
    if k * h <= -f.z {
        return Vec3::zeros();
    }
    // Nearest point on the boundary ray through (k·û, 1).
    let s = (k * h + f.z) / (1.0 + k * k);
    Vec3::new(k * s * f.x / h, k * s * f.y / h, s)
}

/// Equal split of each required force, projected onto the tilt cone.
pub fn init_tensions(times: &[f64], required: &[Vec3], cables: usize, alpha: f64) -> Result<TensionProfile> {
    if times.len() != required.len() || cables == 0 {
        return Err(Error::Domain("tension initialization needs one force per sample and at least one cable".into()));
    }
    let forces = required
        .iter()
        .map(|r| vec![project_tilt_cone(&(r / cables as f64), alpha); cables])
        .collect();
    Ok(TensionProfile {
        times: times.to_vec(),
        forces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ALPHA: f64 = 22.0 * std::f64::consts::PI / 180.0;

    /// Grid search over the cone boundary and axis, refined around the
    /// best point.
    fn brute_projection(f: &Vec3, alpha: f64) -> Vec3 {
        let k = alpha.tan();
        let mut best = (f.norm(), Vec3::zeros());
        let (mut z_lo, mut z_hi) = (0.0, 2.0 * f.norm() + 1.0);
        let (mut phi_lo, mut phi_hi) = (0.0, 2.0 * std::f64::consts::PI);
        let (mut rho_lo, mut rho_hi) = (0.0, 1.0);
        for _ in 0..12 {
            let (mut bz, mut bphi, mut brho) = (0.0, 0.0, 0.0);
            for iz in 0..=40 {
                let z = z_lo + (z_hi - z_lo) * iz as f64 / 40.0;
                for ip in 0..=40 {
                    let phi = phi_lo + (phi_hi - phi_lo) * ip as f64 / 40.0;
                    for ir in 0..=4 {
                        let rho = rho_lo + (rho_hi - rho_lo) * ir as f64 / 4.0;
                        let p = Vec3::new(rho * k * z * phi.cos(), rho * k * z * phi.sin(), z);
                        let d = (p - f).norm();
                        if d < best.0 {
                            best = (d, p);
                            (bz, bphi, brho) = (z, phi, rho);
                        }
                    }
                }
            }
            let (dz, dp, dr) = ((z_hi - z_lo) / 20.0, (phi_hi - phi_lo) / 20.0, (rho_hi - rho_lo) / 2.0);
            (z_lo, z_hi) = ((bz - dz).max(0.0), bz + dz);
            (phi_lo, phi_hi) = (bphi - dp, bphi + dp);
            (rho_lo, rho_hi) = ((brho - dr).max(0.0), (brho + dr).min(1.0));
        }
        best.1
    }

    #[test]
    fn vertical_force_is_unchanged() {
        let f = Vec3::new(0.0, 0.0, 16.35);
        assert_eq!(project_tilt_cone(&f, ALPHA), f);
    }

    #[test]
    fn boundary_force_is_unchanged() {
        let f = Vec3::new(ALPHA.sin(), 0.0, ALPHA.cos()) * 10.0;
        let p = project_tilt_cone(&f, ALPHA);
        assert!((p - f).norm() < 1e-12);
    }

    #[test]
    fn tilted_force_lands_on_boundary() {
        let f = Vec3::new(1.0, 0.0, 1.0);
        let p = project_tilt_cone(&f, ALPHA);
        assert!(cone_slack(&p, ALPHA).abs() < 1e-12);
        assert!((tilt_angle(&p) - ALPHA).abs() < 1e-12);
        let oracle = brute_projection(&f, ALPHA);
        assert!((p - oracle).norm() < 1e-7, "{p:?} vs {oracle:?}");
        assert!((p - f).norm() <= (oracle - f).norm() + 1e-12);
    }

    #[test]
    fn downward_force_projects_to_origin() {
        assert_eq!(project_tilt_cone(&Vec3::new(0.1, 0.0, -3.0), ALPHA), Vec3::zeros());
    }

    #[test]
    fn interpolation_is_linear() {
        let p = TensionProfile {
            times: vec![0.0, 1.0],
            forces: vec![vec![Vec3::zeros()], vec![Vec3::new(2.0, 0.0, 4.0)]],
        };
        assert_eq!(p.interpolate(0.25)[0], Vec3::new(0.5, 0.0, 1.0));
        assert_eq!(p.interpolate(5.0)[0], Vec3::new(2.0, 0.0, 4.0));
    }

    proptest! {
        #[test]
        fn projection_is_feasible_and_idempotent(f in prop::array::uniform3(-20.0f64..20.0), alpha_deg in 5.0f64..60.0) {
            let alpha = alpha_deg.to_radians();
            let f = Vec3::from(f);
            let p = project_tilt_cone(&f, alpha);
            prop_assert!(cone_slack(&p, alpha) >= -1e-12 * f.norm().max(1.0));
            let pp = project_tilt_cone(&p, alpha);
            prop_assert!((pp - p).norm() <= 1e-12 * f.norm().max(1.0));
            // Residual is orthogonal to the projection (Moreau decomposition).
            prop_assert!((f - p).dot(&p).abs() <= 1e-9 * f.norm_squared().max(1.0));
        }
    }
}

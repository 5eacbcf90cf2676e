//! System parameters, force and moment bookkeeping, and trajectory audits.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::env::EnvironmentMap;
use crate::error::{Error, Result};
use crate::trajopt::{tilt_angle, PolySpline, TensionProfile};
use crate::{Mat3, Vec3, GRAVITY};

/// Physical parameters of the payload and its cable team.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemParams {
    /// Payload mass [kg].
    #[serde(rename = "m0_kg")]
    pub m0: f64,
    /// Payload inertia [kg·m²].
    #[serde(rename = "j0_kgm2")]
    pub j0: Mat3,
    /// Mass of each UAV [kg].
    #[serde(rename = "uav_mass_kg")]
    pub uav_mass: f64,
    /// Cable length [m].
    #[serde(rename = "cable_length_m")]
    pub cable_length: f64,
    /// Attachment offsets in the payload frame [m]; one per cable.
    #[serde(rename = "attachments_m")]
    pub attachments: Vec<Vec3>,
    #[serde(rename = "uav_radius_m")]
    pub uav_radius: f64,
    /// Half the payload's bounding-box diagonal [m].
    #[serde(rename = "payload_half_diag_m")]
    pub payload_half_diag: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        let m0 = 5.0;
        let j0 = Mat3::from_diagonal(&Vec3::new(0.6875, 0.59375, 0.78333));
        Self {
            m0,
            j0,
            uav_mass: 1.0,
            cable_length: 0.75,
            attachments: triangle_attachments(0.5),
            uav_radius: 0.3,
            payload_half_diag: box_half_diagonal(m0, &j0),
        }
    }
}

/// Three attachment points on a circle of `radius` in the payload plane.
pub fn triangle_attachments(radius: f64) -> Vec<Vec3> {
    (0..3)
        .map(|i| {
            let a = 2.0 * std::f64::consts::PI * i as f64 / 3.0;
            Vec3::new(radius * a.cos(), radius * a.sin(), 0.0)
        })
        .collect()
}

/// Half-diagonal of the homogeneous box with mass `m` and principal
/// inertia `diag(j)`.
pub fn box_half_diagonal(m: f64, j: &Mat3) -> f64 {
    // J_xx + J_yy + J_zz = m (a² + b² + c²)/6 for side lengths a, b, c.
    let sum_sq = 6.0 * j.trace() / m;
    0.5 * sum_sq.sqrt()
}

impl SystemParams {
    pub fn cables(&self) -> usize {
        self.attachments.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m0 > 0.0 && self.cable_length > 0.0 && self.uav_radius >= 0.0) {
            return Err(Error::Config("mass and cable length must be positive".into()));
        }
        if self.attachments.is_empty() {
            return Err(Error::Config("at least one cable is required".into()));
        }
        if (self.j0 - self.j0.transpose()).amax() > 1e-12 || self.j0.cholesky().is_none() {
            return Err(Error::Config("payload inertia must be symmetric positive definite".into()));
        }
        Ok(())
    }

    /// Tube radius that fits the whole formation at tilt `alpha_u`.
    pub fn tube_radius(&self, alpha_u: f64) -> f64 {
        self.payload_half_diag + self.cable_length * alpha_u.sin() + self.uav_radius
    }
}

/// Desired payload state used for the moment reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayloadRefState {
    pub xi0: Vec3,
    pub r0: Mat3,
    pub omega: Vec3,
    pub omega_dot: Vec3,
    pub a: Vec3,
}

impl PayloadRefState {
    pub fn level(xi0: Vec3, a: Vec3) -> Self {
        Self {
            xi0,
            r0: Mat3::identity(),
            omega: Vec3::zeros(),
            omega_dot: Vec3::zeros(),
            a,
        }
    }

    pub fn is_rotation(&self) -> bool {
        (self.r0.transpose() * self.r0 - Mat3::identity()).amax() <= 1e-10 && self.r0.determinant() > 0.0
    }
}

/// Skew matrix with `hat(v) w = v × w`.
pub fn hat(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// UAV position `ξ₀ + R₀ρ + l q` for unit cable direction `q`.
pub fn uav_position(xi0: &Vec3, r0: &Mat3, rho: &Vec3, l: f64, q: &Vec3) -> Result<Vec3> {
    if (q.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("cable direction has norm {}", q.norm())));
    }
    Ok(xi0 + r0 * rho + l * q)
}

/// Resultant cable force `m0 (a + g)` needed for acceleration `a`.
pub fn required_force(a: &Vec3, m0: f64, g_vec: &Vec3) -> Vec3 {
    m0 * (a + g_vec)
}

/// Net moment `Σ ρ̂_i R_refᵀ F_i` of the cable forces about the payload center.
pub fn payload_moment(forces: &[Vec3], r_ref: &Mat3, attachments: &[Vec3]) -> Result<Vec3> {
    if forces.len() != attachments.len() {
        return Err(Error::Domain(format!("{} forces for {} attachments", forces.len(), attachments.len())));
    }
    Ok(forces
        .iter()
        .zip(attachments)
        .map(|(f, rho)| hat(rho) * (r_ref.transpose() * f))
        .sum())
}

/// Euler moment `J₀Ω̇ + Ω × J₀Ω`.
pub fn reference_moment(j0: &Mat3, omega: &Vec3, omega_dot: &Vec3) -> Vec3 {
    j0 * omega_dot + omega.cross(&(j0 * omega))
}

/// Limits checked by [`verify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyBounds {
    #[serde(rename = "t_upper_n")]
    pub t_upper: f64,
    #[serde(rename = "t_lower_n")]
    pub t_lower: f64,
    #[serde(rename = "alpha_u_rad")]
    pub alpha_u: f64,
    #[serde(rename = "v_max_mps")]
    pub v_max: f64,
    #[serde(rename = "a_max_mps2")]
    pub a_max: f64,
    #[serde(rename = "g_vec_mps2")]
    pub g_vec: Vec3,
    /// Allowed relative overshoot of the speed and acceleration bounds.
    pub bound_overshoot: f64,
    /// Allowed equilibrium residual as a fraction of `m0‖g‖`.
    pub equilibrium_tol: f64,
    /// Allowed cone slack violation.
    pub cone_tol: f64,
    #[serde(rename = "rate_hz")]
    pub rate_hz: f64,
}

impl Default for VerifyBounds {
    fn default() -> Self {
        Self {
            t_upper: 35.0,
            t_lower: 1.0,
            alpha_u: 22f64.to_radians(),
            v_max: 2.0,
            a_max: 1.0,
            g_vec: Vec3::new(0.0, 0.0, GRAVITY),
            bound_overshoot: 0.01,
            equilibrium_tol: 1e-6,
            cone_tol: 1e-9,
            rate_hz: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub max_tension_n: f64,
    pub min_tension_n: f64,
    pub max_tilt_rad: f64,
    pub max_equilibrium_residual_n: f64,
    pub max_moment_norm_nm: f64,
    pub max_speed_component_mps: f64,
    pub max_accel_component_mps2: f64,
    pub min_payload_clearance_m: f64,
    pub min_uav_clearance_m: f64,
    /// Smaller of the payload and UAV clearance margins [m].
    pub min_clearance_along_traj_m: f64,
    pub samples: usize,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
    pub pass: bool,
}

/// Audits a trajectory and its tensions.
///
/// Equilibrium is checked at the force samples; tension, tilt, moment,
/// speed, acceleration and clearance are checked on a dense grid with forces
/// interpolated linearly between samples. UAV positions are reconstructed
/// with cables aligned to their forces.
pub fn verify(
    spline: &PolySpline,
    tensions: &TensionProfile,
    params: &SystemParams,
    bounds: &VerifyBounds,
    map: &EnvironmentMap,
) -> VerificationReport {
    let mut failures = Vec::new();
    let mut warnings = Vec::new();

    let mut eq_res: f64 = 0.0;
    for (t, forces) in tensions.times.iter().zip(&tensions.forces) {
        let a = spline.eval(*t, 2).unwrap_or_else(|_| Vec3::zeros());
        let r = required_force(&a, params.m0, &bounds.g_vec);
        let sum: Vec3 = forces.iter().sum();
        eq_res = eq_res.max((sum - r).norm());
    }

    let steps = ((spline.duration() * bounds.rate_hz).ceil() as usize).max(1);
    let mut max_t: f64 = 0.0;
    let mut min_t = f64::INFINITY;
    let mut max_tilt: f64 = 0.0;
    let mut min_slack = f64::INFINITY;
    let mut max_m: f64 = 0.0;
    let (mut max_v, mut max_a): (f64, f64) = (0.0, 0.0);
    let (mut payload_clear, mut uav_clear) = (f64::INFINITY, f64::INFINITY);
    for s in 0..=steps {
        let t = (spline.start_time() + spline.duration() * s as f64 / steps as f64).min(spline.end_time());
        let (p, v, a) = match (spline.eval(t, 0), spline.eval(t, 1), spline.eval(t, 2)) {
            (Ok(p), Ok(v), Ok(a)) => (p, v, a),
            _ => continue,
        };
        max_v = max_v.max(v.amax());
        max_a = max_a.max(a.amax());
        let forces = tensions.interpolate(t);
        for f in &forces {
            max_t = max_t.max(f.norm());
            min_t = min_t.min(f.norm());
            max_tilt = max_tilt.max(tilt_angle(f));
            min_slack = min_slack.min(f.z - bounds.alpha_u.cos() * f.norm());
        }
        if let Ok(m) = payload_moment(&forces, &Mat3::identity(), &params.attachments) {
            max_m = max_m.max(m.norm());
        }
        payload_clear = payload_clear.min(map.clearance_unchecked(&p) - params.payload_half_diag);
        for (f, rho) in forces.iter().zip(&params.attachments) {
            let q = if f.norm() > 0.0 { f.normalize() } else { Vec3::z() };
            if let Ok(u) = uav_position(&p, &Mat3::identity(), rho, params.cable_length, &q) {
                uav_clear = uav_clear.min(map.clearance_unchecked(&u) - params.uav_radius);
            }
        }
    }

    let weight = params.m0 * bounds.g_vec.norm();
    if eq_res > bounds.equilibrium_tol * weight {
        failures.push(format!("equilibrium residual {eq_res:.3e} N"));
    }
    if max_t > bounds.t_upper * (1.0 + 1e-9) {
        failures.push(format!("max tension {max_t:.4} N exceeds {}", bounds.t_upper));
    }
    if min_slack < -bounds.cone_tol * bounds.t_upper.max(1.0) {
        failures.push(format!("tilt {max_tilt:.6} rad exceeds {:.6}", bounds.alpha_u));
    }
    if max_v > bounds.v_max * (1.0 + bounds.bound_overshoot) {
        failures.push(format!("speed component {max_v:.4} m/s exceeds {}", bounds.v_max));
    }
    if max_a > bounds.a_max * (1.0 + bounds.bound_overshoot) {
        failures.push(format!("acceleration component {max_a:.4} m/s² exceeds {}", bounds.a_max));
    }
    if payload_clear < 0.0 {
        failures.push(format!("payload clearance margin {payload_clear:.3} m"));
    }
    if uav_clear < 0.0 {
        failures.push(format!("UAV clearance margin {uav_clear:.3} m"));
    }
    if min_t < bounds.t_lower {
        let msg = format!("min tension {min_t:.3} N below {}", bounds.t_lower);
        warn!("{msg}");
        warnings.push(msg);
    }

    VerificationReport {
        max_tension_n: max_t,
        min_tension_n: min_t,
        max_tilt_rad: max_tilt,
        max_equilibrium_residual_n: eq_res,
        max_moment_norm_nm: max_m,
        max_speed_component_mps: max_v,
        max_accel_component_mps2: max_a,
        min_payload_clearance_m: payload_clear,
        min_uav_clearance_m: uav_clear,
        min_clearance_along_traj_m: payload_clear.min(uav_clear),
        samples: steps + 1,
        pass: failures.is_empty(),
        failures,
        warnings,
    }
}

//! Potential-guided adaptive tree expansion.
//!
//! The expansion direction blends the random RRT direction with the
//! direction of a potential field (superquadric repulsion, goal attraction
//! and a line term that suppresses lateral drift from the previous heading).
//! The step length is a soft minimum of a turn-angle step and an
//! obstacle-density step.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::{superquadric_value, EnvironmentMap, Obstacle};
use crate::error::{Error, Result};
use crate::Vec3;

/// Central finite-difference step for the potential gradient [m].
pub const GRADIENT_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialConfig {
    pub k_rep: f64,
    pub k_att: f64,
    pub k_line: f64,
    /// Amplitude `A` of the superquadric potential.
    pub amplitude: f64,
    /// Decay `η` of the superquadric potential.
    pub eta: f64,
    /// Influence distance `d0` [m].
    #[serde(rename = "d0_m")]
    pub d0: f64,
    /// Force normalization `F0`.
    pub f0: f64,
    /// Probability `p_e` of falling back to the random direction.
    pub p_e: f64,
    /// Added to every half extent when shaping the superquadric [m]; the
    /// planner fills in its tube radius when unset.
    #[serde(rename = "inflation_m")]
    pub inflation: Option<f64>,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        Self {
            k_rep: 1.0,
            k_att: 1.0,
            k_line: 0.5,
            amplitude: 1.0,
            eta: 1.0,
            d0: 3.0,
            f0: 1.0,
            p_e: 0.2,
            inflation: None,
        }
    }
}

impl PotentialConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.d0 > 0.0 && self.f0 > 0.0) {
            return Err(Error::Config("d0 and F0 must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.p_e) {
            return Err(Error::Config(format!("p_e must lie in [0, 1], got {}", self.p_e)));
        }
        if self.inflation.is_some_and(|m| !(m >= 0.0)) {
            return Err(Error::Config("superquadric inflation must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepConfig {
    /// Base step `ε0` [m].
    #[serde(rename = "epsilon_0_m")]
    pub epsilon_0: f64,
    /// Turn-angle factor `β`.
    pub beta: f64,
    /// Minimum step fraction `τ` at a full reversal.
    pub tau: f64,
    /// Soft-min sharpness `α` [1/m].
    pub alpha_soft: f64,
    pub k_lambda: f64,
    pub s_lambda_max: f64,
}

impl Default for StepConfig {
    fn default() -> Self {
        Self {
            epsilon_0: 3.0,
            beta: 2.5,
            tau: 0.3,
            alpha_soft: 8.0,
            k_lambda: 1.0,
            s_lambda_max: 0.5,
        }
    }
}

impl StepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon_0 > 0.0 && self.alpha_soft > 0.0 && self.s_lambda_max > 0.0) {
            return Err(Error::Config("epsilon_0, alpha_soft and s_lambda_max must be positive".into()));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::Config(format!("tau must lie in (0, 1], got {}", self.tau)));
        }
        Ok(())
    }
}

/// Local state at the node being expanded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendContext {
    pub xi_near: Vec3,
    pub xi_parent: Option<Vec3>,
    /// Obstacle density of the subregion containing `xi_near`.
    pub region_density: f64,
    /// Mean obstacle density over all subregions.
    pub mean_density: f64,
    /// Clearance at `xi_near`.
    pub d_obs: f64,
}

impl ExtendContext {
    /// Unit heading of the edge into `xi_near`, if it has a parent.
    pub fn incoming(&self) -> Option<Vec3> {
        self.xi_parent
            .map(|p| self.xi_near - p)
            .filter(|v| v.norm() > 0.0)
            .map(|v| v.normalize())
    }
}

/// Unit vector from `xi_near` toward `xi_rand`.
pub fn rand_direction(xi_near: &Vec3, xi_rand: &Vec3) -> Result<Vec3> {
    let v = xi_rand - xi_near;
    let n = v.norm();
    if !(n > 0.0) {
        return Err(Error::Degenerate("sample coincides with the nearest node".into()));
    }
    Ok(v / n)
}

/// Superquadric value of `obs` grown by the configured inflation.
fn shaped_value(obs: &Obstacle, p: &Vec3, cfg: &PotentialConfig) -> f64 {
    match cfg.inflation {
        Some(m) if m > 0.0 => {
            let grown = Obstacle {
                half_extents: obs.half_extents.add_scalar(m),
                ..*obs
            };
            superquadric_value(&grown, p)
        }
        _ => superquadric_value(obs, p),
    }
}

fn obstacle_potential(obs: &Obstacle, p: &Vec3, cfg: &PotentialConfig) -> f64 {
    let c = shaped_value(obs, p, cfg);
    if c > 0.0 {
        cfg.amplitude * (-cfg.eta * c).exp() / c
    } else {
        0.0
    }
}

/// Obstacles that contribute repulsion at `p`: outside the (grown)
/// superquadric and with surface within `d0`.
fn active_obstacles<'a>(map: &'a EnvironmentMap, p: &Vec3, cfg: &PotentialConfig) -> Vec<&'a Obstacle> {
    map.obstacles()
        .iter()
        .filter(|o| o.distance(p) <= cfg.d0 && shaped_value(o, p, cfg) > 0.0)
        .collect()
}

/// Summed superquadric potential `U` at `p`.
pub fn potential(map: &EnvironmentMap, p: &Vec3, cfg: &PotentialConfig) -> f64 {
    active_obstacles(map, p, cfg)
        .into_iter()
        .map(|o| obstacle_potential(o, p, cfg))
        .sum()
}

/// Central finite-difference gradient of `U` at `p` with step `h`; the
/// contributing obstacle set is fixed at `p`.
pub fn potential_gradient(map: &EnvironmentMap, p: &Vec3, cfg: &PotentialConfig, h: f64) -> Vec3 {
    let active = active_obstacles(map, p, cfg);
    if active.is_empty() {
        return Vec3::zeros();
    }
    let u = |q: &Vec3| active.iter().map(|o| obstacle_potential(o, q, cfg)).sum::<f64>();
    Vec3::from_fn(|i, _| {
        let mut e = Vec3::zeros();
        e[i] = h;
        (u(&(p + e)) - u(&(p - e))) / (2.0 * h)
    })
}

/// Line-constraint force `−K_line (v − (vᵀℓ)ℓ)` at `xi`, where
/// `v = xi − xi_parent` and `ℓ` is the unit heading from `xi_parent` to
/// `xi_near`.
pub fn line_force(xi: &Vec3, xi_near: &Vec3, xi_parent: &Vec3, k_line: f64) -> Vec3 {
    let l = xi_near - xi_parent;
    let n = l.norm();
    if !(n > 0.0) {
        return Vec3::zeros();
    }
    let l = l / n;
    let v = xi - xi_parent;
    -k_line * (v - l * v.dot(&l))
}

/// Unit direction and magnitude of the total field `F_att + F_rep + F_line`.
///
/// Attraction and repulsion are evaluated at `xi_near`; the line term is
/// measured at `line_probe`, the point a plain step would reach.
pub fn potential_direction(
    ctx: &ExtendContext,
    line_probe: &Vec3,
    goal: &Vec3,
    map: &EnvironmentMap,
    cfg: &PotentialConfig,
) -> Result<(Vec3, f64)> {
    let xi = ctx.xi_near;
    let f_att = cfg.k_att * (goal - xi);
    let f_rep = -cfg.k_rep * potential_gradient(map, &xi, cfg, GRADIENT_STEP);
    let f_line = match ctx.xi_parent {
        Some(parent) => line_force(line_probe, &xi, &parent, cfg.k_line),
        None => Vec3::zeros(),
    };
    let total = f_att + f_rep + f_line;
    let norm = total.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::DegenerateField(xi.into()));
    }
    Ok((total / norm, norm))
}

/// Adaptive fusion weight `clamp((d0 − d_obs)/d0) · F/(F + F0)`.
pub fn fusion_weight(d_obs: f64, f_norm: f64, cfg: &PotentialConfig) -> f64 {
    let proximity = ((cfg.d0 - d_obs) / cfg.d0).clamp(0.0, 1.0);
    let strength = if f_norm.is_infinite() { 1.0 } else { f_norm / (f_norm + cfg.f0) };
    (proximity * strength).clamp(0.0, 1.0)
}

/// With probability `p_e` the random direction, else the normalized blend.
pub fn choose_direction<R: Rng + ?Sized>(u_rand: &Vec3, u_f: &Vec3, alpha: f64, p_e: f64, rng: &mut R) -> Vec3 {
    let p: f64 = rng.random();
    if p < p_e || alpha == 0.0 {
        return *u_rand;
    }
    if alpha == 1.0 {
        return *u_f;
    }
    let blend = alpha * u_f + (1.0 - alpha) * u_rand;
    let n = blend.norm();
    if n > 1e-12 {
        blend / n
    } else {
        *u_rand
    }
}

/// Turn-angle step `ε0(τ + (1 − τ)e^{−βθ/π})`.
pub fn step_angle(eps0: f64, theta: f64, cfg: &StepConfig) -> f64 {
    eps0 * (cfg.tau + (1.0 - cfg.tau) * (-cfg.beta * theta / PI).exp())
}

/// Density step `ε0(1 + Π(k_λ(ρ̄ − ρ_k)/(1 − ρ̄)))`, with `Π` the projection
/// onto `[−S_max, S_max]`.
pub fn step_density(eps0: f64, rho_k: f64, rho_mean: f64, cfg: &StepConfig) -> Result<f64> {
    if !(rho_mean < 1.0) {
        return Err(Error::SingularDensity(rho_mean));
    }
    let s = cfg.k_lambda * (rho_mean - rho_k) / (1.0 - rho_mean);
    Ok(eps0 * (1.0 + s.clamp(-cfg.s_lambda_max, cfg.s_lambda_max)))
}

/// Log-sum-exp soft minimum of two step lengths.
pub fn softmin(e1: f64, e2: f64, alpha: f64) -> f64 {
    let m = e1.min(e2);
    m - ((-alpha * (e1 - m)).exp() + (-alpha * (e2 - m)).exp()).ln() / alpha
}

/// Angle in `[0, π]` between two unit vectors.
pub fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    // atan2 keeps precision near 0 and π.
    a.cross(b).norm().atan2(a.dot(b))
}

/// Adaptive step length along direction `d`.
pub fn adaptive_step(ctx: &ExtendContext, d: &Vec3, cfg: &StepConfig) -> Result<f64> {
    let theta = ctx.incoming().map(|l| angle_between(&l, d)).unwrap_or(0.0);
    let e1 = step_angle(cfg.epsilon_0, theta, cfg);
    let e2 = step_density(cfg.epsilon_0, ctx.region_density, ctx.mean_density, cfg)?;
    Ok(softmin(e1, e2, cfg.alpha_soft))
}

/// Adaptive potential-guided expansion from `ctx.xi_near` toward `xi_rand`.
/// The new point is clamped to the workspace.
pub fn extend<R: Rng + ?Sized>(
    ctx: &ExtendContext,
    xi_rand: &Vec3,
    goal: &Vec3,
    map: &EnvironmentMap,
    pcfg: &PotentialConfig,
    scfg: &StepConfig,
    rng: &mut R,
) -> Result<Vec3> {
    let u_rand = rand_direction(&ctx.xi_near, xi_rand)?;
    let probe = ctx.xi_near + scfg.epsilon_0 * u_rand;
    let (u_f, alpha) = match potential_direction(ctx, &probe, goal, map, pcfg) {
        Ok((u_f, f_norm)) => (u_f, fusion_weight(ctx.d_obs, f_norm, pcfg)),
        Err(Error::DegenerateField(_)) => (u_rand, 0.0),
        Err(e) => return Err(e),
    };
    let d = choose_direction(&u_rand, &u_f, alpha, pcfg.p_e, rng);
    let eps = adaptive_step(ctx, &d, scfg)?;
    Ok(map.workspace().clamp(&(ctx.xi_near + eps * d)))
}

/// Plain RRT* expansion `ξ_near + ε0 u_rand`, clamped to the workspace.
pub fn extend_standard(xi_near: &Vec3, xi_rand: &Vec3, eps0: f64, map: &EnvironmentMap) -> Result<Vec3> {
    let u = rand_direction(xi_near, xi_rand)?;
    Ok(map.workspace().clamp(&(xi_near + eps0 * u)))
}

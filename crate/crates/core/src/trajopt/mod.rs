//! Joint trajectory and cable-tension optimization.
//!
//! The payload path is a piecewise polynomial through the planner's
//! waypoints. Its coefficients and the per-sample cable forces form one
//! convex program: a smoothness objective plus tension regularizers, subject
//! to interpolation and continuity, sampled speed and acceleration boxes,
//! force equilibrium, and per-cable tension and tilt cones.

pub mod conic;
pub mod spline;
pub mod tension;

use std::fs;
use std::path::Path;

use log::{info, warn};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynmodel::{hat, required_force, SystemParams, VerifyBounds};
use crate::env::EnvironmentMap;
use crate::error::{Error, Result};
use crate::{Mat3, Vec3, GRAVITY};

pub use conic::{solve, ConicProblem, ConicSolution, Residuals, SocConstraint, SolveSettings, SolveStatus, SparseRow};
pub use spline::{
    allocate_times, allocate_times_with, build_equalities, build_smoothness, column_scale, derivative_row, sample_times,
    segment_gram, solve_unconstrained, AxisEqualities, CoeffLayout, DerivativeRow, PolySpline, TimeAllocation,
};
pub use tension::{cone_slack, init_tensions, project_tilt_cone, tilt_angle, TensionProfile};

/// Externally supplied payload attitude and moment reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReference {
    pub r_ref: Mat3,
    pub m_ref: Vec3,
}

impl Default for MomentReference {
    fn default() -> Self {
        Self {
            r_ref: Mat3::identity(),
            m_ref: Vec3::zeros(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptConfig {
    pub smoothness_order: usize,
    pub degree: usize,
    pub samples_per_segment: usize,
    /// Speed and acceleration boxes are imposed on this finer grid.
    pub box_samples_per_segment: usize,
    pub lambda_f: f64,
    pub lambda_t: f64,
    pub lambda_share: f64,
    pub lambda_m: f64,
    #[serde(rename = "t_upper_n")]
    pub t_upper: f64,
    #[serde(rename = "t_lower_n")]
    pub t_lower: f64,
    #[serde(rename = "alpha_u_deg")]
    pub alpha_u_deg: f64,
    #[serde(rename = "v_max_mps")]
    pub v_max: f64,
    #[serde(rename = "a_max_mps2")]
    pub a_max: f64,
    #[serde(rename = "g_vec_mps2")]
    pub g_vec: Vec3,
    /// Fraction of the limits used by time allocation.
    pub cruise_fraction: f64,
    #[serde(rename = "min_segment_s")]
    pub min_segment: f64,
    /// The tilt cone is tightened by this angle during the solve [rad].
    #[serde(rename = "cone_margin_rad")]
    pub cone_margin: f64,
    /// Durations are multiplied by `stretch_factor` after an infeasible
    /// solve, at most `max_stretches` times.
    pub max_stretches: usize,
    pub stretch_factor: f64,
    /// One entry per force sample, or a single entry for all of them.
    pub moment_reference: Option<Vec<MomentReference>>,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            smoothness_order: 5,
            degree: 9,
            samples_per_segment: 10,
            box_samples_per_segment: 30,
            lambda_f: 10.0,
            lambda_t: 1.0,
            lambda_share: 1.0,
            lambda_m: 0.1,
            t_upper: 35.0,
            t_lower: 1.0,
            alpha_u_deg: 22.0,
            v_max: 2.0,
            a_max: 1.0,
            g_vec: Vec3::new(0.0, 0.0, GRAVITY),
            cruise_fraction: 0.8,
            min_segment: 0.1,
            cone_margin: 1e-6,
            max_stretches: 8,
            stretch_factor: 1.25,
            moment_reference: None,
        }
    }
}

impl OptConfig {
    pub fn alpha_u(&self) -> f64 {
        self.alpha_u_deg.to_radians()
    }

    /// Audit limits matching this configuration.
    pub fn verify_bounds(&self) -> VerifyBounds {
        VerifyBounds {
            t_upper: self.t_upper,
            t_lower: self.t_lower,
            alpha_u: self.alpha_u(),
            v_max: self.v_max,
            a_max: self.a_max,
            g_vec: self.g_vec,
            ..Default::default()
        }
    }

    pub fn time_allocation(&self) -> TimeAllocation {
        TimeAllocation {
            cruise_speed: self.cruise_fraction * self.v_max,
            accel: self.cruise_fraction * self.a_max,
            min_duration: self.min_segment,
        }
    }

    /// Smallest tension cap that can hold the payload still.
    pub fn hover_tension(&self, params: &SystemParams) -> f64 {
        params.m0 * self.g_vec.norm() / (params.cables() as f64 * self.alpha_u().cos())
    }

    pub fn validate(&self, params: &SystemParams) -> Result<()> {
        params.validate()?;
        let r = self.smoothness_order;
        if r == 0 || self.degree + 1 < 2 * r {
            return Err(Error::Config(format!("degree {} must be at least 2r−1 = {}", self.degree, 2 * r.max(1) - 1)));
        }
        if self.samples_per_segment == 0 {
            return Err(Error::Config("samples_per_segment must be positive".into()));
        }
        let weights = [self.lambda_f, self.lambda_t, self.lambda_share, self.lambda_m];
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::Config("weights must be non-negative".into()));
        }
        if !(self.v_max > 0.0 && self.a_max > 0.0 && self.t_upper > 0.0) {
            return Err(Error::Config("limits must be positive".into()));
        }
        if !(self.alpha_u_deg > 0.0 && self.alpha_u_deg < 90.0) {
            return Err(Error::Config("tilt limit must lie in (0°, 90°)".into()));
        }
        if !(self.cruise_fraction > 0.0 && self.cruise_fraction <= 1.0 && self.stretch_factor > 1.0) {
            return Err(Error::Config("cruise_fraction must lie in (0, 1] and stretch_factor exceed 1".into()));
        }
        Ok(())
    }
}

/// Length of the decision vector `[c; F]`.
pub fn decision_size(segments: usize, degree: usize, samples: usize, cables: usize) -> usize {
    3 * segments * (degree + 1) + 3 * samples * cables
}

/// A conic program together with the maps needed to read its solution.
#[derive(Debug, Clone)]
pub struct Assembled {
    pub problem: ConicProblem,
    pub layout: CoeffLayout,
    pub knots: Vec<f64>,
    pub times: Vec<f64>,
    pub cables: usize,
    pub equalities: AxisEqualities,
}

impl Assembled {
    pub fn force_index(&self, k: usize, i: usize, d: usize) -> usize {
        self.layout.len() + (k * self.cables + i) * 3 + d
    }

    pub fn unpack(&self, x: &[f64], degree: usize) -> (PolySpline, TensionProfile) {
        let spline = PolySpline::from_vector(self.knots.clone(), degree, &x[..self.layout.len()]);
        let forces = (0..self.times.len())
            .map(|k| {
                (0..self.cables)
                    .map(|i| Vec3::from_fn(|d, _| x[self.force_index(k, i, d)]))
                    .collect()
            })
            .collect();
        (
            spline,
            TensionProfile {
                times: self.times.clone(),
                forces,
            },
        )
    }

    fn accel_rows(&self, degree: usize) -> Result<Vec<DerivativeRow>> {
        self.times.iter().map(|t| derivative_row(&self.knots, degree, *t, 2)).collect()
    }
}

fn moment_refs(cfg: &OptConfig, samples: usize) -> Result<Vec<MomentReference>> {
    match &cfg.moment_reference {
        None => Ok(vec![MomentReference::default(); samples]),
        Some(v) if v.len() == 1 => Ok(vec![v[0]; samples]),
        Some(v) if v.len() == samples => Ok(v.clone()),
        Some(v) => Err(Error::Config(format!("{} moment references for {samples} samples", v.len()))),
    }
}

/// Builds the joint program over `waypoints` with fixed knot times.
/// `corridor`, when given, holds one half-width per segment: the position
/// at every box sample of segment `j` is kept inside a segment-aligned box
/// whose points all lie within `corridor[j]` of the segment.
pub fn assemble(waypoints: &[Vec3], knots: &[f64], cfg: &OptConfig, params: &SystemParams, corridor: Option<&[f64]>) -> Result<Assembled> {
    cfg.validate(params)?;
    if let Some(c) = corridor {
        if c.len() + 1 != waypoints.len() || c.iter().any(|h| !(*h > 0.0)) {
            return Err(Error::Config("corridor needs one positive half-width per segment".into()));
        }
    }
    let layout = CoeffLayout {
        segments: knots.len() - 1,
        degree: cfg.degree,
    };
    let r = cfg.smoothness_order;
    let equalities = build_equalities(waypoints, knots, &layout, r)?;
    let times = sample_times(knots, cfg.samples_per_segment);
    let cables = params.cables();
    let n = decision_size(layout.segments, cfg.degree, times.len(), cables);
    let mut problem = ConicProblem::new(n);
    let mut out = Assembled {
        problem: ConicProblem::new(0),
        layout,
        knots: knots.to_vec(),
        times,
        cables,
        equalities,
    };

    let mut scale = column_scale(knots, &layout);
    scale.resize(n, 1.0);
    problem.var_scale = scale;

    problem.p.extend(build_smoothness(knots, &layout, r));

    let ns = out.times.len();
    let accel = out.accel_rows(cfg.degree)?;
    let m0 = params.m0;
    let share = m0 / cables as f64;

    let mut rows = Vec::new();
    for i in 0..cables {
        for k in 0..ns.saturating_sub(1) {
            for d in 0..3 {
                rows.push(vec![(out.force_index(k + 1, i, d), 1.0), (out.force_index(k, i, d), -1.0)]);
            }
        }
    }
    problem.add_least_squares(&rows, &vec![0.0; rows.len()], cfg.lambda_f);

    let rows: Vec<SparseRow> = (0..ns * cables * 3).map(|j| vec![(layout.len() + j, 1.0)]).collect();
    problem.add_least_squares(&rows, &vec![0.0; rows.len()], cfg.lambda_t);

    let (mut rows, mut offs) = (Vec::new(), Vec::new());
    for (k, arow) in accel.iter().enumerate() {
        for i in 0..cables {
            for d in 0..3 {
                let mut row = vec![(out.force_index(k, i, d), 1.0)];
                row.extend(arow.entries(d, &layout).into_iter().map(|(j, w)| (j, -share * w)));
                rows.push(row);
                offs.push(-share * cfg.g_vec[d]);
            }
        }
    }
    problem.add_least_squares(&rows, &offs, cfg.lambda_share);

    let refs = moment_refs(cfg, ns)?;
    let (mut rows, mut offs) = (Vec::new(), Vec::new());
    for (k, mref) in refs.iter().enumerate() {
        let maps: Vec<Mat3> = params.attachments.iter().map(|rho| hat(rho) * mref.r_ref.transpose()).collect();
        for e in 0..3 {
            let mut row = Vec::new();
            for (i, m) in maps.iter().enumerate() {
                for d in 0..3 {
                    if m[(e, d)] != 0.0 {
                        row.push((out.force_index(k, i, d), m[(e, d)]));
                    }
                }
            }
            rows.push(row);
            offs.push(-mref.m_ref[e]);
        }
    }
    problem.add_least_squares(&rows, &offs, cfg.lambda_m);

    let per = layout.per_axis();
    for axis in 0..3 {
        for (row, b) in out.equalities.rows.iter().zip(&out.equalities.rhs) {
            problem.add_eq(row.iter().map(|(j, v)| (axis * per + j, *v)).collect(), b[axis], "waypoint_continuity");
        }
    }
    for (k, arow) in accel.iter().enumerate() {
        for d in 0..3 {
            let mut row: SparseRow = (0..cables).map(|i| (out.force_index(k, i, d), 1.0)).collect();
            row.extend(arow.entries(d, &layout).into_iter().map(|(j, w)| (j, -m0 * w)));
            problem.add_eq(row, m0 * cfg.g_vec[d], "equilibrium");
        }
    }

    for t in &sample_times(knots, cfg.box_samples_per_segment.max(cfg.samples_per_segment)) {
        for (q, bound, class) in [(1, cfg.v_max, "velocity"), (2, cfg.a_max, "acceleration")] {
            let drow = derivative_row(knots, cfg.degree, *t, q)?;
            for d in 0..3 {
                let e = drow.entries(d, &layout);
                problem.add_ineq(e.clone(), bound, class);
                problem.add_ineq(e.into_iter().map(|(j, w)| (j, -w)).collect(), bound, class);
            }
        }
        if let Some(widths) = corridor {
            let prow = derivative_row(knots, cfg.degree, *t, 0)?;
            let s = prow.segment;
            let (w0, w1) = (waypoints[s], waypoints[s + 1]);
            // A box of half-width h/√3 around the segment stays within h of it.
            let h = widths[s] / 3f64.sqrt();
            let len = (w1 - w0).norm();
            let [along, n1, n2] = segment_frame(&w0, &w1);
            for (dir, lo, hi) in [(along, -h, len + h), (n1, -h, h), (n2, -h, h)] {
                let mut row = Vec::new();
                for axis in 0..3 {
                    if dir[axis] != 0.0 {
                        row.extend(prow.entries(axis, &layout).into_iter().map(|(j, w)| (j, dir[axis] * w)));
                    }
                }
                let base = dir.dot(&w0);
                problem.add_ineq(row.iter().map(|&(j, w)| (j, -w)).collect(), -(base + lo), "corridor");
                problem.add_ineq(row, base + hi, "corridor");
            }
        }
    }

    let cos_tight = (cfg.alpha_u() - cfg.cone_margin).max(0.0).cos();
    let t_cap = cfg.t_upper * (1.0 - 1e-7);
    for k in 0..ns {
        for i in 0..cables {
            let f: Vec<SparseRow> = (0..3).map(|d| vec![(out.force_index(k, i, d), 1.0)]).collect();
            problem.socs.push(SocConstraint {
                a: f.clone(),
                b: vec![0.0; 3],
                c: Vec::new(),
                d: t_cap,
                class: "tension",
            });
            problem.socs.push(SocConstraint {
                a: f,
                b: vec![0.0; 3],
                c: vec![(out.force_index(k, i, 2), 1.0 / cos_tight)],
                d: 0.0,
                class: "tilt",
            });
        }
    }

    out.problem = problem;
    Ok(out)
}

/// Unit segment direction followed by two unit normals; an arbitrary
/// orthonormal frame for a degenerate segment.
fn segment_frame(w0: &Vec3, w1: &Vec3) -> [Vec3; 3] {
    let d = w1 - w0;
    let d = if d.norm() > 0.0 { d.normalize() } else { Vec3::x() };
    let helper = if d.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let n1 = d.cross(&helper).normalize();
    let n2 = d.cross(&n1);
    [d, n1, n2]
}

/// Sample spacing used to measure segment clearance [m].
pub const CORRIDOR_RESOLUTION: f64 = 0.1;

/// Smallest half-width kept for a segment whose clearance barely exceeds
/// the tube radius [m].
pub const MIN_CORRIDOR_HALF_WIDTH: f64 = 0.02;

/// Per-segment corridor half-widths: the smallest clearance along each
/// segment minus `r_min`, floored at [`MIN_CORRIDOR_HALF_WIDTH`]. Any point
/// within the half-width of its segment then keeps clearance of about
/// `r_min` or more.
pub fn corridor_half_widths(waypoints: &[Vec3], map: &EnvironmentMap, r_min: f64, resolution: f64) -> Vec<f64> {
    waypoints
        .windows(2)
        .map(|w| {
            let len = (w[1] - w[0]).norm();
            let steps = (len / resolution).ceil().max(1.0) as usize;
            let spacing = len / steps as f64;
            let c = (0..=steps)
                .map(|k| map.clearance_unchecked(&(w[0] + (w[1] - w[0]) * (k as f64 / steps as f64))))
                .fold(f64::INFINITY, f64::min);
            // Clearance is 1-Lipschitz, so between samples it can dip by half the spacing.
            (c - 0.5 * spacing - r_min).max(MIN_CORRIDOR_HALF_WIDTH)
        })
        .collect()
}

/// Per-term objective values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveTerms {
    pub smoothness: f64,
    pub force_rate: f64,
    pub force_magnitude: f64,
    pub sharing: f64,
    pub moment: f64,
}

impl ObjectiveTerms {
    pub fn total(&self) -> f64 {
        self.smoothness + self.force_rate + self.force_magnitude + self.sharing + self.moment
    }
}

/// Evaluates each objective term directly from a spline and its tensions.
pub fn objective_terms(
    spline: &PolySpline,
    tensions: &TensionProfile,
    cfg: &OptConfig,
    params: &SystemParams,
) -> Result<ObjectiveTerms> {
    let c = spline.to_vector();
    let smoothness = 0.5
        * build_smoothness(&spline.knots, &spline.layout(), cfg.smoothness_order)
            .iter()
            .map(|&(i, j, v)| if i == j { v * c[i] * c[i] } else { 2.0 * v * c[i] * c[j] })
            .sum::<f64>();
    let fs = &tensions.forces;
    let n_c = params.cables() as f64;
    let mut t = ObjectiveTerms {
        smoothness,
        ..Default::default()
    };
    for k in 0..fs.len() {
        let a = spline.eval(tensions.times[k], 2)?;
        let r = required_force(&a, params.m0, &cfg.g_vec);
        for (i, f) in fs[k].iter().enumerate() {
            t.force_magnitude += cfg.lambda_t * f.norm_squared();
            t.sharing += cfg.lambda_share * (f - r / n_c).norm_squared();
            if k + 1 < fs.len() {
                t.force_rate += cfg.lambda_f * (fs[k + 1][i] - f).norm_squared();
            }
        }
    }
    let refs = moment_refs(cfg, fs.len())?;
    for (forces, mref) in fs.iter().zip(&refs) {
        let m = crate::dynmodel::payload_moment(forces, &mref.r_ref, &params.attachments)?;
        t.moment += cfg.lambda_m * (m - mref.m_ref).norm_squared();
    }
    Ok(t)
}

/// Constraint activity of a returned solution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolutionAudit {
    pub waypoint_continuity_residual: f64,
    pub continuity_relative: f64,
    pub equilibrium_residual_n: f64,
    pub min_cone_slack: f64,
    pub max_tension_n: f64,
    pub min_tension_n: f64,
    pub max_tilt_rad: f64,
    pub max_speed_component_mps: f64,
    pub max_accel_component_mps2: f64,
}

pub fn audit(
    spline: &PolySpline,
    tensions: &TensionProfile,
    equalities: &AxisEqualities,
    cfg: &OptConfig,
    params: &SystemParams,
) -> Result<SolutionAudit> {
    let mut a = SolutionAudit {
        waypoint_continuity_residual: equalities.residual(&spline.to_vector(), &spline.layout()),
        continuity_relative: spline.continuity_error(cfg.smoothness_order),
        max_tension_n: tensions.max_tension(),
        min_tension_n: tensions.min_tension(),
        max_tilt_rad: tensions.max_tilt(),
        min_cone_slack: f64::INFINITY,
        ..Default::default()
    };
    for (t, forces) in tensions.times.iter().zip(&tensions.forces) {
        let acc = spline.eval(*t, 2)?;
        let vel = spline.eval(*t, 1)?;
        a.max_speed_component_mps = a.max_speed_component_mps.max(vel.amax());
        a.max_accel_component_mps2 = a.max_accel_component_mps2.max(acc.amax());
        let sum: Vec3 = forces.iter().sum();
        a.equilibrium_residual_n = a.equilibrium_residual_n.max((sum - required_force(&acc, params.m0, &cfg.g_vec)).norm());
        for f in forces {
            a.min_cone_slack = a.min_cone_slack.min(cone_slack(f, cfg.alpha_u()));
        }
    }
    Ok(a)
}

/// Summary written next to an optimized trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptReport {
    pub status: SolveStatus,
    pub solver_status: String,
    pub iterations: u32,
    pub attempts: usize,
    /// Product of all duration stretches applied.
    pub time_stretch: f64,
    pub segments: usize,
    pub samples: usize,
    pub decision_size: usize,
    pub duration_s: f64,
    pub objective: f64,
    pub terms: ObjectiveTerms,
    pub solver_residuals: Residuals,
    pub audit: SolutionAudit,
    /// Largest tilt of the equal-split initial allocation before projection.
    pub initial_max_tilt_rad: f64,
    /// Narrowest corridor imposed, when the solve was kept inside a tube.
    pub min_corridor_half_width_m: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub spline: PolySpline,
    pub tensions: TensionProfile,
}

impl Trajectory {
    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    /// Writes `t`, position, velocity, acceleration and per-cable forces at
    /// every force sample.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header: Vec<String> = ["t", "x", "y", "z", "vx", "vy", "vz", "ax", "ay", "az"].iter().map(|s| s.to_string()).collect();
        for i in 0..self.tensions.cables() {
            for d in ["x", "y", "z"] {
                header.push(format!("f{}_{d}", i + 1));
            }
        }
        w.write_record(&header)?;
        for (t, forces) in self.tensions.times.iter().zip(&self.tensions.forces) {
            let mut rec = vec![t.to_string()];
            for q in 0..3 {
                let v = self.spline.eval(*t, q)?;
                rec.extend(v.iter().map(|x| x.to_string()));
            }
            for f in forces {
                rec.extend(f.iter().map(|x| x.to_string()));
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimized {
    pub trajectory: Trajectory,
    pub initial_tensions: TensionProfile,
    pub report: OptReport,
}

/// Restores exact feasibility of the linear equalities after the solve:
/// minimum-norm correction of the coefficients (in scaled variables), then
/// an equal split of the remaining equilibrium error across cables.
fn polish(asm: &Assembled, x: &mut [f64], cfg: &OptConfig, params: &SystemParams) -> Result<()> {
    let layout = asm.layout;
    let per = layout.per_axis();
    let scale = column_scale(&asm.knots, &layout);
    let d = DVector::from_column_slice(&scale[..per]);
    let a = asm.equalities.dense(per) * DMatrix::from_diagonal(&d);
    let gram = &a * a.transpose();
    let chol = gram.clone().cholesky();
    for axis in 0..3 {
        let y = DVector::from_fn(per, |j, _| x[axis * per + j] / d[j]);
        let b = DVector::from_fn(asm.equalities.len(), |i, _| asm.equalities.rhs[i][axis]);
        let res = &a * &y - b;
        let lam = match &chol {
            Some(c) => c.solve(&res),
            None => gram
                .clone()
                .full_piv_lu()
                .solve(&res)
                .ok_or_else(|| Error::IllPosed("singular equality Gram matrix".into()))?,
        };
        let y = y - a.transpose() * lam;
        for j in 0..per {
            x[axis * per + j] = y[j] * d[j];
        }
    }
    let accel = asm.accel_rows(cfg.degree)?;
    let n_c = asm.cables as f64;
    for (k, row) in accel.iter().enumerate() {
        let acc = Vec3::from_fn(|ax, _| row.apply(x, ax, &layout));
        let r = required_force(&acc, params.m0, &cfg.g_vec);
        let sum: Vec3 = (0..asm.cables).map(|i| Vec3::from_fn(|dd, _| x[asm.force_index(k, i, dd)])).sum();
        let fix = (r - sum) / n_c;
        for i in 0..asm.cables {
            for dd in 0..3 {
                x[asm.force_index(k, i, dd)] += fix[dd];
            }
        }
    }
    Ok(())
}

/// Full pipeline from waypoints to an optimized trajectory.
pub fn optimize(waypoints: &[Vec3], cfg: &OptConfig, params: &SystemParams) -> Result<Optimized> {
    optimize_impl(waypoints, cfg, params, None)
}

/// [`optimize`] with the position kept inside a corridor around each path
/// segment, sized from the clearance in `map` so that the formation of
/// radius `r_min` stays collision-free.
pub fn optimize_in_tube(waypoints: &[Vec3], map: &EnvironmentMap, r_min: f64, cfg: &OptConfig, params: &SystemParams) -> Result<Optimized> {
    optimize_impl(waypoints, cfg, params, Some((map, r_min)))
}

fn optimize_impl(waypoints: &[Vec3], cfg: &OptConfig, params: &SystemParams, tube: Option<(&EnvironmentMap, f64)>) -> Result<Optimized> {
    cfg.validate(params)?;
    let hover = cfg.hover_tension(params);
    if !(cfg.t_upper > hover) {
        return Err(Error::Infeasible {
            class: "tension".into(),
            detail: format!("tension cap {} N cannot hold the payload (needs more than {hover:.3} N per cable)", cfg.t_upper),
        });
    }
    let pts = if waypoints.len() == 1 { vec![waypoints[0], waypoints[0]] } else { waypoints.to_vec() };
    let (pts, mut knots) = allocate_times_with(&pts, &cfg.time_allocation())?;
    let corridor = tube.map(|(map, r_min)| corridor_half_widths(&pts, map, r_min, CORRIDOR_RESOLUTION));
    let mut warnings = Vec::new();
    let mut stretch = 1.0;
    let settings = SolveSettings::default();
    for attempt in 0..=cfg.max_stretches {
        let spline0 = solve_unconstrained(&pts, &knots, cfg.degree, cfg.smoothness_order)?;
        let times = sample_times(&knots, cfg.samples_per_segment);
        let r0: Vec<Vec3> = times
            .iter()
            .map(|t| spline0.eval(*t, 2).map(|a| required_force(&a, params.m0, &cfg.g_vec)))
            .collect::<Result<_>>()?;
        let initial_max_tilt = r0.iter().map(tilt_angle).fold(0.0, f64::max);
        let initial = init_tensions(&times, &r0, params.cables(), cfg.alpha_u())?;

        let asm = assemble(&pts, &knots, cfg, params, corridor.as_deref())?;
        let sol = solve(&asm.problem, &settings)?;
        if sol.status == SolveStatus::Infeasible {
            if attempt == cfg.max_stretches {
                return Err(Error::Infeasible {
                    class: sol.infeasible_classes.join(","),
                    detail: format!("no feasible trajectory after {} duration stretches", cfg.max_stretches),
                });
            }
            info!("infeasible at stretch {stretch:.3}; lengthening segment durations");
            stretch *= cfg.stretch_factor;
            let t0 = knots[0];
            knots = knots.iter().map(|t| t0 + (t - t0) * cfg.stretch_factor).collect();
            continue;
        }
        if sol.status == SolveStatus::ReducedAccuracy {
            warnings.push("solver reached reduced accuracy only".to_string());
        }
        let mut x = sol.x.clone();
        polish(&asm, &mut x, cfg, params)?;
        let (spline, tensions) = asm.unpack(&x, cfg.degree);
        let terms = objective_terms(&spline, &tensions, cfg, params)?;
        let sol_audit = audit(&spline, &tensions, &asm.equalities, cfg, params)?;
        if sol_audit.min_tension_n < cfg.t_lower {
            let msg = format!("minimum tension {:.3} N below {} N", sol_audit.min_tension_n, cfg.t_lower);
            warn!("{msg}");
            warnings.push(msg);
        }
        if stretch > 1.0 {
            warnings.push(format!("segment durations stretched by {stretch:.4}"));
        }
        let report = OptReport {
            status: sol.status,
            solver_status: sol.solver_status.clone(),
            iterations: sol.iterations,
            attempts: attempt + 1,
            time_stretch: stretch,
            segments: asm.layout.segments,
            samples: asm.times.len(),
            decision_size: asm.problem.n,
            duration_s: spline.duration(),
            objective: asm.problem.objective(&x),
            terms,
            solver_residuals: sol.residuals,
            audit: sol_audit,
            initial_max_tilt_rad: initial_max_tilt,
            min_corridor_half_width_m: corridor.as_ref().map(|c| c.iter().copied().fold(f64::INFINITY, f64::min)),
            warnings,
        };
        return Ok(Optimized {
            trajectory: Trajectory { spline, tensions },
            initial_tensions: initial,
            report,
        });
    }
    unreachable!("the stretch loop always returns")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynmodel::{verify, VerifyBounds};
    use crate::env::{EnvironmentMap, Workspace};

    fn params() -> SystemParams {
        SystemParams::default()
    }

    fn bounds(cfg: &OptConfig) -> VerifyBounds {
        cfg.verify_bounds()
    }

    fn open_map() -> EnvironmentMap {
        EnvironmentMap::new(Workspace::new(Vec3::repeat(-20.0), Vec3::repeat(40.0)).unwrap(), Vec::new()).unwrap()
    }

    #[test]
    fn decision_size_formula() {
        assert_eq!(decision_size(4, 9, 40, 3), 480);
    }

    #[test]
    fn hover_splits_weight_evenly() {
        let p = Vec3::new(1.0, 2.0, 3.0);
        let cfg = OptConfig::default();
        let out = optimize(&[p, p], &cfg, &params()).unwrap();
        let share = params().m0 * GRAVITY / 3.0;
        assert!((share - 16.35).abs() < 1e-12);
        for forces in &out.trajectory.tensions.forces {
            for f in forces {
                assert!((f - Vec3::new(0.0, 0.0, share)).norm() < 1e-6, "{f:?}");
            }
        }
        assert!(out.report.audit.max_tilt_rad < 1e-6);
        assert!((out.trajectory.spline.eval(0.05, 0).unwrap() - p).norm() < 1e-9);
    }

    #[test]
    fn hover_optimum_beats_unequal_splits() {
        let p = Vec3::new(0.0, 0.0, 5.0);
        let cfg = OptConfig::default();
        let pr = params();
        let (pts, knots) = allocate_times_with(&[p, p], &cfg.time_allocation()).unwrap();
        let asm = assemble(&pts, &knots, &cfg, &pr, None).unwrap();
        let sol = solve(&asm.problem, &SolveSettings::default()).unwrap();
        let weight = pr.m0 * GRAVITY;
        let at = |f1: f64| {
            let mut x = sol.x.clone();
            for k in 0..asm.times.len() {
                for i in 0..3 {
                    let fz = if i == 0 { f1 } else { (weight - f1) / 2.0 };
                    x[asm.force_index(k, i, 0)] = 0.0;
                    x[asm.force_index(k, i, 1)] = 0.0;
                    x[asm.force_index(k, i, 2)] = fz;
                }
            }
            asm.problem.objective(&x)
        };
        let best = at(weight / 3.0);
        for f1 in [0.0, 5.0, 10.0, 15.0, 16.0, 16.7, 20.0, 30.0, 49.05] {
            assert!(at(f1) >= best - 1e-9, "f1 = {f1}");
        }
        assert!((sol.objective - best).abs() < 1e-5 * best.abs().max(1.0));
    }

    #[test]
    fn optimized_path_passes_verification() {
        let pts = [
            Vec3::new(0.0, 0.0, 5.0),
            Vec3::new(6.0, 0.0, 5.0),
            Vec3::new(6.0, 6.0, 6.0),
            Vec3::new(12.0, 8.0, 5.0),
        ];
        let cfg = OptConfig::default();
        let out = optimize(&pts, &cfg, &params()).unwrap();
        let r = &out.report;
        assert!(matches!(r.status, SolveStatus::Optimal | SolveStatus::ReducedAccuracy));
        assert_eq!(r.decision_size, decision_size(3, 9, 31, 3));
        assert!(r.audit.waypoint_continuity_residual < 1e-8);
        assert!(r.audit.continuity_relative < 1e-8);
        assert!(r.audit.equilibrium_residual_n < 1e-9);
        assert!(r.audit.min_cone_slack >= -1e-9);
        assert!(r.audit.max_tension_n <= cfg.t_upper);
        assert!((r.terms.total() - r.objective).abs() < 1e-6 * r.objective.max(1.0));
        for (k, p) in pts.iter().enumerate() {
            let t = out.trajectory.spline.knots[k];
            assert!((out.trajectory.spline.eval(t, 0).unwrap() - p).norm() < 1e-8);
        }
        let rep = verify(&out.trajectory.spline, &out.trajectory.tensions, &params(), &bounds(&cfg), &open_map());
        assert!(rep.pass, "{:?}", rep.failures);
    }

    #[test]
    fn weak_cables_are_rejected_early() {
        let cfg = OptConfig {
            t_upper: 10.0,
            ..Default::default()
        };
        match optimize(&[Vec3::zeros(), Vec3::x()], &cfg, &params()) {
            Err(Error::Infeasible { class, .. }) => assert_eq!(class, "tension"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tight_tilt_limit_stretches_time() {
        let pts = [Vec3::zeros(), Vec3::new(4.0, 0.0, 0.0), Vec3::new(4.0, 4.0, 0.0)];
        let cfg = OptConfig {
            alpha_u_deg: 2.0,
            ..Default::default()
        };
        let out = optimize(&pts, &cfg, &params()).unwrap();
        assert!(out.report.time_stretch > 1.0);
        assert!(out.report.audit.max_tilt_rad <= cfg.alpha_u() + 1e-9);
    }

    #[test]
    fn trajectory_round_trips_through_json_and_csv() {
        let out = optimize(&[Vec3::zeros(), Vec3::new(2.0, 0.0, 0.0)], &OptConfig::default(), &params()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        out.trajectory.save_json(dir.path().join("t.json")).unwrap();
        let back = Trajectory::load_json(dir.path().join("t.json")).unwrap();
        assert_eq!(back, out.trajectory);
        out.trajectory.write_csv(dir.path().join("t.csv")).unwrap();
        let text = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
        assert_eq!(text.lines().count(), out.trajectory.tensions.samples() + 1);
        assert!(text.starts_with("t,x,y,z,vx,vy,vz,ax,ay,az,f1_x"));
    }
}

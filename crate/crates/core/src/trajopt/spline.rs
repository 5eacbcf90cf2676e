//! Piecewise-polynomial trajectories in a per-segment monomial basis.

use log::warn;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Vec3;

/// Index map of the stacked coefficient vector `c`: axis-major, then
/// segment, then power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoeffLayout {
    pub segments: usize,
    pub degree: usize,
}

impl CoeffLayout {
    pub fn per_segment(&self) -> usize {
        self.degree + 1
    }

    pub fn per_axis(&self) -> usize {
        self.segments * self.per_segment()
    }

    pub fn len(&self) -> usize {
        3 * self.per_axis()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, axis: usize, segment: usize, power: usize) -> usize {
        axis * self.per_axis() + segment * self.per_segment() + power
    }
}

/// Falling factorial `j!/(j−q)!`, zero when `q > j`.
pub fn falling(j: usize, q: usize) -> f64 {
    if q > j {
        return 0.0;
    }
    ((j - q + 1)..=j).map(|v| v as f64).product()
}

/// Weights `w_j` with `Σ w_j c_j = d^q/dτ^q Σ c_j τ^j`.
pub fn monomial_derivative(degree: usize, tau: f64, q: usize) -> Vec<f64> {
    (0..=degree)
        .map(|j| if j < q { 0.0 } else { falling(j, q) * tau.powi((j - q) as i32) })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolySpline {
    /// Knot times `t_0 < … < t_S` [s].
    pub knots: Vec<f64>,
    pub degree: usize,
    /// `coeffs[s][j]` multiplies `(t − t_s)^j` on segment `s`.
    pub coeffs: Vec<Vec<Vec3>>,
}

impl PolySpline {
    pub fn segments(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn layout(&self) -> CoeffLayout {
        CoeffLayout {
            segments: self.segments(),
            degree: self.degree,
        }
    }

    pub fn start_time(&self) -> f64 {
        self.knots[0]
    }

    pub fn end_time(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    pub fn duration(&self) -> f64 {
        self.end_time() - self.start_time()
    }

    /// Unpacks a stacked coefficient vector.
    pub fn from_vector(knots: Vec<f64>, degree: usize, c: &[f64]) -> Self {
        let layout = CoeffLayout {
            segments: knots.len() - 1,
            degree,
        };
        let coeffs = (0..layout.segments)
            .map(|s| {
                (0..=degree)
                    .map(|j| Vec3::from_fn(|a, _| c[layout.index(a, s, j)]))
                    .collect()
            })
            .collect();
        Self { knots, degree, coeffs }
    }

    pub fn to_vector(&self) -> Vec<f64> {
        let layout = self.layout();
        let mut c = vec![0.0; layout.len()];
        for (s, seg) in self.coeffs.iter().enumerate() {
            for (j, v) in seg.iter().enumerate() {
                for a in 0..3 {
                    c[layout.index(a, s, j)] = v[a];
                }
            }
        }
        c
    }

    /// `q`-th derivative on segment `s` at local time `tau`.
    pub fn eval_local(&self, s: usize, tau: f64, q: usize) -> Vec3 {
        let w = monomial_derivative(self.degree, tau, q);
        self.coeffs[s].iter().zip(&w).map(|(c, w)| c * *w).sum()
    }

    /// `q`-th derivative at time `t`.
    pub fn eval(&self, t: f64, q: usize) -> Result<Vec3> {
        let (s, tau) = locate(&self.knots, t)?;
        Ok(self.eval_local(s, tau, q))
    }

    /// Largest jump of derivatives `0..orders` across interior knots,
    /// relative to `max(1, |value|)`.
    pub fn continuity_error(&self, orders: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for s in 1..self.segments() {
            let dt = self.knots[s] - self.knots[s - 1];
            for q in 0..orders {
                let left = self.eval_local(s - 1, dt, q);
                let right = self.eval_local(s, 0.0, q);
                let scale = left.amax().max(right.amax()).max(1.0);
                worst = worst.max((left - right).amax() / scale);
            }
        }
        worst
    }
}

/// Segment index and local time of `t`; `t_S` belongs to the last segment.
pub fn locate(knots: &[f64], t: f64) -> Result<(usize, f64)> {
    let (t0, tn) = (knots[0], *knots.last().unwrap());
    let slack = 1e-12 * (tn - t0).abs().max(1.0);
    if !(t >= t0 - slack && t <= tn + slack) {
        return Err(Error::Domain(format!("time {t} outside [{t0}, {tn}]")));
    }
    let t = t.clamp(t0, tn);
    let s = match knots[1..].iter().position(|&k| t < k) {
        Some(s) => s,
        None => knots.len() - 2,
    };
    Ok((s, t - knots[s]))
}

/// Sparse row mapping the stacked coefficients of one axis to a derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeRow {
    pub segment: usize,
    pub weights: Vec<f64>,
}

impl DerivativeRow {
    /// Entries `(index, weight)` in the stacked vector for `axis`.
    pub fn entries(&self, axis: usize, layout: &CoeffLayout) -> Vec<(usize, f64)> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0.0)
            .map(|(j, w)| (layout.index(axis, self.segment, j), *w))
            .collect()
    }

    pub fn apply(&self, c: &[f64], axis: usize, layout: &CoeffLayout) -> f64 {
        self.entries(axis, layout).iter().map(|(i, w)| c[*i] * w).sum()
    }
}

/// Row `A^{(q)}(t)` with `A^{(q)}(t) c = d^q ξ/dt^q (t)` along one axis.
pub fn derivative_row(knots: &[f64], degree: usize, t: f64, q: usize) -> Result<DerivativeRow> {
    if q > degree {
        return Err(Error::Domain(format!("derivative order {q} exceeds degree {degree}")));
    }
    let (segment, tau) = locate(knots, t)?;
    Ok(DerivativeRow {
        segment,
        weights: monomial_derivative(degree, tau, q),
    })
}

/// Knot times from a trapezoidal speed profile per segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeAllocation {
    pub cruise_speed: f64,
    pub accel: f64,
    pub min_duration: f64,
}

impl TimeAllocation {
    pub fn from_limits(v_max: f64, a_max: f64) -> Self {
        Self {
            cruise_speed: 0.8 * v_max,
            accel: 0.8 * a_max,
            min_duration: 0.1,
        }
    }

    /// Rest-to-rest duration over `distance` [s].
    pub fn duration(&self, distance: f64) -> f64 {
        let (v, a) = (self.cruise_speed, self.accel);
        let t = if distance >= v * v / a {
            distance / v + v / a
        } else {
            2.0 * (distance / a).sqrt()
        };
        t.max(self.min_duration)
    }
}

/// Drops consecutive duplicates (closer than `tol`).
pub fn merge_coincident(waypoints: &[Vec3], tol: f64) -> Vec<Vec3> {
    let mut out: Vec<Vec3> = Vec::with_capacity(waypoints.len());
    for w in waypoints {
        if let Some(last) = out.last() {
            if (w - last).norm() <= tol {
                warn!("merging coincident waypoint at {:?}", w.as_slice());
                continue;
            }
        }
        out.push(*w);
    }
    out
}

/// Knot times for `waypoints` (after merging duplicates), starting at 0.
/// A single remaining point yields one hold segment of minimum duration.
pub fn allocate_times(waypoints: &[Vec3], v_max: f64, a_max: f64) -> Result<(Vec<Vec3>, Vec<f64>)> {
    allocate_times_with(waypoints, &TimeAllocation::from_limits(v_max, a_max))
}

pub fn allocate_times_with(waypoints: &[Vec3], alloc: &TimeAllocation) -> Result<(Vec<Vec3>, Vec<f64>)> {
    if waypoints.len() < 2 {
        return Err(Error::Domain("time allocation needs at least two waypoints".into()));
    }
    if !(alloc.cruise_speed > 0.0 && alloc.accel > 0.0) {
        return Err(Error::Config("speed and acceleration limits must be positive".into()));
    }
    let mut pts = merge_coincident(waypoints, 1e-9);
    if pts.len() == 1 {
        pts.push(pts[0]);
        return Ok((pts, vec![0.0, alloc.min_duration]));
    }
    let mut knots = vec![0.0];
    for w in pts.windows(2) {
        let d = alloc.duration((w[1] - w[0]).norm());
        knots.push(knots.last().unwrap() + d);
    }
    Ok((pts, knots))
}

/// Sample times: `per_segment` Chebyshev–Lobatto points per segment (knot
/// included) plus the final knot.
pub fn sample_times(knots: &[f64], per_segment: usize) -> Vec<f64> {
    let m = per_segment.max(1);
    let mut out = Vec::with_capacity(m * (knots.len() - 1) + 1);
    for w in knots.windows(2) {
        let dt = w[1] - w[0];
        for j in 0..m {
            let frac = 0.5 * (1.0 - (std::f64::consts::PI * j as f64 / m as f64).cos());
            out.push(w[0] + dt * frac);
        }
    }
    out.push(*knots.last().unwrap());
    out
}

/// Gram matrix `∫_0^T (d^r τ^j)(d^r τ^l) dτ` of one segment.
pub fn segment_gram(degree: usize, r: usize, duration: f64) -> DMatrix<f64> {
    let n = degree + 1;
    DMatrix::from_fn(n, n, |j, l| {
        if j < r || l < r {
            return 0.0;
        }
        let p = (j + l - 2 * r + 1) as f64;
        falling(j, r) * falling(l, r) * duration.powf(p) / p
    })
}

/// Block-diagonal smoothness matrix `Q` over all axes and segments, such
/// that `½cᵀQc = ∫ ‖d^r ξ/dt^r‖² dt`. Returned as upper-triangle triplets.
pub fn build_smoothness(knots: &[f64], layout: &CoeffLayout, r: usize) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for s in 0..layout.segments {
        let g = segment_gram(layout.degree, r, knots[s + 1] - knots[s]);
        for a in 0..3 {
            for j in r..=layout.degree {
                for l in j..=layout.degree {
                    out.push((layout.index(a, s, j), layout.index(a, s, l), 2.0 * g[(j, l)]));
                }
            }
        }
    }
    out
}

/// Linear equalities shared by all three axes; only the right-hand sides
/// differ per axis. Row entries index the per-axis coefficient block.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisEqualities {
    pub rows: Vec<Vec<(usize, f64)>>,
    pub rhs: Vec<Vec3>,
}

impl AxisEqualities {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dense(&self, cols: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows.len(), cols);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j)] += v;
            }
        }
        m
    }

    /// Max-norm residual of the stacked vector `c`.
    pub fn residual(&self, c: &[f64], layout: &CoeffLayout) -> f64 {
        let per = layout.per_axis();
        let mut worst: f64 = 0.0;
        for a in 0..3 {
            for (row, b) in self.rows.iter().zip(&self.rhs) {
                let v: f64 = row.iter().map(|(j, w)| c[a * per + j] * w).sum();
                worst = worst.max((v - b[a]).abs());
            }
        }
        worst
    }
}

/// Waypoint interpolation, continuity of orders `0..r` at interior knots,
/// and zero derivatives of orders `1..r` at both ends.
pub fn build_equalities(waypoints: &[Vec3], knots: &[f64], layout: &CoeffLayout, r: usize) -> Result<AxisEqualities> {
    let s_count = layout.segments;
    if waypoints.len() != s_count + 1 || knots.len() != s_count + 1 {
        return Err(Error::IllPosed(format!(
            "{} waypoints and {} knots for {} segments",
            waypoints.len(),
            knots.len(),
            s_count
        )));
    }
    let n = layout.degree;
    let per = layout.per_segment();
    let local = |s: usize, w: Vec<f64>| -> Vec<(usize, f64)> {
        w.into_iter()
            .enumerate()
            .filter(|(_, v)| *v != 0.0)
            .map(|(j, v)| (s * per + j, v))
            .collect()
    };
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for s in 0..s_count {
        rows.push(local(s, monomial_derivative(n, 0.0, 0)));
        rhs.push(waypoints[s]);
    }
    let last_dt = knots[s_count] - knots[s_count - 1];
    rows.push(local(s_count - 1, monomial_derivative(n, last_dt, 0)));
    rhs.push(waypoints[s_count]);
    for s in 1..s_count {
        let dt = knots[s] - knots[s - 1];
        for q in 0..r {
            let mut row = local(s - 1, monomial_derivative(n, dt, q));
            row.extend(local(s, monomial_derivative(n, 0.0, q)).into_iter().map(|(j, v)| (j, -v)));
            rows.push(row);
            rhs.push(Vec3::zeros());
        }
    }
    for q in 1..r {
        rows.push(local(0, monomial_derivative(n, 0.0, q)));
        rhs.push(Vec3::zeros());
        rows.push(local(s_count - 1, monomial_derivative(n, last_dt, q)));
        rhs.push(Vec3::zeros());
    }
    let eq = AxisEqualities { rows, rhs };
    let scale = column_scale(knots, layout);
    let mut a = eq.dense(layout.per_axis()) * DMatrix::from_diagonal(&DVector::from_column_slice(&scale[..layout.per_axis()]));
    for mut row in a.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
    let rank = a.svd(false, false).rank(1e-10);
    if rank < eq.len() {
        return Err(Error::IllPosed(format!("equality system has rank {rank} < {} rows", eq.len())));
    }
    Ok(eq)
}

/// Column scaling `1/T_s^j` that maps well-conditioned variables `y` to
/// coefficients `c = diag(scale) y`.
pub fn column_scale(knots: &[f64], layout: &CoeffLayout) -> Vec<f64> {
    let mut out = vec![0.0; layout.len()];
    for a in 0..3 {
        for s in 0..layout.segments {
            let dt = knots[s + 1] - knots[s];
            for j in 0..=layout.degree {
                out[layout.index(a, s, j)] = dt.powi(-(j as i32));
            }
        }
    }
    out
}

/// Minimizes `½cᵀQc` subject to the equalities alone.
pub fn solve_unconstrained(waypoints: &[Vec3], knots: &[f64], degree: usize, r: usize) -> Result<PolySpline> {
    let layout = CoeffLayout {
        segments: knots.len() - 1,
        degree,
    };
    if degree + 1 < 2 * r {
        return Err(Error::Config(format!("degree {degree} below 2r−1 for smoothness order {r}")));
    }
    let eq = build_equalities(waypoints, knots, &layout, r)?;
    let per = layout.per_axis();
    let scale = column_scale(knots, &layout);
    let d = DVector::from_column_slice(&scale[..per]);
    let mut q = DMatrix::zeros(per, per);
    for (i, j, v) in build_smoothness(knots, &layout, r) {
        if i < per && j < per {
            q[(i, j)] += v;
            if i != j {
                q[(j, i)] += v;
            }
        }
    }
    let q = DMatrix::from_diagonal(&d) * q * DMatrix::from_diagonal(&d);
    let a = eq.dense(per) * DMatrix::from_diagonal(&d);
    let m = eq.len();
    let mut kkt = DMatrix::zeros(per + m, per + m);
    kkt.view_mut((0, 0), (per, per)).copy_from(&q);
    kkt.view_mut((0, per), (per, m)).copy_from(&a.transpose());
    kkt.view_mut((per, 0), (m, per)).copy_from(&a);
    let lu = kkt.full_piv_lu();
    let mut c = vec![0.0; layout.len()];
    for axis in 0..3 {
        let mut rhs = DVector::zeros(per + m);
        for (i, b) in eq.rhs.iter().enumerate() {
            rhs[per + i] = b[axis];
        }
        let sol = lu
            .solve(&rhs)
            .ok_or_else(|| Error::IllPosed("singular smoothness system".into()))?;
        for i in 0..per {
            c[axis * per + i] = sol[i] * d[i];
        }
    }
    Ok(PolySpline::from_vector(knots.to_vec(), degree, &c))
}

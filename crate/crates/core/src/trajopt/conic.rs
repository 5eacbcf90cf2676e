//! Sparse conic quadratic programs and their interior-point solution.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{DefaultSettings, DefaultSolver, IPSolver, SolverStatus, SupportedConeT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type SparseRow = Vec<(usize, f64)>;

/// Sums entries that share an index.
pub fn merge_duplicates(row: &[(usize, f64)]) -> SparseRow {
    let mut out: SparseRow = row.to_vec();
    out.sort_by_key(|e| e.0);
    out.dedup_by(|b, a| {
        if a.0 == b.0 {
            a.1 += b.1;
            true
        } else {
            false
        }
    });
    out
}

fn dot(row: &[(usize, f64)], x: &[f64]) -> f64 {
    row.iter().map(|(i, v)| x[*i] * v).sum()
}

/// `‖A x + b‖ ≤ cᵀx + d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SocConstraint {
    pub a: Vec<SparseRow>,
    pub b: Vec<f64>,
    pub c: SparseRow,
    pub d: f64,
    /// Label used when reporting activity or infeasibility.
    pub class: &'static str,
}

impl SocConstraint {
    /// `cᵀx + d − ‖A x + b‖`; non-negative iff satisfied.
    pub fn slack(&self, x: &[f64]) -> f64 {
        let n: f64 = self.a.iter().zip(&self.b).map(|(r, b)| (dot(r, x) + b).powi(2)).sum::<f64>().sqrt();
        dot(&self.c, x) + self.d - n
    }
}

/// Minimize `½xᵀPx + qᵀx + constant` subject to linear equalities, linear
/// inequalities `a x ≤ b` and second-order cones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConicProblem {
    pub n: usize,
    /// Upper-triangle entries of `P`; repeated entries are summed.
    pub p: Vec<(usize, usize, f64)>,
    pub q: Vec<f64>,
    pub constant: f64,
    pub eq_rows: Vec<SparseRow>,
    pub eq_rhs: Vec<f64>,
    pub eq_class: Vec<&'static str>,
    pub ineq_rows: Vec<SparseRow>,
    pub ineq_rhs: Vec<f64>,
    pub ineq_class: Vec<&'static str>,
    pub socs: Vec<SocConstraint>,
    /// Solver variables are `x_j / var_scale[j]`.
    pub var_scale: Vec<f64>,
}

impl ConicProblem {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            q: vec![0.0; n],
            var_scale: vec![1.0; n],
            ..Default::default()
        }
    }

    /// Adds `weight · ‖B x + d‖²` for residual rows `B`, offsets `d`.
    pub fn add_least_squares(&mut self, rows: &[SparseRow], offsets: &[f64], weight: f64) {
        for (row, off) in rows.iter().zip(offsets) {
            let row = merge_duplicates(row);
            for (a, &(i, vi)) in row.iter().enumerate() {
                self.q[i] += 2.0 * weight * off * vi;
                for &(j, vj) in &row[a..] {
                    let (r, c) = if i <= j { (i, j) } else { (j, i) };
                    self.p.push((r, c, 2.0 * weight * vi * vj));
                }
            }
            self.constant += weight * off * off;
        }
    }

    pub fn add_eq(&mut self, row: SparseRow, rhs: f64, class: &'static str) {
        self.eq_rows.push(row);
        self.eq_rhs.push(rhs);
        self.eq_class.push(class);
    }

    pub fn add_ineq(&mut self, row: SparseRow, rhs: f64, class: &'static str) {
        self.ineq_rows.push(row);
        self.ineq_rhs.push(rhs);
        self.ineq_class.push(class);
    }

    /// Objective value at `x`.
    pub fn objective(&self, x: &[f64]) -> f64 {
        let quad: f64 = self
            .p
            .iter()
            .map(|&(i, j, v)| if i == j { v * x[i] * x[i] } else { 2.0 * v * x[i] * x[j] })
            .sum();
        0.5 * quad + self.q.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.constant
    }

    /// Worst violation per constraint family.
    pub fn residuals(&self, x: &[f64]) -> Residuals {
        let eq = self
            .eq_rows
            .iter()
            .zip(&self.eq_rhs)
            .map(|(r, b)| (dot(r, x) - b).abs())
            .fold(0.0, f64::max);
        let ineq = self
            .ineq_rows
            .iter()
            .zip(&self.ineq_rhs)
            .map(|(r, b)| (dot(r, x) - b).max(0.0))
            .fold(0.0, f64::max);
        let soc = self.socs.iter().map(|s| (-s.slack(x)).max(0.0)).fold(0.0, f64::max);
        Residuals { eq, ineq, soc }
    }

    fn check(&self) -> Result<()> {
        let bad = |i: usize| i >= self.n;
        let rows_ok = self
            .eq_rows
            .iter()
            .chain(&self.ineq_rows)
            .chain(self.socs.iter().flat_map(|s| s.a.iter().chain(std::iter::once(&s.c))))
            .all(|r| r.iter().all(|(i, v)| !bad(*i) && v.is_finite()));
        let p_ok = self.p.iter().all(|&(i, j, v)| i <= j && !bad(j) && v.is_finite());
        if !rows_ok || !p_ok || self.q.len() != self.n || self.var_scale.len() != self.n {
            return Err(Error::Solver("malformed conic problem".into()));
        }
        if self.eq_rows.len() != self.eq_rhs.len() || self.ineq_rows.len() != self.ineq_rhs.len() {
            return Err(Error::Solver("row and right-hand-side counts differ".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub eq: f64,
    pub ineq: f64,
    pub soc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    ReducedAccuracy,
    Infeasible,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConicSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub status: SolveStatus,
    pub iterations: u32,
    pub residuals: Residuals,
    pub solver_status: String,
    /// Constraint classes carrying the infeasibility certificate, largest
    /// weight first. Empty unless infeasible.
    pub infeasible_classes: Vec<String>,
}

/// Solver tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveSettings {
    pub tol: f64,
    pub max_iter: u32,
    /// Let the solver rescale rows and columns on top of `var_scale`. The
    /// other choice is tried when the first one breaks down.
    pub equilibrate: bool,
}

impl Default for SolveSettings {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 200,
            equilibrate: false,
        }
    }
}

/// Solves `problem` with a primal-dual interior-point method.
///
/// Returns `Ok` with status `Infeasible` when the solver certifies primal
/// infeasibility; numerical breakdowns yield a solver error.
pub fn solve(problem: &ConicProblem, settings: &SolveSettings) -> Result<ConicSolution> {
    problem.check()?;
    match solve_once(problem, settings, settings.equilibrate) {
        Err(Error::Solver(first)) => solve_once(problem, settings, !settings.equilibrate)
            .map_err(|e| Error::Solver(format!("{first}; retry: {e}"))),
        other => other,
    }
}

fn solve_once(problem: &ConicProblem, settings: &SolveSettings, equilibrate: bool) -> Result<ConicSolution> {
    let n = problem.n;
    let s = &problem.var_scale;

    let (mut pi, mut pj, mut pv) = (Vec::new(), Vec::new(), Vec::new());
    for &(i, j, v) in &problem.p {
        pi.push(i);
        pj.push(j);
        pv.push(v * s[i] * s[j]);
    }
    let p = CscMatrix::new_from_triplets(n, n, pi, pj, pv);
    let q: Vec<f64> = problem.q.iter().zip(s).map(|(q, s)| q * s).collect();

    let (mut ai, mut aj, mut av) = (Vec::new(), Vec::new(), Vec::new());
    let mut b = Vec::new();
    let mut cones = Vec::new();
    let mut push_row = |row: &[(usize, f64)], sign: f64, rhs: f64, b: &mut Vec<f64>| {
        let r = b.len();
        for &(j, v) in row {
            ai.push(r);
            aj.push(j);
            av.push(sign * v * s[j]);
        }
        b.push(rhs);
    };
    for (row, rhs) in problem.eq_rows.iter().zip(&problem.eq_rhs) {
        push_row(row, 1.0, *rhs, &mut b);
    }
    if !problem.eq_rows.is_empty() {
        cones.push(SupportedConeT::ZeroConeT(problem.eq_rows.len()));
    }
    for (row, rhs) in problem.ineq_rows.iter().zip(&problem.ineq_rhs) {
        push_row(row, 1.0, *rhs, &mut b);
    }
    if !problem.ineq_rows.is_empty() {
        cones.push(SupportedConeT::NonnegativeConeT(problem.ineq_rows.len()));
    }
    for soc in &problem.socs {
        // s = (cᵀx + d, A x + b) = rhs − rows·x.
        push_row(&soc.c, -1.0, soc.d, &mut b);
        for (row, off) in soc.a.iter().zip(&soc.b) {
            push_row(row, -1.0, *off, &mut b);
        }
        cones.push(SupportedConeT::SecondOrderConeT(1 + soc.a.len()));
    }
    let m = b.len();
    let a = CscMatrix::new_from_triplets(m, n, ai, aj, av);

    let config = DefaultSettings {
        verbose: false,
        tol_gap_abs: settings.tol,
        tol_gap_rel: settings.tol,
        tol_feas: settings.tol,
        max_iter: settings.max_iter,
        max_threads: 1,
        equilibrate_enable: equilibrate,
        ..DefaultSettings::default()
    };
    let mut solver = DefaultSolver::new(&p, &q, &a, &b, &cones, config).map_err(|e| Error::Solver(format!("{e:?}")))?;
    solver.solve();
    let sol = &solver.solution;
    let x: Vec<f64> = sol.x.iter().zip(s).map(|(y, s)| y * s).collect();
    let status = match sol.status {
        SolverStatus::Solved => SolveStatus::Optimal,
        SolverStatus::AlmostSolved => SolveStatus::ReducedAccuracy,
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => SolveStatus::Infeasible,
        _ => SolveStatus::Failed,
    };
    let residuals = problem.residuals(&x);
    let infeasible_classes = if status == SolveStatus::Infeasible {
        certificate_classes(problem, &sol.z)
    } else {
        Vec::new()
    };
    if status == SolveStatus::Failed {
        return Err(Error::Solver(format!(
            "{:?} after {} iterations (residuals eq {:.3e}, ineq {:.3e}, soc {:.3e})",
            sol.status, sol.iterations, residuals.eq, residuals.ineq, residuals.soc
        )));
    }
    Ok(ConicSolution {
        objective: problem.objective(&x),
        x,
        status,
        iterations: sol.iterations,
        residuals,
        solver_status: format!("{:?}", sol.status),
        infeasible_classes,
    })
}

fn certificate_classes(problem: &ConicProblem, z: &[f64]) -> Vec<String> {
    let mut labels: Vec<&str> = problem.eq_class.iter().chain(&problem.ineq_class).copied().collect();
    for soc in &problem.socs {
        labels.extend(std::iter::repeat_n(soc.class, 1 + soc.a.len()));
    }
    let mut weight: Vec<(&str, f64)> = Vec::new();
    for (label, zi) in labels.iter().zip(z) {
        match weight.iter_mut().find(|(l, _)| l == label) {
            Some(w) => w.1 += zi.abs(),
            None => weight.push((label, zi.abs())),
        }
    }
    let top = weight.iter().map(|w| w.1).fold(0.0, f64::max);
    weight.retain(|w| w.1 > 1e-6 * top && w.1 > 0.0);
    weight.sort_by(|a, b| b.1.total_cmp(&a.1));
    weight.into_iter().map(|w| w.0.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unconstrained_quadratic_matches_closed_form() {
        // ½xᵀPx + qᵀx with P = [[4, 1], [1, 2]], q = (1, 1): x* = −P⁻¹q.
        let mut pr = ConicProblem::new(2);
        pr.p = vec![(0, 0, 4.0), (0, 1, 1.0), (1, 1, 2.0)];
        pr.q = vec![1.0, 1.0];
        let sol = solve(&pr, &SolveSettings::default()).unwrap();
        let expect = [-1.0 / 7.0, -3.0 / 7.0];
        assert_eq!(sol.status, SolveStatus::Optimal);
        for (a, b) in sol.x.iter().zip(expect) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn least_squares_term_expands_correctly() {
        let mut pr = ConicProblem::new(2);
        pr.add_least_squares(&[vec![(0, 1.0), (1, -2.0), (0, 1.0)]], &[3.0], 0.5);
        let x = [0.7, -1.1];
        let r: f64 = 2.0 * x[0] - 2.0 * x[1] + 3.0;
        assert!((pr.objective(&x) - 0.5 * r * r).abs() < 1e-12);
    }

    #[test]
    fn equality_constrained_minimum_norm() {
        // min ‖x‖² s.t. x0 + x1 + x2 = 3 → x = (1, 1, 1).
        let mut pr = ConicProblem::new(3);
        pr.add_least_squares(&[vec![(0, 1.0)], vec![(1, 1.0)], vec![(2, 1.0)]], &[0.0; 3], 1.0);
        pr.add_eq(vec![(0, 1.0), (1, 1.0), (2, 1.0)], 3.0, "sum");
        pr.var_scale = vec![2.0, 0.5, 1.0];
        let sol = solve(&pr, &SolveSettings::default()).unwrap();
        for v in &sol.x {
            assert!((v - 1.0).abs() < 1e-8);
        }
        assert!(sol.residuals.eq < 1e-8);
    }

    #[test]
    fn cone_constraint_is_respected() {
        // Pull x toward (3, 0, 0) under ‖x‖ ≤ 1.
        let mut pr = ConicProblem::new(3);
        pr.add_least_squares(&[vec![(0, 1.0)], vec![(1, 1.0)], vec![(2, 1.0)]], &[-3.0, 0.0, 0.0], 1.0);
        pr.socs.push(SocConstraint {
            a: vec![vec![(0, 1.0)], vec![(1, 1.0)], vec![(2, 1.0)]],
            b: vec![0.0; 3],
            c: Vec::new(),
            d: 1.0,
            class: "ball",
        });
        let sol = solve(&pr, &SolveSettings::default()).unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-7);
        assert!(sol.residuals.soc < 1e-8);
    }

    #[test]
    fn contradictory_constraints_are_reported() {
        let mut pr = ConicProblem::new(1);
        pr.add_least_squares(&[vec![(0, 1.0)]], &[0.0], 1.0);
        pr.add_eq(vec![(0, 1.0)], 2.0, "pin");
        pr.add_ineq(vec![(0, 1.0)], 1.0, "cap");
        let sol = solve(&pr, &SolveSettings::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
        assert!(sol.infeasible_classes.iter().any(|c| c == "cap"));
    }

    #[test]
    fn out_of_range_index_is_rejected() {
        let mut pr = ConicProblem::new(1);
        pr.add_eq(vec![(4, 1.0)], 0.0, "bad");
        assert!(matches!(solve(&pr, &SolveSettings::default()), Err(Error::Solver(_))));
    }
}

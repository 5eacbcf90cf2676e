//! Tube-RRT* search loop and its two ablation variants.
//!
//! Every tree node stores its clearance radius; a node is admitted only if
//! that radius exceeds `r_min` and the edge to its parent keeps `r_min`
//! clearance throughout, so the returned path is the centerline of a
//! collision-free tube.

pub mod cost;
pub mod tree;

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::{default_resolution, EnvironmentMap};
use crate::error::{Error, Result};
use crate::extend::{angle_between, extend, extend_standard, ExtendContext, PotentialConfig, StepConfig};
use crate::sampler::{build_partition, draw_sample, draw_sample_uniform, posterior_update, SamplerConfig, SubRegion};
use crate::Vec3;

pub use cost::{edge_cost, effective_density, neighborhood_radius, path_cost, path_length, turning_energy, turning_sum, CostConfig};
pub use tree::{Node, Tree};

/// Which strategy fills the sampling and extension slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Thompson-sampled subregions with potential-guided adaptive extension.
    Enhanced,
    /// Thompson-sampled subregions with fixed-step straight extension.
    Stube,
    /// Uniform plus goal-biased sampling with adaptive extension.
    Aetube,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Enhanced, Variant::Stube, Variant::Aetube];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Enhanced => "enhanced",
            Variant::Stube => "stube",
            Variant::Aetube => "aetube",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "enhanced" => Ok(Variant::Enhanced),
            "stube" => Ok(Variant::Stube),
            "aetube" => Ok(Variant::Aetube),
            other => Err(Error::Config(format!("unknown variant '{other}'"))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtendConfig {
    pub potential: PotentialConfig,
    pub step: StepConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    pub max_iters: usize,
    /// Required tube radius [m].
    #[serde(rename = "r_min_m")]
    pub r_min: f64,
    pub gamma: f64,
    /// Goal connection radius [m]; `None` means one nominal step.
    #[serde(rename = "goal_tol_m")]
    pub goal_tol: Option<f64>,
    pub cost: CostConfig,
    pub variant: Variant,
    /// Minimum extension success probability used in the radius density.
    pub p_l: f64,
    /// Sample spacing along edges [m]; `None` means `min(0.25, r_min/2)`.
    #[serde(rename = "segment_resolution_m")]
    pub segment_resolution: Option<f64>,
    /// Keeps at most `⌈factor · ln n⌉` of the nearest nodes inside the
    /// neighborhood radius; `None` keeps them all.
    pub neighbor_cap_factor: Option<f64>,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            max_iters: 3000,
            r_min: 1.0,
            gamma: 0.3,
            goal_tol: None,
            cost: CostConfig::default(),
            variant: Variant::Enhanced,
            p_l: 0.5,
            segment_resolution: None,
            neighbor_cap_factor: Some(2.0 * std::f64::consts::E),
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0) {
            return Err(Error::Config(format!("r_min must be positive, got {}", self.r_min)));
        }
        if !(self.gamma > 0.0 && self.p_l > 0.0 && self.p_l <= 1.0) {
            return Err(Error::Config("gamma must be positive and p_l in (0, 1]".into()));
        }
        if let Some(t) = self.goal_tol {
            if !(t > 0.0) {
                return Err(Error::Config("goal tolerance must be positive".into()));
            }
        }
        if self.neighbor_cap_factor.is_some_and(|f| !(f > 0.0)) {
            return Err(Error::Config("neighbor cap factor must be positive".into()));
        }
        if let Some(r) = self.segment_resolution {
            if !(r > 0.0) {
                return Err(Error::Config("segment resolution must be positive".into()));
            }
        }
        self.cost.validate()
    }

    pub fn resolution(&self) -> f64 {
        self.segment_resolution.unwrap_or_else(|| default_resolution(self.r_min))
    }
}

/// Scalar summary of a path and the search that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathMetrics {
    pub length_m: f64,
    pub turning_sum_rad: f64,
    pub min_clearance_m: f64,
    pub cost: f64,
    pub t_first_s: f64,
    pub collision_checks: u64,
    pub effective_samples: u64,
    pub total_samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathResult {
    pub waypoints: Vec<Vec3>,
    /// Clearance at each waypoint [m].
    pub clearance_radii_m: Vec<f64>,
    pub metrics: PathMetrics,
}

impl PathResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(text)?;
        if p.waypoints.len() < 2 || p.waypoints.len() != p.clearance_radii_m.len() {
            return Err(Error::Config("path needs at least two waypoints with one radius each".into()));
        }
        Ok(p)
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

/// Counters gathered during one search.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Point and edge collision checks up to the first goal connection, or
    /// over the whole run when the goal is never reached.
    pub collision_checks: u64,
    pub collision_checks_total: u64,
    /// Iterations whose extended node entered the tree.
    pub effective_samples: u64,
    pub total_samples: u64,
    /// Seconds from the start of the loop to the first goal connection.
    pub t_first_s: Option<f64>,
    /// Iterations completed at the first goal connection.
    pub iter_first: Option<u64>,
    /// Partition and density estimation time [s].
    pub precompute_s: f64,
    /// Loop time [s].
    pub search_s: f64,
    pub rewires: u64,
}

impl SearchStats {
    pub fn effective_ratio(&self) -> f64 {
        if self.total_samples == 0 {
            0.0
        } else {
            self.effective_samples as f64 / self.total_samples as f64
        }
    }
}

/// Everything a search produces.
#[derive(Debug, Clone)]
pub struct PlanReport {
    pub path: Option<PathResult>,
    pub tree: Tree,
    pub regions: Vec<SubRegion>,
    pub stats: SearchStats,
    pub variant: Variant,
}

impl PlanReport {
    /// Writes the node list as CSV: `id,x,y,z,parent,cost,clearance_r,cum_turning`.
    pub fn write_nodes_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["id", "x", "y", "z", "parent", "cost", "clearance_r", "cum_turning"])?;
        for n in self.tree.nodes() {
            w.write_record([
                n.id.to_string(),
                n.position.x.to_string(),
                n.position.y.to_string(),
                n.position.z.to_string(),
                n.parent.map(|p| p.to_string()).unwrap_or_default(),
                n.cost.to_string(),
                n.clearance_r.to_string(),
                n.cum_turning.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Turn angle at `p` between the edge from `pp` and the edge to `next`.
fn turn_at(pp: Option<&Vec3>, p: &Vec3, next: &Vec3) -> f64 {
    match pp {
        Some(pp) => {
            let a = p - pp;
            let b = next - p;
            if a.norm() > 0.0 && b.norm() > 0.0 {
                angle_between(&a.normalize(), &b.normalize())
            } else {
                0.0
            }
        }
        None => 0.0,
    }
}

/// Candidates closer than this to an existing node are dropped [m].
const DUPLICATE_TOL: f64 = 1e-9;

/// Parent candidate ordered by cost, then id.
struct Candidate(f64, usize);

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

struct Search<'a> {
    map: &'a EnvironmentMap,
    cfg: &'a PlannerConfig,
    resolution: f64,
    tree: Tree,
    checks: u64,
    goal: Vec3,
    /// Nodes with a clear final edge to the goal, in insertion order.
    goal_nodes: Vec<usize>,
}

impl Search<'_> {
    fn segment_clear(&mut self, a: &Vec3, b: &Vec3) -> bool {
        self.checks += 1;
        self.map.segment_clear_unchecked(a, b, self.cfg.r_min, self.resolution)
    }

    fn edge(&self, from: usize, to: &Vec3) -> Result<f64> {
        edge_cost(self.tree.parent_position(from), &self.tree.node(from).position, to, &self.cfg.cost)
    }

    /// Cheapest clear parent among `candidates`; edges are checked lazily in
    /// order of total cost.
    fn choose_parent(&mut self, candidates: &[usize], p: &Vec3) -> Result<Option<(usize, f64)>> {
        let mut scored = Vec::with_capacity(candidates.len());
        for &c in candidates {
            if self.tree.node(c).position == *p {
                continue;
            }
            scored.push(Reverse(Candidate(self.tree.node(c).cost + self.edge(c, p)?, c)));
        }
        let mut heap = BinaryHeap::from(scored);
        while let Some(Reverse(Candidate(cost, c))) = heap.pop() {
            let from = self.tree.node(c).position;
            if self.segment_clear(&from, p) {
                return Ok(Some((c, cost)));
            }
        }
        Ok(None)
    }

    /// Re-derives cost and accumulated turning below `id` from its parent.
    fn propagate(&mut self, id: usize) -> Result<()> {
        for n in self.tree.subtree(id) {
            let parent = self.tree.node(n).parent.expect("rewired node has a parent");
            let pos = self.tree.node(n).position;
            let step = self.edge(parent, &pos)?;
            let turn = turn_at(self.tree.parent_position(parent), &self.tree.node(parent).position, &pos);
            let (pc, pt) = (self.tree.node(parent).cost, self.tree.node(parent).cum_turning);
            let node = self.tree.node_mut(n);
            node.cost = pc + step;
            node.cum_turning = pt + turn;
        }
        Ok(())
    }

    /// Routes neighbors through `new` when that strictly lowers their cost
    /// without raising any child's cost or the node's goal connection.
    fn rewire(&mut self, new: usize, neighbors: &[usize]) -> Result<u64> {
        let new_pos = self.tree.node(new).position;
        let new_cost = self.tree.node(new).cost;
        let mut count = 0;
        for &x in neighbors {
            if x == new || x == 0 || self.tree.node(new).parent == Some(x) {
                continue;
            }
            let x_pos = self.tree.node(x).position;
            if x_pos == new_pos {
                continue;
            }
            let via = new_cost + self.edge(new, &x_pos)?;
            if !(via < self.tree.node(x).cost) {
                continue;
            }
            let mut children_ok = true;
            for &ch in self.tree.node(x).children() {
                let ch_node = self.tree.node(ch);
                let c = via + edge_cost(Some(&new_pos), &x_pos, &ch_node.position, &self.cfg.cost)?;
                if c > ch_node.cost {
                    children_ok = false;
                    break;
                }
            }
            if children_ok && x_pos != self.goal && self.goal_nodes.binary_search(&x).is_ok() {
                let before = self.tree.node(x).cost + self.edge(x, &self.goal)?;
                let after = via + edge_cost(Some(&new_pos), &x_pos, &self.goal, &self.cfg.cost)?;
                children_ok = after <= before;
            }
            if !children_ok || self.tree.is_ancestor(x, new) {
                continue;
            }
            if !self.segment_clear(&new_pos, &x_pos) {
                continue;
            }
            self.tree.reparent(x, new);
            self.propagate(x)?;
            count += 1;
        }
        Ok(count)
    }
}

/// Runs the search for `cfg.max_iters` iterations.
///
/// Returns the cheapest goal-connected path found, or a report with
/// `path: None` if the goal was never reached.
pub fn plan<R: Rng + ?Sized>(
    map: &EnvironmentMap,
    start: &Vec3,
    goal: &Vec3,
    sampler_cfg: &SamplerConfig,
    extend_cfg: &ExtendConfig,
    cfg: &PlannerConfig,
    rng: &mut R,
) -> Result<PlanReport> {
    cfg.validate()?;
    sampler_cfg.validate()?;
    extend_cfg.potential.validate()?;
    extend_cfg.step.validate()?;
    let r_start = map.clearance(start).map_err(|e| Error::InfeasibleInput(format!("start: {e}")))?;
    let r_goal = map.clearance(goal).map_err(|e| Error::InfeasibleInput(format!("goal: {e}")))?;
    if !(r_start > cfg.r_min) {
        return Err(Error::InfeasibleInput(format!("start clearance {r_start:.3} m does not exceed r_min {}", cfg.r_min)));
    }
    if !(r_goal > cfg.r_min) {
        return Err(Error::InfeasibleInput(format!("goal clearance {r_goal:.3} m does not exceed r_min {}", cfg.r_min)));
    }

    let t0 = Instant::now();
    let mut partition = build_partition(map, sampler_cfg, rng)?;
    let mean_density = partition.mean_density();
    let precompute_s = t0.elapsed().as_secs_f64();

    let ws = *map.workspace();
    let eps0 = extend_cfg.step.epsilon_0;
    let mut potential = extend_cfg.potential.clone();
    potential.inflation.get_or_insert(cfg.r_min);
    let goal_tol = cfg.goal_tol.unwrap_or(eps0);
    let free_volume = ws.volume() * (1.0 - mean_density).max(1e-9);
    let rho_eff = effective_density(sampler_cfg.uniform_mix.max(1e-9), cfg.p_l, free_volume);

    let mut search = Search {
        map,
        cfg,
        resolution: cfg.resolution(),
        tree: Tree::new(*start, r_start),
        checks: 0,
        goal: *goal,
        goal_nodes: Vec::new(),
    };
    let mut stats = SearchStats {
        precompute_s,
        ..Default::default()
    };
    let t_loop = Instant::now();

    let try_goal = |s: &mut Search, id: usize, stats: &mut SearchStats| {
        let p = s.tree.node(id).position;
        if (p - goal).norm() <= goal_tol && (p == *goal || s.segment_clear(&p, goal)) {
            s.goal_nodes.push(id);
            if stats.t_first_s.is_none() {
                stats.t_first_s = Some(t_loop.elapsed().as_secs_f64());
                stats.iter_first = Some(stats.total_samples);
                stats.collision_checks = s.checks;
            }
        }
    };
    try_goal(&mut search, 0, &mut stats);

    for _ in 0..cfg.max_iters {
        stats.total_samples += 1;
        let draw = match cfg.variant {
            Variant::Enhanced | Variant::Stube => draw_sample(&partition, goal, sampler_cfg, rng),
            Variant::Aetube => draw_sample_uniform(&ws, goal, sampler_cfg, rng),
        };
        let near = search.tree.nearest(&draw.point);
        let near_node = search.tree.node(near);
        let xi_near = near_node.position;
        let ctx = ExtendContext {
            xi_near,
            xi_parent: search.tree.parent_position(near).copied(),
            region_density: partition.regions[partition.membership(&xi_near)].rho_obs,
            mean_density,
            d_obs: near_node.clearance_r,
        };
        let candidate = match cfg.variant {
            Variant::Stube => extend_standard(&xi_near, &draw.point, eps0, map),
            Variant::Enhanced | Variant::Aetube => {
                extend(&ctx, &draw.point, goal, map, &potential, &extend_cfg.step, rng)
            }
        };
        let xi_new = match candidate {
            Ok(p) => Some(p),
            Err(Error::Degenerate(_)) => None,
            Err(e) => return Err(e),
        };
        // A candidate on top of an existing node adds nothing.
        let xi_new = xi_new.filter(|p| {
            let nearest = search.tree.node(search.tree.nearest(p)).position;
            (nearest - p).norm() > DUPLICATE_TOL
        });

        let mut accepted = false;
        if let Some(xi_new) = xi_new {
            search.checks += 1;
            let r_new = map.clearance_unchecked(&xi_new);
            if r_new > cfg.r_min {
                let n = search.tree.len() + 1;
                let r_n = neighborhood_radius(n, cfg.gamma, rho_eff, eps0);
                let mut neighbors = match cfg.neighbor_cap_factor {
                    Some(f) => {
                        let cap = ((f * (n as f64).ln()).ceil() as usize).max(1);
                        search.tree.nearest_within(&xi_new, r_n, cap)
                    }
                    None => search.tree.within(&xi_new, r_n),
                };
                if neighbors.binary_search(&near).is_err() {
                    neighbors.push(near);
                }
                if let Some((parent, cost)) = search.choose_parent(&neighbors, &xi_new)? {
                    let pp = search.tree.parent_position(parent).copied();
                    let parent_pos = search.tree.node(parent).position;
                    let cum = search.tree.node(parent).cum_turning + turn_at(pp.as_ref(), &parent_pos, &xi_new);
                    let id = search.tree.push(xi_new, parent, cost, r_new, cum);
                    stats.rewires += search.rewire(id, &neighbors)?;
                    try_goal(&mut search, id, &mut stats);
                    accepted = true;
                }
            }
        }
        if accepted {
            stats.effective_samples += 1;
        }
        if let Some(k) = draw.selected_region {
            posterior_update(&mut partition.regions[k], accepted);
        }
    }

    stats.search_s = t_loop.elapsed().as_secs_f64();
    stats.collision_checks_total = search.checks;
    if stats.t_first_s.is_none() {
        stats.collision_checks = search.checks;
    }

    let Search { tree, goal_nodes, .. } = search;
    let mut best: Option<(f64, usize)> = None;
    for &g in &goal_nodes {
        let node = tree.node(g);
        let tail = if node.position == *goal {
            0.0
        } else {
            edge_cost(tree.parent_position(g), &node.position, goal, &cfg.cost)?
        };
        let total = node.cost + tail;
        if best.is_none_or(|(c, id)| total < c || (total == c && g < id)) {
            best = Some((total, g));
        }
    }

    let path = match best {
        Some((total, g)) => {
            let ids = tree.lineage(g);
            let mut waypoints: Vec<Vec3> = ids.iter().map(|&i| tree.node(i).position).collect();
            let mut radii: Vec<f64> = ids.iter().map(|&i| tree.node(i).clearance_r).collect();
            if tree.node(g).position != *goal {
                waypoints.push(*goal);
                radii.push(r_goal);
            }
            let metrics = PathMetrics {
                length_m: path_length(&waypoints),
                turning_sum_rad: turning_sum(&waypoints),
                min_clearance_m: radii.iter().cloned().fold(f64::INFINITY, f64::min),
                cost: total,
                t_first_s: stats.t_first_s.unwrap_or(0.0),
                collision_checks: stats.collision_checks,
                effective_samples: stats.effective_samples,
                total_samples: stats.total_samples,
            };
            Some(PathResult {
                waypoints,
                clearance_radii_m: radii,
                metrics,
            })
        }
        None => None,
    };

    Ok(PlanReport {
        path,
        tree,
        regions: partition.regions,
        stats,
        variant: cfg.variant,
    })
}

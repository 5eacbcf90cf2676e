//! Bayesian active subregion sampling.
//!
//! The workspace is split into Voronoi cells around a jittered lattice of
//! generators. Each cell keeps a Beta posterior over the probability that an
//! expansion attempted from a sample drawn there produces a feasible node.
//! Samples come from a three-way mixture: global uniform, the goal point, or
//! a uniform point inside the Thompson-selected cell.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::env::{estimate_density_in, sample_box, EnvironmentMap, Workspace};
use crate::error::{Error, Result};
use crate::Vec3;

/// Proposal budget when sampling inside a single cell.
pub const CELL_REJECTION_BUDGET: usize = 1000;

/// Relative jitter of lattice generators, as a fraction of the cell size.
const GENERATOR_JITTER: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    /// Number of subregions `K`.
    pub regions: usize,
    /// Prior strength `κ_p`.
    pub prior_strength: f64,
    /// Uniform mixing coefficient `ε_u`.
    pub uniform_mix: f64,
    /// Goal bias `p_g`.
    pub goal_bias: f64,
    /// Monte-Carlo samples per region for the obstacle density.
    pub density_samples: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            regions: 27,
            prior_strength: 10.0,
            uniform_mix: 0.2,
            goal_bias: 0.2,
            density_samples: 500,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.regions == 0 {
            return Err(Error::Config("sampler needs at least one region".into()));
        }
        if !(self.prior_strength > 0.0) {
            return Err(Error::Config("prior strength must be positive".into()));
        }
        for (name, v) in [("uniform_mix", self.uniform_mix), ("goal_bias", self.goal_bias)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        if self.density_samples == 0 {
            return Err(Error::Config("density_samples must be >= 1".into()));
        }
        Ok(())
    }
}

/// One Voronoi cell with its Beta posterior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubRegion {
    pub generator: Vec3,
    pub alpha: f64,
    pub beta: f64,
    pub rho_obs: f64,
    /// Axis-aligned bounds of the cell, clipped to the workspace.
    pub bbox_min: Vec3,
    pub bbox_max: Vec3,
}

impl SubRegion {
    /// Region with the prior implied by obstacle density `rho_obs`.
    pub fn with_prior(generator: Vec3, rho_obs: f64, prior_strength: f64) -> Self {
        let (alpha, beta) = beta_prior(rho_obs, prior_strength);
        Self {
            generator,
            alpha,
            beta,
            rho_obs,
            bbox_min: generator,
            bbox_max: generator,
        }
    }

    pub fn posterior_mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }
}

/// Beta prior parameters `(α, β) = (1 + κ(1 − ρ), 1 + κρ)`.
pub fn beta_prior(rho_obs: f64, prior_strength: f64) -> (f64, f64) {
    (1.0 + prior_strength * (1.0 - rho_obs), 1.0 + prior_strength * rho_obs)
}

/// Voronoi partition of the workspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub regions: Vec<SubRegion>,
    workspace_min: Vec3,
    workspace_max: Vec3,
}

impl Partition {
    /// Partition over explicit generators with uniform `Beta(1, 1)` posteriors
    /// and unit cell bounds computed exactly.
    pub fn from_generators(workspace: &Workspace, generators: &[Vec3]) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Config("partition needs at least one generator".into()));
        }
        let mut regions: Vec<SubRegion> = generators
            .iter()
            .map(|g| SubRegion {
                generator: *g,
                alpha: 1.0,
                beta: 1.0,
                rho_obs: 0.0,
                bbox_min: *g,
                bbox_max: *g,
            })
            .collect();
        for k in 0..regions.len() {
            let (lo, hi) = cell_bounds(workspace, generators, k);
            regions[k].bbox_min = lo;
            regions[k].bbox_max = hi;
        }
        Ok(Self {
            regions,
            workspace_min: workspace.min_corner,
            workspace_max: workspace.max_corner,
        })
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    /// Index of the closest generator; ties go to the lowest index.
    pub fn membership(&self, p: &Vec3) -> usize {
        membership(self.regions.iter().map(|r| &r.generator), p)
    }

    /// Mean obstacle density over all regions.
    pub fn mean_density(&self) -> f64 {
        self.regions.iter().map(|r| r.rho_obs).sum::<f64>() / self.regions.len() as f64
    }

    pub fn workspace(&self) -> Workspace {
        Workspace {
            min_corner: self.workspace_min,
            max_corner: self.workspace_max,
        }
    }
}

fn membership<'a>(generators: impl Iterator<Item = &'a Vec3>, p: &Vec3) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (k, g) in generators.enumerate() {
        let d = (p - g).norm_squared();
        if d < best_d {
            best_d = d;
            best = k;
        }
    }
    best
}

/// Exact bounding box of Voronoi cell `k` inside the workspace, from the
/// vertices of the convex polytope bounded by the workspace faces and the
/// bisector planes.
fn cell_bounds(ws: &Workspace, generators: &[Vec3], k: usize) -> (Vec3, Vec3) {
    // Half-spaces n·x <= d.
    let mut planes: Vec<(Vec3, f64)> = Vec::with_capacity(generators.len() + 5);
    for i in 0..3 {
        let mut n = Vec3::zeros();
        n[i] = 1.0;
        planes.push((n, ws.max_corner[i]));
        planes.push((-n, -ws.min_corner[i]));
    }
    let rk = generators[k];
    for (j, rj) in generators.iter().enumerate() {
        if j == k || rj == &rk {
            continue;
        }
        planes.push((rj - rk, (rj.norm_squared() - rk.norm_squared()) / 2.0));
    }
    let scale = ws.extent().norm();
    let tol = 1e-9 * scale.max(1.0);
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    let m = planes.len();
    for a in 0..m {
        for b in (a + 1)..m {
            for c in (b + 1)..m {
                let mat = Matrix3::from_rows(&[
                    planes[a].0.transpose(),
                    planes[b].0.transpose(),
                    planes[c].0.transpose(),
                ]);
                let Some(inv) = mat.try_inverse() else { continue };
                let v = inv * Vector3::new(planes[a].1, planes[b].1, planes[c].1);
                if !v.iter().all(|x| x.is_finite()) {
                    continue;
                }
                if planes.iter().all(|(n, d)| n.dot(&v) <= d + tol * n.norm().max(1.0)) {
                    lo = lo.inf(&v);
                    hi = hi.sup(&v);
                }
            }
        }
    }
    if !lo.iter().all(|x| x.is_finite()) {
        return (rk, rk);
    }
    (ws.clamp(&(lo - Vec3::repeat(tol))), ws.clamp(&(hi + Vec3::repeat(tol))))
}

/// Lattice dimensions whose product is `k` with the most cubic cells for
/// the given workspace extent.
fn lattice_dims(k: usize, extent: &Vec3) -> [usize; 3] {
    // Most balanced counts first, then the most cubic cells.
    let mut best = [k, 1, 1];
    let mut best_score = (usize::MAX, f64::INFINITY);
    for nx in 1..=k {
        if k % nx != 0 {
            continue;
        }
        for ny in 1..=(k / nx) {
            if (k / nx) % ny != 0 {
                continue;
            }
            let nz = k / nx / ny;
            let counts = [nx, ny, nz];
            let spread = counts.iter().max().unwrap() - counts.iter().min().unwrap();
            let sides = [extent.x / nx as f64, extent.y / ny as f64, extent.z / nz as f64];
            let max = sides.iter().cloned().fold(f64::MIN, f64::max);
            let min = sides.iter().cloned().fold(f64::MAX, f64::min);
            let aspect = max / min;
            if spread < best_score.0 || (spread == best_score.0 && aspect < best_score.1 - 1e-12) {
                best_score = (spread, aspect);
                best = counts;
            }
        }
    }
    best
}

/// Builds the Voronoi partition: jittered lattice generators, Monte-Carlo
/// obstacle densities and Beta priors.
pub fn build_partition<R: Rng + ?Sized>(map: &EnvironmentMap, cfg: &SamplerConfig, rng: &mut R) -> Result<Partition> {
    cfg.validate()?;
    let ws = map.workspace();
    let extent = ws.extent();
    let dims = lattice_dims(cfg.regions, &extent);
    let cell = Vec3::new(
        extent.x / dims[0] as f64,
        extent.y / dims[1] as f64,
        extent.z / dims[2] as f64,
    );
    let mut generators = Vec::with_capacity(cfg.regions);
    for iz in 0..dims[2] {
        for iy in 0..dims[1] {
            for ix in 0..dims[0] {
                let center = ws.min_corner + Vec3::new((ix as f64 + 0.5) * cell.x, (iy as f64 + 0.5) * cell.y, (iz as f64 + 0.5) * cell.z);
                let jitter = Vec3::from_fn(|i, _| (rng.random::<f64>() * 2.0 - 1.0) * GENERATOR_JITTER * cell[i]);
                generators.push(ws.clamp(&(center + jitter)));
            }
        }
    }
    let mut partition = Partition::from_generators(ws, &generators)?;
    for k in 0..partition.len() {
        let (lo, hi) = (partition.regions[k].bbox_min, partition.regions[k].bbox_max);
        let rho = estimate_density_in(
            map,
            &lo,
            &hi,
            |p| membership(generators.iter(), p) == k,
            cfg.density_samples,
            rng,
        )?;
        let region = &mut partition.regions[k];
        region.rho_obs = rho;
        let (a, b) = beta_prior(rho, cfg.prior_strength);
        region.alpha = a;
        region.beta = b;
    }
    Ok(partition)
}

/// Draws `θ̂_k ~ Beta(α_k, β_k)` per region and returns the argmax, lowest
/// index on exact ties.
pub fn thompson_select<R: Rng + ?Sized>(regions: &[SubRegion], rng: &mut R) -> usize {
    let mut best = 0;
    let mut best_draw = f64::NEG_INFINITY;
    for (k, r) in regions.iter().enumerate() {
        let draw = Beta::new(r.alpha, r.beta)
            .map(|d| d.sample(rng))
            .unwrap_or_else(|_| r.posterior_mean());
        if draw > best_draw {
            best_draw = draw;
            best = k;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleDraw {
    pub point: Vec3,
    /// `None` iff the sample did not come from a Thompson-selected cell.
    pub selected_region: Option<usize>,
}

/// Which branch of the sampling mixture produced a draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Uniform,
    Goal,
    Region,
}

impl SampleDraw {
    pub fn branch(&self, goal: &Vec3) -> Branch {
        match self.selected_region {
            Some(_) => Branch::Region,
            None if self.point == *goal => Branch::Goal,
            None => Branch::Uniform,
        }
    }
}

/// One draw from the mixture: uniform with probability `ε_u`; otherwise the
/// goal with probability `p_g`; otherwise uniform inside the
/// Thompson-selected cell.
pub fn draw_sample<R: Rng + ?Sized>(partition: &Partition, goal: &Vec3, cfg: &SamplerConfig, rng: &mut R) -> SampleDraw {
    let ws = partition.workspace();
    if rng.random::<f64>() < cfg.uniform_mix {
        return SampleDraw {
            point: ws.sample_uniform(rng),
            selected_region: None,
        };
    }
    if rng.random::<f64>() < cfg.goal_bias {
        return SampleDraw {
            point: *goal,
            selected_region: None,
        };
    }
    let k = thompson_select(&partition.regions, rng);
    let region = &partition.regions[k];
    for _ in 0..CELL_REJECTION_BUDGET {
        let p = sample_box(&region.bbox_min, &region.bbox_max, rng);
        if partition.membership(&p) == k {
            return SampleDraw {
                point: p,
                selected_region: Some(k),
            };
        }
    }
    SampleDraw {
        point: ws.sample_uniform(rng),
        selected_region: None,
    }
}

/// The same mixture with the cell branch replaced by global uniform sampling.
pub fn draw_sample_uniform<R: Rng + ?Sized>(workspace: &Workspace, goal: &Vec3, cfg: &SamplerConfig, rng: &mut R) -> SampleDraw {
    let uniform_first = rng.random::<f64>() < cfg.uniform_mix;
    if !uniform_first && rng.random::<f64>() < cfg.goal_bias {
        return SampleDraw {
            point: *goal,
            selected_region: None,
        };
    }
    SampleDraw {
        point: workspace.sample_uniform(rng),
        selected_region: None,
    }
}

/// Bernoulli update of the selected region's posterior.
pub fn posterior_update(region: &mut SubRegion, success: bool) {
    if success {
        region.alpha += 1.0;
    } else {
        region.beta += 1.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Obstacle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{Beta as StatBeta, ChiSquared, ContinuousCDF};

    fn arena() -> Workspace {
        Workspace::new(Vec3::zeros(), Vec3::new(50.0, 50.0, 15.0)).unwrap()
    }

    fn region(alpha: f64, beta: f64) -> SubRegion {
        SubRegion {
            generator: Vec3::zeros(),
            alpha,
            beta,
            rho_obs: 0.0,
            bbox_min: Vec3::zeros(),
            bbox_max: Vec3::zeros(),
        }
    }

    #[test]
    fn prior_hand_values() {
        assert_eq!(beta_prior(0.0, 10.0), (11.0, 1.0));
        let (a, b) = beta_prior(0.5, 10.0);
        assert_eq!((a, b), (6.0, 6.0));
        assert_eq!(a / (a + b), 0.5);
        let (a, b) = beta_prior(1.0, 10.0);
        assert_eq!((a, b), (1.0, 11.0));
        assert!((a / (a + b) - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn lattice_for_default_arena() {
        assert_eq!(lattice_dims(27, &Vec3::repeat(10.0)), [3, 3, 3]);
        assert_eq!(lattice_dims(27, &arena().extent()), [3, 3, 3]);
        assert_eq!(lattice_dims(1, &arena().extent()), [1, 1, 1]);
        let d = lattice_dims(12, &arena().extent());
        assert_eq!(d.iter().product::<usize>(), 12);
    }

    #[test]
    fn partition_covers_workspace_and_bounds_cells() {
        let map = EnvironmentMap::empty(arena());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let part = build_partition(&map, &SamplerConfig::default(), &mut rng).unwrap();
        assert_eq!(part.len(), 27);
        for _ in 0..20_000 {
            let p = map.workspace().sample_uniform(&mut rng);
            let k = part.membership(&p);
            assert!(k < 27);
            let r = &part.regions[k];
            assert!((0..3).all(|i| p[i] >= r.bbox_min[i] - 1e-9 && p[i] <= r.bbox_max[i] + 1e-9));
        }
        for r in &part.regions {
            assert_eq!((r.alpha, r.beta), (11.0, 1.0));
        }
    }

    #[test]
    fn partition_densities_follow_obstacles() {
        let ws = arena();
        let o = Obstacle::cuboid(Vec3::new(8.0, 8.0, 7.5), Vec3::new(8.0, 8.0, 7.5)).unwrap();
        let map = EnvironmentMap::new(ws, vec![o]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let part = build_partition(&map, &SamplerConfig::default(), &mut rng).unwrap();
        let k = part.membership(&Vec3::new(5.0, 5.0, 7.0));
        let far = part.membership(&Vec3::new(45.0, 45.0, 7.0));
        assert!(part.regions[k].rho_obs > 0.5);
        assert_eq!(part.regions[far].rho_obs, 0.0);
        assert!(part.regions[k].posterior_mean() < part.regions[far].posterior_mean());
    }

    #[test]
    fn thompson_single_region() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(thompson_select(&[region(3.0, 4.0)], &mut rng), 0);
    }

    #[test]
    fn thompson_prefers_dominant_region() {
        // Oracle: P(X > Y) for X ~ Beta(1000,1), Y ~ Beta(1,1000) is 1 to
        // within 1e-12, so 99% of 1000 trials is a very loose floor.
        let d0 = StatBeta::new(1000.0, 1.0).unwrap();
        let d1 = StatBeta::new(1.0, 1000.0).unwrap();
        assert!(d0.cdf(0.99) < 1e-4 && d1.cdf(0.01) > 0.99);
        let regions = [region(1000.0, 1.0), region(1.0, 1000.0)];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let hits = (0..1000).filter(|_| thompson_select(&regions, &mut rng) == 0).count();
        assert!(hits as f64 / 1000.0 >= 0.99);
    }

    #[test]
    fn thompson_identical_posteriors_uniform_chi_square() {
        let k = 6;
        let regions: Vec<_> = (0..k).map(|_| region(4.0, 3.0)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 10_000;
        let mut counts = vec![0usize; k];
        for _ in 0..n {
            counts[thompson_select(&regions, &mut rng)] += 1;
        }
        let expected = n as f64 / k as f64;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        let crit = ChiSquared::new((k - 1) as f64).unwrap().inverse_cdf(0.99);
        assert!(chi2 < crit, "chi2 = {chi2}, critical = {crit}");
    }

    fn default_partition(seed: u64) -> Partition {
        let map = EnvironmentMap::empty(arena());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        build_partition(&map, &SamplerConfig::default(), &mut rng).unwrap()
    }

    #[test]
    fn mixture_collapses() {
        let part = default_partition(1);
        let goal = Vec3::new(40.0, 40.0, 5.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let all_uniform = SamplerConfig { uniform_mix: 1.0, ..Default::default() };
        for _ in 0..200 {
            let d = draw_sample(&part, &goal, &all_uniform, &mut rng);
            assert_eq!(d.selected_region, None);
            assert_eq!(d.branch(&goal), Branch::Uniform);
        }
        let all_goal = SamplerConfig { uniform_mix: 0.0, goal_bias: 1.0, ..Default::default() };
        for _ in 0..200 {
            assert_eq!(draw_sample(&part, &goal, &all_goal, &mut rng).point, goal);
        }
    }

    #[test]
    fn mixture_branch_frequencies() {
        let part = default_partition(4);
        let goal = Vec3::new(40.0, 40.0, 5.0);
        let cfg = SamplerConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 10_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            let d = draw_sample(&part, &goal, &cfg, &mut rng);
            counts[match d.branch(&goal) {
                Branch::Uniform => 0,
                Branch::Goal => 1,
                Branch::Region => 2,
            }] += 1;
        }
        for (c, p) in counts.iter().zip([0.2, 0.8 * 0.2, 0.8 * 0.8]) {
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((*c as f64 / n as f64 - p).abs() <= 3.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn region_draws_land_in_selected_cell() {
        let part = default_partition(6);
        let goal = Vec3::new(40.0, 40.0, 5.0);
        let cfg = SamplerConfig { uniform_mix: 0.0, goal_bias: 0.0, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let d = draw_sample(&part, &goal, &cfg, &mut rng);
            let k = d.selected_region.unwrap();
            assert_eq!(part.membership(&d.point), k);
        }
    }

    /// One-sample Kolmogorov-Smirnov statistic against U(lo, hi).
    fn ks_uniform(mut xs: Vec<f64>, lo: f64, hi: f64) -> f64 {
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, x)| {
                let f = (x - lo) / (hi - lo);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn uniform_branch_is_uniform_per_axis() {
        let part = default_partition(2);
        let goal = Vec3::new(40.0, 40.0, 5.0);
        let cfg = SamplerConfig { uniform_mix: 1.0, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let pts: Vec<Vec3> = (0..10_000).map(|_| draw_sample(&part, &goal, &cfg, &mut rng).point).collect();
        let ws = arena();
        // 99% critical value of the KS statistic: 1.628 / sqrt(n).
        let crit = 1.628 / (pts.len() as f64).sqrt();
        for axis in 0..3 {
            let d = ks_uniform(pts.iter().map(|p| p[axis]).collect(), ws.min_corner[axis], ws.max_corner[axis]);
            assert!(d < crit, "axis {axis}: D = {d}");
        }
    }

    #[test]
    fn posterior_increments() {
        let mut r = region(6.0, 6.0);
        posterior_update(&mut r, true);
        assert_eq!((r.alpha, r.beta), (7.0, 6.0));
        let mut r = region(6.0, 6.0);
        posterior_update(&mut r, false);
        assert_eq!((r.alpha, r.beta), (6.0, 7.0));
        let mut r = region(1.0, 1.0);
        (0..10).for_each(|_| posterior_update(&mut r, true));
        (0..10).for_each(|_| posterior_update(&mut r, false));
        assert_eq!((r.alpha, r.beta), (11.0, 11.0));
        assert_eq!(r.posterior_mean(), 0.5);
    }

    #[test]
    fn failing_region_loses_selection_share() {
        let mut regions = vec![region(6.0, 6.0), region(6.0, 6.0)];
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut last_mean = regions[1].posterior_mean();
        for _ in 0..200 {
            posterior_update(&mut regions[0], true);
            posterior_update(&mut regions[1], false);
            let m = regions[1].posterior_mean();
            assert!(m < last_mean);
            last_mean = m;
        }
        let picks = (0..2000).filter(|_| thompson_select(&regions, &mut rng) == 1).count();
        assert!((picks as f64) / 2000.0 < 0.05);
    }

    use proptest::prelude::*;
    proptest! {
        #[test]
        fn posterior_mean_closed_form(a0 in 1u32..40, b0 in 1u32..40, ys in prop::collection::vec(any::<bool>(), 0..60)) {
            let (a0, b0) = (a0 as f64, b0 as f64);
            let mut r = region(a0, b0);
            for &y in &ys {
                posterior_update(&mut r, y);
            }
            let s = ys.iter().filter(|&&y| y).count() as f64;
            let t = ys.len() as f64;
            prop_assert_eq!(r.posterior_mean(), (a0 + s) / (a0 + b0 + t));
        }

        #[test]
        fn membership_partitions_workspace(seed in 0u64..50, pt in prop::array::uniform3(0.0f64..1.0)) {
            let part = default_partition(seed);
            let e = arena().extent();
            let p = Vec3::from_fn(|i, _| pt[i] * e[i]);
            let k = part.membership(&p);
            let dk = (p - part.regions[k].generator).norm();
            for r in &part.regions {
                prop_assert!(dk <= (p - r.generator).norm());
            }
        }
    }
}

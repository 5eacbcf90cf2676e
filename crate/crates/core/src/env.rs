//! Workspace and obstacle geometry.
//!
//! Obstacles are axis-aligned boxes for every clearance and collision query.
//! Each box also carries superquadric exponents, used only by the repulsive
//! potential in [`crate::extend`]; the superquadric scale factors are the
//! box half-extents.

use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Vec3;

/// Exponents used when a plain box is evaluated as a superquadric.
pub const BOX_SUPERQUADRIC_EXPONENT: f64 = 4.0;

/// Rejection budget per requested sample in [`estimate_density`].
pub const DENSITY_REJECTION_FACTOR: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Workspace {
    pub min_corner: Vec3,
    pub max_corner: Vec3,
}

impl Workspace {
    pub fn new(min_corner: Vec3, max_corner: Vec3) -> Result<Self> {
        if (0..3).any(|i| !(min_corner[i] < max_corner[i])) {
            return Err(Error::Domain(format!(
                "workspace min {:?} must be below max {:?} on every axis",
                min_corner.as_slice(),
                max_corner.as_slice()
            )));
        }
        Ok(Self {
            min_corner,
            max_corner,
        })
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|i| p[i] >= self.min_corner[i] && p[i] <= self.max_corner[i])
    }

    pub fn extent(&self) -> Vec3 {
        self.max_corner - self.min_corner
    }

    pub fn center(&self) -> Vec3 {
        (self.min_corner + self.max_corner) * 0.5
    }

    pub fn volume(&self) -> f64 {
        let e = self.extent();
        e.x * e.y * e.z
    }

    pub fn clamp(&self, p: &Vec3) -> Vec3 {
        Vec3::from_fn(|i, _| p[i].clamp(self.min_corner[i], self.max_corner[i]))
    }

    /// Distance from an interior point to the nearest face.
    pub fn face_distance(&self, p: &Vec3) -> f64 {
        (0..3)
            .map(|i| (p[i] - self.min_corner[i]).min(self.max_corner[i] - p[i]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec3 {
        sample_box(&self.min_corner, &self.max_corner, rng)
    }
}

pub(crate) fn sample_box<R: Rng + ?Sized>(lo: &Vec3, hi: &Vec3, rng: &mut R) -> Vec3 {
    Vec3::new(
        lo.x + (hi.x - lo.x) * rng.random::<f64>(),
        lo.y + (hi.y - lo.y) * rng.random::<f64>(),
        lo.z + (hi.z - lo.z) * rng.random::<f64>(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObstacleShape {
    Box,
    /// Superquadric with exponents `a`, `b` (both ≥ 1).
    Superquadric { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obstacle {
    pub center: Vec3,
    pub half_extents: Vec3,
    pub shape: ObstacleShape,
}

impl Obstacle {
    pub fn cuboid(center: Vec3, half_extents: Vec3) -> Result<Self> {
        Self::new(center, half_extents, ObstacleShape::Box)
    }

    pub fn new(center: Vec3, half_extents: Vec3, shape: ObstacleShape) -> Result<Self> {
        if half_extents.iter().any(|h| !(*h > 0.0)) {
            return Err(Error::Domain(format!(
                "obstacle half extents must be positive, got {:?}",
                half_extents.as_slice()
            )));
        }
        if let ObstacleShape::Superquadric { a, b } = shape {
            if !(a >= 1.0 && b >= 1.0) {
                return Err(Error::Domain(format!(
                    "superquadric exponents must be >= 1, got a={a}, b={b}"
                )));
            }
        }
        Ok(Self {
            center,
            half_extents,
            shape,
        })
    }

    /// Exponents `(a, b)` of the superquadric that stands in for this obstacle.
    pub fn superquadric_exponents(&self) -> (f64, f64) {
        match self.shape {
            ObstacleShape::Box => (BOX_SUPERQUADRIC_EXPONENT, BOX_SUPERQUADRIC_EXPONENT),
            ObstacleShape::Superquadric { a, b } => (a, b),
        }
    }

    pub fn min_corner(&self) -> Vec3 {
        self.center - self.half_extents
    }

    pub fn max_corner(&self) -> Vec3 {
        self.center + self.half_extents
    }

    /// Euclidean distance from `p` to the box; zero inside or on the surface.
    pub fn distance(&self, p: &Vec3) -> f64 {
        let mut sq = 0.0;
        for i in 0..3 {
            let d = (p[i] - self.center[i]).abs() - self.half_extents[i];
            if d > 0.0 {
                sq += d * d;
            }
        }
        sq.sqrt()
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|i| (p[i] - self.center[i]).abs() <= self.half_extents[i])
    }
}

/// Implicit superquadric function of `obs` at `p`: negative inside, zero on the
/// surface, positive outside.
pub fn superquadric_value(obs: &Obstacle, p: &Vec3) -> f64 {
    let (a, b) = obs.superquadric_exponents();
    let q = p - obs.center;
    let f = obs.half_extents;
    let x = (q.x / f.x).abs().powf(2.0 * b);
    let y = (q.y / f.y).abs().powf(2.0 * b);
    let z = (q.z / f.z).abs().powf(2.0 * a);
    (x + y).powf(a / b) + z - 1.0
}

/// Immutable workspace plus obstacle set.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentMap {
    workspace: Workspace,
    obstacles: Vec<Obstacle>,
}

impl EnvironmentMap {
    pub fn new(workspace: Workspace, obstacles: Vec<Obstacle>) -> Result<Self> {
        for (k, o) in obstacles.iter().enumerate() {
            if !workspace.contains(&o.center) {
                return Err(Error::Domain(format!(
                    "obstacle {k} center {:?} lies outside the workspace",
                    o.center.as_slice()
                )));
            }
        }
        Ok(Self {
            workspace,
            obstacles,
        })
    }

    pub fn empty(workspace: Workspace) -> Self {
        Self {
            workspace,
            obstacles: Vec::new(),
        }
    }

    pub fn workspace(&self) -> &Workspace {
        &self.workspace
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        &self.obstacles
    }

    /// Whether `p` lies inside (or on) any obstacle.
    pub fn in_collision(&self, p: &Vec3) -> bool {
        self.obstacles.iter().any(|o| o.contains(p))
    }

    /// Distance from `p` to the nearest obstacle surface, or to the nearest
    /// workspace face when there are no obstacles.
    pub fn clearance(&self, p: &Vec3) -> Result<f64> {
        if !self.workspace.contains(p) {
            return Err(Error::Domain(format!(
                "point {:?} is outside the workspace",
                p.as_slice()
            )));
        }
        Ok(self.clearance_unchecked(p))
    }

    pub(crate) fn clearance_unchecked(&self, p: &Vec3) -> f64 {
        if self.obstacles.is_empty() {
            return self.workspace.face_distance(p);
        }
        let mut best = f64::INFINITY;
        for o in &self.obstacles {
            let d = o.distance(p);
            if d < best {
                best = d;
                if best == 0.0 {
                    break;
                }
            }
        }
        best
    }

    /// True iff the clearance is positive and at least `r_min` at every sample along
    /// `[p0, p1]`, with sample spacing at most `resolution` and both endpoints
    /// included.
    pub fn segment_clear(&self, p0: &Vec3, p1: &Vec3, r_min: f64, resolution: f64) -> Result<bool> {
        if !(resolution > 0.0) {
            return Err(Error::Domain(format!(
                "segment resolution must be positive, got {resolution}"
            )));
        }
        for p in [p0, p1] {
            if !self.workspace.contains(p) {
                return Err(Error::Domain(format!(
                    "segment endpoint {:?} is outside the workspace",
                    p.as_slice()
                )));
            }
        }
        Ok(self.segment_clear_unchecked(p0, p1, r_min, resolution))
    }

    pub(crate) fn segment_clear_unchecked(&self, p0: &Vec3, p1: &Vec3, r_min: f64, resolution: f64) -> bool {
        let len = (p1 - p0).norm();
        let n = ((len / resolution).ceil() as usize).max(1);
        let nf = n as f64;
        // The endpoint-weighted form makes the sample set identical in both
        // directions, bit for bit.
        (0..=n).all(|i| {
            let p = (p0 * (n - i) as f64 + p1 * i as f64) / nf;
            let d = self.clearance_unchecked(&p);
            d >= r_min && d > 0.0
        })
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: EnvironmentDoc = serde_json::from_str(text)?;
        doc.try_into()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&EnvironmentDoc::from(self))?)
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// Default sample spacing for [`EnvironmentMap::segment_clear`].
pub fn default_resolution(r_min: f64) -> f64 {
    0.25f64.min(r_min / 2.0)
}

/// Monte-Carlo fraction of the region's volume covered by obstacles.
///
/// Draws uniform points over the whole workspace, keeps the first
/// `n_samples` that satisfy `region_membership` and returns the fraction of
/// those that lie inside an obstacle.
pub fn estimate_density<R, F>(map: &EnvironmentMap, region_membership: F, n_samples: usize, rng: &mut R) -> Result<f64>
where
    R: Rng + ?Sized,
    F: Fn(&Vec3) -> bool,
{
    let ws = map.workspace();
    estimate_density_in(map, &ws.min_corner, &ws.max_corner, region_membership, n_samples, rng)
}

/// [`estimate_density`] with proposals drawn from the box `[lo, hi]`, which
/// must cover the region.
pub fn estimate_density_in<R, F>(
    map: &EnvironmentMap,
    lo: &Vec3,
    hi: &Vec3,
    region_membership: F,
    n_samples: usize,
    rng: &mut R,
) -> Result<f64>
where
    R: Rng + ?Sized,
    F: Fn(&Vec3) -> bool,
{
    if n_samples == 0 {
        return Err(Error::Domain("density estimation needs at least one sample".into()));
    }
    let budget = n_samples.saturating_mul(DENSITY_REJECTION_FACTOR);
    let mut accepted = 0usize;
    let mut covered = 0usize;
    for _ in 0..budget {
        let p = sample_box(lo, hi, rng);
        if !region_membership(&p) {
            continue;
        }
        accepted += 1;
        if map.in_collision(&p) {
            covered += 1;
        }
        if accepted == n_samples {
            break;
        }
    }
    if accepted == 0 {
        return Err(Error::Estimation(format!(
            "no sample landed in the region after {budget} proposals"
        )));
    }
    Ok(covered as f64 / accepted as f64)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct WorkspaceDoc {
    min: [f64; 3],
    max: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ObstacleDoc {
    center: [f64; 3],
    half_extents: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<f64>,
}

/// On-disk layout of an environment file.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct EnvironmentDoc {
    workspace: WorkspaceDoc,
    #[serde(default)]
    obstacles: Vec<ObstacleDoc>,
}

impl TryFrom<EnvironmentDoc> for EnvironmentMap {
    type Error = Error;

    fn try_from(doc: EnvironmentDoc) -> Result<Self> {
        let ws = Workspace::new(Vec3::from(doc.workspace.min), Vec3::from(doc.workspace.max))?;
        let obstacles = doc
            .obstacles
            .into_iter()
            .map(|o| {
                let shape = match (o.a, o.b) {
                    (None, None) => ObstacleShape::Box,
                    (a, b) => ObstacleShape::Superquadric {
                        a: a.unwrap_or(BOX_SUPERQUADRIC_EXPONENT),
                        b: b.unwrap_or(BOX_SUPERQUADRIC_EXPONENT),
                    },
                };
                Obstacle::new(Vec3::from(o.center), Vec3::from(o.half_extents), shape)
            })
            .collect::<Result<Vec<_>>>()?;
        EnvironmentMap::new(ws, obstacles)
    }
}

impl From<&EnvironmentMap> for EnvironmentDoc {
    fn from(map: &EnvironmentMap) -> Self {
        let ws = map.workspace();
        EnvironmentDoc {
            workspace: WorkspaceDoc {
                min: ws.min_corner.into(),
                max: ws.max_corner.into(),
            },
            obstacles: map
                .obstacles()
                .iter()
                .map(|o| {
                    let (a, b) = match o.shape {
                        ObstacleShape::Box => (None, None),
                        ObstacleShape::Superquadric { a, b } => (Some(a), Some(b)),
                    };
                    ObstacleDoc {
                        center: o.center.into(),
                        half_extents: o.half_extents.into(),
                        a,
                        b,
                    }
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn arena() -> Workspace {
        Workspace::new(Vec3::zeros(), Vec3::new(50.0, 50.0, 15.0)).unwrap()
    }

    fn unit_box_map() -> EnvironmentMap {
        let ws = Workspace::new(Vec3::repeat(-5.0), Vec3::repeat(5.0)).unwrap();
        let o = Obstacle::cuboid(Vec3::zeros(), Vec3::repeat(0.5)).unwrap();
        EnvironmentMap::new(ws, vec![o]).unwrap()
    }

    /// Brute-force point-to-box distance: minimise over a dense grid of
    /// surface points.
    fn brute_box_distance(o: &Obstacle, p: &Vec3) -> f64 {
        let n = 100;
        let lo = o.min_corner();
        let hi = o.max_corner();
        let mut best = f64::INFINITY;
        for i in 0..=n {
            for j in 0..=n {
                let u = i as f64 / n as f64;
                let v = j as f64 / n as f64;
                for face in 0..6 {
                    let axis = face / 2;
                    let fixed = if face % 2 == 0 { lo[axis] } else { hi[axis] };
                    let (a1, a2) = ((axis + 1) % 3, (axis + 2) % 3);
                    let mut q = Vec3::zeros();
                    q[axis] = fixed;
                    q[a1] = lo[a1] + u * (hi[a1] - lo[a1]);
                    q[a2] = lo[a2] + v * (hi[a2] - lo[a2]);
                    best = best.min((q - p).norm());
                }
            }
        }
        best
    }

    #[test]
    fn clearance_on_surface_is_zero() {
        let map = unit_box_map();
        assert_eq!(map.clearance(&Vec3::new(0.5, 0.1, -0.2)).unwrap(), 0.0);
    }

    #[test]
    fn clearance_empty_map_uses_faces() {
        let map = EnvironmentMap::empty(arena());
        assert_eq!(map.clearance(&Vec3::new(25.0, 25.0, 7.5)).unwrap(), 7.5);
    }

    #[test]
    fn clearance_matches_brute_force_box_distance() {
        let map = unit_box_map();
        let p = Vec3::new(2.0, 0.0, 0.0);
        let oracle = brute_box_distance(&map.obstacles()[0], &p);
        assert!((oracle - 1.5).abs() < 1e-12);
        assert!((map.clearance(&p).unwrap() - 1.5).abs() < 1e-12);

        let q = Vec3::new(1.3, -2.1, 0.9);
        let oracle = brute_box_distance(&map.obstacles()[0], &q);
        assert!((map.clearance(&q).unwrap() - oracle).abs() < 1e-3);
    }

    #[test]
    fn clearance_outside_workspace_is_domain_error() {
        let map = unit_box_map();
        assert!(matches!(map.clearance(&Vec3::new(6.0, 0.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn degenerate_segment() {
        let map = unit_box_map();
        let p = Vec3::new(3.0, 0.0, 0.0);
        assert!(map.segment_clear(&p, &p, 1.0, 0.25).unwrap());
    }

    #[test]
    fn segment_through_obstacle_center_is_blocked() {
        let map = unit_box_map();
        let a = Vec3::new(-3.0, 0.0, 0.0);
        let b = Vec3::new(3.0, 0.0, 0.0);
        for r in [0.0, 0.1, 1.0] {
            assert!(!map.segment_clear(&a, &b, r, 0.25).unwrap());
        }
    }

    #[test]
    fn grazing_segment_at_exact_distance_is_clear() {
        // Segment parallel to the x axis at y = 0.5 + r_min; exact clearance
        // along the stretch beside the box equals r_min.
        let map = unit_box_map();
        let r_min = 1.0;
        let a = Vec3::new(-3.0, 1.5, 0.0);
        let b = Vec3::new(3.0, 1.5, 0.0);
        assert!(map.segment_clear(&a, &b, r_min, 0.25).unwrap());
        // Dense oracle: the segment really grazes the box at distance r_min.
        let dense = (0..=600)
            .map(|i| {
                let p = a + (b - a) * (i as f64 / 600.0);
                brute_box_distance(&map.obstacles()[0], &p)
            })
            .fold(f64::INFINITY, f64::min);
        assert!((dense - r_min).abs() < 1e-5);
        assert!(!map.segment_clear(&a, &b, r_min + 1e-9, 0.25).unwrap());
    }

    #[test]
    fn superquadric_values() {
        let sphere = Obstacle::new(Vec3::new(1.0, 2.0, 3.0), Vec3::repeat(1.0), ObstacleShape::Superquadric { a: 1.0, b: 1.0 }).unwrap();
        assert_eq!(superquadric_value(&sphere, &sphere.center), -1.0);
        assert!((superquadric_value(&sphere, &(sphere.center + Vec3::x()))).abs() < 1e-15);
        let blocky = Obstacle::new(Vec3::zeros(), Vec3::repeat(1.0), ObstacleShape::Superquadric { a: 4.0, b: 4.0 }).unwrap();
        assert!((superquadric_value(&blocky, &Vec3::repeat(1.0)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn density_trivial_cases() {
        let map = unit_box_map();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let free = estimate_density(&map, |p| p.x > 2.0, 500, &mut rng).unwrap();
        assert_eq!(free, 0.0);
        let full = estimate_density(&map, |p| p.norm() < 0.4, 200, &mut rng).unwrap();
        assert_eq!(full, 1.0);
    }

    #[test]
    fn density_half_covered_region() {
        // Region: the cube [-1,1]^3; obstacle covers its x<0 half.
        let ws = Workspace::new(Vec3::repeat(-2.0), Vec3::repeat(2.0)).unwrap();
        let o = Obstacle::cuboid(Vec3::new(-0.75, 0.0, 0.0), Vec3::new(0.75, 1.5, 1.5)).unwrap();
        let map = EnvironmentMap::new(ws, vec![o]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rho = estimate_density(&map, |p| p.iter().all(|c| c.abs() <= 1.0), 500, &mut rng).unwrap();
        let sigma = (0.25f64 / 500.0).sqrt();
        assert!((rho - 0.5).abs() <= 3.0 * sigma, "rho = {rho}");
    }

    #[test]
    fn density_reproducible_and_errors() {
        let map = unit_box_map();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            estimate_density(&map, |p| p.x < 1.0, 300, &mut rng).unwrap()
        };
        assert_eq!(run(3).to_bits(), run(3).to_bits());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(estimate_density(&map, |_| false, 2, &mut rng), Err(Error::Estimation(_))));
    }

    #[test]
    fn json_roundtrip() {
        let ws = arena();
        let obs = vec![
            Obstacle::cuboid(Vec3::new(10.0, 10.0, 5.0), Vec3::new(2.0, 2.0, 5.0)).unwrap(),
            Obstacle::new(Vec3::new(20.0, 30.0, 7.0), Vec3::repeat(1.5), ObstacleShape::Superquadric { a: 2.0, b: 3.0 }).unwrap(),
        ];
        let map = EnvironmentMap::new(ws, obs).unwrap();
        let back = EnvironmentMap::from_json(&map.to_json().unwrap()).unwrap();
        assert_eq!(map, back);
    }

    #[test]
    fn rejects_obstacle_outside_workspace() {
        let o = Obstacle::cuboid(Vec3::new(60.0, 1.0, 1.0), Vec3::repeat(1.0)).unwrap();
        assert!(EnvironmentMap::new(arena(), vec![o]).is_err());
    }

    fn random_box_map() -> EnvironmentMap {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ws = arena();
        let obs = (0..20)
            .map(|_| {
                let c = ws.sample_uniform(&mut rng);
                let h = Vec3::new(0.5 + 3.0 * rng.random::<f64>(), 0.5 + 3.0 * rng.random::<f64>(), 0.5 + 3.0 * rng.random::<f64>());
                Obstacle::cuboid(c, h).unwrap()
            })
            .collect();
        EnvironmentMap::new(ws, obs).unwrap()
    }

    proptest! {
        #[test]
        fn clearance_is_one_lipschitz(
            a in prop::array::uniform3(0.0f64..1.0),
            b in prop::array::uniform3(0.0f64..1.0),
        ) {
            let map = random_box_map();
            let e = map.workspace().extent();
            let p = Vec3::from_fn(|i, _| a[i] * e[i]);
            let q = Vec3::from_fn(|i, _| b[i] * e[i]);
            let dc = (map.clearance(&p).unwrap() - map.clearance(&q).unwrap()).abs();
            prop_assert!(dc <= (p - q).norm() + 1e-12);
        }

        #[test]
        fn segment_clear_is_symmetric(
            a in prop::array::uniform3(0.0f64..1.0),
            b in prop::array::uniform3(0.0f64..1.0),
            r in 0.0f64..2.0,
        ) {
            let map = random_box_map();
            let e = map.workspace().extent();
            let p = Vec3::from_fn(|i, _| a[i] * e[i]);
            let q = Vec3::from_fn(|i, _| b[i] * e[i]);
            prop_assert_eq!(
                map.segment_clear(&p, &q, r, 0.25).unwrap(),
                map.segment_clear(&q, &p, r, 0.25).unwrap()
            );
        }

        #[test]
        fn superquadric_sign_matches_radial_membership(
            a in 1.0f64..5.0,
            b in 1.0f64..5.0,
            dir in prop::array::uniform3(-1.0f64..1.0),
            scale in 0.05f64..3.0,
        ) {
            let u = Vec3::from(dir);
            prop_assume!(u.norm() > 1e-3);
            let u = u.normalize();
            let half = Vec3::new(1.5, 0.8, 2.0);
            let obs = Obstacle::new(Vec3::new(0.3, -0.2, 0.1), half, ObstacleShape::Superquadric { a, b }).unwrap();
            // Membership oracle: along the ray through u, the implicit form is
            // homogeneous of degree 2a, so the surface sits at radius
            // g(u)^(-1/(2a)).
            let g = ((u.x / half.x).abs().powf(2.0 * b) + (u.y / half.y).abs().powf(2.0 * b)).powf(a / b)
                + (u.z / half.z).abs().powf(2.0 * a);
            let surface = g.powf(-1.0 / (2.0 * a));
            let r = scale * surface;
            let value = superquadric_value(&obs, &(obs.center + u * r));
            if scale < 0.999 {
                prop_assert!(value < 0.0);
            } else if scale > 1.001 {
                prop_assert!(value > 0.0);
            }
            let on = superquadric_value(&obs, &(obs.center + u * surface));
            prop_assert!(on.abs() < 1e-9);
        }
    }
}

//! Tree-level properties of the search: structure, cost bookkeeping,
//! monotone improvement and reproducibility.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tuberrt::env::{EnvironmentMap, Obstacle, Workspace};
use tuberrt::planner::{edge_cost, path_cost, plan, ExtendConfig, PlanReport, PlannerConfig, Variant};
use tuberrt::sampler::SamplerConfig;
use tuberrt::Vec3;

fn cluttered() -> EnvironmentMap {
    let ws = Workspace::new(Vec3::zeros(), Vec3::new(20.0, 20.0, 8.0)).unwrap();
    let boxes = [
        (Vec3::new(6.0, 6.0, 4.0), Vec3::new(1.5, 1.5, 4.0)),
        (Vec3::new(12.0, 9.0, 4.0), Vec3::new(1.0, 3.0, 4.0)),
        (Vec3::new(9.0, 15.0, 3.0), Vec3::new(2.0, 1.0, 3.0)),
    ];
    let obstacles = boxes.iter().map(|(c, h)| Obstacle::cuboid(*c, *h).unwrap()).collect();
    EnvironmentMap::new(ws, obstacles).unwrap()
}

fn sampler() -> SamplerConfig {
    SamplerConfig {
        regions: 8,
        density_samples: 200,
        ..Default::default()
    }
}

fn run(variant: Variant, seed: u64, iters: usize) -> PlanReport {
    let cfg = PlannerConfig {
        max_iters: iters,
        r_min: 0.6,
        variant,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    plan(&cluttered(), &Vec3::new(2.0, 2.0, 2.0), &Vec3::new(18.0, 18.0, 5.0), &sampler(), &ExtendConfig::default(), &cfg, &mut rng).unwrap()
}

fn variant() -> impl Strategy<Value = Variant> {
    prop::sample::select(Variant::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn tree_is_rooted_acyclic_and_clear(v in variant(), seed in 0u64..1000) {
        let rep = run(v, seed, 400);
        let map = cluttered();
        let tree = &rep.tree;
        prop_assert_eq!(tree.node(0).parent, None);
        for n in tree.nodes().iter().skip(1) {
            let lineage = tree.lineage(n.id);
            prop_assert_eq!(lineage[0], 0);
            prop_assert_eq!(*lineage.last().unwrap(), n.id);
            prop_assert!(lineage.len() <= tree.len());
            let p = n.parent.unwrap();
            prop_assert!(tree.node(p).children().contains(&n.id));
            prop_assert!(n.clearance_r > 0.6);
            prop_assert!(map.segment_clear(&tree.node(p).position, &n.position, 0.6, 0.25).unwrap());
        }
    }

    #[test]
    fn stored_costs_match_recomputation(v in variant(), seed in 0u64..1000) {
        let rep = run(v, seed, 400);
        let tree = &rep.tree;
        let cost = PlannerConfig::default().cost;
        for n in tree.nodes().iter().skip(1) {
            let p = n.parent.unwrap();
            let e = edge_cost(tree.parent_position(p), &tree.node(p).position, &n.position, &cost).unwrap();
            prop_assert!((tree.node(p).cost + e - n.cost).abs() <= 1e-9 * n.cost.max(1.0));
        }
        if let Some(path) = &rep.path {
            let again = path_cost(&path.waypoints, &cost).unwrap();
            prop_assert!((again - path.metrics.cost).abs() <= 1e-9 * again.max(1.0));
        }
    }

    #[test]
    fn more_iterations_never_worsen_the_best_path(v in variant(), seed in 0u64..1000) {
        let short = run(v, seed, 250);
        let long = run(v, seed, 500);
        for (a, b) in short.tree.nodes().iter().zip(long.tree.nodes()) {
            prop_assert_eq!(a.position, b.position);
        }
        if let Some(a) = &short.path {
            let b = long.path.as_ref().expect("a longer run keeps the goal connection");
            prop_assert!(b.metrics.cost <= a.metrics.cost + 1e-12);
        }
    }

    #[test]
    fn fixed_seed_is_bit_reproducible(v in variant(), seed in 0u64..1000) {
        let a = run(v, seed, 200);
        let b = run(v, seed, 200);
        prop_assert_eq!(a.tree.nodes(), b.tree.nodes());
        prop_assert_eq!(a.path.map(|p| p.waypoints), b.path.map(|p| p.waypoints));
        prop_assert_eq!(a.stats.collision_checks_total, b.stats.collision_checks_total);
    }
}

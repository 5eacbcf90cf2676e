//! Search tree with a k-d tree spatial index.

use kiddo::{KdTree, SquaredEuclidean};
use serde::{Deserialize, Serialize};

use crate::Vec3;

/// Query radii are widened by this relative amount before the exact
/// distance filter, so rounding inside the index never drops a point.
const RADIUS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub position: Vec3,
    pub parent: Option<usize>,
    /// Cost-to-come from the root.
    pub cost: f64,
    /// Clearance radius at `position` [m].
    pub clearance_r: f64,
    /// Accumulated heading change from the root [rad].
    pub cum_turning: f64,
    #[serde(skip)]
    pub(crate) children: Vec<usize>,
}

impl Node {
    pub fn children(&self) -> &[usize] {
        &self.children
    }
}

#[derive(Debug, Clone)]
pub struct Tree {
    nodes: Vec<Node>,
    index: KdTree<f64, 3>,
}

impl Tree {
    /// Tree holding only the root.
    pub fn new(root: Vec3, clearance_r: f64) -> Self {
        let mut t = Self {
            nodes: Vec::new(),
            index: KdTree::new(),
        };
        t.nodes.push(Node {
            id: 0,
            position: root,
            parent: None,
            cost: 0.0,
            clearance_r,
            cum_turning: 0.0,
            children: Vec::new(),
        });
        t.index.add(&root.into(), 0);
        t
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub(crate) fn node_mut(&mut self, id: usize) -> &mut Node {
        &mut self.nodes[id]
    }

    pub fn parent_position(&self, id: usize) -> Option<&Vec3> {
        self.nodes[id].parent.map(|p| &self.nodes[p].position)
    }

    pub(crate) fn push(&mut self, position: Vec3, parent: usize, cost: f64, clearance_r: f64, cum_turning: f64) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node {
            id,
            position,
            parent: Some(parent),
            cost,
            clearance_r,
            cum_turning,
            children: Vec::new(),
        });
        self.nodes[parent].children.push(id);
        self.index.add(&position.into(), id as u64);
        id
    }

    /// Moves `id` under `new_parent`.
    pub(crate) fn reparent(&mut self, id: usize, new_parent: usize) {
        if let Some(old) = self.nodes[id].parent {
            self.nodes[old].children.retain(|&c| c != id);
        }
        self.nodes[id].parent = Some(new_parent);
        self.nodes[new_parent].children.push(id);
    }

    /// Exact nearest node; ties go to the lowest id.
    pub fn nearest(&self, p: &Vec3) -> usize {
        let hit = self.index.nearest_one::<SquaredEuclidean>(&(*p).into());
        let best = (self.nodes[hit.item as usize].position - p).norm_squared();
        self.index
            .within_unsorted::<SquaredEuclidean>(&(*p).into(), best * (1.0 + RADIUS_SLACK))
            .into_iter()
            .map(|n| n.item as usize)
            .filter(|&id| (self.nodes[id].position - p).norm_squared() <= best)
            .min()
            .unwrap_or(hit.item as usize)
    }

    /// Ids of all nodes within `r` of `p`, in increasing id order.
    pub fn within(&self, p: &Vec3, r: f64) -> Vec<usize> {
        let r2 = r * r * (1.0 + RADIUS_SLACK);
        let mut out: Vec<usize> = self
            .index
            .within_unsorted::<SquaredEuclidean>(&(*p).into(), r2)
            .into_iter()
            .map(|n| n.item as usize)
            .filter(|&id| (self.nodes[id].position - p).norm() <= r)
            .collect();
        out.sort_unstable();
        out
    }

    /// Ids of the `k` nodes nearest to `p` within `r`, in increasing id
    /// order.
    pub fn nearest_within(&self, p: &Vec3, r: f64, k: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .index
            .nearest_n::<SquaredEuclidean>(&(*p).into(), k)
            .into_iter()
            .map(|n| n.item as usize)
            .filter(|&id| (self.nodes[id].position - p).norm() <= r)
            .collect();
        out.sort_unstable();
        out
    }

    /// Node ids from the root to `id`.
    pub fn lineage(&self, id: usize) -> Vec<usize> {
        let mut out = vec![id];
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            out.push(p);
            cur = p;
        }
        out.reverse();
        out
    }

    pub fn is_ancestor(&self, candidate: usize, id: usize) -> bool {
        let mut cur = Some(id);
        while let Some(c) = cur {
            if c == candidate {
                return true;
            }
            cur = self.nodes[c].parent;
        }
        false
    }

    /// Ids of the subtree rooted at `id`, breadth first.
    pub fn subtree(&self, id: usize) -> Vec<usize> {
        let mut out = vec![id];
        let mut i = 0;
        while i < out.len() {
            out.extend_from_slice(&self.nodes[out[i]].children);
            i += 1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn build(points: &[Vec3]) -> Tree {
        let mut t = Tree::new(points[0], 1.0);
        for p in &points[1..] {
            t.push(*p, 0, 1.0, 1.0, 0.0);
        }
        t
    }

    #[test]
    fn lineage_and_subtree() {
        let mut t = Tree::new(Vec3::zeros(), 1.0);
        let a = t.push(Vec3::x(), 0, 1.0, 1.0, 0.0);
        let b = t.push(Vec3::y(), a, 2.0, 1.0, 0.0);
        let c = t.push(Vec3::z(), 0, 1.0, 1.0, 0.0);
        assert_eq!(t.lineage(b), vec![0, a, b]);
        assert!(t.is_ancestor(a, b) && !t.is_ancestor(c, b));
        t.reparent(b, c);
        assert_eq!(t.lineage(b), vec![0, c, b]);
        assert_eq!(t.subtree(0), vec![0, a, c, b]);
        assert!(t.node(a).children().is_empty());
    }

    proptest! {
        #[test]
        fn queries_match_brute_force(
            pts in prop::collection::vec(prop::array::uniform3(0.0f64..1.0), 1..120),
            q in prop::array::uniform3(0.0f64..1.0),
            r in 0.0f64..6.0,
            k in 1usize..20,
        ) {
            let scale = Vec3::new(20.0, 10.0, 5.0);
            let pts: Vec<Vec3> = pts.iter().map(|p| Vec3::from(*p).component_mul(&scale)).collect();
            let q = Vec3::from(q).component_mul(&scale);
            let t = build(&pts);
            let want = (0..pts.len())
                .min_by(|&a, &b| (pts[a] - q).norm_squared().partial_cmp(&(pts[b] - q).norm_squared()).unwrap().then(a.cmp(&b)))
                .unwrap();
            prop_assert_eq!(t.nearest(&q), want);
            let near: Vec<usize> = (0..pts.len()).filter(|&i| (pts[i] - q).norm() <= r).collect();
            prop_assert_eq!(t.within(&q, r), near.clone());
            let mut by_dist = near;
            by_dist.sort_by(|&a, &b| (pts[a] - q).norm_squared().total_cmp(&(pts[b] - q).norm_squared()));
            let cut = by_dist.get(k - 1).map(|&i| (pts[i] - q).norm_squared());
            let capped = t.nearest_within(&q, r, k);
            prop_assert_eq!(capped.len(), by_dist.len().min(k));
            if let Some(cut) = cut {
                prop_assert!(capped.iter().all(|&i| (pts[i] - q).norm_squared() <= cut));
            }
        }
    }
}

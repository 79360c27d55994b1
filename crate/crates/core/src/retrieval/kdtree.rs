//! Leaf-bucketed KD-tree over unit vectors with exact and budgeted search.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

pub const DEFAULT_BUCKET_SIZE: usize = 8;
pub const UNIT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Exact,
    /// Best-bin-first search that stops after visiting this many leaves.
    Approx { budget: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    /// Position of the point in build order.
    pub id: usize,
    pub sq_dist: f64,
    pub similarity: f64,
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { ids: Vec<usize> },
    Split { dim: usize, value: f64, left: usize, right: usize },
}

#[derive(Debug, Clone)]
pub struct KdTree {
    dim: usize,
    bucket_size: usize,
    points: Vec<f64>,
    nodes: Vec<Node>,
    leaves: usize,
}

/// Squared Euclidean distance.
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Cosine of two unit vectors from their squared distance: `1 − ‖a−b‖²/2`.
pub fn unit_cosine(sq_dist: f64) -> f64 {
    1.0 - sq_dist / 2.0
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    unit_cosine(sq_dist(a, b))
}

pub fn check_unit(v: &[f64]) -> Result<()> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_TOLERANCE || !norm.is_finite() {
        return Err(Error::NotNormalized(norm));
    }
    Ok(())
}

/// Orders candidates by distance, then by insertion index.
fn closer(a: (f64, usize), b: (f64, usize)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

struct Best {
    k: usize,
    items: Vec<(f64, usize)>,
}

impl Best {
    fn worst(&self) -> f64 {
        if self.items.len() < self.k {
            f64::INFINITY
        } else {
            self.items[self.items.len() - 1].0
        }
    }

    fn offer(&mut self, cand: (f64, usize)) {
        if self.items.len() == self.k && !closer(cand, self.items[self.k - 1]) {
            return;
        }
        let pos = self.items.partition_point(|&x| closer(x, cand));
        self.items.insert(pos, cand);
        self.items.truncate(self.k);
    }
}

#[derive(PartialEq)]
struct Pending {
    bound: f64,
    node: usize,
    offsets: Vec<f64>,
}

impl Eq for Pending {}

impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on bound, FIFO-ish on node index for determinism.
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl KdTree {
    /// Builds a tree over `vectors` (each of length `dim`), splitting at the
    /// median of the dimension with the largest spread.
    pub fn build(vectors: &[&[f64]], dim: usize, bucket_size: usize) -> Result<Self> {
        if bucket_size == 0 {
            return Err(Error::InvalidConfig("bucket size must be at least 1".into()));
        }
        let mut points = Vec::with_capacity(vectors.len() * dim);
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            points.extend_from_slice(v);
        }
        let mut tree = KdTree {
            dim,
            bucket_size,
            points,
            nodes: Vec::new(),
            leaves: 0,
        };
        if !vectors.is_empty() {
            let ids: Vec<usize> = (0..vectors.len()).collect();
            tree.build_node(ids);
        }
        Ok(tree)
    }

    fn point(&self, id: usize) -> &[f64] {
        &self.points[id * self.dim..(id + 1) * self.dim]
    }

    fn build_node(&mut self, mut ids: Vec<usize>) -> usize {
        let at = self.nodes.len();
        self.nodes.push(Node::Leaf { ids: Vec::new() });
        let split_dim = (ids.len() > self.bucket_size)
            .then(|| self.widest_dim(&ids))
            .flatten();
        let Some(dim) = split_dim else {
            self.leaves += 1;
            self.nodes[at] = Node::Leaf { ids };
            return at;
        };
        ids.sort_by(|&a, &b| {
            self.point(a)[dim]
                .total_cmp(&self.point(b)[dim])
                .then(a.cmp(&b))
        });
        let mid = ids.len() / 2;
        let value = self.point(ids[mid])[dim];
        let right_ids = ids.split_off(mid);
        let left = self.build_node(ids);
        let right = self.build_node(right_ids);
        self.nodes[at] = Node::Split { dim, value, left, right };
        at
    }

    /// Dimension of largest spread; `None` when all points coincide.
    fn widest_dim(&self, ids: &[usize]) -> Option<usize> {
        let mut best = None;
        let mut best_spread = 0.0;
        for d in 0..self.dim {
            let (lo, hi) = ids.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                let x = self.point(i)[d];
                (lo.min(x), hi.max(x))
            });
            if hi - lo > best_spread {
                best_spread = hi - lo;
                best = Some(d);
            }
        }
        best
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bucket_size(&self) -> usize {
        self.bucket_size
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        if self.nodes.is_empty() {
            0
        } else {
            go(&self.nodes, 0)
        }
    }

    /// Point ids in leaf order (left to right).
    pub fn leaf_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = if self.nodes.is_empty() { vec![] } else { vec![0] };
        while let Some(at) = stack.pop() {
            match &self.nodes[at] {
                Node::Leaf { ids } => out.extend(ids),
                Node::Split { left, right, .. } => {
                    stack.push(*right);
                    stack.push(*left);
                }
            }
        }
        out
    }

    /// Checks that every point lies on the correct side of each split
    /// plane above it.
    pub fn respects_splits(&self) -> bool {
        fn go(t: &KdTree, at: usize, bounds: &mut Vec<(usize, f64, bool)>) -> bool {
            match &t.nodes[at] {
                Node::Leaf { ids } => ids.iter().all(|&i| {
                    bounds.iter().all(|&(d, v, left)| {
                        let x = t.point(i)[d];
                        if left {
                            x <= v
                        } else {
                            x >= v
                        }
                    })
                }),
                Node::Split { dim, value, left, right } => {
                    bounds.push((*dim, *value, true));
                    let l = go(t, *left, bounds);
                    bounds.pop();
                    bounds.push((*dim, *value, false));
                    let r = go(t, *right, bounds);
                    bounds.pop();
                    l && r
                }
            }
        }
        self.nodes.is_empty() || go(self, 0, &mut Vec::new())
    }

    /// The `k` nearest points to a unit query, closest first.
    pub fn knn(&self, q: &[f64], k: usize, mode: SearchMode) -> Result<Vec<Neighbor>> {
        if k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if q.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: q.len(),
            });
        }
        check_unit(q)?;
        let mut best = Best {
            k,
            items: Vec::with_capacity(k + 1),
        };
        if !self.nodes.is_empty() {
            match mode {
                SearchMode::Exact => self.exact(0, q, &mut best),
                SearchMode::Approx { budget } => self.best_bin_first(q, budget.max(1), &mut best),
            }
        }
        Ok(best
            .items
            .into_iter()
            .map(|(d, id)| Neighbor {
                id,
                sq_dist: d,
                similarity: unit_cosine(d),
            })
            .collect())
    }

    fn scan_leaf(&self, ids: &[usize], q: &[f64], best: &mut Best) {
        for &i in ids {
            best.offer((sq_dist(q, self.point(i)), i));
        }
    }

    fn exact(&self, at: usize, q: &[f64], best: &mut Best) {
        match &self.nodes[at] {
            Node::Leaf { ids } => self.scan_leaf(ids, q, best),
            Node::Split { dim, value, left, right } => {
                let diff = q[*dim] - value;
                let (near, far) = if diff <= 0.0 { (*left, *right) } else { (*right, *left) };
                self.exact(near, q, best);
                // Equal distances must still be visited so index ties resolve
                // exactly as a linear scan would.
                if diff * diff <= best.worst() {
                    self.exact(far, q, best);
                }
            }
        }
    }

    fn best_bin_first(&self, q: &[f64], budget: usize, best: &mut Best) {
        let mut heap = BinaryHeap::new();
        heap.push(Pending {
            bound: 0.0,
            node: 0,
            offsets: vec![0.0; self.dim],
        });
        let mut visited = 0;
        while let Some(Pending { bound, node, offsets }) = heap.pop() {
            if bound > best.worst() {
                break;
            }
            let mut at = node;
            // Descend to a leaf, queueing the far side of each split with an
            // incrementally tightened lower bound on its distance.
            loop {
                match &self.nodes[at] {
                    Node::Leaf { ids } => {
                        self.scan_leaf(ids, q, best);
                        visited += 1;
                        break;
                    }
                    Node::Split { dim, value, left, right } => {
                        let diff = q[*dim] - value;
                        let (near, far) = if diff <= 0.0 { (*left, *right) } else { (*right, *left) };
                        let old = offsets[*dim];
                        let far_bound = bound - old * old + diff * diff;
                        if far_bound <= best.worst() {
                            let mut far_offsets = offsets.clone();
                            far_offsets[*dim] = diff;
                            heap.push(Pending {
                                bound: far_bound,
                                node: far,
                                offsets: far_offsets,
                            });
                        }
                        at = near;
                    }
                }
            }
            if visited >= budget {
                break;
            }
        }
    }
}

/// Linear scan, the reference for [`KdTree::knn`] in exact mode.
pub fn brute_force_knn(vectors: &[&[f64]], q: &[f64], k: usize) -> Vec<Neighbor> {
    let mut best = Best {
        k,
        items: Vec::with_capacity(k + 1),
    };
    for (i, v) in vectors.iter().enumerate() {
        best.offer((sq_dist(q, v), i));
    }
    best.items
        .into_iter()
        .map(|(d, id)| Neighbor {
            id,
            sq_dist: d,
            similarity: unit_cosine(d),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(v: &[f64]) -> Vec<f64> {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter().map(|x| x / n).collect()
    }

    #[test]
    fn empty_tree_finds_nothing() {
        let t = KdTree::build(&[], 3, 4).unwrap();
        assert!(t.is_empty());
        assert!(t.knn(&[1.0, 0.0, 0.0], 1, SearchMode::Exact).unwrap().is_empty());
    }

    #[test]
    fn single_point_is_always_nearest() {
        let p = unit(&[1.0, 2.0, 3.0]);
        let t = KdTree::build(&[&p], 3, 4).unwrap();
        for q in [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0]] {
            let n = t.knn(&q, 3, SearchMode::Exact).unwrap();
            assert_eq!(n.len(), 1);
            assert_eq!(n[0].id, 0);
        }
    }

    #[test]
    fn rejects_non_unit_and_wrong_dims() {
        let p = [1.0, 0.0];
        let t = KdTree::build(&[&p], 2, 4).unwrap();
        let err = t.knn(&[2.0, 0.0], 1, SearchMode::Exact).unwrap_err();
        assert!(err.to_string().contains("vector not normalized"));
        assert!(matches!(t.knn(&[1.0], 1, SearchMode::Exact), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(KdTree::build(&[&[1.0][..]], 2, 4), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn duplicates_resolve_by_insertion_index() {
        let a = [1.0, 0.0];
        let pts: Vec<&[f64]> = vec![&a; 20];
        let t = KdTree::build(&pts, 2, 2).unwrap();
        let n = t.knn(&a, 3, SearchMode::Exact).unwrap();
        assert_eq!(n.iter().map(|x| x.id).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn identity_on_axes() {
        // Orthogonal unit vectors: distance² 2, cosine 0.
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]), 0.0);
        assert_eq!(cosine(&[1.0, 0.0], &[-1.0, 0.0]), -1.0);
    }
}

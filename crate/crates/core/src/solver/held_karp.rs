use crate::graph::{MetricClosure, NodeId};

use super::SolveError;

/// Largest target set the exact solvers accept. The tables grow as `2^k * k`.
pub const MAX_TARGETS: usize = 20;

const NO_PARENT: u8 = u8::MAX;

/// Candidates closer than this (relative) count as ties and keep the smaller index,
/// so rounding noise never decides between equally long tours.
const TIE: f64 = 1e-12;

#[inline]
fn improves(cand: f64, best: f64) -> bool {
    if best.is_finite() {
        cand < best - TIE * (1.0 + best.abs())
    } else {
        cand < best
    }
}

/// Held–Karp table for paths that start at `root` and visit target subsets.
///
/// `length(mask, i)` is the shortest path from the root through every target in
/// `mask`, ending at target `i`. Targets are indexed by their position in the
/// (sorted) target list, so ties always resolve towards the smaller node id.
#[derive(Debug, Clone)]
pub struct HeldKarpTable {
    root: NodeId,
    targets: Vec<NodeId>,
    length: Vec<f64>,
    parent: Vec<u8>,
}

impl HeldKarpTable {
    pub fn build(closure: &MetricClosure, root: NodeId, targets: &[NodeId]) -> Result<Self, SolveError> {
        let k = targets.len();
        if k > MAX_TARGETS {
            return Err(SolveError::TooManyTargets { count: k, cap: MAX_TARGETS });
        }
        for &t in targets {
            if t >= closure.node_count() || t == root {
                return Err(SolveError::InvalidTarget(t));
            }
        }
        let size = 1usize << k;
        let mut length = vec![f64::INFINITY; size * k];
        let mut parent = vec![NO_PARENT; size * k];
        for (i, &t) in targets.iter().enumerate() {
            length[(1 << i) * k + i] = closure.dist(root, t);
        }
        for mask in 1..size {
            if mask.count_ones() < 2 {
                continue;
            }
            for i in 0..k {
                if mask & (1 << i) == 0 {
                    continue;
                }
                let prev = mask ^ (1 << i);
                let mut best = f64::INFINITY;
                let mut arg = NO_PARENT;
                for j in 0..k {
                    if prev & (1 << j) == 0 {
                        continue;
                    }
                    let cand = length[prev * k + j] + closure.dist(targets[j], targets[i]);
                    if improves(cand, best) {
                        best = cand;
                        arg = j as u8;
                    }
                }
                length[mask * k + i] = best;
                parent[mask * k + i] = arg;
            }
        }
        Ok(Self { root, targets: targets.to_vec(), length, parent })
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn targets(&self) -> &[NodeId] {
        &self.targets
    }

    pub fn full_mask(&self) -> usize {
        (1usize << self.targets.len()) - 1
    }

    pub fn length(&self, mask: usize, end: usize) -> f64 {
        self.length[mask * self.targets.len() + end]
    }

    /// Best way to finish a path over `mask` at `sink`: the total length and the
    /// index of the last target, or `None` for the empty mask.
    pub fn close(&self, closure: &MetricClosure, mask: usize, sink: NodeId) -> (f64, Option<usize>) {
        if mask == 0 {
            return (closure.dist(self.root, sink), None);
        }
        let mut best = f64::INFINITY;
        let mut arg = None;
        for (i, &t) in self.targets.iter().enumerate() {
            if mask & (1 << i) == 0 {
                continue;
            }
            let cand = self.length(mask, i) + closure.dist(t, sink);
            if improves(cand, best) {
                best = cand;
                arg = Some(i);
            }
        }
        (best, arg)
    }

    /// Target nodes of the stored optimal path over `mask` ending at `end`, in visiting order.
    pub fn path(&self, mut mask: usize, end: usize) -> Vec<NodeId> {
        let k = self.targets.len();
        let mut rev = Vec::with_capacity(mask.count_ones() as usize);
        let mut cur = end;
        loop {
            rev.push(self.targets[cur]);
            let p = self.parent[mask * k + cur];
            mask ^= 1 << cur;
            if p == NO_PARENT {
                break;
            }
            cur = p as usize;
        }
        debug_assert_eq!(mask, 0);
        rev.reverse();
        rev
    }

    /// Shortest closed tour from the root over `mask` and back, as (length, stops).
    pub fn tour(&self, closure: &MetricClosure, mask: usize) -> (f64, Vec<NodeId>) {
        match self.close(closure, mask, self.root) {
            (len, Some(end)) => (len, self.path(mask, end)),
            (len, None) => (len, Vec::new()),
        }
    }
}

/// Shortest closed tour from the depot through `targets` (any order).
pub fn held_karp(closure: &MetricClosure, targets: &[NodeId]) -> Result<(f64, Vec<NodeId>), SolveError> {
    let mut sorted = targets.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let table = HeldKarpTable::build(closure, crate::graph::DEPOT, &sorted)?;
    Ok(table.tour(closure, table.full_mask()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{make_star_graph, path_length, WeightedGraph};

    #[test]
    fn square_tour() {
        let g = WeightedGraph::complete_euclidean(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
            .unwrap();
        let c = MetricClosure::new(&g).unwrap();
        let (len, stops) = held_karp(&c, &[1, 2, 3]).unwrap();
        assert!((len - 4.0).abs() < 1e-12);
        let mut walk = vec![0];
        walk.extend(&stops);
        walk.push(0);
        assert_eq!(path_length(&c, &walk), len);
    }

    #[test]
    fn star_tour_length() {
        let c = MetricClosure::new(&make_star_graph(5, 1.5)).unwrap();
        assert_eq!(held_karp(&c, &[1, 2, 3, 4, 5]).unwrap().0, 15.0);
        assert_eq!(held_karp(&c, &[]).unwrap(), (0.0, vec![]));
    }

    #[test]
    fn too_many_targets() {
        let c = MetricClosure::new(&make_star_graph(21, 1.0)).unwrap();
        let t: Vec<_> = (1..=21).collect();
        assert_eq!(
            held_karp(&c, &t).unwrap_err(),
            SolveError::TooManyTargets { count: 21, cap: MAX_TARGETS }
        );
    }
}

//! Weighted road graphs, their metric closure, and vehicle tours.

mod closure;
mod instance;
mod star;

pub use closure::MetricClosure;
pub use instance::{InstanceError, RdpInstance};
pub use star::{make_star_graph, make_two_level_star, TwoLevelStar};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type NodeId = usize;

/// The depot is always node 0.
pub const DEPOT: NodeId = 0;

/// Absolute tolerance used for every floating point equality in the crate.
pub const TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph needs the depot and at least one more node, got {0} nodes")]
    TooFewNodes(usize),
    #[error("edge ({u}, {v}) references a node outside 0..{n}")]
    NodeOutOfRange { u: NodeId, v: NodeId, n: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("edge ({u}, {v}) has non-positive or non-finite length {length}")]
    BadLength { u: NodeId, v: NodeId, length: f64 },
    #[error("duplicate edge between {u} and {v}")]
    DuplicateEdge { u: NodeId, v: NodeId },
    #[error("coordinate list has {got} entries for {n} nodes")]
    CoordCount { got: usize, n: usize },
    #[error("node {0} is unreachable from the depot")]
    Disconnected(NodeId),
}

/// Undirected graph with positive edge lengths. Node 0 is the depot.
///
/// Structural invariants (no self-loops, no parallel edges, positive lengths)
/// are checked on construction. Connectivity is checked by [`MetricClosure::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    node_count: usize,
    edges: Vec<(NodeId, NodeId, f64)>,
    coords: Option<Vec<[f64; 2]>>,
}

impl WeightedGraph {
    pub fn new(
        node_count: usize,
        edges: Vec<(NodeId, NodeId, f64)>,
        coords: Option<Vec<[f64; 2]>>,
    ) -> Result<Self, GraphError> {
        if node_count < 2 {
            return Err(GraphError::TooFewNodes(node_count));
        }
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for &(u, v, length) in &edges {
            if u >= node_count || v >= node_count {
                return Err(GraphError::NodeOutOfRange { u, v, n: node_count });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !(length.is_finite() && length > 0.0) {
                return Err(GraphError::BadLength { u, v, length });
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(GraphError::DuplicateEdge { u, v });
            }
        }
        if let Some(c) = &coords {
            if c.len() != node_count {
                return Err(GraphError::CoordCount { got: c.len(), n: node_count });
            }
        }
        Ok(Self { node_count, edges, coords })
    }

    /// Complete graph whose edge lengths are Euclidean distances between `points`.
    pub fn complete_euclidean(points: Vec<[f64; 2]>) -> Result<Self, GraphError> {
        let n = points.len();
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v, euclidean(points[u], points[v])));
            }
        }
        Self::new(n, edges, Some(points))
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Customer nodes: everything except the depot.
    pub fn customers(&self) -> impl Iterator<Item = NodeId> {
        1..self.node_count
    }

    pub fn edges(&self) -> &[(NodeId, NodeId, f64)] {
        &self.edges
    }

    pub fn coords(&self) -> Option<&[[f64; 2]]> {
        self.coords.as_deref()
    }
}

pub fn euclidean(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Truck,
    Drone,
}

/// Closed walk over the metric closure, stored as the full node sequence
/// starting and ending at the depot. Consecutive stops travel along shortest paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub role: Role,
    pub nodes: Vec<NodeId>,
}

impl Tour {
    pub fn empty(role: Role) -> Self {
        Self { role, nodes: vec![DEPOT, DEPOT] }
    }

    /// Build a tour that visits `stops` in order, adding the depot at both ends.
    pub fn through(role: Role, stops: &[NodeId]) -> Self {
        let mut nodes = Vec::with_capacity(stops.len() + 2);
        nodes.push(DEPOT);
        nodes.extend_from_slice(stops);
        nodes.push(DEPOT);
        Self { role, nodes }
    }

    /// The visited customer nodes, in order.
    pub fn stops(&self) -> &[NodeId] {
        &self.nodes[1..self.nodes.len() - 1]
    }

    pub fn is_empty(&self) -> bool {
        self.stops().is_empty()
    }

    /// Sum of closure distances along the sequence.
    pub fn length(&self, closure: &MetricClosure) -> f64 {
        path_length(closure, &self.nodes)
    }

    /// Travel time: length for trucks, length / alpha for drones.
    pub fn time(&self, closure: &MetricClosure, alpha: f64) -> f64 {
        match self.role {
            Role::Truck => self.length(closure),
            Role::Drone => self.length(closure) / alpha,
        }
    }
}

/// Sum of closure distances between consecutive nodes, accumulated left to right.
pub fn path_length(closure: &MetricClosure, nodes: &[NodeId]) -> f64 {
    nodes.windows(2).fold(0.0, |acc, w| acc + closure.dist(w[0], w[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_structural_problems() {
        assert_eq!(WeightedGraph::new(1, vec![], None), Err(GraphError::TooFewNodes(1)));
        assert_eq!(
            WeightedGraph::new(2, vec![(0, 0, 1.0)], None),
            Err(GraphError::SelfLoop(0))
        );
        assert!(matches!(
            WeightedGraph::new(2, vec![(0, 1, 0.0)], None),
            Err(GraphError::BadLength { .. })
        ));
        assert!(matches!(
            WeightedGraph::new(2, vec![(0, 1, f64::NAN)], None),
            Err(GraphError::BadLength { .. })
        ));
        assert!(matches!(
            WeightedGraph::new(2, vec![(0, 1, 1.0), (1, 0, 2.0)], None),
            Err(GraphError::DuplicateEdge { .. })
        ));
        assert!(matches!(
            WeightedGraph::new(2, vec![(0, 2, 1.0)], None),
            Err(GraphError::NodeOutOfRange { .. })
        ));
    }

    #[test]
    fn tour_time_divides_drone_length_by_alpha() {
        let g = make_star_graph(2, 1.5);
        let c = MetricClosure::new(&g).unwrap();
        let t = Tour::through(Role::Drone, &[1, 2]);
        assert_eq!(t.length(&c), 6.0);
        assert_eq!(t.time(&c, 2.0), 3.0);
        let t = Tour::through(Role::Truck, &[1, 2]);
        assert_eq!(t.time(&c, 2.0), 6.0);
        assert_eq!(Tour::empty(Role::Truck).length(&c), 0.0);
    }
}

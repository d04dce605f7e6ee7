use super::{NodeId, WeightedGraph};

/// Star with `n` leaves, each joined to the depot by an edge of length `d`.
///
/// Leaves are numbered `1..=n`.
pub fn make_star_graph(n: usize, d: f64) -> WeightedGraph {
    assert!(n >= 1, "star needs at least one leaf");
    let edges = (1..=n).map(|v| (0, v, d)).collect();
    WeightedGraph::new(n + 1, edges, None).expect("star edges are well formed")
}

/// Star whose leaves come in two groups at distances `d1` and `d2` from the depot.
#[derive(Debug, Clone)]
pub struct TwoLevelStar {
    pub graph: WeightedGraph,
    /// Leaves at distance `d1`, numbered `1..=n1`.
    pub level_one: Vec<NodeId>,
    /// Leaves at distance `d2`, numbered `n1+1..=n1+n2`.
    pub level_two: Vec<NodeId>,
}

pub fn make_two_level_star(n1: usize, n2: usize, d1: f64, d2: f64) -> TwoLevelStar {
    assert!(n1 + n2 >= 1, "star needs at least one leaf");
    let level_one: Vec<NodeId> = (1..=n1).collect();
    let level_two: Vec<NodeId> = (n1 + 1..=n1 + n2).collect();
    let edges = level_one
        .iter()
        .map(|&v| (0, v, d1))
        .chain(level_two.iter().map(|&v| (0, v, d2)))
        .collect();
    let graph = WeightedGraph::new(n1 + n2 + 1, edges, None).expect("star edges are well formed");
    TwoLevelStar { graph, level_one, level_two }
}

use crate::graph::{MetricClosure, NodeId, DEPOT};

use super::held_karp::HeldKarpTable;
use super::SolveError;

/// Shortest path from `start` through every node in `targets`, ending at the depot.
///
/// Returns the full node sequence (starting with `start`, ending with the depot)
/// and its length. `start` and the depot are ignored if they appear in `targets`.
pub fn open_path_tsp(
    closure: &MetricClosure,
    start: NodeId,
    targets: &[NodeId],
) -> Result<(Vec<NodeId>, f64), SolveError> {
    let mut sorted: Vec<NodeId> = targets.iter().copied().filter(|&v| v != start && v != DEPOT).collect();
    sorted.sort_unstable();
    sorted.dedup();
    let table = HeldKarpTable::build(closure, start, &sorted)?;
    let mask = table.full_mask();
    let (length, end) = table.close(closure, mask, DEPOT);
    let mut path = vec![start];
    if let Some(end) = end {
        path.extend(table.path(mask, end));
    }
    if start != DEPOT || path.len() > 1 {
        path.push(DEPOT);
    }
    Ok((path, length))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{make_star_graph, path_length, WeightedGraph};

    #[test]
    fn path_on_a_line() {
        let g = WeightedGraph::complete_euclidean(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]])
            .unwrap();
        let c = MetricClosure::new(&g).unwrap();
        let (path, len) = open_path_tsp(&c, 2, &[1, 3]).unwrap();
        assert_eq!(path, vec![2, 3, 1, 0]);
        assert_eq!(len, 4.0);
        assert_eq!(path_length(&c, &path), len);
    }

    #[test]
    fn no_targets_goes_straight_home() {
        let c = MetricClosure::new(&make_star_graph(3, 1.0)).unwrap();
        assert_eq!(open_path_tsp(&c, 2, &[]).unwrap(), (vec![2, 0], 1.0));
        assert_eq!(open_path_tsp(&c, 2, &[2]).unwrap(), (vec![2, 0], 1.0));
        assert_eq!(open_path_tsp(&c, 1, &[2, 3]).unwrap().1, 5.0);
    }
}

use serde::{Deserialize, Serialize};

use crate::graph::{path_length, MetricClosure, NodeId, DEPOT, TOL};

/// A tour cut into contiguous pieces: the truck keeps the piece next to the
/// depot's outbound leg, each drone flies one later piece in reverse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TourSplit {
    /// Truck stops, in driving order.
    pub truck: Vec<NodeId>,
    /// Drone stops, one entry per used drone, each in flying order.
    pub drones: Vec<Vec<NodeId>>,
    /// max(truck time, slowest drone time).
    pub objective: f64,
}

/// Split `stops` into at most `vehicles` non-empty contiguous pieces minimising
/// the slowest of the truck piece and the drone pieces (drone time = length / alpha).
///
/// Every cut is tried. Fewer pieces and earlier cuts win ties.
pub fn split_tour(closure: &MetricClosure, stops: &[NodeId], vehicles: usize, alpha: f64) -> TourSplit {
    let n = stops.len();
    if n == 0 {
        return TourSplit { truck: Vec::new(), drones: Vec::new(), objective: 0.0 };
    }
    let round = |seg: &[NodeId]| -> f64 {
        let mut walk = Vec::with_capacity(seg.len() + 2);
        walk.push(DEPOT);
        walk.extend_from_slice(seg);
        walk.push(DEPOT);
        path_length(closure, &walk)
    };
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut cuts = Vec::new();
    for pieces in 1..=vehicles.max(1).min(n) {
        cuts.clear();
        enumerate_cuts(n, pieces - 1, 1, &mut cuts, &mut |cuts| {
            let mut bounds = Vec::with_capacity(cuts.len() + 2);
            bounds.push(0);
            bounds.extend_from_slice(cuts);
            bounds.push(n);
            let mut value = round(&stops[bounds[0]..bounds[1]]);
            for w in bounds[1..].windows(2) {
                value = value.max(round(&stops[w[0]..w[1]]) / alpha);
            }
            if best.as_ref().is_none_or(|(b, _)| value < b - TOL) {
                best = Some((value, bounds));
            }
        });
    }
    let (objective, bounds) = best.expect("at least one split exists");
    let truck = stops[bounds[0]..bounds[1]].to_vec();
    let drones = bounds[1..]
        .windows(2)
        .map(|w| stops[w[0]..w[1]].iter().rev().copied().collect())
        .collect();
    TourSplit { truck, drones, objective }
}

/// Visit every increasing sequence of `count` cut positions in `from..n`.
fn enumerate_cuts(n: usize, count: usize, from: usize, cuts: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if count == 0 {
        visit(cuts);
        return;
    }
    for c in from..n {
        if n - c < count {
            break;
        }
        cuts.push(c);
        enumerate_cuts(n, count - 1, c + 1, cuts, visit);
        cuts.pop();
    }
}

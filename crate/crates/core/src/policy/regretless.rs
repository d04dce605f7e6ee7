use crate::graph::{MetricClosure, NodeId, DEPOT, TOL};
use crate::solver::{multi_tsp, open_path_tsp, SolveError};

use super::sim::{NodeStatus, Policy, Sim};
use super::split::{split_tour, TourSplit};
use super::{PolicyKind, SimError};

/// Initial Regretless commitments: truck tours and how each one is shared with drones.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretlessPlan {
    /// Stops of each truck tour, in the orientation used for splitting.
    pub truck_tours: Vec<Vec<NodeId>>,
    /// Drones assigned to each tour (vehicle indices, trucks first).
    pub drones: Vec<Vec<usize>>,
    pub splits: Vec<TourSplit>,
}

/// Optimal truck-only tours, drones spread over them, and each tour cut into
/// a truck piece and drone pieces.
///
/// Each tour gets `floor(kd/kt)` or `ceil(kd/kt)` drones; longer tours get the
/// extra drone first. A tour can be driven either way round, so both
/// orientations are split and the better one kept.
pub fn regretless_plan(
    closure: &MetricClosure,
    customers: &[NodeId],
    trucks: usize,
    drones: usize,
    alpha: f64,
) -> Result<RegretlessPlan, SolveError> {
    let sol = multi_tsp(closure, customers, trucks, 0, alpha)?;
    let lengths: Vec<f64> = sol.trucks.iter().map(|t| t.length(closure)).collect();
    let mut order: Vec<usize> = (0..trucks).collect();
    order.sort_by(|&a, &b| lengths[b].total_cmp(&lengths[a]).then(a.cmp(&b)));
    let mut share = vec![drones / trucks; trucks];
    for &i in order.iter().take(drones % trucks) {
        share[i] += 1;
    }

    let mut next_drone = trucks;
    let mut plan = RegretlessPlan { truck_tours: Vec::new(), drones: Vec::new(), splits: Vec::new() };
    for (tour, &count) in sol.trucks.iter().zip(&share) {
        let ids: Vec<usize> = (next_drone..next_drone + count).collect();
        next_drone += count;
        let forward = tour.stops().to_vec();
        let backward: Vec<NodeId> = forward.iter().rev().copied().collect();
        let split_f = split_tour(closure, &forward, 1 + count, alpha);
        let split_b = split_tour(closure, &backward, 1 + count, alpha);
        let (stops, split) =
            if split_b.objective < split_f.objective - TOL { (backward, split_b) } else { (forward, split_f) };
        plan.truck_tours.push(stops);
        plan.drones.push(ids);
        plan.splits.push(split);
    }
    Ok(plan)
}

/// Trucks drive their piece of a truck-only tour while drones scout the rest.
/// At the end of its piece each truck replans once: the shortest path through
/// every node of its tour that is known damaged or still unseen, then home.
#[derive(Default)]
pub(crate) struct Regretless {
    tours: Vec<Vec<NodeId>>,
    piece_end: Vec<Option<NodeId>>,
    replanned: Vec<bool>,
}

impl Policy for Regretless {
    fn name(&self) -> &'static str {
        PolicyKind::Regretless.as_str()
    }

    fn start(&mut self, sim: &mut Sim<'_>) -> Result<(), SimError> {
        let plan = regretless_plan(sim.closure(), &sim.customers(), sim.trucks(), sim.drones(), sim.alpha())?;
        sim.mark_stage("split");
        self.piece_end = plan.splits.iter().map(|s| s.truck.last().copied()).collect();
        self.replanned = vec![false; sim.trucks()];
        for (truck, split) in plan.splits.iter().enumerate() {
            if !split.truck.is_empty() {
                sim.dispatch(truck, &split.truck);
            }
            for (&drone, piece) in plan.drones[truck].iter().zip(&split.drones) {
                let mut stops = piece.clone();
                stops.push(DEPOT);
                sim.dispatch(drone, &stops);
            }
        }
        self.tours = plan.truck_tours;
        Ok(())
    }

    fn on_arrival(&mut self, sim: &mut Sim<'_>, vehicle: usize, node: NodeId) -> Result<(), SimError> {
        if vehicle >= sim.trucks() || self.replanned[vehicle] || self.piece_end[vehicle] != Some(node) {
            return Ok(());
        }
        self.replanned[vehicle] = true;
        let todo: Vec<NodeId> = self.tours[vehicle]
            .iter()
            .copied()
            .filter(|&v| match sim.status(v) {
                NodeStatus::Unknown => true,
                NodeStatus::Damaged => !sim.truck_visited(v),
                NodeStatus::Intact => false,
            })
            .collect();
        let (path, _) = open_path_tsp(sim.closure(), node, &todo)?;
        sim.dispatch(vehicle, &path[1..]);
        Ok(())
    }
}

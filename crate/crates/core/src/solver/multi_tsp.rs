use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::graph::{MetricClosure, NodeId, RdpInstance, Role, Tour, DEPOT, TOL};

use super::held_karp::HeldKarpTable;
use super::SolveError;

/// Min-makespan tours for a mixed fleet. `trucks` and `drones` always hold one
/// tour per vehicle; unused vehicles get an empty tour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiTspSolution {
    pub trucks: Vec<Tour>,
    pub drones: Vec<Tour>,
    pub makespan: f64,
}

impl MultiTspSolution {
    pub fn tours(&self) -> impl Iterator<Item = &Tour> {
        self.trucks.iter().chain(self.drones.iter())
    }
}

/// Optimal `m` truck + `n` drone tours covering `targets`.
pub fn multi_tsp(
    closure: &MetricClosure,
    targets: &[NodeId],
    trucks: usize,
    drones: usize,
    alpha: f64,
) -> Result<MultiTspSolution, SolveError> {
    solve_partition(closure, targets, &[], trucks, drones, alpha)
}

/// Full-information optimum: every customer visited, every damaged node by a truck.
pub fn rdp_star_opt(instance: &RdpInstance) -> Result<MultiTspSolution, SolveError> {
    solve_partition(
        instance.closure(),
        &instance.customers(),
        instance.damaged(),
        instance.trucks(),
        instance.drones(),
        instance.alpha(),
    )
}

/// Inputs below this many targets are solved directly; larger ones are memoised
/// because policies and the harness ask for the same partition several times.
const MEMO_MIN_TARGETS: usize = 12;
const MEMO_CAPACITY: usize = 64;

#[derive(PartialEq, Eq, Hash)]
struct MemoKey {
    dist: Vec<u64>,
    targets: Vec<NodeId>,
    truck_only: Vec<NodeId>,
    trucks: usize,
    drones: usize,
    alpha: u64,
}

fn memo() -> &'static Mutex<HashMap<MemoKey, Arc<MultiTspSolution>>> {
    static MEMO: OnceLock<Mutex<HashMap<MemoKey, Arc<MultiTspSolution>>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// Exact min-makespan partition of `targets` over the fleet, with every node in
/// `truck_only` assigned to a truck.
///
/// The optimal value comes from a subset DP over identical vehicles. The returned
/// partition is the first one, in odometer order over (node ascending, vehicle
/// index ascending, trucks before drones), whose makespan is within [`TOL`] of the
/// optimum; same-role vehicles are kept in order of their smallest node.
pub fn solve_partition(
    closure: &MetricClosure,
    targets: &[NodeId],
    truck_only: &[NodeId],
    trucks: usize,
    drones: usize,
    alpha: f64,
) -> Result<MultiTspSolution, SolveError> {
    if targets.len() < MEMO_MIN_TARGETS {
        return solve_uncached(closure, targets, truck_only, trucks, drones, alpha);
    }
    let n = closure.node_count();
    let mut sorted_targets = targets.to_vec();
    sorted_targets.sort_unstable();
    let mut sorted_required = truck_only.to_vec();
    sorted_required.sort_unstable();
    let key = MemoKey {
        dist: (0..n * n).map(|i| closure.dist(i / n, i % n).to_bits()).collect(),
        targets: sorted_targets,
        truck_only: sorted_required,
        trucks,
        drones,
        alpha: if drones > 0 { alpha.to_bits() } else { 0 },
    };
    if let Some(hit) = memo().lock().expect("memo lock").get(&key) {
        return Ok((**hit).clone());
    }
    let sol = solve_uncached(closure, targets, truck_only, trucks, drones, alpha)?;
    let mut map = memo().lock().expect("memo lock");
    if map.len() >= MEMO_CAPACITY {
        map.clear();
    }
    map.insert(key, Arc::new(sol.clone()));
    Ok(sol)
}

fn solve_uncached(
    closure: &MetricClosure,
    targets: &[NodeId],
    truck_only: &[NodeId],
    trucks: usize,
    drones: usize,
    alpha: f64,
) -> Result<MultiTspSolution, SolveError> {
    if trucks + drones == 0 {
        return Err(SolveError::NoVehicles);
    }
    if drones > 0 && !(alpha.is_finite() && alpha > 0.0) {
        return Err(SolveError::BadAlpha(alpha));
    }
    let mut sorted = targets.to_vec();
    sorted.sort_unstable();
    let before = sorted.len();
    sorted.dedup();
    if sorted.len() != before {
        return Err(SolveError::DuplicateTarget);
    }
    for v in truck_only {
        if sorted.binary_search(v).is_err() {
            return Err(SolveError::InvalidTarget(*v));
        }
    }
    let table = HeldKarpTable::build(closure, DEPOT, &sorted)?;
    let k = sorted.len();
    let size = 1usize << k;

    let mut closed = Vec::with_capacity(size);
    let mut ends = Vec::with_capacity(size);
    for mask in 0..size {
        let (len, end) = table.close(closure, mask, DEPOT);
        closed.push(len);
        ends.push(end);
    }
    let drone_cost: Vec<f64> = if drones > 0 { closed.iter().map(|c| c / alpha).collect() } else { Vec::new() };

    let required = truck_only
        .iter()
        .map(|v| 1usize << sorted.binary_search(v).unwrap())
        .fold(0, |a, b| a | b);

    let opt = optimal_value(&closed, &drone_cost, required, trucks, drones, k);
    if !opt.is_finite() {
        return Err(SolveError::Infeasible);
    }

    let mut search = Search {
        closed: &closed,
        alpha,
        trucks,
        required,
        k,
        limit: opt + TOL,
        masks: vec![0; trucks + drones],
    };
    let found = search.descend(0);
    debug_assert!(found, "canonical search must reach the optimum");
    if !found {
        return Err(SolveError::Infeasible);
    }

    let build = |v: usize, role: Role| -> Tour {
        let mask = search.masks[v];
        match ends[mask] {
            Some(end) => Tour::through(role, &table.path(mask, end)),
            None => Tour::empty(role),
        }
    };
    let truck_tours: Vec<Tour> = (0..trucks).map(|v| build(v, Role::Truck)).collect();
    let drone_tours: Vec<Tour> = (trucks..trucks + drones).map(|v| build(v, Role::Drone)).collect();
    let makespan = truck_tours
        .iter()
        .chain(drone_tours.iter())
        .map(|t| t.time(closure, alpha))
        .fold(0.0, f64::max);
    Ok(MultiTspSolution { trucks: truck_tours, drones: drone_tours, makespan })
}

/// `groups[mask]`: best max-cost split of `mask` into at most `count` tours.
fn group_table(cost: &[f64], count: usize, k: usize) -> Vec<f64> {
    let size = 1usize << k;
    if count == 0 {
        let mut g = vec![f64::INFINITY; size];
        g[0] = 0.0;
        return g;
    }
    let mut g = cost.to_vec();
    for _ in 1..count {
        let mut next = vec![0.0; size];
        for mask in 1..size {
            let low = mask & mask.wrapping_neg();
            let rest = mask ^ low;
            let mut best = g[mask];
            // every sub of `rest`, combined with the lowest bit
            let mut sub = rest;
            loop {
                let part = sub | low;
                let c = cost[part];
                if c < best {
                    let cand = c.max(g[mask ^ part]);
                    if cand < best {
                        best = cand;
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            next[mask] = best;
        }
        g = next;
    }
    g
}

fn optimal_value(
    truck_cost: &[f64],
    drone_cost: &[f64],
    required: usize,
    trucks: usize,
    drones: usize,
    k: usize,
) -> f64 {
    let full = (1usize << k) - 1;
    let gt = group_table(truck_cost, trucks, k);
    if drones == 0 {
        return gt[full];
    }
    let gd = group_table(drone_cost, drones, k);
    let allowed = full & !required;
    let mut best = f64::INFINITY;
    let mut dm = allowed;
    loop {
        let cand = gt[full ^ dm].max(gd[dm]);
        if cand < best {
            best = cand;
        }
        if dm == 0 {
            break;
        }
        dm = (dm - 1) & allowed;
    }
    best
}

struct Search<'a> {
    closed: &'a [f64],
    alpha: f64,
    trucks: usize,
    required: usize,
    k: usize,
    limit: f64,
    masks: Vec<usize>,
}

impl Search<'_> {
    fn time(&self, v: usize, mask: usize) -> f64 {
        if v < self.trucks {
            self.closed[mask]
        } else {
            self.closed[mask] / self.alpha
        }
    }

    /// Vehicles node `i` may join: used vehicles plus the first unused one per role.
    fn candidates(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut push_role = |range: std::ops::Range<usize>| {
            for v in range {
                out.push(v);
                if self.masks[v] == 0 {
                    break;
                }
            }
        };
        push_role(0..self.trucks);
        if self.required & (1 << i) == 0 {
            push_role(self.trucks..self.masks.len());
        }
        out
    }

    fn remaining_fit(&self, from: usize) -> bool {
        for u in from..self.k {
            let bit = 1 << u;
            let fits = self
                .candidates(u)
                .into_iter()
                .any(|v| self.time(v, self.masks[v] | bit) <= self.limit);
            if !fits {
                return false;
            }
        }
        true
    }

    fn descend(&mut self, i: usize) -> bool {
        if i == self.k {
            return true;
        }
        let bit = 1 << i;
        for v in self.candidates(i) {
            let mask = self.masks[v] | bit;
            if self.time(v, mask) > self.limit {
                continue;
            }
            self.masks[v] = mask;
            if self.remaining_fit(i + 1) && self.descend(i + 1) {
                return true;
            }
            self.masks[v] ^= bit;
        }
        false
    }
}

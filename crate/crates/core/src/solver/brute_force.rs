use crate::graph::{MetricClosure, NodeId, DEPOT};

use super::SolveError;

/// Largest target set the brute-force reference accepts.
pub const BRUTE_FORCE_CAP: usize = 7;

/// Min makespan by trying every assignment of targets to vehicles and every
/// visiting order per vehicle. Intended as a test reference only.
pub fn brute_force_multi_tsp(
    closure: &MetricClosure,
    targets: &[NodeId],
    truck_only: &[NodeId],
    trucks: usize,
    drones: usize,
    alpha: f64,
) -> Result<f64, SolveError> {
    let k = targets.len();
    if k > BRUTE_FORCE_CAP {
        return Err(SolveError::TooManyTargets { count: k, cap: BRUTE_FORCE_CAP });
    }
    let vehicles = trucks + drones;
    if vehicles == 0 {
        return Err(SolveError::NoVehicles);
    }

    // cheapest closed walk for every subset, by full permutation search
    let mut best_walk = vec![0.0; 1 << k];
    for (mask, slot) in best_walk.iter_mut().enumerate() {
        let mut nodes: Vec<NodeId> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| targets[i]).collect();
        let mut best = f64::INFINITY;
        permute(&mut nodes, 0, &mut |order| {
            let mut len = 0.0;
            let mut at = DEPOT;
            for &v in order {
                len += closure.dist(at, v);
                at = v;
            }
            len += closure.dist(at, DEPOT);
            best = best.min(len);
        });
        *slot = best;
    }

    let mut best = f64::INFINITY;
    let mut digits = vec![0usize; k];
    'outer: loop {
        let ok = (0..k).all(|i| digits[i] < trucks || !truck_only.contains(&targets[i]));
        if ok {
            let mut masks = vec![0usize; vehicles];
            for (i, &d) in digits.iter().enumerate() {
                masks[d] |= 1 << i;
            }
            let span = masks
                .iter()
                .enumerate()
                .map(|(v, &m)| if v < trucks { best_walk[m] } else { best_walk[m] / alpha })
                .fold(0.0, f64::max);
            best = best.min(span);
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d < vehicles {
                continue 'outer;
            }
            *d = 0;
        }
        break;
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(SolveError::Infeasible)
    }
}

fn permute(items: &mut [NodeId], start: usize, visit: &mut impl FnMut(&[NodeId])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, visit);
        items.swap(start, i);
    }
}

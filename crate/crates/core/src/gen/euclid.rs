use crate::graph::{euclidean, WeightedGraph};

use super::rng::SeededRng;
use super::GenError;

const CENTER_SD: f64 = 50.0;
const SECOND_HUB: [f64; 2] = [200.0, 0.0];
/// Redraw a point that lands this close to an earlier one.
const MIN_SEPARATION: f64 = 1e-9;

fn push_distinct(points: &mut Vec<[f64; 2]>, mut draw: impl FnMut() -> [f64; 2]) {
    loop {
        let p = draw();
        if points.iter().all(|&q| euclidean(p, q) > MIN_SEPARATION) {
            points.push(p);
            return;
        }
    }
}

/// Complete Euclidean graph on `n` uniform points of the unit square; the first point is the depot.
pub fn gen_random(n: usize, seed: u64) -> Result<WeightedGraph, GenError> {
    if n < 2 {
        return Err(GenError::TooFewNodes(n));
    }
    let mut rng = SeededRng::new(seed);
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        push_distinct(&mut points, || [rng.uniform(), rng.uniform()]);
    }
    Ok(WeightedGraph::complete_euclidean(points)?)
}

/// Depot at the origin, customers at angle `U[0, π]` and signed radius `N(0, 50)`.
///
/// With two centers node 1 is a second hub at (200, 0) and each sampled
/// customer is shifted onto it with probability 1/2.
pub fn gen_center(n: usize, seed: u64, centers: usize) -> Result<WeightedGraph, GenError> {
    if !(1..=2).contains(&centers) {
        return Err(GenError::BadCenters(centers));
    }
    if n < centers.max(2) {
        return Err(GenError::TooFewNodes(n));
    }
    let mut rng = SeededRng::new(seed);
    let mut points = vec![[0.0, 0.0]];
    if centers == 2 {
        points.push(SECOND_HUB);
    }
    while points.len() < n {
        push_distinct(&mut points, || {
            let a = rng.uniform() * std::f64::consts::PI;
            let r = rng.normal(0.0, CENTER_SD);
            let mut p = [r * libm::cos(a), r * libm::sin(a)];
            if centers == 2 && rng.bernoulli(0.5) {
                p[0] += SECOND_HUB[0];
                p[1] += SECOND_HUB[1];
            }
            p
        });
    }
    Ok(WeightedGraph::complete_euclidean(points)?)
}

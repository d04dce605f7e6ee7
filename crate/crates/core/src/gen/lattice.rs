//! Planar lattice generators: Coastal and Mountain.
//!
//! Nodes are drawn one at a time from a 101 x 101 lattice with a placement
//! weight that depends on the class and on earlier picks. Edges come from a
//! maximum-weight spanning tree followed by weighted sampling of further
//! non-crossing edges until the edge target is met.

use std::f64::consts::FRAC_PI_2;

use crate::graph::{euclidean, WeightedGraph};

use super::rng::{derive_seed, SeededRng};
use super::{GenError, GraphClass, LatticeParams};

/// Height samples taken along an edge when looking for its highest point.
const RIDGE_SAMPLES: usize = 32;

/// 2n edges, or 2n - 3 for tiny graphs where 2n cannot be planar.
pub fn default_edge_target(n: usize) -> usize {
    if n >= 8 {
        2 * n
    } else {
        (2 * n).saturating_sub(3).max(1)
    }
}

fn check(n: usize, edge_target: Option<usize>) -> Result<usize, GenError> {
    if n < 2 {
        return Err(GenError::TooFewNodes(n));
    }
    let target = edge_target.unwrap_or_else(|| default_edge_target(n));
    if target < n - 1 || target > n * (n - 1) / 2 {
        return Err(GenError::BadEdgeTarget { target, n });
    }
    Ok(target)
}

pub fn gen_coastal(n: usize, seed: u64, edge_target: Option<usize>) -> Result<WeightedGraph, GenError> {
    gen_coastal_with(n, seed, edge_target, &LatticeParams::default())
}

pub fn gen_mountain(n: usize, seed: u64, edge_target: Option<usize>) -> Result<WeightedGraph, GenError> {
    gen_mountain_with(n, seed, edge_target, &LatticeParams::default())
}

/// Villages crowd the coastline (x = 0) and inland ones line up with earlier villages.
pub fn gen_coastal_with(
    n: usize,
    seed: u64,
    edge_target: Option<usize>,
    params: &LatticeParams,
) -> Result<WeightedGraph, GenError> {
    let target = check(n, edge_target)?;
    let lattice = Lattice { side: params.lattice, width: 1.0, height: n as f64 / 15.0 };
    let base: Vec<f64> =
        (0..lattice.cells()).map(|c| libm::exp(-lattice.point(c)[0] / (params.coast_decay * lattice.width))).collect();
    retry(GraphClass::Coastal, seed, params, |rng| {
        let pts = place(rng, n, &lattice, params, &base, true)?;
        let scale = params.edge_scale * lattice.diagonal();
        let edges = build_edges(rng, &pts, target, |a, b| libm::exp(-euclidean(a, b) / scale))?;
        Some((pts, edges))
    })
}

/// Villages settle in valleys of a random height field; edges avoid crossing high ground.
pub fn gen_mountain_with(
    n: usize,
    seed: u64,
    edge_target: Option<usize>,
    params: &LatticeParams,
) -> Result<WeightedGraph, GenError> {
    mountain(n, seed, edge_target, params).map(|(g, _)| g)
}

fn mountain(
    n: usize,
    seed: u64,
    edge_target: Option<usize>,
    params: &LatticeParams,
) -> Result<(WeightedGraph, HeightField), GenError> {
    let target = check(n, edge_target)?;
    let side = (n as f64 / 15.0).sqrt();
    let lattice = Lattice { side: params.lattice, width: side, height: side };
    let mut used_field = None;
    let graph = retry(GraphClass::Mountain, seed, params, |rng| {
        let field = HeightField::sample(rng, params.bumps, side);
        let base: Vec<f64> = (0..lattice.cells())
            .map(|c| libm::exp(-params.height_decay * field.at(lattice.point(c))))
            .collect();
        let pts = place(rng, n, &lattice, params, &base, false)?;
        let scale = params.edge_scale * lattice.diagonal();
        let edges = build_edges(rng, &pts, target, |a, b| {
            libm::exp(-euclidean(a, b) / scale) / (1.0 + field.ridge(a, b))
        })?;
        used_field = Some(field);
        Some((pts, edges))
    })?;
    Ok((graph, used_field.expect("successful attempt leaves its field")))
}

fn retry(
    class: GraphClass,
    seed: u64,
    params: &LatticeParams,
    mut attempt: impl FnMut(&mut SeededRng) -> Option<(Vec<[f64; 2]>, Vec<(usize, usize)>)>,
) -> Result<WeightedGraph, GenError> {
    for i in 0..params.max_attempts {
        let mut rng = SeededRng::new(derive_seed(seed, &[i as u64]));
        if let Some((pts, edges)) = attempt(&mut rng) {
            let edges = edges.into_iter().map(|(u, v)| (u, v, euclidean(pts[u], pts[v]))).collect();
            return Ok(WeightedGraph::new(pts.len(), edges, Some(pts))?);
        }
        log::debug!("{class} seed {seed}: attempt {i} failed, retrying");
    }
    Err(GenError::RetriesExhausted { class, attempts: params.max_attempts })
}

struct Lattice {
    side: usize,
    width: f64,
    height: f64,
}

impl Lattice {
    fn cells(&self) -> usize {
        self.side * self.side
    }

    fn point(&self, cell: usize) -> [f64; 2] {
        let step = (self.side - 1) as f64;
        let (i, j) = (cell % self.side, cell / self.side);
        [i as f64 * self.width / step, j as f64 * self.height / step]
    }

    fn diagonal(&self) -> f64 {
        self.width.hypot(self.height)
    }
}

/// Draws `n` distinct lattice points. Returns `None` when every cell is excluded.
fn place(
    rng: &mut SeededRng,
    n: usize,
    lattice: &Lattice,
    params: &LatticeParams,
    base: &[f64],
    band: bool,
) -> Option<Vec<[f64; 2]>> {
    let side = lattice.side as isize;
    let mut open = vec![true; lattice.cells()];
    let mut boosted = vec![false; lattice.side];
    let mut weights = vec![0.0; lattice.cells()];
    let reach = params.exclusion_cells.floor() as isize;
    let r2 = params.exclusion_cells * params.exclusion_cells;
    let mut pts = Vec::with_capacity(n);
    for _ in 0..n {
        for (c, w) in weights.iter_mut().enumerate() {
            *w = if !open[c] {
                0.0
            } else if band && boosted[c / lattice.side] {
                base[c] * params.band_boost
            } else {
                base[c]
            };
        }
        let cell = rng.weighted_index(&weights)?;
        pts.push(lattice.point(cell));
        let (ci, cj) = ((cell % lattice.side) as isize, (cell / lattice.side) as isize);
        for dj in -reach..=reach {
            for di in -reach..=reach {
                let (i, j) = (ci + di, cj + dj);
                if (0..side).contains(&i) && (0..side).contains(&j) && ((di * di + dj * dj) as f64) <= r2 {
                    open[(j * side + i) as usize] = false;
                }
            }
        }
        let band_cells = params.band_cells as isize;
        for j in (cj - band_cells).max(0)..=(cj + band_cells).min(side - 1) {
            boosted[j as usize] = true;
        }
    }
    Some(pts)
}

struct Bump {
    center: [f64; 2],
    amplitude: f64,
    sigma: f64,
}

struct HeightField(Vec<Bump>);

impl HeightField {
    fn sample(rng: &mut SeededRng, bumps: usize, side: f64) -> Self {
        Self(
            (0..bumps)
                .map(|_| Bump {
                    center: [rng.uniform() * side, rng.uniform() * side],
                    amplitude: rng.uniform_in(0.5, 1.0),
                    sigma: side * rng.uniform_in(0.15, 0.3),
                })
                .collect(),
        )
    }

    fn at(&self, p: [f64; 2]) -> f64 {
        self.0
            .iter()
            .map(|b| {
                let d2 = (p[0] - b.center[0]).powi(2) + (p[1] - b.center[1]).powi(2);
                b.amplitude * libm::exp(-d2 / (2.0 * b.sigma * b.sigma))
            })
            .sum()
    }

    /// Highest sampled point on the straight line from `a` to `b`.
    fn ridge(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        (0..=RIDGE_SAMPLES)
            .map(|k| {
                let t = k as f64 / RIDGE_SAMPLES as f64;
                self.at([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])])
            })
            .fold(0.0, f64::max)
    }
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

fn dot(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * v[0] + u[1] * v[1]
}

/// Sign of the turn a -> b -> c, with near-collinear triples reported as 0.
fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> i8 {
    let (u, v) = (sub(b, a), sub(c, a));
    let x = cross(u, v);
    let eps = 1e-12 * (dot(u, u) * dot(v, v)).sqrt();
    if x > eps {
        1
    } else if x < -eps {
        -1
    } else {
        0
    }
}

/// `p` lies on segment `ab` (endpoints included), assuming the three are collinear.
fn within(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

/// Whether segments `ab` and `cd` meet anywhere other than a shared endpoint.
pub fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let shared = if a == c {
        Some((a, b, d))
    } else if a == d {
        Some((a, b, c))
    } else if b == c {
        Some((b, a, d))
    } else if b == d {
        Some((b, a, c))
    } else {
        None
    };
    if let Some((p, q, r)) = shared {
        // Only overlapping collinear segments meet beyond the shared point.
        return orient(p, q, r) == 0 && dot(sub(q, p), sub(r, p)) > 0.0;
    }
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && within(a, b, c))
        || (o2 == 0 && within(a, b, d))
        || (o3 == 0 && within(c, d, a))
        || (o4 == 0 && within(c, d, b))
}

/// Smallest angle, capped at a right angle, between `ab` and an already chosen edge at `a` or `b`.
fn angle_factor(pts: &[[f64; 2]], chosen: &[(usize, usize)], i: usize, j: usize) -> f64 {
    let mut min_angle = FRAC_PI_2;
    for &(u, v) in chosen {
        for (end, other) in [(i, j), (j, i)] {
            let k = if u == end {
                v
            } else if v == end {
                u
            } else {
                continue;
            };
            let (e, f) = (sub(pts[other], pts[end]), sub(pts[k], pts[end]));
            let cos = (dot(e, f) / (dot(e, e) * dot(f, f)).sqrt()).clamp(-1.0, 1.0);
            min_angle = min_angle.min(libm::acos(cos));
        }
    }
    libm::sin(min_angle)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
}

fn build_edges(
    rng: &mut SeededRng,
    pts: &[[f64; 2]],
    target: usize,
    weight: impl Fn([f64; 2], [f64; 2]) -> f64,
) -> Option<Vec<(usize, usize)>> {
    let n = pts.len();
    // Pairs whose straight line passes through a third node are never edges.
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let blocked =
                (0..n).any(|k| k != i && k != j && orient(pts[i], pts[j], pts[k]) == 0 && within(pts[i], pts[j], pts[k]));
            if !blocked {
                pairs.push((i, j, weight(pts[i], pts[j])));
            }
        }
    }
    let crosses = |chosen: &[(usize, usize)], i: usize, j: usize| {
        chosen.iter().any(|&(u, v)| segments_cross(pts[i], pts[j], pts[u], pts[v]))
    };

    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by(|&a, &b| pairs[b].2.total_cmp(&pairs[a].2).then(a.cmp(&b)));
    let mut uf = UnionFind((0..n).collect());
    let mut chosen = Vec::with_capacity(target);
    let mut used = vec![false; pairs.len()];
    for p in order {
        let (i, j, _) = pairs[p];
        let (ri, rj) = (uf.find(i), uf.find(j));
        if ri != rj && !crosses(&chosen, i, j) {
            uf.0[ri] = rj;
            chosen.push((i, j));
            used[p] = true;
        }
    }
    if chosen.len() != n - 1 {
        return None;
    }

    while chosen.len() < target {
        let mut cand = Vec::new();
        let mut w = Vec::new();
        for (p, &(i, j, base)) in pairs.iter().enumerate() {
            if !used[p] && !crosses(&chosen, i, j) {
                cand.push(p);
                w.push(base * angle_factor(pts, &chosen, i, j));
            }
        }
        let p = cand[rng.weighted_index(&w)?];
        used[p] = true;
        chosen.push((pairs[p].0, pairs[p].1));
    }
    Some(chosen)
}

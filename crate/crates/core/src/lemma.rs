//! Hand-built instances with known policy behaviour.
//!
//! Each family is a small star-like graph plus a damage pattern. Where the
//! damage depends on the policy's own commitments (for example "a node only a
//! drone visits"), the constructor asks a caller-supplied callback for the
//! policy's first-stage tours and places the damage adversarially on them.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{
    make_star_graph, make_two_level_star, InstanceError, NodeId, RdpInstance, Role, Tour, WeightedGraph, DEPOT,
};
use crate::policy::PolicyKind;

/// Length margin used where a family needs a strictly-worse detour.
pub const DETOUR_EPS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LemmaFamily {
    /// Equal speeds, star with one leaf per vehicle, one damaged drone leaf.
    OptimisticEqualSpeedStar,
    /// Unequal speeds, near/medium/far nodes sized so fast vehicles pair a
    /// near node with a medium one; one damaged near node seen by a drone.
    OptimisticMixedSpeed,
    /// Slow drones with enough of them that revisits cost a full round.
    OptimisticSlowDronesSaturated,
    /// Slow drones with too few of them to fill a full round of revisits.
    OptimisticSlowDronesUnsaturated,
    /// Drone speed 1/b: star where every drone leaf may be damaged.
    SlowDroneStarDamagedDroneLeaves,
    /// Two-level star, no damage: drones take the far level.
    OptimisticBestCase,
    /// Two-level star, no damage, split tours.
    RegretlessBestCase,
    /// Every node damaged, drone speed up makes revisits unavoidable.
    OptimisticWorstDroneImpact,
    /// Equal speeds, every node but the first of a longest truck tour damaged.
    RegretlessEqualSpeedStar,
    /// Drone speed 1/b, every node but the first of a longest truck tour damaged.
    RegretlessSlowDronesStar,
    /// Integer drone speed, every node but the first of a longest truck tour damaged.
    RegretlessFastDronesStar,
    /// Every node damaged.
    RegretlessAllDamaged,
    /// One truck, one drone, the drone's last leaf damaged.
    ExploreFirstStar,
}

impl LemmaFamily {
    pub const ALL: [LemmaFamily; 13] = [
        LemmaFamily::OptimisticEqualSpeedStar,
        LemmaFamily::OptimisticMixedSpeed,
        LemmaFamily::OptimisticSlowDronesSaturated,
        LemmaFamily::OptimisticSlowDronesUnsaturated,
        LemmaFamily::SlowDroneStarDamagedDroneLeaves,
        LemmaFamily::OptimisticBestCase,
        LemmaFamily::RegretlessBestCase,
        LemmaFamily::OptimisticWorstDroneImpact,
        LemmaFamily::RegretlessEqualSpeedStar,
        LemmaFamily::RegretlessSlowDronesStar,
        LemmaFamily::RegretlessFastDronesStar,
        LemmaFamily::RegretlessAllDamaged,
        LemmaFamily::ExploreFirstStar,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LemmaFamily::OptimisticEqualSpeedStar => "optimistic-equal-speed-star",
            LemmaFamily::OptimisticMixedSpeed => "optimistic-mixed-speed",
            LemmaFamily::OptimisticSlowDronesSaturated => "optimistic-slow-drones-saturated",
            LemmaFamily::OptimisticSlowDronesUnsaturated => "optimistic-slow-drones-unsaturated",
            LemmaFamily::SlowDroneStarDamagedDroneLeaves => "slow-drone-star-damaged-drone-leaves",
            LemmaFamily::OptimisticBestCase => "optimistic-best-case",
            LemmaFamily::RegretlessBestCase => "regretless-best-case",
            LemmaFamily::OptimisticWorstDroneImpact => "optimistic-worst-drone-impact",
            LemmaFamily::RegretlessEqualSpeedStar => "regretless-equal-speed-star",
            LemmaFamily::RegretlessSlowDronesStar => "regretless-slow-drones-star",
            LemmaFamily::RegretlessFastDronesStar => "regretless-fast-drones-star",
            LemmaFamily::RegretlessAllDamaged => "regretless-all-damaged",
            LemmaFamily::ExploreFirstStar => "explore-first-star",
        }
    }

    /// The policy whose first-stage tours decide where damage goes.
    pub fn target_policy(self) -> PolicyKind {
        match self {
            LemmaFamily::RegretlessBestCase
            | LemmaFamily::RegretlessEqualSpeedStar
            | LemmaFamily::RegretlessSlowDronesStar
            | LemmaFamily::RegretlessFastDronesStar
            | LemmaFamily::RegretlessAllDamaged => PolicyKind::Regretless,
            LemmaFamily::ExploreFirstStar => PolicyKind::Efhs,
            _ => PolicyKind::Optimistic,
        }
    }
}

impl fmt::Display for LemmaFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LemmaFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LemmaFamily::ALL.into_iter().find(|f| f.as_str() == s).ok_or_else(|| format!("unknown lemma family '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaParams {
    pub trucks: usize,
    pub drones: usize,
    pub alpha: f64,
}

/// What a policy is expected to produce on a family instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Predicted {
    pub policy: PolicyKind,
    pub makespan: f64,
    pub competitive_ratio: Option<f64>,
    pub drone_impact: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct LemmaInstance {
    pub family: LemmaFamily,
    pub params: LemmaParams,
    pub instance: RdpInstance,
    /// Full-information optimum, when the family pins it down.
    pub opt_star: Option<f64>,
    /// Best truck-only makespan, when the family pins it down.
    pub truck_only: Option<f64>,
    pub predicted: Vec<Predicted>,
}

#[derive(Debug, Error)]
pub enum LemmaError {
    #[error("{family} requires {condition}")]
    SideCondition { family: LemmaFamily, condition: &'static str },
    #[error("first-stage tours offer no node to damage for {0}")]
    NoTarget(LemmaFamily),
    #[error("first-stage callback failed: {0}")]
    Callback(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

fn is_integer(x: f64) -> bool {
    x >= 1.0 - 1e-9 && (x - x.round()).abs() < 1e-9
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// Build an instance of `family`. `first_stage` must return the tours the
/// target policy commits to on the undamaged instance.
pub fn make_lemma_instance<F, E>(
    family: LemmaFamily,
    params: LemmaParams,
    mut first_stage: F,
) -> Result<LemmaInstance, LemmaError>
where
    F: FnMut(&RdpInstance, PolicyKind) -> Result<Vec<Tour>, E>,
    E: fmt::Display,
{
    use LemmaFamily::*;
    let LemmaParams { trucks: kt, drones: kd, alpha } = params;
    let side = |condition: &'static str| LemmaError::SideCondition { family, condition };
    if kt == 0 || kd == 0 {
        return Err(side("at least one truck and one drone"));
    }
    let c = ceil_div(kd, kt) as f64;
    let mut tours_of = |inst: &RdpInstance| -> Result<Vec<Tour>, LemmaError> {
        first_stage(inst, family.target_policy()).map_err(|e| LemmaError::Callback(e.to_string()))
    };
    let drone_nodes = |tours: &[Tour]| -> Vec<NodeId> {
        let mut v: Vec<NodeId> =
            tours.iter().filter(|t| t.role == Role::Drone).flat_map(|t| t.stops().to_vec()).collect();
        v.sort_unstable();
        v
    };
    // all stops of the first longest truck tour except the first one
    let longest_tail = |tours: &[Tour]| -> Option<Vec<NodeId>> {
        let best = tours.iter().filter(|t| t.role == Role::Truck).map(|t| t.stops().len()).max()?;
        let tour = tours.iter().find(|t| t.role == Role::Truck && t.stops().len() == best)?;
        Some(tour.stops()[1..].to_vec())
    };
    let pred = |policy, makespan: f64, opt: Option<f64>, truck_only: Option<f64>| Predicted {
        policy,
        makespan,
        competitive_ratio: opt.map(|o| makespan / o),
        drone_impact: truck_only.map(|t| makespan / t),
    };

    let (graph, damaged, opt, truck_only, predicted): (WeightedGraph, Vec<NodeId>, Option<f64>, Option<f64>, Vec<Predicted>) =
        match family {
            OptimisticEqualSpeedStar => {
                if alpha != 1.0 {
                    return Err(side("alpha = 1"));
                }
                let g = make_star_graph(kt + kd, 1.0);
                let tours = tours_of(&RdpInstance::new(g.clone(), kt, kd, alpha, vec![])?)?;
                let target = *drone_nodes(&tours).first().ok_or(LemmaError::NoTarget(family))?;
                let opt = Some(2.0);
                (g, vec![target], opt, None, vec![pred(PolicyKind::Optimistic, 4.0, opt, None)])
            }
            OptimisticMixedSpeed => {
                if alpha == 1.0 {
                    return Err(side("alpha != 1"));
                }
                let (k_fast, k_slow) = if alpha > 1.0 { (kd, kt) } else { (kt, kd) };
                let k_min = k_fast.min(k_slow);
                let horizon = 2.0 * alpha.max(1.0);
                let (to_medium, medium_link, to_far) = if alpha > 1.0 {
                    (alpha * alpha, alpha * alpha - alpha, alpha * alpha)
                } else {
                    let link = (1.0 - alpha + 1.0f64.min(2.0 - 2.0 * alpha)) / 2.0;
                    (2.0 - alpha - link, link, 1.0)
                };
                let near: Vec<NodeId> = (1..=k_slow + k_min).collect();
                let medium: Vec<NodeId> = (0..k_min).map(|j| near.len() + 1 + j).collect();
                let far: Vec<NodeId> = (0..k_fast - k_min).map(|j| near.len() + medium.len() + 1 + j).collect();
                let mut edges = Vec::new();
                edges.extend(near.iter().map(|&p| (DEPOT, p, alpha)));
                for (j, &m) in medium.iter().enumerate() {
                    edges.push((DEPOT, m, to_medium));
                    edges.push((near[2 * j], m, medium_link));
                    edges.push((near[2 * j + 1], m, medium_link));
                }
                edges.extend(far.iter().map(|&f| (DEPOT, f, to_far)));
                let n = 1 + near.len() + medium.len() + far.len();
                let g = WeightedGraph::new(n, edges, None).expect("construction is well formed");
                let tours = tours_of(&RdpInstance::new(g.clone(), kt, kd, alpha, vec![])?)?;
                let seen = drone_nodes(&tours);
                let attached = |v: &NodeId| *v <= 2 * k_min;
                let target = seen
                    .iter()
                    .copied()
                    .find(|v| near.contains(v) && attached(v))
                    .or_else(|| seen.iter().copied().find(|v| near.contains(v)))
                    .ok_or(LemmaError::NoTarget(family))?;
                let opt = Some(horizon);
                (g, vec![target], opt, None, vec![pred(PolicyKind::Optimistic, horizon + 2.0 * alpha, opt, None)])
            }
            OptimisticSlowDronesSaturated => {
                if !(alpha < 1.0 && alpha * c >= 1.0 - 1e-9) {
                    return Err(side("alpha < 1 and alpha * ceil(kd/kt) >= 1"));
                }
                let s = (1.0 / alpha - 1e-9).ceil() as usize;
                let g = make_star_graph(kd + s * kt, 1.0);
                let tours = tours_of(&RdpInstance::new(g.clone(), kt, kd, alpha, vec![])?)?;
                let seen = drone_nodes(&tours);
                let count = kd.min(s * kt);
                if seen.len() < count {
                    return Err(LemmaError::NoTarget(family));
                }
                let opt = Some(2.0 * s as f64);
                (g, seen[..count].to_vec(), opt, None, vec![pred(PolicyKind::Optimistic, 4.0 * s as f64, opt, None)])
            }
            OptimisticSlowDronesUnsaturated => {
                if !(alpha * c < 1.0 - 1e-9) {
                    return Err(side("alpha * ceil(kd/kt) < 1"));
                }
                let f = (1.0 / alpha + 1e-9).floor() as usize;
                let g = make_star_graph(kd + f * kt, 1.0);
                let tours = tours_of(&RdpInstance::new(g.clone(), kt, kd, alpha, vec![])?)?;
                let seen = drone_nodes(&tours);
                if seen.len() < kd {
                    return Err(LemmaError::NoTarget(family));
                }
                let opt = Some(2.0 / alpha);
                let makespan = 2.0 / alpha + 2.0 * c;
                (g, seen[..kd].to_vec(), opt, None, vec![pred(PolicyKind::Optimistic, makespan, opt, None)])
            }
            SlowDroneStarDamagedDroneLeaves => {
                if !(alpha <= 1.0 && is_integer(1.0 / alpha)) {
                    return Err(side("1/alpha a positive integer"));
                }
                let b = (1.0 / alpha).round() as usize;
                let g = make_star_graph(kd + b * kt, 1.0);
                let tours = tours_of(&RdpInstance::new(g.clone(), kt, kd, alpha, vec![])?)?;
                let seen = drone_nodes(&tours);
                let count = kd.min(b * kt);
                if seen.len() < count {
                    return Err(LemmaError::NoTarget(family));
                }
                let opt = Some(2.0 * b as f64);
                let makespan = 2.0 * b as f64 + 2.0 * ceil_div(count, kt) as f64;
                (g, seen[..count].to_vec(), opt, None, vec![pred(PolicyKind::Optimistic, makespan, opt, None)])
            }
            OptimisticBestCase => {
                let s = make_two_level_star(kt * kt, kd * kt, 1.0, alpha);
                let best = 2.0 * kt as f64;
                let truck_only = Some(best + 2.0 * alpha * kd as f64);
                let opt = Some(best);
                (s.graph, vec![], opt, truck_only, vec![pred(PolicyKind::Optimistic, best, opt, truck_only)])
            }
            RegretlessBestCase => {
                if kd % kt != 0 {
                    return Err(side("kd a multiple of kt"));
                }
                if !(kt == 1 || alpha == 1.0) {
                    return Err(side("a single truck or alpha = 1"));
                }
                let s = make_two_level_star(kt * kt, kd * kt, 1.0, alpha);
                let best = 2.0 * kt as f64;
                let truck_only = Some(best + 2.0 * alpha * kd as f64);
                let opt = Some(best);
                (s.graph, vec![], opt, truck_only, vec![pred(PolicyKind::Regretless, best, opt, truck_only)])
            }
            OptimisticWorstDroneImpact => {
                if alpha > 1.0 {
                    let n = kt.min(kd);
                    let g = make_star_graph(n, 1.0);
                    let all: Vec<NodeId> = (1..=n).collect();
                    let truck_only = Some(2.0);
                    let makespan = 2.0 / alpha + 2.0;
                    (g, all, truck_only, truck_only, vec![pred(PolicyKind::Optimistic, makespan, truck_only, truck_only)])
                } else {
                    let pairs = kt.min(kd);
                    let mut edges: Vec<(NodeId, NodeId, f64)> = (1..=kt).map(|p| (DEPOT, p, 1.0)).collect();
                    for j in 0..pairs {
                        let f = kt + 1 + j;
                        edges.push((DEPOT, f, alpha));
                        edges.push((1 + j, f, 1.0 - alpha + 2.0 * DETOUR_EPS));
                    }
                    let n = 1 + kt + pairs;
                    let g = WeightedGraph::new(n, edges, None).expect("construction is well formed");
                    let all: Vec<NodeId> = (1..n).collect();
                    let truck_only = Some(2.0 + 2.0 * DETOUR_EPS);
                    let makespan = 2.0 + 2.0 * alpha;
                    (g, all, truck_only, truck_only, vec![pred(PolicyKind::Optimistic, makespan, truck_only, truck_only)])
                }
            }
            RegretlessEqualSpeedStar | RegretlessSlowDronesStar | RegretlessFastDronesStar => {
                let (leaves, per_tour, opt) = match family {
                    RegretlessEqualSpeedStar => {
                        if alpha != 1.0 {
                            return Err(side("alpha = 1"));
                        }
                        if kt < ceil_div(kd, kt) {
                            return Err(side("kt >= ceil(kd/kt)"));
                        }
                        (kt + kd, 1 + ceil_div(kd, kt), 2.0)
                    }
                    RegretlessSlowDronesStar => {
                        if !(alpha <= 1.0 && is_integer(1.0 / alpha)) {
                            return Err(side("1/alpha a positive integer"));
                        }
                        let b = (1.0 / alpha).round() as usize;
                        if kt + 1 < ceil_div(kd, kt) + b {
                            return Err(side("kt >= ceil(kd/kt) + 1/alpha - 1"));
                        }
                        (b * kt + kd, b + ceil_div(kd, kt), 2.0 * b as f64)
                    }
                    _ => {
                        if !is_integer(alpha) {
                            return Err(side("alpha a positive integer"));
                        }
                        let a = alpha.round() as usize;
                        if kt < ceil_div(a * kd, kt) {
                            return Err(side("kt >= ceil(alpha*kd/kt)"));
                        }
                        (kt + a * kd, 1 + ceil_div(a * kd, kt), 2.0)
                    }
                };
                let g = make_star_graph(leaves, 1.0);
                let tours = tours_of(&RdpInstance::new(g.clone(), kt, kd, alpha, vec![])?)?;
                let tail = longest_tail(&tours).ok_or(LemmaError::NoTarget(family))?;
                if tail.len() + 1 != per_tour {
                    return Err(LemmaError::NoTarget(family));
                }
                let makespan = 2.0 * per_tour as f64;
                let opt = Some(opt);
                (g, tail, opt, None, vec![pred(PolicyKind::Regretless, makespan, opt, None)])
            }
            RegretlessAllDamaged => {
                let g = make_star_graph(kt + kd, 1.0);
                let all: Vec<NodeId> = (1..=kt + kd).collect();
                let span = Some(2.0 * ceil_div(kt + kd, kt) as f64);
                (g, all, span, span, vec![pred(PolicyKind::Regretless, span.unwrap(), span, span)])
            }
            ExploreFirstStar => {
                if !(is_integer(alpha) && kt == 1 && kd == 1) {
                    return Err(side("alpha a positive integer and one truck, one drone"));
                }
                let a = alpha.round() as usize;
                let g = make_star_graph(a + 1, 1.0);
                let tours = tours_of(&RdpInstance::new(g.clone(), kt, kd, alpha, vec![])?)?;
                let last = tours
                    .iter()
                    .find(|t| t.role == Role::Drone && !t.is_empty())
                    .and_then(|t| t.stops().last().copied())
                    .ok_or(LemmaError::NoTarget(family))?;
                let opt = Some(2.0);
                let sync = 2.0 * (alpha + 1.0) / alpha + 2.0;
                let async_ = (2.0 * alpha + 1.0) / alpha + 2.0;
                (
                    g,
                    vec![last],
                    opt,
                    None,
                    vec![pred(PolicyKind::Efhs, sync, opt, None), pred(PolicyKind::Efha, async_, opt, None)],
                )
            }
        };

    let mut instance = RdpInstance::new(graph, kt, kd, alpha, damaged)?;
    instance.meta.insert("class".into(), family.as_str().into());
    Ok(LemmaInstance { family, params, instance, opt_star: opt, truck_only, predicted })
}

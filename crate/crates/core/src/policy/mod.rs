//! Online dispatch policies and the simulator that runs them.

mod explore_first;
mod optimistic;
mod regretless;
mod sim;
mod split;

pub use regretless::{regretless_plan, RegretlessPlan};
pub use sim::{
    run, Decision, NodeStatus, Policy, RevealEvent, Sim, SimulationOutcome, StageMark, VehicleLog, Visit,
};
pub use split::{split_tour, TourSplit};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{NodeId, RdpInstance, Role, Tour};
use crate::solver::{multi_tsp, SolveError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("{policy} needs {what}")]
    Precondition { policy: &'static str, what: &'static str },
    #[error("vehicle {0} did not return to the depot")]
    NotHome(usize),
    #[error("node {0} was never visited")]
    Unvisited(NodeId),
    #[error("damaged node {0} was never reached by a truck")]
    Unserved(NodeId),
    #[error("simulation did not terminate")]
    Runaway,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Optimistic,
    Regretless,
    TruckOnly,
    Efhs,
    Efha,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 5] =
        [PolicyKind::Optimistic, PolicyKind::Regretless, PolicyKind::TruckOnly, PolicyKind::Efhs, PolicyKind::Efha];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Optimistic => "optimistic",
            PolicyKind::Regretless => "regretless",
            PolicyKind::TruckOnly => "truck_only",
            PolicyKind::Efhs => "efhs",
            PolicyKind::Efha => "efha",
        }
    }

    /// Whether the policy can run on this fleet.
    pub fn check(self, instance: &RdpInstance) -> Result<(), SimError> {
        let policy = self.as_str();
        match self {
            PolicyKind::Regretless | PolicyKind::TruckOnly if instance.trucks() == 0 => {
                Err(SimError::Precondition { policy, what: "at least one truck" })
            }
            PolicyKind::Efhs | PolicyKind::Efha if instance.drones() == 0 => {
                Err(SimError::Precondition { policy, what: "at least one drone" })
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == norm || (norm == "truckonly" && *k == PolicyKind::TruckOnly))
            .ok_or_else(|| format!("unknown policy '{s}'"))
    }
}

/// Simulate `kind` on `instance` and return the realised tours and event log.
pub fn simulate(instance: &RdpInstance, kind: PolicyKind) -> Result<SimulationOutcome, SimError> {
    kind.check(instance)?;
    match kind {
        PolicyKind::Optimistic => run(instance, &mut optimistic::Optimistic::default()),
        PolicyKind::Regretless => run(instance, &mut regretless::Regretless::default()),
        PolicyKind::TruckOnly => run(instance, &mut TruckOnly),
        PolicyKind::Efhs => run(instance, &mut explore_first::ExploreFirst::synchronous()),
        PolicyKind::Efha => run(instance, &mut explore_first::ExploreFirst::asynchronous()),
    }
}

/// The tours a policy commits to before any damage is revealed.
///
/// Optimistic: all first-stage tours. Regretless: the truck tours in the
/// orientation they are split and driven. Truck-only: its truck tours.
/// Explore-first policies: the drone survey tours. These are the same tours
/// [`simulate`] uses, so adversarial damage can be placed on them.
pub fn first_stage_tours(instance: &RdpInstance, kind: PolicyKind) -> Result<Vec<Tour>, SimError> {
    kind.check(instance)?;
    let c = instance.closure();
    let customers = instance.customers();
    let (kt, kd, alpha) = (instance.trucks(), instance.drones(), instance.alpha());
    Ok(match kind {
        PolicyKind::Optimistic => {
            let sol = multi_tsp(c, &customers, kt, kd, alpha)?;
            sol.tours().cloned().collect()
        }
        PolicyKind::Regretless => {
            let plan = regretless_plan(c, &customers, kt, kd, alpha)?;
            plan.truck_tours.iter().map(|s| Tour::through(Role::Truck, s)).collect()
        }
        PolicyKind::TruckOnly => multi_tsp(c, &customers, kt, 0, alpha)?.trucks,
        PolicyKind::Efhs | PolicyKind::Efha => multi_tsp(c, &customers, 0, kd, alpha)?.drones,
    })
}

/// Send every vehicle in `ids` along the matching tour, skipping empty ones.
fn dispatch_tours(sim: &mut Sim<'_>, ids: impl Iterator<Item = usize>, tours: &[Tour]) {
    for (v, tour) in ids.zip(tours) {
        if !tour.is_empty() {
            sim.dispatch(v, &tour.nodes[1..]);
        }
    }
}

struct TruckOnly;

impl Policy for TruckOnly {
    fn name(&self) -> &'static str {
        PolicyKind::TruckOnly.as_str()
    }

    fn start(&mut self, sim: &mut Sim<'_>) -> Result<(), SimError> {
        let sol = multi_tsp(sim.closure(), &sim.customers(), sim.trucks(), 0, sim.alpha())?;
        sim.mark_stage("trucks");
        dispatch_tours(sim, sim.truck_ids(), &sol.trucks);
        Ok(())
    }
}

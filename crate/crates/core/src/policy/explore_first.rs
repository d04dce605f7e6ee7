use crate::solver::multi_tsp;

use super::sim::{Policy, Sim};
use super::{dispatch_tours, PolicyKind, SimError};

/// Drones survey every node first; trucks only drive to damage the drones found.
///
/// Synchronous: trucks wait until every drone is back, then run one optimal
/// tour set over all damaged nodes. Asynchronous: whenever trucks sit idle at
/// the depot and known damage is not yet assigned, the idle trucks get an
/// optimal tour set over that damage. Trucks already driving finish their tour.
pub(crate) struct ExploreFirst {
    asynchronous: bool,
    trucks_released: bool,
}

impl ExploreFirst {
    pub(crate) fn synchronous() -> Self {
        Self { asynchronous: false, trucks_released: false }
    }

    pub(crate) fn asynchronous() -> Self {
        Self { asynchronous: true, trucks_released: false }
    }
}

impl Policy for ExploreFirst {
    fn name(&self) -> &'static str {
        if self.asynchronous {
            PolicyKind::Efha.as_str()
        } else {
            PolicyKind::Efhs.as_str()
        }
    }

    fn start(&mut self, sim: &mut Sim<'_>) -> Result<(), SimError> {
        let sol = multi_tsp(sim.closure(), &sim.customers(), 0, sim.drones(), sim.alpha())?;
        sim.mark_stage("explore");
        dispatch_tours(sim, sim.drone_ids(), &sol.drones);
        Ok(())
    }

    fn after_events(&mut self, sim: &mut Sim<'_>) -> Result<(), SimError> {
        if self.asynchronous {
            return dispatch_idle(sim);
        }
        if self.trucks_released || !sim.drone_ids().all(|v| sim.is_idle(v)) {
            return Ok(());
        }
        self.trucks_released = true;
        sim.mark_stage("repair");
        let damaged = sim.unserved_damaged();
        if damaged.is_empty() {
            return Ok(());
        }
        let sol = multi_tsp(sim.closure(), &damaged, sim.trucks(), 0, sim.alpha())?;
        dispatch_tours(sim, sim.truck_ids(), &sol.trucks);
        Ok(())
    }
}

fn dispatch_idle(sim: &mut Sim<'_>) -> Result<(), SimError> {
    let idle: Vec<usize> = sim.truck_ids().filter(|&v| sim.is_idle(v)).collect();
    if idle.is_empty() {
        return Ok(());
    }
    let assigned: Vec<usize> = sim.truck_ids().flat_map(|v| sim.remaining_stops(v)).collect();
    let pending: Vec<usize> = sim.unserved_damaged().into_iter().filter(|v| !assigned.contains(v)).collect();
    if pending.is_empty() {
        return Ok(());
    }
    let sol = multi_tsp(sim.closure(), &pending, idle.len(), 0, sim.alpha())?;
    sim.mark_stage("repair");
    dispatch_tours(sim, idle.into_iter(), &sol.trucks);
    Ok(())
}

use crate::solver::multi_tsp;

use super::sim::{Policy, Sim};
use super::{dispatch_tours, PolicyKind, SimError};

/// Plans as if nothing is damaged, then sends trucks back to damaged nodes
/// that only drones saw.
#[derive(Default)]
pub(crate) struct Optimistic {
    second_stage_started: bool,
}

impl Policy for Optimistic {
    fn name(&self) -> &'static str {
        PolicyKind::Optimistic.as_str()
    }

    fn start(&mut self, sim: &mut Sim<'_>) -> Result<(), SimError> {
        let sol = multi_tsp(sim.closure(), &sim.customers(), sim.trucks(), sim.drones(), sim.alpha())?;
        sim.mark_stage("explore");
        dispatch_tours(sim, sim.truck_ids(), &sol.trucks);
        dispatch_tours(sim, sim.drone_ids(), &sol.drones);
        Ok(())
    }

    fn after_events(&mut self, sim: &mut Sim<'_>) -> Result<(), SimError> {
        if self.second_stage_started || !(0..sim.trucks() + sim.drones()).all(|v| sim.is_idle(v)) {
            return Ok(());
        }
        self.second_stage_started = true;
        let missed = sim.unserved_damaged();
        sim.mark_stage("repair");
        if missed.is_empty() {
            return Ok(());
        }
        let sol = multi_tsp(sim.closure(), &missed, sim.trucks(), 0, sim.alpha())?;
        dispatch_tours(sim, sim.truck_ids(), &sol.trucks);
        Ok(())
    }
}

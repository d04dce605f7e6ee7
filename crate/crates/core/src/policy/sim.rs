//! Discrete-event simulation shared by all policies.
//!
//! The simulator owns the hidden damage set. Policies only see node status after
//! some vehicle has visited the node, which makes the online information rule
//! structural rather than a convention.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::graph::{MetricClosure, NodeId, RdpInstance, Role, DEPOT, TOL};

use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeStatus {
    Unknown,
    Damaged,
    Intact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Visit {
    pub node: NodeId,
    pub time: f64,
}

/// First visit to a node, when its status became known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevealEvent {
    pub time: f64,
    pub vehicle: usize,
    pub node: NodeId,
    pub damaged: bool,
}

/// A plan handed to a vehicle: it leaves its current node at `time` and visits `stops`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub time: f64,
    pub vehicle: usize,
    pub stops: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageMark {
    pub label: String,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleLog {
    pub vehicle: usize,
    pub role: Role,
    pub visits: Vec<Visit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationOutcome {
    pub policy: String,
    pub makespan: f64,
    pub vehicles: Vec<VehicleLog>,
    pub events: Vec<RevealEvent>,
    pub stages: Vec<StageMark>,
    pub decisions: Vec<Decision>,
}

impl SimulationOutcome {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("outcome serialises");
        s.push('\n');
        s
    }
}

/// Hooks a dispatch policy implements. All hooks run after every revelation at
/// the current instant has been applied.
pub trait Policy {
    fn name(&self) -> &'static str;

    fn start(&mut self, sim: &mut Sim<'_>) -> Result<(), SimError>;

    /// Called once per vehicle that reached a node at the current instant.
    fn on_arrival(&mut self, _sim: &mut Sim<'_>, _vehicle: usize, _node: NodeId) -> Result<(), SimError> {
        Ok(())
    }

    /// Called after all arrivals of the current instant have been handled.
    fn after_events(&mut self, _sim: &mut Sim<'_>) -> Result<(), SimError> {
        Ok(())
    }
}

struct VehicleState {
    role: Role,
    at: NodeId,
    at_time: f64,
    plan: VecDeque<Visit>,
    visits: Vec<Visit>,
}

pub struct Sim<'a> {
    instance: &'a RdpInstance,
    clock: f64,
    vehicles: Vec<VehicleState>,
    status: Vec<NodeStatus>,
    truck_visited: Vec<bool>,
    events: Vec<RevealEvent>,
    decisions: Vec<Decision>,
    stages: Vec<StageMark>,
}

const MAX_STEPS: usize = 1_000_000;

impl<'a> Sim<'a> {
    fn new(instance: &'a RdpInstance) -> Self {
        let n = instance.node_count();
        let mut status = vec![NodeStatus::Unknown; n];
        status[DEPOT] = NodeStatus::Intact;
        let vehicles = (0..instance.trucks() + instance.drones())
            .map(|v| VehicleState {
                role: if v < instance.trucks() { Role::Truck } else { Role::Drone },
                at: DEPOT,
                at_time: 0.0,
                plan: VecDeque::new(),
                visits: vec![Visit { node: DEPOT, time: 0.0 }],
            })
            .collect();
        Self {
            instance,
            clock: 0.0,
            vehicles,
            status,
            truck_visited: vec![false; n],
            events: Vec::new(),
            decisions: Vec::new(),
            stages: Vec::new(),
        }
    }

    pub fn closure(&self) -> &MetricClosure {
        self.instance.closure()
    }

    pub fn alpha(&self) -> f64 {
        self.instance.alpha()
    }

    pub fn trucks(&self) -> usize {
        self.instance.trucks()
    }

    pub fn drones(&self) -> usize {
        self.instance.drones()
    }

    /// Vehicle indices: trucks first, then drones.
    pub fn truck_ids(&self) -> std::ops::Range<usize> {
        0..self.trucks()
    }

    pub fn drone_ids(&self) -> std::ops::Range<usize> {
        self.trucks()..self.trucks() + self.drones()
    }

    pub fn customers(&self) -> Vec<NodeId> {
        self.instance.customers()
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn status(&self, v: NodeId) -> NodeStatus {
        self.status[v]
    }

    pub fn truck_visited(&self, v: NodeId) -> bool {
        self.truck_visited[v]
    }

    /// Known damaged nodes that no truck has reached yet.
    pub fn unserved_damaged(&self) -> Vec<NodeId> {
        (1..self.status.len())
            .filter(|&v| self.status[v] == NodeStatus::Damaged && !self.truck_visited[v])
            .collect()
    }

    pub fn position(&self, vehicle: usize) -> NodeId {
        self.vehicles[vehicle].at
    }

    pub fn is_idle(&self, vehicle: usize) -> bool {
        self.vehicles[vehicle].plan.is_empty()
    }

    pub fn remaining_stops(&self, vehicle: usize) -> Vec<NodeId> {
        self.vehicles[vehicle].plan.iter().map(|v| v.node).collect()
    }

    /// Replace the vehicle's plan. It leaves its current node now and travels
    /// along shortest paths through `stops` in order.
    pub fn dispatch(&mut self, vehicle: usize, stops: &[NodeId]) {
        let state = &mut self.vehicles[vehicle];
        let depart = self.clock.max(state.at_time);
        let speed = match state.role {
            Role::Truck => 1.0,
            Role::Drone => self.instance.alpha(),
        };
        let closure = self.instance.closure();
        let mut cum = 0.0;
        let mut prev = state.at;
        state.plan.clear();
        for &s in stops {
            cum += closure.dist(prev, s);
            prev = s;
            let time = match state.role {
                Role::Truck => depart + cum,
                Role::Drone => depart + cum / speed,
            };
            state.plan.push_back(Visit { node: s, time });
        }
        self.decisions.push(Decision { time: depart, vehicle, stops: stops.to_vec() });
    }

    pub fn mark_stage(&mut self, label: &str) {
        self.stages.push(StageMark { label: label.to_string(), time: self.clock });
    }

    fn next_time(&self) -> Option<f64> {
        self.vehicles.iter().filter_map(|v| v.plan.front().map(|p| p.time)).reduce(f64::min)
    }
}

/// Run `policy` on `instance` until every vehicle has finished its plan.
pub fn run(instance: &RdpInstance, policy: &mut dyn Policy) -> Result<SimulationOutcome, SimError> {
    let mut sim = Sim::new(instance);
    policy.start(&mut sim)?;
    policy.after_events(&mut sim)?;
    let mut steps = 0;
    while let Some(first) = sim.next_time() {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(SimError::Runaway);
        }
        let batch: Vec<usize> = (0..sim.vehicles.len())
            .filter(|&v| sim.vehicles[v].plan.front().is_some_and(|p| p.time <= first + TOL))
            .collect();
        let mut arrived = Vec::with_capacity(batch.len());
        for &v in &batch {
            let state = &mut sim.vehicles[v];
            let visit = state.plan.pop_front().expect("batch vehicles have a next stop");
            state.at = visit.node;
            state.at_time = visit.time;
            state.visits.push(visit);
            sim.clock = sim.clock.max(visit.time);
            arrived.push((v, visit));
        }
        for &(v, visit) in &arrived {
            let node = visit.node;
            if sim.status[node] == NodeStatus::Unknown {
                let damaged = instance.is_damaged(node);
                sim.status[node] = if damaged { NodeStatus::Damaged } else { NodeStatus::Intact };
                sim.events.push(RevealEvent { time: visit.time, vehicle: v, node, damaged });
            }
            if sim.vehicles[v].role == Role::Truck {
                sim.truck_visited[node] = true;
            }
        }
        for &(v, visit) in &arrived {
            policy.on_arrival(&mut sim, v, visit.node)?;
        }
        policy.after_events(&mut sim)?;
    }

    if let Some(v) = (0..sim.vehicles.len()).find(|&v| sim.vehicles[v].at != DEPOT) {
        return Err(SimError::NotHome(v));
    }
    if let Some(&v) = instance.customers().iter().find(|&&v| sim.status[v] == NodeStatus::Unknown) {
        return Err(SimError::Unvisited(v));
    }
    if let Some(&v) = instance.damaged().iter().find(|&&v| !sim.truck_visited[v]) {
        return Err(SimError::Unserved(v));
    }

    let makespan = sim.vehicles.iter().map(|v| v.at_time).fold(0.0, f64::max);
    let vehicles = sim
        .vehicles
        .into_iter()
        .enumerate()
        .map(|(vehicle, s)| VehicleLog { vehicle, role: s.role, visits: s.visits })
        .collect();
    Ok(SimulationOutcome {
        policy: policy.name().to_string(),
        makespan,
        vehicles,
        events: sim.events,
        stages: sim.stages,
        decisions: sim.decisions,
    })
}

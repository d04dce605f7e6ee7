use proptest::prelude::*;
use relief_core::gen::gen_random;
use relief_core::graph::{NodeId, RdpInstance, Role, DEPOT, TOL};
use relief_core::policy::{simulate, PolicyKind, SimulationOutcome};
use relief_core::solver::multi_tsp;

const ALPHAS: [f64; 5] = [1.0 / 3.0, 0.5, 1.0, 2.0, 3.0];

fn instance(n: usize, seed: u64, trucks: usize, drones: usize, alpha: f64, damage_bits: u32) -> RdpInstance {
    let g = gen_random(n, seed).unwrap();
    let damaged = (1..n).filter(|v| damage_bits >> v & 1 == 1).collect();
    RdpInstance::new(g, trucks, drones, alpha, damaged).unwrap()
}

fn tsp(inst: &RdpInstance, targets: &[NodeId], trucks: usize, drones: usize) -> f64 {
    multi_tsp(inst.closure(), targets, trucks, drones, inst.alpha()).unwrap().makespan
}

fn le(a: f64, b: f64) -> bool {
    a <= b + TOL * (1.0 + b.abs())
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL * (1.0 + b.abs())
}

/// Feasibility read back from the realised tours.
fn assert_feasible(inst: &RdpInstance, out: &SimulationOutcome) {
    let mut seen = vec![false; inst.node_count()];
    let mut by_truck = vec![false; inst.node_count()];
    for log in &out.vehicles {
        assert_eq!(log.visits.first().unwrap().node, DEPOT);
        assert_eq!(log.visits.last().unwrap().node, DEPOT, "vehicle {} not home", log.vehicle);
        assert!(le(log.visits.last().unwrap().time, out.makespan));
        assert!(log.visits.windows(2).all(|w| w[0].time <= w[1].time));
        for v in &log.visits {
            seen[v.node] = true;
            if log.role == Role::Truck {
                by_truck[v.node] = true;
            }
        }
    }
    assert!(inst.customers().iter().all(|&v| seen[v]));
    assert!(inst.damaged().iter().all(|&v| by_truck[v]));
    let latest = out.vehicles.iter().map(|l| l.visits.last().unwrap().time).fold(0.0, f64::max);
    assert_eq!(latest, out.makespan);
}

/// Damaged nodes no truck reached before the second Optimistic stage began.
fn missed_by_first_stage(inst: &RdpInstance, out: &SimulationOutcome) -> Vec<NodeId> {
    let repair = out.stages.iter().find(|s| s.label == "repair").expect("second stage marked").time;
    inst.damaged()
        .iter()
        .copied()
        .filter(|&v| {
            !out.vehicles
                .iter()
                .filter(|l| l.role == Role::Truck)
                .any(|l| l.visits.iter().any(|x| x.node == v && x.time <= repair + TOL))
        })
        .collect()
}

/// Flip the damage of every node still unseen at `tau` and rerun: nothing
/// decided up to `tau` may change.
fn assert_decisions_hidden(inst: &RdpInstance, kind: PolicyKind, out: &SimulationOutcome, tau: f64) {
    let seen: Vec<NodeId> = out.events.iter().filter(|e| e.time <= tau + TOL).map(|e| e.node).collect();
    let flipped: Vec<NodeId> = inst
        .customers()
        .into_iter()
        .filter(|v| if seen.contains(v) { inst.is_damaged(*v) } else { !inst.is_damaged(*v) })
        .collect();
    let alt = inst.with_damaged(flipped).unwrap();
    let replay = simulate(&alt, kind).unwrap();
    let upto = |o: &SimulationOutcome| o.decisions.iter().filter(|d| d.time <= tau + TOL).cloned().collect::<Vec<_>>();
    assert_eq!(upto(out), upto(&replay), "{kind} decisions diverge before {tau}");
}

fn check_all(inst: &RdpInstance) {
    let customers = inst.customers();
    let (kt, kd) = (inst.trucks(), inst.drones());
    let joint = tsp(inst, &customers, kt, kd);
    let trucks_only = tsp(inst, &customers, kt, 0);
    let damaged_only = tsp(inst, inst.damaged(), kt, 0);
    let lower = joint.max(damaged_only);
    for kind in PolicyKind::ALL {
        if kind.check(inst).is_err() {
            continue;
        }
        let out = simulate(inst, kind).unwrap();
        assert_eq!(out.policy, kind.as_str());
        assert_feasible(inst, &out);
        assert!(le(lower, out.makespan), "{kind}: {} below lower bound {lower}", out.makespan);
        match kind {
            PolicyKind::Optimistic => {
                let missed = missed_by_first_stage(inst, &out);
                let predicted = joint + tsp(inst, &missed, kt, 0);
                assert!(close(out.makespan, predicted), "two-stage identity {} vs {predicted}", out.makespan);
                assert!(le(out.makespan, joint + damaged_only));
            }
            PolicyKind::Regretless => assert!(le(out.makespan, trucks_only)),
            PolicyKind::TruckOnly => assert!(close(out.makespan, trucks_only)),
            PolicyKind::Efhs if inst.damaged().is_empty() => {
                assert!(close(out.makespan, tsp(inst, &customers, 0, kd)));
            }
            _ => {}
        }
        for e in out.events.iter().step_by(2) {
            assert_decisions_hidden(inst, kind, &out, e.time);
        }
        let back: SimulationOutcome = serde_json::from_str(&out.to_json()).unwrap();
        assert_eq!(back, out);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn policies_respect_bounds_and_information(
        n in 2usize..=7,
        seed in any::<u64>(),
        trucks in 1usize..=2,
        drones in 0usize..=2,
        alpha in prop::sample::select(ALPHAS.to_vec()),
        damage_bits in any::<u32>(),
    ) {
        check_all(&instance(n, seed, trucks, drones, alpha, damage_bits));
    }
}

#[test]
fn everything_damaged_pins_regretless_to_truck_only() {
    for seed in 0..10 {
        for alpha in ALPHAS {
            let inst = instance(7, seed, 1, 2, alpha, u32::MAX);
            let trucks_only = tsp(&inst, &inst.customers(), 1, 0);
            assert!(close(simulate(&inst, PolicyKind::Regretless).unwrap().makespan, trucks_only));
            for kind in PolicyKind::ALL {
                assert!(le(trucks_only, simulate(&inst, kind).unwrap().makespan));
            }
        }
    }
}

#[test]
fn no_damage_optimistic_equals_joint_optimum() {
    for seed in 0..10 {
        let inst = instance(7, seed, 1, 1, 2.0, 0);
        let joint = tsp(&inst, &inst.customers(), 1, 1);
        assert!(close(simulate(&inst, PolicyKind::Optimistic).unwrap().makespan, joint));
    }
}

#[test]
fn explore_first_needs_a_drone() {
    let inst = instance(5, 1, 1, 0, 1.0, 0b110);
    assert!(simulate(&inst, PolicyKind::Efhs).is_err());
    assert!(simulate(&inst, PolicyKind::Efha).is_err());
}

#[test]
fn simulation_is_deterministic() {
    let inst = instance(8, 42, 2, 2, 0.5, 0b1010_1010);
    for kind in PolicyKind::ALL {
        assert_eq!(simulate(&inst, kind).unwrap().to_json(), simulate(&inst, kind).unwrap().to_json());
    }
}

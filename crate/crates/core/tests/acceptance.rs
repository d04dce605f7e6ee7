//! Acceptance checks A1–A6. Prints one PASS/FAIL line per criterion and exits
//! non-zero when a gated criterion fails.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use relief_core::gen::rng::SeededRng;
use relief_core::gen::{build_dataset, expand, gen_random, DatasetName};
use relief_core::graph::{make_star_graph, make_two_level_star, NodeId, RdpInstance, Role, WeightedGraph, DEPOT};
use relief_core::harness::{run_experiment, verify_bounds, write_outputs, ExperimentConfig, RatioRecord};
use relief_core::lemma::{make_lemma_instance, LemmaError, LemmaFamily, LemmaInstance, LemmaParams};
use relief_core::policy::{first_stage_tours, simulate, PolicyKind, SimulationOutcome};
use relief_core::solver::{brute_force_multi_tsp, multi_tsp, rdp_star_opt};

const EPS: f64 = 1e-9;
const ALPHAS: [f64; 5] = [1.0 / 3.0, 0.5, 1.0, 2.0, 3.0];
const A4_SEED: u64 = 2024;
const A4_ALPHAS: [f64; 3] = [0.5, 1.0, 2.0];
const A4_FLEETS: [(usize, usize); 3] = [(1, 1), (1, 2), (2, 1)];

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= EPS
}

struct Outcome {
    pass: bool,
    gated: bool,
    detail: String,
}

impl Outcome {
    fn gated(failures: &[String], summary: String) -> Self {
        let mut detail = summary;
        for f in failures.iter().take(5) {
            detail.push_str(&format!("\n    {f}"));
        }
        if failures.len() > 5 {
            detail.push_str(&format!("\n    ... {} more", failures.len() - 5));
        }
        Outcome { pass: failures.is_empty(), gated: true, detail }
    }
}

/// Random connected graph: complete Euclidean for even seeds, sparse weighted otherwise.
fn random_graph(seed: u64, n: usize) -> WeightedGraph {
    if seed % 2 == 0 {
        return gen_random(n, seed).unwrap();
    }
    let mut rng = SeededRng::new(seed);
    let mut edges = Vec::new();
    for v in 1..n {
        let parent = (rng.uniform() * v as f64) as usize;
        edges.push((parent, v, rng.uniform_in(0.1, 10.0)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !edges.iter().any(|&(a, b, _)| (a, b) == (u, v)) && rng.bernoulli(0.3) {
                edges.push((u, v, rng.uniform_in(0.1, 10.0)));
            }
        }
    }
    WeightedGraph::new(n, edges, None).unwrap()
}

fn a1() -> Outcome {
    let mut failures = Vec::new();
    let mut cases = 0;
    for seed in 0..50u64 {
        let n = 3 + (seed as usize % 5);
        let graph = random_graph(seed, n);
        let mut rng = SeededRng::new(seed ^ 0xa1);
        let damaged: Vec<NodeId> = (1..n).filter(|_| rng.bernoulli(0.4)).collect();
        for trucks in 1..=2 {
            for drones in 0..=2 {
                for alpha in ALPHAS {
                    cases += 1;
                    let inst = RdpInstance::new(graph.clone(), trucks, drones, alpha, damaged.clone()).unwrap();
                    let c = inst.closure();
                    let customers = inst.customers();
                    let dp = multi_tsp(c, &customers, trucks, drones, alpha).unwrap().makespan;
                    let bf = brute_force_multi_tsp(c, &customers, &[], trucks, drones, alpha).unwrap();
                    let star = rdp_star_opt(&inst).unwrap().makespan;
                    let bf_star = brute_force_multi_tsp(c, &customers, &damaged, trucks, drones, alpha).unwrap();
                    if !close(dp, bf) || !close(star, bf_star) {
                        failures.push(format!(
                            "seed {seed} fleet ({trucks},{drones}) alpha {alpha}: {dp} vs {bf}, {star} vs {bf_star}"
                        ));
                    }
                }
            }
        }
    }
    Outcome::gated(&failures, format!("{cases} solver cases agree with brute force"))
}

fn a2() -> Outcome {
    let mut failures = Vec::new();
    let mut cases = 0;
    for d in [1.0, 2.5] {
        for n in 1..=6usize {
            let graph = make_star_graph(n, d);
            let customers: Vec<NodeId> = (1..=n).collect();
            for k in 1..=3usize {
                for alpha in ALPHAS {
                    cases += 1;
                    let inst = RdpInstance::new(graph.clone(), k, k, alpha, vec![]).unwrap();
                    let trucks = multi_tsp(inst.closure(), &customers, k, 0, alpha).unwrap().makespan;
                    let drones = multi_tsp(inst.closure(), &customers, 0, k, alpha).unwrap().makespan;
                    let rounds = n.div_ceil(k) as f64;
                    if !close(trucks, 2.0 * d * rounds) || !close(drones, 2.0 / alpha * d * rounds) {
                        failures.push(format!("star n={n} d={d} k={k} alpha={alpha}: {trucks}, {drones}"));
                    }
                }
            }
        }
    }
    for f in 1..=2usize {
        for kt in 1..=3usize {
            for kd in 1..=3usize {
                for alpha in ALPHAS {
                    cases += 1;
                    let star = make_two_level_star(f * kt, f * kd, 1.0, alpha);
                    let inst = RdpInstance::new(star.graph, kt, kd, alpha, vec![]).unwrap();
                    let got = multi_tsp(inst.closure(), &inst.customers(), kt, kd, alpha).unwrap().makespan;
                    if !close(got, 2.0 * f as f64) {
                        failures.push(format!("two-level f={f} kt={kt} kd={kd} alpha={alpha}: {got}"));
                    }
                }
            }
        }
    }
    Outcome::gated(&failures, format!("{cases} closed forms exact"))
}

fn lemma_mismatches(li: &LemmaInstance) -> Vec<String> {
    let inst = &li.instance;
    let mut out = Vec::new();
    let opt = rdp_star_opt(inst).unwrap().makespan;
    let truck_only = multi_tsp(inst.closure(), &inst.customers(), inst.trucks(), 0, 1.0).unwrap().makespan;
    if li.opt_star.is_some_and(|p| !close(opt, p)) {
        out.push(format!("opt {opt} != {:?}", li.opt_star));
    }
    if li.truck_only.is_some_and(|p| !close(truck_only, p)) {
        out.push(format!("truck-only {truck_only} != {:?}", li.truck_only));
    }
    for p in &li.predicted {
        let got = simulate(inst, p.policy).unwrap().makespan;
        if !close(got, p.makespan) {
            out.push(format!("{} makespan {got} != {}", p.policy, p.makespan));
        }
        if p.competitive_ratio.is_some_and(|r| !close(got / opt, r)) {
            out.push(format!("{} ratio {} != {:?}", p.policy, got / opt, p.competitive_ratio));
        }
        if p.drone_impact.is_some_and(|r| !close(got / truck_only, r)) {
            out.push(format!("{} impact {} != {:?}", p.policy, got / truck_only, p.drone_impact));
        }
    }
    out
}

fn a3() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut built = 0;
    for family in LemmaFamily::ALL {
        let mut family_built = 0;
        for alpha in ALPHAS {
            for kt in 1..=3 {
                for kd in 1..=3 {
                    let params = LemmaParams { trucks: kt, drones: kd, alpha };
                    match make_lemma_instance(family, params, first_stage_tours) {
                        Ok(li) => {
                            family_built += 1;
                            for m in lemma_mismatches(&li) {
                                failures.push(format!("{family} kt={kt} kd={kd} alpha={alpha:.3}: {m}"));
                            }
                        }
                        Err(LemmaError::SideCondition { .. }) => {}
                        Err(e) => failures.push(format!("{family} kt={kt} kd={kd} alpha={alpha:.3}: {e}")),
                    }
                }
            }
        }
        if family_built == 0 {
            failures.push(format!("{family}: no admissible grid point"));
        }
        built += family_built;
    }
    // Explore-first at alpha = 2: 2.5 synchronous, 2.25 asynchronous.
    let li = make_lemma_instance(
        LemmaFamily::ExploreFirstStar,
        LemmaParams { trucks: 1, drones: 1, alpha: 2.0 },
        first_stage_tours,
    )
    .unwrap();
    let opt = rdp_star_opt(&li.instance).unwrap().makespan;
    let efhs = simulate(&li.instance, PolicyKind::Efhs).unwrap().makespan / opt;
    let efha = simulate(&li.instance, PolicyKind::Efha).unwrap().makespan / opt;
    if !close(efhs, 2.5) || !close(efha, 2.25) {
        failures.push(format!("explore-first alpha=2: efhs {efhs}, efha {efha}"));
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(120) {
        failures.push(format!("took {elapsed:?}, limit 2 min"));
    }
    Outcome::gated(&failures, format!("{built} family instances match predictions in {:.1}s", elapsed.as_secs_f64()))
}

fn a4_config(workers: usize) -> ExperimentConfig {
    ExperimentConfig {
        alphas: A4_ALPHAS.to_vec(),
        fleets: A4_FLEETS.to_vec(),
        workers,
        ..ExperimentConfig::new(DatasetName::Small, A4_SEED)
    }
}

fn invariant_failures(inst: &RdpInstance, kind: PolicyKind, out: &SimulationOutcome) -> Vec<String> {
    let mut bad = Vec::new();
    let (kt, kd, alpha) = (inst.trucks(), inst.drones(), inst.alpha());
    let c = inst.closure();
    let customers = inst.customers();
    let tsp = |t: &[NodeId], m, n| multi_tsp(c, t, m, n, alpha).unwrap().makespan;

    let mut seen = vec![false; inst.node_count()];
    let mut served = vec![false; inst.node_count()];
    for log in &out.vehicles {
        if log.visits.last().map(|v| v.node) != Some(DEPOT) {
            bad.push(format!("vehicle {} not home", log.vehicle));
        }
        for v in &log.visits {
            seen[v.node] = true;
            served[v.node] |= log.role == Role::Truck;
        }
    }
    if !customers.iter().all(|&v| seen[v]) || !inst.damaged().iter().all(|&v| served[v]) {
        bad.push("infeasible".into());
    }
    let joint = tsp(&customers, kt, kd);
    let trucks_only = tsp(&customers, kt, 0);
    let lower = joint.max(tsp(inst.damaged(), kt, 0));
    if out.makespan < lower - EPS {
        bad.push(format!("makespan {} below {lower}", out.makespan));
    }
    match kind {
        PolicyKind::Optimistic => {
            let repair = out.stages.iter().find(|s| s.label == "repair").map_or(f64::INFINITY, |s| s.time);
            let missed: Vec<NodeId> = inst
                .damaged()
                .iter()
                .copied()
                .filter(|&v| {
                    !out.vehicles.iter().any(|l| {
                        l.role == Role::Truck && l.visits.iter().any(|x| x.node == v && x.time <= repair + EPS)
                    })
                })
                .collect();
            let predicted = joint + tsp(&missed, kt, 0);
            if !close(out.makespan, predicted) {
                bad.push(format!("two-stage identity {} != {predicted}", out.makespan));
            }
        }
        PolicyKind::Regretless if out.makespan > trucks_only + EPS => {
            bad.push(format!("regretless {} above truck-only {trucks_only}", out.makespan));
        }
        _ => {}
    }
    bad
}

fn a4(records: &[RatioRecord], elapsed: Duration) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let base = build_dataset(DatasetName::Small, A4_SEED).unwrap();
    let instances = expand(&base, &A4_ALPHAS, &A4_FLEETS).unwrap();
    let mut runs = 0;
    for inst in &instances {
        for kind in PolicyKind::ALL {
            runs += 1;
            let id = inst.meta["id"].as_str().unwrap();
            match simulate(inst, kind) {
                Ok(out) => {
                    for b in invariant_failures(inst, kind, &out) {
                        failures.push(format!("{id} {kind}: {b}"));
                    }
                }
                Err(e) => failures.push(format!("{id} {kind}: {e}")),
            }
        }
    }
    if records.len() != runs {
        failures.push(format!("{} records for {runs} runs", records.len()));
    }
    let report = verify_bounds(records);
    for v in &report.violations {
        let r = &records[v.record];
        failures.push(format!("{} {}: {:?} {} vs {}", r.instance_id, r.policy, v.bound, v.value, v.limit));
    }
    let total = elapsed + start.elapsed();
    if total > Duration::from_secs(30 * 60) {
        failures.push(format!("took {total:?}, limit 30 min"));
    }
    Outcome::gated(
        &failures,
        format!(
            "{runs} policy runs on {} instances, {} bound checks, {} violations, {:.1}s",
            instances.len(),
            report.checked,
            report.violations.len(),
            total.as_secs_f64()
        ),
    )
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

fn a5(records: &[RatioRecord]) -> Outcome {
    let ratios = |policy: &str, alpha: f64| -> Vec<f64> {
        records.iter().filter(|r| r.policy == policy && r.alpha == alpha).map(|r| r.competitive_ratio).collect()
    };
    let mut soft = Vec::new();
    let mut soft_ok = true;
    for alpha in A4_ALPHAS {
        let (opt, reg) = (median(ratios("optimistic", alpha)), median(ratios("regretless", alpha)));
        let holds = if alpha <= 1.0 { reg <= opt } else { opt <= reg };
        soft_ok &= holds;
        soft.push(format!("alpha {alpha}: optimistic {opt:.4}, regretless {reg:.4}"));
    }
    let worst_impact = records
        .iter()
        .filter(|r| r.policy == "regretless")
        .map(|r| r.drone_impact_ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    let failures = if close(worst_impact, 1.0) {
        Vec::new()
    } else {
        vec![format!("worst regretless drone impact {worst_impact}")]
    };
    Outcome::gated(
        &failures,
        format!(
            "worst regretless drone impact {worst_impact}; median ordering (soft) {}: {}",
            if soft_ok { "holds" } else { "does not hold" },
            soft.join("; ")
        ),
    )
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn a6(records: &[RatioRecord]) -> Outcome {
    let mut failures = Vec::new();
    let one = tempfile::tempdir().unwrap();
    let many = tempfile::tempdir().unwrap();
    write_outputs(one.path(), records).unwrap();
    let rerun = run_experiment(&a4_config(4)).unwrap();
    write_outputs(many.path(), &rerun.records).unwrap();
    let (a, b) = (read_dir_sorted(one.path()), read_dir_sorted(many.path()));
    if a.len() != b.len() {
        failures.push(format!("{} files vs {}", a.len(), b.len()));
    }
    for ((name_a, bytes_a), (name_b, bytes_b)) in a.iter().zip(&b) {
        if name_a != name_b || bytes_a != bytes_b {
            failures.push(format!("{name_a} differs from {name_b}"));
        }
    }
    Outcome::gated(&failures, format!("{} output files byte-identical with 1 and 4 workers", a.len()))
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    results.push(("A1", a1()));
    results.push(("A2", a2()));
    results.push(("A3", a3()));
    let start = Instant::now();
    let run = run_experiment(&a4_config(1)).expect("A4 experiment runs");
    let elapsed = start.elapsed();
    results.push(("A4", a4(&run.records, elapsed)));
    results.push(("A5", a5(&run.records)));
    results.push(("A6", a6(&run.records)));

    let mut failed = false;
    for (name, o) in &results {
        println!("{name} {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed |= o.gated && !o.pass;
    }
    if failed {
        std::process::exit(1);
    }
}

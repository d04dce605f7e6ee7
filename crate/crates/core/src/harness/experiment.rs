use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::gen::{build_dataset, expand, DatasetName};
use crate::graph::RdpInstance;
use crate::policy::PolicyKind;
use crate::solver::MAX_TARGETS;

use super::stats::key_columns;
use super::{aggregate, evaluate, verify_bounds, write_records, write_summary, GroupKey, HarnessError, Metric, RatioRecord};

/// Environment variable that sets the worker count when no explicit count is given.
pub const WORKERS_ENV: &str = "RELIEF_WORKERS";

/// Explicit count, else `RELIEF_WORKERS`, else the available parallelism.
pub fn resolve_workers(requested: Option<usize>) -> usize {
    requested
        .or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse().ok()))
        .or_else(|| std::thread::available_parallelism().ok().map(|n| n.get()))
        .unwrap_or(1)
        .max(1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: DatasetName,
    pub root_seed: u64,
    pub alphas: Vec<f64>,
    pub fleets: Vec<(usize, usize)>,
    pub policies: Vec<PolicyKind>,
    pub workers: usize,
}

impl ExperimentConfig {
    /// The dataset's own α and fleet grids, every policy, one worker.
    pub fn new(dataset: DatasetName, root_seed: u64) -> Self {
        Self {
            dataset,
            root_seed,
            alphas: dataset.alphas(),
            fleets: dataset.fleets(),
            policies: PolicyKind::ALL.to_vec(),
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skip {
    pub instance_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentResult {
    pub records: Vec<RatioRecord>,
    pub skipped: Vec<Skip>,
}

fn instance_id(inst: &RdpInstance) -> String {
    inst.meta.get("id").and_then(|v| v.as_str()).unwrap_or("instance").to_string()
}

/// Evaluate every policy on the dataset × α × fleet grid.
///
/// Worker `w` takes the instances whose index is `w` modulo the worker count;
/// results are put back in instance order, so the output does not depend on
/// how many workers ran.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    let base = build_dataset(cfg.dataset, cfg.root_seed)?;
    let instances = expand(&base, &cfg.alphas, &cfg.fleets)?;
    let workers = cfg.workers.clamp(1, instances.len().max(1));
    log::info!("{}: {} instances on {workers} workers", cfg.dataset, instances.len());

    let mut slots: Vec<Option<Result<Vec<RatioRecord>, HarnessError>>> = (0..instances.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let instances = &instances;
                let policies = &cfg.policies;
                scope.spawn(move || {
                    (w..instances.len())
                        .step_by(workers)
                        .map(|i| (i, evaluate(&instances[i], policies)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, res) in h.join().expect("worker panicked") {
                slots[i] = Some(res);
            }
        }
    });

    let mut out = ExperimentResult::default();
    for (inst, slot) in instances.iter().zip(slots) {
        let records = slot.expect("every index is assigned to one worker")?;
        if inst.customers().len() > MAX_TARGETS {
            out.skipped.push(Skip {
                instance_id: instance_id(inst),
                reason: format!("{} customers exceed the solver cap of {MAX_TARGETS}", inst.customers().len()),
            });
        }
        out.records.extend(records);
    }
    Ok(out)
}

/// Write `records.csv`, the per-policy summaries and `bounds_report.json` into `dir`.
pub fn write_outputs(dir: &Path, records: &[RatioRecord]) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let path = dir.join("records.csv");
    write_records(fs::File::create(&path)?, records)?;
    written.push(path);

    let mut policies: Vec<&str> = Vec::new();
    for r in records {
        if !policies.contains(&r.policy.as_str()) {
            policies.push(&r.policy);
        }
    }
    let summaries: [(&str, &[GroupKey], Metric); 3] = [
        ("ratio_vs_alpha", &[GroupKey::Fleet, GroupKey::Alpha], Metric::CompetitiveRatio),
        ("risk_vs_alpha", &[GroupKey::Fleet, GroupKey::Alpha], Metric::DroneImpact),
        ("ratio_vs_drone_trucks", &[GroupKey::Alpha, GroupKey::Fleet], Metric::CompetitiveRatio),
    ];
    for policy in policies {
        let subset: Vec<RatioRecord> = records.iter().filter(|r| r.policy == policy).cloned().collect();
        for (stem, keys, metric) in summaries {
            let path = dir.join(format!("{stem}_{policy}.csv"));
            write_summary(fs::File::create(&path)?, &key_columns(keys), &aggregate(&subset, keys, metric))?;
            written.push(path);
        }
    }

    let path = dir.join("bounds_report.json");
    let mut json = serde_json::to_string_pretty(&verify_bounds(records)).expect("report serialises");
    json.push('\n');
    fs::write(&path, json)?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_worker_count_wins() {
        assert_eq!(resolve_workers(Some(3)), 3);
        assert_eq!(resolve_workers(Some(0)), 1);
        assert!(resolve_workers(None) >= 1);
    }
}

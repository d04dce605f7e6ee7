//! Ratio records, statistics, bound checks and the experiment runner.

mod bounds;
mod experiment;
mod stats;

use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{RdpInstance, TOL};
use crate::policy::{simulate, PolicyKind, SimError};
use crate::solver::{multi_tsp, rdp_star_opt, SolveError, MAX_TARGETS};

pub use bounds::{ratio_factor, verify_bounds, Bound, BoundCheck, BoundReport};
pub use experiment::{
    resolve_workers, run_experiment, write_outputs, ExperimentConfig, ExperimentResult, Skip, WORKERS_ENV,
};
pub use stats::{
    aggregate, quartiles, read_summary, write_summary, GroupKey, Metric, SummaryRow, QUARTILE_CONVENTION,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Gen(#[from] crate::gen::GenError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("bad group key {0:?}")]
    BadGroupKey(String),
    #[error("bad metric {0:?}")]
    BadMetric(String),
}

/// One policy run on one instance, with both reference optima.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub instance_id: String,
    pub graph_class: String,
    pub n: usize,
    pub delta: f64,
    pub alpha: f64,
    pub trucks: usize,
    pub drones: usize,
    pub policy: String,
    pub makespan: f64,
    /// Full-information optimum.
    pub opt_star: f64,
    /// Best makespan with trucks alone.
    pub truck_only_opt: f64,
    pub competitive_ratio: f64,
    pub drone_impact_ratio: f64,
}

fn meta_str(inst: &RdpInstance, key: &str) -> Option<String> {
    inst.meta.get(key).and_then(|v| v.as_str()).map(str::to_string)
}

/// Records for every applicable policy on `instance`.
///
/// Instances over the solver cap yield no records; so do policies whose fleet
/// preconditions fail. Both are logged.
pub fn evaluate(instance: &RdpInstance, policies: &[PolicyKind]) -> Result<Vec<RatioRecord>, HarnessError> {
    let id = meta_str(instance, "id").unwrap_or_else(|| "instance".to_string());
    let customers = instance.customers();
    if customers.len() > MAX_TARGETS {
        log::warn!("{id}: {} customers exceed the solver cap of {MAX_TARGETS}; skipped", customers.len());
        return Ok(Vec::new());
    }
    let opt_star = rdp_star_opt(instance)?.makespan;
    let truck_only_opt = multi_tsp(instance.closure(), &customers, instance.trucks(), 0, 1.0)?.makespan;
    let delta = instance.meta.get("delta").and_then(|v| v.as_f64()).unwrap_or_else(|| {
        instance.damaged().len() as f64 / customers.len().max(1) as f64
    });
    let mut out = Vec::with_capacity(policies.len());
    for &kind in policies {
        if let Err(e) = kind.check(instance) {
            log::info!("{id}: {e}; skipped");
            continue;
        }
        let makespan = simulate(instance, kind)?.makespan;
        out.push(RatioRecord {
            instance_id: id.clone(),
            graph_class: meta_str(instance, "class").unwrap_or_else(|| "custom".to_string()),
            n: instance.node_count(),
            delta,
            alpha: instance.alpha(),
            trucks: instance.trucks(),
            drones: instance.drones(),
            policy: kind.as_str().to_string(),
            makespan,
            opt_star,
            truck_only_opt,
            competitive_ratio: ratio(makespan, opt_star),
            drone_impact_ratio: ratio(makespan, truck_only_opt),
        });
    }
    Ok(out)
}

/// `a / b`, with 0/0 read as 1 (an instance without customers).
fn ratio(a: f64, b: f64) -> f64 {
    if b <= TOL && a <= TOL {
        1.0
    } else {
        a / b
    }
}

pub fn write_records<W: io::Write>(writer: W, records: &[RatioRecord]) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
    if records.is_empty() {
        w.write_record(RECORD_COLUMNS)?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: io::Read>(reader: R) -> Result<Vec<RatioRecord>, HarnessError> {
    let mut r = csv::Reader::from_reader(reader);
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

const RECORD_COLUMNS: [&str; 13] = [
    "instance_id",
    "graph_class",
    "n",
    "delta",
    "alpha",
    "trucks",
    "drones",
    "policy",
    "makespan",
    "opt_star",
    "truck_only_opt",
    "competitive_ratio",
    "drone_impact_ratio",
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::make_star_graph;

    #[test]
    fn record_csv_round_trip_is_exact() {
        let inst = RdpInstance::new(make_star_graph(3, 1.0 / 3.0), 1, 1, 0.7, vec![2]).unwrap();
        let records = evaluate(&inst, &PolicyKind::ALL).unwrap();
        assert_eq!(records.len(), 5);
        let mut buf = Vec::new();
        write_records(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&RECORD_COLUMNS.join(",")));
        assert_eq!(read_records(&buf[..]).unwrap(), records);
    }

    #[test]
    fn empty_record_file_has_header() {
        let mut buf = Vec::new();
        write_records(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), RECORD_COLUMNS.join(",") + "\n");
    }

    #[test]
    fn truck_only_with_no_damage_has_unit_impact() {
        let inst = RdpInstance::new(make_star_graph(4, 1.0), 2, 1, 2.0, vec![]).unwrap();
        let r = evaluate(&inst, &[PolicyKind::TruckOnly]).unwrap();
        assert_eq!(r[0].drone_impact_ratio, 1.0);
    }

    #[test]
    fn preconditions_skip_policies() {
        let inst = RdpInstance::new(make_star_graph(2, 1.0), 1, 0, 1.0, vec![1]).unwrap();
        let r = evaluate(&inst, &[PolicyKind::Efhs, PolicyKind::Optimistic]).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].policy, "optimistic");
    }
}

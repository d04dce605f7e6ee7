use serde::Serialize;

use crate::graph::TOL;
use crate::policy::PolicyKind;

use super::RatioRecord;

/// `1 + alpha * ceil(kd / kt)`, the drone-speed factor in the ratio bounds.
pub fn ratio_factor(alpha: f64, trucks: usize, drones: usize) -> f64 {
    if trucks == 0 {
        return f64::INFINITY;
    }
    1.0 + alpha * drones.div_ceil(trucks) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// No policy beats the full-information optimum.
    RatioAtLeastOne,
    /// Optimistic: ratio <= min(2, factor).
    OptimisticRatio,
    /// Regretless: ratio <= factor.
    RegretlessRatio,
    /// Regretless never does worse than trucks alone.
    RegretlessImpact,
    /// Optimistic and Regretless: drone impact >= 1 / factor.
    ImpactFloor,
}

/// One inequality evaluated on one record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub record: usize,
    pub bound: Bound,
    pub value: f64,
    pub limit: f64,
    /// Whether the value sits on the limit (within 1e-9).
    pub tight: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BoundReport {
    pub checked: usize,
    pub violations: Vec<BoundCheck>,
    pub tight: Vec<BoundCheck>,
}

impl BoundReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check every applicable theoretical bound against every record.
pub fn verify_bounds(records: &[RatioRecord]) -> BoundReport {
    let mut report = BoundReport::default();
    for (i, r) in records.iter().enumerate() {
        let factor = ratio_factor(r.alpha, r.trucks, r.drones);
        let kind = r.policy.parse::<PolicyKind>().ok();
        let mut checks = vec![(Bound::RatioAtLeastOne, r.competitive_ratio, 1.0, false)];
        match kind {
            Some(PolicyKind::Optimistic) => {
                checks.push((Bound::OptimisticRatio, r.competitive_ratio, factor.min(2.0), true));
                checks.push((Bound::ImpactFloor, r.drone_impact_ratio, 1.0 / factor, false));
            }
            Some(PolicyKind::Regretless) => {
                checks.push((Bound::RegretlessRatio, r.competitive_ratio, factor, true));
                checks.push((Bound::RegretlessImpact, r.drone_impact_ratio, 1.0, true));
                checks.push((Bound::ImpactFloor, r.drone_impact_ratio, 1.0 / factor, false));
            }
            _ => {}
        }
        for (bound, value, limit, upper) in checks {
            report.checked += 1;
            let ok = if upper { value <= limit + TOL } else { value >= limit - TOL };
            let check = BoundCheck { record: i, bound, value, limit, tight: (value - limit).abs() <= TOL };
            if !ok {
                report.violations.push(check);
            } else if check.tight {
                report.tight.push(check);
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(policy: &str, makespan: f64, opt: f64, truck: f64) -> RatioRecord {
        RatioRecord {
            instance_id: "i".into(),
            graph_class: "random".into(),
            n: 5,
            delta: 0.5,
            alpha: 1.0,
            trucks: 1,
            drones: 1,
            policy: policy.into(),
            makespan,
            opt_star: opt,
            truck_only_opt: truck,
            competitive_ratio: makespan / opt,
            drone_impact_ratio: makespan / truck,
        }
    }

    #[test]
    fn factor_values() {
        assert_eq!(ratio_factor(4.0, 1, 1), 5.0);
        assert_eq!(ratio_factor(0.5, 2, 3), 2.0);
        assert_eq!(ratio_factor(2.0, 3, 0), 1.0);
    }

    #[test]
    fn clean_records_pass_and_tightness_is_flagged() {
        let report = verify_bounds(&[rec("optimistic", 4.0, 2.0, 4.0), rec("regretless", 3.0, 2.0, 4.0)]);
        assert!(report.is_clean(), "{report:?}");
        assert!(report.tight.iter().any(|c| c.record == 0 && c.bound == Bound::OptimisticRatio));
    }

    #[test]
    fn halved_makespan_is_flagged() {
        let mut r = rec("truck_only", 4.0, 3.0, 4.0);
        r.makespan /= 2.0;
        r.competitive_ratio = r.makespan / r.opt_star;
        let report = verify_bounds(&[r]);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].bound, Bound::RatioAtLeastOne);
    }

    #[test]
    fn regretless_above_truck_only_is_flagged() {
        let report = verify_bounds(&[rec("regretless", 5.0, 4.0, 4.5)]);
        assert!(report.violations.iter().any(|c| c.bound == Bound::RegretlessImpact));
    }
}

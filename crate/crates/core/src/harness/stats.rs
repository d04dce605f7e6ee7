use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::str::FromStr;

use super::{HarnessError, RatioRecord};

/// Written into every summary row so downstream readers know how quartiles were taken.
pub const QUARTILE_CONVENTION: &str = "median-of-halves-exclusive";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKey {
    Alpha,
    Policy,
    Class,
    Delta,
    N,
    /// Expands to two columns, trucks and drones.
    Fleet,
}

impl GroupKey {
    fn columns(self) -> &'static [&'static str] {
        match self {
            GroupKey::Alpha => &["alpha"],
            GroupKey::Policy => &["policy"],
            GroupKey::Class => &["graph_class"],
            GroupKey::Delta => &["delta"],
            GroupKey::N => &["n"],
            GroupKey::Fleet => &["trucks", "drones"],
        }
    }

    fn values(self, r: &RatioRecord) -> Vec<KeyValue> {
        match self {
            GroupKey::Alpha => vec![KeyValue::Num(r.alpha)],
            GroupKey::Policy => vec![KeyValue::Text(r.policy.clone())],
            GroupKey::Class => vec![KeyValue::Text(r.graph_class.clone())],
            GroupKey::Delta => vec![KeyValue::Num(r.delta)],
            GroupKey::N => vec![KeyValue::Num(r.n as f64)],
            GroupKey::Fleet => vec![KeyValue::Num(r.trucks as f64), KeyValue::Num(r.drones as f64)],
        }
    }
}

impl FromStr for GroupKey {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "alpha" => Ok(GroupKey::Alpha),
            "policy" => Ok(GroupKey::Policy),
            "class" | "graph_class" => Ok(GroupKey::Class),
            "delta" => Ok(GroupKey::Delta),
            "n" => Ok(GroupKey::N),
            "fleet" => Ok(GroupKey::Fleet),
            _ => Err(HarnessError::BadGroupKey(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    CompetitiveRatio,
    DroneImpact,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::CompetitiveRatio => "competitive_ratio",
            Metric::DroneImpact => "drone_impact_ratio",
        }
    }

    fn of(self, r: &RatioRecord) -> f64 {
        match self {
            Metric::CompetitiveRatio => r.competitive_ratio,
            Metric::DroneImpact => r.drone_impact_ratio,
        }
    }
}

impl FromStr for Metric {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "competitive_ratio" | "ratio" | "cr" => Ok(Metric::CompetitiveRatio),
            "drone_impact_ratio" | "risk" | "drone_impact" => Ok(Metric::DroneImpact),
            _ => Err(HarnessError::BadMetric(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum KeyValue {
    Num(f64),
    Text(String),
}

impl Eq for KeyValue {}

impl Ord for KeyValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (KeyValue::Num(a), KeyValue::Num(b)) => a.total_cmp(b),
            (KeyValue::Text(a), KeyValue::Text(b)) => a.cmp(b),
            (KeyValue::Num(_), KeyValue::Text(_)) => Ordering::Less,
            (KeyValue::Text(_), KeyValue::Num(_)) => Ordering::Greater,
        }
    }
}

impl PartialOrd for KeyValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for KeyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KeyValue::Num(x) => write!(f, "{x}"),
            KeyValue::Text(s) => f.write_str(s),
        }
    }
}

/// Box-plot statistics of one group.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    /// (column, value) pairs of the grouping keys.
    pub keys: Vec<(String, String)>,
    pub metric: String,
    pub count: usize,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
    pub lo_whisker: f64,
    pub hi_whisker: f64,
    pub outliers: Vec<f64>,
}

fn median_sorted(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// (q25, median, q75) of sorted data. Quartiles are the medians of the lower
/// and upper halves, leaving out the middle value when the count is odd.
pub fn quartiles(sorted: &[f64]) -> (f64, f64, f64) {
    assert!(!sorted.is_empty(), "quartiles of an empty sample");
    let n = sorted.len();
    let med = median_sorted(sorted);
    if n == 1 {
        return (med, med, med);
    }
    let half = n / 2;
    (median_sorted(&sorted[..half]), med, median_sorted(&sorted[n - half..]))
}

fn summarise(keys: Vec<(String, String)>, metric: Metric, mut xs: Vec<f64>) -> SummaryRow {
    xs.sort_by(f64::total_cmp);
    let (q25, median, q75) = quartiles(&xs);
    let iqr = q75 - q25;
    let (lo_fence, hi_fence) = (q25 - 1.5 * iqr, q75 + 1.5 * iqr);
    let inside: Vec<f64> = xs.iter().copied().filter(|&x| x >= lo_fence && x <= hi_fence).collect();
    SummaryRow {
        keys,
        metric: metric.as_str().to_string(),
        count: xs.len(),
        min: xs[0],
        q25,
        median,
        q75,
        max: xs[xs.len() - 1],
        lo_whisker: inside[0],
        hi_whisker: inside[inside.len() - 1],
        outliers: xs.iter().copied().filter(|&x| x < lo_fence || x > hi_fence).collect(),
    }
}

/// One summary row per distinct key combination, in ascending key order.
/// Whiskers end at the most extreme values within 1.5 IQR of the box.
pub fn aggregate(records: &[RatioRecord], keys: &[GroupKey], metric: Metric) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<Vec<KeyValue>, Vec<f64>> = BTreeMap::new();
    for r in records {
        let k: Vec<KeyValue> = keys.iter().flat_map(|g| g.values(r)).collect();
        groups.entry(k).or_default().push(metric.of(r));
    }
    let columns: Vec<&str> = keys.iter().flat_map(|g| g.columns().iter().copied()).collect();
    groups
        .into_iter()
        .map(|(k, xs)| {
            let named = columns.iter().zip(&k).map(|(c, v)| (c.to_string(), v.to_string())).collect();
            summarise(named, metric, xs)
        })
        .collect()
}

const STAT_COLUMNS: [&str; 11] = [
    "metric",
    "count",
    "min",
    "q25",
    "median",
    "q75",
    "max",
    "lo_whisker",
    "hi_whisker",
    "outliers",
    "quartile_convention",
];

/// Summary CSV: key columns, then statistics. Outliers are `;`-separated.
pub fn write_summary<W: io::Write>(writer: W, key_columns: &[&str], rows: &[SummaryRow]) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
    let mut header: Vec<&str> = key_columns.to_vec();
    header.extend(STAT_COLUMNS);
    w.write_record(&header)?;
    for row in rows {
        let mut rec: Vec<String> = row.keys.iter().map(|(_, v)| v.clone()).collect();
        rec.push(row.metric.clone());
        rec.push(row.count.to_string());
        for x in [row.min, row.q25, row.median, row.q75, row.max, row.lo_whisker, row.hi_whisker] {
            rec.push(x.to_string());
        }
        rec.push(row.outliers.iter().map(f64::to_string).collect::<Vec<_>>().join(";"));
        rec.push(QUARTILE_CONVENTION.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Key column names of the given grouping, in CSV order.
pub(crate) fn key_columns(keys: &[GroupKey]) -> Vec<&'static str> {
    keys.iter().flat_map(|g| g.columns().iter().copied()).collect()
}

/// Read a summary CSV written by [`write_summary`] back into rows.
pub fn read_summary<R: io::Read>(reader: R) -> Result<Vec<SummaryRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers()?.clone();
    let nkeys = header.len().saturating_sub(STAT_COLUMNS.len());
    let parse = |s: &str| -> Result<f64, HarnessError> {
        s.parse::<f64>().map_err(|e| HarnessError::Io(io::Error::new(io::ErrorKind::InvalidData, e)))
    };
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let f = |i: usize| parse(&rec[nkeys + i]);
        rows.push(SummaryRow {
            keys: (0..nkeys).map(|i| (header[i].to_string(), rec[i].to_string())).collect(),
            metric: rec[nkeys].to_string(),
            count: rec[nkeys + 1]
                .parse()
                .map_err(|e| HarnessError::Io(io::Error::new(io::ErrorKind::InvalidData, e)))?,
            min: f(2)?,
            q25: f(3)?,
            median: f(4)?,
            q75: f(5)?,
            max: f(6)?,
            lo_whisker: f(7)?,
            hi_whisker: f(8)?,
            outliers: rec[nkeys + 9].split(';').filter(|s| !s.is_empty()).map(parse).collect::<Result<_, _>>()?,
        });
    }
    Ok(rows)
}

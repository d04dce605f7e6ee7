use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::RdpInstance;

use super::rng::derive_seed;
use super::{damage_seed, GenError, GeneratorConfig, GraphClass};

/// Graphs generated per (class, size).
const GRAPHS_PER_CELL: usize = 20;
const RANDOM_SIZES: [usize; 4] = [13, 15, 18, 21];
const DELTAS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
const BASE_N: usize = 18;
const BASE_DELTA: f64 = 0.3;
const SMALL_N: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum DatasetName {
    Random,
    Base,
    Var,
    Large,
    Small,
}

impl DatasetName {
    pub const ALL: [DatasetName; 5] =
        [DatasetName::Random, DatasetName::Base, DatasetName::Var, DatasetName::Large, DatasetName::Small];

    pub fn as_str(self) -> &'static str {
        match self {
            DatasetName::Random => "RANDOM",
            DatasetName::Base => "BASE",
            DatasetName::Var => "VAR",
            DatasetName::Large => "LARGE",
            DatasetName::Small => "SMALL",
        }
    }

    /// Drone speeds evaluated on this dataset.
    pub fn alphas(self) -> Vec<f64> {
        match self {
            DatasetName::Small => vec![0.5, 1.0, 2.0],
            _ => vec![0.25, 0.5, 1.0, 2.0, 4.0],
        }
    }

    /// (trucks, drones) pairs evaluated on this dataset.
    pub fn fleets(self) -> Vec<(usize, usize)> {
        match self {
            DatasetName::Small => vec![(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (3, 1)],
            _ => vec![(1, 1)],
        }
    }

    /// (class, n, δ) cells, each holding `GRAPHS_PER_CELL` graphs.
    fn cells(self) -> Vec<(GraphClass, usize, f64)> {
        let random = |sizes: &[usize], deltas: &[f64]| {
            let mut out = Vec::new();
            for &n in sizes {
                for &d in deltas {
                    out.push((GraphClass::Random, n, d));
                }
            }
            out
        };
        let others = || {
            GraphClass::ALL[1..].iter().map(|&c| (c, BASE_N, BASE_DELTA)).collect::<Vec<_>>()
        };
        match self {
            DatasetName::Random => random(&RANDOM_SIZES, &DELTAS),
            DatasetName::Base => random(&[BASE_N], &[BASE_DELTA]),
            DatasetName::Var => [random(&[BASE_N], &[BASE_DELTA]), others()].concat(),
            DatasetName::Large => [random(&RANDOM_SIZES, &DELTAS), others()].concat(),
            DatasetName::Small => random(&[SMALL_N], &DELTAS),
        }
    }
}

impl fmt::Display for DatasetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DatasetName {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DatasetName::ALL
            .into_iter()
            .find(|d| d.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| GenError::UnknownDataset(s.to_string()))
    }
}

/// One line of a dataset manifest: enough to regenerate the instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub class: GraphClass,
    pub n: usize,
    pub delta: f64,
    pub graph_index: usize,
    pub graph_seed: u64,
    pub damage_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub dataset: DatasetName,
    pub root_seed: u64,
    pub alphas: Vec<f64>,
    pub fleets: Vec<(usize, usize)>,
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn new(dataset: DatasetName, root_seed: u64) -> Self {
        let mut entries = Vec::new();
        for (class, n, delta) in dataset.cells() {
            for g in 0..GRAPHS_PER_CELL {
                let graph_seed = derive_seed(root_seed, &[class.code(), n as u64, g as u64]);
                entries.push(ManifestEntry {
                    id: format!("{class}-n{n:02}-g{g:02}-d{delta}"),
                    class,
                    n,
                    delta,
                    graph_index: g,
                    graph_seed,
                    damage_seed: damage_seed(graph_seed, delta),
                });
            }
        }
        entries.sort_by(|a, b| a.id.cmp(&b.id));
        Self { dataset, root_seed, alphas: dataset.alphas(), fleets: dataset.fleets(), entries }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serialises");
        s.push('\n');
        s
    }
}

/// Instances of a named dataset with one truck, one drone and α = 1, sorted by id.
/// Every graph is shared by its damage variants; `meta` carries the provenance.
pub fn build_dataset(name: DatasetName, root_seed: u64) -> Result<Vec<RdpInstance>, GenError> {
    let manifest = DatasetManifest::new(name, root_seed);
    let mut graphs = std::collections::HashMap::new();
    let mut out = Vec::with_capacity(manifest.entries.len());
    for e in &manifest.entries {
        let base = match graphs.get(&e.graph_seed) {
            Some(inst) => inst,
            None => {
                let inst = GeneratorConfig::new(e.class, e.n, e.graph_seed, 0.0).generate()?;
                graphs.entry(e.graph_seed).or_insert(inst)
            }
        };
        let damaged = super::sample_damage(base.graph(), e.delta, e.damage_seed)?;
        let mut inst = base.with_damaged(damaged)?;
        inst.meta = serde_json::Map::new();
        inst.meta.insert("id".into(), e.id.clone().into());
        inst.meta.insert("class".into(), e.class.as_str().into());
        inst.meta.insert("n".into(), e.n.into());
        inst.meta.insert("delta".into(), e.delta.into());
        inst.meta.insert("graph_seed".into(), e.graph_seed.into());
        inst.meta.insert("damage_seed".into(), e.damage_seed.into());
        out.push(inst);
    }
    Ok(out)
}

/// Cross product of instances with drone speeds and fleets. Ids gain an
/// `-a<alpha>-t<trucks>d<drones>` suffix.
pub fn expand(
    instances: &[RdpInstance],
    alphas: &[f64],
    fleets: &[(usize, usize)],
) -> Result<Vec<RdpInstance>, GenError> {
    let mut out = Vec::with_capacity(instances.len() * alphas.len() * fleets.len());
    for inst in instances {
        let id = inst.meta.get("id").and_then(|v| v.as_str()).unwrap_or("instance").to_string();
        for &alpha in alphas {
            for &(trucks, drones) in fleets {
                let mut e = inst.with_fleet(trucks, drones, alpha)?;
                e.meta.insert("id".into(), format!("{id}-a{alpha}-t{trucks}d{drones}").into());
                e.meta.insert("base_id".into(), id.clone().into());
                out.push(e);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_parse() {
        assert_eq!("small".parse::<DatasetName>().unwrap(), DatasetName::Small);
        assert!("tiny".parse::<DatasetName>().is_err());
    }

    #[test]
    fn manifest_sizes() {
        let count = |d| DatasetManifest::new(d, 1).entries.len();
        assert_eq!(count(DatasetName::Random), 400);
        assert_eq!(count(DatasetName::Base), 20);
        assert_eq!(count(DatasetName::Var), 100);
        assert_eq!(count(DatasetName::Large), 480);
        assert_eq!(count(DatasetName::Small), 100);
    }

    #[test]
    fn base_is_part_of_random() {
        let random = DatasetManifest::new(DatasetName::Random, 5).entries;
        for e in DatasetManifest::new(DatasetName::Base, 5).entries {
            assert!(random.contains(&e), "{}", e.id);
        }
    }
}

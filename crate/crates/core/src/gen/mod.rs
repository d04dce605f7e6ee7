//! Seeded benchmark graphs, damage sampling and the named datasets.

mod dataset;
mod euclid;
mod lattice;
pub mod rng;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, InstanceError, NodeId, RdpInstance, WeightedGraph};

pub use dataset::{build_dataset, expand, DatasetManifest, DatasetName, ManifestEntry};
pub use euclid::{gen_center, gen_random};
pub use lattice::{default_edge_target, gen_coastal, gen_coastal_with, gen_mountain, gen_mountain_with, segments_cross};
use rng::{derive_seed, SeededRng};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("need at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("damage probability {0} outside [0, 1]")]
    BadDelta(f64),
    #[error("edge target {target} impossible for {n} nodes")]
    BadEdgeTarget { target: usize, n: usize },
    #[error("centers must be 1 or 2, got {0}")]
    BadCenters(usize),
    #[error("{class} generation failed after {attempts} attempts")]
    RetriesExhausted { class: GraphClass, attempts: usize },
    #[error("unknown graph class {0:?}")]
    UnknownClass(String),
    #[error("unknown dataset {0:?}")]
    UnknownDataset(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphClass {
    Random,
    OneCenter,
    TwoCenter,
    Coastal,
    Mountain,
}

impl GraphClass {
    pub const ALL: [GraphClass; 5] =
        [GraphClass::Random, GraphClass::OneCenter, GraphClass::TwoCenter, GraphClass::Coastal, GraphClass::Mountain];

    pub fn as_str(self) -> &'static str {
        match self {
            GraphClass::Random => "random",
            GraphClass::OneCenter => "one-center",
            GraphClass::TwoCenter => "two-center",
            GraphClass::Coastal => "coastal",
            GraphClass::Mountain => "mountain",
        }
    }

    fn code(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GraphClass {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(GraphClass::Random),
            "one-center" | "1-center" | "center" => Ok(GraphClass::OneCenter),
            "two-center" | "2-center" => Ok(GraphClass::TwoCenter),
            "coastal" => Ok(GraphClass::Coastal),
            "mountain" => Ok(GraphClass::Mountain),
            _ => Err(GenError::UnknownClass(s.to_string())),
        }
    }
}

/// Tunable constants of the lattice generators (Coastal and Mountain).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LatticeParams {
    /// Lattice points per side.
    pub lattice: usize,
    /// Cells within this index distance of a placed node are unavailable.
    pub exclusion_cells: f64,
    /// Coastal placement weight is `exp(-x / (coast_decay * width))`.
    pub coast_decay: f64,
    /// Rows within this many cells of a placed node get `band_boost`.
    pub band_cells: usize,
    pub band_boost: f64,
    /// Gaussian bumps in the mountain height field.
    pub bumps: usize,
    /// Mountain placement weight is `exp(-height_decay * height)`.
    pub height_decay: f64,
    /// Edge weight is `exp(-length / (edge_scale * diagonal))`.
    pub edge_scale: f64,
    pub max_attempts: usize,
}

impl Default for LatticeParams {
    fn default() -> Self {
        Self {
            lattice: 101,
            exclusion_cells: 3.0,
            coast_decay: 0.25,
            band_cells: 2,
            band_boost: 3.0,
            bumps: 3,
            height_decay: 2.0,
            edge_scale: 0.2,
            max_attempts: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub class: GraphClass,
    pub n: usize,
    pub seed: u64,
    pub damage_prob: f64,
    /// Coastal and Mountain only; defaults to [`default_edge_target`].
    #[serde(default)]
    pub edge_target: Option<usize>,
    #[serde(default)]
    pub lattice: LatticeParams,
}

impl GeneratorConfig {
    pub fn new(class: GraphClass, n: usize, seed: u64, damage_prob: f64) -> Self {
        Self { class, n, seed, damage_prob, edge_target: None, lattice: LatticeParams::default() }
    }

    pub fn graph(&self) -> Result<WeightedGraph, GenError> {
        match self.class {
            GraphClass::Random => gen_random(self.n, self.seed),
            GraphClass::OneCenter => gen_center(self.n, self.seed, 1),
            GraphClass::TwoCenter => gen_center(self.n, self.seed, 2),
            GraphClass::Coastal => gen_coastal_with(self.n, self.seed, self.edge_target, &self.lattice),
            GraphClass::Mountain => gen_mountain_with(self.n, self.seed, self.edge_target, &self.lattice),
        }
    }

    /// Seed of the damage draw that belongs to this graph seed and δ.
    pub fn damage_seed(&self) -> u64 {
        damage_seed(self.seed, self.damage_prob)
    }

    /// Graph plus sampled damage, with one truck, one drone and α = 1.
    pub fn generate(&self) -> Result<RdpInstance, GenError> {
        let graph = self.graph()?;
        let damaged = sample_damage(&graph, self.damage_prob, self.damage_seed())?;
        let mut inst = RdpInstance::new(graph, 1, 1, 1.0, damaged)?;
        inst.meta.insert("class".into(), self.class.as_str().into());
        inst.meta.insert("n".into(), self.n.into());
        inst.meta.insert("delta".into(), self.damage_prob.into());
        inst.meta.insert("graph_seed".into(), self.seed.into());
        inst.meta.insert("damage_seed".into(), self.damage_seed().into());
        Ok(inst)
    }
}

const DAMAGE_TAG: u64 = 0xda;

pub(crate) fn damage_seed(graph_seed: u64, delta: f64) -> u64 {
    derive_seed(graph_seed, &[DAMAGE_TAG, (delta * 1000.0).round() as u64])
}

/// Each customer is damaged independently with probability `delta`.
pub fn sample_damage(graph: &WeightedGraph, delta: f64, seed: u64) -> Result<Vec<NodeId>, GenError> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(GenError::BadDelta(delta));
    }
    let mut rng = SeededRng::new(seed);
    Ok(graph.customers().filter(|_| rng.bernoulli(delta)).collect())
}

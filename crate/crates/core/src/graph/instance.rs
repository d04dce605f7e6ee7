use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use super::{GraphError, MetricClosure, NodeId, WeightedGraph, DEPOT};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("drone speed factor must be finite and positive, got {0}")]
    BadAlpha(f64),
    #[error("the depot cannot be damaged")]
    DamagedDepot,
    #[error("damaged node {0} does not exist")]
    DamagedOutOfRange(NodeId),
    #[error("damaged node {0} listed twice")]
    DuplicateDamaged(NodeId),
    #[error("damaged nodes need at least one truck")]
    NoTrucks,
    #[error("instance has no vehicles")]
    NoVehicles,
    #[error("depot must be node 0, got {0}")]
    DepotNotZero(NodeId),
    #[error("malformed instance json: {0}")]
    Json(#[from] serde_json::Error),
}

/// A relief distribution instance: road graph, fleet, drone speed factor, and the
/// damaged node set that policies only learn by visiting nodes.
#[derive(Debug, Clone)]
pub struct RdpInstance {
    graph: Arc<WeightedGraph>,
    closure: Arc<MetricClosure>,
    trucks: usize,
    drones: usize,
    alpha: f64,
    damaged: Vec<NodeId>,
    pub meta: Map<String, Value>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    nodes: usize,
    depot: NodeId,
    edges: Vec<(NodeId, NodeId, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<[f64; 2]>>,
    trucks: usize,
    drones: usize,
    alpha: f64,
    damaged: Vec<NodeId>,
    #[serde(default)]
    meta: Map<String, Value>,
}

impl RdpInstance {
    pub fn new(
        graph: WeightedGraph,
        trucks: usize,
        drones: usize,
        alpha: f64,
        damaged: Vec<NodeId>,
    ) -> Result<Self, InstanceError> {
        let closure = MetricClosure::new(&graph)?;
        Self::from_parts(Arc::new(graph), Arc::new(closure), trucks, drones, alpha, damaged)
    }

    fn from_parts(
        graph: Arc<WeightedGraph>,
        closure: Arc<MetricClosure>,
        trucks: usize,
        drones: usize,
        alpha: f64,
        mut damaged: Vec<NodeId>,
    ) -> Result<Self, InstanceError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(InstanceError::BadAlpha(alpha));
        }
        if trucks + drones == 0 {
            return Err(InstanceError::NoVehicles);
        }
        damaged.sort_unstable();
        for w in damaged.windows(2) {
            if w[0] == w[1] {
                return Err(InstanceError::DuplicateDamaged(w[0]));
            }
        }
        for &v in &damaged {
            if v == DEPOT {
                return Err(InstanceError::DamagedDepot);
            }
            if v >= graph.node_count() {
                return Err(InstanceError::DamagedOutOfRange(v));
            }
        }
        if !damaged.is_empty() && trucks == 0 {
            return Err(InstanceError::NoTrucks);
        }
        Ok(Self { graph, closure, trucks, drones, alpha, damaged, meta: Map::new() })
    }

    /// Same graph with a different fleet and drone speed; shares the closure.
    pub fn with_fleet(&self, trucks: usize, drones: usize, alpha: f64) -> Result<Self, InstanceError> {
        let mut out = Self::from_parts(
            self.graph.clone(),
            self.closure.clone(),
            trucks,
            drones,
            alpha,
            self.damaged.clone(),
        )?;
        out.meta = self.meta.clone();
        Ok(out)
    }

    /// Same graph and fleet with a different damaged set; shares the closure.
    pub fn with_damaged(&self, damaged: Vec<NodeId>) -> Result<Self, InstanceError> {
        let mut out = Self::from_parts(
            self.graph.clone(),
            self.closure.clone(),
            self.trucks,
            self.drones,
            self.alpha,
            damaged,
        )?;
        out.meta = self.meta.clone();
        Ok(out)
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn closure(&self) -> &MetricClosure {
        &self.closure
    }

    pub fn trucks(&self) -> usize {
        self.trucks
    }

    pub fn drones(&self) -> usize {
        self.drones
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Damaged nodes, sorted ascending.
    pub fn damaged(&self) -> &[NodeId] {
        &self.damaged
    }

    pub fn is_damaged(&self, v: NodeId) -> bool {
        self.damaged.binary_search(&v).is_ok()
    }

    pub fn customers(&self) -> Vec<NodeId> {
        self.graph.customers().collect()
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn to_json(&self) -> String {
        let file = InstanceFile {
            nodes: self.graph.node_count(),
            depot: DEPOT,
            edges: self.graph.edges().to_vec(),
            coords: self.graph.coords().map(|c| c.to_vec()),
            trucks: self.trucks,
            drones: self.drones,
            alpha: self.alpha,
            damaged: self.damaged.clone(),
            meta: self.meta.clone(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("instance serialises");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        let file: InstanceFile = serde_json::from_str(text)?;
        if file.depot != DEPOT {
            return Err(InstanceError::DepotNotZero(file.depot));
        }
        let graph = WeightedGraph::new(file.nodes, file.edges, file.coords)?;
        let mut inst = Self::new(graph, file.trucks, file.drones, file.alpha, file.damaged)?;
        inst.meta = file.meta;
        Ok(inst)
    }
}

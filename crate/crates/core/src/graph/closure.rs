use super::{GraphError, NodeId, WeightedGraph};

/// All-pairs shortest path distances, computed once per graph with Floyd–Warshall.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricClosure {
    n: usize,
    dist: Vec<f64>,
}

impl MetricClosure {
    pub fn new(graph: &WeightedGraph) -> Result<Self, GraphError> {
        let n = graph.node_count();
        let mut dist = vec![f64::INFINITY; n * n];
        for i in 0..n {
            dist[i * n + i] = 0.0;
        }
        for &(u, v, w) in graph.edges() {
            if w < dist[u * n + v] {
                dist[u * n + v] = w;
                dist[v * n + u] = w;
            }
        }
        for k in 0..n {
            for i in 0..n {
                let dik = dist[i * n + k];
                if dik.is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let cand = dik + dist[k * n + j];
                    if cand < dist[i * n + j] {
                        dist[i * n + j] = cand;
                    }
                }
            }
        }
        if let Some(v) = (0..n).find(|&v| dist[v].is_infinite()) {
            return Err(GraphError::Disconnected(v));
        }
        Ok(Self { n, dist })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dist(&self, u: NodeId, v: NodeId) -> f64 {
        self.dist[u * self.n + v]
    }
}

//! Exact solvers: Held–Karp tours, min-makespan fleet partitions, open paths,
//! and a brute-force reference for tiny inputs.

mod brute_force;
mod held_karp;
mod multi_tsp;
mod open_path;

pub use brute_force::{brute_force_multi_tsp, BRUTE_FORCE_CAP};
pub use held_karp::{held_karp, HeldKarpTable, MAX_TARGETS};
pub use multi_tsp::{multi_tsp, rdp_star_opt, solve_partition, MultiTspSolution};
pub use open_path::open_path_tsp;

use thiserror::Error;

use crate::graph::NodeId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("{count} targets exceed the exact solver cap of {cap}")]
    TooManyTargets { count: usize, cap: usize },
    #[error("no vehicles to route")]
    NoVehicles,
    #[error("drone speed factor must be finite and positive, got {0}")]
    BadAlpha(f64),
    #[error("target {0} is not a valid customer node")]
    InvalidTarget(NodeId),
    #[error("target list contains duplicates")]
    DuplicateTarget,
    #[error("truck-only nodes cannot be covered without trucks")]
    Infeasible,
}

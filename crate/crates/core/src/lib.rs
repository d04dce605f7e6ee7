//! Relief routing with trucks and drones under unknown road damage.
//!
//! Trucks deliver aid and can pass any road; drones fly `alpha` times faster but
//! can only survey. Which nodes are damaged is learned by visiting them. The crate
//! provides exact offline solvers, five online dispatch policies, instance
//! generators, and the experiment harness that compares them.

pub mod gen;
pub mod graph;
pub mod harness;
pub mod lemma;
pub mod solver;
pub mod policy;

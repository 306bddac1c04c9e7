//! Weighted multigraphs, gate gadgets, and the circuit-to-graph compiler.

mod circuit;
mod gadget;
mod graph;

pub use circuit::compile_circuit;
pub use gadget::{gadget_for, implemented_gate, Gadget};
pub use graph::{
    add_dangling, Edge, EdgeTag, GraphRecord, GraphStats, Role, VertexLabel, VertexRecord,
    WeightedMultigraph,
};

/// Counts and the `w_max ≥ 1`, `w_min ≤ 1` weight conventions.
pub fn graph_stats(gamma: &WeightedMultigraph) -> GraphStats {
    gamma.stats()
}

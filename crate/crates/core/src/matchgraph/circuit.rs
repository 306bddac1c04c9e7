use crate::trotter::GateSequence;
use crate::{Error, Result};

use super::gadget::gadget_for_indexed;
use super::graph::{EdgeTag, WeightedMultigraph};

/// Wires one gadget per gate into a graph whose perfect-matching sum is
/// `Tr[G_J ⋯ G_1]` over the qubits the circuit touches.
///
/// Per qubit, consecutive gates are joined by weight-1 edges
/// `out_k → in_{k+1}` and the last output wraps to the first input. A qubit
/// acted on by a single gate therefore gets a parallel edge pair. Idle qubits
/// are left out; see [`GateSequence::idle_qubits`].
pub fn compile_circuit(seq: &GateSequence) -> Result<WeightedMultigraph> {
    if seq.is_empty() {
        return Err(Error::EmptyCircuit);
    }
    let mut graph = WeightedMultigraph::new();
    // (input, output) vertex per gate visit, in circuit order, for each qubit.
    let mut wires: Vec<Vec<(usize, usize)>> = vec![Vec::new(); seq.n()];
    for (k, gate) in seq.gates().iter().enumerate() {
        let gadget = gadget_for_indexed(gate, Some(k));
        let offset = graph.num_vertices();
        for &label in gadget.graph.labels() {
            graph.add_vertex(label);
        }
        for e in gadget.graph.edges() {
            graph.add_edge(e.u + offset, e.v + offset, e.w, e.tag)?;
        }
        for (slot, q) in gate.qubits().into_iter().enumerate() {
            wires[q].push((gadget.inputs[slot] + offset, gadget.outputs[slot] + offset));
        }
    }
    for visits in wires.iter().filter(|w| !w.is_empty()) {
        let m = visits.len();
        for k in 0..m {
            let out = visits[k].1;
            let next_in = visits[(k + 1) % m].0;
            graph.add_edge(out, next_in, 1.0, EdgeTag::External)?;
        }
    }
    Ok(graph)
}

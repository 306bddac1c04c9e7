use crate::dense::Matrix;
use crate::exact::PerfectMatchingOracle;
use crate::trotter::Gate;
use crate::Result;

use super::graph::{EdgeTag, Role, VertexLabel, WeightedMultigraph};

/// A gadget: a weighted graph with ordered input and output vertices.
///
/// Input `k` and output `k` belong to the `k`-th qubit of the gate (the gate's
/// lower qubit first), matching the local basis index `bit_i + 2 bit_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gadget {
    pub graph: WeightedMultigraph,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
}

impl Gadget {
    pub fn arity(&self) -> usize {
        self.inputs.len()
    }

    /// Adds a weight-1 pendant edge at each listed vertex. The pendant
    /// vertices are internal, so the gadget keeps its inputs and outputs.
    pub fn with_dangling(&self, at: &[usize]) -> Result<Gadget> {
        let mut g = self.clone();
        for (slot, &x) in at.iter().enumerate() {
            if x >= self.graph.num_vertices() {
                return Err(crate::Error::UnknownVertex(x));
            }
            let label = VertexLabel {
                role: Role::Dangling,
                slot: self.graph.num_vertices() + slot,
                ..*self.graph.label(x)
            };
            let x0 = g.graph.add_vertex(label);
            g.graph.add_edge(x, x0, 1.0, EdgeTag::Dangling)?;
        }
        Ok(g)
    }
}

/// The gadget for a single gate, labeled as gate `index` of a circuit.
pub(crate) fn gadget_for_indexed(gate: &Gate, index: Option<usize>) -> Gadget {
    let mut g = WeightedMultigraph::new();
    let vertex = |g: &mut WeightedMultigraph, role: Role, qubit: Option<usize>| {
        let slot = g.num_vertices();
        g.add_vertex(VertexLabel {
            gate: index,
            role,
            qubit,
            slot,
        })
    };
    let edge = |g: &mut WeightedMultigraph, u: usize, v: usize, w: f64| {
        g.add_edge(u, v, w, EdgeTag::Internal).expect("gadget edge");
    };
    match *gate {
        Gate::F { qubit, t } => {
            let a = vertex(&mut g, Role::In, Some(qubit));
            let b = vertex(&mut g, Role::Out, Some(qubit));
            edge(&mut g, a, b, t);
            Gadget {
                graph: g,
                inputs: vec![a],
                outputs: vec![b],
            }
        }
        Gate::G { i, j, t } => {
            // Square: the two inputs share a weight-t side, as do the outputs.
            let in_i = vertex(&mut g, Role::In, Some(i));
            let in_j = vertex(&mut g, Role::In, Some(j));
            let out_i = vertex(&mut g, Role::Out, Some(i));
            let out_j = vertex(&mut g, Role::Out, Some(j));
            edge(&mut g, in_i, in_j, t);
            edge(&mut g, out_i, out_j, t);
            edge(&mut g, in_i, out_i, 1.0);
            edge(&mut g, in_j, out_j, 1.0);
            Gadget {
                graph: g,
                inputs: vec![in_i, in_j],
                outputs: vec![out_i, out_j],
            }
        }
        Gate::H { i, j, t } => {
            // Square left/right sides weighted t; qubit i enters and leaves
            // through pendant vertices hung off the bottom corners.
            let in_i = vertex(&mut g, Role::In, Some(i));
            let in_j = vertex(&mut g, Role::In, Some(j));
            let out_i = vertex(&mut g, Role::Out, Some(i));
            let out_j = vertex(&mut g, Role::Out, Some(j));
            let left = vertex(&mut g, Role::Internal, None);
            let right = vertex(&mut g, Role::Internal, None);
            edge(&mut g, in_j, left, t);
            edge(&mut g, out_j, right, t);
            edge(&mut g, in_j, out_j, 1.0);
            edge(&mut g, left, right, 1.0);
            edge(&mut g, in_i, left, 1.0);
            edge(&mut g, right, out_i, 1.0);
            Gadget {
                graph: g,
                inputs: vec![in_i, in_j],
                outputs: vec![out_i, out_j],
            }
        }
    }
}

/// Gadget implementing `gate`: `f` → one weight-`t` edge; `g` → a 4-cycle
/// with weights `t, t, 1, 1`; `h` → a 4-cycle with two pendant vertices.
pub fn gadget_for(gate: &Gate) -> Gadget {
    gadget_for_indexed(gate, None)
}

/// The `2^m × 2^m` matrix a gadget implements:
/// `⟨x_out|G|x_in⟩ = PerfMatch(Θ_x)`, where `Θ_x` drops every distinguished
/// vertex whose bit is 1. Bit `k` of the row (column) index is output
/// (input) `k`.
pub fn implemented_gate(gadget: &Gadget) -> Result<Matrix> {
    let m = gadget.arity();
    assert_eq!(m, gadget.outputs.len(), "gadget must have as many outputs as inputs");
    let dim = 1usize << m;
    let mut oracle = PerfectMatchingOracle::new(&gadget.graph)?;
    let all = oracle.full_mask();
    let mut out = Matrix::zeros(dim, dim);
    for col in 0..dim {
        for row in 0..dim {
            let mut mask = all;
            for k in 0..m {
                if (col >> k) & 1 == 1 {
                    mask &= !(1u64 << gadget.inputs[k]);
                }
                if (row >> k) & 1 == 1 {
                    mask &= !(1u64 << gadget.outputs[k]);
                }
            }
            out[(row, col)] = oracle.perfmatch_of(mask);
        }
    }
    Ok(out)
}

//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

use qferro::hamiltonian::{FerroHamiltonian, RawHamiltonian};
use qferro::matchgraph::WeightedMultigraph;
use qferro::trotter::{Gate, GateSequence};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in the open interval `(0, 1)`.
pub fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let t: f64 = rng.gen();
        if t > 0.0 {
            return t;
        }
    }
}

/// A circuit on `n` qubits with `len` gates, all parameters in `(0, 1)`.
pub fn random_circuit<R: Rng>(rng: &mut R, n: usize, len: usize) -> GateSequence {
    let gates = (0..len)
        .map(|_| {
            let t = open_unit(rng);
            let kind = if n == 1 { 0 } else { rng.gen_range(0..3) };
            if kind == 0 {
                return Gate::f(rng.gen_range(0..n), t).unwrap();
            }
            let i = rng.gen_range(0..n - 1);
            let j = rng.gen_range(i + 1..n);
            if kind == 1 {
                Gate::g(i, j, t).unwrap()
            } else {
                Gate::h(i, j, t).unwrap()
            }
        })
        .collect();
    GateSequence::from_gates(n, gates).unwrap()
}

/// A valid Hamiltonian with every coupling present.
pub fn random_hamiltonian<R: Rng>(rng: &mut R, n: usize) -> FerroHamiltonian {
    let mut raw = RawHamiltonian::new(n);
    for i in 1..=n {
        raw = raw.field(i, rng.gen_range(-1.0..=1.0));
        for j in i + 1..=n {
            let b: f64 = rng.gen_range(0.0..=1.0);
            let c = rng.gen_range(-b..=b);
            raw = raw.pair(i, j, b, c);
        }
    }
    raw.validate().unwrap()
}

/// Random multigraph on `nv` vertices with `ne` edges and weights in `[lo, hi)`.
pub fn random_graph<R: Rng>(rng: &mut R, nv: usize, ne: usize, lo: f64, hi: f64) -> WeightedMultigraph {
    let mut edges = Vec::with_capacity(ne);
    while edges.len() < ne {
        let u = rng.gen_range(0..nv);
        let v = rng.gen_range(0..nv);
        if u != v {
            edges.push((u, v, rng.gen_range(lo..hi)));
        }
    }
    WeightedMultigraph::from_edges(nv, &edges).unwrap()
}

pub fn rel_err(estimate: f64, exact: f64) -> f64 {
    (estimate / exact - 1.0).abs()
}

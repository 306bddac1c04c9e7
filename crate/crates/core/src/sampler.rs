//! Weighted matchings Markov chain.
//!
//! States are all matchings of a graph; the stationary law is
//! `W(M)/Z` with `W(M) = Π_{e∈M} α·w(e)`. One step holds with probability
//! 1/2, otherwise picks an edge `e = (u, v)` uniformly and proposes
//!
//! * `M − e` if `e ∈ M`,
//! * `M + e` if `u` and `v` are both uncovered,
//! * `M + e − e′` if exactly one endpoint is covered, by `e′`,
//!
//! and applies the Metropolis filter `min(1, W(M′)/W(M))`. If both endpoints
//! are covered the chain stays put. The holding step makes the chain
//! aperiodic; without it the single-edge graph alternates forever.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::Matrix;
use crate::exact::all_matchings;
use crate::matchgraph::{GraphStats, WeightedMultigraph};
use crate::rng::{stream, stream_rng};
use crate::{Error, Mode, Result};

/// Largest matching count [`stationary_exact`] will enumerate.
pub const STATIONARY_MATCHING_CAP: usize = 10_000;

const NO_EDGE: u32 = u32::MAX;

/// A matching stored as the covering edge of every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    cover: Vec<u32>,
    size: usize,
}

impl Matching {
    pub fn empty(num_vertices: usize) -> Self {
        Matching {
            cover: vec![NO_EDGE; num_vertices],
            size: 0,
        }
    }

    pub fn from_edges(g: &WeightedMultigraph, edges: &[usize]) -> Result<Self> {
        let mut m = Matching::empty(g.num_vertices());
        for &e in edges {
            if e >= g.num_edges() {
                return Err(Error::InvalidParameter(format!("edge id {e} out of range")));
            }
            let edge = g.edge(e);
            if m.is_covered(edge.u) || m.is_covered(edge.v) {
                return Err(Error::InvalidEdge {
                    u: edge.u,
                    v: edge.v,
                    reason: "shares a vertex with another matching edge".into(),
                });
            }
            m.insert(e, edge.u, edge.v);
        }
        Ok(m)
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    #[inline]
    pub fn is_covered(&self, v: usize) -> bool {
        self.cover[v] != NO_EDGE
    }

    #[inline]
    pub fn covering_edge(&self, v: usize) -> Option<usize> {
        (self.cover[v] != NO_EDGE).then_some(self.cover[v] as usize)
    }

    pub fn contains(&self, g: &WeightedMultigraph, e: usize) -> bool {
        self.cover[g.edge(e).u] == e as u32
    }

    /// Sorted edge ids.
    pub fn edge_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self
            .cover
            .iter()
            .filter(|&&e| e != NO_EDGE)
            .map(|&e| e as usize)
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// `W(Γ(α), M)`.
    pub fn weight(&self, view: &WeightView<'_>) -> f64 {
        self.edge_ids().iter().map(|&e| view.weight(e)).product()
    }

    /// Every covered vertex points at an edge that covers it and whose other
    /// endpoint points back, and the size counter agrees.
    pub fn is_valid(&self, g: &WeightedMultigraph) -> bool {
        self.cover.len() == g.num_vertices()
            && (0..self.cover.len()).all(|v| self.consistent_at(g, v))
            && self.edge_ids().len() == self.size
    }

    fn consistent_at(&self, g: &WeightedMultigraph, v: usize) -> bool {
        match self.covering_edge(v) {
            None => true,
            Some(e) => {
                let edge = g.edge(e);
                (edge.u == v || edge.v == v) && self.cover[edge.other(v)] == e as u32
            }
        }
    }

    #[inline]
    fn insert(&mut self, e: usize, u: usize, v: usize) {
        self.cover[u] = e as u32;
        self.cover[v] = e as u32;
        self.size += 1;
    }

    #[inline]
    fn remove(&mut self, u: usize, v: usize) {
        self.cover[u] = NO_EDGE;
        self.cover[v] = NO_EDGE;
        self.size -= 1;
    }
}

/// `Γ(α)` without copying the graph.
#[derive(Clone, Copy, Debug)]
pub struct WeightView<'a> {
    pub graph: &'a WeightedMultigraph,
    pub alpha: f64,
}

impl<'a> WeightView<'a> {
    pub fn new(graph: &'a WeightedMultigraph, alpha: f64) -> Self {
        WeightView { graph, alpha }
    }

    pub fn plain(graph: &'a WeightedMultigraph) -> Self {
        Self::new(graph, 1.0)
    }

    #[inline]
    pub fn weight(&self, e: usize) -> f64 {
        self.alpha * self.graph.edge(e).w
    }
}

/// What a single chain step did.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Move {
    Hold,
    /// Both endpoints covered by other edges; no proposal.
    Blocked,
    Add { accepted: bool },
    Delete { accepted: bool },
    Shift { accepted: bool },
}

/// One transition of the chain, in place.
pub fn chain_step<R: Rng + ?Sized>(view: &WeightView<'_>, m: &mut Matching, rng: &mut R) -> Move {
    let g = view.graph;
    if g.num_edges() == 0 || rng.gen::<bool>() {
        return Move::Hold;
    }
    let e = rng.gen_range(0..g.num_edges());
    let edge = g.edge(e);
    let (u, v) = (edge.u, edge.v);
    let mv = match (m.covering_edge(u), m.covering_edge(v)) {
        (Some(a), Some(b)) if a == e && b == e => {
            let accepted = metropolis(rng, 1.0 / view.weight(e));
            if accepted {
                m.remove(u, v);
            }
            Move::Delete { accepted }
        }
        (None, None) => {
            let accepted = metropolis(rng, view.weight(e));
            if accepted {
                m.insert(e, u, v);
            }
            Move::Add { accepted }
        }
        (Some(old), None) | (None, Some(old)) => {
            // α cancels in the ratio.
            let accepted = metropolis(rng, edge.w / g.edge(old).w);
            if accepted {
                let o = g.edge(old);
                m.remove(o.u, o.v);
                m.insert(e, u, v);
            }
            Move::Shift { accepted }
        }
        (Some(_), Some(_)) => Move::Blocked,
    };
    debug_assert!(
        m.consistent_at(g, u) && m.consistent_at(g, v),
        "chain left an invalid matching"
    );
    mv
}

#[inline]
fn metropolis<R: Rng + ?Sized>(rng: &mut R, ratio: f64) -> bool {
    ratio >= 1.0 || rng.gen::<f64>() < ratio
}

/// Move counts accumulated over many steps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerStats {
    pub steps: u64,
    pub holds: u64,
    pub blocked: u64,
    pub add_proposed: u64,
    pub add_accepted: u64,
    pub delete_proposed: u64,
    pub delete_accepted: u64,
    pub shift_proposed: u64,
    pub shift_accepted: u64,
}

impl SamplerStats {
    pub fn record(&mut self, mv: Move) {
        self.steps += 1;
        match mv {
            Move::Hold => self.holds += 1,
            Move::Blocked => self.blocked += 1,
            Move::Add { accepted } => {
                self.add_proposed += 1;
                self.add_accepted += accepted as u64;
            }
            Move::Delete { accepted } => {
                self.delete_proposed += 1;
                self.delete_accepted += accepted as u64;
            }
            Move::Shift { accepted } => {
                self.shift_proposed += 1;
                self.shift_accepted += accepted as u64;
            }
        }
    }

    pub fn merge(mut self, other: SamplerStats) -> SamplerStats {
        self.steps += other.steps;
        self.holds += other.holds;
        self.blocked += other.blocked;
        self.add_proposed += other.add_proposed;
        self.add_accepted += other.add_accepted;
        self.delete_proposed += other.delete_proposed;
        self.delete_accepted += other.delete_accepted;
        self.shift_proposed += other.shift_proposed;
        self.shift_accepted += other.shift_accepted;
        self
    }

    /// Accepted proposals over all proposals; holds and blocked steps are
    /// not proposals.
    pub fn acceptance_rate(&self) -> f64 {
        let proposed = self.add_proposed + self.delete_proposed + self.shift_proposed;
        let accepted = self.add_accepted + self.delete_accepted + self.shift_accepted;
        if proposed == 0 {
            0.0
        } else {
            accepted as f64 / proposed as f64
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub steps: u64,
    pub mode: Mode,
    pub seed: u64,
}

impl SamplerConfig {
    pub fn new(steps: u64, mode: Mode, seed: u64) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidParameter("sampler needs at least one step".into()));
        }
        Ok(SamplerConfig { steps, mode, seed })
    }

    /// Step count from [`default_steps`].
    pub fn for_graph(g: &WeightedMultigraph, delta: f64, mode: Mode, seed: u64) -> Result<Self> {
        Self::new(default_steps(g, delta, mode)?, mode, seed)
    }
}

/// Runs `cfg.steps` steps from the empty matching and returns the final state.
pub fn sample<R: Rng + ?Sized>(
    view: &WeightView<'_>,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> (Matching, SamplerStats) {
    let mut m = Matching::empty(view.graph.num_vertices());
    let mut stats = SamplerStats::default();
    for _ in 0..cfg.steps {
        stats.record(chain_step(view, &mut m, rng));
    }
    (m, stats)
}

/// `count` independent samples. Sample `i` uses the stream
/// `(cfg.seed, SAMPLER, path.., i)`, so the output does not depend on how
/// rayon schedules the chains.
pub fn sample_many(
    view: &WeightView<'_>,
    cfg: &SamplerConfig,
    path: &[u64],
    count: usize,
) -> (Vec<Matching>, SamplerStats) {
    let results: Vec<(Matching, SamplerStats)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(cfg.seed, &stream_path(path, i));
            sample(view, cfg, &mut rng)
        })
        .collect();
    let stats = results
        .iter()
        .fold(SamplerStats::default(), |acc, (_, s)| acc.merge(*s));
    (results.into_iter().map(|(m, _)| m).collect(), stats)
}

/// Like [`sample_many`] but keeps only the matching sizes.
pub fn sample_sizes(
    view: &WeightView<'_>,
    cfg: &SamplerConfig,
    path: &[u64],
    count: usize,
) -> (Vec<usize>, SamplerStats) {
    let results: Vec<(usize, SamplerStats)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(cfg.seed, &stream_path(path, i));
            let (m, s) = sample(view, cfg, &mut rng);
            (m.len(), s)
        })
        .collect();
    let stats = results
        .iter()
        .fold(SamplerStats::default(), |acc, (_, s)| acc.merge(*s));
    (results.into_iter().map(|(k, _)| k).collect(), stats)
}

fn stream_path(path: &[u64], i: usize) -> Vec<u64> {
    let mut p = Vec::with_capacity(path.len() + 2);
    p.push(stream::SAMPLER);
    p.extend_from_slice(path);
    p.push(i as u64);
    p
}

/// Multipliers for the two step-count rules.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepConstants {
    pub c_theory: f64,
    pub c_practical: f64,
}

impl Default for StepConstants {
    fn default() -> Self {
        StepConstants {
            c_theory: 1.0,
            c_practical: 50.0,
        }
    }
}

pub fn default_steps(g: &WeightedMultigraph, delta: f64, mode: Mode) -> Result<u64> {
    default_steps_with(&g.stats(), delta, mode, &StepConstants::default())
}

/// Theory: `c_T (|E|³|V| w_max⁴ max(1, ln(w_max/w_min)) + |E|² w_max⁴ ln(1/δ))`.
/// Practical: `c_P |E| |V| ln(1/δ)`. Both rounded up and at least 1.
pub fn default_steps_with(stats: &GraphStats, delta: f64, mode: Mode, c: &StepConstants) -> Result<u64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::OutOfRange {
            what: "delta".into(),
            value: delta,
            range: "(0, 1)",
        });
    }
    let e = stats.num_edges as f64;
    let v = stats.num_vertices as f64;
    let log_inv = (1.0 / delta).ln();
    let raw = match mode {
        Mode::Theory => {
            let w4 = stats.w_max.powi(4);
            let spread = (stats.w_max / stats.w_min).ln().max(1.0);
            c.c_theory * (e.powi(3) * v * w4 * spread + e * e * w4 * log_inv)
        }
        Mode::Practical => c.c_practical * e * v * log_inv,
    };
    // Saturating float-to-int conversion.
    Ok((raw.ceil() as u64).max(1))
}

/// The exact stationary law over all matchings of a small graph.
#[derive(Clone, Debug, PartialEq)]
pub struct StationaryTable {
    /// Sorted edge ids of each matching; index 0 is the empty matching.
    pub matchings: Vec<Vec<usize>>,
    pub probs: Vec<f64>,
    index: HashMap<Vec<usize>, usize>,
}

impl StationaryTable {
    pub fn len(&self) -> usize {
        self.matchings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matchings.is_empty()
    }

    pub fn index_of(&self, edges: &[usize]) -> Option<usize> {
        self.index.get(edges).copied()
    }

    pub fn prob(&self, edges: &[usize]) -> Option<f64> {
        self.index_of(edges).map(|i| self.probs[i])
    }

    /// Total-variation distance to the empirical law of `samples`.
    pub fn tv_distance(&self, samples: &[Matching]) -> f64 {
        let mut counts = vec![0usize; self.len()];
        let mut outside = 0usize;
        for m in samples {
            match self.index_of(&m.edge_ids()) {
                Some(i) => counts[i] += 1,
                None => outside += 1,
            }
        }
        let n = samples.len() as f64;
        let inside: f64 = counts
            .iter()
            .zip(&self.probs)
            .map(|(&c, &p)| (c as f64 / n - p).abs())
            .sum();
        0.5 * (inside + outside as f64 / n)
    }
}

pub fn stationary_exact(g: &WeightedMultigraph) -> Result<StationaryTable> {
    stationary_exact_scaled(&WeightView::plain(g))
}

pub fn stationary_exact_scaled(view: &WeightView<'_>) -> Result<StationaryTable> {
    let matchings = all_matchings(view.graph, STATIONARY_MATCHING_CAP)?;
    let weights: Vec<f64> = matchings
        .iter()
        .map(|m| m.iter().map(|&e| view.weight(e)).product())
        .collect();
    let z: f64 = weights.iter().sum();
    let index = matchings
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i))
        .collect();
    Ok(StationaryTable {
        probs: weights.iter().map(|w| w / z).collect(),
        matchings,
        index,
    })
}

/// Transition matrix of [`chain_step`] over the states of `table`, with
/// `P[(from, to)]`.
pub fn transition_matrix(view: &WeightView<'_>, table: &StationaryTable) -> Result<Matrix> {
    let g = view.graph;
    let s = table.len();
    let mut p = Matrix::zeros(s, s);
    if g.num_edges() == 0 {
        return Ok(Matrix::identity(s, s));
    }
    let pick = 0.5 / g.num_edges() as f64;
    for (from, edges) in table.matchings.iter().enumerate() {
        let m = Matching::from_edges(g, edges)?;
        for e in 0..g.num_edges() {
            let edge = g.edge(e);
            let (target, ratio) = match (m.covering_edge(edge.u), m.covering_edge(edge.v)) {
                (Some(a), Some(b)) if a == e && b == e => {
                    (edges.iter().copied().filter(|&x| x != e).collect::<Vec<_>>(), 1.0 / view.weight(e))
                }
                (None, None) => {
                    let mut t = edges.clone();
                    t.push(e);
                    t.sort_unstable();
                    (t, view.weight(e))
                }
                (Some(old), None) | (None, Some(old)) => {
                    let mut t: Vec<usize> = edges.iter().copied().filter(|&x| x != old).collect();
                    t.push(e);
                    t.sort_unstable();
                    (t, edge.w / g.edge(old).w)
                }
                (Some(_), Some(_)) => continue,
            };
            let to = table
                .index_of(&target)
                .expect("proposals stay inside the matching set");
            let a = pick * ratio.min(1.0);
            p[(from, to)] += a;
        }
        let off: f64 = p.row(from).iter().sum();
        p[(from, from)] += 1.0 - off;
    }
    Ok(p)
}

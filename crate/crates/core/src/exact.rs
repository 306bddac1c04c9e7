//! Exact matching sums by memoized recursion over vertex subsets.
//!
//! The full ladder `Z_k(Γ)` uses the pivot-vertex form of deletion–contraction:
//! the lowest remaining vertex `v` is either left unmatched or matched
//! through one of its edges `e = (v, u)`,
//!
//! ```text
//! Z_k(S) = Z_k(S − v) + Σ_{e=(v,u), u∈S} w(e) · Z_{k−1}(S − v − u).
//! ```
//!
//! Subsets are `u64` bitmasks, which caps the oracles at 64 vertices.
//! Graphs built by the circuit compiler have small cut width in vertex order,
//! so the number of reachable subsets stays modest well past 30 vertices.

use std::collections::HashMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::matchgraph::WeightedMultigraph;
use crate::{Error, Result};

pub const MATCHING_ORACLE_CAP: usize = 64;

/// Relative slack for the log-concavity inequality.
const LOG_CONCAVITY_RTOL: f64 = 1e-12;

fn adjacency(g: &WeightedMultigraph) -> Result<Vec<Vec<(usize, f64)>>> {
    let n = g.num_vertices();
    if n > MATCHING_ORACLE_CAP {
        return Err(Error::TooLarge {
            vertices: n,
            cap: MATCHING_ORACLE_CAP,
        });
    }
    let mut adj = vec![Vec::new(); n];
    for e in g.edges() {
        adj[e.u].push((e.v, e.w));
        adj[e.v].push((e.u, e.w));
    }
    Ok(adj)
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Perfect-matching sums of induced subgraphs of one fixed graph.
///
/// The memo is keyed on vertex subsets and shared across queries, so many
/// `Ω_{u,v}` or gadget entries cost little more than one.
pub struct PerfectMatchingOracle {
    adj: Vec<Vec<(usize, f64)>>,
    memo: HashMap<u64, f64>,
}

impl PerfectMatchingOracle {
    pub fn new(g: &WeightedMultigraph) -> Result<Self> {
        Ok(PerfectMatchingOracle {
            adj: adjacency(g)?,
            memo: HashMap::new(),
        })
    }

    pub fn full_mask(&self) -> u64 {
        full_mask(self.adj.len())
    }

    /// PerfMatch of the subgraph induced by `mask`. The empty graph has sum 1.
    pub fn perfmatch_of(&mut self, mask: u64) -> f64 {
        if mask == 0 {
            return 1.0;
        }
        if mask.count_ones() % 2 == 1 {
            return 0.0;
        }
        if let Some(&v) = self.memo.get(&mask) {
            return v;
        }
        let v = mask.trailing_zeros() as usize;
        let rest = mask & !(1u64 << v);
        let mut sum = 0.0;
        for k in 0..self.adj[v].len() {
            let (u, w) = self.adj[v][k];
            if rest >> u & 1 == 1 {
                sum += w * self.perfmatch_of(rest & !(1u64 << u));
            }
        }
        self.memo.insert(mask, sum);
        sum
    }

    /// `Ω_{u,v}`: nearly perfect matchings leaving exactly `u` and `v` uncovered.
    pub fn omega(&mut self, u: usize, v: usize) -> f64 {
        let mask = self.full_mask() & !(1u64 << u) & !(1u64 << v);
        self.perfmatch_of(mask)
    }
}

struct LadderOracle {
    adj: Vec<Vec<(usize, f64)>>,
    memo: HashMap<u64, Rc<Vec<f64>>>,
}

impl LadderOracle {
    fn ladder(&mut self, mask: u64) -> Rc<Vec<f64>> {
        if mask == 0 {
            return Rc::new(vec![1.0]);
        }
        if let Some(z) = self.memo.get(&mask) {
            return Rc::clone(z);
        }
        let v = mask.trailing_zeros() as usize;
        let rest = mask & !(1u64 << v);
        let mut z = vec![0.0; mask.count_ones() as usize / 2 + 1];
        for (k, x) in self.ladder(rest).iter().enumerate() {
            z[k] += x;
        }
        for idx in 0..self.adj[v].len() {
            let (u, w) = self.adj[v][idx];
            if rest >> u & 1 == 1 {
                for (k, x) in self.ladder(rest & !(1u64 << u)).iter().enumerate() {
                    z[k + 1] += w * x;
                }
            }
        }
        let z = Rc::new(z);
        self.memo.insert(mask, Rc::clone(&z));
        z
    }
}

/// `Z_k(Γ)` for `k = 0..=⌊|V|/2⌋`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingLadder {
    pub num_vertices: usize,
    pub z: Vec<f64>,
}

impl MatchingLadder {
    /// `Z(Γ) = Σ_k Z_k(Γ)`.
    pub fn total(&self) -> f64 {
        self.z.iter().sum()
    }

    /// Largest level index `⌊|V|/2⌋`.
    pub fn top(&self) -> usize {
        self.z.len() - 1
    }

    /// `Z_N` when `|V| = 2N`.
    pub fn perfect(&self) -> Option<f64> {
        (self.num_vertices % 2 == 0).then(|| self.z[self.top()])
    }

    /// `Z_{N−1}` when `|V| = 2N ≥ 2`.
    pub fn near_perfect(&self) -> Option<f64> {
        (self.num_vertices % 2 == 0 && self.top() >= 1).then(|| self.z[self.top() - 1])
    }

    /// `ln Z_k`, `-inf` for empty levels.
    pub fn log_z(&self) -> Vec<f64> {
        self.z.iter().map(|x| x.ln()).collect()
    }

    /// `Z_{k−1}/Z_k` for `k = 1..=top`.
    pub fn ratios(&self) -> Vec<f64> {
        self.z.windows(2).map(|w| w[0] / w[1]).collect()
    }

    /// Ladder of `Γ(α)`: `Z_k α^k`.
    pub fn scaled(&self, alpha: f64) -> MatchingLadder {
        MatchingLadder {
            num_vertices: self.num_vertices,
            z: self.z.iter().enumerate().map(|(k, x)| x * alpha.powi(k as i32)).collect(),
        }
    }
}

pub fn matching_ladder(g: &WeightedMultigraph) -> Result<MatchingLadder> {
    let mut oracle = LadderOracle {
        adj: adjacency(g)?,
        memo: HashMap::new(),
    };
    let z = oracle.ladder(full_mask(g.num_vertices()));
    Ok(MatchingLadder {
        num_vertices: g.num_vertices(),
        z: z.as_ref().clone(),
    })
}

fn require_even(g: &WeightedMultigraph) -> Result<()> {
    if g.num_vertices() % 2 == 1 {
        Err(Error::OddVertexCount(g.num_vertices()))
    } else {
        Ok(())
    }
}

/// `PerfMatch(Γ)`.
pub fn perfmatch_exact(g: &WeightedMultigraph) -> Result<f64> {
    require_even(g)?;
    let mut oracle = PerfectMatchingOracle::new(g)?;
    let mask = oracle.full_mask();
    Ok(oracle.perfmatch_of(mask))
}

/// `NearPerfMatch(Γ)`; zero for the empty graph.
pub fn nearperfmatch_exact(g: &WeightedMultigraph) -> Result<f64> {
    require_even(g)?;
    Ok(matching_ladder(g)?.near_perfect().unwrap_or(0.0))
}

/// `Ω_{u,v}(Γ)`, the weight of nearly perfect matchings missing exactly `u, v`.
pub fn omega_exact(g: &WeightedMultigraph, u: usize, v: usize) -> Result<f64> {
    for x in [u, v] {
        if x >= g.num_vertices() {
            return Err(Error::UnknownVertex(x));
        }
    }
    if u == v {
        return Err(Error::InvalidParameter("omega needs two distinct vertices".into()));
    }
    require_even(g)?;
    Ok(PerfectMatchingOracle::new(g)?.omega(u, v))
}

/// `Ω_{u,v}` for every unordered pair `u < v`, sharing one memo.
pub fn all_omegas(g: &WeightedMultigraph) -> Result<Vec<((usize, usize), f64)>> {
    require_even(g)?;
    let mut oracle = PerfectMatchingOracle::new(g)?;
    let n = g.num_vertices();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for u in 0..n {
        for v in (u + 1)..n {
            out.push(((u, v), oracle.omega(u, v)));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogConcavity {
    pub holds: bool,
    /// First `k` with `Z_k² < Z_{k−1} Z_{k+1}`.
    pub first_violation: Option<usize>,
    /// Whether `Z_{k−1}/Z_k` is nondecreasing over the nonzero part of the ladder.
    pub ratios_monotone: bool,
    pub ladder: MatchingLadder,
}

pub fn check_log_concavity(g: &WeightedMultigraph) -> Result<LogConcavity> {
    let ladder = matching_ladder(g)?;
    let z = &ladder.z;
    let first_violation =
        (1..z.len().saturating_sub(1)).find(|&k| z[k] * z[k] < z[k - 1] * z[k + 1] * (1.0 - LOG_CONCAVITY_RTOL));
    let nonzero = z.iter().take_while(|&&x| x > 0.0).count();
    let ratios: Vec<f64> = z[..nonzero].windows(2).map(|w| w[0] / w[1]).collect();
    let ratios_monotone = ratios
        .windows(2)
        .all(|r| r[1] >= r[0] * (1.0 - LOG_CONCAVITY_RTOL));
    Ok(LogConcavity {
        holds: first_violation.is_none(),
        first_violation,
        ratios_monotone,
        ladder,
    })
}

/// Every matching of `g` as a sorted list of edge ids, in lexicographic
/// order of the include/exclude search. Fails beyond `limit` matchings.
pub fn all_matchings(g: &WeightedMultigraph, limit: usize) -> Result<Vec<Vec<usize>>> {
    fn go(
        g: &WeightedMultigraph,
        e: usize,
        covered: &mut Vec<bool>,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) -> Result<()> {
        if e == g.num_edges() {
            if out.len() == limit {
                return Err(Error::TooManyMatchings { limit });
            }
            out.push(current.clone());
            return Ok(());
        }
        go(g, e + 1, covered, current, out, limit)?;
        let edge = g.edge(e);
        if !covered[edge.u] && !covered[edge.v] {
            covered[edge.u] = true;
            covered[edge.v] = true;
            current.push(e);
            go(g, e + 1, covered, current, out, limit)?;
            current.pop();
            covered[edge.u] = false;
            covered[edge.v] = false;
        }
        Ok(())
    }
    let mut out = Vec::new();
    go(g, 0, &mut vec![false; g.num_vertices()], &mut Vec::new(), &mut out, limit)?;
    Ok(out)
}

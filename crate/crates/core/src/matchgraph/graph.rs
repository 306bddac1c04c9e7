use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    In,
    Out,
    Internal,
    Dangling,
}

/// Where a vertex came from. `gate` and `qubit` are 0-based and absent for
/// vertices that do not belong to a gate or a wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexLabel {
    pub gate: Option<usize>,
    pub role: Role,
    pub qubit: Option<usize>,
    /// Position of the vertex inside its gadget.
    pub slot: usize,
}

impl VertexLabel {
    pub fn plain(slot: usize) -> Self {
        VertexLabel {
            gate: None,
            role: Role::Internal,
            qubit: None,
            slot,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeTag {
    Internal,
    External,
    Dangling,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
    pub tag: EdgeTag,
}

impl Edge {
    /// The endpoint opposite `x`.
    #[inline]
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Undirected graph with positive edge weights. Parallel edges are distinct
/// edges with their own ids; self-loops are rejected.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightedMultigraph {
    labels: Vec<VertexLabel>,
    edges: Vec<Edge>,
    incident: Vec<Vec<usize>>,
}

/// Size and weight range, with `w_max ≥ 1` and `w_min ≤ 1` by convention.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub num_vertices: usize,
    pub num_edges: usize,
    pub w_max: f64,
    pub w_min: f64,
}

impl WeightedMultigraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// `count` unlabeled vertices and no edges.
    pub fn with_vertices(count: usize) -> Self {
        let mut g = Self::new();
        for k in 0..count {
            g.add_vertex(VertexLabel::plain(k));
        }
        g
    }

    /// Convenience constructor from `(u, v, w)` triples with internal tags.
    pub fn from_edges(num_vertices: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut g = Self::with_vertices(num_vertices);
        for &(u, v, w) in edges {
            g.add_edge(u, v, w, EdgeTag::Internal)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, label: VertexLabel) -> usize {
        self.labels.push(label);
        self.incident.push(Vec::new());
        self.labels.len() - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize, w: f64, tag: EdgeTag) -> Result<usize> {
        let n = self.labels.len();
        if u >= n {
            return Err(Error::UnknownVertex(u));
        }
        if v >= n {
            return Err(Error::UnknownVertex(v));
        }
        if u == v {
            return Err(Error::InvalidEdge {
                u,
                v,
                reason: "self-loop".into(),
            });
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidEdge {
                u,
                v,
                reason: format!("weight {w} is not positive"),
            });
        }
        let id = self.edges.len();
        self.edges.push(Edge { u, v, w, tag });
        self.incident[u].push(id);
        self.incident[v].push(id);
        Ok(id)
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn label(&self, v: usize) -> &VertexLabel {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[VertexLabel] {
        &self.labels
    }

    /// Ids of edges touching `v`.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn stats(&self) -> GraphStats {
        let (hi, lo) = self
            .edges
            .iter()
            .fold((1.0f64, 1.0f64), |(hi, lo), e| (hi.max(e.w), lo.min(e.w)));
        GraphStats {
            num_vertices: self.num_vertices(),
            num_edges: self.num_edges(),
            w_max: hi,
            w_min: lo,
        }
    }

    /// `Γ(α)`: every weight multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Self {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.w *= alpha;
        }
        g
    }

    /// Subgraph induced by the vertices where `keep` is true, renumbered in
    /// increasing order. Edge tags and labels are preserved.
    pub fn induced(&self, keep: impl Fn(usize) -> bool) -> Self {
        let mut map = vec![usize::MAX; self.num_vertices()];
        let mut g = Self::new();
        for v in 0..self.num_vertices() {
            if keep(v) {
                map[v] = g.add_vertex(self.labels[v]);
            }
        }
        for e in &self.edges {
            let (a, b) = (map[e.u], map[e.v]);
            if a != usize::MAX && b != usize::MAX {
                g.add_edge(a, b, e.w, e.tag).expect("induced edge is valid");
            }
        }
        g
    }

    pub fn to_record(&self) -> GraphRecord {
        GraphRecord {
            vertices: self
                .labels
                .iter()
                .enumerate()
                .map(|(id, &label)| VertexRecord { id, label })
                .collect(),
            edges: self.edges.clone(),
        }
    }

    pub fn from_record(rec: &GraphRecord) -> Result<Self> {
        let mut g = Self::new();
        for (k, v) in rec.vertices.iter().enumerate() {
            if v.id != k {
                return Err(Error::InconsistentSize(format!(
                    "vertex ids must be 0..{} in order, found {} at position {k}",
                    rec.vertices.len(),
                    v.id
                )));
            }
            g.add_vertex(v.label);
        }
        for e in &rec.edges {
            g.add_edge(e.u, e.v, e.w, e.tag)?;
        }
        Ok(g)
    }

    /// Graphviz rendering with weights as edge labels.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph gamma {\n  node [shape=circle, fontsize=10];\n");
        for (id, l) in self.labels.iter().enumerate() {
            let role = match l.role {
                Role::In => "in",
                Role::Out => "out",
                Role::Internal => "int",
                Role::Dangling => "dangle",
            };
            let mut name = format!("{id}\\n{role}");
            if let Some(g) = l.gate {
                let _ = write!(name, " g{g}");
            }
            if let Some(q) = l.qubit {
                let _ = write!(name, " q{}", q + 1);
            }
            let _ = writeln!(out, "  v{id} [label=\"{name}\"];");
        }
        for e in &self.edges {
            let style = match e.tag {
                EdgeTag::Internal => "solid",
                EdgeTag::External => "dashed",
                EdgeTag::Dangling => "dotted",
            };
            let _ = writeln!(out, "  v{} -- v{} [label=\"{:.4}\", style={style}];", e.u, e.v, e.w);
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: usize,
    pub label: VertexLabel,
}

/// JSON form: `{vertices: [{id, label}], edges: [{u, v, w, tag}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<Edge>,
}

/// `Γ'_{u,v}`: `Γ` plus pendant weight-1 edges `(u, u₀)` and `(v, v₀)`.
pub fn add_dangling(gamma: &WeightedMultigraph, u: usize, v: usize) -> Result<WeightedMultigraph> {
    let n = gamma.num_vertices();
    for x in [u, v] {
        if x >= n {
            return Err(Error::UnknownVertex(x));
        }
    }
    if u == v {
        return Err(Error::InvalidParameter(format!(
            "dangling edges need two distinct vertices, got {u} twice"
        )));
    }
    let mut g = gamma.clone();
    for (slot, x) in [u, v].into_iter().enumerate() {
        let label = VertexLabel {
            gate: gamma.label(x).gate,
            role: Role::Dangling,
            qubit: gamma.label(x).qubit,
            slot,
        };
        let x0 = g.add_vertex(label);
        g.add_edge(x, x0, 1.0, EdgeTag::Dangling)?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_self_loops_and_bad_weights() {
        let mut g = WeightedMultigraph::with_vertices(2);
        assert!(g.add_edge(0, 0, 1.0, EdgeTag::Internal).is_err());
        assert!(g.add_edge(0, 1, 0.0, EdgeTag::Internal).is_err());
        assert!(g.add_edge(0, 1, f64::NAN, EdgeTag::Internal).is_err());
        assert!(matches!(
            g.add_edge(0, 2, 1.0, EdgeTag::Internal),
            Err(Error::UnknownVertex(2))
        ));
    }

    #[test]
    fn parallel_edges_are_distinct() {
        let g = WeightedMultigraph::from_edges(2, &[(0, 1, 0.5), (1, 0, 1.0)]).unwrap();
        assert_eq!(g.num_edges(), 2);
        assert_eq!(g.incident(0), &[0, 1]);
        assert_eq!(g.edge(1).other(0), 1);
    }

    #[test]
    fn stats_follow_weight_conventions() {
        let unit = WeightedMultigraph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let s = unit.stats();
        assert_eq!((s.w_max, s.w_min), (1.0, 1.0));
        let g = WeightedMultigraph::from_edges(3, &[(0, 1, 1.5), (1, 2, 1.2)]).unwrap();
        assert_eq!((g.stats().w_max, g.stats().w_min), (1.5, 1.0));
        let g = WeightedMultigraph::from_edges(3, &[(0, 1, 0.5), (1, 2, 0.2)]).unwrap();
        assert_eq!((g.stats().w_max, g.stats().w_min), (1.0, 0.2));
    }

    #[test]
    fn induced_subgraph_renumbers() {
        let g = WeightedMultigraph::from_edges(4, &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 3.0)]).unwrap();
        let sub = g.induced(|v| v != 0);
        assert_eq!(sub.num_vertices(), 3);
        let ws: Vec<f64> = sub.edges().iter().map(|e| e.w).collect();
        assert_eq!(ws, [2.0, 3.0]);
        assert_eq!((sub.edge(0).u, sub.edge(0).v), (0, 1));
    }

    #[test]
    fn dangling_adds_pendants() {
        let g = WeightedMultigraph::from_edges(2, &[(0, 1, 0.3)]).unwrap();
        let d = add_dangling(&g, 0, 1).unwrap();
        assert_eq!(d.num_vertices(), 4);
        assert_eq!(d.degree(2), 1);
        assert_eq!(d.label(3).role, Role::Dangling);
        assert!(matches!(add_dangling(&g, 0, 5), Err(Error::UnknownVertex(5))));
        assert!(add_dangling(&g, 1, 1).is_err());
    }

    #[test]
    fn record_round_trip_and_dot() {
        let g = WeightedMultigraph::from_edges(3, &[(0, 1, 0.25), (1, 2, 1.0), (0, 1, 2.0)]).unwrap();
        let json = serde_json::to_string(&g.to_record()).unwrap();
        let back = WeightedMultigraph::from_record(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, g);
        let dot = g.to_dot();
        assert!(dot.contains("v0 -- v1 [label=\"0.2500\""));
        assert_eq!(dot.matches(" -- ").count(), 3);
    }
}

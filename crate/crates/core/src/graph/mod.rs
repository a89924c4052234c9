//! Undirected fuzzy graphs: vertex memberships `sigma`, edge memberships `mu`,
//! with `mu(pq) <= min(sigma(p), sigma(q))` enforced on every construction.

mod analysis;
mod io;

pub use analysis::{DegreeReport, EdgeClass};
pub use io::{parse_graph, serialize_graph};

use std::borrow::Borrow;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Absolute tolerance for membership equality (beta-strong edges, "strictly
/// reduces" tests, complete-graph checks, fuzzy isomorphism).
pub const EPSILON: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid vertex id {0:?}: ids must be non-empty and contain no whitespace")]
    InvalidVertexId(String),
    #[error("vertex {0} already exists")]
    DuplicateVertex(VertexId),
    #[error("membership {0} is outside [0, 1]")]
    MembershipOutOfRange(f64),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("self-loop on {0}")]
    SelfLoop(VertexId),
    #[error("edge {p}-{q} already exists")]
    DuplicateEdge { p: VertexId, q: VertexId },
    #[error("edge {p}-{q} has membership {mu} above min(sigma) = {bound}")]
    FuzzyInequalityViolated {
        p: VertexId,
        q: VertexId,
        mu: f64,
        bound: f64,
    },
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("unknown edge {0}-{1}")]
    UnknownEdge(String, String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<GraphError>,
    },
}

impl GraphError {
    /// Line number for errors raised while parsing a graph file.
    pub fn line(&self) -> Option<usize> {
        match self {
            GraphError::Syntax { line, .. } | GraphError::AtLine { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// Vertex label: a non-empty token without whitespace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(String);

impl VertexId {
    pub fn new(id: impl Into<String>) -> Result<Self, GraphError> {
        let id = id.into();
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(GraphError::InvalidVertexId(id));
        }
        Ok(VertexId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for VertexId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for VertexId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl FromStr for VertexId {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        VertexId::new(s)
    }
}

fn check_membership(value: f64) -> Result<f64, GraphError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(GraphError::MembershipOutOfRange(value))
    }
}

fn ordered(p: &VertexId, q: &VertexId) -> (VertexId, VertexId) {
    if p <= q {
        (p.clone(), q.clone())
    } else {
        (q.clone(), p.clone())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FuzzyGraph {
    vertices: BTreeMap<VertexId, f64>,
    // keyed by (smaller id, larger id)
    edges: BTreeMap<(VertexId, VertexId), f64>,
}

impl FuzzyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from vertex and edge lists, validating every entry.
    pub fn from_parts(vertices: &[(&str, f64)], edges: &[(&str, &str, f64)]) -> Result<Self, GraphError> {
        let mut g = FuzzyGraph::new();
        for &(id, sigma) in vertices {
            g.insert_vertex(VertexId::new(id)?, sigma)?;
        }
        for &(p, q, mu) in edges {
            g.insert_edge(p, q, mu)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&self, id: &str, sigma: f64) -> Result<FuzzyGraph, GraphError> {
        let mut g = self.clone();
        g.insert_vertex(VertexId::new(id)?, sigma)?;
        Ok(g)
    }

    pub fn add_edge(&self, p: &str, q: &str, mu: f64) -> Result<FuzzyGraph, GraphError> {
        let mut g = self.clone();
        g.insert_edge(p, q, mu)?;
        Ok(g)
    }

    pub(crate) fn insert_vertex(&mut self, id: VertexId, sigma: f64) -> Result<(), GraphError> {
        let sigma = check_membership(sigma)?;
        if self.vertices.contains_key(&id) {
            return Err(GraphError::DuplicateVertex(id));
        }
        self.vertices.insert(id, sigma);
        Ok(())
    }

    pub(crate) fn insert_edge(&mut self, p: &str, q: &str, mu: f64) -> Result<(), GraphError> {
        let p = self.id(p)?;
        let q = self.id(q)?;
        if p == q {
            return Err(GraphError::SelfLoop(p));
        }
        let mu = check_membership(mu)?;
        let bound = self.vertices[&p].min(self.vertices[&q]);
        if mu > bound {
            return Err(GraphError::FuzzyInequalityViolated { p, q, mu, bound });
        }
        let key = ordered(&p, &q);
        if self.edges.contains_key(&key) {
            return Err(GraphError::DuplicateEdge { p: key.0, q: key.1 });
        }
        self.edges.insert(key, mu);
        Ok(())
    }

    /// Looks up the stored id for `name`.
    pub fn id(&self, name: &str) -> Result<VertexId, GraphError> {
        self.vertices
            .get_key_value(name)
            .map(|(k, _)| k.clone())
            .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains_vertex(&self, id: &str) -> bool {
        self.vertices.contains_key(id)
    }

    pub fn sigma(&self, id: &str) -> Option<f64> {
        self.vertices.get(id).copied()
    }

    pub fn mu(&self, p: &str, q: &str) -> Option<f64> {
        let p = self.vertices.get_key_value(p)?.0;
        let q = self.vertices.get_key_value(q)?.0;
        self.edges.get(&ordered(p, q)).copied()
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> impl Iterator<Item = (&VertexId, f64)> {
        self.vertices.iter().map(|(k, &v)| (k, v))
    }

    /// Edges ordered by their sorted endpoint pair.
    pub fn edges(&self) -> impl Iterator<Item = (&VertexId, &VertexId, f64)> {
        self.edges.iter().map(|((p, q), &m)| (p, q, m))
    }

    pub fn vertex_ids(&self) -> Vec<VertexId> {
        self.vertices.keys().cloned().collect()
    }

    pub fn neighbors(&self, id: &str) -> Vec<(VertexId, f64)> {
        self.edges()
            .filter_map(|(p, q, m)| {
                if p.as_str() == id {
                    Some((q.clone(), m))
                } else if q.as_str() == id {
                    Some((p.clone(), m))
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn without_edge(&self, p: &str, q: &str) -> Result<FuzzyGraph, GraphError> {
        let key = ordered(&self.id(p)?, &self.id(q)?);
        let mut g = self.clone();
        if g.edges.remove(&key).is_none() {
            return Err(GraphError::UnknownEdge(p.to_string(), q.to_string()));
        }
        Ok(g)
    }

    pub fn without_vertex(&self, v: &str) -> Result<FuzzyGraph, GraphError> {
        let v = self.id(v)?;
        let mut g = self.clone();
        g.vertices.remove(&v);
        g.edges.retain(|(p, q), _| *p != v && *q != v);
        Ok(g)
    }

    /// The subgraph induced by `ids` (memberships unchanged).
    pub fn induced_subgraph<S: AsRef<str>>(&self, ids: &[S]) -> Result<FuzzyGraph, GraphError> {
        let mut g = FuzzyGraph::new();
        for id in ids {
            let id = self.id(id.as_ref())?;
            let sigma = self.vertices[&id];
            if g.vertices.insert(id.clone(), sigma).is_some() {
                return Err(GraphError::DuplicateVertex(id));
            }
        }
        for ((p, q), &mu) in &self.edges {
            if g.vertices.contains_key(p) && g.vertices.contains_key(q) {
                g.edges.insert((p.clone(), q.clone()), mu);
            }
        }
        Ok(g)
    }

    /// True when every edge satisfies the fuzzy-graph inequality. Always
    /// holds for graphs built through this API.
    pub fn is_well_formed(&self) -> bool {
        self.edges.iter().all(|((p, q), &mu)| {
            match (self.vertices.get(p), self.vertices.get(q)) {
                (Some(&a), Some(&b)) => p != q && mu <= a.min(b) && (0.0..=1.0).contains(&mu),
                _ => false,
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_vertex_inserts_membership() {
        let g = FuzzyGraph::new().add_vertex("a", 0.7).unwrap();
        assert_eq!(g.sigma("a"), Some(0.7));
        assert_eq!(g.vertex_count(), 1);
    }

    #[test]
    fn add_vertex_rejects_duplicates_and_range() {
        let g = FuzzyGraph::new().add_vertex("a", 0.7).unwrap();
        assert!(matches!(g.add_vertex("a", 0.5), Err(GraphError::DuplicateVertex(_))));
        assert!(matches!(
            FuzzyGraph::new().add_vertex("a", 1.2),
            Err(GraphError::MembershipOutOfRange(_))
        ));
        assert!(matches!(
            FuzzyGraph::new().add_vertex("a", f64::NAN),
            Err(GraphError::MembershipOutOfRange(_))
        ));
        assert!(matches!(
            FuzzyGraph::new().add_vertex("a b", 0.5),
            Err(GraphError::InvalidVertexId(_))
        ));
        assert!(matches!(
            FuzzyGraph::new().add_vertex("", 0.5),
            Err(GraphError::InvalidVertexId(_))
        ));
    }

    #[test]
    fn add_edge_boundary_and_violations() {
        let g = FuzzyGraph::from_parts(&[("a", 0.7), ("b", 0.9)], &[]).unwrap();
        let ok = g.add_edge("a", "b", 0.7).unwrap();
        assert_eq!(ok.mu("b", "a"), Some(0.7));
        assert!(matches!(
            g.add_edge("a", "b", 0.8),
            Err(GraphError::FuzzyInequalityViolated { .. })
        ));
        assert!(matches!(g.add_edge("a", "a", 0.1), Err(GraphError::SelfLoop(_))));
        assert!(matches!(g.add_edge("a", "z", 0.1), Err(GraphError::UnknownVertex(_))));
        assert!(matches!(
            ok.add_edge("b", "a", 0.1),
            Err(GraphError::DuplicateEdge { .. })
        ));
    }

    #[test]
    fn operations_leave_input_untouched() {
        let g = FuzzyGraph::from_parts(&[("a", 0.7), ("b", 0.9)], &[("a", "b", 0.5)]).unwrap();
        let before = g.clone();
        let _ = g.add_vertex("c", 0.1).unwrap();
        let h = g.without_edge("a", "b").unwrap();
        assert_eq!(g, before);
        assert_eq!(h.edge_count(), 0);
        assert!(g.without_edge("a", "c").is_err());
    }

    #[test]
    fn without_vertex_drops_incident_edges() {
        let g = FuzzyGraph::from_parts(
            &[("a", 1.0), ("b", 1.0), ("c", 1.0)],
            &[("a", "b", 0.5), ("b", "c", 0.7)],
        )
        .unwrap();
        let h = g.without_vertex("b").unwrap();
        assert_eq!(h.vertex_count(), 2);
        assert_eq!(h.edge_count(), 0);
    }
}

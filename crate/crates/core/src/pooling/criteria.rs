use std::fmt;
use std::sync::Arc;

use crate::graph::{FuzzyGraph, VertexId, EPSILON};

use super::pool_pair;

type Predicate = Arc<dyn Fn(&FuzzyGraph) -> bool + Send + Sync>;

/// A named graph predicate that a pooling must respect.
#[derive(Clone)]
pub struct Criteria {
    name: String,
    predicate: Predicate,
}

impl fmt::Debug for Criteria {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Criteria").field("name", &self.name).finish_non_exhaustive()
    }
}

impl Criteria {
    pub fn new(name: impl Into<String>, predicate: impl Fn(&FuzzyGraph) -> bool + Send + Sync + 'static) -> Self {
        Criteria {
            name: name.into(),
            predicate: Arc::new(predicate),
        }
    }

    /// Every pair of distinct vertices has connectivity strength at least `t`.
    pub fn conn_threshold(t: f64) -> Self {
        Criteria::new(format!("conn>={t}"), move |g| {
            let (ids, conn) = g.connectivity_matrix();
            let n = ids.len();
            (0..n).all(|i| (i + 1..n).all(|j| conn[i * n + j] >= t - EPSILON))
        })
    }

    pub fn tautology() -> Self {
        Criteria::new("true", |_| true)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn check(&self, g: &FuzzyGraph) -> bool {
        (self.predicate)(g)
    }
}

/// A pooling sequence after which a criterion stopped holding.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    /// Pairs pooled, named in the coordinates of the graph at each step.
    pub steps: Vec<(VertexId, VertexId)>,
    pub graph: FuzzyGraph,
}

/// Tries every sequence of up to `depth` pair poolings (any two vertices,
/// adjacent or not) and returns each pooled graph that violates `criteria`.
/// Returns nothing when `g` itself violates it.
pub fn audit_hereditary(criteria: &Criteria, g: &FuzzyGraph, depth: usize) -> Vec<Counterexample> {
    let mut found = Vec::new();
    if criteria.check(g) {
        walk(criteria, g, depth, &mut Vec::new(), &mut found);
    }
    found
}

fn walk(
    criteria: &Criteria,
    g: &FuzzyGraph,
    depth: usize,
    steps: &mut Vec<(VertexId, VertexId)>,
    found: &mut Vec<Counterexample>,
) {
    if depth == 0 {
        return;
    }
    let ids = g.vertex_ids();
    for (i, p) in ids.iter().enumerate() {
        for q in &ids[i + 1..] {
            let pooled = pool_pair(g, p.as_str(), q.as_str())
                .expect("distinct vertices of g")
                .graph;
            steps.push((p.clone(), q.clone()));
            if criteria.check(&pooled) {
                walk(criteria, &pooled, depth - 1, steps, found);
            } else {
                found.push(Counterexample {
                    steps: steps.clone(),
                    graph: pooled,
                });
            }
            steps.pop();
        }
    }
}

//! Fuzzy vertex pooling: identify two vertices `p`, `q` as a new vertex `v_c`
//! with `sigma(v_c) = sigma(p) ∧ sigma(q)`. Edges to exactly one of `p`, `q`
//! carry over; a common neighbour `u` gets `mu(up) ∧ mu(uq)`; an edge `pq`
//! vanishes. Carried memberships are clamped to `sigma(u) ∧ sigma(v_c)` so
//! the result is always a fuzzy graph.
//!
//! Everything else here (sequences, cycles, blocks, complete subgraphs,
//! forest sets) is a fold of [`pool_pair`].

mod criteria;
mod iso;

pub use criteria::{audit_hereditary, Counterexample, Criteria};
pub use iso::{graphs_isomorphic, IsoMode, MAX_ISO_VERTICES};

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{FuzzyGraph, GraphError, VertexId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PoolError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("cannot pool {0} with itself")]
    IdenticalVertices(String),
    #[error("invalid pooling plan: {0}")]
    InvalidPlan(String),
    #[error("not a cycle: {0}")]
    NotACycle(String),
    #[error("not a fuzzy block: {0}")]
    NotABlock(String),
    #[error("not a complete fuzzy graph: {0}")]
    NotCompleteFuzzy(String),
    #[error("not a forest: {0}")]
    NotAForest(String),
    #[error("graph has {0} vertices; exhaustive isomorphism is limited to {MAX_ISO_VERTICES}")]
    TooLarge(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoolResult {
    pub graph: FuzzyGraph,
    /// Every input vertex to the output vertex that now represents it.
    pub mapping: BTreeMap<VertexId, VertexId>,
    /// The vertex created by the last pooling step; `None` when nothing was
    /// pooled.
    pub merged: Option<VertexId>,
}

impl PoolResult {
    fn identity(g: &FuzzyGraph) -> Self {
        PoolResult {
            graph: g.clone(),
            mapping: g.vertex_ids().into_iter().map(|v| (v.clone(), v)).collect(),
            merged: None,
        }
    }

    /// Input vertices grouped by their representative.
    pub fn classes(&self) -> BTreeMap<VertexId, Vec<VertexId>> {
        let mut out: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for (from, to) in &self.mapping {
            out.entry(to.clone()).or_default().push(from.clone());
        }
        out
    }
}

/// Pairs to pool in order. Names refer to vertices of the original graph
/// (resolved through the mapping built so far) or to vertices created by
/// earlier steps.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PoolPlan {
    pub pairs: Vec<(String, String)>,
}

impl PoolPlan {
    pub fn new<S: Into<String>>(pairs: impl IntoIterator<Item = (S, S)>) -> Self {
        PoolPlan {
            pairs: pairs.into_iter().map(|(a, b)| (a.into(), b.into())).collect(),
        }
    }

    /// Consecutive pairs along a vertex sequence: `v1v2, v2v3, ...`.
    pub fn along<S: AsRef<str>>(vertices: &[S]) -> Self {
        PoolPlan::new(
            vertices
                .windows(2)
                .map(|w| (w[0].as_ref().to_string(), w[1].as_ref().to_string())),
        )
    }
}

fn fresh_name(g: &FuzzyGraph, p: &VertexId, q: &VertexId) -> VertexId {
    let base = format!("{p}+{q}");
    let taken = |name: &str| name != p.as_str() && name != q.as_str() && g.contains_vertex(name);
    if !taken(&base) {
        return VertexId::new(base).expect("ids without whitespace");
    }
    (2..)
        .map(|k| format!("{base}#{k}"))
        .find(|n| !taken(n))
        .map(|n| VertexId::new(n).expect("ids without whitespace"))
        .expect("unbounded suffix search")
}

/// Pools `p` and `q` into a fresh vertex named `p+q` (suffixed `#k` on a
/// clash). The two vertices need not be adjacent.
pub fn pool_pair(g: &FuzzyGraph, p: &str, q: &str) -> Result<PoolResult, PoolError> {
    let pid = g.id(p)?;
    let qid = g.id(q)?;
    if pid == qid {
        return Err(PoolError::IdenticalVertices(p.to_string()));
    }
    let sigma_c = g.sigma(p).expect("present").min(g.sigma(q).expect("present"));
    let vc = fresh_name(g, &pid, &qid);

    let mut out = FuzzyGraph::new();
    for (v, s) in g.vertices() {
        if *v != pid && *v != qid {
            out.insert_vertex(v.clone(), s)?;
        }
    }
    out.insert_vertex(vc.clone(), sigma_c)?;

    let mut towards_c: BTreeMap<VertexId, f64> = BTreeMap::new();
    for (a, b, mu) in g.edges() {
        let a_pooled = *a == pid || *a == qid;
        let b_pooled = *b == pid || *b == qid;
        match (a_pooled, b_pooled) {
            (false, false) => out.insert_edge(a.as_str(), b.as_str(), mu)?,
            (true, true) => {}
            (true, false) | (false, true) => {
                let u = if a_pooled { b } else { a };
                towards_c
                    .entry(u.clone())
                    .and_modify(|m| *m = m.min(mu))
                    .or_insert(mu);
            }
        }
    }
    for (u, mu) in towards_c {
        let bound = out.sigma(u.as_str()).expect("neighbour kept").min(sigma_c);
        out.insert_edge(u.as_str(), vc.as_str(), mu.min(bound))?;
    }

    let mapping = g
        .vertex_ids()
        .into_iter()
        .map(|v| {
            let to = if v == pid || v == qid { vc.clone() } else { v.clone() };
            (v, to)
        })
        .collect();
    Ok(PoolResult {
        graph: out,
        mapping,
        merged: Some(vc),
    })
}

/// Folds [`pool_pair`] over `plan`. A pair whose endpoints already share a
/// representative is skipped (for example the closing edge of a cycle).
pub fn pool_sequence(g: &FuzzyGraph, plan: &PoolPlan) -> Result<PoolResult, PoolError> {
    let mut acc = PoolResult::identity(g);
    for (a, b) in &plan.pairs {
        if a == b {
            return Err(PoolError::IdenticalVertices(a.clone()));
        }
        let resolve = |name: &str| -> Result<VertexId, PoolError> {
            if let Some(rep) = acc.mapping.get(name) {
                Ok(rep.clone())
            } else if acc.graph.contains_vertex(name) {
                Ok(acc.graph.id(name)?)
            } else {
                Err(PoolError::InvalidPlan(format!("{name} is not a vertex at this step")))
            }
        };
        let (ra, rb) = (resolve(a)?, resolve(b)?);
        if ra == rb {
            continue;
        }
        let step = pool_pair(&acc.graph, ra.as_str(), rb.as_str())?;
        let vc = step.merged.clone().expect("pool_pair always merges");
        for rep in acc.mapping.values_mut() {
            if *rep == ra || *rep == rb {
                *rep = vc.clone();
            }
        }
        acc.graph = step.graph;
        acc.merged = Some(vc);
    }
    Ok(acc)
}

/// Collapses a cycle `c1 - c2 - ... - ck - c1` (k >= 3, all edges present
/// with positive membership) into one vertex.
pub fn pool_cycle<S: AsRef<str>>(g: &FuzzyGraph, cycle: &[S]) -> Result<PoolResult, PoolError> {
    if cycle.len() < 3 {
        return Err(PoolError::NotACycle(format!(
            "a cycle needs at least 3 vertices, got {}",
            cycle.len()
        )));
    }
    let mut seen = BTreeSet::new();
    for v in cycle {
        let v = v.as_ref();
        if !g.contains_vertex(v) {
            return Err(PoolError::NotACycle(format!("unknown vertex {v}")));
        }
        if !seen.insert(v) {
            return Err(PoolError::NotACycle(format!("vertex {v} repeats")));
        }
    }
    for k in 0..cycle.len() {
        let (a, b) = (cycle[k].as_ref(), cycle[(k + 1) % cycle.len()].as_ref());
        if !matches!(g.mu(a, b), Some(m) if m > 0.0) {
            return Err(PoolError::NotACycle(format!("no edge {a}-{b}")));
        }
    }
    pool_sequence(g, &PoolPlan::along(cycle))
}

fn sorted_plan<S: AsRef<str>>(vertices: &[S]) -> PoolPlan {
    let mut names: Vec<&str> = vertices.iter().map(AsRef::as_ref).collect();
    names.sort_unstable();
    PoolPlan::along(&names)
}

/// Pools a set of vertices whose induced subgraph is a fuzzy block, in
/// lexicographic order.
pub fn pool_block<S: AsRef<str>>(g: &FuzzyGraph, vertices: &[S]) -> Result<PoolResult, PoolError> {
    let sub = g.induced_subgraph(vertices)?;
    if sub.is_empty() || !sub.is_f_block() {
        return Err(PoolError::NotABlock(
            "induced subgraph is disconnected or has a fuzzy cutvertex".into(),
        ));
    }
    pool_sequence(g, &sorted_plan(vertices))
}

/// Pools a set of vertices whose induced subgraph is a complete fuzzy graph,
/// in lexicographic order.
pub fn pool_cfg<S: AsRef<str>>(g: &FuzzyGraph, vertices: &[S]) -> Result<PoolResult, PoolError> {
    let sub = g.induced_subgraph(vertices)?;
    if sub.is_empty() || !sub.is_complete_fuzzy() {
        return Err(PoolError::NotCompleteFuzzy(
            "some pair lacks an edge of membership min(sigma)".into(),
        ));
    }
    pool_sequence(g, &sorted_plan(vertices))
}

/// Pools a vertex set whose induced subgraph is a forest: each tree of the
/// forest collapses to one vertex. Isolated members stay as they are.
pub fn pool_forest_set<S: AsRef<str>>(
    g: &FuzzyGraph,
    vertices: &[S],
) -> Result<PoolResult, PoolError> {
    let sub = g.induced_subgraph(vertices)?;
    let components = sub.components();
    let positive_edges = sub.edges().filter(|(_, _, m)| *m > 0.0).count();
    if positive_edges + components.len() != sub.vertex_count() {
        return Err(PoolError::NotAForest("induced subgraph contains a cycle".into()));
    }
    let mut plan = PoolPlan::default();
    for comp in &components {
        plan.pairs.extend(sorted_plan(comp).pairs);
    }
    pool_sequence(g, &plan)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> FuzzyGraph {
        FuzzyGraph::from_parts(
            &[("a", 1.0), ("b", 1.0), ("c", 1.0)],
            &[("a", "b", 0.5), ("b", "c", 0.7), ("c", "a", 0.9)],
        )
        .unwrap()
    }

    #[test]
    fn triangle_pair_pool() {
        let r = pool_pair(&triangle(), "b", "c").unwrap();
        assert_eq!(r.graph.vertex_count(), 2);
        assert_eq!(r.graph.edge_count(), 1);
        assert_eq!(r.merged.as_ref().unwrap().as_str(), "b+c");
        assert_eq!(r.graph.mu("a", "b+c"), Some(0.5));
        assert_eq!(r.graph.sigma("b+c"), Some(1.0));
        assert_eq!(r.mapping["b"].as_str(), "b+c");
        assert_eq!(r.mapping["a"].as_str(), "a");
    }

    fn five_vertex() -> FuzzyGraph {
        FuzzyGraph::from_parts(
            &[("g", 1.0), ("h", 1.0), ("i", 1.0), ("j", 1.0), ("k", 1.0)],
            &[
                ("g", "h", 0.5),
                ("g", "k", 0.6),
                ("g", "j", 0.6),
                ("j", "h", 0.7),
                ("j", "k", 0.6),
                ("j", "i", 0.4),
                ("h", "i", 0.8),
            ],
        )
        .unwrap()
    }

    #[test]
    fn five_vertex_pools() {
        let g = five_vertex();
        let r = pool_pair(&g, "k", "h").unwrap();
        let vc = r.merged.unwrap();
        let names: Vec<&str> = r.graph.vertices().map(|(v, _)| v.as_str()).collect();
        assert_eq!(names, vec!["g", "i", "j", "k+h"]);
        assert_eq!(r.graph.edge_count(), 5);
        assert_eq!(r.graph.mu("j", vc.as_str()), Some(0.6));
        assert_eq!(r.graph.mu("g", vc.as_str()), Some(0.5));
        assert_eq!(r.graph.mu("i", vc.as_str()), Some(0.8));
        assert_eq!(r.graph.mu("g", "j"), Some(0.6));
        assert_eq!(r.graph.mu("j", "i"), Some(0.4));

        let r = pool_pair(&g, "g", "j").unwrap();
        assert_eq!(r.graph.edge_count(), 4);
        assert_eq!(r.graph.mu("k", "g+j"), Some(0.6));
        assert_eq!(r.graph.mu("h", "g+j"), Some(0.5));
        assert_eq!(r.graph.mu("i", "g+j"), Some(0.4));
        assert_eq!(r.graph.mu("h", "i"), Some(0.8));
    }

    #[test]
    fn isolated_pair_pool() {
        let g = FuzzyGraph::from_parts(&[("p", 0.4), ("q", 0.8)], &[]).unwrap();
        let r = pool_pair(&g, "p", "q").unwrap();
        assert_eq!(r.graph.vertex_count(), 1);
        assert_eq!(r.graph.sigma("p+q"), Some(0.4));
        assert_eq!(r.graph.edge_count(), 0);
    }

    #[test]
    fn pool_pair_errors() {
        let g = triangle();
        assert_eq!(
            pool_pair(&g, "a", "a"),
            Err(PoolError::IdenticalVertices("a".into()))
        );
        assert!(matches!(
            pool_pair(&g, "a", "z"),
            Err(PoolError::Graph(GraphError::UnknownVertex(_)))
        ));
    }

    #[test]
    fn carried_edge_is_clamped() {
        let g = FuzzyGraph::from_parts(
            &[("p", 0.9), ("q", 0.3), ("u", 1.0)],
            &[("u", "p", 0.8)],
        )
        .unwrap();
        let r = pool_pair(&g, "p", "q").unwrap();
        assert_eq!(r.graph.mu("u", "p+q"), Some(0.3));
        assert!(r.graph.is_well_formed());
    }

    #[test]
    fn name_clash_gets_suffix() {
        let g = FuzzyGraph::from_parts(&[("a", 1.0), ("b", 1.0), ("a+b", 1.0)], &[]).unwrap();
        let r = pool_pair(&g, "a", "b").unwrap();
        assert_eq!(r.merged.unwrap().as_str(), "a+b#2");
        assert_eq!(r.graph.vertex_count(), 2);
    }

    #[test]
    fn empty_plan_is_identity() {
        let g = triangle();
        let r = pool_sequence(&g, &PoolPlan::default()).unwrap();
        assert_eq!(r.graph, g);
        assert!(r.mapping.iter().all(|(a, b)| a == b));
        assert_eq!(r.merged, None);
    }

    #[test]
    fn path_pool_collapses_to_min_sigma() {
        let g = FuzzyGraph::from_parts(
            &[("a", 0.8), ("b", 0.6), ("c", 0.9)],
            &[("a", "b", 0.5), ("b", "c", 0.6)],
        )
        .unwrap();
        let r = pool_sequence(&g, &PoolPlan::new([("a", "b"), ("b", "c")])).unwrap();
        assert_eq!(r.graph.vertex_count(), 1);
        assert_eq!(r.graph.vertices().next().unwrap().1, 0.6);
        assert!(r.mapping.values().all(|v| v.as_str() == "a+b+c"));
    }

    #[test]
    fn plan_with_vanished_name_is_invalid() {
        let g = triangle();
        assert!(matches!(
            pool_sequence(&g, &PoolPlan::new([("a", "nope")])),
            Err(PoolError::InvalidPlan(_))
        ));
        // names created by earlier steps may be used directly
        let r = pool_sequence(&g, &PoolPlan::new([("a", "b"), ("a+b", "c")])).unwrap();
        assert_eq!(r.graph.vertex_count(), 1);
    }

    #[test]
    fn square_cycle_collapses_to_weakest_edge() {
        // sigma at b is pinned by its two weakest edges
        let g = FuzzyGraph::from_parts(
            &[("a", 0.9), ("b", 0.3), ("c", 0.8), ("d", 0.9)],
            &[("a", "b", 0.3), ("b", "c", 0.3), ("c", "d", 0.8), ("d", "a", 0.9)],
        )
        .unwrap();
        let r = pool_cycle(&g, &["a", "b", "c", "d"]).unwrap();
        assert_eq!(r.graph.vertex_count(), 1);
        assert_eq!(r.graph.vertices().next().unwrap().1, 0.3);
    }

    #[test]
    fn triangle_cycle_collapses() {
        let g = FuzzyGraph::from_parts(
            &[("a", 0.6), ("b", 0.6), ("c", 0.6)],
            &[("a", "b", 0.6), ("b", "c", 0.6), ("c", "a", 0.6)],
        )
        .unwrap();
        let r = pool_cycle(&g, &["a", "b", "c"]).unwrap();
        assert_eq!(r.graph.vertices().next().unwrap().1, 0.6);
    }

    #[test]
    fn cycle_validation() {
        let g = triangle();
        assert!(matches!(pool_cycle(&g, &["a", "b"]), Err(PoolError::NotACycle(_))));
        assert!(matches!(pool_cycle(&g, &["a", "b", "a"]), Err(PoolError::NotACycle(_))));
        let open = g.without_edge("c", "a").unwrap();
        assert!(matches!(pool_cycle(&open, &["a", "b", "c"]), Err(PoolError::NotACycle(_))));
    }

    #[test]
    fn cfg_pool_collapses_to_min_sigma() {
        let g = FuzzyGraph::from_parts(
            &[("p1", 0.3), ("p2", 0.5), ("p3", 0.9)],
            &[("p1", "p2", 0.3), ("p1", "p3", 0.3), ("p2", "p3", 0.5)],
        )
        .unwrap();
        let r = pool_cfg(&g, &["p3", "p1", "p2"]).unwrap();
        assert_eq!(r.graph.vertex_count(), 1);
        assert_eq!(r.graph.vertices().next().unwrap().1, 0.3);
        assert!(matches!(pool_cfg(&triangle(), &["a", "b", "c"]), Err(PoolError::NotCompleteFuzzy(_))));
    }

    #[test]
    fn block_pool() {
        let g = FuzzyGraph::from_parts(
            &[("a", 0.6), ("b", 0.8), ("c", 0.9), ("d", 1.0), ("x", 1.0)],
            &[
                ("a", "b", 0.6),
                ("b", "c", 0.6),
                ("c", "d", 0.6),
                ("d", "a", 0.6),
                ("d", "x", 0.4),
            ],
        )
        .unwrap();
        let r = pool_block(&g, &["a", "b", "c", "d"]).unwrap();
        assert_eq!(r.graph.vertex_count(), 2);
        let rep = r.mapping["a"].clone();
        assert_eq!(r.graph.sigma(rep.as_str()), Some(0.6_f64.min(0.6)));
        assert_eq!(r.graph.mu(rep.as_str(), "x"), Some(0.4));

        let path = FuzzyGraph::from_parts(
            &[("a", 1.0), ("b", 1.0), ("c", 1.0)],
            &[("a", "b", 0.5), ("b", "c", 0.7)],
        )
        .unwrap();
        assert!(matches!(pool_block(&path, &["a", "b", "c"]), Err(PoolError::NotABlock(_))));
    }

    #[test]
    fn forest_set_pools_per_component() {
        let g = FuzzyGraph::from_parts(
            &[("a", 1.0), ("b", 1.0), ("c", 1.0), ("d", 1.0), ("e", 1.0)],
            &[("a", "b", 0.5), ("c", "d", 0.7), ("b", "c", 0.2), ("d", "e", 0.3)],
        )
        .unwrap();
        let r = pool_forest_set(&g, &["a", "b", "d", "e"]).unwrap();
        assert_eq!(r.graph.vertex_count(), 3);
        assert_eq!(r.classes().len(), 3);
        assert!(matches!(
            pool_forest_set(&triangle(), &["a", "b", "c"]),
            Err(PoolError::NotAForest(_))
        ));
    }
}

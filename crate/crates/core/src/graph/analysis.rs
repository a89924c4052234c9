use std::collections::{BTreeSet, VecDeque};

use super::{FuzzyGraph, GraphError, VertexId, EPSILON};
use crate::par;

/// Strength of an edge relative to the best detour between its endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeClass {
    /// `mu(pq)` exceeds every alternative `p-q` path.
    Alpha,
    /// `mu(pq)` ties the strongest alternative path.
    Beta,
    /// A strictly stronger detour exists.
    Delta,
}

impl EdgeClass {
    pub fn is_strong(self) -> bool {
        matches!(self, EdgeClass::Alpha | EdgeClass::Beta)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeClass::Alpha => "alpha",
            EdgeClass::Beta => "beta",
            EdgeClass::Delta => "delta",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeReport {
    pub vertex: VertexId,
    pub degree: f64,
    pub strong_degree: f64,
    pub strong_neighbors: BTreeSet<VertexId>,
}

/// Dense index view used by the analytics. Absent edges are stored as 0,
/// which is exactly how they behave under max-min path strength.
#[derive(Clone)]
pub(crate) struct Matrix {
    pub(crate) ids: Vec<VertexId>,
    pub(crate) sigma: Vec<f64>,
    pub(crate) mu: Vec<f64>,
    pub(crate) present: Vec<bool>,
}

impl Matrix {
    pub(crate) fn of(g: &FuzzyGraph) -> Self {
        let ids = g.vertex_ids();
        let n = ids.len();
        let sigma = g.vertices().map(|(_, s)| s).collect();
        let mut mu = vec![0.0; n * n];
        let mut present = vec![false; n * n];
        for (p, q, m) in g.edges() {
            let i = ids.binary_search(p).expect("edge endpoint");
            let j = ids.binary_search(q).expect("edge endpoint");
            mu[i * n + j] = m;
            mu[j * n + i] = m;
            present[i * n + j] = true;
            present[j * n + i] = true;
        }
        Matrix {
            ids,
            sigma,
            mu,
            present,
        }
    }

    pub(crate) fn n(&self) -> usize {
        self.ids.len()
    }

    pub(crate) fn index(&self, id: &str) -> Result<usize, GraphError> {
        self.ids
            .binary_search_by(|v| v.as_str().cmp(id))
            .map_err(|_| GraphError::UnknownVertex(id.to_string()))
    }

    /// Widest-path strength from `src` to every vertex.
    fn widest_from(&self, src: usize) -> Vec<f64> {
        let n = self.n();
        let mut best = vec![0.0f64; n];
        let mut done = vec![false; n];
        best[src] = f64::INFINITY;
        for _ in 0..n {
            let mut u = None;
            let mut top = 0.0;
            for v in 0..n {
                if !done[v] && best[v] > top {
                    top = best[v];
                    u = Some(v);
                }
            }
            let Some(u) = u else { break };
            done[u] = true;
            for v in 0..n {
                let w = self.mu[u * n + v];
                if !done[v] && w > 0.0 {
                    let cand = best[u].min(w);
                    if cand > best[v] {
                        best[v] = cand;
                    }
                }
            }
        }
        best[src] = 0.0;
        best
    }

    /// All-pairs max-min closure. Diagonal entries are meaningless and zeroed.
    pub(crate) fn closure(&self) -> Vec<f64> {
        let n = self.n();
        let mut c = self.mu.clone();
        const PARALLEL_MIN: usize = 96;
        for k in 0..n {
            let row_k: Vec<f64> = c[k * n..(k + 1) * n].to_vec();
            let relax = |i: usize, row: &mut [f64]| {
                let cik = row[k];
                if cik <= 0.0 || i == k {
                    return;
                }
                for (cij, &ckj) in row.iter_mut().zip(&row_k) {
                    let through = cik.min(ckj);
                    if through > *cij {
                        *cij = through;
                    }
                }
            };
            if n >= PARALLEL_MIN {
                par::for_each_chunk_mut(&mut c, n, |i, row| relax(i, row));
            } else {
                for (i, row) in c.chunks_mut(n).enumerate() {
                    relax(i, row);
                }
            }
        }
        for i in 0..n {
            c[i * n + i] = 0.0;
        }
        c
    }

    fn without_edge(&self, i: usize, j: usize) -> Matrix {
        let n = self.n();
        let mut m = self.clone();
        m.mu[i * n + j] = 0.0;
        m.mu[j * n + i] = 0.0;
        m.present[i * n + j] = false;
        m.present[j * n + i] = false;
        m
    }

    fn classify(&self, i: usize, j: usize) -> EdgeClass {
        let n = self.n();
        let mu = self.mu[i * n + j];
        let detour = self.without_edge(i, j).widest_from(i)[j];
        classify_against(mu, detour)
    }
}

fn classify_against(mu: f64, detour: f64) -> EdgeClass {
    if (mu - detour).abs() <= EPSILON {
        EdgeClass::Beta
    } else if mu > detour {
        EdgeClass::Alpha
    } else {
        EdgeClass::Delta
    }
}

impl FuzzyGraph {
    /// Strength of a path: its weakest edge. The path must list at least two
    /// distinct vertices joined consecutively by edges of positive membership.
    pub fn path_strength<S: AsRef<str>>(&self, path: &[S]) -> Result<f64, GraphError> {
        if path.len() < 2 {
            return Err(GraphError::InvalidPath("a path needs at least two vertices".into()));
        }
        let mut seen = BTreeSet::new();
        for v in path {
            let v = v.as_ref();
            if !self.contains_vertex(v) {
                return Err(GraphError::InvalidPath(format!("unknown vertex {v}")));
            }
            if !seen.insert(v) {
                return Err(GraphError::InvalidPath(format!("vertex {v} repeats")));
            }
        }
        let mut strength = f64::INFINITY;
        for pair in path.windows(2) {
            let (p, q) = (pair[0].as_ref(), pair[1].as_ref());
            match self.mu(p, q) {
                Some(m) if m > 0.0 => strength = strength.min(m),
                _ => return Err(GraphError::InvalidPath(format!("no edge {p}-{q}"))),
            }
        }
        Ok(strength)
    }

    /// CONN(p, q): the strength of the strongest `p-q` path, 0 when none exists.
    pub fn connectivity_strength(&self, p: &str, q: &str) -> Result<f64, GraphError> {
        let m = Matrix::of(self);
        let i = m.index(p)?;
        let j = m.index(q)?;
        if i == j {
            return Err(GraphError::InvalidPath(format!("{p} and {q} are the same vertex")));
        }
        Ok(m.widest_from(i)[j])
    }

    /// All-pairs CONN in vertex order; entry `(i, j)` is at `i * n + j`.
    pub fn connectivity_matrix(&self) -> (Vec<VertexId>, Vec<f64>) {
        let m = Matrix::of(self);
        let c = m.closure();
        (m.ids, c)
    }

    pub fn classify_edge(&self, p: &str, q: &str) -> Result<EdgeClass, GraphError> {
        let m = Matrix::of(self);
        let (i, j) = edge_indices(self, &m, p, q)?;
        Ok(m.classify(i, j))
    }

    /// Class of every edge, in canonical edge order.
    pub fn edge_classes(&self) -> Vec<(VertexId, VertexId, EdgeClass)> {
        let m = Matrix::of(self);
        let pairs: Vec<(VertexId, VertexId)> =
            self.edges().map(|(p, q, _)| (p.clone(), q.clone())).collect();
        par::map_collect(pairs, |(p, q)| {
            let i = m.index(p.as_str()).expect("edge endpoint");
            let j = m.index(q.as_str()).expect("edge endpoint");
            let class = m.classify(i, j);
            (p, q, class)
        })
    }

    /// An edge is a fuzzy bridge when deleting it lowers CONN between some
    /// pair of vertices by more than `EPSILON`.
    pub fn is_fuzzy_bridge(&self, p: &str, q: &str) -> Result<bool, GraphError> {
        let m = Matrix::of(self);
        let (i, j) = edge_indices(self, &m, p, q)?;
        let before = m.closure();
        let after = m.without_edge(i, j).closure();
        Ok(before.iter().zip(&after).any(|(b, a)| b - a > EPSILON))
    }

    /// A vertex is a fuzzy cutvertex when deleting it lowers CONN between some
    /// pair of the remaining vertices by more than `EPSILON`.
    pub fn is_fuzzy_cutvertex(&self, v: &str) -> Result<bool, GraphError> {
        let m = Matrix::of(self);
        let k = m.index(v)?;
        Ok(cutvertex_at(&m, &m.closure(), k))
    }

    pub fn fuzzy_bridges(&self) -> Vec<(VertexId, VertexId)> {
        let m = Matrix::of(self);
        let before = m.closure();
        let pairs: Vec<(VertexId, VertexId)> =
            self.edges().map(|(p, q, _)| (p.clone(), q.clone())).collect();
        par::map_collect(pairs, |(p, q)| {
            let i = m.index(p.as_str()).expect("endpoint");
            let j = m.index(q.as_str()).expect("endpoint");
            let after = m.without_edge(i, j).closure();
            let bridge = before.iter().zip(&after).any(|(b, a)| b - a > EPSILON);
            (p, q, bridge)
        })
        .into_iter()
        .filter(|(_, _, b)| *b)
        .map(|(p, q, _)| (p, q))
        .collect()
    }

    pub fn fuzzy_cutvertices(&self) -> Vec<VertexId> {
        let m = Matrix::of(self);
        let before = m.closure();
        par::map_range(m.n(), |k| cutvertex_at(&m, &before, k))
            .into_iter()
            .zip(&m.ids)
            .filter(|(cut, _)| *cut)
            .map(|(_, id)| id.clone())
            .collect()
    }

    pub fn degree_report(&self, v: &str) -> Result<DegreeReport, GraphError> {
        let m = Matrix::of(self);
        let i = m.index(v)?;
        Ok(degree_at(&m, i))
    }

    pub fn degree_reports(&self) -> Vec<DegreeReport> {
        let m = Matrix::of(self);
        par::map_range(m.n(), |i| degree_at(&m, i))
    }

    /// Minimum degree over all vertices; `None` for the empty graph.
    pub fn min_degree(&self) -> Option<f64> {
        self.degree_reports().iter().map(|d| d.degree).reduce(f64::min)
    }

    /// Maximum degree over all vertices; `None` for the empty graph.
    pub fn max_degree(&self) -> Option<f64> {
        self.degree_reports().iter().map(|d| d.degree).reduce(f64::max)
    }

    /// Every pair of vertices is joined by a path of positive strength.
    /// Graphs with fewer than two vertices are connected.
    pub fn is_connected(&self) -> bool {
        let m = Matrix::of(self);
        let n = m.n();
        if n < 2 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if !seen[v] && m.mu[u * n + v] > 0.0 {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Connected components over edges of positive membership, each sorted,
    /// ordered by their smallest vertex.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let m = Matrix::of(self);
        let n = m.n();
        let mut label = vec![usize::MAX; n];
        let mut comps = Vec::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = vec![start];
            label[start] = id;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for v in 0..n {
                    if label[v] == usize::MAX && m.mu[u * n + v] > 0.0 {
                        label[v] = id;
                        members.push(v);
                        queue.push_back(v);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members.into_iter().map(|i| m.ids[i].clone()).collect());
        }
        comps
    }

    /// Every vertex pair is joined with `mu(pq) = min(sigma(p), sigma(q))`.
    pub fn is_complete_fuzzy(&self) -> bool {
        let m = Matrix::of(self);
        let n = m.n();
        (0..n).all(|i| {
            (i + 1..n).all(|j| {
                m.present[i * n + j]
                    && (m.mu[i * n + j] - m.sigma[i].min(m.sigma[j])).abs() <= EPSILON
            })
        })
    }

    /// Connected, with a spanning tree whose path between the ends of every
    /// other edge is strictly stronger than that edge.
    ///
    /// Such a tree, when it exists, is the unique maximum spanning tree, so
    /// the check builds one by Kruskal (ties broken by endpoint order) and
    /// tests the remaining edges against it.
    pub fn is_f_tree(&self) -> bool {
        if !self.is_connected() {
            return false;
        }
        let m = Matrix::of(self);
        let n = m.n();
        let tree = max_spanning_tree(&m);
        let mut in_tree = vec![false; n * n];
        for &(i, j) in &tree {
            in_tree[i * n + j] = true;
            in_tree[j * n + i] = true;
        }
        for i in 0..n {
            for j in i + 1..n {
                if m.present[i * n + j] && !in_tree[i * n + j] {
                    let through = tree_path_min(n, &tree, &m.mu, i, j);
                    if through <= m.mu[i * n + j] + EPSILON {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Connected and free of fuzzy cutvertices.
    pub fn is_f_block(&self) -> bool {
        self.is_connected() && self.fuzzy_cutvertices().is_empty()
    }
}

fn edge_indices(
    g: &FuzzyGraph,
    m: &Matrix,
    p: &str,
    q: &str,
) -> Result<(usize, usize), GraphError> {
    let (i, j) = (m.index(p)?, m.index(q)?);
    if g.mu(p, q).is_none() {
        return Err(GraphError::UnknownEdge(p.to_string(), q.to_string()));
    }
    Ok((i, j))
}

fn cutvertex_at(m: &Matrix, before: &[f64], k: usize) -> bool {
    let n = m.n();
    let mut reduced = m.clone();
    for t in 0..n {
        reduced.mu[k * n + t] = 0.0;
        reduced.mu[t * n + k] = 0.0;
    }
    let after = reduced.closure();
    (0..n)
        .filter(|&i| i != k)
        .any(|i| (0..n).filter(|&j| j != k && j != i).any(|j| before[i * n + j] - after[i * n + j] > EPSILON))
}

fn degree_at(m: &Matrix, i: usize) -> DegreeReport {
    let n = m.n();
    let mut degree = 0.0;
    let mut strong_degree = 0.0;
    let mut strong_neighbors = BTreeSet::new();
    for j in 0..n {
        if j == i || !m.present[i * n + j] {
            continue;
        }
        let mu = m.mu[i * n + j];
        degree += mu;
        if m.classify(i, j).is_strong() {
            strong_degree += mu;
            strong_neighbors.insert(m.ids[j].clone());
        }
    }
    DegreeReport {
        vertex: m.ids[i].clone(),
        degree,
        strong_degree,
        strong_neighbors,
    }
}

fn max_spanning_tree(m: &Matrix) -> Vec<(usize, usize)> {
    let n = m.n();
    let mut edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| m.mu[i * n + j] > 0.0)
        .collect();
    // ids are sorted, so index order is lexicographic endpoint order
    edges.sort_by(|a, b| {
        m.mu[b.0 * n + b.1]
            .total_cmp(&m.mu[a.0 * n + a.1])
            .then(a.cmp(b))
    });
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    for (i, j) in edges {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
            tree.push((i, j));
        }
    }
    tree
}

fn tree_path_min(n: usize, tree: &[(usize, usize)], mu: &[f64], from: usize, to: usize) -> f64 {
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in tree {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut best = vec![f64::NAN; n];
    best[from] = f64::INFINITY;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if best[v].is_nan() {
                best[v] = best[u].min(mu[u * n + v]);
                queue.push_back(v);
            }
        }
    }
    if best[to].is_nan() {
        0.0
    } else {
        best[to]
    }
}

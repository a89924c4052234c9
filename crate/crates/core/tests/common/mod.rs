//! Brute-force reference implementations. Everything here enumerates paths
//! or edge subsets directly and compares floats exactly, so it shares no
//! code with the library's closure or spanning-tree routines.

#![allow(dead_code)]

use fuzzpool::graph::{EdgeClass, FuzzyGraph};

/// Dense copy of a graph: vertex names in canonical order and an adjacency
/// matrix with 0 for absent edges.
pub struct Dense {
    pub names: Vec<String>,
    pub mu: Vec<Vec<f64>>,
}

impl Dense {
    pub fn of(g: &FuzzyGraph) -> Self {
        let names: Vec<String> = g.vertices().map(|(v, _)| v.as_str().to_string()).collect();
        let n = names.len();
        let mut mu = vec![vec![0.0; n]; n];
        for (p, q, m) in g.edges() {
            let i = names.iter().position(|x| x == p.as_str()).unwrap();
            let j = names.iter().position(|x| x == q.as_str()).unwrap();
            mu[i][j] = m;
            mu[j][i] = m;
        }
        Dense { names, mu }
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn index(&self, name: &str) -> usize {
        self.names.iter().position(|x| x == name).unwrap()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.mu[i][j] > 0.0 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn without_edge(&self, i: usize, j: usize) -> Dense {
        let mut mu = self.mu.clone();
        mu[i][j] = 0.0;
        mu[j][i] = 0.0;
        Dense {
            names: self.names.clone(),
            mu,
        }
    }

    /// Zeroes every edge at `k`, which leaves CONN between the other
    /// vertices equal to CONN in the vertex-deleted graph.
    pub fn isolate(&self, k: usize) -> Dense {
        let mut mu = self.mu.clone();
        for x in 0..self.n() {
            mu[k][x] = 0.0;
            mu[x][k] = 0.0;
        }
        Dense {
            names: self.names.clone(),
            mu,
        }
    }
}

/// CONN for every pair by walking every simple path from every source.
/// Unreachable pairs and the diagonal are 0.
pub fn all_pairs_conn(d: &Dense) -> Vec<Vec<f64>> {
    let n = d.n();
    let mut best = vec![vec![0.0f64; n]; n];
    let mut on_path = vec![false; n];
    for src in 0..n {
        on_path[src] = true;
        walk(d, src, src, f64::INFINITY, &mut on_path, &mut best);
        on_path[src] = false;
    }
    best
}

fn walk(d: &Dense, src: usize, at: usize, strength: f64, on_path: &mut [bool], best: &mut [Vec<f64>]) {
    for next in 0..d.n() {
        let m = d.mu[at][next];
        if m <= 0.0 || on_path[next] {
            continue;
        }
        let s = strength.min(m);
        if s > best[src][next] {
            best[src][next] = s;
        }
        on_path[next] = true;
        walk(d, src, next, s, on_path, best);
        on_path[next] = false;
    }
}

pub fn class_oracle(d: &Dense, i: usize, j: usize) -> EdgeClass {
    let detour = all_pairs_conn(&d.without_edge(i, j))[i][j];
    let mu = d.mu[i][j];
    if mu > detour {
        EdgeClass::Alpha
    } else if mu == detour {
        EdgeClass::Beta
    } else {
        EdgeClass::Delta
    }
}

pub fn bridge_oracle(d: &Dense, i: usize, j: usize) -> bool {
    let before = all_pairs_conn(d);
    let after = all_pairs_conn(&d.without_edge(i, j));
    lowers_some_pair(&before, &after, None)
}

pub fn cutvertex_oracle(d: &Dense, k: usize) -> bool {
    let before = all_pairs_conn(d);
    let after = all_pairs_conn(&d.isolate(k));
    lowers_some_pair(&before, &after, Some(k))
}

fn lowers_some_pair(before: &[Vec<f64>], after: &[Vec<f64>], skip: Option<usize>) -> bool {
    let n = before.len();
    (0..n).filter(|&x| Some(x) != skip).any(|x| {
        (0..n)
            .filter(|&y| y != x && Some(y) != skip)
            .any(|y| after[x][y] < before[x][y])
    })
}

/// Tries every (n-1)-subset of the edges that forms a spanning tree and
/// accepts the graph if one of them is strictly stronger than every edge left
/// out, measured along the tree.
pub fn f_tree_oracle(d: &Dense) -> bool {
    let n = d.n();
    if n <= 1 {
        return true;
    }
    let edges = d.edges();
    if edges.len() < n - 1 {
        return false;
    }
    let mut chosen = Vec::with_capacity(n - 1);
    subsets(&edges, 0, n - 1, &mut chosen, &mut |tree| {
        let mut t = Dense {
            names: d.names.clone(),
            mu: vec![vec![0.0; n]; n],
        };
        for &(i, j) in tree {
            t.mu[i][j] = d.mu[i][j];
            t.mu[j][i] = d.mu[i][j];
        }
        let conn = all_pairs_conn(&t);
        let spanning = (1..n).all(|v| conn[0][v] > 0.0);
        spanning
            && edges
                .iter()
                .filter(|e| !tree.contains(e))
                .all(|&(i, j)| d.mu[i][j] < conn[i][j])
    })
}

type Edge = (usize, usize);

fn subsets(
    items: &[Edge],
    from: usize,
    left: usize,
    chosen: &mut Vec<Edge>,
    accept: &mut dyn FnMut(&[Edge]) -> bool,
) -> bool {
    if left == 0 {
        return accept(chosen);
    }
    for k in from..items.len() {
        if items.len() - k < left {
            break;
        }
        chosen.push(items[k]);
        let found = subsets(items, k + 1, left - 1, chosen, accept);
        chosen.pop();
        if found {
            return true;
        }
    }
    false
}

/// `mu(pq) <= sigma(p) ∧ sigma(q)` on every edge, checked directly.
pub fn memberships_bounded(g: &FuzzyGraph) -> bool {
    g.edges().all(|(p, q, m)| {
        let bound = g.sigma(p.as_str()).unwrap().min(g.sigma(q.as_str()).unwrap());
        m > 0.0 && m <= bound
    }) && g.vertices().all(|(_, s)| s > 0.0 && s <= 1.0)
}

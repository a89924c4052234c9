use crate::graph::{FuzzyGraph, EPSILON};

use super::PoolError;

/// Exhaustive search is refused above this many vertices.
pub const MAX_ISO_VERTICES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsoMode {
    /// Adjacency only (edges of positive membership).
    Support,
    /// Adjacency plus `sigma` and `mu` equal within [`EPSILON`].
    Fuzzy,
}

struct Dense {
    n: usize,
    sigma: Vec<f64>,
    mu: Vec<f64>,
    degree: Vec<usize>,
}

impl Dense {
    fn of(g: &FuzzyGraph) -> Self {
        let ids = g.vertex_ids();
        let n = ids.len();
        let sigma = g.vertices().map(|(_, s)| s).collect();
        let mut mu = vec![0.0; n * n];
        let index = |v: &str| ids.iter().position(|x| x.as_str() == v).expect("own vertex");
        for (a, b, m) in g.edges() {
            let (i, j) = (index(a.as_str()), index(b.as_str()));
            mu[i * n + j] = m;
            mu[j * n + i] = m;
        }
        let degree = (0..n)
            .map(|i| (0..n).filter(|&j| mu[i * n + j] > 0.0).count())
            .collect();
        Dense { n, sigma, mu, degree }
    }

    fn adjacent(&self, i: usize, j: usize) -> bool {
        self.mu[i * self.n + j] > 0.0
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= EPSILON
}

/// Exhaustive bijection search; both graphs must have at most
/// [`MAX_ISO_VERTICES`] vertices.
pub fn graphs_isomorphic(g1: &FuzzyGraph, g2: &FuzzyGraph, mode: IsoMode) -> Result<bool, PoolError> {
    for g in [g1, g2] {
        if g.vertex_count() > MAX_ISO_VERTICES {
            return Err(PoolError::TooLarge(g.vertex_count()));
        }
    }
    if g1.vertex_count() != g2.vertex_count() {
        return Ok(false);
    }
    let (a, b) = (Dense::of(g1), Dense::of(g2));
    let support_edges = |d: &Dense| d.degree.iter().sum::<usize>();
    if support_edges(&a) != support_edges(&b) {
        return Ok(false);
    }
    let mut map = vec![usize::MAX; a.n];
    let mut used = vec![false; b.n];
    Ok(extend(&a, &b, mode, 0, &mut map, &mut used))
}

fn extend(a: &Dense, b: &Dense, mode: IsoMode, i: usize, map: &mut [usize], used: &mut [bool]) -> bool {
    if i == a.n {
        return true;
    }
    for j in 0..b.n {
        if used[j] || a.degree[i] != b.degree[j] {
            continue;
        }
        if mode == IsoMode::Fuzzy && !close(a.sigma[i], b.sigma[j]) {
            continue;
        }
        let consistent = (0..i).all(|k| {
            let m = map[k];
            match mode {
                IsoMode::Support => a.adjacent(i, k) == b.adjacent(j, m),
                IsoMode::Fuzzy => close(a.mu[i * a.n + k], b.mu[j * b.n + m]),
            }
        });
        if !consistent {
            continue;
        }
        map[i] = j;
        used[j] = true;
        if extend(a, b, mode, i + 1, map, used) {
            return true;
        }
        used[j] = false;
    }
    map[i] = usize::MAX;
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_isomorphic() {
        let g = FuzzyGraph::from_parts(
            &[("a", 1.0), ("b", 0.8), ("c", 0.6)],
            &[("a", "b", 0.5), ("b", "c", 0.6)],
        )
        .unwrap();
        for mode in [IsoMode::Support, IsoMode::Fuzzy] {
            assert!(graphs_isomorphic(&g, &g, mode).unwrap());
        }
    }

    #[test]
    fn relabelled_triangle() {
        let g1 = FuzzyGraph::from_parts(
            &[("a", 1.0), ("b", 1.0), ("c", 1.0)],
            &[("a", "b", 0.5), ("b", "c", 0.7), ("c", "a", 0.9)],
        )
        .unwrap();
        let g2 = FuzzyGraph::from_parts(
            &[("x", 1.0), ("y", 1.0), ("z", 1.0)],
            &[("x", "y", 0.9), ("y", "z", 0.5), ("z", "x", 0.7)],
        )
        .unwrap();
        assert!(graphs_isomorphic(&g1, &g2, IsoMode::Fuzzy).unwrap());
    }

    #[test]
    fn sigma_mismatch_is_support_only() {
        let g1 = FuzzyGraph::from_parts(&[("a", 1.0), ("b", 0.5)], &[("a", "b", 0.5)]).unwrap();
        let g2 = FuzzyGraph::from_parts(&[("a", 0.9), ("b", 0.5)], &[("a", "b", 0.5)]).unwrap();
        assert!(graphs_isomorphic(&g1, &g2, IsoMode::Support).unwrap());
        assert!(!graphs_isomorphic(&g1, &g2, IsoMode::Fuzzy).unwrap());
    }

    #[test]
    fn path_is_not_star() {
        let verts = [("a", 1.0), ("b", 1.0), ("c", 1.0), ("d", 1.0)];
        let path = FuzzyGraph::from_parts(&verts, &[("a", "b", 1.0), ("b", "c", 1.0), ("c", "d", 1.0)]).unwrap();
        let star = FuzzyGraph::from_parts(&verts, &[("a", "b", 1.0), ("a", "c", 1.0), ("a", "d", 1.0)]).unwrap();
        assert!(!graphs_isomorphic(&path, &star, IsoMode::Support).unwrap());
    }

    #[test]
    fn too_large_is_refused() {
        let names: Vec<String> = (0..11).map(|i| format!("v{i}")).collect();
        let verts: Vec<(&str, f64)> = names.iter().map(|n| (n.as_str(), 1.0)).collect();
        let g = FuzzyGraph::from_parts(&verts, &[]).unwrap();
        assert_eq!(graphs_isomorphic(&g, &g, IsoMode::Support), Err(PoolError::TooLarge(11)));
    }
}

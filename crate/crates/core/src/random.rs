//! Seeded generators for property suites and audits.
//!
//! Vertex ids are `v0, v1, ...`. Memberships come either from the grid
//! `{0.1, 0.2, ..., 1.0}`, which makes ties (and so beta edges and shared
//! weakest edges) common, or from a continuous draw in `(0, 1]`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::FuzzyGraph;

/// Independent stream for case `case` of a run seeded with `seed`.
pub fn case_rng(seed: u64, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case);
    rng
}

pub fn vertex_name(i: usize) -> String {
    format!("v{i}")
}

fn membership(rng: &mut impl Rng, grid: bool) -> f64 {
    if grid {
        f64::from(rng.gen_range(1..=10u8)) / 10.0
    } else {
        1.0 - rng.gen::<f64>()
    }
}

/// A membership in `(0, bound]`; on the grid it is snapped down and may
/// equal `bound`.
fn membership_below(rng: &mut impl Rng, bound: f64, grid: bool) -> f64 {
    if grid {
        let steps = (bound * 10.0 + 1e-9).floor() as u8;
        if steps == 0 {
            bound
        } else {
            f64::from(rng.gen_range(1..=steps)) / 10.0
        }
    } else if rng.gen_bool(0.2) {
        bound
    } else {
        bound * (1.0 - rng.gen::<f64>())
    }
}

fn build(sigma: &[f64], edges: &[(usize, usize, f64)]) -> FuzzyGraph {
    let names: Vec<String> = (0..sigma.len()).map(vertex_name).collect();
    let vertices: Vec<(&str, f64)> = names.iter().map(String::as_str).zip(sigma.iter().copied()).collect();
    let edges: Vec<(&str, &str, f64)> = edges
        .iter()
        .map(|&(a, b, m)| (names[a].as_str(), names[b].as_str(), m))
        .collect();
    FuzzyGraph::from_parts(&vertices, &edges).expect("generated graphs are well formed")
}

/// Each pair is joined with probability `density`; memberships are grid or
/// continuous (chosen per graph).
pub fn random_graph(rng: &mut impl Rng, n: usize, density: f64) -> FuzzyGraph {
    let grid = rng.gen_bool(0.5);
    let sigma: Vec<f64> = (0..n).map(|_| membership(rng, grid)).collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                edges.push((a, b, membership_below(rng, sigma[a].min(sigma[b]), grid)));
            }
        }
    }
    build(&sigma, &edges)
}

/// Like [`random_graph`] with `n` drawn from `min_n..=max_n` and the density
/// from `[0.3, 0.9]`.
pub fn random_small_graph(rng: &mut impl Rng, min_n: usize, max_n: usize) -> FuzzyGraph {
    let n = rng.gen_range(min_n..=max_n);
    let density = rng.gen_range(0.3..0.9);
    random_graph(rng, n, density)
}

/// Complete fuzzy graph: every pair joined with `sigma(p) ∧ sigma(q)`.
pub fn random_cfg(rng: &mut impl Rng, n: usize) -> FuzzyGraph {
    let grid = rng.gen_bool(0.5);
    let sigma: Vec<f64> = (0..n).map(|_| membership(rng, grid)).collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            edges.push((a, b, sigma[a].min(sigma[b])));
        }
    }
    build(&sigma, &edges)
}

/// Each vertex gets the largest membership among its incident edges.
fn tight_sigma(n: usize, edges: &[(usize, usize, f64)]) -> Vec<f64> {
    let mut sigma = vec![0.0f64; n];
    for &(a, b, m) in edges {
        sigma[a] = sigma[a].max(m);
        sigma[b] = sigma[b].max(m);
    }
    sigma
}

/// A standalone cycle `v0 - v1 - ... - v(len-1) - v0` with its edge
/// memberships in cycle order (edge `k` joins `vk` and `v(k+1)`).
#[derive(Debug, Clone)]
pub struct CycleCase {
    pub graph: FuzzyGraph,
    pub order: Vec<String>,
    pub mu: Vec<f64>,
}

impl CycleCase {
    /// Minimum edge membership.
    pub fn strength(&self) -> f64 {
        self.mu.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn new(mu: Vec<f64>, sigma: Vec<f64>) -> Self {
        let len = mu.len();
        let edges: Vec<(usize, usize, f64)> = (0..len).map(|k| (k, (k + 1) % len, mu[k])).collect();
        CycleCase {
            graph: build(&sigma, &edges),
            order: (0..len).map(vertex_name).collect(),
            mu,
        }
    }
}

/// Cycle whose weakest edges form a run of at least two consecutive edges
/// starting at a random position; vertex memberships are tight, so the
/// vertex inside the run has membership equal to the cycle strength.
pub fn weakest_run_cycle(rng: &mut impl Rng, len: usize) -> CycleCase {
    let grid = rng.gen_bool(0.5);
    let phi = if grid {
        f64::from(rng.gen_range(1..=9u8)) / 10.0
    } else {
        rng.gen_range(0.05..0.95)
    };
    let run = rng.gen_range(2..=len);
    let start = rng.gen_range(0..len);
    let mut mu = vec![0.0; len];
    for k in 0..len {
        let offset = (k + len - start) % len;
        mu[k] = if offset < run {
            phi
        } else if grid {
            f64::from(rng.gen_range((phi * 10.0).round() as u8 + 1..=10)) / 10.0
        } else {
            rng.gen_range(phi..1.0).max(phi + 1e-6)
        };
    }
    let edges: Vec<(usize, usize, f64)> = (0..len).map(|k| (k, (k + 1) % len, mu[k])).collect();
    let sigma = tight_sigma(len, &edges);
    CycleCase::new(mu, sigma)
}

/// Cycle with unconstrained edge and vertex memberships.
pub fn random_cycle(rng: &mut impl Rng, len: usize) -> CycleCase {
    let grid = rng.gen_bool(0.5);
    let sigma: Vec<f64> = (0..len).map(|_| membership(rng, grid)).collect();
    let mu = (0..len)
        .map(|k| membership_below(rng, sigma[k].min(sigma[(k + 1) % len]), grid))
        .collect();
    CycleCase::new(mu, sigma)
}

/// A random spanning tree plus extra edges, each strictly weaker than the
/// tree path between its endpoints, so the result is an f-tree.
pub fn random_f_tree(rng: &mut impl Rng, n: usize) -> FuzzyGraph {
    let grid = rng.gen_bool(0.5);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut tree = Vec::new();
    for k in 1..n {
        let parent = order[rng.gen_range(0..k)];
        let child = order[k];
        let mu = if grid {
            f64::from(rng.gen_range(2..=10u8)) / 10.0
        } else {
            rng.gen_range(0.1..1.0)
        };
        tree.push((parent.min(child), parent.max(child), mu));
    }
    // path strength over the tree, by repeated relaxation
    let mut strength = vec![0.0f64; n * n];
    for &(a, b, m) in &tree {
        strength[a * n + b] = m;
        strength[b * n + a] = m;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = strength[i * n + k].min(strength[k * n + j]);
                if i != j && via > strength[i * n + j] {
                    strength[i * n + j] = via;
                }
            }
        }
    }
    let mut edges = tree.clone();
    for a in 0..n {
        for b in a + 1..n {
            if tree.iter().any(|&(x, y, _)| (x, y) == (a, b)) || !rng.gen_bool(0.3) {
                continue;
            }
            let cap = strength[a * n + b];
            let mu = if grid {
                let steps = ((cap * 10.0).round() as u8).saturating_sub(1);
                if steps == 0 {
                    continue;
                }
                f64::from(rng.gen_range(1..=steps)) / 10.0
            } else {
                cap * rng.gen_range(0.1..0.9)
            };
            edges.push((a, b, mu));
        }
    }
    let mut sigma = tight_sigma(n, &edges);
    for s in &mut sigma {
        if rng.gen_bool(0.3) {
            *s = membership(rng, grid).max(*s);
        }
    }
    build(&sigma, &edges)
}

/// A cycle on `v0..v(len-1)` with `pendants` extra vertices, each hung off a
/// random earlier vertex by a single edge.
pub fn cycle_with_pendants(rng: &mut impl Rng, len: usize, pendants: usize) -> FuzzyGraph {
    let grid = rng.gen_bool(0.5);
    let n = len + pendants;
    let mut edges: Vec<(usize, usize, f64)> = (0..len)
        .map(|k| (k.min((k + 1) % len), k.max((k + 1) % len), membership(rng, grid)))
        .collect();
    for p in len..n {
        let anchor = rng.gen_range(0..p);
        edges.push((anchor, p, membership(rng, grid)));
    }
    let sigma = tight_sigma(n, &edges);
    build(&sigma, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = case_rng(9, 3).gen();
        let b: u64 = case_rng(9, 3).gen();
        let c: u64 = case_rng(9, 4).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn generators_yield_expected_shapes() {
        for case in 0..200 {
            let mut rng = case_rng(1, case);
            let g = random_small_graph(&mut rng, 2, 8);
            assert!(g.is_well_formed());
            assert!(random_cfg(&mut rng, 5).is_complete_fuzzy());
            let n = rng.gen_range(2..=7);
            let t = random_f_tree(&mut rng, n);
            assert!(t.is_f_tree(), "{t:?}");
            let len = rng.gen_range(4..=8);
            let c = weakest_run_cycle(&mut rng, len);
            let min_sigma = c.graph.vertices().map(|(_, s)| s).fold(1.0, f64::min);
            assert_eq!(min_sigma, c.strength());
            assert!(random_cycle(&mut rng, len).graph.is_well_formed());
            let g = cycle_with_pendants(&mut rng, len, 2);
            assert_eq!(g.edge_count(), len + 2);
        }
    }
}

//! Seeded instance generators.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, Vertex};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi graph `G(n, p)`.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Random `k`-tree on `n` vertices: a `(k+1)`-clique grown by vertices
/// attached to uniformly chosen `k`-cliques. Vertex labels are shuffled.
pub fn k_tree(rng: &mut impl Rng, n: usize, k: usize) -> Graph {
    partial_k_tree(rng, n, k, 1.0)
}

/// Spanning connected subgraph of a random `k`-tree: every edge from a new
/// vertex to its attachment clique is kept with probability `keep`, except
/// one that keeps the graph connected.
pub fn partial_k_tree(rng: &mut impl Rng, n: usize, k: usize, keep: f64) -> Graph {
    let base = n.min(k + 1);
    let mut edges = Vec::new();
    for a in 0..base {
        for b in a + 1..base {
            if b == a + 1 || rng.gen_bool(keep) {
                edges.push((a, b));
            }
        }
    }
    let mut cliques: Vec<Vec<Vertex>> = Vec::new();
    if base == k + 1 {
        for skip in 0..base {
            cliques.push((0..base).filter(|&x| x != skip).collect());
        }
    }
    for v in base..n {
        let c = cliques[rng.gen_range(0..cliques.len())].clone();
        let anchor = rng.gen_range(0..c.len().max(1));
        for (i, &u) in c.iter().enumerate() {
            if i == anchor || rng.gen_bool(keep) {
                edges.push((u, v));
            }
        }
        for skip in 0..c.len() {
            let mut nc: Vec<Vertex> = c.iter().copied().filter(|&x| x != c[skip]).collect();
            nc.push(v);
            cliques.push(nc);
        }
    }
    let mut perm: Vec<Vertex> = (0..n).collect();
    perm.shuffle(rng);
    Graph::from_edges(n, edges.into_iter().map(|(a, b)| (perm[a], perm[b])))
}

fn pair_index(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn rec(p: &mut Vec<usize>, i: usize, out: &mut Vec<Vec<usize>>) {
        if i == p.len() {
            out.push(p.clone());
            return;
        }
        for j in i..p.len() {
            p.swap(i, j);
            rec(p, i + 1, out);
            p.swap(i, j);
        }
    }
    rec(&mut p, 0, &mut out);
    out
}

fn canonical_code(adj: &[u32], perms: &[Vec<usize>], pairs: &[(usize, usize)]) -> u64 {
    perms
        .iter()
        .map(|p| {
            pairs
                .iter()
                .enumerate()
                .fold(0u64, |code, (bit, &(a, b))| code | (u64::from(adj[p[a]] >> p[b] & 1) << bit))
        })
        .min()
        .unwrap()
}

/// One representative of every isomorphism class of connected graphs on
/// `n` vertices (`n ≤ 8`).
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!(n <= 8, "exhaustive generation supports n <= 8");
    if n == 0 {
        return Vec::new();
    }
    // Every connected graph has a vertex whose removal keeps it connected.
    let mut level: Vec<Vec<u32>> = vec![vec![0]];
    for m in 2..=n {
        let perms = permutations(m);
        let pairs = pair_index(m);
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for g in &level {
            for nb in 1u32..(1 << (m - 1)) {
                let mut adj = g.clone();
                adj.push(nb);
                for (u, row) in adj.iter_mut().enumerate().take(m - 1) {
                    if nb >> u & 1 == 1 {
                        *row |= 1 << (m - 1);
                    }
                }
                if seen.insert(canonical_code(&adj, &perms, &pairs)) {
                    next.push(adj);
                }
            }
        }
        level = next;
    }
    level
        .into_iter()
        .map(|adj| {
            let edges = pair_index(n).into_iter().filter(|&(a, b)| adj[a] >> b & 1 == 1);
            Graph::from_edges(n, edges)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_treewidth;

    #[test]
    fn connected_graph_counts() {
        let counts: Vec<usize> = (1..=6).map(|n| connected_graphs(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21, 112]);
        assert!(connected_graphs(5).iter().all(Graph::is_connected));
    }

    #[test]
    fn partial_k_trees_have_bounded_width() {
        let mut r = rng(5);
        for k in 1..=3 {
            for _ in 0..10 {
                let g = partial_k_tree(&mut r, 12, k, 0.6);
                assert!(g.is_connected());
                assert!(g.m() <= k * g.n());
                assert!(oracle_treewidth(&g).unwrap() <= k);
            }
            let g = k_tree(&mut r, 10, k);
            assert_eq!(oracle_treewidth(&g).unwrap(), k);
        }
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let a = partial_k_tree(&mut rng(9), 50, 2, 0.5);
        let b = partial_k_tree(&mut rng(9), 50, 2, 0.5);
        assert_eq!(a.to_gr(), b.to_gr());
    }
}

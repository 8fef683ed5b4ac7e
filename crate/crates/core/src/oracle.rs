//! Exponential ground-truth engines for differential testing.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::treedec::TreeDecomposition;

pub const SUBSET_DP_MAX_N: usize = 20;
pub const PERMUTATION_MAX_N: usize = 9;
pub const ENUMERATION_MAX_N: usize = 5;
pub const ENUMERATION_MAX_NODES: usize = 5;

fn masks(g: &Graph) -> Vec<u32> {
    (0..g.n())
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect()
}

/// Vertices outside `s ∪ {v}` reachable from `v` through vertices of `s`.
fn q_set(adj: &[u32], s: u32, v: usize) -> u32 {
    let mut comp = 1u32 << v;
    let mut frontier = comp;
    while frontier != 0 {
        let mut next = 0;
        let mut f = frontier;
        while f != 0 {
            let u = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= adj[u] & s;
        }
        frontier = next & !comp;
        comp |= frontier;
    }
    let mut out = 0;
    let mut c = comp;
    while c != 0 {
        let u = c.trailing_zeros() as usize;
        c &= c - 1;
        out |= adj[u];
    }
    out & !comp & !s
}

fn prefix_table(g: &Graph) -> Result<(Vec<u32>, Vec<u8>)> {
    let n = g.n();
    if n > SUBSET_DP_MAX_N {
        return Err(Error::Refused(format!("subset oracle supports n <= {SUBSET_DP_MAX_N}, got {n}")));
    }
    let adj = masks(g);
    let full = (1usize << n) - 1;
    let mut tw = vec![u8::MAX; 1 << n];
    tw[0] = 0;
    for s in 1..=full {
        let mut best = u8::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            let q = q_set(&adj, prev as u32, v).count_ones() as u8;
            best = best.min(tw[prev].max(q));
        }
        tw[s] = best;
    }
    Ok((adj, tw))
}

/// Exact treewidth by dynamic programming over elimination prefixes:
/// `TW(S) = min_{v ∈ S} max(TW(S \ v), |Q(S \ v, v)|)`.
pub fn oracle_treewidth(g: &Graph) -> Result<usize> {
    if g.n() == 0 {
        return Ok(0);
    }
    let (_, tw) = prefix_table(g)?;
    Ok(tw[tw.len() - 1] as usize)
}

/// Exact treewidth together with a decomposition of that width, from an
/// elimination order read back out of the prefix table.
pub fn oracle_decomposition(g: &Graph) -> Result<(usize, TreeDecomposition)> {
    if g.n() == 0 {
        return Ok((0, TreeDecomposition::single_bag(Vec::new())));
    }
    let (adj, tw) = prefix_table(g)?;
    let mut s = tw.len() - 1;
    let width = tw[s];
    let mut order = Vec::with_capacity(g.n());
    while s != 0 {
        let v = (0..g.n())
            .filter(|&v| s >> v & 1 == 1)
            .find(|&v| {
                let prev = s & !(1 << v);
                tw[prev].max(q_set(&adj, prev as u32, v).count_ones() as u8) <= width
            })
            .expect("prefix table is consistent");
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    Ok((width as usize, TreeDecomposition::from_elimination_order(g, &order)))
}

/// Exact treewidth by trying every elimination order.
pub fn permutation_treewidth(g: &Graph) -> Result<usize> {
    let n = g.n();
    if n > PERMUTATION_MAX_N {
        return Err(Error::Refused(format!("permutation oracle supports n <= {PERMUTATION_MAX_N}, got {n}")));
    }
    fn rec(adj: &mut Vec<u32>, alive: u32, bound: usize, best: &mut usize) {
        if alive == 0 {
            *best = (*best).min(bound);
            return;
        }
        let mut rest = alive;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let nb = adj[v] & alive & !(1 << v);
            let w = bound.max(nb.count_ones() as usize);
            if w >= *best {
                continue;
            }
            let saved = adj.clone();
            let mut f = nb;
            while f != 0 {
                let u = f.trailing_zeros() as usize;
                f &= f - 1;
                adj[u] |= nb & !(1 << u);
            }
            rec(adj, alive & !(1 << v), w, best);
            *adj = saved;
        }
    }
    if n == 0 {
        return Ok(0);
    }
    let mut adj = masks(g);
    let mut best = n;
    rec(&mut adj, ((1u64 << n) - 1) as u32, 0, &mut best);
    Ok(best)
}

/// Edge lists of pairwise non-isomorphic trees on `m` nodes.
pub fn unlabeled_trees(m: usize) -> Vec<Vec<(usize, usize)>> {
    if m <= 1 {
        return vec![Vec::new()];
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    // Prüfer sequences cover every labeled tree.
    let count = m.pow(m as u32 - 2);
    for code in 0..count {
        let mut seq = Vec::with_capacity(m - 2);
        let mut c = code;
        for _ in 0..m - 2 {
            seq.push(c % m);
            c /= m;
        }
        let edges = prufer_decode(&seq, m);
        let key = tree_shape(&edges, m);
        if seen.insert(key) {
            out.push(edges);
        }
    }
    out
}

fn prufer_decode(seq: &[usize], m: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1; m];
    for &x in seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(m - 1);
    for &x in seq {
        let leaf = (0..m).find(|&i| degree[i] == 1).unwrap();
        edges.push((leaf, x));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..m).filter(|&i| degree[i] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

fn tree_shape(edges: &[(usize, usize)], m: usize) -> String {
    let mut adj = vec![Vec::new(); m];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    fn enc(adj: &[Vec<usize>], t: usize, p: usize) -> String {
        let mut kids: Vec<String> = adj[t].iter().filter(|&&s| s != p).map(|&s| enc(adj, s, t)).collect();
        kids.sort();
        format!("({})", kids.concat())
    }
    (0..m).map(|r| enc(&adj, r, usize::MAX)).min().unwrap()
}

/// Every valid tree decomposition of `g` with at most `max_nodes` nodes and
/// width at most `max_width`, one per labeled tree shape and bag assignment.
pub fn enumerate_all_tds(g: &Graph, max_nodes: usize, max_width: usize) -> Result<Vec<TreeDecomposition>> {
    let n = g.n();
    let mut out = Vec::new();
    for_each_td(g, max_nodes, max_width, |_, bags, edges| {
        let bag_lists = bags.iter().map(|&b| (0..n).filter(|&v| b >> v & 1 == 1).collect()).collect();
        out.push(TreeDecomposition::new(bag_lists, edges.to_vec()));
    })?;
    Ok(out)
}

/// Visits the decompositions of [`enumerate_all_tds`] as bag bitmasks, with
/// the index of the tree shape and its edges.
pub fn for_each_td(
    g: &Graph,
    max_nodes: usize,
    max_width: usize,
    mut visit: impl FnMut(usize, &[u32], &[(usize, usize)]),
) -> Result<()> {
    let n = g.n();
    if n > ENUMERATION_MAX_N || max_nodes > ENUMERATION_MAX_NODES {
        return Err(Error::Refused(format!(
            "decomposition enumeration supports n <= {ENUMERATION_MAX_N} and at most {ENUMERATION_MAX_NODES} nodes"
        )));
    }
    let subsets: Vec<u32> = (0..1u32 << n)
        .filter(|s| s.count_ones() as usize <= max_width + 1)
        .collect();
    let graph_edges: Vec<(usize, usize)> = g.edges().collect();
    let mut shape = 0;
    for m in 1..=max_nodes {
        for edges in unlabeled_trees(m) {
            // BFS order so that each node's parent is assigned first.
            let mut adj = vec![Vec::new(); m];
            for &(a, b) in &edges {
                adj[a].push(b);
                adj[b].push(a);
            }
            let mut order = vec![0];
            let mut parent = vec![usize::MAX; m];
            let mut i = 0;
            while i < order.len() {
                let t = order[i];
                for &s in &adj[t] {
                    if s != 0 && parent[s] == usize::MAX {
                        parent[s] = t;
                        order.push(s);
                    }
                }
                i += 1;
            }
            let mut bags = vec![0u32; m];
            let mut ctx = Assign { n, graph_edges: &graph_edges, subsets: &subsets, order: &order, parent: &parent, edges: &edges, shape };
            ctx.run(0, 0, &mut bags, &mut visit);
            shape += 1;
        }
    }
    Ok(())
}

struct Assign<'a> {
    n: usize,
    graph_edges: &'a [(usize, usize)],
    subsets: &'a [u32],
    order: &'a [usize],
    parent: &'a [usize],
    edges: &'a [(usize, usize)],
    shape: usize,
}

impl Assign<'_> {
    fn run(&mut self, depth: usize, used: u32, bags: &mut [u32], visit: &mut impl FnMut(usize, &[u32], &[(usize, usize)])) {
        if depth == self.order.len() {
            if used.count_ones() as usize != self.n {
                return;
            }
            let covered = self
                .graph_edges
                .iter()
                .all(|&(u, v)| bags.iter().any(|b| b >> u & 1 == 1 && b >> v & 1 == 1));
            if covered {
                visit(self.shape, bags, self.edges);
            }
            return;
        }
        let t = self.order[depth];
        for &s in self.subsets {
            if depth > 0 {
                // A vertex missing from the parent must be new to the tree.
                let p = bags[self.parent[t]];
                if s & !p & used != 0 {
                    continue;
                }
            }
            bags[t] = s;
            self.run(depth + 1, used | s, bags, visit);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(m: usize) -> Graph {
        Graph::from_edges(m, (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))))
    }

    fn cycle(m: usize) -> Graph {
        Graph::from_edges(m, (0..m).map(|i| (i, (i + 1) % m)))
    }

    fn grid(r: usize, c: usize) -> Graph {
        let id = |i: usize, j: usize| i * c + j;
        let mut e = Vec::new();
        for i in 0..r {
            for j in 0..c {
                if i + 1 < r {
                    e.push((id(i, j), id(i + 1, j)));
                }
                if j + 1 < c {
                    e.push((id(i, j), id(i, j + 1)));
                }
            }
        }
        Graph::from_edges(r * c, e)
    }

    #[test]
    fn known_values() {
        for m in 1..=8 {
            assert_eq!(oracle_treewidth(&complete(m)).unwrap(), m - 1);
        }
        for m in 4..=10 {
            assert_eq!(oracle_treewidth(&cycle(m)).unwrap(), 2);
        }
        assert_eq!(oracle_treewidth(&grid(3, 3)).unwrap(), 3);
        assert_eq!(permutation_treewidth(&grid(3, 3)).unwrap(), 3);
        assert_eq!(oracle_treewidth(&Graph::new(4)).unwrap(), 0);
    }

    #[test]
    fn decomposition_has_oracle_width() {
        for g in [complete(5), cycle(7), grid(3, 4), Graph::new(3)] {
            let (w, td) = oracle_decomposition(&g).unwrap();
            assert_eq!(w, oracle_treewidth(&g).unwrap());
            assert!(td.validate(&g).is_valid());
            assert_eq!(td.width(), w as isize);
        }
    }

    #[test]
    fn refuses_large_inputs() {
        assert!(matches!(oracle_treewidth(&Graph::new(25)), Err(Error::Refused(_))));
        assert!(matches!(permutation_treewidth(&Graph::new(12)), Err(Error::Refused(_))));
        assert!(matches!(enumerate_all_tds(&Graph::new(6), 3, 2), Err(Error::Refused(_))));
    }

    #[test]
    fn tree_counts() {
        let counts: Vec<usize> = (1..=6).map(|m| unlabeled_trees(m).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6]);
    }

    #[test]
    fn enumeration_examples() {
        let one = Graph::new(1);
        let tds = enumerate_all_tds(&one, 1, 0).unwrap();
        assert_eq!(tds, vec![TreeDecomposition::single_bag(vec![0])]);

        let edge = Graph::from_edges(2, [(0, 1)]);
        let tds = enumerate_all_tds(&edge, 2, 1).unwrap();
        assert!(tds.contains(&TreeDecomposition::single_bag(vec![0, 1])));

        let p3 = Graph::from_edges(3, [(0, 1), (1, 2)]);
        let tds = enumerate_all_tds(&p3, 3, 1).unwrap();
        assert!(tds.iter().any(|td| td.len() == 2 && td.width() == 1));
        for td in &tds {
            assert!(td.validate(&p3).is_valid());
        }
    }
}

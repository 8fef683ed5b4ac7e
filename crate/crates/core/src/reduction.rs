//! Exact treewidth by self-reduction: shrink the graph, solve the smaller
//! instance, lift its decomposition back and refine it to the target width
//! with the fixed-width dynamic program.

use std::collections::HashMap;

use crate::bkdp::{self, Options};
use crate::error::{Error, Result};
use crate::graph::{Graph, Matching, Vertex, VertexMapping};
use crate::treedec::{to_nice, TreeDecomposition};

/// Default largest width tried before giving up.
pub const DEFAULT_MAX_K: usize = 4;

/// Vertex classes around a restricted maximal matching.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Partition {
    /// Vertices of degree at most `4k`.
    pub s: Vec<Vertex>,
    /// Matched vertices of `s`.
    pub a: Vec<Vertex>,
    /// Partners of `a` outside `s`.
    pub b: Vec<Vertex>,
    /// Neighbors of `a` in `s`, not in `a`.
    pub c: Vec<Vertex>,
    /// The rest of `s`.
    pub d: Vec<Vertex>,
    /// Everything else.
    pub f: Vec<Vertex>,
}

impl Partition {
    /// Size bounds that hold whenever the matching is small and `tw ≤ k`.
    pub fn size_lemmas(&self, n: usize, k: usize) -> Vec<String> {
        let (n, k2) = (n as f64, (k * k) as f64);
        let mut bad = Vec::new();
        let mut check = |name: &str, ok: bool| {
            if !ok {
                bad.push(name.to_string());
            }
        };
        check("|S| >= n/2", self.s.len() as f64 >= n / 2.0);
        check("|A| <= n/8k^2", self.a.len() as f64 <= n / (8.0 * k2));
        check("|B| <= n/16k^2", self.b.len() as f64 <= n / (16.0 * k2));
        check("|C| <= n/2k", self.c.len() as f64 <= n / (2.0 * k as f64));
        check("|D| >= n/5", self.d.len() as f64 >= n / 5.0);
        bad
    }

    /// The same bounds in terms of the matching size; they hold for every
    /// restricted maximal matching of a graph with `tw ≤ k`.
    pub fn matching_lemmas(&self, n: usize, k: usize, matching: usize) -> Vec<String> {
        let mut bad = Vec::new();
        let mut check = |name: &str, ok: bool| {
            if !ok {
                bad.push(name.to_string());
            }
        };
        check("2|S| >= n", 2 * self.s.len() >= n);
        check("|A| <= 2|M|", self.a.len() <= 2 * matching);
        check("|B| <= |M|", self.b.len() <= matching);
        check("|C| <= 4k|A|", self.c.len() <= 4 * k * self.a.len());
        check("|D| = |S|-|A|-|C|", self.d.len() + self.a.len() + self.c.len() == self.s.len());
        bad
    }
}

/// Splits the vertices around a matching restricted to low-degree vertices.
pub fn classify_partition(g: &Graph, m: &Matching, k: usize) -> Result<Partition> {
    let n = g.n();
    let in_s: Vec<bool> = (0..n).map(|v| g.degree(v) <= 4 * k).collect();
    let mate = m.matched(n);
    let mut class = vec![b'f'; n];
    for v in 0..n {
        if in_s[v] && mate[v].is_some() {
            class[v] = b'a';
        }
    }
    for v in 0..n {
        if class[v] == b'a' {
            let w = mate[v].unwrap();
            if !in_s[w] {
                class[w] = b'b';
            }
        }
    }
    for v in 0..n {
        if in_s[v] && class[v] == b'f' {
            class[v] = if g.neighbors(v).iter().any(|&u| class[u] == b'a') { b'c' } else { b'd' };
        }
    }
    let mut p = Partition::default();
    for v in 0..n {
        if in_s[v] {
            p.s.push(v);
        }
        match class[v] {
            b'a' => p.a.push(v),
            b'b' => p.b.push(v),
            b'c' => p.c.push(v),
            b'd' => p.d.push(v),
            _ => p.f.push(v),
        }
    }
    if p.a.len() + p.c.len() + p.d.len() != p.s.len() || p.s.len() + p.b.len() + p.f.len() != n {
        return Err(Error::contract("vertex partition is not disjoint and covering"));
    }
    for &w in &p.d {
        if g.degree(w) < 2 || g.neighbors(w).iter().any(|&u| class[u] != b'b') {
            return Err(Error::contract(format!("vertex {w} of D has a neighbor outside B or degree below 2")));
        }
    }
    Ok(p)
}

/// Greedy assignment of `D` vertices to neighbor pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairAssignment {
    /// `(w, (u, v))` with `u < v` both neighbors of `w`.
    pub assigned: Vec<(Vertex, (Vertex, Vertex))>,
    pub loads: HashMap<(Vertex, Vertex), usize>,
    /// Vertices left without a pair.
    pub unassigned: Vec<Vertex>,
}

/// Scans the sorted list of `(pair, w)` and gives `w` the first pair whose
/// load is below `k + 1`.
pub fn assign_pairs(g: &Graph, d: &[Vertex], k: usize) -> Result<PairAssignment> {
    let mut list = Vec::new();
    for &w in d {
        let nb = g.neighbors(w);
        if nb.len() < 2 {
            return Err(Error::contract(format!("vertex {w} has fewer than two neighbors")));
        }
        let mut nb = nb.to_vec();
        nb.sort_unstable();
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                list.push(((nb[i], nb[j]), w));
            }
        }
    }
    list.sort_unstable();
    let mut out = PairAssignment::default();
    let mut done: HashMap<Vertex, bool> = d.iter().map(|&w| (w, false)).collect();
    for (pair, w) in list {
        let load = out.loads.entry(pair).or_insert(0);
        if !done[&w] && *load < k + 1 {
            *load += 1;
            done.insert(w, true);
            out.assigned.push((w, pair));
        }
    }
    out.unassigned = d.iter().copied().filter(|w| !done[w]).collect();
    out.unassigned.sort_unstable();
    Ok(out)
}

/// Removes `u_set` and turns each removed vertex's neighborhood into a
/// clique. The attachments are in `g`'s ids.
pub fn build_gstar(g: &Graph, u_set: &[Vertex]) -> (Graph, VertexMapping, Vec<(Vertex, Vec<Vertex>)>) {
    let mut keep = vec![true; g.n()];
    for &w in u_set {
        keep[w] = false;
    }
    let mut edges: Vec<(Vertex, Vertex)> = g.edges().filter(|&(a, b)| keep[a] && keep[b]).collect();
    let mut attachments = Vec::with_capacity(u_set.len());
    for &w in u_set {
        let nb = g.neighbors(w).to_vec();
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                edges.push((nb[i], nb[j]));
            }
        }
        let mut sorted = nb;
        sorted.sort_unstable();
        attachments.push((w, sorted));
    }
    let (_, mapping) = g.induced_subgraph(&keep);
    let gstar = Graph::from_edges(
        mapping.new_n,
        edges.into_iter().map(|(a, b)| (mapping.forward[a].unwrap(), mapping.forward[b].unwrap())),
    );
    (gstar, mapping, attachments)
}

#[derive(Clone, Debug)]
pub enum ReductionOutcome {
    Contracted { graph: Graph, mapping: VertexMapping },
    Completed { graph: Graph, mapping: VertexMapping, attachments: Vec<(Vertex, Vec<Vertex>)> },
    Reject,
}

/// What a reduction step saw.
#[derive(Clone, Debug)]
pub struct StepReport {
    pub n: usize,
    pub matching: usize,
    pub partition: Partition,
    pub unassigned: usize,
}

/// One shrinking step for a graph with minimum degree at least 2.
pub fn reduce_step(g: &Graph, k: usize) -> Result<(ReductionOutcome, StepReport)> {
    if k == 0 {
        return Err(Error::contract("reduction needs k >= 1"));
    }
    let n = g.n();
    let k2 = (k * k) as f64;
    let in_s: Vec<bool> = (0..n).map(|v| g.degree(v) <= 4 * k).collect();
    let m = g.maximal_matching_restricted(&in_s);
    let partition = classify_partition(g, &m, k)?;
    let mut report = StepReport { n, matching: m.len(), partition, unassigned: 0 };
    if m.len() as f64 >= n as f64 / (16.0 * k2) {
        let (graph, mapping) = g.contract_matching(&m)?;
        if graph.n() + m.len() != n {
            return Err(Error::contract("contraction did not shrink by the matching size"));
        }
        return Ok((ReductionOutcome::Contracted { graph, mapping }, report));
    }
    let pairs = assign_pairs(g, &report.partition.d, k)?;
    report.unassigned = pairs.unassigned.len();
    if pairs.unassigned.len() as f64 >= n as f64 / (8.0 * k2) {
        let bad = report.partition.size_lemmas(n, k);
        if !bad.is_empty() {
            return Err(Error::contract(format!("size bounds violated: {}", bad.join(", "))));
        }
        let (graph, mapping, attachments) = build_gstar(g, &pairs.unassigned);
        return Ok((ReductionOutcome::Completed { graph, mapping, attachments }, report));
    }
    Ok((ReductionOutcome::Reject, report))
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub max_k: usize,
    pub bk: Options,
    /// Build the final decomposition (decision runs may skip it).
    pub witness: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { max_k: DEFAULT_MAX_K, bk: Options::default(), witness: true }
    }
}

/// Verdict of a width test: a decomposition of width at most `k`, or `None`.
pub type Verdict = Option<TreeDecomposition>;

/// Size below which the reduction stops and the instance is solved directly.
pub fn base_case_cutoff(k: usize) -> usize {
    32.max(32 * k * k)
}

/// Improves `td` to width at most `k` or proves that none exists.
fn refine(g: &Graph, td: TreeDecomposition, k: usize, cfg: &SolverConfig, witness: bool) -> Result<Verdict> {
    if td.width() <= k as isize {
        return Ok(Some(td));
    }
    let nice = to_nice(g, &td)?;
    let decision = bkdp::decide(g, &nice, k, &cfg.bk)?;
    if !decision.feasible {
        return Ok(None);
    }
    if !witness {
        // Only the verdict is needed; the coarse decomposition stands in.
        return Ok(Some(td));
    }
    bkdp::reconstruct(g, &nice, &decision).map(Some)
}

fn inverse(mapping: &VertexMapping) -> Vec<Vertex> {
    let mut back = vec![usize::MAX; mapping.new_n];
    for (v, f) in mapping.forward.iter().enumerate() {
        if let Some(x) = f {
            back[*x] = v;
        }
    }
    back
}

/// Width-`k` test by recursive self-reduction.
pub fn decide_linear(g: &Graph, k: usize, cfg: &SolverConfig) -> Result<Verdict> {
    decide_rec(g, k, cfg, cfg.witness, 0)
}

fn decide_rec(g: &Graph, k: usize, cfg: &SolverConfig, witness: bool, depth: usize) -> Result<Verdict> {
    let (h, map, log) = g.strip_degree_one();
    if h.m() > k * h.n() {
        return Ok(None);
    }
    let td = if h.m() == 0 || h.n() <= base_case_cutoff(k) {
        refine(&h, TreeDecomposition::min_degree(&h), k, cfg, witness)?
    } else {
        let (outcome, report) = reduce_step(&h, k)?;
        log::debug!(
            "depth {depth}: n {} matching {} |D| {} |U| {}",
            report.n,
            report.matching,
            report.partition.d.len(),
            report.unassigned
        );
        match outcome {
            ReductionOutcome::Reject => None,
            ReductionOutcome::Contracted { graph, mapping } => match decide_rec(&graph, k, cfg, true, depth + 1)? {
                None => None,
                Some(sub) => refine(&h, sub.lift_contraction(&mapping), k, cfg, witness)?,
            },
            ReductionOutcome::Completed { graph, mapping, attachments } => {
                match decide_rec(&graph, k, cfg, true, depth + 1)? {
                    None => None,
                    Some(sub) => {
                        let back = inverse(&mapping);
                        let lifted = sub.relabel(|v| back[v]).attach_forgotten(&attachments)?;
                        refine(&h, lifted, k, cfg, witness)?
                    }
                }
            }
        }
    };
    let Some(td) = td else { return Ok(None) };
    let back = inverse(&map);
    let td = td.relabel(|v| back[v]);
    let stripped: Vec<(Vertex, Vec<Vertex>)> = log.iter().rev().map(|&(v, a)| (v, vec![a])).collect();
    td.attach_forgotten(&stripped).map(Some)
}

fn k_cap_error(max_k: usize) -> Error {
    Error::Refused(format!("treewidth exceeds the configured cap {max_k}"))
}

/// Smallest `k` accepted by `test` on each connected component, glued.
fn per_component(
    g: &Graph,
    cfg: &SolverConfig,
    mut test: impl FnMut(&Graph, usize) -> Result<Verdict>,
) -> Result<(usize, TreeDecomposition)> {
    let mut best = 0;
    let mut parts = Vec::new();
    for (comp, mapping) in g.connected_components() {
        let ids = inverse(&mapping);
        let (k, td) = if comp.m() == 0 {
            (0, TreeDecomposition::single_bag((0..comp.n()).collect()))
        } else if comp.is_forest() {
            (1, TreeDecomposition::min_degree(&comp))
        } else {
            let mut found = None;
            for k in 2..=cfg.max_k {
                if let Some(td) = test(&comp, k)? {
                    found = Some((k, td));
                    break;
                }
            }
            found.ok_or_else(|| k_cap_error(cfg.max_k))?
        };
        best = best.max(k);
        parts.push((td, ids));
    }
    Ok((best, TreeDecomposition::glue(parts)))
}

/// Exact treewidth and an optimal decomposition via the shrinking reduction.
pub fn treewidth_exact_linear(g: &Graph, cfg: &SolverConfig) -> Result<(usize, TreeDecomposition)> {
    per_component(g, cfg, |c, k| decide_linear(c, k, cfg))
}

/// Width-`k` test by contracting one edge at a time.
pub fn decide_simple(g: &Graph, k: usize, cfg: &SolverConfig) -> Result<Verdict> {
    if g.m() > k * g.n() {
        return Ok(None);
    }
    let mut levels: Vec<(Graph, VertexMapping)> = Vec::new();
    let mut cur = g.clone();
    loop {
        let Some(e) = cur.edges().next() else { break };
        let (next, mapping) = cur.contract_matching(&Matching { edges: vec![e] })?;
        levels.push((cur, mapping));
        cur = next;
    }
    let mut td = TreeDecomposition::from_elimination_order(&cur, &(0..cur.n()).collect::<Vec<_>>());
    while let Some((graph, mapping)) = levels.pop() {
        let witness = cfg.witness || !levels.is_empty();
        match refine(&graph, td.lift_contraction(&mapping), k, cfg, witness)? {
            Some(t) => td = t,
            None => return Ok(None),
        }
    }
    Ok(Some(td))
}

/// Exact treewidth via one-edge contractions.
pub fn treewidth_exact_simple(g: &Graph, cfg: &SolverConfig) -> Result<(usize, TreeDecomposition)> {
    if g.n() == 0 {
        return Ok((0, TreeDecomposition::single_bag(Vec::new())));
    }
    for k in 0..=cfg.max_k {
        if let Some(td) = decide_simple(g, k, cfg)? {
            return Ok((k, td));
        }
    }
    Err(k_cap_error(cfg.max_k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{partial_k_tree, rng};
    use crate::oracle::oracle_treewidth;

    fn cycle(m: usize) -> Graph {
        Graph::from_edges(m, (0..m).map(|i| (i, (i + 1) % m)))
    }

    #[test]
    fn partition_of_regular_graph() {
        // 4-regular: every vertex has degree 4 = 4k for k = 1.
        let g = Graph::from_edges(5, (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))));
        let m = Matching { edges: vec![(0, 1), (2, 3)] };
        let p = classify_partition(&g, &m, 1).unwrap();
        assert_eq!(p.s.len(), 5);
        assert_eq!(p.a, vec![0, 1, 2, 3]);
        assert_eq!(p.c, vec![4]);
        assert!(p.d.is_empty());
    }

    #[test]
    fn partition_hand_example() {
        // Hubs 0 and 1 (degree 5 > 4k for k = 1); leaves-of-degree-2 hang between them.
        // 2..=6 are adjacent to both hubs, 7-8 is a separate edge path hanging on hub 0.
        let mut e = vec![];
        for w in 2..=6 {
            e.push((0, w));
            e.push((1, w));
        }
        e.extend([(0, 7), (7, 8), (8, 9), (9, 0)]);
        let g = Graph::from_edges(10, e);
        let m = Matching { edges: vec![(0, 7), (1, 2), (8, 9)] };
        let p = classify_partition(&g, &m, 1).unwrap();
        assert_eq!(p.s, vec![2, 3, 4, 5, 6, 7, 8, 9]);
        assert_eq!(p.a, vec![2, 7, 8, 9]);
        assert_eq!(p.b, vec![0, 1]);
        assert_eq!(p.c, Vec::<Vertex>::new());
        assert_eq!(p.d, vec![3, 4, 5, 6]);
        assert!(p.f.is_empty());
        assert!(p.matching_lemmas(10, 1, 3).is_empty());
        assert_eq!(p.matching_lemmas(10, 1, 1), vec!["|A| <= 2|M|", "|B| <= |M|"]);
        let partial = Matching { edges: vec![(0, 7), (8, 9)] };
        assert!(classify_partition(&g, &partial, 1).is_err());
        let s: Vec<bool> = (0..10).map(|v| g.degree(v) <= 4).collect();
        let greedy = g.maximal_matching_restricted(&s);
        assert!(classify_partition(&g, &greedy, 1).is_ok());
    }

    #[test]
    fn pair_assignment_respects_load() {
        // k + 2 = 3 vertices sharing the single pair (0, 1), k = 1.
        let g = Graph::from_edges(5, [(2, 0), (2, 1), (3, 0), (3, 1), (4, 0), (4, 1)]);
        let a = assign_pairs(&g, &[2, 3, 4], 1).unwrap();
        assert_eq!(a.assigned.len(), 2);
        assert_eq!(a.unassigned, vec![4]);
        assert_eq!(a.loads[&(0, 1)], 2);
        let single = assign_pairs(&g, &[2], 1).unwrap();
        assert!(single.unassigned.is_empty());
        assert!(assign_pairs(&g, &[], 1).unwrap().assigned.is_empty());
        let star = Graph::from_edges(2, [(0, 1)]);
        assert!(assign_pairs(&star, &[0], 1).is_err());
    }

    #[test]
    fn gstar_adds_neighborhood_clique() {
        let g = Graph::from_edges(3, [(0, 2), (1, 2)]);
        let (h, map, att) = build_gstar(&g, &[2]);
        assert_eq!(h.n(), 2);
        assert!(h.has_edge(map.forward[0].unwrap(), map.forward[1].unwrap()));
        assert_eq!(att, vec![(2, vec![0, 1])]);
        let (same, _, none) = build_gstar(&g, &[]);
        assert_eq!(same, g);
        assert!(none.is_empty());
    }

    #[test]
    fn small_drivers_match_oracle() {
        let cfg = SolverConfig::default();
        let mut r = rng(21);
        for i in 0..20 {
            let g = partial_k_tree(&mut r, 6 + i % 7, 1 + i % 3, 0.7);
            let tw = oracle_treewidth(&g).unwrap();
            let (k, td) = treewidth_exact_linear(&g, &cfg).unwrap();
            assert_eq!(k, tw);
            assert!(td.validate(&g).is_valid());
            assert_eq!(td.width() as usize, tw);
            let (k2, td2) = treewidth_exact_simple(&g, &cfg).unwrap();
            assert_eq!(k2, tw);
            assert!(td2.validate(&g).is_valid());
        }
        assert_eq!(treewidth_exact_simple(&cycle(5), &cfg).unwrap().0, 2);
    }

    #[test]
    fn k5_is_capped() {
        let g = Graph::from_edges(5, (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))));
        let cfg = SolverConfig { max_k: 3, ..Default::default() };
        assert!(matches!(treewidth_exact_linear(&g, &cfg), Err(Error::Refused(_))));
        assert!(decide_linear(&g, 2, &cfg).unwrap().is_none());
    }

    #[test]
    fn reduction_shrinks_partial_two_trees() {
        let mut r = rng(2);
        let g = partial_k_tree(&mut r, 400, 2, 0.6);
        let (h, _, _) = g.strip_degree_one();
        let (outcome, report) = reduce_step(&h, 2).unwrap();
        let shrunk = match outcome {
            ReductionOutcome::Contracted { graph, .. } => graph.n(),
            ReductionOutcome::Completed { graph, .. } => graph.n(),
            ReductionOutcome::Reject => panic!("rejected a width-2 graph"),
        };
        assert!(h.n() - shrunk >= h.n() / 64);
        assert!(report.partition.s.len() * 2 >= h.n());
    }

    #[test]
    fn small_matching_completes() {
        // Two hubs joined through 200 vertices of degree 2: any restricted
        // maximal matching has at most two edges.
        let m = 200;
        let e: Vec<(Vertex, Vertex)> = (2..m + 2).flat_map(|w| [(0, w), (1, w)]).collect();
        let g = Graph::from_edges(m + 2, e);
        let (outcome, report) = reduce_step(&g, 2).unwrap();
        assert_eq!(report.matching, 2);
        assert_eq!(report.partition.b, vec![0, 1]);
        assert_eq!(report.partition.d.len(), m - 2);
        assert!(report.partition.size_lemmas(g.n(), 2).is_empty());
        assert!(report.partition.matching_lemmas(g.n(), 2, 2).is_empty());
        // Three vertices go to the single hub pair; the rest stay unassigned.
        assert_eq!(report.unassigned, m - 5);
        match outcome {
            ReductionOutcome::Completed { graph, attachments, .. } => {
                assert_eq!(graph.n(), g.n() - report.unassigned);
                assert_eq!(attachments.len(), report.unassigned);
            }
            other => panic!("expected completion, got {other:?}"),
        }
        let (k, td) = treewidth_exact_linear(&g, &SolverConfig::default()).unwrap();
        assert_eq!(k, 2);
        assert!(td.validate(&g).is_valid());
    }

    #[test]
    fn large_partial_two_tree() {
        let mut r = rng(8);
        let g = partial_k_tree(&mut r, 600, 2, 0.8);
        let (k, td) = treewidth_exact_linear(&g, &SolverConfig::default()).unwrap();
        assert!(k <= 2);
        assert!(td.validate(&g).is_valid());
    }
}

//! Undirected simple graphs with dense vertex ids, PACE `.gr` I/O and the
//! structural operations used by the reduction driver.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};

pub type Vertex = usize;

/// Simple undirected graph; vertices are `0..n`, neighbor lists sorted.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    m: usize,
}

/// Old-id to new-id map produced by contraction or vertex deletion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexMapping {
    pub forward: Vec<Option<Vertex>>,
    pub new_n: usize,
}

impl VertexMapping {
    pub fn identity(n: usize) -> Self {
        VertexMapping { forward: (0..n).map(Some).collect(), new_n: n }
    }

    /// For each new vertex the sorted list of old vertices mapped onto it.
    pub fn preimages(&self) -> Vec<Vec<Vertex>> {
        let mut pre = vec![Vec::new(); self.new_n];
        for (old, new) in self.forward.iter().enumerate() {
            if let Some(new) = new {
                pre[*new].push(old);
            }
        }
        pre
    }
}

/// Vertex-disjoint set of edges.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Matching {
    pub edges: Vec<(Vertex, Vertex)>,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Vertices covered by the matching, as a membership vector of length `n`.
    pub fn matched(&self, n: usize) -> Vec<Option<Vertex>> {
        let mut mate = vec![None; n];
        for &(u, v) in &self.edges {
            mate[u] = Some(v);
            mate[v] = Some(u);
        }
        mate
    }
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], m: 0 }
    }

    /// Builds a graph from an edge list; duplicates are merged and self-loops
    /// dropped.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u},{v}) out of range for n={n}");
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        Self::from_adjacency(adj)
    }

    fn from_adjacency(mut adj: Vec<Vec<Vertex>>) -> Self {
        let mut deg_sum = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            deg_sum += list.len();
        }
        Graph { adj, m: deg_sum / 2 }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v` in increasing lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.connected_components().len() == 1
    }

    /// True when the graph has no cycle.
    pub fn is_forest(&self) -> bool {
        self.m + self.component_labels().1 == self.n()
    }

    fn component_labels(&self) -> (Vec<usize>, usize) {
        let n = self.n();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Splits the graph into connected components, ordered by smallest vertex.
    /// Each mapping sends this graph's ids to the component's ids.
    pub fn connected_components(&self) -> Vec<(Graph, VertexMapping)> {
        let (label, count) = self.component_labels();
        let mut members = vec![Vec::new(); count];
        for (v, &c) in label.iter().enumerate() {
            members[c].push(v);
        }
        members
            .into_iter()
            .map(|keep| {
                let mut mask = vec![false; self.n()];
                for &v in &keep {
                    mask[v] = true;
                }
                self.induced_subgraph(&mask)
            })
            .collect()
    }

    /// Induced subgraph on the vertices flagged in `keep`; kept vertices are
    /// renumbered in increasing order.
    pub fn induced_subgraph(&self, keep: &[bool]) -> (Graph, VertexMapping) {
        let mut forward = vec![None; self.n()];
        let mut new_n = 0;
        for v in 0..self.n() {
            if keep[v] {
                forward[v] = Some(new_n);
                new_n += 1;
            }
        }
        let mut adj = vec![Vec::new(); new_n];
        for v in 0..self.n() {
            if let Some(nv) = forward[v] {
                adj[nv] = self.adj[v].iter().filter_map(|&w| forward[w]).collect();
            }
        }
        (Self::from_adjacency(adj), VertexMapping { forward, new_n })
    }

    /// Shrinks every matching edge into one vertex. Merged vertices take the
    /// position of their smaller endpoint in the new numbering.
    pub fn contract_matching(&self, matching: &Matching) -> Result<(Graph, VertexMapping)> {
        let n = self.n();
        let mut mate = vec![None; n];
        for &(u, v) in &matching.edges {
            if u >= n || v >= n || !self.has_edge(u, v) {
                return Err(Error::contract(format!("({u},{v}) is not an edge")));
            }
            if mate[u].is_some() || mate[v].is_some() {
                return Err(Error::contract(format!("({u},{v}) shares an endpoint with another matching edge")));
            }
            mate[u] = Some(v);
            mate[v] = Some(u);
        }
        let mut forward: Vec<Option<Vertex>> = vec![None; n];
        let mut new_n = 0;
        for v in 0..n {
            if forward[v].is_some() {
                continue;
            }
            forward[v] = Some(new_n);
            if let Some(w) = mate[v] {
                forward[w] = Some(new_n);
            }
            new_n += 1;
        }
        let mut adj = vec![Vec::new(); new_n];
        for (u, v) in self.edges() {
            let (a, b) = (forward[u].unwrap(), forward[v].unwrap());
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        Ok((Self::from_adjacency(adj), VertexMapping { forward, new_n }))
    }

    /// Greedy maximal matching among edges with at least one endpoint in `s`,
    /// scanning vertices and neighbors in increasing id.
    pub fn maximal_matching_restricted(&self, s: &[bool]) -> Matching {
        let n = self.n();
        let mut matched = vec![false; n];
        let mut edges = Vec::new();
        for u in 0..n {
            if matched[u] {
                continue;
            }
            for &w in &self.adj[u] {
                if !matched[w] && (s[u] || s[w]) {
                    matched[u] = true;
                    matched[w] = true;
                    edges.push((u.min(w), u.max(w)));
                    break;
                }
            }
        }
        Matching { edges }
    }

    /// Repeatedly deletes degree-one vertices. A component never shrinks below
    /// one vertex. The log lists `(removed, anchor)` in removal order, in this
    /// graph's ids.
    pub fn strip_degree_one(&self) -> (Graph, VertexMapping, Vec<(Vertex, Vertex)>) {
        let n = self.n();
        let mut deg: Vec<usize> = (0..n).map(|v| self.degree(v)).collect();
        let mut alive = vec![true; n];
        let mut log = Vec::new();
        let mut stack: Vec<Vertex> = (0..n).rev().filter(|&v| deg[v] == 1).collect();
        while let Some(v) = stack.pop() {
            if !alive[v] || deg[v] != 1 {
                continue;
            }
            let anchor = self.adj[v].iter().copied().find(|&w| alive[w]).unwrap();
            alive[v] = false;
            deg[v] = 0;
            deg[anchor] -= 1;
            log.push((v, anchor));
            if deg[anchor] == 1 {
                stack.push(anchor);
            }
        }
        let (g, map) = self.induced_subgraph(&alive);
        (g, map, log)
    }

    /// PACE `.gr` serialization, edges in increasing `(u, v)` order.
    pub fn to_gr(&self) -> String {
        let mut out = format!("p tw {} {}\n", self.n(), self.m());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{} {}", u + 1, v + 1);
        }
        out
    }

    pub fn parse_gr_str(text: &str) -> Result<Graph> {
        Self::parse_gr(text.as_bytes())
    }

    /// Reads a PACE 2017 `.gr` stream.
    pub fn parse_gr(reader: impl BufRead) -> Result<Graph> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            match header {
                None => {
                    if fields.len() != 4 || fields[0] != "p" || fields[1] != "tw" {
                        return Err(Error::parse(lineno, "expected header `p tw <n> <m>`"));
                    }
                    let n = parse_num(fields[2], lineno)?;
                    let m = parse_num(fields[3], lineno)?;
                    header = Some((n, m));
                }
                Some((n, _)) => {
                    if fields.len() != 2 {
                        return Err(Error::parse(lineno, "expected edge line `<u> <v>`"));
                    }
                    let u = parse_num(fields[0], lineno)?;
                    let v = parse_num(fields[1], lineno)?;
                    if u == 0 || v == 0 || u > n || v > n {
                        return Err(Error::parse(lineno, format!("vertex out of range 1..={n}")));
                    }
                    if u == v {
                        return Err(Error::parse(lineno, format!("self-loop on vertex {u}")));
                    }
                    edges.push((u - 1, v - 1));
                }
            }
        }
        let (n, m) = header.ok_or_else(|| Error::parse(0, "missing `p tw` header"))?;
        if edges.len() != m {
            return Err(Error::parse(0, format!("header announces {m} edges, found {}", edges.len())));
        }
        Ok(Graph::from_edges(n, edges))
    }
}

fn parse_num(field: &str, line: usize) -> Result<usize> {
    field
        .parse()
        .map_err(|_| Error::parse(line, format!("not a non-negative integer: {field:?}")))
}

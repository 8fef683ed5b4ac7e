//! Tree decompositions: validation, non-redundancy, nice form, PACE `.td`
//! I/O, and the lifting steps used when unwinding graph reductions.

use std::collections::{BTreeSet, BinaryHeap, HashSet, VecDeque};
use std::cmp::Reverse;
use std::fmt;
use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex, VertexMapping};

pub type NodeId = usize;

/// A tree over decomposition nodes with one sorted vertex bag per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<Vertex>>,
    pub edges: Vec<(NodeId, NodeId)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoNodes,
    NotATree,
    VertexOutOfRange { node: NodeId, vertex: Vertex },
    UncoveredVertex(Vertex),
    UncoveredEdge(Vertex, Vertex),
    Incoherent(Vertex),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Vertex and node numbers are printed 1-based, as in the file formats.
        match self {
            Violation::NoNodes => write!(f, "decomposition has no nodes"),
            Violation::NotATree => write!(f, "decomposition tree is not a tree"),
            Violation::VertexOutOfRange { node, vertex } => {
                write!(f, "bag {} references unknown vertex {}", node + 1, vertex + 1)
            }
            Violation::UncoveredVertex(v) => write!(f, "vertex {} is in no bag", v + 1),
            Violation::UncoveredEdge(u, v) => write!(f, "edge {} {} is in no bag", u + 1, v + 1),
            Violation::Incoherent(v) => write!(f, "bags containing vertex {} are not connected", v + 1),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl TreeDecomposition {
    pub fn new(bags: Vec<Vec<Vertex>>, edges: Vec<(NodeId, NodeId)>) -> Self {
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        TreeDecomposition { bags, edges }
    }

    pub fn single_bag(bag: Vec<Vertex>) -> Self {
        Self::new(vec![bag], Vec::new())
    }

    /// One bag holding every vertex of `g`.
    pub fn trivial(g: &Graph) -> Self {
        Self::single_bag((0..g.n()).collect())
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    /// Largest bag size minus one; `-1` when every bag is empty.
    pub fn width(&self) -> isize {
        self.max_bag_size() as isize - 1
    }

    pub fn max_bag_size(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn adjacency(&self) -> Vec<Vec<NodeId>> {
        let mut adj = vec![Vec::new(); self.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    fn is_tree(&self) -> bool {
        let n = self.len();
        if n == 0 || self.edges.len() != n - 1 {
            return false;
        }
        if self.edges.iter().any(|&(a, b)| a >= n || b >= n || a == b) {
            return false;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(t) = stack.pop() {
            for &s in &adj[t] {
                if !seen[s] {
                    seen[s] = true;
                    count += 1;
                    stack.push(s);
                }
            }
        }
        count == n
    }

    /// Checks node coverage, edge coverage and coherence against `g`.
    pub fn validate(&self, g: &Graph) -> ValidationReport {
        let mut violations = Vec::new();
        if self.is_empty() {
            violations.push(Violation::NoNodes);
            return ValidationReport { violations };
        }
        if !self.is_tree() {
            violations.push(Violation::NotATree);
        }
        let n = g.n();
        let mut occ: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for (t, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v >= n {
                    violations.push(Violation::VertexOutOfRange { node: t, vertex: v });
                } else {
                    occ[v].push(t);
                }
            }
        }
        for (v, nodes) in occ.iter().enumerate() {
            if nodes.is_empty() {
                violations.push(Violation::UncoveredVertex(v));
            }
        }
        for (u, v) in g.edges() {
            let covered = occ[u]
                .iter()
                .any(|&t| self.bags[t].binary_search(&v).is_ok());
            if !covered {
                violations.push(Violation::UncoveredEdge(u, v));
            }
        }
        if violations.iter().all(|v| *v != Violation::NotATree) {
            // A vertex's nodes induce a subtree iff they span |nodes|-1 tree edges.
            let mut inner_edges = vec![0usize; n];
            for &(a, b) in &self.edges {
                for &v in &self.bags[a] {
                    if v < n && self.bags[b].binary_search(&v).is_ok() {
                        inner_edges[v] += 1;
                    }
                }
            }
            for v in 0..n {
                if !occ[v].is_empty() && inner_edges[v] + 1 != occ[v].len() {
                    violations.push(Violation::Incoherent(v));
                }
            }
        }
        ValidationReport { violations }
    }

    /// Contracts every node whose bag is a subset of an adjacent bag into that
    /// neighbor until no such pair remains.
    pub fn make_non_redundant(&self) -> TreeDecomposition {
        let n = self.len();
        if n <= 1 {
            return self.clone();
        }
        let mut adj: Vec<BTreeSet<NodeId>> = vec![BTreeSet::new(); n];
        for &(a, b) in &self.edges {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        let mut alive = vec![true; n];
        let mut queue: VecDeque<NodeId> = (0..n).collect();
        let mut queued = vec![true; n];
        let subset = |a: &[Vertex], b: &[Vertex]| a.iter().all(|v| b.binary_search(v).is_ok());
        while let Some(t) = queue.pop_front() {
            queued[t] = false;
            if !alive[t] {
                continue;
            }
            let host = adj[t]
                .iter()
                .copied()
                .find(|&s| subset(&self.bags[t], &self.bags[s]));
            if let Some(host) = host {
                alive[t] = false;
                let nbrs: Vec<NodeId> = adj[t].iter().copied().collect();
                for s in nbrs {
                    adj[s].remove(&t);
                    if s != host {
                        adj[s].insert(host);
                        adj[host].insert(s);
                    }
                }
                adj[t].clear();
                for s in adj[host].iter().copied().chain(std::iter::once(host)) {
                    if !queued[s] {
                        queued[s] = true;
                        queue.push_back(s);
                    }
                }
            }
        }
        let mut index = vec![usize::MAX; n];
        let mut bags = Vec::new();
        for t in 0..n {
            if alive[t] {
                index[t] = bags.len();
                bags.push(self.bags[t].clone());
            }
        }
        let mut edges = Vec::new();
        for t in 0..n {
            for &s in &adj[t] {
                if t < s {
                    edges.push((index[t], index[s]));
                }
            }
        }
        TreeDecomposition { bags, edges }
    }

    /// Replaces every merged vertex by its preimages under `mapping`.
    pub fn lift_contraction(&self, mapping: &VertexMapping) -> TreeDecomposition {
        let pre = mapping.preimages();
        let bags = self
            .bags
            .iter()
            .map(|bag| bag.iter().flat_map(|&v| pre[v].iter().copied()).collect())
            .collect();
        TreeDecomposition::new(bags, self.edges.clone())
    }

    /// Renames vertices through `rename` (new id for every vertex in a bag).
    pub fn relabel(&self, rename: impl Fn(Vertex) -> Vertex) -> TreeDecomposition {
        let bags = self.bags.iter().map(|b| b.iter().map(|&v| rename(v)).collect()).collect();
        TreeDecomposition::new(bags, self.edges.clone())
    }

    /// For each `(w, N(w))` adds a leaf bag `{w} ∪ N(w)` next to a bag holding
    /// `N(w)`. Attachments are processed in order, so later entries may rely on
    /// bags added by earlier ones.
    pub fn attach_forgotten(&self, attachments: &[(Vertex, Vec<Vertex>)]) -> Result<TreeDecomposition> {
        let mut td = self.clone();
        let mut occ: Vec<Vec<NodeId>> = Vec::new();
        let ensure = |occ: &mut Vec<Vec<NodeId>>, v: Vertex| {
            if occ.len() <= v {
                occ.resize(v + 1, Vec::new());
            }
        };
        for (t, bag) in td.bags.iter().enumerate() {
            for &v in bag {
                ensure(&mut occ, v);
                occ[v].push(t);
            }
        }
        for (w, nbrs) in attachments {
            let host = if nbrs.is_empty() {
                Some(0)
            } else {
                let pivot = nbrs
                    .iter()
                    .copied()
                    .min_by_key(|&v| occ.get(v).map_or(0, Vec::len))
                    .unwrap();
                occ.get(pivot).and_then(|nodes| {
                    nodes
                        .iter()
                        .copied()
                        .find(|&t| nbrs.iter().all(|v| td.bags[t].binary_search(v).is_ok()))
                })
            };
            let host = host.ok_or_else(|| {
                Error::contract(format!("no bag contains the neighborhood of vertex {w}"))
            })?;
            let node = td.push_leaf(host, *w, nbrs);
            for &v in &td.bags[node] {
                ensure(&mut occ, v);
                occ[v].push(node);
            }
        }
        Ok(td)
    }

    /// Like [`attach_forgotten`](Self::attach_forgotten) with host nodes
    /// already known (one per attachment).
    pub fn attach_at(&self, attachments: &[(Vertex, Vec<Vertex>)], hosts: &[NodeId]) -> TreeDecomposition {
        let mut td = self.clone();
        for ((w, nbrs), &host) in attachments.iter().zip(hosts) {
            td.push_leaf(host, *w, nbrs);
        }
        td
    }

    fn push_leaf(&mut self, host: NodeId, w: Vertex, nbrs: &[Vertex]) -> NodeId {
        let mut bag = nbrs.to_vec();
        bag.push(w);
        bag.sort_unstable();
        bag.dedup();
        let node = self.bags.len();
        self.bags.push(bag);
        self.edges.push((host, node));
        node
    }

    /// Finds, for every query set, a node whose bag contains it: all subsets of
    /// size at most `k + 1` of every bag are listed, sorted, and co-scanned with
    /// the sorted queries.
    pub fn find_bags_for_subsets(&self, queries: &[Vec<Vertex>], k: usize) -> Result<Vec<NodeId>> {
        let limit = k + 1;
        let mut subsets: Vec<(Vec<Vertex>, NodeId)> = Vec::new();
        for (t, bag) in self.bags.iter().enumerate() {
            let mut current = Vec::new();
            enumerate_subsets(bag, 0, limit, &mut current, &mut |s| subsets.push((s.to_vec(), t)));
        }
        subsets.sort_unstable();
        let mut order: Vec<usize> = (0..queries.len()).collect();
        let sorted_queries: Vec<Vec<Vertex>> = queries
            .iter()
            .map(|q| {
                let mut q = q.clone();
                q.sort_unstable();
                q.dedup();
                q
            })
            .collect();
        order.sort_by(|&a, &b| sorted_queries[a].cmp(&sorted_queries[b]));
        let mut result = vec![usize::MAX; queries.len()];
        let mut pos = 0;
        for qi in order {
            let q = &sorted_queries[qi];
            while pos < subsets.len() && subsets[pos].0 < *q {
                pos += 1;
            }
            if pos < subsets.len() && subsets[pos].0 == *q {
                result[qi] = subsets[pos].1;
            } else {
                return Err(Error::contract(format!("no bag contains query set {q:?}")));
            }
        }
        Ok(result)
    }

    /// PACE `.td` text for a graph on `n` vertices.
    pub fn to_td(&self, n: usize) -> String {
        let mut out = format!("s td {} {} {}\n", self.len(), self.max_bag_size(), n);
        for (t, bag) in self.bags.iter().enumerate() {
            let _ = write!(out, "b {}", t + 1);
            for v in bag {
                let _ = write!(out, " {}", v + 1);
            }
            out.push('\n');
        }
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "{} {}", a + 1, b + 1);
        }
        out
    }

    pub fn parse_td_str(text: &str) -> Result<(TreeDecomposition, usize)> {
        Self::parse_td(text.as_bytes())
    }

    /// Reads a PACE `.td` stream; returns the decomposition and the vertex
    /// count announced in the header.
    pub fn parse_td(reader: impl BufRead) -> Result<(TreeDecomposition, usize)> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut bags: Vec<Option<Vec<Vertex>>> = Vec::new();
        let mut edges = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            let num = |s: &str| -> Result<usize> {
                s.parse().map_err(|_| Error::parse(lineno, format!("not a non-negative integer: {s:?}")))
            };
            let Some((nb, _, n)) = header else {
                if fields.len() != 5 || fields[0] != "s" || fields[1] != "td" {
                    return Err(Error::parse(lineno, "expected header `s td <bags> <maxbag> <n>`"));
                }
                let h = (num(fields[2])?, num(fields[3])?, num(fields[4])?);
                bags = vec![None; h.0];
                header = Some(h);
                continue;
            };
            if fields[0] == "b" {
                if fields.len() < 2 {
                    return Err(Error::parse(lineno, "bag line without id"));
                }
                let id = num(fields[1])?;
                if id == 0 || id > nb {
                    return Err(Error::parse(lineno, format!("bag id {id} out of range 1..={nb}")));
                }
                if bags[id - 1].is_some() {
                    return Err(Error::parse(lineno, format!("bag {id} defined twice")));
                }
                let mut bag = Vec::with_capacity(fields.len() - 2);
                for f in &fields[2..] {
                    let v = num(f)?;
                    if v == 0 || v > n {
                        return Err(Error::parse(lineno, format!("vertex {v} out of range 1..={n}")));
                    }
                    bag.push(v - 1);
                }
                bags[id - 1] = Some(bag);
            } else {
                if fields.len() != 2 {
                    return Err(Error::parse(lineno, "expected tree edge `<i> <j>`"));
                }
                let (a, b) = (num(fields[0])?, num(fields[1])?);
                if a == 0 || b == 0 || a > nb || b > nb {
                    return Err(Error::parse(lineno, "tree edge references unknown bag"));
                }
                edges.push((a - 1, b - 1));
            }
        }
        let (_, declared_max, n) = header.ok_or_else(|| Error::parse(0, "missing `s td` header"))?;
        let bags: Vec<Vec<Vertex>> = bags
            .into_iter()
            .enumerate()
            .map(|(i, b)| b.ok_or_else(|| Error::parse(0, format!("bag {} missing", i + 1))))
            .collect::<Result<_>>()?;
        let td = TreeDecomposition::new(bags, edges);
        if td.max_bag_size() != declared_max {
            return Err(Error::parse(0, format!(
                "header announces max bag size {declared_max}, found {}",
                td.max_bag_size()
            )));
        }
        Ok((td, n))
    }

    /// Decomposition obtained by eliminating vertices in `order` with fill-in.
    pub fn from_elimination_order(g: &Graph, order: &[Vertex]) -> TreeDecomposition {
        let n = g.n();
        if n == 0 {
            return TreeDecomposition::single_bag(Vec::new());
        }
        let mut pos = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut nbrs: Vec<HashSet<Vertex>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
        let mut bags = Vec::with_capacity(n);
        let mut higher: Vec<Vec<Vertex>> = Vec::with_capacity(n);
        for &v in order {
            let later: Vec<Vertex> = nbrs[v].iter().copied().collect();
            for (i, &a) in later.iter().enumerate() {
                nbrs[a].remove(&v);
                for &b in &later[i + 1..] {
                    nbrs[a].insert(b);
                    nbrs[b].insert(a);
                }
            }
            let mut bag = later.clone();
            bag.push(v);
            bags.push(bag);
            higher.push(later);
        }
        let mut edges = Vec::new();
        let last = order.len() - 1;
        for (i, later) in higher.iter().enumerate() {
            if let Some(&p) = later.iter().min_by_key(|&&u| pos[u]) {
                edges.push((i, pos[p]));
            } else if i != last {
                // Separate component: hook onto the final bag.
                edges.push((i, last));
            }
        }
        TreeDecomposition::new(bags, edges)
    }

    /// Greedy minimum-degree elimination decomposition.
    pub fn min_degree(g: &Graph) -> TreeDecomposition {
        let n = g.n();
        let mut nbrs: Vec<BTreeSet<Vertex>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
        let mut heap: BinaryHeap<Reverse<(usize, Vertex)>> = (0..n).map(|v| Reverse((nbrs[v].len(), v))).collect();
        let mut done = vec![false; n];
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse((d, v))) = heap.pop() {
            if done[v] || d != nbrs[v].len() {
                continue;
            }
            done[v] = true;
            order.push(v);
            let later: Vec<Vertex> = nbrs[v].iter().copied().collect();
            for (i, &a) in later.iter().enumerate() {
                nbrs[a].remove(&v);
                for &b in &later[i + 1..] {
                    nbrs[a].insert(b);
                    nbrs[b].insert(a);
                }
            }
            for &a in &later {
                heap.push(Reverse((nbrs[a].len(), a)));
            }
        }
        Self::from_elimination_order(g, &order)
    }

    /// Glues decompositions of vertex-disjoint parts into one tree. Each part
    /// comes with the map from its local vertex ids to the combined ids.
    pub fn glue(parts: Vec<(TreeDecomposition, Vec<Vertex>)>) -> TreeDecomposition {
        let mut bags = Vec::new();
        let mut edges = Vec::new();
        for (td, ids) in parts {
            let offset = bags.len();
            if offset > 0 {
                edges.push((0, offset));
            }
            for bag in td.bags {
                bags.push(bag.into_iter().map(|v| ids[v]).collect());
            }
            edges.extend(td.edges.into_iter().map(|(a, b)| (a + offset, b + offset)));
        }
        if bags.is_empty() {
            bags.push(Vec::new());
        }
        TreeDecomposition::new(bags, edges)
    }
}

fn enumerate_subsets(
    bag: &[Vertex],
    start: usize,
    limit: usize,
    current: &mut Vec<Vertex>,
    emit: &mut impl FnMut(&[Vertex]),
) {
    emit(current);
    if current.len() == limit {
        return;
    }
    for i in start..bag.len() {
        current.push(bag[i]);
        enumerate_subsets(bag, i + 1, limit, current, emit);
        current.pop();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NiceKind {
    Leaf,
    Introduce(Vertex),
    Forget(Vertex),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub bag: Vec<Vertex>,
    pub kind: NiceKind,
    pub children: Vec<NodeId>,
    pub parent: Option<NodeId>,
}

/// Rooted decomposition with empty root and leaf bags in which every inner
/// node is a join, introduce or forget node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    pub nodes: Vec<NiceNode>,
    pub root: NodeId,
}

impl NiceTreeDecomposition {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn width(&self) -> isize {
        self.nodes.iter().map(|n| n.bag.len()).max().unwrap_or(0) as isize - 1
    }

    /// Children before parents.
    pub fn post_order(&self) -> Vec<NodeId> {
        let mut order = Vec::with_capacity(self.len());
        let mut stack = vec![(self.root, false)];
        while let Some((t, expanded)) = stack.pop() {
            if expanded {
                order.push(t);
            } else {
                stack.push((t, true));
                for &c in self.nodes[t].children.iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        order
    }

    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        let bags = self.nodes.iter().map(|n| n.bag.clone()).collect();
        let edges = self
            .nodes
            .iter()
            .enumerate()
            .flat_map(|(t, n)| n.children.iter().map(move |&c| (t, c)))
            .collect();
        TreeDecomposition::new(bags, edges)
    }

    /// Checks the nice-form rules (bag shapes per kind) and validity for `g`.
    pub fn check(&self, g: &Graph) -> std::result::Result<(), String> {
        let report = self.to_tree_decomposition().validate(g);
        if !report.is_valid() {
            return Err(format!("not a tree decomposition: {:?}", report.violations));
        }
        if !self.nodes[self.root].bag.is_empty() || self.nodes[self.root].parent.is_some() {
            return Err("root bag must be empty".into());
        }
        for (t, node) in self.nodes.iter().enumerate() {
            let child_bag = |i: usize| &self.nodes[node.children[i]].bag;
            for &c in &node.children {
                if self.nodes[c].parent != Some(t) {
                    return Err(format!("node {t}: child {c} has wrong parent link"));
                }
            }
            let ok = match node.kind {
                NiceKind::Leaf => node.children.is_empty() && node.bag.is_empty(),
                NiceKind::Join => {
                    node.children.len() == 2 && *child_bag(0) == node.bag && *child_bag(1) == node.bag
                }
                NiceKind::Introduce(v) => {
                    node.children.len() == 1 && {
                        let mut expect = child_bag(0).clone();
                        !expect.contains(&v) && {
                            expect.push(v);
                            expect.sort_unstable();
                            expect == node.bag
                        }
                    }
                }
                NiceKind::Forget(v) => {
                    node.children.len() == 1 && !node.bag.contains(&v) && {
                        let mut expect = node.bag.clone();
                        expect.push(v);
                        expect.sort_unstable();
                        expect == *child_bag(0)
                    }
                }
            };
            if !ok {
                return Err(format!("node {t} violates the {:?} shape", node.kind));
            }
        }
        Ok(())
    }

    /// Text dump: one line per node, `n <id> <kind> <parent> : <bag>`.
    pub fn dump(&self) -> String {
        let mut out = format!("c nice decomposition, {} nodes, root {}\n", self.len(), self.root + 1);
        for (t, node) in self.nodes.iter().enumerate() {
            let kind = match node.kind {
                NiceKind::Leaf => "leaf".to_string(),
                NiceKind::Join => "join".to_string(),
                NiceKind::Introduce(v) => format!("introduce {}", v + 1),
                NiceKind::Forget(v) => format!("forget {}", v + 1),
            };
            let parent = node.parent.map_or(0, |p| p + 1);
            let _ = write!(out, "n {} {} parent {} :", t + 1, kind, parent);
            for v in &node.bag {
                let _ = write!(out, " {}", v + 1);
            }
            out.push('\n');
        }
        out
    }
}

struct NiceBuilder {
    nodes: Vec<NiceNode>,
}

impl NiceBuilder {
    fn push(&mut self, bag: Vec<Vertex>, kind: NiceKind, children: Vec<NodeId>) -> NodeId {
        let id = self.nodes.len();
        for &c in &children {
            self.nodes[c].parent = Some(id);
        }
        self.nodes.push(NiceNode { bag, kind, children, parent: None });
        id
    }

    /// Chain from the node `from` to a node with bag `target`: forget then
    /// introduce, each in increasing vertex order.
    fn chain(&mut self, mut from: NodeId, target: &[Vertex]) -> NodeId {
        let current = self.nodes[from].bag.clone();
        let mut bag = current.clone();
        for &v in current.iter().filter(|v| target.binary_search(v).is_err()) {
            bag.retain(|&x| x != v);
            from = self.push(bag.clone(), NiceKind::Forget(v), vec![from]);
        }
        for &v in target.iter().filter(|v| current.binary_search(v).is_err()) {
            bag.push(v);
            bag.sort_unstable();
            from = self.push(bag.clone(), NiceKind::Introduce(v), vec![from]);
        }
        from
    }
}

/// Converts a valid decomposition into nice form of the same width.
pub fn to_nice(g: &Graph, td: &TreeDecomposition) -> Result<NiceTreeDecomposition> {
    let report = td.validate(g);
    if !report.is_valid() {
        return Err(Error::contract(format!("invalid input decomposition: {:?}", report.violations)));
    }
    let td = td.make_non_redundant();
    let adj = td.adjacency();
    let root = (0..td.len()).max_by_key(|&t| (td.bags[t].len(), Reverse(t))).unwrap();
    // Rooted post-order of the non-redundant tree.
    let mut parent = vec![usize::MAX; td.len()];
    let mut order = Vec::with_capacity(td.len());
    let mut stack = vec![root];
    parent[root] = root;
    while let Some(t) = stack.pop() {
        order.push(t);
        for &s in &adj[t] {
            if parent[s] == usize::MAX {
                parent[s] = t;
                stack.push(s);
            }
        }
    }
    let mut b = NiceBuilder { nodes: Vec::new() };
    let mut top = vec![usize::MAX; td.len()];
    for &t in order.iter().rev() {
        let bag = &td.bags[t];
        let mut tops: Vec<NodeId> = Vec::new();
        for &s in &adj[t] {
            if parent[s] == t && s != t {
                tops.push(b.chain(top[s], bag));
            }
        }
        let node = if tops.is_empty() {
            let leaf = b.push(Vec::new(), NiceKind::Leaf, Vec::new());
            b.chain(leaf, bag)
        } else {
            let mut acc = tops[0];
            for &other in &tops[1..] {
                acc = b.push(bag.clone(), NiceKind::Join, vec![acc, other]);
            }
            acc
        };
        top[t] = node;
    }
    let root_node = b.chain(top[root], &[]);
    Ok(NiceTreeDecomposition { nodes: b.nodes, root: root_node })
}

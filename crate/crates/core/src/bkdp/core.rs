//! Compressed cores: the class representatives of partial decompositions.
//!
//! A [`Skeleton`] is a tree of restricted bags (vertex mask over the current
//! given bag plus true bag size). Normalizing a skeleton prunes leaves whose
//! mask is contained in their neighbor's, collapses maximal runs of
//! equal-mask degree-2 nodes into typical sequences, and relabels the result
//! canonically.

use std::collections::{HashMap, VecDeque};

use super::witness::{Arena, WId};
use crate::graph::Vertex;
use crate::treedec::TreeDecomposition;
use crate::typseq::{dominance_path, tau, TypicalSeq};

/// Bit set over positions of the sorted given bag.
pub type Mask = u64;

pub type CoreKey = Vec<u64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoreNode {
    pub mask: Mask,
    pub seq: TypicalSeq,
}

/// Canonically labeled compressed core. Node 0 is the root; nodes are in
/// preorder; `adj[x]` lists the parent first (except at the root) and then
/// the children. A degree-2 node's sequence runs from `adj[x][0]` to
/// `adj[x][1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressedCore {
    pub nodes: Vec<CoreNode>,
    pub adj: Vec<Vec<usize>>,
    pub maxbag: u32,
}

impl CompressedCore {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Single empty-mask node of size 0: the class of the empty decomposition.
    pub fn empty() -> Self {
        CompressedCore {
            nodes: vec![CoreNode { mask: 0, seq: TypicalSeq::single(0) }],
            adj: vec![Vec::new()],
            maxbag: 0,
        }
    }

    pub fn leaves(&self) -> usize {
        self.adj.iter().filter(|a| a.len() == 1).count()
    }

    /// Collision-free encoding of the canonical form including the maxbag.
    pub fn key(&self) -> CoreKey {
        let mut out = Vec::with_capacity(self.len() * 4 + 1);
        for (x, node) in self.nodes.iter().enumerate() {
            out.push(node.mask);
            out.push(node.seq.len() as u64);
            out.extend(node.seq.values().iter().map(|&v| v as u64));
            let children = self.adj[x].len() - usize::from(x != 0);
            out.push(children as u64);
        }
        out.push(self.maxbag as u64);
        out
    }

    /// Byte form of [`CompressedCore::key`].
    pub fn canonical_key(&self) -> Vec<u8> {
        self.key().iter().flat_map(|x| x.to_le_bytes()).collect()
    }

    /// Encoding of the tree and masks only.
    pub fn shape_key(&self) -> CoreKey {
        centers_of(&self.adj)
            .into_iter()
            .map(|r| {
                let mut enc = Vec::new();
                shape_encode(self, r, usize::MAX, &mut enc);
                enc
            })
            .min()
            .unwrap()
    }

    pub fn max_value(&self) -> u32 {
        self.nodes.iter().map(|n| n.seq.max_value()).max().unwrap_or(0)
    }
}

fn shape_encode(core: &CompressedCore, x: usize, parent: usize, out: &mut Vec<u64>) {
    let mut kids: Vec<Vec<u64>> = core.adj[x]
        .iter()
        .filter(|&&c| c != parent)
        .map(|&c| {
            let mut e = Vec::new();
            shape_encode(core, c, x, &mut e);
            e
        })
        .collect();
    kids.sort();
    out.push(core.nodes[x].mask);
    out.push(kids.len() as u64);
    for k in kids {
        out.extend(k);
    }
}

/// Shape encodings of every subtree when rooted at `root`.
pub(crate) fn rooted_shapes(core: &CompressedCore, root: usize) -> Vec<Vec<u64>> {
    let mut enc = vec![Vec::new(); core.len()];
    fn rec(core: &CompressedCore, x: usize, parent: usize, enc: &mut Vec<Vec<u64>>) {
        let kids: Vec<usize> = core.adj[x].iter().copied().filter(|&c| c != parent).collect();
        for &c in &kids {
            rec(core, c, x, enc);
        }
        let mut ks: Vec<&Vec<u64>> = kids.iter().map(|&c| &enc[c]).collect();
        ks.sort();
        let mut e = vec![core.nodes[x].mask, kids.len() as u64];
        for k in ks {
            e.extend(k.iter().copied());
        }
        enc[x] = e;
    }
    rec(core, root, usize::MAX, &mut enc);
    enc
}

pub(crate) fn centers_of(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&x| deg[x] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &x in &layer {
            for &y in &adj[x] {
                deg[y] -= 1;
                if deg[y] == 1 {
                    next.push(y);
                }
            }
        }
        layer = next;
    }
    layer.sort_unstable();
    layer
}

/// Result of relabeling a core canonically.
pub(crate) struct Canon {
    pub core: CompressedCore,
    /// Old node id to new node id.
    pub perm: Vec<usize>,
    /// Whether the node's sequence (and witness path) was reversed.
    pub flip: Vec<bool>,
}

fn oriented(seq: &TypicalSeq, adj: &[usize], from: usize) -> (TypicalSeq, bool) {
    if adj.len() == 2 && adj[0] != from {
        (seq.reversed(), true)
    } else {
        (seq.clone(), false)
    }
}

struct Encoder<'a> {
    nodes: &'a [CoreNode],
    adj: &'a [Vec<usize>],
}

impl Encoder<'_> {
    /// Encoding of the subtree at `x` hanging below `parent`, plus its
    /// children in canonical order.
    fn encode(&self, x: usize, parent: usize) -> (Vec<u64>, Vec<usize>) {
        let mut kids: Vec<(Vec<u64>, usize)> = self.adj[x]
            .iter()
            .filter(|&&c| c != parent)
            .map(|&c| (self.encode(c, x).0, c))
            .collect();
        kids.sort();
        let seq = if parent == usize::MAX {
            self.root_seq(x, &mut kids)
        } else {
            oriented(&self.nodes[x].seq, &self.adj[x], parent).0
        };
        let mut out = vec![self.nodes[x].mask, seq.len() as u64];
        out.extend(seq.values().iter().map(|&v| v as u64));
        out.push(kids.len() as u64);
        let order = kids.iter().map(|k| k.1).collect();
        for (k, _) in kids {
            out.extend(k);
        }
        (out, order)
    }

    fn root_seq(&self, x: usize, kids: &mut [(Vec<u64>, usize)]) -> TypicalSeq {
        let seq = &self.nodes[x].seq;
        if kids.len() != 2 {
            return seq.clone();
        }
        let forward = oriented(seq, &self.adj[x], kids[0].1).0;
        if kids[0].0 == kids[1].0 {
            let backward = oriented(seq, &self.adj[x], kids[1].1).0;
            if backward < forward {
                kids.swap(0, 1);
                return backward;
            }
        }
        forward
    }
}

/// Relabels a (possibly non-canonical) core into canonical form.
pub(crate) fn canonicalize(nodes: &[CoreNode], adj: &[Vec<usize>], maxbag: u32) -> Canon {
    let enc = Encoder { nodes, adj };
    let (root, _) = centers_of(adj)
        .into_iter()
        .map(|r| (r, enc.encode(r, usize::MAX).0))
        .min_by(|a, b| a.1.cmp(&b.1))
        .unwrap();
    let n = nodes.len();
    let mut perm = vec![usize::MAX; n];
    let mut flip = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut parent_of = vec![usize::MAX; n];
    let mut child_order: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut stack = vec![(root, usize::MAX)];
    while let Some((x, p)) = stack.pop() {
        perm[x] = order.len();
        order.push(x);
        parent_of[x] = p;
        let (_, kids) = enc.encode(x, p);
        for &c in kids.iter().rev() {
            stack.push((c, x));
        }
        child_order[x] = kids;
    }
    let mut new_nodes = Vec::with_capacity(n);
    let mut new_adj = Vec::with_capacity(n);
    for &x in &order {
        let p = parent_of[x];
        let from = if p == usize::MAX { child_order[x].first().copied().unwrap_or(usize::MAX) } else { p };
        let (seq, flipped) = if adj[x].len() == 2 { oriented(&nodes[x].seq, &adj[x], from) } else { (nodes[x].seq.clone(), false) };
        flip[x] = flipped;
        new_nodes.push(CoreNode { mask: nodes[x].mask, seq });
        let mut a = Vec::with_capacity(adj[x].len());
        if p != usize::MAX {
            a.push(perm[p]);
        }
        a.extend(child_order[x].iter().map(|&c| perm[c]));
        new_adj.push(a);
    }
    Canon { core: CompressedCore { nodes: new_nodes, adj: new_adj, maxbag }, perm, flip }
}

/// Uncompressed tree of restricted bags.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Skeleton {
    pub mask: Vec<Mask>,
    pub size: Vec<u32>,
    pub adj: Vec<Vec<usize>>,
    pub maxbag: u32,
}

impl Skeleton {
    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub(crate) fn add_node(&mut self, mask: Mask, size: u32) -> usize {
        self.mask.push(mask);
        self.size.push(size);
        self.adj.push(Vec::new());
        self.maxbag = self.maxbag.max(size);
        self.mask.len() - 1
    }

    pub(crate) fn replace_neighbor(&mut self, x: usize, old: usize, new: usize) {
        let p = self.adj[x].iter().position(|&y| y == old).expect("skeleton edge missing");
        self.adj[x][p] = new;
    }

    /// Subdivides every edge by a copy of each endpoint.
    pub(crate) fn with_copies(&self) -> Skeleton {
        let mut out = self.clone();
        for a in 0..self.len() {
            for &b in &self.adj[a] {
                if a < b {
                    let ca = out.add_node(self.mask[a], self.size[a]);
                    let cb = out.add_node(self.mask[b], self.size[b]);
                    out.replace_neighbor(a, b, ca);
                    out.replace_neighbor(b, a, cb);
                    out.adj[ca] = vec![a, cb];
                    out.adj[cb] = vec![ca, b];
                }
            }
        }
        out
    }

    /// Restricted skeleton of a decomposition for the given bag `y`.
    pub fn from_decomposition(td: &TreeDecomposition, y: &[Vertex]) -> Skeleton {
        let mut s = Skeleton::default();
        for bag in &td.bags {
            let mask = bag
                .iter()
                .filter_map(|v| y.binary_search(v).ok())
                .fold(0, |m, i| m | 1 << i);
            s.add_node(mask, bag.len() as u32);
        }
        for &(a, b) in &td.edges {
            s.adj[a].push(b);
            s.adj[b].push(a);
        }
        s
    }
}

/// Skeleton nodes paired with concrete witness paths.
pub(crate) struct Wit {
    pub arena: Arena,
    pub paths: Vec<Vec<WId>>,
}

impl Wit {
    /// Arena node of `x` facing its neighbor `y` (skeleton or core adjacency).
    pub fn attach(&self, adj: &[Vec<usize>], x: usize, y: usize) -> WId {
        let path = &self.paths[x];
        if path.len() == 1 || adj[x][0] == y {
            path[0]
        } else {
            debug_assert_eq!(adj[x].len(), 2);
            path[path.len() - 1]
        }
    }
}

/// Leaf pruning to the fixed point; returns the surviving node flags.
fn prune(s: &Skeleton) -> Vec<bool> {
    let n = s.len();
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = s.adj.iter().map(Vec::len).collect();
    let mut count = n;
    let mut queue: VecDeque<usize> = (0..n).filter(|&x| deg[x] == 1).collect();
    while let Some(x) = queue.pop_front() {
        if !alive[x] || deg[x] != 1 || count <= 1 {
            continue;
        }
        let y = s.adj[x].iter().copied().find(|&y| alive[y]).unwrap();
        if s.mask[x] & !s.mask[y] == 0 {
            alive[x] = false;
            count -= 1;
            deg[y] -= 1;
            if deg[y] == 1 {
                queue.push_back(y);
            }
        }
    }
    alive
}

/// Pruned skeleton as an explicit tree (the core before compression).
pub fn core_of(s: &Skeleton) -> Skeleton {
    let alive = prune(s);
    let lone = alive.iter().filter(|&&a| a).count() == 1;
    let mut index = vec![usize::MAX; s.len()];
    let mut out = Skeleton { maxbag: s.maxbag, ..Default::default() };
    for x in 0..s.len() {
        if alive[x] {
            index[x] = out.add_node(s.mask[x], s.size[x]);
            if lone {
                out.size[index[x]] = s.mask[x].count_ones();
            }
        }
    }
    out.maxbag = s.maxbag;
    for x in 0..s.len() {
        if alive[x] {
            out.adj[index[x]] = s.adj[x].iter().filter(|&&y| alive[y]).map(|&y| index[y]).collect();
        }
    }
    out
}

/// Prune, collapse and canonicalize; witness paths follow along when given,
/// together with the current bag.
///
/// A lone surviving node is recorded with the size of its restricted set:
/// a leaf holding exactly those vertices can always be attached to it.
pub(crate) fn normalize(s: &Skeleton, wit: Option<(&mut Wit, &[Vertex])>) -> CompressedCore {
    let alive = prune(s);
    let n = s.len();
    let pdeg: Vec<usize> = (0..n)
        .map(|x| if alive[x] { s.adj[x].iter().filter(|&&y| alive[y]).count() } else { 0 })
        .collect();
    let alive_nbrs = |x: usize| s.adj[x].iter().copied().filter(|&y| alive[y]).collect::<Vec<_>>();
    let in_run = |x: usize| alive[x] && pdeg[x] == 2;
    let mut comp = vec![usize::MAX; n];
    // Each compressed node: ordered member list and, for runs, the outside ends.
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut ends: Vec<Option<(usize, usize)>> = Vec::new();
    for x in 0..n {
        if !alive[x] || comp[x] != usize::MAX {
            continue;
        }
        let id = members.len();
        if !in_run(x) {
            comp[x] = id;
            members.push(vec![x]);
            ends.push(None);
            continue;
        }
        let same = |a: usize, b: usize| in_run(b) && s.mask[a] == s.mask[b];
        // Walk to one end of the run.
        let (mut prev, mut cur) = (usize::MAX, x);
        loop {
            let next = alive_nbrs(cur).into_iter().find(|&y| y != prev && same(cur, y));
            match next {
                Some(y) if y != x => {
                    prev = cur;
                    cur = y;
                }
                _ => break,
            }
        }
        let start = cur;
        let nb = alive_nbrs(start);
        let outside_start = if prev == usize::MAX {
            // `start == x` with at most one run neighbor: pick the side that is not in the run.
            nb.iter().copied().find(|&y| !same(start, y)).unwrap_or(nb[0])
        } else {
            nb.iter().copied().find(|&y| y != prev).unwrap()
        };
        let mut list = vec![start];
        let (mut p, mut c) = (outside_start, start);
        let outside_end = loop {
            let next = alive_nbrs(c).into_iter().find(|&y| y != p).unwrap();
            if same(c, next) && !list.contains(&next) {
                list.push(next);
                p = c;
                c = next;
            } else {
                break next;
            }
        };
        for &m in &list {
            comp[m] = id;
        }
        members.push(list);
        ends.push(Some((outside_start, outside_end)));
    }
    let mut nodes = Vec::with_capacity(members.len());
    let mut adj = Vec::with_capacity(members.len());
    for (id, list) in members.iter().enumerate() {
        match ends[id] {
            None => {
                let x = list[0];
                let size = if members.len() == 1 { s.mask[x].count_ones() } else { s.size[x] };
                nodes.push(CoreNode { mask: s.mask[x], seq: TypicalSeq::single(size) });
                adj.push(alive_nbrs(x).into_iter().map(|y| comp[y]).collect());
            }
            Some((a, b)) => {
                let sizes: Vec<u32> = list.iter().map(|&m| s.size[m]).collect();
                nodes.push(CoreNode { mask: s.mask[list[0]], seq: tau(&sizes) });
                adj.push(vec![comp[a], comp[b]]);
            }
        }
    }
    let canon = canonicalize(&nodes, &adj, s.maxbag);
    if let Some((w, y)) = wit {
        let mut new_paths = vec![Vec::new(); members.len()];
        for (id, list) in members.iter().enumerate() {
            let path = match ends[id] {
                None => {
                    let x = list[0];
                    let nb = alive_nbrs(x);
                    let keep = match nb.len() {
                        0 => {
                            let leaf = w.arena.add(mask_vertices(s.mask[x], y));
                            w.arena.link(leaf, w.paths[x][0]);
                            leaf
                        }
                        1 => w.attach(&s.adj, x, nb[0]),
                        _ => {
                            debug_assert!(w.paths[x].len() == 1 || nb.len() == 2);
                            w.paths[x][0]
                        }
                    };
                    vec![keep]
                }
                Some((a, _)) => {
                    let mut out = Vec::new();
                    let mut prev = a;
                    for &m in list {
                        let mut seg = w.paths[m].clone();
                        if seg.len() > 1 && s.adj[m][0] != prev {
                            seg.reverse();
                        }
                        out.extend(seg);
                        prev = m;
                    }
                    out
                }
            };
            let new_id = canon.perm[id];
            new_paths[new_id] = if canon.flip[id] { path.into_iter().rev().collect() } else { path };
        }
        w.paths = new_paths;
    }
    canon.core
}

/// Compressed core of a concrete decomposition for the given bag `y`.
pub fn compress(td: &TreeDecomposition, y: &[Vertex]) -> CompressedCore {
    drop_copies(normalize(&Skeleton::from_decomposition(td, y), None))
}

/// Removes run entries that repeat an adjacent node with the same
/// restricted set and the same size; a run left empty is contracted away.
/// Such an entry can always mirror its neighbor, so the class is unchanged.
pub(crate) fn drop_copies(core: CompressedCore) -> CompressedCore {
    let CompressedCore { mut nodes, mut adj, maxbag } = core;
    let mut changed = false;
    let mut gone = vec![false; nodes.len()];
    for x in 0..nodes.len() {
        if adj[x].len() != 2 {
            continue;
        }
        let mut vals = nodes[x].seq.values().to_vec();
        for side in 0..2 {
            let y = adj[x][side];
            let ny = &nodes[y];
            if vals.is_empty() || ny.mask != nodes[x].mask || ny.seq.len() != 1 {
                continue;
            }
            let end = if side == 0 { 0 } else { vals.len() - 1 };
            if vals[end] == ny.seq.first() {
                vals.remove(end);
                changed = true;
            }
        }
        if vals.len() == nodes[x].seq.len() {
            continue;
        }
        if vals.is_empty() {
            let (a, b) = (adj[x][0], adj[x][1]);
            for (u, w) in [(a, b), (b, a)] {
                let p = adj[u].iter().position(|&e| e == x).unwrap();
                adj[u][p] = w;
            }
            gone[x] = true;
        } else {
            nodes[x].seq = TypicalSeq::new(&vals);
        }
    }
    if !changed {
        return CompressedCore { nodes, adj, maxbag };
    }
    let mut index = vec![usize::MAX; nodes.len()];
    let mut kept = Vec::new();
    for x in 0..nodes.len() {
        if !gone[x] {
            index[x] = kept.len();
            kept.push(x);
        }
    }
    let new_nodes: Vec<CoreNode> = kept.iter().map(|&x| nodes[x].clone()).collect();
    let new_adj: Vec<Vec<usize>> = kept.iter().map(|&x| adj[x].iter().map(|&y| index[y]).collect()).collect();
    canonicalize(&new_nodes, &new_adj, maxbag).core
}

/// One skeleton node per sequence entry. Returns the skeleton and the first
/// skeleton id of each core node. With a witness, every core path is split
/// into per-entry paths along a dominance alignment.
pub(crate) fn expand(core: &CompressedCore, wit: Option<&mut Wit>) -> (Skeleton, Vec<usize>) {
    let mut s = Skeleton { maxbag: core.maxbag, ..Default::default() };
    let mut first = Vec::with_capacity(core.len());
    for node in &core.nodes {
        first.push(s.len());
        for &v in node.seq.values() {
            s.add_node(node.mask, v);
        }
    }
    s.maxbag = core.maxbag;
    let len = |c: usize| core.nodes[c].seq.len();
    let attach_id = |c: usize, d: usize| {
        if len(c) > 1 && core.adj[c][0] != d {
            first[c] + len(c) - 1
        } else {
            first[c]
        }
    };
    for c in 0..core.len() {
        let l = len(c);
        if l > 1 {
            for p in 0..l {
                let left = if p == 0 { attach_id(core.adj[c][0], c) } else { first[c] + p - 1 };
                let right = if p == l - 1 { attach_id(core.adj[c][1], c) } else { first[c] + p + 1 };
                s.adj[first[c] + p] = vec![left, right];
            }
        } else {
            s.adj[first[c]] = core.adj[c].iter().map(|&d| attach_id(d, c)).collect();
        }
    }
    if let Some(w) = wit {
        // Current arena endpoint of every core edge, per side.
        let mut att: Vec<Vec<WId>> = (0..core.len())
            .map(|c| core.adj[c].iter().map(|&d| w.attach(&core.adj, c, d)).collect())
            .collect();
        let mut paths: Vec<Vec<WId>> = vec![Vec::new(); s.len()];
        for c in 0..core.len() {
            let l = len(c);
            let path = w.paths[c].clone();
            if l == 1 {
                paths[first[c]] = path;
                continue;
            }
            let sizes: Vec<u32> = path.iter().map(|&x| w.arena.size(x)).collect();
            let align = dominance_path(&sizes, core.nodes[c].seq.values())
                .expect("witness path not dominated by its class sequence");
            let mut tail = usize::MAX;
            for (k, &(wi, pos)) in align.iter().enumerate() {
                if k > 0 && align[k - 1].0 == wi {
                    let copy = w.arena.copy(path[wi]);
                    if wi + 1 < path.len() {
                        w.arena.subdivide(tail, path[wi + 1], copy);
                    } else {
                        let d = core.adj[c][1];
                        let j = core.adj[d].iter().position(|&e| e == c).unwrap();
                        w.arena.subdivide(tail, att[d][j], copy);
                        att[c][1] = copy;
                    }
                    tail = copy;
                } else {
                    tail = path[wi];
                }
                paths[first[c] + pos].push(tail);
            }
        }
        w.paths = paths;
    }
    (s, first)
}

/// Global vertex ids of a mask over the sorted bag `y`.
pub(crate) fn mask_vertices(mask: Mask, y: &[Vertex]) -> Vec<Vertex> {
    (0..y.len()).filter(|&i| mask >> i & 1 == 1).map(|i| y[i]).collect()
}

pub(crate) fn insert_bit(m: Mask, pos: usize) -> Mask {
    let low = (1u64 << pos) - 1;
    (m & low) | ((m & !low) << 1)
}

pub(crate) fn remove_bit(m: Mask, pos: usize) -> Mask {
    let low = (1u64 << pos) - 1;
    (m & low) | ((m >> 1) & !low)
}

/// Cheap structural sanity checks used by tests.
pub fn check_core(core: &CompressedCore) -> Result<(), String> {
    let n = core.len();
    let edges: usize = core.adj.iter().map(Vec::len).sum();
    if n == 0 || edges != 2 * (n - 1) {
        return Err("not a tree".into());
    }
    for x in 0..n {
        let node = &core.nodes[x];
        if node.seq.len() > 1 && core.adj[x].len() != 2 {
            return Err(format!("node {x}: sequence on a non-path node"));
        }
        if node.seq.max_value() > core.maxbag {
            return Err(format!("node {x}: value above maxbag"));
        }
        if node.seq.min_value() < node.mask.count_ones() {
            return Err(format!("node {x}: size below mask size"));
        }
        if core.adj[x].len() == 1 && n > 1 {
            let y = core.adj[x][0];
            if node.mask & !core.nodes[y].mask == 0 {
                return Err(format!("node {x}: prunable leaf"));
            }
        }
        if core.adj[x].len() == 2 {
            for &y in &core.adj[x] {
                if core.adj[y].len() == 2 && core.nodes[y].mask == node.mask {
                    return Err(format!("nodes {x} and {y}: uncollapsed run"));
                }
            }
        }
    }
    Ok(())
}

pub(crate) type KeyIndex = HashMap<CoreKey, usize>;

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn path_skeleton(masks: &[Mask], sizes: &[u32]) -> Skeleton {
        let mut s = Skeleton::default();
        for (&m, &z) in masks.iter().zip(sizes) {
            s.add_node(m, z);
        }
        for i in 1..masks.len() {
            s.adj[i - 1].push(i);
            s.adj[i].push(i - 1);
        }
        s
    }

    #[test]
    fn run_collapses_to_typical_sequence() {
        // Constant interior mask between two distinct leaves.
        let mut masks = vec![0b001];
        masks.extend([0b110; 6]);
        masks.push(0b100 | 0b1000);
        let mut sizes = vec![3];
        sizes.extend([2, 5, 3, 6, 4, 3]);
        sizes.push(4);
        let mut s = path_skeleton(&masks, &sizes);
        s.mask[0] = 0b011;
        s.maxbag = 6;
        let core = normalize(&s, None);
        check_core(&core).unwrap();
        assert_eq!(core.len(), 3);
        let mid = core.nodes.iter().find(|n| n.mask == 0b110).unwrap();
        let vals = mid.seq.values().to_vec();
        assert!(vals == [2, 6, 3] || vals == [3, 6, 2]);
    }

    #[test]
    fn identical_restrictions_collapse_to_one_node() {
        let s = path_skeleton(&[0b11, 0b11, 0b11], &[4, 2, 3]);
        let core = normalize(&s, None);
        assert_eq!(core.len(), 1);
        assert_eq!(core.nodes[0].seq.values(), &[2]);
    }

    #[test]
    fn core_is_kept_when_leaves_have_private_vertices() {
        let s = path_skeleton(&[0b011, 0b001, 0b101], &[2, 1, 2]);
        let core = core_of(&s);
        assert_eq!(core, s);
    }

    #[test]
    fn hub_with_two_runs() {
        // Star center 0 with three arms; two arms are two-node runs.
        let mut s = Skeleton::default();
        let c = s.add_node(0b0111, 3);
        let a1 = s.add_node(0b0011, 2);
        let a2 = s.add_node(0b0011, 3);
        let la = s.add_node(0b1001, 2);
        let b1 = s.add_node(0b0110, 2);
        let b2 = s.add_node(0b0110, 2);
        let lb = s.add_node(0b10000 | 0b0100, 2);
        let lc = s.add_node(0b100000 | 0b0001, 2);
        for (x, y) in [(c, a1), (a1, a2), (a2, la), (c, b1), (b1, b2), (b2, lb), (c, lc)] {
            s.adj[x].push(y);
            s.adj[y].push(x);
        }
        s.maxbag = 3;
        let core = normalize(&s, None);
        check_core(&core).unwrap();
        assert_eq!(core.len(), 6);
        let seqs: Vec<Vec<u32>> = core.nodes.iter().filter(|n| n.seq.len() > 1).map(|n| n.seq.values().to_vec()).collect();
        assert_eq!(seqs.len(), 1);
    }

    #[test]
    fn relabeling_gives_same_key() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(1..9);
            let mut s = Skeleton::default();
            for _ in 0..n {
                s.add_node(rng.gen_range(0..8), rng.gen_range(3..6));
            }
            for i in 1..n {
                let p = rng.gen_range(0..i);
                s.adj[i].push(p);
                s.adj[p].push(i);
            }
            s.maxbag = 6;
            let core = normalize(&s, None);
            check_core(&core).unwrap();
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let mut t = Skeleton { maxbag: 6, ..Default::default() };
            let mut inv = vec![0; n];
            for (new, &old) in perm.iter().enumerate() {
                inv[old] = new;
            }
            for &old in &perm {
                t.add_node(s.mask[old], s.size[old]);
            }
            for &old in &perm {
                let mut nb: Vec<usize> = s.adj[old].iter().map(|&y| inv[y]).collect();
                nb.shuffle(&mut rng);
                t.adj[inv[old]] = nb;
            }
            t.maxbag = 6;
            let other = normalize(&t, None);
            // Structure and masks never depend on labels.
            assert_eq!(core.shape_key(), other.shape_key());
            assert_eq!(core.maxbag, other.maxbag);
            if core.len() > 1 {
                assert_eq!(core.key(), other.key());
            }
        }
    }

    #[test]
    fn canonical_form_is_stable() {
        let s = path_skeleton(&[0b01, 0b11, 0b11, 0b10], &[1, 3, 2, 1]);
        let core = normalize(&s, None);
        let (expanded, _) = expand(&core, None);
        assert_eq!(normalize(&expanded, None), core);
        let c = canonicalize(&core.nodes, &core.adj, core.maxbag);
        assert_eq!(c.core, core);
    }

    #[test]
    fn maxbag_distinguishes_keys() {
        let mut a = CompressedCore::empty();
        let b = a.clone();
        a.maxbag = 3;
        assert_ne!(a.key(), b.key());
        assert_eq!(a.shape_key(), b.shape_key());
    }

    #[test]
    fn bit_shuffles() {
        assert_eq!(insert_bit(0b1011, 2), 0b10011);
        assert_eq!(remove_bit(0b10011, 2), 0b1011);
        assert_eq!(remove_bit(0b111, 0), 0b11);
    }
}

//! Fixed-width decision by dynamic programming over a nice tree
//! decomposition, with witness reconstruction.
//!
//! Each table entry is one equivalence class of partial decompositions of
//! the graph processed so far, represented by a [`CompressedCore`]. Tables
//! remember how every class was produced; a witness is rebuilt by replaying
//! the chosen lineage on concrete bags.

mod core;
mod transitions;
mod witness;

use std::collections::HashMap;
use std::fmt;
use std::time::{Duration, Instant};

use self::core::{drop_copies, expand, insert_bit, normalize, remove_bit, KeyIndex, Wit};
use self::transitions::{
    apply_introduce, apply_join, dominates, introduce_choices, isomorphisms, join_products, IntroChoice, WitCtx,
};
use self::witness::Arena;
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::treedec::{NiceKind, NiceTreeDecomposition, TreeDecomposition};

pub use self::core::{check_core, compress, core_of, CompressedCore, CoreKey, CoreNode, Mask, Skeleton};

/// Largest width the mask representation supports.
pub const MAX_K: usize = 62;

#[derive(Clone, Debug, Default)]
pub struct Options {
    /// Keep every class representative after its parent has been computed.
    pub retain_cores: bool,
    /// Emit one log line per processed node.
    pub trace: bool,
    /// Worker threads for join nodes.
    pub jobs: usize,
    /// Keep classes that differ only in their largest bag. Off, a class
    /// keeps the smallest such bag, which cannot change feasibility since
    /// every size is already capped at `k + 1`.
    pub exact_classes: bool,
}

#[derive(Clone, Debug)]
enum Provenance {
    Leaf,
    Introduce { child: usize, choice: IntroChoice },
    Forget { child: usize },
    Join { left: usize, right: usize, iso: Vec<usize>, cells: Vec<Vec<(usize, usize)>> },
}

#[derive(Clone, Debug)]
pub struct ClassEntry {
    pub key: CoreKey,
    pub maxbag: u32,
    /// Dropped once no longer needed unless cores are retained.
    pub core: Option<CompressedCore>,
    provenance: Provenance,
}

#[derive(Clone, Debug, Default)]
pub struct ClassTable {
    /// Sorted bag of the nice node.
    pub bag: Vec<Vertex>,
    pub entries: Vec<ClassEntry>,
}

impl ClassTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct TraceLine {
    pub node: usize,
    pub kind: &'static str,
    pub bag_size: usize,
    pub classes: usize,
    pub elapsed: Duration,
}

impl fmt::Display for TraceLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "node {:>5} {:<9} bag {:>2} classes {:>6} {:>9.3} ms",
            self.node,
            self.kind,
            self.bag_size,
            self.classes,
            self.elapsed.as_secs_f64() * 1e3
        )
    }
}

#[derive(Clone, Debug)]
pub struct Decision {
    pub k: usize,
    pub feasible: bool,
    /// Smallest largest-bag size among accepted root classes.
    pub min_maxbag: Option<u32>,
    /// Whether the tables hold exact class sets (no witness replay).
    pub exact: bool,
    pub tables: Vec<ClassTable>,
    pub trace: Vec<TraceLine>,
}

struct Builder {
    table: ClassTable,
    index: KeyIndex,
    exact: bool,
}

impl Builder {
    fn new(bag: Vec<Vertex>, exact: bool) -> Self {
        Builder { table: ClassTable { bag, entries: Vec::new() }, index: HashMap::new(), exact }
    }

    fn insert(&mut self, core: CompressedCore, provenance: Provenance) {
        let core = if self.exact { drop_copies(core) } else { core };
        let key = core.key();
        let lookup = if self.exact { key.clone() } else { key[..key.len() - 1].to_vec() };
        if let Some(&i) = self.index.get(&lookup) {
            let old = &mut self.table.entries[i];
            if !self.exact && core.maxbag < old.maxbag {
                *old = ClassEntry { key, maxbag: core.maxbag, core: Some(core), provenance };
            }
            return;
        }
        self.index.insert(lookup, self.table.entries.len());
        self.table.entries.push(ClassEntry { key, maxbag: core.maxbag, core: Some(core), provenance });
    }
}

/// Drops every class whose sequences are all matched by superior ones of
/// another class over the same tree and vertex sets.
fn prune_dominated(table: ClassTable) -> ClassTable {
    let mut groups: HashMap<CoreKey, Vec<usize>> = HashMap::new();
    for i in 0..table.len() {
        groups.entry(core_ref(&table, i).shape_key()).or_default().push(i);
    }
    // Superiority never raises a node's extremes, so dominators sort first.
    let weight = |i: usize| -> u64 {
        let c = core_ref(&table, i);
        c.nodes.iter().map(|n| u64::from(n.seq.max_value() + n.seq.min_value())).sum::<u64>() + u64::from(c.maxbag)
    };
    let mut keep = vec![false; table.len()];
    for members in groups.values() {
        let mut order = members.clone();
        order.sort_by_key(|&i| (weight(i), i));
        let mut front: Vec<(u64, usize)> = Vec::new();
        for i in order {
            let w = weight(i);
            let c = core_ref(&table, i);
            if front.iter().any(|&(_, j)| dominates(core_ref(&table, j), c)) {
                continue;
            }
            front.retain(|&(wj, j)| wj < w || !dominates(c, core_ref(&table, j)));
            front.push((w, i));
        }
        for (_, i) in front {
            keep[i] = true;
        }
    }
    let ClassTable { bag, entries } = table;
    ClassTable { bag, entries: entries.into_iter().zip(keep).filter_map(|(e, k)| k.then_some(e)).collect() }
}

fn local_mask(neighbors: &[Vertex], bag: &[Vertex]) -> Mask {
    neighbors
        .iter()
        .filter_map(|u| bag.binary_search(u).ok())
        .fold(0, |m, i| m | 1 << i)
}

fn core_ref(table: &ClassTable, i: usize) -> &CompressedCore {
    table.entries[i].core.as_ref().expect("class representative was dropped")
}

fn cap_of(k: usize) -> Result<u32> {
    if k > MAX_K {
        return Err(Error::Refused(format!("width {k} exceeds the supported maximum {MAX_K}")));
    }
    Ok(k as u32 + 1)
}

/// Table of the empty bag: the empty decomposition.
pub fn leaf_table() -> ClassTable {
    let mut out = Builder::new(Vec::new(), true);
    out.insert(CompressedCore::empty(), Provenance::Leaf);
    out.table
}

/// Table after introducing a single vertex into the empty bag.
pub fn init_leaf_parent(v: Vertex) -> ClassTable {
    transition_introduce(&leaf_table(), v, &[], 0).expect("width 0 is supported")
}

/// Adds `v`, whose neighbors among the bag are `neighbors`, to every class.
pub fn transition_introduce(child: &ClassTable, v: Vertex, neighbors: &[Vertex], k: usize) -> Result<ClassTable> {
    introduce_with(child, v, neighbors, k, true)
}

fn introduce_with(child: &ClassTable, v: Vertex, neighbors: &[Vertex], k: usize, exact: bool) -> Result<ClassTable> {
    let cap = cap_of(k)?;
    let mut bag = child.bag.clone();
    let pos = match bag.binary_search(&v) {
        Ok(_) => return Err(Error::contract(format!("vertex {v} is already in the bag"))),
        Err(p) => p,
    };
    bag.insert(pos, v);
    if bag.len() > 64 {
        return Err(Error::Refused("bag above 64 vertices".into()));
    }
    let need = local_mask(neighbors, &bag);
    let vbit = 1 << pos;
    let mut out = Builder::new(bag, exact);
    for ci in 0..child.len() {
        let (mut skel, _) = expand(core_ref(child, ci), None);
        for m in &mut skel.mask {
            *m = insert_bit(*m, pos);
        }
        if exact {
            skel = skel.with_copies();
        }
        for choice in introduce_choices(&skel, need, cap, exact) {
            let mut s = skel.clone();
            apply_introduce(&mut s, &choice, vbit, None);
            out.insert(normalize(&s, None), Provenance::Introduce { child: ci, choice });
        }
    }
    Ok(out.table)
}

/// Removes `v` from the bag of every class.
pub fn transition_forget(child: &ClassTable, v: Vertex) -> Result<ClassTable> {
    forget_with(child, v, true)
}

fn forget_with(child: &ClassTable, v: Vertex, exact: bool) -> Result<ClassTable> {
    let pos = child
        .bag
        .binary_search(&v)
        .map_err(|_| Error::contract(format!("vertex {v} is not in the bag")))?;
    let mut bag = child.bag.clone();
    bag.remove(pos);
    let mut out = Builder::new(bag, exact);
    for ci in 0..child.len() {
        let (mut skel, _) = expand(core_ref(child, ci), None);
        for m in &mut skel.mask {
            *m = remove_bit(*m, pos);
        }
        out.insert(normalize(&skel, None), Provenance::Forget { child: ci });
    }
    Ok(out.table)
}

fn join_range(
    left: &ClassTable,
    right: &ClassTable,
    lefts: &[usize],
    by_shape: &HashMap<CoreKey, Vec<usize>>,
    cap: u32,
    exact: bool,
) -> Builder {
    let mut out = Builder::new(left.bag.clone(), exact);
    for &li in lefts {
        let a = core_ref(left, li);
        let Some(group) = by_shape.get(&a.shape_key()) else { continue };
        for &ri in group {
            let b = core_ref(right, ri);
            for iso in isomorphisms(a, b) {
                for (nodes, maxbag, cells) in join_products(a, b, &iso, cap) {
                    let canon = self::core::canonicalize(&nodes, &a.adj, maxbag);
                    out.insert(canon.core, Provenance::Join { left: li, right: ri, iso: iso.clone(), cells });
                }
            }
        }
    }
    out
}

/// Combines every pair of classes with matching trees and vertex sets.
/// With `jobs > 1` left classes are split across threads; the result does
/// not depend on `jobs`.
pub fn transition_join(left: &ClassTable, right: &ClassTable, k: usize, jobs: usize) -> Result<ClassTable> {
    join_with(left, right, k, jobs, true)
}

fn join_with(left: &ClassTable, right: &ClassTable, k: usize, jobs: usize, exact: bool) -> Result<ClassTable> {
    let cap = cap_of(k)?;
    if left.bag != right.bag {
        return Err(Error::contract("join of tables over different bags"));
    }
    let mut by_shape: HashMap<CoreKey, Vec<usize>> = HashMap::new();
    for ri in 0..right.len() {
        by_shape.entry(core_ref(right, ri).shape_key()).or_default().push(ri);
    }
    let lefts: Vec<usize> = (0..left.len()).collect();
    let jobs = jobs.max(1).min(lefts.len().max(1));
    if jobs == 1 {
        return Ok(join_range(left, right, &lefts, &by_shape, cap, exact).table);
    }
    let chunk = lefts.len().div_ceil(jobs);
    let parts: Vec<Builder> = std::thread::scope(|scope| {
        let handles: Vec<_> = lefts
            .chunks(chunk)
            .map(|c| {
                let by_shape = &by_shape;
                scope.spawn(move || join_range(left, right, c, by_shape, cap, exact))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("join worker panicked")).collect()
    });
    let mut out = Builder::new(left.bag.clone(), exact);
    for part in parts {
        for e in part.table.entries {
            out.insert(e.core.unwrap(), e.provenance);
        }
    }
    Ok(out.table)
}

/// Decides whether `g` has treewidth at most `k`, given a nice decomposition.
pub fn decide(g: &Graph, nice: &NiceTreeDecomposition, k: usize, opts: &Options) -> Result<Decision> {
    cap_of(k)?;
    if nice.width() > 63 {
        return Err(Error::Refused("given decomposition has a bag above 64 vertices".into()));
    }
    nice.check(g).map_err(Error::contract)?;
    let mut tables: Vec<ClassTable> = vec![ClassTable::default(); nice.len()];
    let mut trace = Vec::new();
    for t in nice.post_order() {
        let start = Instant::now();
        let node = &nice.nodes[t];
        let (kind, table) = match node.kind {
            NiceKind::Leaf => ("leaf", leaf_table()),
            NiceKind::Introduce(v) => {
                ("introduce", introduce_with(&tables[node.children[0]], v, g.neighbors(v), k, opts.exact_classes)?)
            }
            NiceKind::Forget(v) => ("forget", forget_with(&tables[node.children[0]], v, opts.exact_classes)?),
            NiceKind::Join => {
                let (l, r) = (&tables[node.children[0]], &tables[node.children[1]]);
                ("join", join_with(l, r, k, opts.jobs, opts.exact_classes)?)
            }
        };
        let table = if opts.exact_classes { table } else { prune_dominated(table) };
        if !opts.retain_cores {
            for &c in &node.children {
                for e in &mut tables[c].entries {
                    e.core = None;
                }
            }
        }
        let line = TraceLine { node: t, kind, bag_size: node.bag.len(), classes: table.len(), elapsed: start.elapsed() };
        if opts.trace {
            log::info!("{line}");
        }
        trace.push(line);
        tables[t] = table;
    }
    let root = &tables[nice.root];
    let min_maxbag = root.entries.iter().map(|e| e.maxbag).min();
    Ok(Decision { k, feasible: min_maxbag.is_some(), min_maxbag, exact: opts.exact_classes, tables, trace })
}

impl Decision {
    pub fn root_classes<'a>(&'a self, nice: &NiceTreeDecomposition) -> &'a ClassTable {
        &self.tables[nice.root]
    }
}

/// Rebuilds a decomposition of width at most `k` from an accepting decision.
pub fn reconstruct(g: &Graph, nice: &NiceTreeDecomposition, decision: &Decision) -> Result<TreeDecomposition> {
    if decision.exact {
        return Err(Error::contract("witness replay needs a decision-mode run"));
    }
    let root_table = &decision.tables[nice.root];
    let best = (0..root_table.len())
        .min_by_key(|&i| root_table.entries[i].maxbag)
        .ok_or_else(|| Error::contract("no accepted class to reconstruct"))?;
    // Chosen class at every node, top-down.
    let mut chosen = vec![usize::MAX; nice.len()];
    chosen[nice.root] = best;
    let order = nice.post_order();
    for &t in order.iter().rev() {
        let entry = &decision.tables[t].entries[chosen[t]];
        let kids = &nice.nodes[t].children;
        match &entry.provenance {
            Provenance::Leaf => {}
            Provenance::Introduce { child, .. } | Provenance::Forget { child } => chosen[kids[0]] = *child,
            Provenance::Join { left, right, .. } => {
                chosen[kids[0]] = *left;
                chosen[kids[1]] = *right;
            }
        }
    }
    let mut states: Vec<Option<(CompressedCore, Wit)>> = (0..nice.len()).map(|_| None).collect();
    for &t in &order {
        let node = &nice.nodes[t];
        let entry = &decision.tables[t].entries[chosen[t]];
        let state = match (&entry.provenance, node.kind) {
            (Provenance::Leaf, _) => {
                let mut arena = Arena::default();
                let w = arena.add(Vec::new());
                (CompressedCore::empty(), Wit { arena, paths: vec![vec![w]] })
            }
            (Provenance::Introduce { choice, .. }, NiceKind::Introduce(v)) => {
                let (core, mut wit) = states[node.children[0]].take().unwrap();
                let pos = node.bag.binary_search(&v).unwrap();
                let (mut skel, _) = expand(&core, Some(&mut wit));
                for m in &mut skel.mask {
                    *m = insert_bit(*m, pos);
                }
                let ctx = WitCtx { wit: &mut wit, vertex: v, bag: &node.bag };
                apply_introduce(&mut skel, choice, 1 << pos, Some(ctx));
                let core = normalize(&skel, Some((&mut wit, &node.bag)));
                (core, wit)
            }
            (Provenance::Forget { .. }, NiceKind::Forget(v)) => {
                let (core, mut wit) = states[node.children[0]].take().unwrap();
                let pos = decision.tables[node.children[0]].bag.binary_search(&v).unwrap();
                let (mut skel, _) = expand(&core, Some(&mut wit));
                for m in &mut skel.mask {
                    *m = remove_bit(*m, pos);
                }
                let core = normalize(&skel, Some((&mut wit, &node.bag)));
                (core, wit)
            }
            (Provenance::Join { iso, cells, .. }, NiceKind::Join) => {
                let (a, wa) = states[node.children[0]].take().unwrap();
                let (b, wb) = states[node.children[1]].take().unwrap();
                apply_join(&a, wa, &b, wb, iso, cells)
            }
            _ => return Err(Error::contract(format!("node {t}: provenance does not match node kind"))),
        };
        if state.0.key() != entry.key {
            return Err(Error::contract(format!("node {t}: replayed class differs from the recorded one")));
        }
        states[t] = Some(state);
    }
    let (_, wit) = states[nice.root].take().unwrap();
    let td = wit.arena.to_tree_decomposition().make_non_redundant();
    let report = td.validate(g);
    if !report.is_valid() {
        return Err(Error::contract(format!("reconstructed decomposition is invalid: {report}")));
    }
    if td.width() > decision.k as isize {
        return Err(Error::contract(format!("reconstructed width {} exceeds {}", td.width(), decision.k)));
    }
    Ok(td)
}

/// Decision plus witness in one call; `None` when the width exceeds `k`.
pub fn solve(g: &Graph, nice: &NiceTreeDecomposition, k: usize, opts: &Options) -> Result<Option<TreeDecomposition>> {
    let mut d = decide(g, nice, k, opts)?;
    if !d.feasible {
        return Ok(None);
    }
    if d.exact {
        d = decide(g, nice, k, &Options { exact_classes: false, ..opts.clone() })?;
    }
    reconstruct(g, nice, &d).map(Some)
}

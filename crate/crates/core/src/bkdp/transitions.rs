//! Introduce, forget and join on class representatives.

use super::core::{canonicalize, centers_of, expand, mask_vertices, CompressedCore, CoreNode, Mask, Skeleton, Wit};
use super::witness::WId;
use crate::graph::Vertex;
use crate::typseq::{merge_sum, superior, tau};

/// How an introduced vertex enters a skeleton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum IntroChoice {
    /// Add the vertex to a connected set of skeleton nodes; every listed
    /// boundary edge `(inside, outside)` first gets an unchanged copy of its
    /// inside end.
    Cover { set: Vec<usize>, dups: Vec<(usize, usize)> },
    /// Hang a branch below `anchor`: nodes restricted to `chain`, then a leaf
    /// `leaf ∪ {v}`. A path node anchors on a copy, optionally with a second
    /// copy toward its far neighbor.
    Branch { anchor: usize, split: bool, chain: Vec<Mask>, leaf: Mask },
}

/// Concrete data needed to mirror a transition on a witness.
pub(crate) struct WitCtx<'a> {
    pub wit: &'a mut Wit,
    pub vertex: Vertex,
    pub bag: &'a [Vertex],
}

fn subsets_containing(of: Mask, need: Mask) -> impl Iterator<Item = Mask> {
    let free = of & !need;
    let mut sub = free;
    let mut done = need & !of != 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = sub | need;
        if sub == 0 {
            done = true;
        } else {
            sub = (sub - 1) & free;
        }
        Some(out)
    })
}

/// Connected node sets of a forest restricted to `allowed`, each exactly once.
fn connected_sets(adj: &[Vec<usize>], allowed: &[bool], emit: &mut impl FnMut(&[usize])) {
    fn grow(
        adj: &[Vec<usize>],
        allowed: &[bool],
        root: usize,
        set: &mut Vec<usize>,
        frontier: Vec<usize>,
        closed: &mut Vec<bool>,
        emit: &mut impl FnMut(&[usize]),
    ) {
        emit(set);
        let mut frontier = frontier;
        while let Some(u) = frontier.pop() {
            let mut next = frontier.clone();
            let mut opened = Vec::new();
            for &w in &adj[u] {
                if w > root && allowed[w] && !closed[w] {
                    closed[w] = true;
                    opened.push(w);
                    next.push(w);
                }
            }
            set.push(u);
            grow(adj, allowed, root, set, next, closed, emit);
            set.pop();
            for w in opened {
                closed[w] = false;
            }
            // `u` stays closed for the remaining siblings.
        }
    }
    let n = adj.len();
    for root in 0..n {
        if !allowed[root] {
            continue;
        }
        let mut closed = vec![false; n];
        closed[root] = true;
        let mut frontier = Vec::new();
        for &w in &adj[root] {
            if w > root && allowed[w] {
                closed[w] = true;
                frontier.push(w);
            }
        }
        let mut set = vec![root];
        grow(adj, allowed, root, &mut set, frontier, &mut closed, emit);
    }
}

/// Every way to introduce a vertex whose neighbors in the bag are `need`.
/// Masks in `s` already carry the vertex's (unset) position.
/// With `plain`, no copies or splits are added; the caller has already
/// placed copies on every edge.
pub(crate) fn introduce_choices(s: &Skeleton, need: Mask, cap: u32, plain: bool) -> Vec<IntroChoice> {
    let mut out = Vec::new();
    let allowed: Vec<bool> = s.size.iter().map(|&z| z < cap).collect();
    connected_sets(&s.adj, &allowed, &mut |set| {
        let union = set.iter().fold(0, |m, &x| m | s.mask[x]);
        if need & !union != 0 {
            return;
        }
        let mut set = set.to_vec();
        set.sort_unstable();
        let dups = if plain {
            Vec::new()
        } else {
            set.iter()
                .flat_map(|&b| s.adj[b].iter().map(move |&o| (b, o)))
                .filter(|&(b, o)| set.binary_search(&o).is_err() && (s.adj[b].len() == 2 || s.mask[b] == s.mask[o]))
                .collect()
        };
        out.push(IntroChoice::Cover { set, dups });
    });
    for anchor in 0..s.len() {
        let split = !plain && s.adj[anchor].len() == 2;
        let mut chain = Vec::new();
        branch_choices(s.mask[anchor], true, need, cap, (anchor, split), &mut chain, &mut out);
    }
    out
}

fn branch_choices(
    top: Mask,
    first: bool,
    need: Mask,
    cap: u32,
    at: (usize, bool),
    chain: &mut Vec<Mask>,
    out: &mut Vec<IntroChoice>,
) {
    let (anchor, split) = at;
    for leaf in subsets_containing(top, need) {
        if leaf.count_ones() < cap {
            out.push(IntroChoice::Branch { anchor, split, chain: chain.clone(), leaf });
        }
    }
    for next in subsets_containing(top, need) {
        if (!first && next == top) || next.count_ones() > cap {
            continue;
        }
        chain.push(next);
        branch_choices(next, false, need, cap, at, chain, out);
        chain.pop();
    }
}

/// Applies an introduce choice for the vertex at bit `vbit`.
pub(crate) fn apply_introduce(s: &mut Skeleton, choice: &IntroChoice, vbit: Mask, mut ctx: Option<WitCtx<'_>>) {
    match choice {
        IntroChoice::Cover { set, dups } => {
            for &(b, o) in dups {
                let idx = s.adj[b].iter().position(|&y| y == o).expect("boundary edge");
                let wpair = ctx.as_ref().map(|c| (c.wit.attach(&s.adj, b, o), c.wit.attach(&s.adj, o, b)));
                let d = s.add_node(s.mask[b], s.size[b]);
                s.adj[b][idx] = d;
                s.replace_neighbor(o, b, d);
                s.adj[d] = vec![b, o];
                if let (Some(c), Some((wb, wo))) = (ctx.as_mut(), wpair) {
                    let wd = c.wit.arena.copy(wb);
                    c.wit.arena.subdivide(wb, wo, wd);
                    c.wit.paths.push(vec![wd]);
                }
            }
            for &b in set {
                s.mask[b] |= vbit;
                s.size[b] += 1;
                s.maxbag = s.maxbag.max(s.size[b]);
                if let Some(c) = ctx.as_mut() {
                    for &w in &c.wit.paths[b] {
                        c.wit.arena.insert_vertex(w, c.vertex);
                    }
                }
            }
        }
        IntroChoice::Branch { anchor, split, chain, leaf } => {
            let x = *anchor;
            let (mut prev, mut wprev) = if s.adj[x].len() == 2 {
                let y = s.adj[x][1];
                let wpair = ctx.as_ref().map(|c| (c.wit.attach(&s.adj, x, y), c.wit.attach(&s.adj, y, x)));
                let h = s.add_node(s.mask[x], s.size[x]);
                s.adj[x][1] = h;
                s.adj[h] = vec![x];
                let far = if *split {
                    let d = s.add_node(s.mask[x], s.size[x]);
                    s.adj[h].push(d);
                    s.adj[d] = vec![h, y];
                    d
                } else {
                    s.adj[h].push(y);
                    h
                };
                s.replace_neighbor(y, x, far);
                let mut wh = usize::MAX;
                if let (Some(c), Some((wx, wy))) = (ctx.as_mut(), wpair) {
                    wh = c.wit.arena.copy(wx);
                    c.wit.arena.subdivide(wx, wy, wh);
                    c.wit.paths.push(vec![wh]);
                    if *split {
                        let wd = c.wit.arena.copy(wx);
                        c.wit.arena.subdivide(wh, wy, wd);
                        c.wit.paths.push(vec![wd]);
                    }
                }
                (h, wh)
            } else {
                let w = ctx.as_ref().map_or(usize::MAX, |c| c.wit.paths[x][0]);
                (x, w)
            };
            let mut hang = |s: &mut Skeleton, mask: Mask, extra: bool, ctx: &mut Option<WitCtx<'_>>| {
                let size = mask.count_ones() + u32::from(extra);
                let node = s.add_node(if extra { mask | vbit } else { mask }, size);
                s.adj[prev].push(node);
                s.adj[node].push(prev);
                if let Some(c) = ctx.as_mut() {
                    let mut bag = mask_vertices(mask & !vbit, c.bag);
                    if extra {
                        bag.push(c.vertex);
                    }
                    let w = c.wit.arena.add(bag);
                    c.wit.arena.link(wprev, w);
                    c.wit.paths.push(vec![w]);
                    wprev = w;
                }
                prev = node;
            };
            for &m in chain {
                hang(s, m, false, &mut ctx);
            }
            hang(s, *leaf, true, &mut ctx);
        }
    }
}

/// Mask-preserving isomorphisms from `a` onto `b` (as node maps).
pub(crate) fn isomorphisms(a: &CompressedCore, b: &CompressedCore) -> Vec<Vec<usize>> {
    if a.len() != b.len() {
        return Vec::new();
    }
    let ea = super::core::rooted_shapes(a, 0);
    let mut out = Vec::new();
    for y in centers_of(&b.adj) {
        let eb = super::core::rooted_shapes(b, y);
        if eb[y] != ea[0] {
            continue;
        }
        for pairs in subtree_isos(a, &ea, 0, usize::MAX, b, &eb, y, usize::MAX) {
            let mut map = vec![usize::MAX; a.len()];
            for (p, q) in pairs {
                map[p] = q;
            }
            if !out.contains(&map) {
                out.push(map);
            }
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn subtree_isos(
    a: &CompressedCore,
    ea: &[Vec<u64>],
    x: usize,
    px: usize,
    b: &CompressedCore,
    eb: &[Vec<u64>],
    y: usize,
    py: usize,
) -> Vec<Vec<(usize, usize)>> {
    let ka: Vec<usize> = a.adj[x].iter().copied().filter(|&c| c != px).collect();
    let kb: Vec<usize> = b.adj[y].iter().copied().filter(|&c| c != py).collect();
    let mut assignments = Vec::new();
    let mut used = vec![false; kb.len()];
    let mut cur = Vec::new();
    assign_children(&ka, &kb, ea, eb, &mut used, &mut cur, &mut assignments);
    let mut out = Vec::new();
    for asg in assignments {
        let mut partial = vec![vec![(x, y)]];
        for (i, &c) in ka.iter().enumerate() {
            let sub = subtree_isos(a, ea, c, x, b, eb, kb[asg[i]], y);
            let mut next = Vec::with_capacity(partial.len() * sub.len());
            for p in &partial {
                for q in &sub {
                    let mut r = p.clone();
                    r.extend_from_slice(q);
                    next.push(r);
                }
            }
            partial = next;
        }
        out.extend(partial);
    }
    out
}

fn assign_children(
    ka: &[usize],
    kb: &[usize],
    ea: &[Vec<u64>],
    eb: &[Vec<u64>],
    used: &mut [bool],
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let i = cur.len();
    if i == ka.len() {
        out.push(cur.clone());
        return;
    }
    for j in 0..kb.len() {
        if !used[j] && ea[ka[i]] == eb[kb[j]] {
            used[j] = true;
            cur.push(j);
            assign_children(ka, kb, ea, eb, used, cur, out);
            cur.pop();
            used[j] = false;
        }
    }
}

/// Whether `b`'s sequence at `iso[x]` runs against `a`'s orientation at `x`.
pub(crate) fn flipped(a: &CompressedCore, b: &CompressedCore, iso: &[usize], x: usize) -> bool {
    a.adj[x].len() == 2 && iso[a.adj[x][0]] != b.adj[iso[x]][0]
}

/// Whether some mask-preserving isomorphism makes every sequence of `a`
/// superior to the matching one of `b`.
pub(crate) fn dominates(a: &CompressedCore, b: &CompressedCore) -> bool {
    a.maxbag <= b.maxbag
        && isomorphisms(a, b).iter().any(|iso| {
            (0..a.len()).all(|x| {
                let vb = oriented_values(b, iso[x], flipped(a, b, iso, x));
                superior(a.nodes[x].seq.values(), &vb)
            })
        })
}

fn oriented_values(b: &CompressedCore, y: usize, flip: bool) -> Vec<u32> {
    let mut v = b.nodes[y].seq.values().to_vec();
    if flip {
        v.reverse();
    }
    v
}

/// All merged cores along one isomorphism, labeled like `a`, with the grid
/// path chosen at every node.
pub(crate) fn join_products(
    a: &CompressedCore,
    b: &CompressedCore,
    iso: &[usize],
    cap: u32,
) -> Vec<(Vec<CoreNode>, u32, Vec<Vec<(usize, usize)>>)> {
    let mut options = Vec::with_capacity(a.len());
    for x in 0..a.len() {
        let rv = oriented_values(b, iso[x], flipped(a, b, iso, x));
        let c = a.nodes[x].mask.count_ones();
        let merged: Vec<_> = merge_sum(a.nodes[x].seq.values(), &rv, c)
            .into_iter()
            .filter(|m| m.seq.max_value() <= cap)
            .collect();
        if merged.is_empty() {
            return Vec::new();
        }
        options.push(merged);
    }
    let base = a.maxbag.max(b.maxbag);
    let mut out = Vec::new();
    let mut idx = vec![0usize; a.len()];
    loop {
        let nodes: Vec<CoreNode> = (0..a.len())
            .map(|x| CoreNode { mask: a.nodes[x].mask, seq: options[x][idx[x]].seq.clone() })
            .collect();
        let maxbag = nodes.iter().map(|n| n.seq.max_value()).fold(base, u32::max);
        let paths = (0..a.len()).map(|x| options[x][idx[x]].path.clone()).collect();
        out.push((nodes, maxbag, paths));
        let mut p = 0;
        loop {
            if p == a.len() {
                return out;
            }
            idx[p] += 1;
            if idx[p] < options[p].len() {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

/// Mirrors a join on witnesses; returns the canonical merged core and witness.
pub(crate) fn apply_join(
    a: &CompressedCore,
    mut wa: Wit,
    b: &CompressedCore,
    mut wb: Wit,
    iso: &[usize],
    cells: &[Vec<(usize, usize)>],
) -> (CompressedCore, Wit) {
    let (_, fa) = expand(a, Some(&mut wa));
    let (_, fb) = expand(b, Some(&mut wb));
    let mut arena = wa.arena;
    let off = arena.absorb(wb.arena);
    let mut dead = Vec::new();
    let mut redirect = std::collections::HashMap::new();
    let mut merged_paths: Vec<Vec<WId>> = Vec::with_capacity(a.len());
    let mut nodes = Vec::with_capacity(a.len());
    for x in 0..a.len() {
        let y = iso[x];
        let flip = flipped(a, b, iso, x);
        let lp: Vec<Vec<WId>> = (0..a.nodes[x].seq.len()).map(|p| wa.paths[fa[x] + p].clone()).collect();
        let mut rp: Vec<Vec<WId>> = (0..b.nodes[y].seq.len())
            .map(|q| wb.paths[fb[y] + q].iter().map(|&w| w + off).collect())
            .collect();
        if flip {
            rp.reverse();
            for p in &mut rp {
                p.reverse();
            }
        }
        let mut pairs: Vec<(WId, WId)> = Vec::new();
        let (mut lc, mut rc) = (usize::MAX, usize::MAX);
        let mut last = (usize::MAX, usize::MAX);
        for &(i, j) in &cells[x] {
            let (new_i, new_j) = (i != last.0, j != last.1);
            if new_i && new_j {
                lc = lp[i][0];
                rc = rp[j][0];
                pairs.push((lc, rc));
                for &l in &lp[i][1..] {
                    lc = l;
                    pairs.push((lc, rc));
                }
                for &r in &rp[j][1..] {
                    rc = r;
                    pairs.push((lc, rc));
                }
            } else if new_i {
                for &l in &lp[i] {
                    lc = l;
                    pairs.push((lc, rc));
                }
            } else {
                for &r in &rp[j] {
                    rc = r;
                    pairs.push((lc, rc));
                }
            }
            last = (i, j);
        }
        let mut path = Vec::with_capacity(pairs.len());
        for (l, r) in pairs {
            let mut bag = arena.bags[l].clone();
            bag.extend_from_slice(&arena.bags[r]);
            let m = arena.add(bag);
            redirect.entry(l).or_insert(m);
            redirect.entry(r).or_insert(m);
            path.push(m);
        }
        dead.extend(lp.iter().flatten().copied());
        dead.extend(rp.iter().flatten().copied());
        let c = a.nodes[x].mask.count_ones();
        let rv = oriented_values(b, y, flip);
        let lv = a.nodes[x].seq.values();
        let sums: Vec<u32> = cells[x].iter().map(|&(i, j)| lv[i] + rv[j] - c).collect();
        nodes.push(CoreNode { mask: a.nodes[x].mask, seq: tau(&sums) });
        merged_paths.push(path);
    }
    arena.retire(&dead, |d| redirect[&d]);
    for path in &merged_paths {
        for w in path.windows(2) {
            arena.link(w[0], w[1]);
        }
    }
    let mut wit = Wit { arena, paths: merged_paths };
    for x in 0..a.len() {
        for &d in &a.adj[x] {
            if x < d {
                let (p, q) = (wit.attach(&a.adj, x, d), wit.attach(&a.adj, d, x));
                wit.arena.link(p, q);
            }
        }
    }
    let maxbag = nodes.iter().map(|n| n.seq.max_value()).fold(a.maxbag.max(b.maxbag), u32::max);
    let canon = canonicalize(&nodes, &a.adj, maxbag);
    let mut paths = vec![Vec::new(); a.len()];
    for (x, p) in wit.paths.into_iter().enumerate() {
        paths[canon.perm[x]] = if canon.flip[x] { p.into_iter().rev().collect() } else { p };
    }
    wit.paths = paths;
    (canon.core, wit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_with_required_bits() {
        let mut v: Vec<Mask> = subsets_containing(0b1011, 0b0001).collect();
        v.sort_unstable();
        assert_eq!(v, vec![0b0001, 0b0011, 0b1001, 0b1011]);
        assert_eq!(subsets_containing(0b10, 0b01).count(), 0);
        assert_eq!(subsets_containing(0, 0).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn connected_sets_of_a_path() {
        let adj = vec![vec![1], vec![0, 2], vec![1]];
        let mut sets = Vec::new();
        connected_sets(&adj, &[true; 3], &mut |s| {
            let mut v = s.to_vec();
            v.sort_unstable();
            sets.push(v);
        });
        sets.sort();
        assert_eq!(sets, vec![vec![0], vec![0, 1], vec![0, 1, 2], vec![1], vec![1, 2], vec![2]]);
        let mut count = 0;
        connected_sets(&adj, &[true, false, true], &mut |_| count += 1);
        assert_eq!(count, 2);
    }

    #[test]
    fn connected_sets_of_a_star() {
        let adj = vec![vec![1, 2, 3], vec![0], vec![0], vec![0]];
        let mut count = 0;
        connected_sets(&adj, &[true; 4], &mut |_| count += 1);
        // 3 single leaves plus every set containing the center.
        assert_eq!(count, 3 + 8);
    }

    #[test]
    fn path_isomorphisms_include_reflection() {
        let node = |m| CoreNode { mask: m, seq: crate::typseq::TypicalSeq::single(1) };
        let a = CompressedCore { nodes: vec![node(0), node(1), node(1)], adj: vec![vec![1, 2], vec![0], vec![0]], maxbag: 1 };
        assert_eq!(isomorphisms(&a, &a).len(), 2);
    }
}

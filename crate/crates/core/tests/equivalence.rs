//! Exact-mode class sets against compressed cores of enumerated
//! decompositions, with one spare decomposition node.

use std::collections::{BTreeSet, HashMap};

use treewidth::bkdp::{compress, decide, Options};
use treewidth::generate::connected_graphs;
use treewidth::graph::{Graph, Vertex};
use treewidth::oracle::for_each_td;
use treewidth::treedec::{to_nice, NiceTreeDecomposition, TreeDecomposition};

fn below(nice: &NiceTreeDecomposition, t: usize) -> Vec<Vertex> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![t];
    while let Some(x) = stack.pop() {
        seen.extend(nice.nodes[x].bag.iter().copied());
        stack.extend(nice.nodes[x].children.iter().copied());
    }
    seen.into_iter().collect()
}

fn brute(g: &Graph, max_nodes: usize, k: usize, y: &[Vertex]) -> BTreeSet<Vec<u64>> {
    let mut out = BTreeSet::new();
    for_each_td(g, max_nodes, k, |_, bags, edges| {
        let lists = bags.iter().map(|&b| (0..g.n()).filter(|&v| b >> v & 1 == 1).collect()).collect();
        out.insert(compress(&TreeDecomposition::new(lists, edges.to_vec()), y).key());
    })
    .unwrap();
    out
}

#[test]
fn exact_classes_match_enumeration_with_a_spare_node() {
    for n in 1..=4 {
        for g in connected_graphs(n) {
            let nice = to_nice(&g, &TreeDecomposition::trivial(&g)).unwrap();
            let k = n - 1;
            let opts = Options { retain_cores: true, exact_classes: true, ..Options::default() };
            let d = decide(&g, &nice, k, &opts).unwrap();
            for t in nice.post_order() {
                let vs = below(&nice, t);
                let map: HashMap<Vertex, Vertex> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
                let sub = Graph::from_edges(vs.len(), g.edges().filter_map(|(a, b)| Some((*map.get(&a)?, *map.get(&b)?))));
                let y: Vec<Vertex> = nice.nodes[t].bag.iter().map(|v| map[v]).collect();
                let dp: BTreeSet<Vec<u64>> = d.tables[t].entries.iter().map(|e| e.key.clone()).collect();
                assert_eq!(brute(&sub, n + 1, k, &y), dp, "n={n} node {t}");
            }
        }
    }
}

//! Invariants of the whole pipeline on random small graphs.

use proptest::prelude::*;
use rand::seq::SliceRandom;

use treewidth::bkdp::{compress, solve, Options};
use treewidth::generate::rng;
use treewidth::graph::Graph;
use treewidth::oracle::oracle_treewidth;
use treewidth::reduction::{treewidth_exact_linear, SolverConfig};
use treewidth::treedec::{to_nice, TreeDecomposition};

fn graph() -> impl Strategy<Value = Graph> {
    (1usize..=9).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let m = pairs.len();
        proptest::collection::vec(any::<bool>(), m)
            .prop_map(move |keep| Graph::from_edges(n, pairs.iter().zip(keep).filter(|(_, k)| *k).map(|(&e, _)| e)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_width_matches_oracle(g in graph()) {
        let tw = oracle_treewidth(&g).unwrap();
        prop_assume!(tw <= 3);
        let (w, td) = treewidth_exact_linear(&g, &SolverConfig::default()).unwrap();
        prop_assert_eq!(w, tw);
        prop_assert!(td.validate(&g).is_valid());
        prop_assert_eq!(td.width(), tw as isize);
    }

    #[test]
    fn nice_form_keeps_the_decomposition(g in graph()) {
        let td = TreeDecomposition::min_degree(&g);
        let nice = to_nice(&g, &td).unwrap();
        prop_assert!(nice.check(&g).is_ok());
        prop_assert_eq!(nice.width(), td.width());
        prop_assert!(nice.to_tree_decomposition().validate(&g).is_valid());
    }

    #[test]
    fn witness_width_is_the_bound(g in graph(), slack in 0usize..2) {
        let tw = oracle_treewidth(&g).unwrap();
        prop_assume!(tw <= 3);
        let nice = to_nice(&g, &TreeDecomposition::min_degree(&g)).unwrap();
        let k = tw + slack;
        let td = solve(&g, &nice, k, &Options::default()).unwrap().expect("width within the bound");
        prop_assert!(td.validate(&g).is_valid());
        prop_assert!(td.width() <= k as isize);
        if tw > 0 {
            prop_assert!(solve(&g, &nice, tw - 1, &Options::default()).unwrap().is_none());
        }
    }

    #[test]
    fn compression_ignores_node_order(g in graph(), seed in any::<u64>()) {
        let td = TreeDecomposition::min_degree(&g);
        let mut order: Vec<usize> = (0..td.len()).collect();
        order.shuffle(&mut rng(seed));
        let mut pos = vec![0; order.len()];
        for (i, &o) in order.iter().enumerate() {
            pos[o] = i;
        }
        let bags = order.iter().map(|&o| td.bags[o].clone()).collect();
        let edges = td.edges.iter().map(|&(a, b)| (pos[a], pos[b])).collect();
        let shuffled = TreeDecomposition::new(bags, edges);
        let y: Vec<usize> = (0..g.n()).step_by(2).collect();
        prop_assert_eq!(compress(&td, &y).key(), compress(&shuffled, &y).key());
    }
}

use std::collections::BTreeSet;

use proptest::prelude::*;
use widthspan::generate::{generate, Family};
use widthspan::graph::{EdgeId, Graph, Vertex};
use widthspan::oracle::{connected_graphs, enumerate_min_stretch};
use widthspan::stretch_of;
use widthspan::twdp::{
    contract_to_configuration, dp_min_stretch, dp_tables, join_by_inversion, min_width_decomposition,
    DpOptions, EdgeKind, Label, NiceKind, NiceTreeDecomposition, RawConfig, Side, Table,
    TreeDecomposition,
};

/// Vertex set of every nice node's subtree.
fn subtree_vertices(nice: &NiceTreeDecomposition) -> Vec<BTreeSet<Vertex>> {
    let mut sets: Vec<BTreeSet<Vertex>> = Vec::with_capacity(nice.nodes.len());
    for node in &nice.nodes {
        let mut s: BTreeSet<Vertex> = node.bag.iter().copied().collect();
        for &c in &node.children {
            s.extend(sets[c].iter().copied());
        }
        sets.push(s);
    }
    sets
}

fn small_corpus() -> Vec<Graph> {
    (2..=5).flat_map(connected_graphs).collect()
}

#[test]
fn pruning_never_changes_the_optimum() {
    for g in small_corpus() {
        let nice = NiceTreeDecomposition::from_decomposition(&min_width_decomposition(&g));
        let pruned = dp_min_stretch(&g, &nice, &DpOptions::default()).unwrap();
        let full = dp_min_stretch(
            &g,
            &nice,
            &DpOptions {
                prune: false,
                max_config_vertices: None,
            },
        )
        .unwrap();
        assert_eq!(pruned.total_stretch, full.total_stretch, "{}", g.to_edge_list());
        assert_eq!(full.stats.over_cap, 0);
    }
}

#[test]
fn optimal_tree_is_tracked_at_every_node() {
    for g in (2..=6).flat_map(connected_graphs).step_by(3) {
        let oracle = enumerate_min_stretch(&g, 1_000_000, false).unwrap();
        let nice = NiceTreeDecomposition::from_decomposition(&min_width_decomposition(&g));
        let k = nice.width();
        let (tables, _) = dp_tables(&g, &nice, &DpOptions::default()).unwrap();
        let below = subtree_vertices(&nice);
        for tree in &oracle.argmin_trees {
            let stretch = stretch_of(&g, tree).unwrap().per_edge_stretch;
            for (i, node) in nice.nodes.iter().enumerate() {
                let d = &below[i];
                let cfg = contract_to_configuration(&g, tree, &node.bag, |v| d.contains(&v));
                assert!(cfg.len() <= 2 * k + 2, "configuration {cfg} exceeds 2k+2");
                assert!(cfg.check().is_ok(), "{cfg}: {:?}", cfg.check());
                let inside: u64 = (0..g.m())
                    .filter(|&e| {
                        let (u, v) = g.edge(e);
                        d.contains(&u) && d.contains(&v)
                    })
                    .map(|e| stretch[e] as u64)
                    .sum();
                let entry = tables[i]
                    .get(&cfg)
                    .unwrap_or_else(|| panic!("node {i} misses {cfg} for {}", g.to_edge_list()));
                assert!(entry.cost <= inside, "node {i}: {} > {inside}", entry.cost);
            }
        }
    }
}

#[test]
fn join_pairing_matches_inversion_lookup() {
    let mut joins = 0;
    for (family, n) in [
        (Family::Caterpillar { legs: 3 }, 8),
        (Family::Cycle, 6),
        (Family::Grid { cols: 2 }, 6),
    ] {
        let (g, _) = generate(family, n, 0).unwrap();
        let td = min_width_decomposition(&g);
        let nice = NiceTreeDecomposition::from_decomposition(&td);
        let (tables, _) = dp_tables(&g, &nice, &DpOptions::default()).unwrap();
        let sizes = nice.below_sizes();
        for (i, node) in nice.nodes.iter().enumerate() {
            if node.kind != NiceKind::Join {
                continue;
            }
            joins += 1;
            let (l, r) = (&tables[node.children[0]], &tables[node.children[1]]);
            let lookup = join_by_inversion(l, r, &g);
            let budget = g.n() - sizes[i];
            for (c, e) in &tables[i] {
                assert_eq!(lookup.get(c), Some(&e.cost), "{c}");
            }
            for (c, cost) in &lookup {
                if c.above_demand() <= budget {
                    assert_eq!(tables[i].get(c).map(|e| e.cost), Some(*cost), "{c}");
                }
            }
        }
    }
    assert!(joins > 0);
}

#[test]
fn star_decomposition_with_joins_solves_exactly() {
    let g = Graph::new(6, &[(1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (4, 5), (5, 6), (1, 6)]).unwrap();
    let bags = vec![vec![1], vec![1, 2, 3], vec![1, 4, 5], vec![1, 5, 6]];
    let td = TreeDecomposition::new(6, bags, vec![(0, 1), (0, 2), (2, 3)]);
    td.validate(&g).unwrap();
    let nice = NiceTreeDecomposition::from_decomposition(&td);
    assert!(nice.nodes.iter().any(|x| x.kind == NiceKind::Join));
    let sol = dp_min_stretch(&g, &nice, &DpOptions::default()).unwrap();
    let best = enumerate_min_stretch(&g, 1_000_000, false).unwrap();
    assert_eq!(sol.total_stretch, best.min_total_stretch);
}

#[test]
fn empty_tables_are_reported() {
    // a cap below the singleton leaf size leaves every table empty
    let (g, _) = generate(Family::Cycle, 4, 0).unwrap();
    let nice = NiceTreeDecomposition::from_decomposition(&min_width_decomposition(&g));
    let err = dp_min_stretch(
        &g,
        &nice,
        &DpOptions {
            prune: true,
            max_config_vertices: Some(1),
        },
    )
    .unwrap_err();
    assert!(err.to_string().contains("root table"), "{err}");
}

fn k_table_sizes(t: &[Table]) -> usize {
    t.iter().map(|x| x.len()).sum()
}

#[test]
fn pruning_shrinks_tables() {
    let (g, a) = generate(Family::Grid { cols: 2 }, 6, 0).unwrap();
    let nice = NiceTreeDecomposition::from_decomposition(&TreeDecomposition::from_arrangement(&g, &a));
    let (pruned, _) = dp_tables(&g, &nice, &DpOptions::default()).unwrap();
    let (full, _) = dp_tables(
        &g,
        &nice,
        &DpOptions {
            prune: false,
            max_config_vertices: None,
        },
    )
    .unwrap();
    assert!(k_table_sizes(&pruned) < k_table_sizes(&full));
}

// Random labelled trees with random sides, built twice in different node
// orders; the canonical forms must agree.
fn random_tree() -> impl Strategy<Value = (Vec<usize>, Vec<u8>, Vec<u32>, Vec<usize>)> {
    (3usize..12).prop_flat_map(|len| {
        (
            proptest::collection::vec(any::<prop::sample::Index>(), len - 1),
            proptest::collection::vec(0u8..3, len),
            proptest::collection::vec(1u32..5, len - 1),
            Just((0..len).collect::<Vec<usize>>()).prop_shuffle(),
        )
            .prop_map(|(parents, kinds, costs, perm)| {
                let parents = parents
                    .iter()
                    .enumerate()
                    .map(|(i, ix)| ix.index(i + 1))
                    .collect();
                (parents, kinds, costs, perm)
            })
    })
}

fn build(
    parents: &[usize],
    kinds: &[u8],
    costs: &[u32],
    order: &[usize],
    edge_order_rev: bool,
) -> RawConfig {
    // node 0 is always a bag vertex; kinds: 0 bag, 1 Above Steiner, 2 Below
    // Steiner. Sides of Steiner nodes are forced to agree along edges by
    // giving every Steiner node the side of node 1's kind.
    let side = if kinds.get(1) == Some(&2) { Side::Below } else { Side::Above };
    let label = |x: usize| -> Label {
        if x == 0 || kinds[x] == 0 {
            Label::Bag(100 + x as Vertex)
        } else {
            Label::Steiner(side)
        }
    };
    let mut raw = RawConfig::default();
    let mut slot = vec![0usize; order.len()];
    for &x in order {
        slot[x] = raw.add_node(label(x));
    }
    let mut edges: Vec<usize> = (1..order.len()).collect();
    if edge_order_rev {
        edges.reverse();
    }
    for child in edges {
        let p = parents[child - 1];
        let both_bag = matches!((label(p), label(child)), (Label::Bag(_), Label::Bag(_)));
        let cost = costs[child - 1];
        let kind = if both_bag && cost == 1 {
            EdgeKind::Direct
        } else {
            EdgeKind::of_side(side)
        };
        raw.add_edge(slot[p], slot[child], cost, kind);
    }
    raw
}

proptest! {
    #[test]
    fn canonical_form_ignores_construction_order((parents, kinds, costs, perm) in random_tree()) {
        let identity: Vec<usize> = (0..perm.len()).collect();
        let a = build(&parents, &kinds, &costs, &identity, false).normalize();
        let b = build(&parents, &kinds, &costs, &perm, true).normalize();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.check().is_ok(), "{}", a);
    }

    #[test]
    fn contraction_preserves_bag_distances(seed in 0u64..500, bag_size in 2usize..5) {
        let (g, _) = generate(Family::RandomBandwidth { b: 3, p: 0.5 }, 14, seed).unwrap();
        let tree: Vec<EdgeId> = widthspan::build_tree(&g, &widthspan::LinearArrangement::identity(14)).tree_edges;
        let bag: Vec<Vertex> = (0..bag_size).map(|i| (1 + (seed as usize + 5 * i) % 14) as Vertex).collect::<BTreeSet<_>>().into_iter().collect();
        let cfg = contract_to_configuration(&g, &tree, &bag, |v| v % 2 == 0);
        for &u in &bag {
            for &v in &bag {
                let d = widthspan::oracle::tree_distance(&g, &tree, u, v) as u64;
                prop_assert_eq!(cfg.bag_distance(u, v), d);
            }
        }
        prop_assert!(cfg.len() <= 2 * bag.len());
    }
}

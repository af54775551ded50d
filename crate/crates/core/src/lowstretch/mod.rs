//! Spanning trees from linear arrangements.
//!
//! Every edge is weighted by the height of the arrangement-tree node that
//! splits it, ties broken by spread and then by edge ID. The tree returned by
//! [`build_tree`] is the minimum spanning tree under that order, which is the
//! same tree a greedy leaf-to-root scan over the arrangement tree produces
//! (see [`greedy_scan`]).

mod charges;
mod stretch;

pub use charges::{
    bound_check, charge_diagnostics, cycle_spread_check, split_stretch_check, BoundCheck, ChargeNode,
    ChargeReport, CycleSpreadRow, SplitStretchRow,
};
pub use stretch::{check_spanning_tree, stretch_of, StretchReport, TreeError, TreeIndex};

use serde::Serialize;

use crate::arrangement::{ArrangementTree, LinearArrangement};
use crate::graph::{EdgeId, Graph};
use crate::unionfind::DisjointSets;

/// Lexicographic MST key. Distinct edges never compare equal because the
/// edge ID is the last component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct EdgeWeight {
    pub split_height: u32,
    pub spread: u32,
    pub edge_id: EdgeId,
}

pub fn edge_weights(g: &Graph, a: &LinearArrangement, tree: &ArrangementTree) -> Vec<EdgeWeight> {
    (0..g.m())
        .map(|e| EdgeWeight {
            split_height: tree.node(tree.split_node_of(e)).height,
            spread: a.spread(g, e) as u32,
            edge_id: e,
        })
        .collect()
}

/// Kruskal over an arbitrary totally ordered key.
pub fn kruskal<K: Ord + Copy>(g: &Graph, keys: &[K]) -> Vec<EdgeId> {
    let mut order: Vec<EdgeId> = (0..g.m()).collect();
    order.sort_unstable_by_key(|&e| keys[e]);
    let mut sets = DisjointSets::new(g.n() + 1);
    let mut tree = Vec::with_capacity(g.n().saturating_sub(1));
    for e in order {
        let (u, v) = g.edge(e);
        if sets.union(u as usize, v as usize) {
            tree.push(e);
            if tree.len() + 1 == g.n() {
                break;
            }
        }
    }
    tree.sort_unstable();
    tree
}

/// Spanning tree from an arrangement, with full stretch accounting.
pub fn build_tree(g: &Graph, a: &LinearArrangement) -> StretchReport {
    let tree = ArrangementTree::build(g, a);
    let weights = edge_weights(g, a, &tree);
    let edges = kruskal(g, &weights);
    stretch_of(g, &edges).expect("kruskal on a connected graph yields a spanning tree")
}

/// The greedy construction written out literally: visit arrangement-tree
/// nodes leaf to root (post-order), and within a node scan its split edges
/// by increasing spread (then ID), keeping every edge that joins two
/// components.
pub fn greedy_scan(g: &Graph, a: &LinearArrangement, tree: &ArrangementTree) -> Vec<EdgeId> {
    let mut sets = DisjointSets::new(g.n() + 1);
    let mut kept = Vec::new();
    // nodes are stored in post-order already
    for node in tree.nodes() {
        let mut split = node.split_edges.clone();
        split.sort_by_key(|&e| (a.spread(g, e), e));
        for e in split {
            let (u, v) = g.edge(e);
            if sets.union(u as usize, v as usize) {
                kept.push(e);
            }
        }
    }
    kept.sort_unstable();
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family};
    use crate::rational::Rational;

    #[test]
    fn path_is_its_own_tree() {
        let (g, a) = generate(Family::Path, 4, 0).unwrap();
        let r = build_tree(&g, &a);
        assert_eq!(r.tree_edges, vec![0, 1, 2]);
        assert_eq!(r.avg_stretch, Rational::integer(1));
        assert_eq!(r.fcb_weight, 0);
        assert!(r.fcb_identity_holds());
    }

    #[test]
    fn cycle4_trace() {
        // edges (1,2) (2,3) (3,4) (1,4); order 1 2 4 3.
        // (1,2) and (3,4) are split at height 1, (2,3) and (1,4) at the root
        // with equal spread 2; the ID tie-break keeps (2,3) first, so ...
        let (g, a) = generate(Family::Cycle, 4, 0).unwrap();
        let tree = ArrangementTree::build(&g, &a);
        let w = edge_weights(&g, &a, &tree);
        assert_eq!((w[0].split_height, w[0].spread), (1, 1));
        assert_eq!((w[1].split_height, w[1].spread), (2, 2));
        assert_eq!((w[2].split_height, w[2].spread), (1, 1));
        assert_eq!((w[3].split_height, w[3].spread), (2, 2));
        let r = build_tree(&g, &a);
        // ... (2,3) joins {1,2} to {3,4} and (1,4) closes the cycle.
        assert_eq!(r.tree_edges, vec![0, 1, 2]);
        assert_eq!(r.per_edge_stretch[3], 3);
        assert_eq!(r.avg_stretch, Rational::new(3, 2));
        assert_eq!(r.fcb_weight, 4);
    }

    #[test]
    fn greedy_scan_agrees_with_kruskal() {
        for (family, n) in [
            (Family::RandomBandwidth { b: 3, p: 0.5 }, 97),
            (Family::RandomCutwidth { c: 4 }, 120),
            (Family::Grid { cols: 5 }, 40),
            (Family::Cycle, 33),
            (Family::Complete, 9),
        ] {
            for seed in 0..4 {
                let (g, a) = generate(family, n, seed).unwrap();
                let tree = ArrangementTree::build(&g, &a);
                let weights = edge_weights(&g, &a, &tree);
                assert_eq!(greedy_scan(&g, &a, &tree), kruskal(&g, &weights));
            }
        }
    }
}

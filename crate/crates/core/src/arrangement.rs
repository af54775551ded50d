//! Linear arrangements, bandwidth and cutwidth, and the arrangement tree.
//!
//! Positions are 1-based throughout. The arrangement tree is a balanced
//! binary recursion over positions in which the left child of a node of size
//! `s` covers the largest power of two strictly below `s`.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{EdgeId, Graph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArrangementError {
    #[error("line {line}: `{text}` is not a vertex label")]
    Parse { line: usize, text: String },
    #[error("arrangement lists {found} vertices, graph has {expected}")]
    Length { expected: usize, found: usize },
    #[error("vertex {vertex} is out of range 1..={n}")]
    OutOfRange { vertex: Vertex, n: usize },
    #[error("vertex {vertex} appears at positions {first} and {second}")]
    Repeated {
        vertex: Vertex,
        first: usize,
        second: usize,
    },
}

/// A bijection between vertices `1..=n` and positions `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearArrangement {
    // both indexed from 1; slot 0 unused
    position_of: Vec<usize>,
    vertex_at: Vec<Vertex>,
}

impl LinearArrangement {
    /// Builds an arrangement from the vertex order, i.e. `order[k]` is the
    /// vertex at position `k + 1`.
    pub fn from_order(order: &[Vertex]) -> Result<Self, ArrangementError> {
        let n = order.len();
        let mut position_of = vec![0usize; n + 1];
        let mut vertex_at = vec![0 as Vertex; n + 1];
        for (idx, &v) in order.iter().enumerate() {
            if v == 0 || v as usize > n {
                return Err(ArrangementError::OutOfRange { vertex: v, n });
            }
            if position_of[v as usize] != 0 {
                return Err(ArrangementError::Repeated {
                    vertex: v,
                    first: position_of[v as usize],
                    second: idx + 1,
                });
            }
            position_of[v as usize] = idx + 1;
            vertex_at[idx + 1] = v;
        }
        Ok(LinearArrangement {
            position_of,
            vertex_at,
        })
    }

    pub fn identity(n: usize) -> Self {
        let order: Vec<Vertex> = (1..=n as Vertex).collect();
        Self::from_order(&order).expect("identity order is a permutation")
    }

    /// Parses an arrangement file: line `k` holds the vertex at position `k`.
    /// Blank lines and lines starting with `c` are skipped.
    pub fn parse(text: &str) -> Result<Self, ArrangementError> {
        let mut order = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let t = raw.trim();
            if t.is_empty() || t.starts_with('c') {
                continue;
            }
            let v = t.parse().map_err(|_| ArrangementError::Parse {
                line: idx + 1,
                text: t.to_string(),
            })?;
            order.push(v);
        }
        Self::from_order(&order)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in self.order() {
            let _ = writeln!(out, "{v}");
        }
        out
    }

    /// Checks that this arrangement covers exactly the graph's vertices.
    pub fn check_against(&self, g: &Graph) -> Result<(), ArrangementError> {
        if self.len() != g.n() {
            return Err(ArrangementError::Length {
                expected: g.n(),
                found: self.len(),
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vertex_at.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn position(&self, v: Vertex) -> usize {
        self.position_of[v as usize]
    }

    pub fn vertex_at(&self, position: usize) -> Vertex {
        self.vertex_at[position]
    }

    pub fn order(&self) -> &[Vertex] {
        &self.vertex_at[1..]
    }

    /// Positions of the endpoints of an edge, smaller first.
    pub fn edge_positions(&self, g: &Graph, e: EdgeId) -> (usize, usize) {
        let (u, v) = g.edge(e);
        let (p, q) = (self.position(u), self.position(v));
        (p.min(q), p.max(q))
    }

    pub fn spread(&self, g: &Graph, e: EdgeId) -> usize {
        let (p, q) = self.edge_positions(g, e);
        q - p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Widths {
    pub bandwidth: usize,
    pub cutwidth: usize,
}

/// Bandwidth and cutwidth of `a` in a single sweep.
pub fn widths(g: &Graph, a: &LinearArrangement) -> Widths {
    let n = g.n();
    // crossing[i] counts edges with one endpoint at <= i and the other >= i + 1
    let mut delta = vec![0i64; n + 2];
    let mut bandwidth = 0;
    for e in 0..g.m() {
        let (p, q) = a.edge_positions(g, e);
        bandwidth = bandwidth.max(q - p);
        delta[p] += 1;
        delta[q] -= 1;
    }
    let mut running = 0i64;
    let mut cutwidth = 0;
    for d in delta.iter().take(n).skip(1) {
        running += d;
        cutwidth = cutwidth.max(running as usize);
    }
    Widths {
        bandwidth,
        cutwidth,
    }
}

pub fn spread_sum(g: &Graph, a: &LinearArrangement) -> usize {
    (0..g.m()).map(|e| a.spread(g, e)).sum()
}

/// Largest power of two strictly less than `size` (`size >= 2`).
pub fn left_size(size: usize) -> usize {
    debug_assert!(size >= 2);
    1 << (usize::BITS - 1 - (size - 1).leading_zeros())
}

/// Split data for an edge at positions `i < j` in an arrangement of
/// power-of-two length `n_total`.
///
/// Returns `(height, p)` where `p` is the largest power of two dividing an
/// integer in `[i, j)` and `height = log2(2p)` is the height of the
/// arrangement-tree node whose two children separate `i` from `j`.
pub fn split_height(i: usize, j: usize, n_total: usize) -> (u32, usize) {
    debug_assert!(n_total.is_power_of_two());
    debug_assert!(1 <= i && i < j && j <= n_total);
    let bit = usize::BITS - 1 - ((i - 1) ^ (j - 1)).leading_zeros();
    (bit + 1, 1 << bit)
}

/// A node of the arrangement tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    /// First position covered (inclusive).
    pub lo: usize,
    /// Last position covered (inclusive).
    pub hi: usize,
    /// Leaves have height 0.
    pub height: u32,
    /// `(left, right)` child indices; `None` for leaves.
    pub children: Option<(usize, usize)>,
    pub parent: Option<usize>,
    /// Edges whose endpoints are first separated at this node.
    pub split_edges: Vec<EdgeId>,
}

impl TreeNode {
    pub fn leaves(&self) -> usize {
        self.hi - self.lo + 1
    }
}

/// The arrangement tree of a graph under a linear arrangement. Nodes are
/// stored in post-order, so every child precedes its parent and the root is
/// last.
#[derive(Debug, Clone)]
pub struct ArrangementTree {
    nodes: Vec<TreeNode>,
    // node index of the leaf at each position
    leaf_at: Vec<usize>,
    // node index splitting each edge
    split_node: Vec<usize>,
}

impl ArrangementTree {
    pub fn build(g: &Graph, a: &LinearArrangement) -> Self {
        let n = a.len();
        let mut nodes = Vec::with_capacity(2 * n);
        let mut leaf_at = vec![0; n + 1];
        build_subtree(1, n, &mut nodes, &mut leaf_at);
        let mut tree = ArrangementTree {
            nodes,
            leaf_at,
            split_node: vec![0; g.m()],
        };
        for e in 0..g.m() {
            let (p, q) = a.edge_positions(g, e);
            let x = tree.locate_split(p, q);
            tree.split_node[e] = x;
            tree.nodes[x].split_edges.push(e);
        }
        tree
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> &TreeNode {
        &self.nodes[idx]
    }

    pub fn leaf_at(&self, position: usize) -> usize {
        self.leaf_at[position]
    }

    pub fn split_node_of(&self, e: EdgeId) -> usize {
        self.split_node[e]
    }

    /// Lowest node whose interval contains positions `p < q`, found by
    /// descending from the root.
    pub fn locate_split(&self, p: usize, q: usize) -> usize {
        let mut x = self.root();
        while let Some((l, r)) = self.nodes[x].children {
            if q <= self.nodes[l].hi {
                x = l;
            } else if p >= self.nodes[r].lo {
                x = r;
            } else {
                break;
            }
        }
        x
    }

    pub fn max_split_size(&self) -> usize {
        self.nodes
            .iter()
            .map(|x| x.split_edges.len())
            .max()
            .unwrap_or(0)
    }
}

fn build_subtree(lo: usize, hi: usize, nodes: &mut Vec<TreeNode>, leaf_at: &mut [usize]) -> usize {
    let size = hi - lo + 1;
    if size == 1 {
        nodes.push(TreeNode {
            lo,
            hi,
            height: 0,
            children: None,
            parent: None,
            split_edges: Vec::new(),
        });
        let idx = nodes.len() - 1;
        leaf_at[lo] = idx;
        return idx;
    }
    let p = left_size(size);
    let l = build_subtree(lo, lo + p - 1, nodes, leaf_at);
    let r = build_subtree(lo + p, hi, nodes, leaf_at);
    let height = 1 + nodes[l].height.max(nodes[r].height);
    nodes.push(TreeNode {
        lo,
        hi,
        height,
        children: Some((l, r)),
        parent: None,
        split_edges: Vec::new(),
    });
    let idx = nodes.len() - 1;
    nodes[l].parent = Some(idx);
    nodes[r].parent = Some(idx);
    idx
}

/// An arrangement embedded in a power-of-two number of positions: `shift`
/// isolated padding positions come first, then the real vertices in their
/// original order, then the remaining padding. Padding vertices are never
/// materialised.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddedArrangement {
    base: LinearArrangement,
    n_prime: usize,
    shift: usize,
}

impl PaddedArrangement {
    /// Smallest power of two that is at least `2n`.
    pub fn padded_len(n: usize) -> usize {
        (2 * n).next_power_of_two()
    }

    /// Number of admissible shifts, `n' - n`; valid shifts are
    /// `0..shift_count(n)`.
    pub fn shift_count(n: usize) -> usize {
        Self::padded_len(n) - n
    }

    /// Panics if `shift >= shift_count(n)`.
    pub fn new(base: LinearArrangement, shift: usize) -> Self {
        let n = base.len();
        assert!(
            shift < Self::shift_count(n),
            "shift {shift} outside 0..{}",
            Self::shift_count(n)
        );
        PaddedArrangement {
            n_prime: Self::padded_len(n),
            base,
            shift,
        }
    }

    pub fn base(&self) -> &LinearArrangement {
        &self.base
    }

    pub fn n_prime(&self) -> usize {
        self.n_prime
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn position(&self, v: Vertex) -> usize {
        self.shift + self.base.position(v)
    }

    pub fn edge_positions(&self, g: &Graph, e: EdgeId) -> (usize, usize) {
        let (p, q) = self.base.edge_positions(g, e);
        (p + self.shift, q + self.shift)
    }

    /// `(height, p)` of the node splitting edge `e` in the padded tree.
    pub fn split(&self, g: &Graph, e: EdgeId) -> (u32, usize) {
        let (p, q) = self.edge_positions(g, e);
        split_height(p, q, self.n_prime)
    }
}

/// Safe upper bound on `|S_v|` for bandwidth `b`: the number of position
/// pairs straddling a split point at distance at most `b`.
pub fn split_bound_safe(b: usize) -> usize {
    b * (b + 1) / 2
}

/// The tighter constant `(b - 1)(b - 2) / 2`. It is violated by small
/// bandwidths (a path has one split edge per internal node) so it is only
/// ever reported, never asserted.
pub fn split_bound_tight(b: usize) -> usize {
    if b < 2 {
        0
    } else {
        (b - 1) * (b - 2) / 2
    }
}

/// Summary statistics for a graph under an arrangement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArrangementStats {
    pub n: usize,
    pub m: usize,
    pub bandwidth: usize,
    pub cutwidth: usize,
    pub spread_sum: usize,
    pub max_split_edges: usize,
    pub split_bound_safe: usize,
    pub split_bound_tight: usize,
    /// Number of arrangement-tree nodes whose split set exceeds the tight
    /// constant.
    pub tight_bound_violations: usize,
}

pub fn stats(g: &Graph, a: &LinearArrangement) -> ArrangementStats {
    let w = widths(g, a);
    let tree = ArrangementTree::build(g, a);
    let tight = split_bound_tight(w.bandwidth);
    ArrangementStats {
        n: g.n(),
        m: g.m(),
        bandwidth: w.bandwidth,
        cutwidth: w.cutwidth,
        spread_sum: spread_sum(g, a),
        max_split_edges: tree.max_split_size(),
        split_bound_safe: split_bound_safe(w.bandwidth),
        split_bound_tight: tight,
        tight_bound_violations: tree
            .nodes()
            .iter()
            .filter(|x| x.split_edges.len() > tight)
            .count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle4() -> (Graph, LinearArrangement) {
        let g = Graph::new(4, &[(1, 2), (2, 3), (3, 4), (1, 4)]).unwrap();
        (g, LinearArrangement::from_order(&[1, 2, 4, 3]).unwrap())
    }

    // Brute-force oracle: count crossing edges at every gap directly.
    fn cutwidth_by_gaps(g: &Graph, a: &LinearArrangement) -> usize {
        (1..a.len())
            .map(|i| {
                (0..g.m())
                    .filter(|&e| {
                        let (p, q) = a.edge_positions(g, e);
                        p <= i && q > i
                    })
                    .count()
            })
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn widths_of_small_graphs() {
        let path = Graph::new(4, &[(1, 2), (2, 3), (3, 4)]).unwrap();
        let w = widths(&path, &LinearArrangement::identity(4));
        assert_eq!((w.bandwidth, w.cutwidth), (1, 1));

        let (c4, a) = cycle4();
        let w = widths(&c4, &a);
        assert_eq!((w.bandwidth, w.cutwidth), (2, 2));
        assert_eq!(cutwidth_by_gaps(&c4, &a), 2);

        let k4 = Graph::new(4, &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]).unwrap();
        for order in [[1, 2, 3, 4], [3, 1, 4, 2], [4, 3, 2, 1]] {
            let a = LinearArrangement::from_order(&order).unwrap();
            let w = widths(&k4, &a);
            assert_eq!((w.bandwidth, w.cutwidth), (3, 4));
            assert_eq!(cutwidth_by_gaps(&k4, &a), 4);
        }
    }

    #[test]
    fn arrangement_rejects_non_permutations() {
        assert!(matches!(
            LinearArrangement::from_order(&[1, 3, 1]),
            Err(ArrangementError::Repeated { vertex: 1, first: 1, second: 3 })
        ));
        assert!(matches!(
            LinearArrangement::from_order(&[1, 4, 2]),
            Err(ArrangementError::OutOfRange { vertex: 4, n: 3 })
        ));
        assert!(matches!(
            LinearArrangement::parse("1\nx\n"),
            Err(ArrangementError::Parse { line: 2, .. })
        ));
        let a = LinearArrangement::parse("2\n1\n3\n").unwrap();
        assert_eq!(a.position(2), 1);
        assert_eq!(LinearArrangement::parse(&a.to_text()).unwrap(), a);
    }

    #[test]
    fn tree_shapes() {
        let g = Graph::new(4, &[(1, 2), (2, 3), (3, 4)]).unwrap();
        let t = ArrangementTree::build(&g, &LinearArrangement::identity(4));
        let root = t.node(t.root());
        assert_eq!((root.lo, root.hi, root.height), (1, 4, 2));
        let (l, r) = root.children.unwrap();
        assert_eq!((t.node(l).lo, t.node(l).hi), (1, 2));
        assert_eq!((t.node(r).lo, t.node(r).hi), (3, 4));

        let g = Graph::new(5, &[(1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let t = ArrangementTree::build(&g, &LinearArrangement::identity(5));
        let (l, r) = t.node(t.root()).children.unwrap();
        assert_eq!((t.node(l).lo, t.node(l).hi), (1, 4));
        assert_eq!((t.node(r).lo, t.node(r).hi), (5, 5));
        assert_eq!(t.node(t.root()).height, 3);
    }

    #[test]
    fn cycle_root_split_set() {
        let (g, a) = cycle4();
        let t = ArrangementTree::build(&g, &a);
        let mut root_split = t.node(t.root()).split_edges.clone();
        root_split.sort();
        // edge 1 = (2,3), edge 3 = (1,4)
        assert_eq!(root_split, vec![1, 3]);
    }

    #[test]
    fn split_height_examples() {
        assert_eq!(split_height(3, 6, 8), (3, 4));
        assert_eq!(split_height(3, 6, 64), (3, 4));
        assert_eq!(split_height(1, 2, 8), (1, 1));
        assert_eq!(split_height(4, 5, 8), (3, 4));
        assert_eq!(split_height(5, 6, 8), (1, 1));
    }

    #[test]
    fn split_height_matches_divisor_definition() {
        for n_total in [2usize, 4, 8, 16, 32] {
            for i in 1..n_total {
                for j in i + 1..=n_total {
                    let p = (i..j)
                        .map(|x| 1usize << x.trailing_zeros())
                        .max()
                        .unwrap();
                    let (h, got) = split_height(i, j, n_total);
                    assert_eq!(got, p, "i={i} j={j}");
                    assert_eq!(1usize << h, 2 * p);
                }
            }
        }
    }

    #[test]
    fn power_of_two_tree_heights_match_split_height() {
        let n = 16;
        let pairs: Vec<(Vertex, Vertex)> = (1..n as Vertex).map(|v| (v, v + 1)).collect();
        let g = Graph::new(n, &pairs).unwrap();
        let a = LinearArrangement::identity(n);
        let t = ArrangementTree::build(&g, &a);
        for i in 1..n {
            for j in i + 1..=n {
                let x = t.locate_split(i, j);
                assert_eq!(t.node(x).height, split_height(i, j, n).0);
            }
        }
    }

    #[test]
    fn tight_constant_fails_for_paths() {
        let g = Graph::new(4, &[(1, 2), (2, 3), (3, 4)]).unwrap();
        let s = stats(&g, &LinearArrangement::identity(4));
        assert_eq!(s.max_split_edges, 1);
        assert_eq!(s.split_bound_tight, 0);
        assert_eq!(s.tight_bound_violations, 3);
        assert_eq!(s.split_bound_safe, 1);
    }
}

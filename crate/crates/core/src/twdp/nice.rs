//! Nice tree decompositions: every node is a leaf with a singleton bag, an
//! introduce or forget node differing from its only child by one vertex,
//! or a join node whose two children have its exact bag. The root is a
//! single-vertex bag.

use serde::Serialize;

use super::decomposition::{TdError, TreeDecomposition};
use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NiceKind {
    Leaf(Vertex),
    Introduce(Vertex),
    Forget(Vertex),
    Join,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NiceNode {
    pub kind: NiceKind,
    /// Sorted.
    pub bag: Vec<Vertex>,
    pub children: Vec<usize>,
}

/// Nodes in post-order; the root is the last node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NiceTreeDecomposition {
    pub nodes: Vec<NiceNode>,
}

struct Builder {
    nodes: Vec<NiceNode>,
}

impl Builder {
    fn push(&mut self, kind: NiceKind, bag: Vec<Vertex>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    fn forget(&mut self, top: usize, v: Vertex) -> usize {
        let bag: Vec<Vertex> = self.nodes[top].bag.iter().copied().filter(|&x| x != v).collect();
        self.push(NiceKind::Forget(v), bag, vec![top])
    }

    fn introduce(&mut self, top: usize, v: Vertex) -> usize {
        let mut bag = self.nodes[top].bag.clone();
        let at = bag.binary_search(&v).unwrap_err();
        bag.insert(at, v);
        self.push(NiceKind::Introduce(v), bag, vec![top])
    }

    /// Chain of forgets and introduces taking the bag of `top` to `target`.
    /// Forgets come first unless they would empty the bag (only possible
    /// when the two bags are disjoint).
    fn transform(&mut self, mut top: usize, target: &[Vertex]) -> usize {
        let current = self.nodes[top].bag.clone();
        let gone: Vec<Vertex> = current.iter().copied().filter(|v| !target.contains(v)).collect();
        let new: Vec<Vertex> = target.iter().copied().filter(|v| !current.contains(v)).collect();
        let keep_one = gone.len() == current.len() && !new.is_empty();
        let (early, late) = if keep_one {
            gone.split_at(gone.len() - 1)
        } else {
            (&gone[..], &[][..])
        };
        for &v in early {
            top = self.forget(top, v);
        }
        for &v in &new {
            top = self.introduce(top, v);
        }
        for &v in late {
            top = self.forget(top, v);
        }
        top
    }

    fn leaf_chain(&mut self, bag: &[Vertex]) -> usize {
        let mut top = self.push(NiceKind::Leaf(bag[0]), vec![bag[0]], Vec::new());
        for &v in &bag[1..] {
            top = self.introduce(top, v);
        }
        top
    }
}

impl NiceTreeDecomposition {
    /// Converts a valid decomposition; width is preserved. Empty bags are
    /// dropped first, reconnecting their neighbours.
    pub fn from_decomposition(td: &TreeDecomposition) -> Self {
        let count = td.bags.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); count];
        for &(a, b) in &td.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        // splice out empty bags: chain their neighbours together
        let alive: Vec<bool> = td.bags.iter().map(|b| !b.is_empty()).collect();
        for x in 0..count {
            if alive[x] {
                continue;
            }
            let nbrs = std::mem::take(&mut adj[x]);
            for &y in &nbrs {
                adj[y].retain(|&z| z != x);
            }
            for w in nbrs.windows(2) {
                adj[w[0]].push(w[1]);
                adj[w[1]].push(w[0]);
            }
        }
        let root = match (0..count).find(|&x| alive[x]) {
            Some(r) => r,
            None => {
                return NiceTreeDecomposition {
                    nodes: vec![NiceNode {
                        kind: NiceKind::Leaf(1),
                        bag: vec![1],
                        children: Vec::new(),
                    }],
                }
            }
        };
        // iterative post-order over the bag tree
        let mut order = Vec::with_capacity(count);
        let mut parent = vec![usize::MAX; count];
        let mut stack = vec![root];
        let mut seen = vec![false; count];
        seen[root] = true;
        while let Some(x) = stack.pop() {
            order.push(x);
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = x;
                    stack.push(y);
                }
            }
        }
        let mut b = Builder { nodes: Vec::new() };
        let mut top_of = vec![usize::MAX; count];
        for &x in order.iter().rev() {
            let bag = &td.bags[x];
            let mut kids: Vec<usize> = adj[x].iter().copied().filter(|&y| parent[y] == x).collect();
            kids.sort_unstable();
            let mut branches: Vec<usize> = kids
                .iter()
                .map(|&y| {
                    let t = top_of[y];
                    b.transform(t, bag)
                })
                .collect();
            let top = if branches.is_empty() {
                b.leaf_chain(bag)
            } else {
                let mut acc = branches.remove(0);
                for other in branches {
                    acc = b.push(NiceKind::Join, bag.clone(), vec![acc, other]);
                }
                acc
            };
            top_of[x] = top;
        }
        let mut top = top_of[root];
        let keep = b.nodes[top].bag[0];
        for v in b.nodes[top].bag.clone() {
            if v != keep {
                top = b.forget(top, v);
            }
        }
        let mut nodes = b.nodes;
        // the builder emits children before parents, so creation order is
        // already a valid post-order; drop nothing, just check the root
        debug_assert_eq!(top, nodes.len() - 1);
        nodes.truncate(top + 1);
        NiceTreeDecomposition { nodes }
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> usize {
        self.nodes.iter().map(|x| x.bag.len()).max().unwrap_or(1) - 1
    }

    /// Sizes of `D(B)` (vertices in the node's subtree) per node.
    pub fn below_sizes(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.nodes.len()];
        for (i, x) in self.nodes.iter().enumerate() {
            d[i] = match x.kind {
                NiceKind::Leaf(_) => 1,
                NiceKind::Introduce(_) => d[x.children[0]] + 1,
                NiceKind::Forget(_) => d[x.children[0]],
                NiceKind::Join => d[x.children[0]] + d[x.children[1]] - x.bag.len(),
            };
        }
        d
    }

    /// Checks the nice-form rules and, through the equivalent plain
    /// decomposition, the decomposition properties for `g`.
    pub fn validate(&self, g: &Graph) -> Result<(), String> {
        if self.nodes.is_empty() {
            return Err("no nodes".into());
        }
        for (i, x) in self.nodes.iter().enumerate() {
            if x.children.iter().any(|&c| c >= i) {
                return Err(format!("node {i} is not after its children"));
            }
            let child_bag = |k: usize| &self.nodes[x.children[k]].bag;
            let ok = match x.kind {
                NiceKind::Leaf(v) => x.children.is_empty() && x.bag == [v],
                NiceKind::Introduce(v) => {
                    x.children.len() == 1 && {
                        let mut with = child_bag(0).clone();
                        with.push(v);
                        with.sort_unstable();
                        !child_bag(0).contains(&v) && with == x.bag
                    }
                }
                NiceKind::Forget(v) => {
                    x.children.len() == 1 && child_bag(0).contains(&v) && {
                        let without: Vec<Vertex> =
                            child_bag(0).iter().copied().filter(|&y| y != v).collect();
                        without == x.bag
                    }
                }
                NiceKind::Join => {
                    x.children.len() == 2 && *child_bag(0) == x.bag && *child_bag(1) == x.bag
                }
            };
            if !ok {
                return Err(format!("node {i} ({:?}) breaks the nice-form rules", x.kind));
            }
        }
        let mut parents = vec![0usize; self.nodes.len()];
        for x in &self.nodes {
            for &c in &x.children {
                parents[c] += 1;
            }
        }
        if parents[..self.root()].iter().any(|&p| p != 1) {
            return Err("nodes do not form a single rooted tree".into());
        }
        if self.nodes[self.root()].bag.len() != 1 {
            return Err("root bag is not a single vertex".into());
        }
        self.to_decomposition(g.n())
            .validate(g)
            .map_err(|e: TdError| e.to_string())
    }

    pub fn to_decomposition(&self, n: usize) -> TreeDecomposition {
        let bags = self.nodes.iter().map(|x| x.bag.clone()).collect();
        let edges = self
            .nodes
            .iter()
            .enumerate()
            .flat_map(|(i, x)| x.children.iter().map(move |&c| (c, i)))
            .collect();
        TreeDecomposition::new(n, bags, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family};
    use crate::twdp::decomposition::min_width_decomposition;

    #[test]
    fn path3() {
        let g = Graph::new(3, &[(1, 2), (2, 3)]).unwrap();
        let td = TreeDecomposition::parse("s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n").unwrap();
        let nice = NiceTreeDecomposition::from_decomposition(&td);
        nice.validate(&g).unwrap();
        assert_eq!(nice.width(), 1);
        assert_eq!(*nice.below_sizes().last().unwrap(), 3);
    }

    #[test]
    fn single_bag_k4() {
        let (g, _) = generate(Family::Complete, 4, 0).unwrap();
        let td = TreeDecomposition::new(4, vec![vec![1, 2, 3, 4]], Vec::new());
        let nice = NiceTreeDecomposition::from_decomposition(&td);
        nice.validate(&g).unwrap();
        let kinds: Vec<NiceKind> = nice.nodes.iter().map(|x| x.kind).collect();
        assert_eq!(
            kinds,
            vec![
                NiceKind::Leaf(1),
                NiceKind::Introduce(2),
                NiceKind::Introduce(3),
                NiceKind::Introduce(4),
                NiceKind::Forget(2),
                NiceKind::Forget(3),
                NiceKind::Forget(4),
            ]
        );
    }

    #[test]
    fn branching_decompositions_get_joins() {
        // star: centre 1 with leaves 2..5, one bag per edge
        let g = Graph::new(5, &[(1, 2), (1, 3), (1, 4), (1, 5)]).unwrap();
        let td = TreeDecomposition::new(
            5,
            vec![vec![1], vec![1, 2], vec![1, 3], vec![1, 4], vec![1, 5]],
            vec![(0, 1), (0, 2), (0, 3), (0, 4)],
        );
        td.validate(&g).unwrap();
        let nice = NiceTreeDecomposition::from_decomposition(&td);
        nice.validate(&g).unwrap();
        assert_eq!(nice.nodes.iter().filter(|x| x.kind == NiceKind::Join).count(), 3);
        assert_eq!(nice.width(), 1);
        assert_eq!(*nice.below_sizes().last().unwrap(), 5);
    }

    #[test]
    fn empty_bags_and_disjoint_neighbours() {
        let g = Graph::new(3, &[(1, 2), (2, 3)]).unwrap();
        let td = TreeDecomposition::new(
            3,
            vec![vec![1, 2], vec![], vec![2, 3]],
            vec![(0, 1), (1, 2)],
        );
        let nice = NiceTreeDecomposition::from_decomposition(&td);
        nice.validate(&g).unwrap();
    }

    #[test]
    fn widths_are_preserved() {
        for (family, n) in [
            (Family::Cycle, 7),
            (Family::Grid { cols: 2 }, 8),
            (Family::Complete, 5),
            (Family::Caterpillar { legs: 2 }, 9),
        ] {
            let (g, a) = generate(family, n, 0).unwrap();
            for td in [
                min_width_decomposition(&g),
                TreeDecomposition::from_arrangement(&g, &a),
            ] {
                let nice = NiceTreeDecomposition::from_decomposition(&td);
                nice.validate(&g).unwrap();
                assert_eq!(nice.width(), td.width());
                assert_eq!(*nice.below_sizes().last().unwrap(), n);
            }
        }
    }
}

use serde::Serialize;
use thiserror::Error;

use crate::graph::{EdgeId, Graph, Vertex};
use crate::rational::Rational;
use crate::unionfind::DisjointSets;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("expected {expected} tree edges, got {found}")]
    WrongSize { expected: usize, found: usize },
    #[error("edge {edge} is not an edge of the graph")]
    UnknownEdge { edge: EdgeId },
    #[error("edge {edge} closes a cycle")]
    Cycle { edge: EdgeId },
}

/// Rooted view of a spanning tree with constant-time LCA queries
/// (Euler tour plus sparse table over first-visit depths).
#[derive(Debug, Clone)]
pub struct TreeIndex {
    parent: Vec<Vertex>,
    depth: Vec<u32>,
    first: Vec<usize>,
    euler: Vec<Vertex>,
    // sparse[k][i] = vertex of minimum depth in euler[i .. i + 2^k]
    sparse: Vec<Vec<Vertex>>,
}

impl TreeIndex {
    /// `tree_edges` must form a spanning tree of `g` (not re-checked).
    pub fn new(g: &Graph, tree_edges: &[EdgeId]) -> Self {
        let n = g.n();
        let mut children: Vec<Vec<Vertex>> = vec![Vec::new(); n + 1];
        for &e in tree_edges {
            let (u, v) = g.edge(e);
            children[u as usize].push(v);
            children[v as usize].push(u);
        }
        let mut parent = vec![0 as Vertex; n + 1];
        let mut depth = vec![0u32; n + 1];
        let mut first = vec![0usize; n + 1];
        let mut euler = Vec::with_capacity(2 * n);
        // iterative DFS from vertex 1; (vertex, next child index)
        let mut stack: Vec<(Vertex, usize)> = vec![(1, 0)];
        first[1] = 0;
        euler.push(1);
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            let ui = u as usize;
            if *next < children[ui].len() {
                let w = children[ui][*next];
                *next += 1;
                if w == parent[ui] {
                    continue;
                }
                parent[w as usize] = u;
                depth[w as usize] = depth[ui] + 1;
                first[w as usize] = euler.len();
                euler.push(w);
                stack.push((w, 0));
            } else {
                stack.pop();
                if let Some(&(p, _)) = stack.last() {
                    euler.push(p);
                }
            }
        }
        let mut sparse = vec![euler.clone()];
        let mut span = 1;
        while 2 * span <= euler.len() {
            let prev = sparse.last().unwrap();
            let row: Vec<Vertex> = (0..=euler.len() - 2 * span)
                .map(|i| {
                    let (a, b) = (prev[i], prev[i + span]);
                    if depth[a as usize] <= depth[b as usize] {
                        a
                    } else {
                        b
                    }
                })
                .collect();
            sparse.push(row);
            span *= 2;
        }
        TreeIndex {
            parent,
            depth,
            first,
            euler,
            sparse,
        }
    }

    pub fn depth(&self, v: Vertex) -> u32 {
        self.depth[v as usize]
    }

    /// Parent of `v` in the tree rooted at vertex 1 (`None` for the root).
    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        match self.parent[v as usize] {
            0 => None,
            p => Some(p),
        }
    }

    pub fn lca(&self, u: Vertex, v: Vertex) -> Vertex {
        let (mut i, mut j) = (self.first[u as usize], self.first[v as usize]);
        if i > j {
            std::mem::swap(&mut i, &mut j);
        }
        let len = j - i + 1;
        let k = (usize::BITS - 1 - len.leading_zeros()) as usize;
        let (a, b) = (self.sparse[k][i], self.sparse[k][j + 1 - (1 << k)]);
        if self.depth[a as usize] <= self.depth[b as usize] {
            a
        } else {
            b
        }
    }

    pub fn distance(&self, u: Vertex, v: Vertex) -> u32 {
        let w = self.lca(u, v);
        self.depth[u as usize] + self.depth[v as usize] - 2 * self.depth[w as usize]
    }

    /// Vertices on the tree path from `u` to `v`, both included.
    pub fn path(&self, u: Vertex, v: Vertex) -> Vec<Vertex> {
        let w = self.lca(u, v);
        let mut left = vec![u];
        let mut x = u;
        while x != w {
            x = self.parent[x as usize];
            left.push(x);
        }
        let mut right = Vec::new();
        let mut y = v;
        while y != w {
            right.push(y);
            y = self.parent[y as usize];
        }
        left.extend(right.into_iter().rev());
        left
    }

    pub fn euler_len(&self) -> usize {
        self.euler.len()
    }
}

/// A spanning tree together with exact stretch accounting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StretchReport {
    pub n: usize,
    pub m: usize,
    /// Tree edge IDs in increasing order.
    pub tree_edges: Vec<EdgeId>,
    /// Tree distance between the endpoints of every graph edge.
    pub per_edge_stretch: Vec<u32>,
    pub total_stretch: u64,
    /// `total_stretch / m`, exact.
    pub avg_stretch: Rational,
    /// Total length of the fundamental cycles.
    pub fcb_weight: u64,
}

impl StretchReport {
    pub fn is_tree_edge(&self, e: EdgeId) -> bool {
        self.tree_edges.binary_search(&e).is_ok()
    }

    /// Checks `FCB = m * avg_stretch + m - 2n + 2` in integers (with
    /// `m * avg_stretch` taken as the exact numerator sum), plus unit stretch
    /// on tree edges.
    pub fn fcb_identity_holds(&self) -> bool {
        let tree_ok = self
            .tree_edges
            .iter()
            .all(|&e| self.per_edge_stretch[e] == 1);
        let m_times_avg = self.avg_stretch.numer() as i128 * self.m as i128
            / self.avg_stretch.denom() as i128;
        let exact = m_times_avg * self.avg_stretch.denom() as i128
            == self.avg_stretch.numer() as i128 * self.m as i128;
        let identity =
            self.fcb_weight as i128 == m_times_avg + self.m as i128 - 2 * self.n as i128 + 2;
        tree_ok && exact && identity && self.tree_edges.len() + 1 == self.n
    }
}

/// Validates that `tree_edges` is a spanning tree of `g`.
pub fn check_spanning_tree(g: &Graph, tree_edges: &[EdgeId]) -> Result<(), TreeError> {
    if tree_edges.len() + 1 != g.n() {
        return Err(TreeError::WrongSize {
            expected: g.n() - 1,
            found: tree_edges.len(),
        });
    }
    let mut sets = DisjointSets::new(g.n() + 1);
    for &e in tree_edges {
        if e >= g.m() {
            return Err(TreeError::UnknownEdge { edge: e });
        }
        let (u, v) = g.edge(e);
        if !sets.union(u as usize, v as usize) {
            return Err(TreeError::Cycle { edge: e });
        }
    }
    Ok(())
}

/// Exact stretch of every edge of `g` with respect to a spanning tree.
pub fn stretch_of(g: &Graph, tree_edges: &[EdgeId]) -> Result<StretchReport, TreeError> {
    check_spanning_tree(g, tree_edges)?;
    let index = TreeIndex::new(g, tree_edges);
    Ok(report_with_index(g, tree_edges, &index))
}

pub(crate) fn report_with_index(g: &Graph, tree_edges: &[EdgeId], index: &TreeIndex) -> StretchReport {
    let per_edge_stretch: Vec<u32> = g
        .edges()
        .iter()
        .map(|&(u, v)| index.distance(u, v))
        .collect();
    let mut tree_edges = tree_edges.to_vec();
    tree_edges.sort_unstable();
    let total_stretch: u64 = per_edge_stretch.iter().map(|&s| s as u64).sum();
    let mut in_tree = vec![false; g.m()];
    for &e in &tree_edges {
        in_tree[e] = true;
    }
    let fcb_weight = per_edge_stretch
        .iter()
        .zip(&in_tree)
        .filter(|(_, &t)| !t)
        .map(|(&s, _)| s as u64 + 1)
        .sum();
    let avg_stretch = if g.m() == 0 {
        Rational::integer(0)
    } else {
        Rational::new(total_stretch, g.m() as u64)
    };
    StretchReport {
        n: g.n(),
        m: g.m(),
        tree_edges,
        per_edge_stretch,
        total_stretch,
        avg_stretch,
        fcb_weight,
    }
}

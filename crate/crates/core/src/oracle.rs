//! Brute-force ground truth for small graphs.
//!
//! Everything here is deliberately naive and shares no code with the
//! algorithms it checks: distances come from breadth-first search over the
//! tree edges, trees from exhaustive enumeration or a plain Kruskal.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::arrangement::LinearArrangement;
use crate::graph::{EdgeId, Graph, Vertex};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("graph has {count} spanning trees, above the cap of {cap}")]
    CapExceeded { count: u128, cap: u128 },
}

/// Spanning-tree count by the matrix-tree theorem: the determinant of the
/// Laplacian with the first row and column removed, by fraction-free
/// (Bareiss) elimination in exact integers.
pub fn spanning_tree_count(g: &Graph) -> u128 {
    let n = g.n();
    if n <= 1 {
        return 1;
    }
    let size = n - 1;
    let mut a = vec![vec![0i128; size]; size];
    for &(u, v) in g.edges() {
        let (u, v) = (u as usize - 1, v as usize - 1);
        for (x, y) in [(u, v), (v, u)] {
            if x > 0 {
                a[x - 1][x - 1] += 1;
                if y > 0 {
                    a[x - 1][y - 1] -= 1;
                }
            }
        }
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..size {
        if a[k][k] == 0 {
            match (k + 1..size).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..size {
            for j in k + 1..size {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    (sign * a[size - 1][size - 1]) as u128
}

/// Tree distance between `s` and `t` by breadth-first search.
pub fn tree_distance(g: &Graph, tree: &[EdgeId], s: Vertex, t: Vertex) -> u32 {
    let mut adj: Vec<Vec<Vertex>> = vec![Vec::new(); g.n() + 1];
    for &e in tree {
        let (u, v) = g.edge(e);
        adj[u as usize].push(v);
        adj[v as usize].push(u);
    }
    let mut dist = vec![u32::MAX; g.n() + 1];
    dist[s as usize] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x as usize] {
            if dist[y as usize] == u32::MAX {
                dist[y as usize] = dist[x as usize] + 1;
                queue.push_back(y);
            }
        }
    }
    dist[t as usize]
}

/// Per-edge stretch, one breadth-first search per source vertex.
pub fn naive_stretch(g: &Graph, tree: &[EdgeId]) -> Vec<u32> {
    g.edges()
        .iter()
        .map(|&(u, v)| tree_distance(g, tree, u, v))
        .collect()
}

fn connected_with(g: &Graph, usable: &[bool]) -> bool {
    let mut seen = vec![false; g.n() + 1];
    let mut stack = vec![1 as Vertex];
    seen[1] = true;
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for &e in g.incident(x) {
            if !usable[e] {
                continue;
            }
            let (u, v) = g.edge(e);
            let y = if u == x { v } else { u };
            if !seen[y as usize] {
                seen[y as usize] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    count == g.n()
}

fn has_path(g: &Graph, chosen: &[EdgeId], s: Vertex, t: Vertex) -> bool {
    tree_distance(g, chosen, s, t) != u32::MAX
}

/// Calls `f` with every spanning tree of `g` (sorted edge IDs). Edges are
/// decided in ID order; an edge is included if it closes no cycle, and
/// excluded if the graph stays connected without it.
pub fn for_each_spanning_tree(g: &Graph, mut f: impl FnMut(&[EdgeId])) {
    fn go(
        g: &Graph,
        e: EdgeId,
        chosen: &mut Vec<EdgeId>,
        usable: &mut Vec<bool>,
        f: &mut impl FnMut(&[EdgeId]),
    ) {
        if chosen.len() + 1 == g.n() {
            f(chosen);
            return;
        }
        if e == g.m() {
            return;
        }
        let (u, v) = g.edge(e);
        if !has_path(g, chosen, u, v) {
            chosen.push(e);
            go(g, e + 1, chosen, usable, f);
            chosen.pop();
        }
        usable[e] = false;
        if connected_with(g, usable) {
            go(g, e + 1, chosen, usable, f);
        }
        usable[e] = true;
    }
    let mut usable = vec![true; g.m()];
    go(g, 0, &mut Vec::new(), &mut usable, &mut f);
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub spanning_tree_count: u128,
    pub min_total_stretch: u64,
    /// Every optimal tree, as sorted edge IDs, in enumeration order.
    pub argmin_trees: Vec<Vec<EdgeId>>,
    /// Number of trees per total stretch.
    pub histogram: Option<BTreeMap<u64, u64>>,
}

/// Exhaustive minimum total stretch. The tree count is checked against
/// `cap` with the matrix-tree theorem before enumerating.
pub fn enumerate_min_stretch(
    g: &Graph,
    cap: u128,
    histogram: bool,
) -> Result<OracleResult, OracleError> {
    let count = spanning_tree_count(g);
    if count > cap {
        return Err(OracleError::CapExceeded { count, cap });
    }
    let mut best = u64::MAX;
    let mut argmin: Vec<Vec<EdgeId>> = Vec::new();
    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    let mut seen = 0u128;
    for_each_spanning_tree(g, |tree| {
        seen += 1;
        let total: u64 = naive_stretch(g, tree).iter().map(|&s| s as u64).sum();
        *hist.entry(total).or_default() += 1;
        if total < best {
            best = total;
            argmin.clear();
        }
        if total == best {
            argmin.push(tree.to_vec());
        }
    });
    assert_eq!(seen, count, "enumeration disagrees with the matrix-tree count");
    Ok(OracleResult {
        spanning_tree_count: count,
        min_total_stretch: if g.m() == 0 { 0 } else { best },
        argmin_trees: argmin,
        histogram: histogram.then_some(hist),
    })
}

/// Per-edge expected stretch over all shifted padded arrangements,
/// recomputed from scratch: split levels by scanning powers of two, a
/// textbook Kruskal over a stable sort, and BFS distances.
pub fn expected_stretch_oracle(g: &Graph, a: &LinearArrangement) -> Vec<Rational> {
    let n = g.n();
    let mut n_prime = 1;
    while n_prime < 2 * n {
        n_prime *= 2;
    }
    let shifts = n_prime - n;
    let mut sums = vec![0u64; g.m()];
    for shift in 0..shifts {
        let key = |e: EdgeId| {
            let (u, v) = g.edge(e);
            let (p, q) = (a.position(u) + shift, a.position(v) + shift);
            let (i, j) = (p.min(q), p.max(q));
            // largest power of two dividing some integer of [i, j), with
            // positions counted from 0
            let mut level = 1;
            while (i - 1) / (2 * level) != (j - 1) / (2 * level) {
                level *= 2;
            }
            (level, j - i)
        };
        let mut order: Vec<EdgeId> = (0..g.m()).collect();
        order.sort_by_key(|&e| key(e));
        let mut comp: Vec<usize> = (0..=n).collect();
        let mut tree = Vec::new();
        for e in order {
            let (u, v) = g.edge(e);
            let (cu, cv) = (comp[u as usize], comp[v as usize]);
            if cu != cv {
                for c in comp.iter_mut() {
                    if *c == cv {
                        *c = cu;
                    }
                }
                tree.push(e);
            }
        }
        for (s, x) in sums.iter_mut().zip(naive_stretch(g, &tree)) {
            *s += x as u64;
        }
    }
    sums.into_iter().map(|s| Rational::new(s, shifts as u64)).collect()
}

/// One representative of every isomorphism class of connected graphs on
/// `n` vertices (`n <= 7`), each in the canonical form with the smallest
/// edge bitmask.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!((1..=7).contains(&n), "only small vertex counts are supported");
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let mut index = vec![vec![0usize; n]; n];
    for (k, &(u, v)) in pairs.iter().enumerate() {
        index[u][v] = k;
        index[v][u] = k;
    }
    let mut perms: Vec<Vec<usize>> = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    permutations(&mut p, 0, &mut perms);
    let connected = |mask: u64| {
        let mut seen = 1u64;
        let mut frontier = vec![0usize];
        while let Some(x) = frontier.pop() {
            for y in 0..n {
                if y != x && mask >> index[x][y] & 1 == 1 && seen >> y & 1 == 0 {
                    seen |= 1 << y;
                    frontier.push(y);
                }
            }
        }
        seen.count_ones() as usize == n
    };
    let mut classes: BTreeSet<u64> = BTreeSet::new();
    for mask in 0u64..1 << pairs.len() {
        if !connected(mask) {
            continue;
        }
        let canon = perms
            .iter()
            .map(|perm| {
                pairs
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .fold(0u64, |m, (_, &(u, v))| m | 1 << index[perm[u]][perm[v]])
            })
            .min()
            .unwrap();
        classes.insert(canon);
    }
    classes
        .into_iter()
        .map(|mask| {
            let edges: Vec<(Vertex, Vertex)> = pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &(u, v))| (u as Vertex + 1, v as Vertex + 1))
                .collect();
            Graph::new(n, &edges).expect("valid simple graph")
        })
        .collect()
}

fn permutations(p: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == p.len() {
        out.push(p.clone());
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, out);
        p.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family};

    #[test]
    fn small_counts() {
        let (c4, _) = generate(Family::Cycle, 4, 0).unwrap();
        let r = enumerate_min_stretch(&c4, 1_000_000, true).unwrap();
        assert_eq!((r.spanning_tree_count, r.min_total_stretch), (4, 6));
        assert_eq!(r.histogram.unwrap(), BTreeMap::from([(6, 4)]));

        let (k4, _) = generate(Family::Complete, 4, 0).unwrap();
        let r = enumerate_min_stretch(&k4, 1_000_000, false).unwrap();
        assert_eq!((r.spanning_tree_count, r.min_total_stretch), (16, 9));
        // the four stars
        assert_eq!(r.argmin_trees.len(), 4);

        let (tree, _) = generate(Family::Caterpillar { legs: 2 }, 9, 0).unwrap();
        let r = enumerate_min_stretch(&tree, 10, false).unwrap();
        assert_eq!((r.spanning_tree_count, r.min_total_stretch), (1, 8));
    }

    #[test]
    fn cayley_and_cap() {
        for n in 2..=7 {
            let (k, _) = generate(Family::Complete, n, 0).unwrap();
            assert_eq!(spanning_tree_count(&k), (n as u128).pow(n as u32 - 2));
        }
        let (k6, _) = generate(Family::Complete, 6, 0).unwrap();
        assert_eq!(
            enumerate_min_stretch(&k6, 100, false),
            Err(OracleError::CapExceeded { count: 1296, cap: 100 })
        );
    }

    #[test]
    fn grid_count() {
        // 3x3 grid has 192 spanning trees
        let (g, _) = generate(Family::Grid { cols: 3 }, 9, 0).unwrap();
        assert_eq!(spanning_tree_count(&g), 192);
        let mut count = 0;
        for_each_spanning_tree(&g, |_| count += 1);
        assert_eq!(count, 192);
    }

    #[test]
    fn graph_classes() {
        let counts: Vec<usize> = (1..=6).map(|n| connected_graphs(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21, 112]);
    }

    #[test]
    fn cycle4_expectation() {
        let (g, a) = generate(Family::Cycle, 4, 0).unwrap();
        let x = expected_stretch_oracle(&g, &a);
        let total: Rational = x.iter().fold(Rational::integer(0), |acc, &r| {
            Rational::new(acc.numer() * r.denom() + r.numer() * acc.denom(), acc.denom() * r.denom())
        });
        // every tree of C4 has total stretch 6
        assert_eq!(total, Rational::integer(6));
    }
}

//! Tree decompositions: PACE `.td` I/O, validation and simple constructions.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::arrangement::{widths, LinearArrangement};
use crate::graph::{Graph, Vertex};
use crate::unionfind::DisjointSets;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TdError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("decomposition is for {found} vertices, graph has {expected}")]
    VertexCount { expected: usize, found: usize },
    #[error("vertex {vertex} is in no bag")]
    UncoveredVertex { vertex: Vertex },
    #[error("edge ({u}, {v}) is in no bag")]
    UncoveredEdge { u: Vertex, v: Vertex },
    #[error("bags containing vertex {vertex} are not connected")]
    DisconnectedTrace { vertex: Vertex },
    #[error("bag tree is not a tree")]
    NotATree,
    #[error("bag {bag} contains vertex {vertex} outside 1..={n}")]
    VertexOutOfRange { bag: usize, vertex: Vertex, n: usize },
}

/// Bags are indexed from 0 internally; the `.td` format numbers them from 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub n: usize,
    /// Sorted vertex lists.
    pub bags: Vec<Vec<Vertex>>,
    pub edges: Vec<(usize, usize)>,
}

fn parse_err(line: usize, message: impl Into<String>) -> TdError {
    TdError::Parse {
        line,
        message: message.into(),
    }
}

impl TreeDecomposition {
    pub fn new(n: usize, bags: Vec<Vec<Vertex>>, edges: Vec<(usize, usize)>) -> Self {
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        TreeDecomposition { n, bags, edges }
    }

    /// Parses the PACE 2017 format: `s td <bags> <width+1> <n>`, one
    /// `b <id> <v...>` line per bag, then one `<i> <j>` line per tree edge.
    /// Lines starting with `c` are comments.
    pub fn parse(text: &str) -> Result<Self, TdError> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut bags: Vec<Option<Vec<Vertex>>> = Vec::new();
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let mut tokens = raw.split_whitespace();
            let first = match tokens.next() {
                None => continue,
                Some(t) => t,
            };
            let nums = |tokens: std::str::SplitWhitespace| -> Result<Vec<usize>, TdError> {
                tokens
                    .map(|t| t.parse().map_err(|_| parse_err(line, format!("bad number {t:?}"))))
                    .collect()
            };
            match first {
                "c" => {}
                "s" => {
                    if header.is_some() {
                        return Err(parse_err(line, "second header"));
                    }
                    if tokens.next() != Some("td") {
                        return Err(parse_err(line, "expected `s td`"));
                    }
                    let v = nums(tokens)?;
                    if v.len() != 3 {
                        return Err(parse_err(line, "header needs bag count, bag size, vertex count"));
                    }
                    header = Some((v[0], v[1], v[2]));
                    bags = vec![None; v[0]];
                }
                "b" => {
                    let (count, max_size, n) =
                        header.ok_or_else(|| parse_err(line, "bag before header"))?;
                    let v = nums(tokens)?;
                    let id = *v.first().ok_or_else(|| parse_err(line, "missing bag id"))?;
                    if id == 0 || id > count {
                        return Err(parse_err(line, format!("bag id {id} outside 1..={count}")));
                    }
                    if bags[id - 1].is_some() {
                        return Err(parse_err(line, format!("bag {id} defined twice")));
                    }
                    let mut bag = Vec::with_capacity(v.len() - 1);
                    for &x in &v[1..] {
                        if x == 0 || x > n {
                            return Err(parse_err(line, format!("vertex {x} outside 1..={n}")));
                        }
                        bag.push(x as Vertex);
                    }
                    if bag.len() > max_size {
                        return Err(parse_err(
                            line,
                            format!("bag has {} vertices, header allows {max_size}", bag.len()),
                        ));
                    }
                    bags[id - 1] = Some(bag);
                }
                _ => {
                    let (count, _, _) = header.ok_or_else(|| parse_err(line, "edge before header"))?;
                    let v = nums(raw.split_whitespace())?;
                    if v.len() != 2 || v.iter().any(|&x| x == 0 || x > count) {
                        return Err(parse_err(line, "tree edge needs two bag ids"));
                    }
                    edges.push((v[0] - 1, v[1] - 1));
                }
            }
        }
        let (_, _, n) = header.ok_or_else(|| parse_err(0, "missing `s td` header"))?;
        let bags = bags
            .into_iter()
            .enumerate()
            .map(|(i, b)| b.ok_or_else(|| parse_err(0, format!("bag {} never defined", i + 1))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TreeDecomposition::new(n, bags, edges))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("s td {} {} {}\n", self.bags.len(), self.width() + 1, self.n);
        for (i, b) in self.bags.iter().enumerate() {
            out.push_str(&format!("b {}", i + 1));
            for v in b {
                out.push_str(&format!(" {v}"));
            }
            out.push('\n');
        }
        for &(a, b) in &self.edges {
            out.push_str(&format!("{} {}\n", a + 1, b + 1));
        }
        out
    }

    /// Largest bag size minus one.
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1)
    }

    /// Checks vertex coverage, edge coverage, connected vertex traces, and
    /// that the bag graph is a tree.
    pub fn validate(&self, g: &Graph) -> Result<(), TdError> {
        if self.n != g.n() {
            return Err(TdError::VertexCount {
                expected: g.n(),
                found: self.n,
            });
        }
        let count = self.bags.len();
        if count == 0 || self.edges.len() + 1 != count {
            return Err(TdError::NotATree);
        }
        let mut sets = DisjointSets::new(count);
        for &(a, b) in &self.edges {
            if a >= count || b >= count || !sets.union(a, b) {
                return Err(TdError::NotATree);
            }
        }
        for (i, bag) in self.bags.iter().enumerate() {
            if let Some(&v) = bag.iter().find(|&&v| v == 0 || v as usize > g.n()) {
                return Err(TdError::VertexOutOfRange {
                    bag: i + 1,
                    vertex: v,
                    n: g.n(),
                });
            }
        }
        let mut holders: Vec<Vec<usize>> = vec![Vec::new(); g.n() + 1];
        for (i, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                holders[v as usize].push(i);
            }
        }
        for v in g.vertices() {
            if holders[v as usize].is_empty() {
                return Err(TdError::UncoveredVertex { vertex: v });
            }
        }
        for &(u, v) in g.edges() {
            if !self.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
                return Err(TdError::UncoveredEdge { u, v });
            }
        }
        // a forest restricted to a vertex's bags is connected iff it has
        // exactly (bags - 1) edges
        for v in g.vertices() {
            let held = &holders[v as usize];
            let inner = self
                .edges
                .iter()
                .filter(|&&(a, b)| held.contains(&a) && held.contains(&b))
                .count();
            if inner + 1 != held.len() {
                return Err(TdError::DisconnectedTrace { vertex: v });
            }
        }
        Ok(())
    }

    /// Decomposition induced by eliminating vertices in `order`: each
    /// vertex's bag is itself plus its later neighbours in the fill-in
    /// graph, attached to the bag of the earliest-eliminated of those.
    pub fn from_elimination_order(g: &Graph, order: &[Vertex]) -> Self {
        let n = g.n();
        let mut rank = vec![0usize; n + 1];
        for (i, &v) in order.iter().enumerate() {
            rank[v as usize] = i;
        }
        let mut adj: Vec<BTreeSet<Vertex>> = vec![BTreeSet::new(); n + 1];
        for &(u, v) in g.edges() {
            adj[u as usize].insert(v);
            adj[v as usize].insert(u);
        }
        let mut bags = Vec::with_capacity(n);
        let mut later_of = Vec::with_capacity(n);
        for &v in order {
            let later: Vec<Vertex> = adj[v as usize]
                .iter()
                .copied()
                .filter(|&w| rank[w as usize] > rank[v as usize])
                .collect();
            for (i, &a) in later.iter().enumerate() {
                for &b in &later[i + 1..] {
                    adj[a as usize].insert(b);
                    adj[b as usize].insert(a);
                }
            }
            let mut bag = later.clone();
            bag.push(v);
            bags.push(bag);
            later_of.push(later);
        }
        let mut edges = Vec::new();
        for (i, later) in later_of.iter().enumerate() {
            let next = later.iter().map(|&w| rank[w as usize]).min();
            match next {
                Some(j) => edges.push((i, j)),
                // a root of the elimination forest; chain it to the next
                // bag so the result is a tree
                None if i + 1 < n => edges.push((i, i + 1)),
                None => {}
            }
        }
        TreeDecomposition::new(n, bags, edges)
    }

    /// Path decomposition from an arrangement of bandwidth `b`: windows of
    /// `b + 1` consecutive positions.
    pub fn from_arrangement(g: &Graph, a: &LinearArrangement) -> Self {
        let n = g.n();
        let b = widths(g, a).bandwidth.max(1).min(n.saturating_sub(1));
        let windows = n.saturating_sub(b).max(1);
        let bags: Vec<Vec<Vertex>> = (1..=windows)
            .map(|start| (start..=(start + b).min(n)).map(|p| a.vertex_at(p)).collect())
            .collect();
        let edges = (1..bags.len()).map(|i| (i - 1, i)).collect();
        TreeDecomposition::new(n, bags, edges)
    }
}

/// All permutations of `items` in lexicographic order of positions.
fn for_each_permutation(items: &mut [Vertex], k: usize, f: &mut impl FnMut(&[Vertex])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        for_each_permutation(items, k + 1, f);
        items.swap(k, i);
    }
}

/// Minimum-width decomposition found by trying every elimination order.
/// Exponential; meant for graphs with at most about nine vertices.
pub fn min_width_decomposition(g: &Graph) -> TreeDecomposition {
    let mut order: Vec<Vertex> = g.vertices().collect();
    let mut best: Option<TreeDecomposition> = None;
    for_each_permutation(&mut order, 0, &mut |perm| {
        let td = TreeDecomposition::from_elimination_order(g, perm);
        if best.as_ref().is_none_or(|b| td.width() < b.width()) {
            best = Some(td);
        }
    });
    best.expect("at least one order")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family};

    #[test]
    fn parses_and_round_trips() {
        let text = "c path\ns td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n";
        let g = Graph::new(3, &[(1, 2), (2, 3)]).unwrap();
        let td = TreeDecomposition::parse(text).unwrap();
        assert_eq!(td.width(), 1);
        td.validate(&g).unwrap();
        assert_eq!(TreeDecomposition::parse(&td.to_text()).unwrap(), td);
    }

    #[test]
    fn rejects_broken_decompositions() {
        let g = Graph::new(3, &[(1, 2), (2, 3), (1, 3)]).unwrap();
        let td = TreeDecomposition::parse("s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n").unwrap();
        assert_eq!(td.validate(&g), Err(TdError::UncoveredEdge { u: 1, v: 3 }));
        let td = TreeDecomposition::parse("s td 3 2 3\nb 1 1 2\nb 2 3\nb 3 1 3\n1 2\n2 3\n").unwrap();
        let g2 = Graph::new(3, &[(1, 2), (1, 3)]).unwrap();
        assert_eq!(td.validate(&g2), Err(TdError::DisconnectedTrace { vertex: 1 }));
        let td = TreeDecomposition::parse("s td 2 2 3\nb 1 1 2\nb 2 2\n1 2\n").unwrap();
        assert_eq!(td.validate(&g2), Err(TdError::UncoveredVertex { vertex: 3 }));
        assert!(matches!(
            TreeDecomposition::parse("s td 1 2 3\nb 1 1 4\n"),
            Err(TdError::Parse { line: 2, .. })
        ));
        assert!(TreeDecomposition::parse("b 1 1\n").is_err());
    }

    #[test]
    fn constructions_are_valid() {
        for (family, n) in [
            (Family::Cycle, 9),
            (Family::Grid { cols: 3 }, 12),
            (Family::Complete, 5),
            (Family::RandomBandwidth { b: 3, p: 0.5 }, 20),
        ] {
            let (g, a) = generate(family, n, 1).unwrap();
            let td = TreeDecomposition::from_arrangement(&g, &a);
            td.validate(&g).unwrap();
            assert_eq!(td.width(), widths(&g, &a).bandwidth);
            let order: Vec<Vertex> = g.vertices().collect();
            TreeDecomposition::from_elimination_order(&g, &order).validate(&g).unwrap();
        }
    }

    #[test]
    fn exact_widths_of_small_graphs() {
        let (cycle, _) = generate(Family::Cycle, 6, 0).unwrap();
        assert_eq!(min_width_decomposition(&cycle).width(), 2);
        let (k5, _) = generate(Family::Complete, 5, 0).unwrap();
        assert_eq!(min_width_decomposition(&k5).width(), 4);
        let (grid, _) = generate(Family::Grid { cols: 3 }, 9, 0).unwrap();
        assert_eq!(min_width_decomposition(&grid).width(), 3);
        let (path, _) = generate(Family::Path, 7, 0).unwrap();
        let td = min_width_decomposition(&path);
        assert_eq!(td.width(), 1);
        td.validate(&path).unwrap();
    }
}

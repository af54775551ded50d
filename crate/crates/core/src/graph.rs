//! Simple connected undirected graphs with stable edge IDs.
//!
//! Vertices are labelled `1..=n`. Edges are stored as `(u, v)` with `u < v`
//! in the order they were supplied; that position is the edge's ID and is
//! used for every tie-break downstream.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

/// A vertex label in `1..=n`.
pub type Vertex = u32;

/// Index of an edge in [`Graph::edges`].
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: Vertex },
    #[error("line {line}: duplicate edge ({u}, {v})")]
    DuplicateEdge { line: usize, u: Vertex, v: Vertex },
    #[error("line {line}: vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { line: usize, vertex: Vertex, n: usize },
    #[error("line {line}: header declares {declared} edges but {found} were given")]
    EdgeCount {
        line: usize,
        declared: usize,
        found: usize,
    },
    #[error("graph is disconnected: vertex {vertex} is unreachable from vertex 1")]
    Disconnected { vertex: Vertex },
    #[error("graph has no vertices")]
    Empty,
}

/// An immutable simple connected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    // indexed by vertex label; slot 0 is unused
    adjacency: Vec<Vec<EdgeId>>,
}

impl Graph {
    /// Builds and validates a graph. Each pair may be given in either order;
    /// it is stored normalised as `(min, max)`. Errors report the 1-based
    /// ordinal of the offending pair in the `line` field.
    pub fn new(n: usize, pairs: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let lines: Vec<usize> = (1..=pairs.len()).collect();
        Self::with_lines(n, pairs, &lines)
    }

    fn with_lines(
        n: usize,
        pairs: &[(Vertex, Vertex)],
        lines: &[usize],
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut seen = HashSet::with_capacity(pairs.len());
        let mut edges = Vec::with_capacity(pairs.len());
        let mut adjacency = vec![Vec::new(); n + 1];
        for (&(a, b), &line) in pairs.iter().zip(lines) {
            for vertex in [a, b] {
                if vertex == 0 || vertex as usize > n {
                    return Err(GraphError::VertexOutOfRange { line, vertex, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop { line, vertex: a });
            }
            let (u, v) = (a.min(b), a.max(b));
            if !seen.insert((u, v)) {
                return Err(GraphError::DuplicateEdge { line, u, v });
            }
            let id = edges.len();
            edges.push((u, v));
            adjacency[u as usize].push(id);
            adjacency[v as usize].push(id);
        }
        let graph = Graph {
            n,
            edges,
            adjacency,
        };
        if let Some(vertex) = graph.first_unreachable() {
            return Err(GraphError::Disconnected { vertex });
        }
        Ok(graph)
    }

    fn first_unreachable(&self) -> Option<Vertex> {
        let mut seen = vec![false; self.n + 1];
        let mut queue = VecDeque::from([1 as Vertex]);
        seen[1] = true;
        while let Some(u) = queue.pop_front() {
            for w in self.neighbors(u) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    queue.push_back(w);
                }
            }
        }
        (1..=self.n as Vertex).find(|&v| !seen[v as usize])
    }

    /// Parses the line-oriented edge-list format:
    ///
    /// ```text
    /// c optional comments
    /// p <n> <m>
    /// e <u> <v>      (m lines)
    /// ```
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut pairs = Vec::new();
        let mut lines = Vec::new();
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') {
                continue;
            }
            let mut fields = trimmed.split_whitespace();
            let tag = fields.next().unwrap_or_default();
            let nums: Vec<&str> = fields.collect();
            let parse_err = |message: String| GraphError::Parse { line, message };
            match tag {
                "p" => {
                    if header.is_some() {
                        return Err(parse_err("second `p` header".into()));
                    }
                    if nums.len() != 2 {
                        return Err(parse_err("expected `p <n> <m>`".into()));
                    }
                    let n = parse_count(nums[0]).map_err(parse_err)?;
                    let m = parse_count(nums[1]).map_err(parse_err)?;
                    header = Some((n, m, line));
                }
                "e" => {
                    if header.is_none() {
                        return Err(parse_err("edge line before `p` header".into()));
                    }
                    if nums.len() != 2 {
                        return Err(parse_err("expected `e <u> <v>`".into()));
                    }
                    let u = parse_vertex(nums[0]).map_err(parse_err)?;
                    let v = parse_vertex(nums[1]).map_err(parse_err)?;
                    pairs.push((u, v));
                    lines.push(line);
                }
                other => return Err(parse_err(format!("unknown line type `{other}`"))),
            }
        }
        let (n, m, header_line) = header.ok_or(GraphError::Parse {
            line: last_line.max(1),
            message: "missing `p <n> <m>` header".into(),
        })?;
        if pairs.len() != m {
            return Err(GraphError::EdgeCount {
                line: header_line,
                declared: m,
                found: pairs.len(),
            });
        }
        Self::with_lines(n, &pairs, &lines)
    }

    /// Serialises to the edge-list format accepted by [`Graph::parse`].
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(16 + 12 * self.edges.len());
        let _ = writeln!(out, "p {} {}", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "e {u} {v}");
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> (Vertex, Vertex) {
        self.edges[id]
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        1..=self.n as Vertex
    }

    /// Edge IDs incident to `v`, in ID order.
    pub fn incident(&self, v: Vertex) -> &[EdgeId] {
        &self.adjacency[v as usize]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adjacency[v as usize].iter().map(move |&id| {
            let (a, b) = self.edges[id];
            if a == v {
                b
            } else {
                a
            }
        })
    }

    pub fn edge_between(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        let (a, b) = (u.min(v), u.max(v));
        let probe = if self.degree(u) <= self.degree(v) { u } else { v };
        self.incident(probe)
            .iter()
            .copied()
            .find(|&id| self.edges[id] == (a, b))
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.edge_between(u, v).is_some()
    }
}

fn parse_count(s: &str) -> Result<usize, String> {
    s.parse().map_err(|_| format!("`{s}` is not a non-negative integer"))
}

fn parse_vertex(s: &str) -> Result<Vertex, String> {
    s.parse().map_err(|_| format!("`{s}` is not a vertex label"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_path() {
        let g = Graph::parse("p 4 3\ne 1 2\ne 2 3\ne 3 4\n").unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edges(), &[(1, 2), (2, 3), (3, 4)]);
        assert_eq!(g.degree(2), 2);
    }

    #[test]
    fn parses_cycle_with_comments() {
        let g = Graph::parse("c a 4-cycle\np 4 4\ne 1 2\ne 2 3\ne 3 4\ne 1 4\n").unwrap();
        assert_eq!(g.m(), 4);
        assert!(g.vertices().all(|v| g.degree(v) == 2));
        assert_eq!(g.edge_between(4, 1), Some(3));
    }

    #[test]
    fn rejects_duplicate_edge_with_line() {
        let err = Graph::parse("p 2 2\ne 1 2\ne 1 2\n").unwrap_err();
        assert_eq!(err, GraphError::DuplicateEdge { line: 3, u: 1, v: 2 });
        let err = Graph::parse("p 2 2\ne 1 2\ne 2 1\n").unwrap_err();
        assert!(matches!(err, GraphError::DuplicateEdge { line: 3, .. }));
    }

    #[test]
    fn rejects_invalid_documents() {
        assert!(matches!(
            Graph::parse("p 3 1\ne 1 1\n"),
            Err(GraphError::SelfLoop { line: 2, vertex: 1 })
        ));
        assert!(matches!(
            Graph::parse("p 3 2\ne 1 2\ne 2 4\n"),
            Err(GraphError::VertexOutOfRange { line: 3, vertex: 4, n: 3 })
        ));
        assert!(matches!(
            Graph::parse("p 4 2\ne 1 2\ne 3 4\n"),
            Err(GraphError::Disconnected { vertex: 3 })
        ));
        assert!(matches!(
            Graph::parse("p 3 3\ne 1 2\ne 2 3\n"),
            Err(GraphError::EdgeCount { line: 1, declared: 3, found: 2 })
        ));
        assert!(matches!(
            Graph::parse("e 1 2\n"),
            Err(GraphError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            Graph::parse("p 2 1\ne 1 x\n"),
            Err(GraphError::Parse { line: 2, .. })
        ));
        assert!(matches!(Graph::parse("c nothing\n"), Err(GraphError::Parse { .. })));
    }

    #[test]
    fn single_vertex_is_connected() {
        let g = Graph::parse("p 1 0\n").unwrap();
        assert_eq!((g.n(), g.m()), (1, 0));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::new(5, &[(2, 1), (5, 3), (3, 2), (4, 5)]).unwrap();
        let again = Graph::parse(&g.to_edge_list()).unwrap();
        assert_eq!(g, again);
    }
}

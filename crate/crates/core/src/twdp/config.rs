//! Configurations: the contracted, weighted picture of a spanning tree as
//! seen from one bag.
//!
//! A configuration is a tree whose nodes are the bag vertices plus Steiner
//! nodes (off-bag vertices of degree at least three in the part of the
//! spanning tree connecting the bag). Maximal runs of off-bag degree-2
//! vertices are suppressed into single edges whose cost is the run length
//! plus one. Every edge carries a kind:
//!
//! * `Direct`: a real tree edge between two bag vertices (cost 1);
//! * `Above`: a path through vertices not yet introduced, promised but not
//!   built;
//! * `Below`: a path through vertices already forgotten, built.
//!
//! Edges incident to a Steiner node have the Steiner node's side, because
//! the bag separates vertices above it from vertices below it.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::graph::{EdgeId, Graph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Side {
    Above,
    Below,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Label {
    Bag(Vertex),
    Steiner(Side),
}

impl Label {
    pub fn bag(self) -> Option<Vertex> {
        match self {
            Label::Bag(v) => Some(v),
            Label::Steiner(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum EdgeKind {
    Direct,
    Above,
    Below,
}

impl EdgeKind {
    pub fn of_side(side: Side) -> Self {
        match side {
            Side::Above => EdgeKind::Above,
            Side::Below => EdgeKind::Below,
        }
    }
}

/// One node in canonical pre-order. The root has `parent == 0`, `cost == 0`
/// and kind `Direct`; these fields are meaningless for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ConfigNode {
    pub label: Label,
    pub parent: u8,
    pub cost: u32,
    pub kind: EdgeKind,
}

/// A configuration in canonical form: rooted at the smallest bag vertex,
/// children ordered by the smallest bag vertex in their subtree, stored in
/// pre-order. Every leaf is a bag vertex, so that order is total and two
/// configurations that differ only by naming Steiner nodes are equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Config {
    nodes: Vec<ConfigNode>,
}

impl Config {
    pub fn singleton(v: Vertex) -> Self {
        Config {
            nodes: vec![ConfigNode {
                label: Label::Bag(v),
                parent: 0,
                cost: 0,
                kind: EdgeKind::Direct,
            }],
        }
    }

    pub fn nodes(&self) -> &[ConfigNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, v: Vertex) -> Option<usize> {
        self.nodes.iter().position(|x| x.label == Label::Bag(v))
    }

    pub fn bag_vertices(&self) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = self.nodes.iter().filter_map(|x| x.label.bag()).collect();
        out.sort_unstable();
        out
    }

    /// Non-root node indices as `(child, parent, cost, kind)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32, EdgeKind)> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, x)| (i, x.parent as usize, x.cost, x.kind))
    }

    pub fn steiner_count(&self, side: Side) -> usize {
        self.nodes
            .iter()
            .filter(|x| x.label == Label::Steiner(side))
            .count()
    }

    /// Number of distinct not-yet-introduced vertices this configuration
    /// promises: Above Steiner nodes plus the interior vertices of Above
    /// edges.
    pub fn above_demand(&self) -> usize {
        let interior: usize = self
            .edges()
            .filter(|e| e.3 == EdgeKind::Above)
            .map(|e| e.2 as usize - 1)
            .sum();
        self.steiner_count(Side::Above) + interior
    }

    /// Cost-weighted distance between two nodes.
    pub fn distance(&self, x: usize, y: usize) -> u64 {
        let (mut x, mut y) = (x, y);
        let mut total = 0u64;
        // parents precede children in pre-order, so the larger index is
        // never an ancestor of the smaller one
        while x != y {
            if x > y {
                total += self.nodes[x].cost as u64;
                x = self.nodes[x].parent as usize;
            } else {
                total += self.nodes[y].cost as u64;
                y = self.nodes[y].parent as usize;
            }
        }
        total
    }

    /// Distance between two bag vertices. Panics if either is absent.
    pub fn bag_distance(&self, u: Vertex, v: Vertex) -> u64 {
        let x = self.index_of(u).expect("vertex in configuration");
        let y = self.index_of(v).expect("vertex in configuration");
        self.distance(x, y)
    }

    /// Sum of distances over graph edges with both ends in the bag.
    pub fn bag_edge_stretch(&self, g: &Graph) -> u64 {
        let bag = self.bag_vertices();
        let mut total = 0;
        for (i, &u) in bag.iter().enumerate() {
            for &v in &bag[i + 1..] {
                if g.has_edge(u, v) {
                    total += self.bag_distance(u, v);
                }
            }
        }
        total
    }

    /// The configuration with every Below tag turned into Above.
    pub fn shape(&self) -> Config {
        Config {
            nodes: self
                .nodes
                .iter()
                .map(|x| ConfigNode {
                    label: match x.label {
                        Label::Steiner(_) => Label::Steiner(Side::Above),
                        l => l,
                    },
                    kind: match x.kind {
                        EdgeKind::Below => EdgeKind::Above,
                        k => k,
                    },
                    ..*x
                })
                .collect(),
        }
    }

    /// Bit `i` is set when node `i`'s parent edge is Below.
    pub fn below_mask(&self) -> u64 {
        self.edges()
            .filter(|e| e.3 == EdgeKind::Below)
            .fold(0, |m, e| m | 1 << e.0)
    }

    /// Re-tags a shape: edges whose bit is set become Below, Steiner nodes
    /// take the side of their parent edge.
    pub fn with_below_mask(&self, mask: u64) -> Config {
        let mut nodes = self.nodes.clone();
        for (i, x) in nodes.iter_mut().enumerate().skip(1) {
            if x.kind != EdgeKind::Direct {
                let side = if mask >> i & 1 == 1 { Side::Below } else { Side::Above };
                x.kind = EdgeKind::of_side(side);
                if let Label::Steiner(_) = x.label {
                    x.label = Label::Steiner(side);
                }
            }
        }
        Config { nodes }
    }

    /// Maximal Below groups: Below edges connected through Below Steiner
    /// nodes. Each group is returned as a mask over parent-edge bits.
    pub fn below_groups(&self) -> Vec<u64> {
        let len = self.nodes.len();
        let mut group = vec![usize::MAX; len];
        let mut masks: Vec<u64> = Vec::new();
        for (i, x) in self.nodes.iter().enumerate().skip(1) {
            if x.kind != EdgeKind::Below {
                continue;
            }
            // a Below edge joins its Steiner endpoints' groups
            let p = x.parent as usize;
            let mut ids: Vec<usize> = Vec::new();
            for end in [i, p] {
                if matches!(self.nodes[end].label, Label::Steiner(_)) && group[end] != usize::MAX {
                    ids.push(group[end]);
                }
            }
            ids.sort_unstable();
            ids.dedup();
            let id = match ids.first() {
                Some(&first) => {
                    for &other in &ids[1..] {
                        masks[first] |= masks[other];
                        masks[other] = 0;
                        for gid in group.iter_mut() {
                            if *gid == other {
                                *gid = first;
                            }
                        }
                    }
                    first
                }
                None => {
                    masks.push(0);
                    masks.len() - 1
                }
            };
            masks[id] |= 1 << i;
            for end in [i, p] {
                if matches!(self.nodes[end].label, Label::Steiner(_)) {
                    group[end] = id;
                }
            }
        }
        masks.retain(|&m| m != 0);
        masks.sort_unstable();
        masks
    }

    /// Every way of splitting the Below groups between two children: the
    /// first configuration keeps the groups in the subset Below and sees
    /// the rest as Above; the second is the complement. Returns
    /// `2^groups` pairs.
    pub fn inversions(&self) -> Vec<(Config, Config)> {
        let groups = self.below_groups();
        let shape = self.shape();
        let all: u64 = groups.iter().fold(0, |m, g| m | g);
        (0u64..1 << groups.len())
            .map(|subset| {
                let left = groups
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| subset >> i & 1 == 1)
                    .fold(0, |m, (_, g)| m | g);
                (shape.with_below_mask(left), shape.with_below_mask(all & !left))
            })
            .collect()
    }

    pub fn to_raw(&self) -> RawConfig {
        RawConfig {
            labels: self.nodes.iter().map(|x| Some(x.label)).collect(),
            edges: self
                .edges()
                .map(|(c, p, cost, kind)| Some(RawEdge { a: p, b: c, cost, kind }))
                .collect(),
        }
    }

    /// Checks the structural invariants; returns a description of the
    /// first violation.
    pub fn check(&self) -> Result<(), String> {
        let mut degree = vec![0usize; self.nodes.len()];
        for (c, p, cost, kind) in self.edges() {
            degree[c] += 1;
            degree[p] += 1;
            if p >= c {
                return Err(format!("node {c} has parent {p} after it"));
            }
            if cost == 0 {
                return Err(format!("edge {p}-{c} has cost 0"));
            }
            let (lc, lp) = (self.nodes[c].label, self.nodes[p].label);
            match (lc, lp) {
                (Label::Bag(_), Label::Bag(_)) => {
                    if (kind == EdgeKind::Direct) != (cost == 1) {
                        return Err(format!("bag edge {p}-{c} has cost {cost} and kind {kind:?}"));
                    }
                }
                _ => {
                    for l in [lc, lp] {
                        if let Label::Steiner(side) = l {
                            if kind != EdgeKind::of_side(side) {
                                return Err(format!("edge {p}-{c} disagrees with its Steiner side"));
                            }
                        }
                    }
                }
            }
        }
        for (i, x) in self.nodes.iter().enumerate() {
            if matches!(x.label, Label::Steiner(_)) && degree[i] < 3 {
                return Err(format!("Steiner node {i} has degree {}", degree[i]));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Config {
    /// Nested form, e.g. `1(2:1 S+(3:2 4:1):1)` where `S+`/`S-` are Above
    /// and Below Steiner nodes, `:c` is the parent-edge cost, and `'`/`"`
    /// mark Above/Below bag-to-bag edges.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write_node(cfg: &Config, i: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let x = cfg.nodes[i];
            match x.label {
                Label::Bag(v) => write!(f, "{v}")?,
                Label::Steiner(Side::Above) => write!(f, "S+")?,
                Label::Steiner(Side::Below) => write!(f, "S-")?,
            }
            let children: Vec<usize> = (i + 1..cfg.nodes.len())
                .filter(|&c| cfg.nodes[c].parent as usize == i)
                .collect();
            if !children.is_empty() {
                write!(f, "(")?;
                for (k, &c) in children.iter().enumerate() {
                    if k > 0 {
                        write!(f, " ")?;
                    }
                    write_node(cfg, c, f)?;
                }
                write!(f, ")")?;
            }
            if i > 0 {
                let mark = match (x.kind, x.label, cfg.nodes[x.parent as usize].label) {
                    (EdgeKind::Above, Label::Bag(_), Label::Bag(_)) => "'",
                    (EdgeKind::Below, Label::Bag(_), Label::Bag(_)) => "\"",
                    _ => "",
                };
                write!(f, ":{}{mark}", x.cost)?;
            }
            Ok(())
        }
        if self.nodes.is_empty() {
            return write!(f, "()");
        }
        write_node(self, 0, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RawEdge {
    pub a: usize,
    pub b: usize,
    pub cost: u32,
    pub kind: EdgeKind,
}

/// Mutable working form: arbitrary node order, deleted slots left as
/// `None`.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    pub labels: Vec<Option<Label>>,
    pub edges: Vec<Option<RawEdge>>,
}

impl RawConfig {
    pub fn add_node(&mut self, label: Label) -> usize {
        self.labels.push(Some(label));
        self.labels.len() - 1
    }

    pub fn add_edge(&mut self, a: usize, b: usize, cost: u32, kind: EdgeKind) {
        self.edges.push(Some(RawEdge { a, b, cost, kind }));
    }

    pub fn find_bag(&self, v: Vertex) -> Option<usize> {
        self.labels.iter().position(|&l| l == Some(Label::Bag(v)))
    }

    /// Indices of live edges incident to `x`.
    pub fn incident(&self, x: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.filter(|e| e.a == x || e.b == x).map(|_| i))
            .collect()
    }

    fn other_end(&self, edge: usize, x: usize) -> usize {
        let e = self.edges[edge].unwrap();
        if e.a == x {
            e.b
        } else {
            e.a
        }
    }

    /// Applies the contraction rules to a fixpoint (drop off-bag leaves,
    /// suppress off-bag degree-2 nodes) and returns the canonical form.
    pub fn normalize(mut self) -> Config {
        loop {
            let mut changed = false;
            for x in 0..self.labels.len() {
                let side = match self.labels[x] {
                    Some(Label::Steiner(side)) => side,
                    _ => continue,
                };
                let inc = self.incident(x);
                match inc.len() {
                    0 | 1 => {
                        for e in inc {
                            self.edges[e] = None;
                        }
                        self.labels[x] = None;
                        changed = true;
                    }
                    2 => {
                        let (e1, e2) = (inc[0], inc[1]);
                        let (y, z) = (self.other_end(e1, x), self.other_end(e2, x));
                        let cost = self.edges[e1].unwrap().cost + self.edges[e2].unwrap().cost;
                        self.edges[e1] = None;
                        self.edges[e2] = None;
                        self.labels[x] = None;
                        self.add_edge(y, z, cost, EdgeKind::of_side(side));
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
        }
        self.canonicalize()
    }

    fn canonicalize(&self) -> Config {
        let len = self.labels.len();
        let mut adj: Vec<Vec<(usize, u32, EdgeKind)>> = vec![Vec::new(); len];
        for e in self.edges.iter().flatten() {
            adj[e.a].push((e.b, e.cost, e.kind));
            adj[e.b].push((e.a, e.cost, e.kind));
        }
        let root = match (0..len)
            .filter_map(|x| self.labels[x].and_then(Label::bag).map(|v| (v, x)))
            .min()
        {
            Some((_, x)) => x,
            None => return Config { nodes: Vec::new() },
        };
        // smallest bag vertex in every subtree, by post-order over an
        // explicit DFS from the root
        let mut parent = vec![usize::MAX; len];
        let mut order = Vec::with_capacity(len);
        let mut stack = vec![root];
        parent[root] = root;
        while let Some(x) = stack.pop() {
            order.push(x);
            for &(y, _, _) in &adj[x] {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    stack.push(y);
                }
            }
        }
        let mut min_bag = vec![Vertex::MAX; len];
        for &x in order.iter().rev() {
            if let Some(v) = self.labels[x].and_then(Label::bag) {
                min_bag[x] = min_bag[x].min(v);
            }
            if x != root {
                let p = parent[x];
                min_bag[p] = min_bag[p].min(min_bag[x]);
            }
        }
        let mut nodes = Vec::with_capacity(order.len());
        // (raw node, canonical parent index, cost, kind)
        let mut stack = vec![(root, 0u8, 0u32, EdgeKind::Direct)];
        while let Some((x, p, cost, kind)) = stack.pop() {
            let idx = nodes.len() as u8;
            nodes.push(ConfigNode {
                label: self.labels[x].expect("live node"),
                parent: p,
                cost,
                kind,
            });
            let mut children: Vec<(Vertex, usize, u32, EdgeKind)> = adj[x]
                .iter()
                .filter(|&&(y, _, _)| parent[y] == x && y != x)
                .map(|&(y, c, k)| (min_bag[y], y, c, k))
                .collect();
            // pushed in reverse so the smallest is visited first
            children.sort_unstable_by_key(|c| std::cmp::Reverse(c.0));
            for (_, y, c, k) in children {
                stack.push((y, idx, c, k));
            }
        }
        Config { nodes }
    }
}

/// Contracts a spanning tree (or any tree containing the bag) to its
/// configuration with respect to `bag`. Off-bag vertices for which
/// `below(v)` holds are tagged Below, the rest Above.
pub fn contract_to_configuration(
    g: &Graph,
    tree_edges: &[EdgeId],
    bag: &[Vertex],
    below: impl Fn(Vertex) -> bool,
) -> Config {
    let mut raw = RawConfig::default();
    let mut node_of: BTreeMap<Vertex, usize> = BTreeMap::new();
    let label = |v: Vertex| {
        if bag.contains(&v) {
            Label::Bag(v)
        } else if below(v) {
            Label::Steiner(Side::Below)
        } else {
            Label::Steiner(Side::Above)
        }
    };
    for &v in bag {
        node_of.insert(v, raw.add_node(Label::Bag(v)));
    }
    for &e in tree_edges {
        let (u, v) = g.edge(e);
        for w in [u, v] {
            node_of.entry(w).or_insert_with(|| raw.add_node(label(w)));
        }
        let kind = match (label(u), label(v)) {
            (Label::Bag(_), Label::Bag(_)) => EdgeKind::Direct,
            (Label::Steiner(side), _) | (_, Label::Steiner(side)) => EdgeKind::of_side(side),
        };
        raw.add_edge(node_of[&u], node_of[&v], 1, kind);
    }
    raw.normalize()
}

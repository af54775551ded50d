//! Table transitions for leaf, introduce, forget and join nodes.
//!
//! Tables are generated forward: every child entry is extended in every
//! admissible way, the result is put in canonical form, and entries with the
//! same configuration keep the smallest cost (the first one generated on
//! ties, so runs are reproducible).

use std::collections::BTreeMap;

use super::config::{Config, EdgeKind, Label, RawConfig, Side};
use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Back {
    Leaf,
    /// `direct` lists the tree edges between the new vertex and bag
    /// vertices.
    Introduce { child: Config, direct: Vec<(Vertex, Vertex)> },
    Forget { child: Config },
    Join { left: Config, right: Config },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    /// Total stretch of the graph edges with both ends below or in the bag.
    pub cost: u64,
    pub back: Back,
}

pub type Table = BTreeMap<Config, Entry>;

/// Bounds applied while generating entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest cost guessed for a new Above edge (the vertex count).
    pub max_cost: u32,
    /// If set, entries promising more not-yet-introduced vertices than this
    /// are discarded.
    pub above_budget: Option<usize>,
    /// Entries with more configuration nodes than this are discarded and
    /// counted.
    pub max_vertices: usize,
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct StepCounters {
    pub generated: usize,
    pub over_budget: usize,
    pub over_cap: usize,
}

struct Sink<'a> {
    table: Table,
    limits: &'a Limits,
    counters: &'a mut StepCounters,
}

impl Sink<'_> {
    fn offer(&mut self, config: Config, cost: u64, back: impl FnOnce() -> Back) {
        self.counters.generated += 1;
        if config.len() > self.limits.max_vertices {
            self.counters.over_cap += 1;
            return;
        }
        if let Some(budget) = self.limits.above_budget {
            if config.above_demand() > budget {
                self.counters.over_budget += 1;
                return;
            }
        }
        match self.table.get_mut(&config) {
            Some(e) if e.cost <= cost => {}
            Some(e) => *e = Entry { cost, back: back() },
            None => {
                self.table.insert(config, Entry { cost, back: back() });
            }
        }
    }
}

pub fn leaf_step(v: Vertex) -> Table {
    Table::from([(
        Config::singleton(v),
        Entry {
            cost: 0,
            back: Back::Leaf,
        },
    )])
}

/// Largest cost worth guessing for a new Above edge: longer edges promise
/// more vertices than remain.
fn guess_cap(limits: &Limits, child: &Config) -> u32 {
    match limits.above_budget {
        None => limits.max_cost,
        Some(b) => {
            let spare = b.saturating_sub(child.above_demand());
            limits.max_cost.min(spare as u32 + 1)
        }
    }
}

/// Extends every entry of `child` by a vertex `v` that is new to the
/// subtree, in each of the ways `v` can sit in the final spanning tree:
///
/// * attached to a bag vertex by a tree edge;
/// * attached to a bag vertex through an Above path of length `d >= 2`;
/// * attached to an Above Steiner node through a path of length `d >= 1`;
/// * taking the place of an Above Steiner node;
/// * lying on an Above edge, splitting it in two;
/// * hanging by a path of length `d >= 1` from a new Above Steiner node
///   that splits an Above edge.
///
/// The new entry's cost adds the configuration distance of every graph edge
/// from `v` into the bag.
pub fn introduce_step(
    child: &Table,
    v: Vertex,
    g: &Graph,
    limits: &Limits,
    counters: &mut StepCounters,
) -> Table {
    let mut sink = Sink {
        table: Table::new(),
        limits,
        counters,
    };
    for (cfg, entry) in child {
        let bag = cfg.bag_vertices();
        let nbrs: Vec<Vertex> = bag.iter().copied().filter(|&w| g.has_edge(v, w)).collect();
        let cap = guess_cap(limits, cfg);
        let base = cfg.to_raw();
        let mut emit = |raw: RawConfig, direct: Vec<(Vertex, Vertex)>| {
            let next = raw.normalize();
            let added: u64 = nbrs.iter().map(|&w| next.bag_distance(v, w)).sum();
            sink.offer(next, entry.cost + added, || Back::Introduce {
                child: cfg.clone(),
                direct,
            });
        };
        let bag_nodes: Vec<(usize, Vertex)> = cfg
            .nodes()
            .iter()
            .enumerate()
            .filter_map(|(i, x)| x.label.bag().map(|b| (i, b)))
            .collect();
        let above_steiner: Vec<usize> = (0..cfg.len())
            .filter(|&i| cfg.nodes()[i].label == Label::Steiner(Side::Above))
            .collect();
        // raw edge slots coincide with non-root node indices minus one
        let above_edges: Vec<(usize, usize, usize, u32)> = cfg
            .edges()
            .enumerate()
            .filter(|(_, e)| e.3 == EdgeKind::Above && e.2 >= 2)
            .map(|(slot, e)| (slot, e.1, e.0, e.2))
            .collect();
        let is_bag = |i: usize| matches!(cfg.nodes()[i].label, Label::Bag(_));
        let bag_of = |i: usize| cfg.nodes()[i].label.bag();

        for &(b, w) in &bag_nodes {
            // tree edge to a bag vertex
            if g.has_edge(v, w) {
                let mut raw = base.clone();
                let x = raw.add_node(Label::Bag(v));
                raw.add_edge(b, x, 1, EdgeKind::Direct);
                emit(raw, vec![(v, w)]);
            }
            // Above path to a bag vertex
            for d in 2..=cap {
                let mut raw = base.clone();
                let x = raw.add_node(Label::Bag(v));
                raw.add_edge(b, x, d, EdgeKind::Above);
                emit(raw, Vec::new());
            }
        }
        for &s in &above_steiner {
            // hang from an Above Steiner node
            for d in 1..=cap {
                let mut raw = base.clone();
                let x = raw.add_node(Label::Bag(v));
                raw.add_edge(s, x, d, EdgeKind::Above);
                emit(raw, Vec::new());
            }
            // replace it: unit edges into the bag become tree edges
            let mut raw = base.clone();
            raw.labels[s] = Some(Label::Bag(v));
            let mut direct = Vec::new();
            let mut feasible = true;
            for slot in raw.incident(s) {
                let mut e = raw.edges[slot].unwrap();
                let other = if e.a == s { e.b } else { e.a };
                if e.cost == 1 && is_bag(other) {
                    let w = bag_of(other).unwrap();
                    if !g.has_edge(v, w) {
                        feasible = false;
                        break;
                    }
                    e.kind = EdgeKind::Direct;
                    direct.push((v, w));
                    raw.edges[slot] = Some(e);
                }
            }
            if feasible {
                emit(raw, direct);
            }
        }
        for &(slot, p, c, cost) in &above_edges {
            for first in 1..cost {
                let second = cost - first;
                // v lies on the path
                {
                    let mut raw = base.clone();
                    raw.edges[slot] = None;
                    let x = raw.add_node(Label::Bag(v));
                    let mut direct = Vec::new();
                    let mut feasible = true;
                    for (end, len) in [(p, first), (c, second)] {
                        let kind = if len == 1 && is_bag(end) {
                            let w = bag_of(end).unwrap();
                            feasible &= g.has_edge(v, w);
                            direct.push((v, w));
                            EdgeKind::Direct
                        } else {
                            EdgeKind::Above
                        };
                        raw.add_edge(end, x, len, kind);
                    }
                    if feasible {
                        emit(raw, direct);
                    }
                }
                // v hangs from a new Steiner node on the path
                for d in 1..=cap {
                    let mut raw = base.clone();
                    raw.edges[slot] = None;
                    let s = raw.add_node(Label::Steiner(Side::Above));
                    raw.add_edge(p, s, first, EdgeKind::Above);
                    raw.add_edge(s, c, second, EdgeKind::Above);
                    let x = raw.add_node(Label::Bag(v));
                    raw.add_edge(s, x, d, EdgeKind::Above);
                    emit(raw, Vec::new());
                }
            }
        }
    }
    sink.table
}

/// Moves `u` below the bag. Entries where `u` still touches an Above edge
/// are dropped: a forgotten vertex has no neighbours outside the subtree.
pub fn forget_step(child: &Table, u: Vertex, limits: &Limits, counters: &mut StepCounters) -> Table {
    let mut sink = Sink {
        table: Table::new(),
        limits,
        counters,
    };
    for (cfg, entry) in child {
        let x = cfg.index_of(u).expect("forgotten vertex is in the bag");
        let mut raw = cfg.to_raw();
        let slots = raw.incident(x);
        if slots.iter().any(|&s| raw.edges[s].unwrap().kind == EdgeKind::Above) {
            continue;
        }
        raw.labels[x] = Some(Label::Steiner(Side::Below));
        for s in slots {
            let mut e = raw.edges[s].unwrap();
            e.kind = EdgeKind::Below;
            raw.edges[s] = Some(e);
        }
        sink.offer(raw.normalize(), entry.cost, || Back::Forget { child: cfg.clone() });
    }
    sink.table
}

/// Combines two children with the same bag. Each Below group of the
/// result was built in exactly one child and is seen as Above by the
/// other, so child entries pair up when they have the same shape and
/// disjoint Below parts. Graph edges inside the bag were counted by both
/// children and are subtracted once.
pub fn join_step(
    left: &Table,
    right: &Table,
    g: &Graph,
    limits: &Limits,
    counters: &mut StepCounters,
) -> Table {
    let mut sink = Sink {
        table: Table::new(),
        limits,
        counters,
    };
    let mut by_shape: BTreeMap<Config, Vec<(u64, &Config, u64)>> = BTreeMap::new();
    for (cfg, entry) in right {
        by_shape
            .entry(cfg.shape())
            .or_default()
            .push((cfg.below_mask(), cfg, entry.cost));
    }
    for (lc, le) in left {
        let shape = lc.shape();
        let Some(partners) = by_shape.get(&shape) else {
            continue;
        };
        let lm = lc.below_mask();
        let overlap = shape.bag_edge_stretch(g);
        for &(rm, rc, rcost) in partners {
            if lm & rm != 0 {
                continue;
            }
            let parent = shape.with_below_mask(lm | rm);
            sink.offer(parent, le.cost + rcost - overlap, || Back::Join {
                left: lc.clone(),
                right: rc.clone(),
            });
        }
    }
    sink.table
}

/// The join written as lookups: for every configuration over the shapes
/// present in both children, try all `2^groups` splits of its Below groups.
/// Independent of [`join_step`]'s pairing; used to cross-check it.
pub fn join_by_inversion(left: &Table, right: &Table, g: &Graph) -> BTreeMap<Config, u64> {
    let mut shapes: BTreeMap<Config, Vec<u64>> = BTreeMap::new();
    for cfg in left.keys().chain(right.keys()) {
        shapes.entry(cfg.shape()).or_default().push(cfg.below_mask());
    }
    let mut out = BTreeMap::new();
    for (shape, masks) in shapes {
        // every candidate parent is a union of one left and one right mask
        let mut candidates: Vec<u64> = Vec::new();
        for &a in &masks {
            for &b in &masks {
                if a & b == 0 {
                    candidates.push(a | b);
                }
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        for mask in candidates {
            let parent = shape.with_below_mask(mask);
            let overlap = parent.bag_edge_stretch(g);
            let best = parent
                .inversions()
                .into_iter()
                .filter_map(|(l, r)| Some(left.get(&l)?.cost + right.get(&r)?.cost - overlap))
                .min();
            if let Some(cost) = best {
                out.insert(parent, cost);
            }
        }
    }
    out
}

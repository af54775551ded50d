//! Exact minimum-stretch spanning tree over a nice tree decomposition.

use serde::Serialize;
use thiserror::Error;

use super::config::Config;
use super::nice::{NiceKind, NiceTreeDecomposition};
use super::steps::{
    forget_step, introduce_step, join_step, leaf_step, Back, Limits, StepCounters, Table,
};
use crate::graph::{EdgeId, Graph};
use crate::lowstretch::stretch_of;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DpError {
    #[error("invalid nice decomposition: {0}")]
    Decomposition(String),
    #[error("internal invariant failed: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpOptions {
    /// Discard entries promising more unseen vertices than remain. Never
    /// changes the optimum.
    pub prune: bool,
    /// Cap on configuration size; `None` means `2k + 2` for width `k`.
    pub max_config_vertices: Option<usize>,
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions {
            prune: true,
            max_config_vertices: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DpStats {
    pub nodes: usize,
    pub width: usize,
    pub max_table_size: usize,
    pub total_entries: usize,
    pub largest_configuration: usize,
    pub generated: usize,
    pub over_budget: usize,
    pub over_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DpSolution {
    pub total_stretch: u64,
    pub tree_edges: Vec<EdgeId>,
    pub stats: DpStats,
}

/// All tables, indexed like the decomposition's nodes.
pub fn dp_tables(
    g: &Graph,
    ntd: &NiceTreeDecomposition,
    options: &DpOptions,
) -> Result<(Vec<Table>, DpStats), DpError> {
    ntd.validate(g).map_err(DpError::Decomposition)?;
    let width = ntd.width();
    let below = ntd.below_sizes();
    let mut counters = StepCounters::default();
    let mut tables: Vec<Table> = Vec::with_capacity(ntd.nodes.len());
    for (i, node) in ntd.nodes.iter().enumerate() {
        let limits = Limits {
            max_cost: g.n() as u32,
            above_budget: options.prune.then(|| g.n() - below[i]),
            max_vertices: options.max_config_vertices.unwrap_or(2 * width + 2),
        };
        let table = match node.kind {
            NiceKind::Leaf(v) => leaf_step(v),
            NiceKind::Introduce(v) => {
                introduce_step(&tables[node.children[0]], v, g, &limits, &mut counters)
            }
            NiceKind::Forget(v) => forget_step(&tables[node.children[0]], v, &limits, &mut counters),
            NiceKind::Join => join_step(
                &tables[node.children[0]],
                &tables[node.children[1]],
                g,
                &limits,
                &mut counters,
            ),
        };
        tables.push(table);
    }
    let stats = DpStats {
        nodes: ntd.nodes.len(),
        width,
        max_table_size: tables.iter().map(|t| t.len()).max().unwrap_or(0),
        total_entries: tables.iter().map(|t| t.len()).sum(),
        largest_configuration: tables
            .iter()
            .flat_map(|t| t.keys().map(Config::len))
            .max()
            .unwrap_or(0),
        generated: counters.generated,
        over_budget: counters.over_budget,
        over_cap: counters.over_cap,
    };
    Ok((tables, stats))
}

/// Minimum total stretch over all spanning trees of `g`, with a witness
/// tree whose independently recomputed stretch equals the returned value.
pub fn dp_min_stretch(
    g: &Graph,
    ntd: &NiceTreeDecomposition,
    options: &DpOptions,
) -> Result<DpSolution, DpError> {
    let (tables, stats) = dp_tables(g, ntd, options)?;
    let root = ntd.root();
    let (root_cfg, root_entry) = match tables[root].iter().next() {
        Some(x) if tables[root].len() == 1 => x,
        _ => {
            return Err(DpError::Invariant(format!(
                "root table has {} entries, expected 1",
                tables[root].len()
            )))
        }
    };
    let mut tree_edges: Vec<EdgeId> = Vec::new();
    let mut stack: Vec<(usize, &Config)> = vec![(root, root_cfg)];
    while let Some((i, cfg)) = stack.pop() {
        let entry = tables[i]
            .get(cfg)
            .ok_or_else(|| DpError::Invariant(format!("missing back-pointer target at node {i}")))?;
        let kids = &ntd.nodes[i].children;
        match &entry.back {
            Back::Leaf => {}
            Back::Introduce { child, direct } => {
                for &(u, v) in direct {
                    let e = g.edge_between(u, v).ok_or_else(|| {
                        DpError::Invariant(format!("tree edge ({u}, {v}) is not a graph edge"))
                    })?;
                    tree_edges.push(e);
                }
                stack.push((kids[0], child));
            }
            Back::Forget { child } => stack.push((kids[0], child)),
            Back::Join { left, right } => {
                stack.push((kids[0], left));
                stack.push((kids[1], right));
            }
        }
    }
    tree_edges.sort_unstable();
    tree_edges.dedup();
    let report = stretch_of(g, &tree_edges)
        .map_err(|e| DpError::Invariant(format!("reconstructed edges are not a spanning tree: {e}")))?;
    if report.total_stretch != root_entry.cost {
        return Err(DpError::Invariant(format!(
            "witness stretch {} differs from table value {}",
            report.total_stretch, root_entry.cost
        )));
    }
    Ok(DpSolution {
        total_stretch: root_entry.cost,
        tree_edges,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family};
    use crate::oracle::enumerate_min_stretch;
    use crate::twdp::decomposition::{min_width_decomposition, TreeDecomposition};

    fn solve(g: &Graph, td: &TreeDecomposition, options: &DpOptions) -> DpSolution {
        let nice = NiceTreeDecomposition::from_decomposition(td);
        dp_min_stretch(g, &nice, options).unwrap()
    }

    #[test]
    fn named_small_instances() {
        for (family, n, expected) in [
            (Family::Path, 3, 2),
            (Family::Cycle, 4, 6),
            (Family::Complete, 4, 9),
            (Family::Path, 2, 1),
        ] {
            let (g, _) = generate(family, n, 0).unwrap();
            let sol = solve(&g, &min_width_decomposition(&g), &DpOptions::default());
            assert_eq!(sol.total_stretch, expected, "{} {n}", family.name());
            assert_eq!(sol.stats.over_cap, 0);
        }
    }

    #[test]
    fn matches_oracle_with_and_without_pruning() {
        for (family, n) in [
            (Family::Cycle, 5),
            (Family::Grid { cols: 2 }, 6),
            (Family::Complete, 5),
            (Family::Caterpillar { legs: 2 }, 6),
        ] {
            let (g, a) = generate(family, n, 0).unwrap();
            let best = enumerate_min_stretch(&g, 1_000_000, false).unwrap().min_total_stretch;
            for td in [min_width_decomposition(&g), TreeDecomposition::from_arrangement(&g, &a)] {
                for prune in [true, false] {
                    let options = DpOptions { prune, max_config_vertices: None };
                    let sol = solve(&g, &td, &options);
                    assert_eq!(sol.total_stretch, best, "{} prune={prune}", family.name());
                }
            }
        }
    }
}

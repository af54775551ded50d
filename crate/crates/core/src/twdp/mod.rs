//! Exact minimum-stretch spanning trees by dynamic programming over a nice
//! tree decomposition.
//!
//! Each table maps a [`Config`] (the spanning tree contracted to the
//! current bag) to the least total stretch, over the graph edges seen so
//! far, of any partial solution inducing it. Stretch is measured in the
//! configuration, so paths through vertices not yet introduced count with
//! their promised length.

mod config;
mod decomposition;
mod dp;
mod nice;
mod steps;

pub use config::{
    contract_to_configuration, Config, ConfigNode, EdgeKind, Label, RawConfig, RawEdge, Side,
};
pub use decomposition::{min_width_decomposition, TdError, TreeDecomposition};
pub use dp::{dp_min_stretch, dp_tables, DpError, DpOptions, DpSolution, DpStats};
pub use nice::{NiceKind, NiceNode, NiceTreeDecomposition};
pub use steps::{
    forget_step, introduce_step, join_by_inversion, join_step, leaf_step, Back, Entry, Limits,
    StepCounters, Table,
};

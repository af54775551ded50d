//! Low-stretch spanning trees for graphs given with a bounded-width linear
//! arrangement or tree decomposition.
//!
//! The crate builds spanning trees from linear arrangements
//! ([`lowstretch::build_tree`]), distributions of trees over shifted padded
//! arrangements ([`distribution`]), and exact minimum-stretch spanning trees
//! by dynamic programming over nice tree decompositions ([`twdp`]). Every
//! construction can be cross-checked against the brute-force routines in
//! [`oracle`].

pub mod arrangement;
pub mod distribution;
pub mod generate;
pub mod graph;
pub mod lowstretch;
pub mod oracle;
pub mod rational;
pub mod suites;
pub mod twdp;
pub mod unionfind;

pub use arrangement::{widths, ArrangementTree, LinearArrangement, PaddedArrangement};
pub use graph::{EdgeId, Graph, GraphError, Vertex};
pub use lowstretch::{build_tree, stretch_of, StretchReport};
pub use rational::Rational;

// Guide chapters are compiled and run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs-and-arrangements.md")]
    mod graphs_and_arrangements {}
    #[doc = include_str!("../../../book/src/stretch.md")]
    mod stretch {}
    #[doc = include_str!("../../../book/src/arrangement-trees.md")]
    mod arrangement_trees {}
    #[doc = include_str!("../../../book/src/distributions.md")]
    mod distributions {}
    #[doc = include_str!("../../../book/src/treewidth-dp.md")]
    mod treewidth_dp {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}

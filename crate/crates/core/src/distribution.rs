//! Distributions over spanning trees from shifted padded arrangements.
//!
//! The arrangement is embedded in a line of `n'` positions (the smallest
//! power of two at least `2n`) after `i` empty positions, for every shift
//! `i` in `0..n' - n`. Padding positions carry no vertices and are never
//! materialised: split heights are computed arithmetically from padded
//! positions, and the tree for shift `i` is the minimum spanning tree under
//! `(padded split height, spread, edge ID)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arrangement::{LinearArrangement, PaddedArrangement};
use crate::graph::{EdgeId, Graph};
use crate::lowstretch::{kruskal, stretch_of, EdgeWeight, StretchReport};
use crate::rational::Rational;

/// MST keys under the padded arrangement.
pub fn padded_weights(g: &Graph, padded: &PaddedArrangement) -> Vec<EdgeWeight> {
    (0..g.m())
        .map(|e| EdgeWeight {
            split_height: padded.split(g, e).0,
            spread: padded.base().spread(g, e) as u32,
            edge_id: e,
        })
        .collect()
}

/// The tree `T_i` for one shift.
pub fn tree_for_shift(g: &Graph, a: &LinearArrangement, shift: usize) -> StretchReport {
    let padded = PaddedArrangement::new(a.clone(), shift);
    let edges = kruskal(g, &padded_weights(g, &padded));
    stretch_of(g, &edges).expect("kruskal on a connected graph yields a spanning tree")
}

/// Draws a shift uniformly from `0..n' - n` and builds its tree.
pub fn sample_tree(g: &Graph, a: &LinearArrangement, seed: u64) -> (usize, StretchReport) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift = rng.gen_range(0..PaddedArrangement::shift_count(g.n()));
    (shift, tree_for_shift(g, a, shift))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftSummary {
    pub shift: usize,
    pub total_stretch: u64,
    pub avg_stretch: Rational,
    pub fcb_weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistributionReport {
    pub n: usize,
    pub m: usize,
    pub n_prime: usize,
    /// Shifts evaluated, in evaluation order (all shifts in explicit mode).
    pub shifts: Vec<ShiftSummary>,
    /// Mean stretch of every edge over the evaluated shifts, exact.
    pub per_edge_expected_stretch: Vec<Rational>,
    pub max_expected_stretch: Rational,
    /// Shift with the smallest total stretch (lowest shift on ties).
    pub best_shift: usize,
}

impl DistributionReport {
    fn from_runs(g: &Graph, runs: Vec<(usize, StretchReport)>) -> Self {
        let mut sums = vec![0u64; g.m()];
        for (_, r) in &runs {
            for (s, &x) in sums.iter_mut().zip(&r.per_edge_stretch) {
                *s += x as u64;
            }
        }
        let count = runs.len() as u64;
        let per_edge_expected_stretch: Vec<Rational> =
            sums.iter().map(|&s| Rational::new(s, count)).collect();
        let best_shift = runs
            .iter()
            .min_by_key(|(shift, r)| (r.total_stretch, *shift))
            .map(|(shift, _)| *shift)
            .expect("at least one shift");
        DistributionReport {
            n: g.n(),
            m: g.m(),
            n_prime: PaddedArrangement::padded_len(g.n()),
            max_expected_stretch: per_edge_expected_stretch
                .iter()
                .copied()
                .max()
                .unwrap_or(Rational::integer(0)),
            per_edge_expected_stretch,
            best_shift,
            shifts: runs
                .into_iter()
                .map(|(shift, r)| ShiftSummary {
                    shift,
                    total_stretch: r.total_stretch,
                    avg_stretch: r.avg_stretch,
                    fcb_weight: r.fcb_weight,
                })
                .collect(),
        }
    }

    /// CSV rows `edge_id,u,v,spread,expected_stretch`.
    pub fn to_csv(&self, g: &Graph, a: &LinearArrangement) -> String {
        let mut out = String::from("edge_id,u,v,spread,expected_stretch\n");
        for (e, x) in self.per_edge_expected_stretch.iter().enumerate() {
            let (u, v) = g.edge(e);
            out.push_str(&format!("{e},{u},{v},{},{x}\n", a.spread(g, e)));
        }
        out
    }
}

/// Builds `T_i` for every shift and averages exactly. Shifts are processed
/// in parallel on the current rayon pool; the result does not depend on the
/// pool size.
pub fn explicit_distribution(g: &Graph, a: &LinearArrangement) -> DistributionReport {
    let runs: Vec<(usize, StretchReport)> = (0..PaddedArrangement::shift_count(g.n()))
        .into_par_iter()
        .map(|shift| (shift, tree_for_shift(g, a, shift)))
        .collect();
    DistributionReport::from_runs(g, runs)
}

/// Averages over `samples` shifts drawn uniformly with replacement.
pub fn sampled_distribution(
    g: &Graph,
    a: &LinearArrangement,
    samples: usize,
    seed: u64,
) -> DistributionReport {
    assert!(samples > 0, "at least one sample");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = PaddedArrangement::shift_count(g.n());
    let shifts: Vec<usize> = (0..samples).map(|_| rng.gen_range(0..count)).collect();
    let runs = shifts
        .into_par_iter()
        .map(|shift| (shift, tree_for_shift(g, a, shift)))
        .collect();
    DistributionReport::from_runs(g, runs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutwidthMode {
    Sample { seed: u64 },
    BestShift,
}

/// One tree from the shifted family: a random draw, or the shift with the
/// smallest average stretch.
pub fn cutwidth_tree(g: &Graph, a: &LinearArrangement, mode: CutwidthMode) -> (usize, StretchReport) {
    match mode {
        CutwidthMode::Sample { seed } => sample_tree(g, a, seed),
        CutwidthMode::BestShift => {
            let best = (0..PaddedArrangement::shift_count(g.n()))
                .into_par_iter()
                .map(|shift| (tree_for_shift(g, a, shift).total_stretch, shift))
                .min()
                .expect("at least one shift");
            (best.1, tree_for_shift(g, a, best.1))
        }
    }
}

/// Tree edges of `report` with both endpoints at base positions in
/// `lo..=hi`.
pub fn tree_edges_within(
    g: &Graph,
    a: &LinearArrangement,
    report: &StretchReport,
    lo: usize,
    hi: usize,
) -> Vec<EdgeId> {
    report
        .tree_edges
        .iter()
        .copied()
        .filter(|&e| {
            let (p, q) = a.edge_positions(g, e);
            lo <= p && q <= hi
        })
        .collect()
}

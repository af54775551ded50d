//! Invariant suites over built-in corpora, shared by `widthspan verify` and
//! the test suite.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::arrangement::{
    split_bound_safe, spread_sum, stats, widths, ArrangementTree, LinearArrangement,
    PaddedArrangement,
};
use crate::distribution::{
    cutwidth_tree, explicit_distribution, sample_tree, tree_edges_within, tree_for_shift,
    CutwidthMode,
};
use crate::generate::{generate, Family};
use crate::graph::Graph;
use crate::lowstretch::{
    bound_check, build_tree, charge_diagnostics, cycle_spread_check, edge_weights, greedy_scan,
    kruskal, split_stretch_check, StretchReport,
};
use crate::oracle::{
    connected_graphs, enumerate_min_stretch, expected_stretch_oracle, naive_stretch,
    spanning_tree_count,
};
use crate::twdp::{dp_min_stretch, min_width_decomposition, DpOptions, NiceTreeDecomposition, TreeDecomposition};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Bandwidth,
    Cutwidth,
    Distribution,
    Dp,
    All,
}

impl Suite {
    pub fn parse(name: &str) -> Option<Suite> {
        Some(match name {
            "bandwidth" => Suite::Bandwidth,
            "cutwidth" => Suite::Cutwidth,
            "distribution" => Suite::Distribution,
            "dp" => Suite::Dp,
            "all" => Suite::All,
            _ => return None,
        })
    }
}

/// Outcome of one invariant over a corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub suite: String,
    pub check: String,
    pub cases: usize,
    pub failures: usize,
    /// First failure, or a measured value for informational checks.
    pub detail: String,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Tally {
    suite: &'static str,
    check: &'static str,
    cases: usize,
    failures: usize,
    detail: String,
}

impl Tally {
    fn new(suite: &'static str, check: &'static str) -> Self {
        Tally {
            suite,
            check,
            cases: 0,
            failures: 0,
            detail: String::new(),
        }
    }

    fn record(&mut self, ok: bool, context: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            if self.failures == 0 {
                self.detail = context();
            }
            self.failures += 1;
        }
    }

    fn note(mut self, detail: String) -> Self {
        if self.failures == 0 {
            self.detail = detail;
        }
        self
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            suite: self.suite.into(),
            check: self.check.into(),
            cases: self.cases,
            failures: self.failures,
            detail: self.detail,
        }
    }
}

pub struct Instance {
    pub name: String,
    pub graph: Graph,
    pub arrangement: LinearArrangement,
}

fn instance(family: Family, n: usize, seed: u64) -> Instance {
    let (graph, arrangement) = generate(family, n, seed).expect("valid corpus parameters");
    Instance {
        name: format!("{}/n={n}/seed={seed}", family.name()),
        graph,
        arrangement,
    }
}

/// Random bandwidth-`b` graphs for `b` in 1..=6 plus cycles and grids.
pub fn bandwidth_corpus() -> Vec<Instance> {
    let mut out = Vec::new();
    for b in 1..=6 {
        for p in [0.3, 0.7] {
            for n in [16, 64, 256] {
                for seed in 0..2 {
                    out.push(instance(Family::RandomBandwidth { b, p }, n, seed));
                }
            }
        }
    }
    out.push(instance(Family::Cycle, 16, 0));
    out.push(instance(Family::Cycle, 101, 0));
    out.push(instance(Family::Grid { cols: 2 }, 64, 0));
    out.push(instance(Family::Grid { cols: 4 }, 64, 0));
    out
}

pub fn cutwidth_corpus() -> Vec<Instance> {
    let mut out = Vec::new();
    for c in 2..=4 {
        for n in [32, 64, 128] {
            for seed in 0..2 {
                out.push(instance(Family::RandomCutwidth { c }, n, seed));
            }
        }
    }
    out.push(instance(Family::Caterpillar { legs: 8 }, 9, 0));
    out
}

fn is_random_bandwidth(inst: &Instance) -> bool {
    inst.name.starts_with("random_bandwidth")
}

pub fn bandwidth_suite() -> Vec<CheckResult> {
    const S: &str = "bandwidth";
    let corpus = bandwidth_corpus();
    let reports: Vec<StretchReport> = corpus
        .par_iter()
        .map(|x| build_tree(&x.graph, &x.arrangement))
        .collect();
    let mut split_once = Tally::new(S, "every edge split by exactly one node");
    let mut split_safe = Tally::new(S, "|S_v| <= b(b+1)/2");
    let mut tight = 0usize;
    let mut degree = Tally::new(S, "deg(v) <= 2b");
    let mut spread = Tally::new(S, "sum of spreads <= cutwidth * n");
    let mut witness = Tally::new(S, "random_bandwidth witness has bandwidth <= b");
    let mut greedy = Tally::new(S, "greedy scan equals Kruskal");
    let mut identity = Tally::new(S, "FCB = m*avg + m - 2n + 2");
    let mut tree_ok = Tally::new(S, "stretch agrees with BFS oracle");
    let mut avg = Tally::new(S, "avg stretch <= 4b^3 + 2");
    let mut fcb = Tally::new(S, "FCB <= 4b^3 n");
    let mut long = Tally::new(S, "long components <= b");
    let mut mono = Tally::new(S, "long components monotone (random_bandwidth)");
    let mut charge = Tally::new(S, "sum of charges <= b n");
    let mut literal_total = 0usize;
    let mut cycles = Tally::new(S, "2s <= b|C| and |C| <= s + 1");
    let mut split_stretch = Tally::new(S, "padded stretch <= 2p - 1");
    for (x, r) in corpus.iter().zip(&reports) {
        let (g, a) = (&x.graph, &x.arrangement);
        let w = widths(g, a);
        let b = w.bandwidth;
        let tree = ArrangementTree::build(g, a);
        let ok = (0..g.m()).all(|e| {
            let node = tree.node(tree.split_node_of(e));
            let (p, q) = a.edge_positions(g, e);
            let inside = |i: usize| tree.node(i).lo <= p && q <= tree.node(i).hi;
            let count = tree.nodes().iter().filter(|n| n.split_edges.contains(&e)).count();
            count == 1
                && node.lo <= p
                && q <= node.hi
                && node.children.is_some_and(|(l, rr)| !inside(l) && !inside(rr))
        });
        split_once.record(ok, || x.name.clone());
        let st = stats(g, a);
        split_safe.record(st.max_split_edges <= split_bound_safe(b), || {
            format!("{}: {} > {}", x.name, st.max_split_edges, split_bound_safe(b))
        });
        tight += st.tight_bound_violations;
        degree.record(g.vertices().all(|v| g.degree(v) <= 2 * b), || x.name.clone());
        spread.record(spread_sum(g, a) <= w.cutwidth * g.n(), || x.name.clone());
        if let Some(rest) = x.name.strip_prefix("random_bandwidth(b=") {
            let declared: usize = rest.split(',').next().unwrap().parse().unwrap();
            witness.record(b <= declared, || x.name.clone());
        }
        let weights = edge_weights(g, a, &tree);
        greedy.record(greedy_scan(g, a, &tree) == kruskal(g, &weights), || x.name.clone());
        identity.record(r.fcb_identity_holds(), || x.name.clone());
        if g.n() <= 64 {
            tree_ok.record(naive_stretch(g, &r.tree_edges) == r.per_edge_stretch, || x.name.clone());
        }
        let bc = bound_check(g, a, r);
        avg.record(bc.avg_stretch_ok, || format!("{}: avg {}", x.name, r.avg_stretch));
        fcb.record(bc.fcb_ok, || format!("{}: fcb {}", x.name, r.fcb_weight));
        let ch = charge_diagnostics(g, a);
        long.record(ch.long_bound_holds(), || format!("{}: {}", x.name, ch.max_long_components));
        if is_random_bandwidth(x) {
            mono.record(ch.monotone(), || {
                format!("{}: {} violations", x.name, ch.monotonicity_violations.len())
            });
        }
        charge.record(ch.charge_bound_holds(), || format!("{}: {}", x.name, ch.total_charge));
        literal_total += ch.total_charge_literal;
        let rows = cycle_spread_check(g, a, r);
        cycles.record(rows.iter().all(|r| r.lower_ok && r.upper_ok), || x.name.clone());
        for shift in [0, PaddedArrangement::shift_count(g.n()) - 1] {
            let padded = PaddedArrangement::new(a.clone(), shift);
            let pr = tree_for_shift(g, a, shift);
            let rows = split_stretch_check(g, &padded, &pr);
            split_stretch.record(rows.iter().all(|r| r.bound_ok), || format!("{} shift {shift}", x.name));
        }
    }
    vec![
        split_once.finish(),
        split_safe.finish(),
        Tally::new(S, "nodes above (b-1)(b-2)/2 split edges (reported only)")
            .note(format!("{tight}"))
            .finish(),
        degree.finish(),
        spread.finish(),
        witness.finish(),
        greedy.finish(),
        identity.finish(),
        tree_ok.finish(),
        avg.finish(),
        fcb.finish(),
        long.finish(),
        mono.finish(),
        charge.finish(),
        Tally::new(S, "sum of charges, printed third case (reported only)")
            .note(format!("{literal_total}"))
            .finish(),
        cycles.finish(),
        split_stretch.finish(),
    ]
}

pub fn cutwidth_suite() -> Vec<CheckResult> {
    const S: &str = "cutwidth";
    let corpus = cutwidth_corpus();
    let mut spread = Tally::new(S, "sum of spreads <= c n");
    let mut identity = Tally::new(S, "FCB = m*avg + m - 2n + 2");
    let mut best_le_sample = Tally::new(S, "best shift <= sampled shift");
    let mut constant: f64 = 0.0;
    let results: Vec<(StretchReport, StretchReport)> = corpus
        .par_iter()
        .map(|x| {
            let (_, best) = cutwidth_tree(&x.graph, &x.arrangement, CutwidthMode::BestShift);
            let (_, sampled) = cutwidth_tree(&x.graph, &x.arrangement, CutwidthMode::Sample { seed: 7 });
            (best, sampled)
        })
        .collect();
    for (x, (best, sampled)) in corpus.iter().zip(&results) {
        let (g, a) = (&x.graph, &x.arrangement);
        let c = widths(g, a).cutwidth;
        spread.record(spread_sum(g, a) <= c * g.n(), || x.name.clone());
        identity.record(best.fcb_identity_holds() && sampled.fcb_identity_holds(), || x.name.clone());
        best_le_sample.record(best.total_stretch <= sampled.total_stretch, || x.name.clone());
        constant = constant.max(best.avg_stretch.to_f64() / (c * c) as f64);
    }
    vec![
        spread.finish(),
        identity.finish(),
        best_le_sample.finish(),
        Tally::new(S, "max avg stretch / c^2 (reported only)")
            .note(format!("{constant:.4}"))
            .finish(),
    ]
}

pub fn distribution_suite() -> Vec<CheckResult> {
    const S: &str = "distribution";
    let mut oracle = Tally::new(S, "explicit distribution equals independent oracle");
    let mut identity = Tally::new(S, "FCB identity for every shift");
    let mut reproducible = Tally::new(S, "sampling reproducible per seed");
    let mut aligned = Tally::new(S, "congruent shifts agree on aligned blocks");
    let mut small = Vec::new();
    for n in [2, 4, 9, 16, 32] {
        small.push(instance(Family::Path, n, 0));
        if n >= 3 {
            small.push(instance(Family::Cycle, n, 0));
        }
    }
    for b in 2..=3 {
        for seed in 0..3 {
            small.push(instance(Family::RandomBandwidth { b, p: 0.5 }, 32, seed));
        }
    }
    small.push(instance(Family::Grid { cols: 3 }, 30, 0));
    small.push(instance(Family::RandomCutwidth { c: 3 }, 32, 1));
    for x in &small {
        let (g, a) = (&x.graph, &x.arrangement);
        let d = explicit_distribution(g, a);
        oracle.record(d.per_edge_expected_stretch == expected_stretch_oracle(g, a), || x.name.clone());
        for shift in 0..PaddedArrangement::shift_count(g.n()) {
            identity.record(tree_for_shift(g, a, shift).fcb_identity_holds(), || {
                format!("{} shift {shift}", x.name)
            });
        }
        reproducible.record(sample_tree(g, a, 11) == sample_tree(g, a, 11), || x.name.clone());
        let count = PaddedArrangement::shift_count(g.n());
        let trees: Vec<StretchReport> = (0..count).map(|s| tree_for_shift(g, a, s)).collect();
        let n = g.n();
        for h in 1..=3u32 {
            let size = 1usize << h;
            for i in 0..count.saturating_sub(size) {
                let j = i + size;
                for k in 0..PaddedArrangement::padded_len(n) / size {
                    if (k + 1) * size <= i {
                        continue;
                    }
                    let lo = (k * size + 1).saturating_sub(i).max(1);
                    let hi = ((k + 1) * size - i).min(n);
                    if lo > hi {
                        continue;
                    }
                    aligned.record(
                        tree_edges_within(g, a, &trees[i], lo, hi)
                            == tree_edges_within(g, a, &trees[j], lo, hi),
                        || format!("{} shifts {i},{j} block {lo}..{hi}", x.name),
                    );
                }
            }
        }
    }
    vec![oracle.finish(), identity.finish(), reproducible.finish(), aligned.finish()]
}

/// Connected graphs on at most `max_n` vertices plus the named instances,
/// each with a decomposition.
pub fn dp_corpus(max_n: usize) -> Vec<(String, Graph, TreeDecomposition)> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for (i, g) in connected_graphs(n).into_iter().enumerate() {
            let td = min_width_decomposition(&g);
            out.push((format!("connected/n={n}/#{i}"), g, td));
        }
    }
    for n in 2..=10 {
        let x = instance(Family::Path, n, 0);
        let td = TreeDecomposition::from_arrangement(&x.graph, &x.arrangement);
        out.push((x.name, x.graph, td));
    }
    for n in 3..=10 {
        let x = instance(Family::Cycle, n, 0);
        let td = TreeDecomposition::from_arrangement(&x.graph, &x.arrangement);
        out.push((x.name, x.graph, td));
    }
    for (family, n) in [(Family::Complete, 4), (Family::Grid { cols: 3 }, 6)] {
        let x = instance(family, n, 0);
        let td = min_width_decomposition(&x.graph);
        out.push((x.name, x.graph, td));
    }
    out
}

pub fn dp_suite() -> Vec<CheckResult> {
    const S: &str = "dp";
    let corpus = dp_corpus(5);
    let outcomes: Vec<_> = corpus
        .par_iter()
        .map(|(name, g, td)| {
            let nice = NiceTreeDecomposition::from_decomposition(td);
            let dp = dp_min_stretch(g, &nice, &DpOptions::default());
            let oracle = enumerate_min_stretch(g, 1_000_000, false);
            (name, g, dp, oracle)
        })
        .collect();
    let mut equal = Tally::new(S, "DP optimum equals exhaustive minimum");
    let mut count = Tally::new(S, "enumeration count equals matrix-tree count");
    let mut cap = Tally::new(S, "configurations within 2k + 2 nodes");
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for (name, g, dp, oracle) in outcomes {
        match (&dp, &oracle) {
            (Ok(sol), Ok(o)) => {
                equal.record(sol.total_stretch == o.min_total_stretch, || {
                    format!("{name}: {} vs {}", sol.total_stretch, o.min_total_stretch)
                });
                count.record(o.spanning_tree_count == spanning_tree_count(g), || name.clone());
                cap.record(sol.stats.over_cap == 0, || name.clone());
                seen.insert(sol.stats.width);
            }
            (Err(e), _) => equal.record(false, || format!("{name}: {e}")),
            (_, Err(e)) => equal.record(false, || format!("{name}: {e}")),
        }
    }
    vec![
        equal.note(format!("widths {seen:?}")).finish(),
        count.finish(),
        cap.finish(),
    ]
}

pub fn run(suite: Suite) -> Vec<CheckResult> {
    match suite {
        Suite::Bandwidth => bandwidth_suite(),
        Suite::Cutwidth => cutwidth_suite(),
        Suite::Distribution => distribution_suite(),
        Suite::Dp => dp_suite(),
        Suite::All => [bandwidth_suite(), cutwidth_suite(), distribution_suite(), dp_suite()].concat(),
    }
}

//! Graph families with witness arrangements, used as test corpora.
//!
//! Every generator is deterministic given its seed (ChaCha8 stream).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arrangement::LinearArrangement;
use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Path,
    Cycle,
    /// Row-major grid with `cols` columns; `n` must be a multiple of `cols`.
    Grid { cols: usize },
    Complete,
    /// A spine where every spine vertex is followed by `legs` pendant
    /// vertices. `legs = n - 1` gives a star.
    Caterpillar { legs: usize },
    /// Every pair within distance `b` of the identity layout is an edge with
    /// probability `p`; spread-1 pairs are always edges.
    RandomBandwidth { b: usize, p: f64 },
    /// A path backbone plus random longer edges, each accepted only if no
    /// gap would then be crossed by more than `c` edges.
    RandomCutwidth { c: usize },
}

impl Family {
    pub fn name(&self) -> String {
        match *self {
            Family::Path => "path".into(),
            Family::Cycle => "cycle".into(),
            Family::Grid { cols } => format!("grid(cols={cols})"),
            Family::Complete => "complete".into(),
            Family::Caterpillar { legs } => format!("caterpillar(legs={legs})"),
            Family::RandomBandwidth { b, p } => format!("random_bandwidth(b={b},p={p})"),
            Family::RandomCutwidth { c } => format!("random_cutwidth(c={c})"),
        }
    }
}

fn invalid(msg: impl Into<String>) -> GenerateError {
    GenerateError::InvalidParameter(msg.into())
}

/// Generates a member of `family` on `n` vertices together with a witness
/// arrangement.
pub fn generate(
    family: Family,
    n: usize,
    seed: u64,
) -> Result<(Graph, LinearArrangement), GenerateError> {
    if n < 2 {
        return Err(invalid(format!("n must be at least 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let last = n as Vertex;
    let mut order: Vec<Vertex> = (1..=last).collect();
    let mut pairs: Vec<(Vertex, Vertex)> = Vec::new();
    match family {
        Family::Path => pairs.extend((1..last).map(|v| (v, v + 1))),
        Family::Cycle => {
            if n < 3 {
                return Err(invalid("a cycle needs at least 3 vertices"));
            }
            pairs.extend((1..last).map(|v| (v, v + 1)));
            pairs.push((1, last));
            order = zigzag(n);
        }
        Family::Grid { cols } => {
            if cols == 0 || !n.is_multiple_of(cols) {
                return Err(invalid(format!("n = {n} is not a multiple of cols = {cols}")));
            }
            let id = |r: usize, c: usize| (r * cols + c + 1) as Vertex;
            let rows = n / cols;
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        pairs.push((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < rows {
                        pairs.push((id(r, c), id(r + 1, c)));
                    }
                }
            }
        }
        Family::Complete => {
            for u in 1..=last {
                for v in u + 1..=last {
                    pairs.push((u, v));
                }
            }
        }
        Family::Caterpillar { legs } => {
            let group = legs + 1;
            let mut spine_prev: Option<Vertex> = None;
            for start in (1..=n).step_by(group) {
                let spine = start as Vertex;
                if let Some(prev) = spine_prev {
                    pairs.push((prev, spine));
                }
                for leg in start + 1..(start + group).min(n + 1) {
                    pairs.push((spine, leg as Vertex));
                }
                spine_prev = Some(spine);
            }
        }
        Family::RandomBandwidth { b, p } => {
            if b == 0 {
                return Err(invalid("bandwidth b must be at least 1"));
            }
            if !(p > 0.0 && p <= 1.0) {
                return Err(invalid(format!("probability p must lie in (0, 1], got {p}")));
            }
            for u in 1..=n {
                for d in 1..=b {
                    let v = u + d;
                    if v > n {
                        break;
                    }
                    let keep = rng.gen_bool(p);
                    if keep || d == 1 {
                        pairs.push((u as Vertex, v as Vertex));
                    }
                }
            }
        }
        Family::RandomCutwidth { c } => {
            if c == 0 {
                return Err(invalid("cutwidth c must be at least 1"));
            }
            pairs.extend((1..last).map(|v| (v, v + 1)));
            // load[i] = edges crossing the gap between positions i and i + 1
            let mut load = vec![1usize; n];
            let mut present = std::collections::HashSet::new();
            if n >= 3 && c >= 2 {
                for _ in 0..4 * n {
                    let u = rng.gen_range(1..=n - 2);
                    let v = rng.gen_range(u + 2..=n);
                    if present.contains(&(u, v)) || load[u..v].iter().any(|&l| l >= c) {
                        continue;
                    }
                    for l in &mut load[u..v] {
                        *l += 1;
                    }
                    present.insert((u, v));
                    pairs.push((u as Vertex, v as Vertex));
                }
            }
        }
    }
    let g = Graph::new(n, &pairs).map_err(|e| invalid(format!("generator produced {e}")))?;
    let a = LinearArrangement::from_order(&order).expect("generator order is a permutation");
    Ok((g, a))
}

/// Arrangement `1, 2, n, 3, n-1, 4, ...` giving a cycle bandwidth 2.
fn zigzag(n: usize) -> Vec<Vertex> {
    let mut order = vec![1 as Vertex];
    let (mut lo, mut hi) = (2 as Vertex, n as Vertex);
    let mut take_low = true;
    while lo <= hi {
        if take_low {
            order.push(lo);
            lo += 1;
        } else {
            order.push(hi);
            hi -= 1;
        }
        take_low = !take_low;
    }
    order
}

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use widthspan::arrangement::{stats, LinearArrangement};
use widthspan::distribution::{cutwidth_tree, explicit_distribution, sampled_distribution, CutwidthMode};
use widthspan::generate::{generate, Family};
use widthspan::graph::Graph;
use widthspan::lowstretch::build_tree;
use widthspan::oracle::enumerate_min_stretch;
use widthspan::suites::{self, Suite};
use widthspan::twdp::{dp_min_stretch, DpOptions, NiceTreeDecomposition, TreeDecomposition};

#[derive(Parser)]
#[command(name = "widthspan", version, about = "Low-stretch spanning trees from linear arrangements and tree decompositions")]
struct Cli {
    /// Worker threads for shift and corpus parallelism (default: WIDTHSPAN_JOBS or all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the run manifest here instead of stderr.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Inputs {
    /// Edge-list graph (`p n m` header, `e u v` lines).
    #[arg(long)]
    graph: PathBuf,
    /// Arrangement file: line k holds the vertex at position k.
    #[arg(long)]
    arrangement: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Width measures and split-set sizes as JSON.
    Stats {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Spanning tree from an arrangement, with its stretch report.
    BuildTree {
        #[command(flatten)]
        inputs: Inputs,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also write the tree as an edge-list document.
        #[arg(long)]
        tree: Option<PathBuf>,
    },
    /// Expected stretch over shifted padded arrangements.
    Distribution {
        #[command(flatten)]
        inputs: Inputs,
        /// Evaluate every shift exactly.
        #[arg(long, conflicts_with = "sample", required_unless_present = "sample")]
        explicit: bool,
        /// Average over this many uniformly drawn shifts.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-edge table: edge_id,u,v,spread,expected_stretch.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// One tree from the shifted family: the best shift or a seeded draw.
    CutwidthTree {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, conflicts_with = "seed", required_unless_present = "seed")]
        best_shift: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact minimum-stretch spanning tree over a tree decomposition.
    DpMinStretch {
        #[arg(long)]
        graph: PathBuf,
        /// Tree decomposition in PACE .td format.
        #[arg(long)]
        td: PathBuf,
        /// Compare with exhaustive enumeration and print `dp = oracle`.
        #[arg(long)]
        check_oracle: bool,
        /// Keep entries that promise more unseen vertices than remain.
        #[arg(long)]
        no_prune: bool,
        #[arg(long, default_value_t = 3)]
        max_width: usize,
        #[arg(long, default_value_t = 24)]
        max_n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive spanning-tree enumeration.
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        cap: u128,
        #[arg(long)]
        histogram: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a graph with a witness arrangement.
    Gen {
        /// path, cycle, grid, complete, caterpillar, random_bandwidth, random_cutwidth
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Bandwidth for random_bandwidth.
        #[arg(long, default_value_t = 2)]
        b: usize,
        /// Edge probability for random_bandwidth.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Cutwidth for random_cutwidth.
        #[arg(long, default_value_t = 2)]
        c: usize,
        /// Columns for grid.
        #[arg(long, default_value_t = 2)]
        cols: usize,
        /// Pendant vertices per spine vertex for caterpillar.
        #[arg(long, default_value_t = 1)]
        legs: usize,
        /// Graph destination (stdout if absent).
        #[arg(long)]
        graph_out: Option<PathBuf>,
        #[arg(long)]
        arrangement_out: Option<PathBuf>,
        /// Path decomposition built from the arrangement, in .td format.
        #[arg(long)]
        td_out: Option<PathBuf>,
    },
    /// Run invariant suites; exits 1 if any check fails.
    Verify {
        /// bandwidth, cutwidth, distribution, dp or all
        #[arg(long, default_value = "all")]
        suite: String,
        /// Print the results as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Serialize)]
struct FileDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest {
    command: Vec<String>,
    inputs: Vec<FileDigest>,
    seed: Option<u64>,
    version: &'static str,
    wall_clock_ms: u128,
    outputs: Vec<FileDigest>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Tracks every file read and every artifact written.
#[derive(Default)]
struct Run {
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
    seed: Option<u64>,
}

impl Run {
    fn read(&mut self, path: &Path) -> Result<String> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(text.as_bytes()),
        });
        Ok(text)
    }

    fn graph(&mut self, path: &Path) -> Result<Graph> {
        let text = self.read(path)?;
        Graph::parse(&text).with_context(|| format!("invalid graph {}", path.display()))
    }

    fn inputs(&mut self, inputs: &Inputs) -> Result<(Graph, LinearArrangement)> {
        let g = self.graph(&inputs.graph)?;
        let text = self.read(&inputs.arrangement)?;
        let a = LinearArrangement::parse(&text)
            .and_then(|a| a.check_against(&g).map(|_| a))
            .with_context(|| format!("invalid arrangement {}", inputs.arrangement.display()))?;
        Ok((g, a))
    }

    /// Writes `content` to `path`, or to stdout when `path` is `None`.
    fn emit(&mut self, path: Option<&Path>, content: &str) -> Result<()> {
        let name = match path {
            Some(p) => {
                fs::write(p, content).with_context(|| format!("writing {}", p.display()))?;
                p.display().to_string()
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(content.as_bytes())?;
                out.flush()?;
                "<stdout>".to_string()
            }
        };
        self.outputs.push(FileDigest {
            path: name,
            sha256: sha256_hex(content.as_bytes()),
        });
        Ok(())
    }

    fn emit_json(&mut self, path: Option<&Path>, value: &impl Serialize) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.emit(path, &text)
    }
}

#[derive(Serialize)]
struct TreeOutput<'a> {
    tree: Vec<(u32, u32)>,
    report: &'a widthspan::StretchReport,
}

#[derive(Serialize)]
struct ShiftOutput<'a> {
    shift: usize,
    tree: Vec<(u32, u32)>,
    report: &'a widthspan::StretchReport,
}

fn tree_pairs(g: &Graph, edges: &[usize]) -> Vec<(u32, u32)> {
    edges.iter().map(|&e| g.edge(e)).collect()
}

fn tree_document(g: &Graph, edges: &[usize]) -> String {
    let mut out = format!("p {} {}\n", g.n(), edges.len());
    for &e in edges {
        let (u, v) = g.edge(e);
        out.push_str(&format!("e {u} {v}\n"));
    }
    out
}

fn family(name: &str, b: usize, p: f64, c: usize, cols: usize, legs: usize) -> Result<Family> {
    Ok(match name {
        "path" => Family::Path,
        "cycle" => Family::Cycle,
        "grid" => Family::Grid { cols },
        "complete" => Family::Complete,
        "caterpillar" => Family::Caterpillar { legs },
        "random_bandwidth" => Family::RandomBandwidth { b, p },
        "random_cutwidth" => Family::RandomCutwidth { c },
        other => bail!("unknown family {other:?}"),
    })
}

/// Returns `Ok(false)` when a suite or oracle comparison fails.
fn execute(command: Command, run: &mut Run) -> Result<bool> {
    match command {
        Command::Stats { inputs } => {
            let (g, a) = run.inputs(&inputs)?;
            run.emit_json(None, &stats(&g, &a))?;
        }
        Command::BuildTree { inputs, report, tree } => {
            let (g, a) = run.inputs(&inputs)?;
            let r = build_tree(&g, &a);
            let out = TreeOutput {
                tree: tree_pairs(&g, &r.tree_edges),
                report: &r,
            };
            run.emit_json(report.as_deref(), &out)?;
            if let Some(path) = tree {
                run.emit(Some(&path), &tree_document(&g, &r.tree_edges))?;
            }
        }
        Command::Distribution {
            inputs,
            explicit,
            sample,
            seed,
            out,
            csv,
        } => {
            let (g, a) = run.inputs(&inputs)?;
            let report = if explicit {
                explicit_distribution(&g, &a)
            } else {
                let samples = sample.expect("clap enforces --explicit or --sample");
                if samples == 0 {
                    bail!("--sample must be positive");
                }
                run.seed = Some(seed);
                sampled_distribution(&g, &a, samples, seed)
            };
            run.emit_json(out.as_deref(), &report)?;
            if let Some(path) = csv {
                run.emit(Some(&path), &report.to_csv(&g, &a))?;
            }
        }
        Command::CutwidthTree {
            inputs,
            best_shift,
            seed,
            out,
        } => {
            let (g, a) = run.inputs(&inputs)?;
            let mode = if best_shift {
                CutwidthMode::BestShift
            } else {
                let seed = seed.expect("clap enforces --best-shift or --seed");
                run.seed = Some(seed);
                CutwidthMode::Sample { seed }
            };
            let (shift, r) = cutwidth_tree(&g, &a, mode);
            let output = ShiftOutput {
                shift,
                tree: tree_pairs(&g, &r.tree_edges),
                report: &r,
            };
            run.emit_json(out.as_deref(), &output)?;
        }
        Command::DpMinStretch {
            graph,
            td,
            check_oracle,
            no_prune,
            max_width,
            max_n,
            out,
        } => {
            let g = run.graph(&graph)?;
            let text = run.read(&td)?;
            let td = TreeDecomposition::parse(&text)
                .with_context(|| format!("invalid decomposition {}", td_name(&text)))?;
            td.validate(&g).context("decomposition does not match the graph")?;
            if td.width() > max_width || g.n() > max_n {
                bail!(
                    "width {} and {} vertices exceed the limits (width <= {max_width}, n <= {max_n}); \
                     tables grow like n^(k+1), raise --max-width/--max-n to proceed anyway",
                    td.width(),
                    g.n()
                );
            }
            let nice = NiceTreeDecomposition::from_decomposition(&td);
            let options = DpOptions {
                prune: !no_prune,
                max_config_vertices: None,
            };
            let sol = dp_min_stretch(&g, &nice, &options)?;
            if check_oracle {
                let oracle = enumerate_min_stretch(&g, 1_000_000, false)?;
                let same = oracle.min_total_stretch == sol.total_stretch;
                let sign = if same { "=" } else { "!=" };
                run.emit(None, &format!("{} {sign} {}\n", sol.total_stretch, oracle.min_total_stretch))?;
                if let Some(path) = out {
                    run.emit_json(Some(&path), &sol)?;
                }
                return Ok(same);
            }
            run.emit_json(out.as_deref(), &sol)?;
        }
        Command::Oracle {
            graph,
            cap,
            histogram,
            out,
        } => {
            let g = run.graph(&graph)?;
            let result = enumerate_min_stretch(&g, cap, histogram)?;
            run.emit_json(out.as_deref(), &result)?;
        }
        Command::Gen {
            family: name,
            n,
            seed,
            b,
            p,
            c,
            cols,
            legs,
            graph_out,
            arrangement_out,
            td_out,
        } => {
            run.seed = Some(seed);
            let fam = family(&name, b, p, c, cols, legs)?;
            let (g, a) = generate(fam, n, seed)?;
            run.emit(graph_out.as_deref(), &g.to_edge_list())?;
            let arrangement_out = arrangement_out.or_else(|| graph_out.map(|p| p.with_extension("arr")));
            if let Some(path) = arrangement_out {
                run.emit(Some(&path), &a.to_text())?;
            }
            if let Some(path) = td_out {
                run.emit(Some(&path), &TreeDecomposition::from_arrangement(&g, &a).to_text())?;
            }
        }
        Command::Verify { suite, json } => {
            let which = Suite::parse(&suite).with_context(|| format!("unknown suite {suite:?}"))?;
            let results = suites::run(which);
            let ok = results.iter().all(|r| r.passed());
            if json {
                run.emit_json(None, &results)?;
            } else {
                let mut table = String::new();
                for r in &results {
                    let status = if r.passed() { "pass" } else { "FAIL" };
                    table.push_str(&format!(
                        "{status}  {:<12} {:<55} {:>6} cases  {}\n",
                        r.suite, r.check, r.cases, r.detail
                    ));
                }
                let failed = results.iter().filter(|r| !r.passed()).count();
                table.push_str(&format!("{} checks, {failed} failed\n", results.len()));
                run.emit(None, &table)?;
            }
            return Ok(ok);
        }
    }
    Ok(true)
}

fn td_name(text: &str) -> String {
    text.lines().find(|l| l.starts_with('s')).unwrap_or("").to_string()
}

fn configure_jobs(jobs: Option<usize>) -> Result<()> {
    let jobs = match jobs {
        Some(j) => Some(j),
        None => match std::env::var("WIDTHSPAN_JOBS") {
            Ok(v) => Some(v.parse().with_context(|| format!("WIDTHSPAN_JOBS={v:?} is not a number"))?),
            Err(_) => None,
        },
    };
    if let Some(j) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .context("configuring the worker pool")?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut run = Run::default();
    let outcome = configure_jobs(cli.jobs).and_then(|_| execute(cli.command, &mut run));
    let manifest = RunManifest {
        command: std::env::args().collect(),
        inputs: std::mem::take(&mut run.inputs),
        seed: run.seed,
        version: env!("CARGO_PKG_VERSION"),
        wall_clock_ms: start.elapsed().as_millis(),
        outputs: std::mem::take(&mut run.outputs),
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    match &cli.manifest {
        Some(path) => {
            if let Err(e) = fs::write(path, text + "\n") {
                eprintln!("error: writing manifest {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => eprintln!("{text}"),
    }
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

//! Command-line front end over PACE `.gr` / `.td` files.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;

use crate::bkdp::Options;
use crate::error::{Error, Result};
use crate::generate::rng;
use crate::graph::{Graph, Vertex};
use crate::oracle::oracle_decomposition;
use crate::reduction::{
    decide_linear, decide_simple, treewidth_exact_linear, treewidth_exact_simple, SolverConfig, DEFAULT_MAX_K,
};
use crate::treedec::{to_nice, TreeDecomposition};
use crate::typseq::{merge_sum, parse_values, superior, tau};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "twsolve", version, about = "Exact treewidth for PACE-format graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    /// Recursive matching contraction with the sequence DP.
    Linear,
    /// One edge contraction per level with the sequence DP.
    Simple,
    /// Exponential subset DP (n <= 20).
    Oracle,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print an optimal decomposition, or decide a width bound.
    Solve {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = Algorithm::Linear)]
        algorithm: Algorithm,
        /// Largest width tried before giving up.
        #[arg(long, default_value_t = DEFAULT_MAX_K)]
        max_k: usize,
        /// Only answer whether the width is at most this value.
        #[arg(long)]
        decide: Option<usize>,
        /// Log per-node DP statistics to standard error.
        #[arg(long)]
        trace: bool,
        /// Relabel vertices by this seed before solving.
        #[arg(long)]
        seed: Option<u64>,
        /// With `--decide`, skip building the decomposition.
        #[arg(long)]
        no_witness: bool,
        /// Worker threads for join nodes.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Check a decomposition against a graph.
    Validate { graph: PathBuf, decomposition: PathBuf },
    /// Typical-sequence calculator.
    Typseq {
        #[command(subcommand)]
        op: TypseqOp,
    },
    /// Print the nice form of a decomposition.
    Nice { graph: PathBuf, decomposition: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum TypseqOp {
    /// Typical sequence of a comma-separated list.
    Tau { seq: String },
    /// Whether the first sequence is superior to the second.
    Superior { a: String, b: String },
    /// Typical sequences of sums of equal-length extensions, minus `c`.
    Merge { a: String, b: String, c: u32 },
}

fn read_graph(path: &Path) -> Result<Graph> {
    Graph::parse_gr(BufReader::new(File::open(path)?))
}

fn read_td(path: &Path, g: &Graph) -> Result<TreeDecomposition> {
    let (td, n) = TreeDecomposition::parse_td(BufReader::new(File::open(path)?))?;
    if n != g.n() {
        return Err(Error::Parse { line: 1, msg: format!("decomposition is for {n} vertices, graph has {}", g.n()) });
    }
    Ok(td)
}

fn values(text: &str) -> Result<Vec<u32>> {
    parse_values(text).map_err(|msg| Error::Parse { line: 1, msg })
}

fn joined(v: &[u32]) -> String {
    v.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Io(_) => EXIT_PARSE,
        Error::Refused(_) => EXIT_CAP,
        Error::Contract(_) => EXIT_INVARIANT,
    }
}

/// Relabels `g` by a seeded permutation; returns the new graph and the map
/// from new labels back to the original ones.
fn shuffled(g: &Graph, seed: u64) -> (Graph, Vec<Vertex>) {
    let mut perm: Vec<Vertex> = (0..g.n()).collect();
    perm.shuffle(&mut rng(seed));
    let h = Graph::from_edges(g.n(), g.edges().map(|(a, b)| (perm[a], perm[b])));
    let mut back = vec![0; g.n()];
    for (v, &p) in perm.iter().enumerate() {
        back[p] = v;
    }
    (h, back)
}

#[allow(clippy::too_many_arguments)]
fn solve(
    out: &mut dyn Write,
    path: &Path,
    algorithm: Algorithm,
    max_k: usize,
    decide: Option<usize>,
    trace: bool,
    seed: Option<u64>,
    no_witness: bool,
    jobs: usize,
) -> Result<i32> {
    let g = read_graph(path)?;
    let (h, back) = match seed {
        Some(s) => shuffled(&g, s),
        None => (g.clone(), (0..g.n()).collect()),
    };
    let cfg = SolverConfig {
        max_k,
        bk: Options { trace, jobs, ..Options::default() },
        witness: !(no_witness && decide.is_some()),
    };
    if let Some(k) = decide {
        let verdict = match algorithm {
            Algorithm::Linear => decide_linear(&h, k, &cfg)?,
            Algorithm::Simple => decide_simple(&h, k, &cfg)?,
            Algorithm::Oracle => {
                let (w, td) = oracle_decomposition(&h)?;
                (w <= k).then_some(td)
            }
        };
        match verdict {
            Some(td) => {
                writeln!(out, "YES")?;
                if cfg.witness {
                    write!(out, "{}", td.relabel(|v| back[v]).make_non_redundant().to_td(g.n()))?;
                }
            }
            None => writeln!(out, "NO")?,
        }
        return Ok(EXIT_OK);
    }
    let (w, td) = match algorithm {
        Algorithm::Linear => treewidth_exact_linear(&h, &cfg)?,
        Algorithm::Simple => treewidth_exact_simple(&h, &cfg)?,
        Algorithm::Oracle => oracle_decomposition(&h)?,
    };
    let td = td.relabel(|v| back[v]).make_non_redundant();
    let report = td.validate(&g);
    if !report.is_valid() || td.width() > w as isize {
        return Err(Error::Contract(format!("solver produced a bad decomposition: {report}")));
    }
    log::info!("treewidth {w}");
    write!(out, "{}", td.to_td(g.n()))?;
    Ok(EXIT_OK)
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Solve { graph, algorithm, max_k, decide, trace, seed, no_witness, jobs } => {
            solve(out, &graph, algorithm, max_k, decide, trace, seed, no_witness, jobs)
        }
        Command::Validate { graph, decomposition } => {
            let g = read_graph(&graph)?;
            let td = read_td(&decomposition, &g)?;
            let report = td.validate(&g);
            writeln!(out, "{report}")?;
            Ok(if report.is_valid() { EXIT_OK } else { EXIT_INVALID })
        }
        Command::Typseq { op } => {
            match op {
                TypseqOp::Tau { seq } => writeln!(out, "{}", joined(tau(&values(&seq)?).values()))?,
                TypseqOp::Superior { a, b } => writeln!(out, "{}", superior(&values(&a)?, &values(&b)?))?,
                TypseqOp::Merge { a, b, c } => {
                    let (a, b) = (values(&a)?, values(&b)?);
                    if a.is_empty() || b.is_empty() {
                        return Err(Error::Parse { line: 1, msg: "empty sequence".into() });
                    }
                    let floor = a.iter().min().unwrap() + b.iter().min().unwrap();
                    if c > floor {
                        return Err(Error::Parse { line: 1, msg: format!("offset {c} exceeds the smallest sum {floor}") });
                    }
                    for r in merge_sum(&a, &b, c) {
                        writeln!(out, "{}", joined(r.seq.values()))?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Nice { graph, decomposition } => {
            let g = read_graph(&graph)?;
            let td = read_td(&decomposition, &g)?;
            write!(out, "{}", to_nice(&g, &td)?.dump())?;
            Ok(EXIT_OK)
        }
    }
}

/// Runs the command line `args`; returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_PARSE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}


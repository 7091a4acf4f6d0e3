//! Command-line front end: matrices and ranks, compilation, evaluation,
//! tree generation, benchmarking and the self-test report.

pub mod bench;
pub mod crosscheck;
pub mod selftest;

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use hc_core::circuit::{parse_circuit_with, DecodeOptions, OpKind};
use hc_core::compiler::{compile_with, load_automaton, render_automaton, CompileOptions, DEFAULT_CLASS_CAP};
use hc_core::enumerate::{
    build_pool, enum_contexts_capped, gen_parse_tree, InductiveSystem, PoolKind,
    DEFAULT_CONTEXT_CAP,
};
use hc_core::hankel::{build_circuit_matrix_with, build_hankel_with, saturation_profile, BitMatrix, MatrixSettings, RankReport};
use hc_core::properties::{parse_property, poly_eval, Property, PropertyOptions};
use hc_core::ColoredGraph;

#[derive(Debug, Parser)]
#[command(name = "hc", version, about = "Hankel and circuit matrices over GF(2), and compiled tree automata")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Threads for matrix filling and compilation.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Whether the empty graph counts as connected.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub empty_connected: u8,
    /// Sum only over proper vertex subsets in `poly`.
    #[arg(long, global = true)]
    pub proper_subsets: bool,
}

#[derive(Debug, Args, Clone)]
pub struct MatrixArgs {
    /// System file, or a builtin: cw<k>, tw<k>, mw<k>, union.
    #[arg(long, default_value = "cw2")]
    pub system: String,
    #[arg(long, default_value = "connected")]
    pub prop: String,
    /// Vertex bound of the structure pool.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Context nesting depth.
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    /// `class` (members of the system's class) or `all` (every graph).
    #[arg(long, default_value = "class")]
    pub pool: PoolKind,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank report of a circuit matrix, or of a Hankel matrix with `--op`.
    Rank {
        #[command(flatten)]
        m: MatrixArgs,
        /// Binary operation signature, e.g. `union` or `join`.
        #[arg(long)]
        op: Option<String>,
        /// Report every truncation (n', d') up to (n, depth).
        #[arg(long)]
        profile: bool,
    },
    /// Dump a matrix as rows of 0/1 characters.
    Matrix {
        #[command(flatten)]
        m: MatrixArgs,
        #[arg(long)]
        op: Option<String>,
    },
    /// Compile a property into an automaton file.
    Compile {
        #[command(flatten)]
        m: MatrixArgs,
        #[arg(long, default_value_t = DEFAULT_CLASS_CAP)]
        class_cap: usize,
    },
    /// Evaluate a parse tree with a compiled automaton.
    Eval {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random parse tree.
    Gen {
        #[arg(long, default_value = "cw2")]
        system: String,
        #[arg(long, default_value_t = 15)]
        size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time automaton evaluation on growing trees; CSV output.
    Bench {
        #[command(flatten)]
        m: MatrixArgs,
        /// Use this automaton instead of compiling one.
        #[arg(long)]
        automaton: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long, default_value_t = 5)]
        runs: usize,
    },
    /// Run the self-test suite and print its report.
    Selftest {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        trees: usize,
    },
    /// Subset polynomial of a graph.
    Poly {
        #[arg(long, default_value = "connected")]
        prop: String,
        /// Graph file, or K<n>, P<n>, C<n>, E<n> (edgeless).
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 1.0)]
        x: f64,
    },
}

/// Failures, split by exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0:#}")]
    Usage(anyhow::Error),
    #[error("{0:#}")]
    Domain(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<hc_core::Error> for CliError {
    fn from(e: hc_core::Error) -> Self {
        CliError::Domain(e.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain(e.into())
    }
}

fn usage(msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(anyhow!("{msg}"))
}

pub fn load_system(spec: &str) -> Result<InductiveSystem, CliError> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {spec}"))?;
        return Ok(InductiveSystem::parse(&text).with_context(|| format!("in {spec}"))?);
    }
    match InductiveSystem::builtin(spec) {
        Some(sys) => Ok(sys?),
        None => Err(usage(format!("`{spec}` is neither a system file nor a builtin system"))),
    }
}

fn load_property(text: &str, cli: &Cli) -> Result<Property, CliError> {
    let opts = PropertyOptions {
        empty_connected: cli.empty_connected == 1,
    };
    parse_property(text, opts).map_err(|e| usage(format!("--prop: {e}")))
}

fn parse_op(sig: &str) -> Result<OpKind, CliError> {
    OpKind::parse_signature(sig).ok_or_else(|| usage(format!("unknown operation `{sig}`")))
}

/// Graph by file or shorthand.
fn load_graph(spec: &str) -> Result<ColoredGraph, CliError> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        return ColoredGraph::parse_text(&text).map_err(|e| CliError::Domain(anyhow!("{spec}: {e}")));
    }
    let (kind, n) = spec.split_at(spec.len().min(1));
    let n: usize = n.parse().map_err(|_| usage(format!("`{spec}` is neither a graph file nor K<n>/P<n>/C<n>/E<n>")))?;
    Ok(match kind {
        "K" => ColoredGraph::complete(n),
        "P" => ColoredGraph::path(n),
        "C" if n >= 3 => ColoredGraph::cycle(n),
        "E" => ColoredGraph::edgeless(n, 0),
        _ => return Err(usage(format!("unsupported graph shorthand `{spec}`"))),
    })
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn settings(m: &MatrixArgs) -> MatrixSettings {
    MatrixSettings {
        pool: m.pool,
        context_cap: DEFAULT_CONTEXT_CAP,
        decode: DecodeOptions::from_env(),
    }
}

/// The matrix selected by `--op` (Hankel) or else the circuit matrix,
/// with the depth to report.
fn matrix(m: &MatrixArgs, op: Option<&str>, cli: &Cli) -> Result<(BitMatrix, usize), CliError> {
    let sys = load_system(&m.system)?;
    let prop = load_property(&m.prop, cli)?;
    let s = settings(m);
    let pool = build_pool(&sys, m.n, m.pool)?;
    match op {
        Some(sig) => {
            let op = parse_op(sig)?;
            if op.arity() != 2 {
                return Err(usage(format!("--op needs a binary operation, `{sig}` is not")));
            }
            Ok((build_hankel_with(&op, &prop, &pool, &s.decode)?, 1))
        }
        None => {
            let contexts = enum_contexts_capped(&sys, &pool, m.depth, s.context_cap)?;
            Ok((build_circuit_matrix_with(&contexts, &prop, &pool, &s.decode)?, m.depth))
        }
    }
}

/// Runs a parsed command line, writing reports to `out` unless `--out` is
/// given.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(usage("--workers must be positive"));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| CliError::Domain(e.into()))?;
    // Reports are buffered so the worker pool never touches `out`.
    let mut buf: Vec<u8> = Vec::new();
    let result = pool.install(|| dispatch(cli, &mut buf));
    out.write_all(&buf)?;
    result
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Rank { m, op, profile } => {
            if *profile {
                if op.is_some() {
                    return Err(usage("--profile applies to circuit matrices only"));
                }
                let sys = load_system(&m.system)?;
                let prop = load_property(&m.prop, cli)?;
                let p = saturation_profile(&sys, &prop, m.n, m.depth, &settings(m));
                let text: String = p.reports.iter().map(|r| format!("{r}\n")).collect();
                emit(out, m.out.as_deref(), &text)?;
                if let Some(e) = p.error {
                    return Err(e.into());
                }
                return Ok(());
            }
            let (mat, depth) = matrix(m, op.as_deref(), cli)?;
            emit(out, m.out.as_deref(), &format!("{}\n", RankReport::of(&mat, m.n, depth)))
        }
        Command::Matrix { m, op } => {
            let (mat, _) = matrix(m, op.as_deref(), cli)?;
            emit(out, m.out.as_deref(), &mat.to_text())
        }
        Command::Compile { m, class_cap } => {
            let sys = load_system(&m.system)?;
            let prop = load_property(&m.prop, cli)?;
            let opts = CompileOptions {
                pool: m.pool,
                class_cap: *class_cap,
                ..CompileOptions::new(m.n, m.depth)
            };
            let aut = compile_with(&sys, &prop, &opts)?;
            let text = render_automaton(&aut);
            match &m.out {
                Some(path) => {
                    emit(out, Some(path), &text)?;
                    let p = aut.provenance();
                    writeln!(out, "classes {} rank {} pool {} depth {}", aut.class_count(), p.rank, p.pool, p.depth)?;
                    Ok(())
                }
                None => emit(out, None, &text),
            }
        }
        Command::Eval { automaton, tree, out: path } => {
            let aut = load_automaton(automaton).with_context(|| format!("loading {}", automaton.display()))?;
            let text = std::fs::read_to_string(tree).with_context(|| format!("reading {}", tree.display()))?;
            let t = parse_circuit_with(&text, &aut.system().parse_env())
                .map_err(|e| CliError::Domain(anyhow!("{}: {e}", tree.display())))?;
            let trace = aut.evaluate_tree(&t)?;
            emit(out, path.as_deref(), &format!("accept {}\nnodes {}\n", trace.accept as u8, trace.node_count))
        }
        Command::Gen { system, size, out: path } => {
            let sys = load_system(system)?;
            if *size == 0 {
                return Err(usage("--size must be positive"));
            }
            let t = gen_parse_tree(&sys, *size, cli.seed)?;
            emit(out, path.as_deref(), &format!("{t}\n"))
        }
        Command::Bench { m, automaton, sizes, runs } => {
            let prop = load_property(&m.prop, cli)?;
            let aut = match automaton {
                Some(path) => load_automaton(path)?,
                None => {
                    let sys = load_system(&m.system)?;
                    let opts = CompileOptions {
                        pool: m.pool,
                        ..CompileOptions::new(m.n, m.depth)
                    };
                    compile_with(&sys, &prop, &opts)?
                }
            };
            let mut cfg = bench::BenchConfig::doubling(cli.seed);
            if let Some(s) = sizes {
                cfg.sizes = s.clone();
            }
            cfg.runs = *runs;
            let rows = bench::bench(&aut, &prop, &cfg)?;
            emit(out, m.out.as_deref(), &bench::to_csv(&rows))
        }
        Command::Selftest { out: path, trees } => {
            let cfg = selftest::SelftestConfig {
                seed: cli.seed,
                random_trees: *trees,
                ..selftest::SelftestConfig::default()
            };
            let report = selftest::selftest(&cfg)?;
            emit(out, path.as_deref(), &report.text)?;
            if report.failures > 0 {
                return Err(CliError::Domain(anyhow!("{} of {} selftest checks failed", report.failures, report.checks)));
            }
            Ok(())
        }
        Command::Poly { prop, graph, x } => {
            let prop = load_property(prop, cli)?;
            let g = load_graph(graph)?;
            let v = poly_eval(&g, &prop, *x, cli.proper_subsets)?;
            let coeffs: Vec<String> = v.coeffs.iter().map(u64::to_string).collect();
            writeln!(out, "coeffs {}\nvalue {}", coeffs.join(" "), v.value)?;
            Ok(())
        }
    }
}

//! Evaluation-time scaling of a compiled automaton, with a decode-and-check
//! baseline where its work budget allows.

use std::fmt::Write as _;
use std::time::Instant;

use hc_core::circuit::{Circuit, DecodeOptions};
use hc_core::compiler::Automaton;
use hc_core::enumerate::gen_parse_tree;
use hc_core::properties::PropertyOracle;
use hc_core::{Error, Result};

/// Work allowance (vertices plus edges built) for one baseline decode.
pub const NAIVE_WORK_BUDGET: u64 = 50_000_000;

/// Each timed run repeats the evaluation until it covers this many nodes.
const NODES_PER_RUN: usize = 2_000_000;

/// Sizes below this are timed on several distinct trees totalling about
/// this many nodes.
const BATCH_NODES: usize = 64_000;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub runs: usize,
    pub seed: u64,
    pub naive_work_budget: u64,
}

impl BenchConfig {
    /// `1000 * 2^i` up to about a million nodes.
    pub fn doubling(seed: u64) -> Self {
        Self {
            sizes: (0..=10).map(|i| 1000 << i).collect(),
            runs: 5,
            seed,
            naive_work_budget: NAIVE_WORK_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Naive {
    Ran { nanos: f64, agree: bool },
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub size: usize,
    pub nodes: usize,
    /// Median nanoseconds per evaluation of one tree of this size.
    pub median_ns: f64,
    /// Median relative to the previous row.
    pub ratio: Option<f64>,
    pub naive: Naive,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

/// Sizes are timed round-robin, one run of each per round, so slow
/// periods on the machine spread over all sizes instead of skewing one.
/// Small sizes evaluate a batch of distinct trees, so that caches and
/// branch predictors trained on one repeated tree do not flatter them.
pub fn bench<P: PropertyOracle + ?Sized>(aut: &Automaton, prop: &P, cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    if cfg.runs == 0 {
        return Err(Error::Invalid("bench needs at least one run".into()));
    }
    let mut batches = Vec::with_capacity(cfg.sizes.len());
    let mut verdicts = Vec::with_capacity(cfg.sizes.len());
    for (i, &size) in cfg.sizes.iter().enumerate() {
        let count = (BATCH_NODES / size.max(1)).max(1);
        let mut batch = Vec::with_capacity(count);
        for b in 0..count {
            let seed = cfg.seed.wrapping_add((i as u64) << 32 | b as u64);
            batch.push(gen_parse_tree(aut.system(), size, seed)?);
        }
        // Warm-up, also fixes the verdict of the first tree.
        verdicts.push(aut.evaluate_tree(&batch[0])?.accept);
        batches.push(batch);
    }
    let mut times: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.runs); batches.len()];
    for _ in 0..cfg.runs {
        for (batch, slot) in batches.iter().zip(times.iter_mut()) {
            let nodes: usize = batch.iter().map(Circuit::tree_size).sum();
            let reps = (NODES_PER_RUN / nodes.max(1)).max(1);
            let start = Instant::now();
            for _ in 0..reps {
                for tree in batch {
                    std::hint::black_box(aut.evaluate_tree(std::hint::black_box(tree))?);
                }
            }
            slot.push(start.elapsed().as_nanos() as f64 / (reps * batch.len()) as f64);
        }
    }

    let opts = DecodeOptions {
        work_budget: cfg.naive_work_budget,
        ..DecodeOptions::from_env()
    };
    let mut rows: Vec<BenchRow> = Vec::new();
    for (((&size, batch), ts), verdict) in cfg.sizes.iter().zip(&batches).zip(times).zip(verdicts) {
        let tree = &batch[0];
        let median_ns = median(ts);
        let start = Instant::now();
        let naive = match tree.decode(&opts) {
            Ok(g) => {
                let holds = prop.holds(&g);
                Naive::Ran {
                    nanos: start.elapsed().as_nanos() as f64,
                    agree: holds == verdict,
                }
            }
            Err(Error::Budget { .. }) => Naive::Skipped,
            Err(e) => return Err(e),
        };
        let ratio = rows.last().map(|prev| median_ns / prev.median_ns);
        rows.push(BenchRow {
            size,
            nodes: tree.tree_size(),
            median_ns,
            ratio,
            naive,
        });
    }
    Ok(rows)
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("size,nodes,median_eval_ns,ratio,naive_ns,naive_status\n");
    for r in rows {
        let ratio = r.ratio.map_or(String::new(), |x| format!("{x:.3}"));
        let (naive, status) = match r.naive {
            Naive::Ran { nanos, agree } => (format!("{nanos:.0}"), if agree { "ok" } else { "mismatch" }),
            Naive::Skipped => (String::new(), "skipped"),
        };
        let _ = writeln!(out, "{},{},{:.0},{ratio},{naive},{status}", r.size, r.nodes, r.median_ns);
    }
    out
}

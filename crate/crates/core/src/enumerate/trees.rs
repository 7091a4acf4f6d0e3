use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, DecodeOptions, OpKind};
use crate::error::{Error, Result};

use super::system::InductiveSystem;

/// Attempts made by [`gen_parse_tree`] before giving up on the budget.
const MAX_ATTEMPTS: u64 = 64;

/// Which tree sizes are realizable. A tree with internal nodes of arities
/// `r_1, ..., r_m` has `1 + Σ r_i` nodes, so a size `s` is realizable iff
/// `s - 1` is a sum of operation arities.
struct Sizes {
    sums: Vec<bool>,
}

impl Sizes {
    fn new(sys: &InductiveSystem, max: usize) -> Self {
        let mut arities: Vec<usize> = sys.ops.iter().map(OpKind::arity).collect();
        arities.sort_unstable();
        arities.dedup();
        let mut sums = vec![false; max + 1];
        sums[0] = true;
        for s in 1..=max {
            sums[s] = arities.iter().any(|&r| r <= s && sums[s - r]);
        }
        Self { sums }
    }

    fn tree(&self, s: usize) -> bool {
        s >= 1 && self.sums[s - 1]
    }

    /// Can `total` nodes be split into `parts` realizable subtrees?
    fn forest(&self, parts: usize, total: usize) -> bool {
        total >= parts && self.sums[total - parts]
    }
}

/// The largest realizable tree size not above `size` (at least 1).
pub fn feasible_tree_size(sys: &InductiveSystem, size: usize) -> usize {
    let sizes = Sizes::new(sys, size.max(1));
    (1..=size.max(1)).rev().find(|&s| sizes.tree(s)).unwrap_or(1)
}

fn mix(seed: u64, salt: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.gen()
}

enum Choice {
    Leaf(usize),
    Op(usize),
}

/// A random parse tree with `size` nodes (or the largest realizable size
/// below it) over the system's base structures and operations. Each node
/// draws from its own generator seeded by its parent, so a subtree depends
/// only on its seed and size. Base leaves are named.
///
/// Trees whose decoded vertex count would exceed the budget are redrawn
/// with a derived seed.
pub fn gen_parse_tree(sys: &InductiveSystem, size: usize, seed: u64) -> Result<Circuit> {
    gen_parse_tree_with(sys, size, seed, &DecodeOptions::from_env())
}

pub fn gen_parse_tree_with(sys: &InductiveSystem, size: usize, seed: u64, opts: &DecodeOptions) -> Result<Circuit> {
    let target = feasible_tree_size(sys, size);
    let sizes = Sizes::new(sys, target);
    for attempt in 0..MAX_ATTEMPTS {
        let s = if attempt == 0 { seed } else { mix(seed, attempt) };
        let choices = draw(sys, &sizes, target, s);
        if predicted_vertices(sys, &choices) <= opts.vertex_budget {
            return Ok(build(sys, choices));
        }
    }
    Err(Error::Budget {
        what: "vertices (random tree)",
        needed: u64::MAX,
        budget: opts.vertex_budget,
    })
}

/// Pre-order list of node choices.
fn draw(sys: &InductiveSystem, sizes: &Sizes, size: usize, seed: u64) -> Vec<Choice> {
    let mut out = Vec::with_capacity(size);
    let mut stack = vec![(size, seed)];
    let mut parts = Vec::new();
    while let Some((s, seed)) = stack.pop() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if s == 1 {
            out.push(Choice::Leaf(rng.gen_range(0..sys.base.len())));
            continue;
        }
        let usable: Vec<usize> = (0..sys.ops.len())
            .filter(|&i| sizes.forest(sys.ops[i].arity(), s - 1))
            .collect();
        let oi = usable[rng.gen_range(0..usable.len())];
        out.push(Choice::Op(oi));
        let r = sys.ops[oi].arity();
        parts.clear();
        let mut left = s - 1;
        for i in 0..r {
            let rest = r - i - 1;
            let part = if rest == 0 { left } else { split(sizes, &mut rng, left, rest) };
            parts.push((part, rng.gen::<u64>()));
            left -= part;
        }
        // first child ends up on top of the stack
        stack.extend(parts.drain(..).rev());
    }
    out
}

/// A realizable first part of `total` leaving a forest of `rest` trees.
fn split(sizes: &Sizes, rng: &mut ChaCha8Rng, total: usize, rest: usize) -> usize {
    let max = total - rest;
    let ok = |a: usize| sizes.tree(a) && sizes.forest(rest, total - a);
    for _ in 0..64 {
        let a = rng.gen_range(1..=max);
        if ok(a) {
            return a;
        }
    }
    let start = rng.gen_range(1..=max);
    (start..=max).chain(1..start).find(|&a| ok(a)).expect("split exists")
}

fn predicted_vertices(sys: &InductiveSystem, choices: &[Choice]) -> u64 {
    let mut stack: Vec<u64> = Vec::new();
    for c in choices.iter().rev() {
        match *c {
            Choice::Leaf(b) => stack.push(sys.base[b].graph.n() as u64),
            Choice::Op(oi) => {
                let op = &sys.ops[oi];
                let args: Vec<u64> = (0..op.arity()).map(|_| stack.pop().expect("child")).collect();
                let v = match op {
                    OpKind::Tensor | OpKind::Cartesian => args.iter().fold(1u64, |a, &b| a.saturating_mul(b)),
                    _ => args.iter().fold(0u64, |a, &b| a.saturating_add(b)),
                };
                stack.push(v);
            }
        }
    }
    stack.pop().unwrap_or(0)
}

fn build(sys: &InductiveSystem, choices: Vec<Choice>) -> Circuit {
    let mut stack: Vec<Circuit> = Vec::new();
    for c in choices.into_iter().rev() {
        match c {
            Choice::Leaf(b) => {
                let base = &sys.base[b];
                stack.push(Circuit::named_leaf(&base.name, std::sync::Arc::clone(&base.graph)));
            }
            Choice::Op(oi) => {
                let op = &sys.ops[oi];
                let at = stack.len() - op.arity();
                let mut children = stack.split_off(at);
                children.reverse();
                stack.push(Circuit::Op(op.clone(), children));
            }
        }
    }
    stack.pop().expect("one root")
}

/// Number of distinct parse trees of each size `0..=size_max` (index 0 is
/// always 0).
pub fn count_parse_trees(sys: &InductiveSystem, size_max: usize) -> Vec<u128> {
    let mut counts = vec![0u128; size_max + 1];
    if size_max >= 1 {
        counts[1] = sys.base.len() as u128;
    }
    for s in 2..=size_max {
        let mut total = 0u128;
        for op in &sys.ops {
            total = total.saturating_add(forests(&counts, op.arity(), s - 1));
        }
        counts[s] = total;
    }
    counts
}

/// Ordered `parts`-tuples of trees with `total` nodes in all.
fn forests(counts: &[u128], parts: usize, total: usize) -> u128 {
    if parts == 0 {
        return (total == 0) as u128;
    }
    (1..=total)
        .map(|a| counts[a].saturating_mul(forests(counts, parts - 1, total - a)))
        .fold(0u128, u128::saturating_add)
}

/// Every parse tree with at most `size_max` nodes, each exactly once, in
/// order of size; within a size by operation, then by child sizes, then
/// recursively by children.
pub fn exhaustive_parse_trees(sys: &InductiveSystem, size_max: usize) -> impl Iterator<Item = Circuit> + '_ {
    (1..=size_max).flat_map(move |s| trees_of_size(sys, s))
}

pub fn trees_of_size(sys: &InductiveSystem, size: usize) -> Box<dyn Iterator<Item = Circuit> + '_> {
    if size == 0 {
        return Box::new(std::iter::empty());
    }
    if size == 1 {
        return Box::new(
            sys.base
                .iter()
                .map(|b| Circuit::named_leaf(&b.name, std::sync::Arc::clone(&b.graph))),
        );
    }
    Box::new(sys.ops.iter().flat_map(move |op| {
        compositions(size - 1, op.arity())
            .into_iter()
            .flat_map(move |parts| tuples(sys, parts).map(move |children| Circuit::Op(op.clone(), children)))
    }))
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for a in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - a, parts - 1) {
            rest.insert(0, a);
            out.push(rest);
        }
    }
    out
}

fn tuples(sys: &InductiveSystem, sizes: Vec<usize>) -> Box<dyn Iterator<Item = Vec<Circuit>> + '_> {
    match sizes.split_first() {
        None => Box::new(std::iter::once(Vec::new())),
        Some((&first, rest)) => {
            let rest = rest.to_vec();
            Box::new(trees_of_size(sys, first).flat_map(move |head| {
                tuples(sys, rest.clone()).map(move |mut tail| {
                    tail.insert(0, head.clone());
                    tail
                })
            }))
        }
    }
}

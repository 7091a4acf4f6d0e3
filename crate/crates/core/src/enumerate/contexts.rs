use std::sync::Arc;

use itertools::Itertools;

use crate::circuit::{apply_within_budget, Circuit, DecodeOptions, OpKind};
use crate::error::{Error, Result};
use crate::graph::ColoredGraph;

use super::pool::StructurePool;
use super::system::InductiveSystem;

/// Default cap on the number of enumerated contexts.
pub const DEFAULT_CONTEXT_CAP: usize = 250_000;

#[derive(Debug, Clone)]
struct Node {
    /// Context this one wraps; unused for the root `x`.
    parent: u32,
    op: u16,
    hole: u8,
    siblings: Box<[u32]>,
    level: u8,
}

/// Contexts with exactly one free leaf, stored as a trie: each context of
/// nesting `d` wraps one of nesting `d - 1` in a single operation whose
/// other operands are pool structures. Index 0 is `x`.
///
/// Order: `x`, then level by level; within a level by inner context, then
/// operation (system order), then hole position from last to first, then
/// sibling tuple in pool order.
#[derive(Debug, Clone)]
pub struct ContextSet {
    ops: Vec<OpKind>,
    leaves: Vec<Arc<ColoredGraph>>,
    nodes: Vec<Node>,
    depth: usize,
    /// Slot in the per-row scratch space for contexts that others wrap.
    slot: Vec<u32>,
    slots: usize,
}

pub fn enum_contexts(sys: &InductiveSystem, pool: &StructurePool, depth: usize) -> Result<ContextSet> {
    enum_contexts_capped(sys, pool, depth, DEFAULT_CONTEXT_CAP)
}

pub fn enum_contexts_capped(
    sys: &InductiveSystem,
    pool: &StructurePool,
    depth: usize,
    cap: usize,
) -> Result<ContextSet> {
    let p = pool.len() as u128;
    let per_level: u128 = sys
        .ops
        .iter()
        .map(|op| op.arity() as u128 * p.pow(op.arity() as u32 - 1))
        .sum();
    let mut level_size = 1u128;
    let mut total = 1u128;
    for _ in 0..depth {
        level_size = level_size.saturating_mul(per_level);
        total = total.saturating_add(level_size);
    }
    if total > cap as u128 {
        return Err(Error::ContextBudget { cap });
    }
    let mut nodes = vec![Node {
        parent: 0,
        op: 0,
        hole: 0,
        siblings: Box::new([]),
        level: 0,
    }];
    let mut prev = 0..1;
    for level in 1..=depth {
        let start = nodes.len();
        for parent in prev.clone() {
            for (oi, op) in sys.ops.iter().enumerate() {
                let r = op.arity();
                for hole in (0..r).rev() {
                    for sib in (0..r - 1).map(|_| 0..pool.len() as u32).multi_cartesian_product() {
                        nodes.push(Node {
                            parent: parent as u32,
                            op: oi as u16,
                            hole: hole as u8,
                            siblings: sib.into_boxed_slice(),
                            level: level as u8,
                        });
                    }
                }
            }
        }
        prev = start..nodes.len();
    }
    let mut slot = vec![u32::MAX; nodes.len()];
    let mut slots = 0;
    for (i, n) in nodes.iter().enumerate() {
        if (n.level as usize) < depth {
            slot[i] = slots as u32;
            slots += 1;
        }
    }
    Ok(ContextSet {
        ops: sys.ops.clone(),
        leaves: pool.graphs().to_vec(),
        nodes,
        depth,
        slot,
        slots,
    })
}

impl ContextSet {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Operation nesting of context `i`.
    pub fn level(&self, i: usize) -> usize {
        self.nodes[i].level as usize
    }

    pub fn circuit(&self, i: usize) -> Circuit {
        let node = &self.nodes[i];
        if node.level == 0 {
            return Circuit::Free;
        }
        let op = &self.ops[node.op as usize];
        let mut children: Vec<Circuit> = node
            .siblings
            .iter()
            .map(|&s| Circuit::leaf(Arc::clone(&self.leaves[s as usize])))
            .collect();
        children.insert(node.hole as usize, self.circuit(node.parent as usize));
        Circuit::Op(op.clone(), children)
    }

    pub fn circuits(&self) -> Vec<Circuit> {
        (0..self.len()).map(|i| self.circuit(i)).collect()
    }

    /// `C_j[a]` for every context `j`, in order, fed to `visit`. Inner
    /// results are computed once and reused by the contexts wrapping them.
    pub fn for_each_plugged(
        &self,
        a: &ColoredGraph,
        opts: &DecodeOptions,
        mut visit: impl FnMut(usize, &ColoredGraph),
    ) -> Result<(), (usize, Error)> {
        let mut scratch: Vec<Option<ColoredGraph>> = vec![None; self.slots];
        visit(0, a);
        if self.slots > 0 {
            scratch[0] = Some(a.clone());
        }
        for (i, node) in self.nodes.iter().enumerate().skip(1) {
            let g = {
                let inner = scratch[self.slot[node.parent as usize] as usize]
                    .as_ref()
                    .expect("inner contexts precede outer ones");
                let mut args: Vec<&ColoredGraph> = Vec::with_capacity(node.siblings.len() + 1);
                args.extend(node.siblings.iter().map(|&s| self.leaves[s as usize].as_ref()));
                args.insert(node.hole as usize, inner);
                apply_within_budget(&self.ops[node.op as usize], &args, opts).map_err(|e| (i, e))?
            };
            visit(i, &g);
            if self.slot[i] != u32::MAX {
                scratch[self.slot[i] as usize] = Some(g);
            }
        }
        Ok(())
    }

    /// Packed 0/1 row of `prop(C_j[a])` over all contexts.
    pub fn row(
        &self,
        a: &ColoredGraph,
        prop: &(impl Fn(&ColoredGraph) -> bool + ?Sized),
        opts: &DecodeOptions,
    ) -> Result<Vec<u64>, (usize, Error)> {
        let mut bits = vec![0u64; self.len().div_ceil(64)];
        self.for_each_plugged(a, opts, |j, g| {
            if prop(g) {
                bits[j / 64] |= 1 << (j % 64);
            }
        })?;
        Ok(bits)
    }
}

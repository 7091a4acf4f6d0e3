//! Compiles a property into a finite tree automaton over a system's
//! operations: structures are grouped by their truncated circuit-matrix
//! rows, one representative per row drives the transition tables, and
//! parse trees are then evaluated with one table lookup per node.

mod file;

use std::collections::HashMap;
use std::sync::Arc;

use itertools::Itertools;
use rayon::prelude::*;

pub use file::{load_automaton, parse_automaton, render_automaton, save_automaton};

use crate::circuit::{apply_within_budget, Circuit, DecodeOptions, Leaf, OpKind};
use crate::enumerate::{build_pool, enum_contexts_capped, ContextSet, InductiveSystem, PoolKind, DEFAULT_CONTEXT_CAP};
use crate::error::{Error, Result};
use crate::graph::{canonical_form, canonical_form_bounded, CanonicalForm, ColoredGraph};
use crate::hankel::{BitMatrix, RankReport};
use crate::properties::PropertyOracle;

pub const DEFAULT_CLASS_CAP: usize = 4096;

/// Largest structure whose certificate is used to order representatives.
const REP_CANON_BOUND: usize = 12;

/// Distinct leaf allocations remembered during one evaluation.
const LEAF_CACHE: usize = 16;

/// Marks an unfilled table entry.
const MISSING: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
pub struct CompileOptions {
    pub pool_bound: usize,
    pub depth_bound: usize,
    pub pool: PoolKind,
    pub class_cap: usize,
    pub context_cap: usize,
    pub decode: DecodeOptions,
}

impl CompileOptions {
    pub fn new(pool_bound: usize, depth_bound: usize) -> Self {
        Self {
            pool_bound,
            depth_bound,
            pool: PoolKind::Class,
            class_cap: DEFAULT_CLASS_CAP,
            context_cap: DEFAULT_CONTEXT_CAP,
            decode: DecodeOptions::from_env(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Class {
    pub id: u32,
    /// Closed circuit over named base leaves.
    pub representative: Circuit,
    pub accept: bool,
}

/// Bounds the automaton was compiled at, and the rank of its class rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub rank: usize,
    pub pool: usize,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct LeafClass {
    name: String,
    graph: Arc<ColoredGraph>,
    class: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    system: InductiveSystem,
    classes: Vec<Class>,
    /// One dense table per system operation, indexed by the class tuple in
    /// mixed radix (first operand most significant).
    tables: Vec<Vec<u32>>,
    leaves: Vec<LeafClass>,
    provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalTrace {
    /// Class of every node, in post-order.
    pub classes: Vec<u32>,
    pub accept: bool,
    pub node_count: usize,
}

impl Automaton {
    pub fn system(&self) -> &InductiveSystem {
        &self.system
    }

    pub fn classes(&self) -> &[Class] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn report(&self) -> RankReport {
        RankReport {
            rank: self.provenance.rank,
            distinct_rows: self.classes.len(),
            pool: self.provenance.pool,
            depth: self.provenance.depth,
            saturated: false,
            rows: self.classes.len(),
            cols: 0,
        }
    }

    pub fn accepts(&self, class: u32) -> bool {
        self.classes[class as usize].accept
    }

    /// Class of each base structure, in system order.
    pub fn base_classes(&self) -> Vec<u32> {
        self.leaves.iter().map(|l| l.class).collect()
    }

    pub fn op_index(&self, op: &OpKind) -> Result<usize> {
        self.system
            .ops
            .iter()
            .position(|o| o == op)
            .ok_or_else(|| Error::UnknownOp(op.signature()))
    }

    /// Table lookup for operation `op` (system index) on `args`.
    pub fn step(&self, op: usize, args: &[u32]) -> Result<u32> {
        let c = self.classes.len();
        let idx = args.iter().fold(0usize, |acc, &a| acc * c + a as usize);
        match self.tables[op][idx] {
            MISSING => Err(Error::MissingTransition {
                op: self.system.ops[op].signature(),
                classes: args.to_vec(),
            }),
            t => Ok(t),
        }
    }

    /// Class of a leaf: by base name when the graph matches, otherwise by
    /// isomorphism with a base structure.
    pub fn leaf_class(&self, leaf: &Leaf) -> Result<u32> {
        if let Some(name) = &leaf.name {
            if let Some(l) = self.leaves.iter().find(|l| *l.name == **name) {
                if Arc::ptr_eq(&l.graph, &leaf.graph) || *l.graph == *leaf.graph {
                    return Ok(l.class);
                }
            }
        }
        let cert = canonical_form(&leaf.graph).map_err(|_| Error::LeafNotInBase(leaf.graph.to_text()))?;
        self.leaves
            .iter()
            .find(|l| canonical_form(&l.graph).is_ok_and(|c| c == cert))
            .map(|l| l.class)
            .ok_or_else(|| Error::LeafNotInBase(leaf.graph.to_text()))
    }

    /// Single bottom-up pass; no graph is built.
    pub fn evaluate_tree(&self, t: &Circuit) -> Result<EvalTrace> {
        let mut trace: Vec<u32> = Vec::new();
        let mut vals: Vec<u32> = Vec::new();
        // Leaves usually share a few base graphs; remember them by allocation.
        let mut leaf_cache: Vec<(*const ColoredGraph, Option<&str>, u32)> = Vec::new();
        let mut stack: Vec<(&Circuit, usize)> = vec![(t, 0)];
        while let Some((node, i)) = stack.pop() {
            let c = match node {
                Circuit::Op(kind, ch) => {
                    if i < ch.len() {
                        stack.push((node, i + 1));
                        stack.push((&ch[i], 0));
                        continue;
                    }
                    let start = vals.len() - ch.len();
                    let c = self.step(self.op_index(kind)?, &vals[start..])?;
                    vals.truncate(start);
                    c
                }
                Circuit::Leaf(leaf) => {
                    let ptr = Arc::as_ptr(&leaf.graph);
                    let name = leaf.name.as_deref();
                    match leaf_cache.iter().find(|e| e.0 == ptr && e.1 == name) {
                        Some(e) => e.2,
                        None => {
                            let c = self.leaf_class(leaf)?;
                            if leaf_cache.len() < LEAF_CACHE {
                                leaf_cache.push((ptr, name, c));
                            }
                            c
                        }
                    }
                }
                Circuit::Free => return Err(Error::FreeLeaf),
            };
            vals.push(c);
            trace.push(c);
        }
        let root = vals.pop().expect("one value per tree");
        Ok(EvalTrace {
            node_count: trace.len(),
            classes: trace,
            accept: self.accepts(root),
        })
    }
}

pub fn evaluate_tree(aut: &Automaton, t: &Circuit) -> Result<EvalTrace> {
    aut.evaluate_tree(t)
}

pub fn compile<P: PropertyOracle + ?Sized>(
    sys: &InductiveSystem,
    prop: &P,
    pool_bound: usize,
    depth_bound: usize,
) -> Result<Automaton> {
    compile_with(sys, prop, &CompileOptions::new(pool_bound, depth_bound))
}

type RepKey = (usize, u8, Vec<u8>);

/// Orders candidate representatives: fewer vertices first, then canonical
/// certificate; structures too large to certify fall back to their
/// labeled text and sort after certified ones of the same size.
fn rep_key(g: &ColoredGraph) -> RepKey {
    match canonical_form_bounded(g, REP_CANON_BOUND) {
        Ok(c) => (g.n(), 0, cert_bytes(&c)),
        Err(_) => (g.n(), 1, g.to_text().into_bytes()),
    }
}

fn cert_bytes(c: &CanonicalForm) -> Vec<u8> {
    c.as_bytes().to_vec()
}

struct Member {
    graph: Arc<ColoredGraph>,
    circuit: Circuit,
    key: RepKey,
}

struct ClassState {
    /// Representative used while closing; fixed at discovery.
    working: Member,
    best: Member,
}

struct Compiler<'a, P: ?Sized> {
    prop: &'a P,
    contexts: ContextSet,
    opts: &'a CompileOptions,
}

impl<P: PropertyOracle + ?Sized> Compiler<'_, P> {
    fn row(&self, g: &ColoredGraph) -> Result<Vec<u64>> {
        let holds = |h: &ColoredGraph| self.prop.holds(h);
        self.contexts.row(g, &holds, &self.opts.decode).map_err(|(_, e)| e)
    }

    fn combine(&self, op: &OpKind, args: &[&Member]) -> Result<(Member, Vec<u64>)> {
        let graphs: Vec<&ColoredGraph> = args.iter().map(|m| m.graph.as_ref()).collect();
        let g = apply_within_budget(op, &graphs, &self.opts.decode)?;
        let row = self.row(&g)?;
        let circuit = Circuit::Op(op.clone(), args.iter().map(|m| m.circuit.clone()).collect());
        let key = rep_key(&g);
        Ok((
            Member {
                graph: Arc::new(g),
                circuit,
                key,
            },
            row,
        ))
    }
}

fn not_saturated(msg: String) -> Error {
    Error::NotSaturated(msg)
}

pub fn compile_with<P: PropertyOracle + ?Sized>(
    sys: &InductiveSystem,
    prop: &P,
    opts: &CompileOptions,
) -> Result<Automaton> {
    let pool = build_pool(sys, opts.pool_bound, opts.pool)?;
    let contexts = enum_contexts_capped(sys, &pool, opts.depth_bound, opts.context_cap)?;
    let cx = Compiler {
        prop,
        contexts,
        opts,
    };

    let mut rows: Vec<Vec<u64>> = Vec::new();
    let mut by_row: HashMap<Vec<u64>, u32> = HashMap::new();
    let mut states: Vec<ClassState> = Vec::new();
    let mut add = |member: Member, row: Vec<u64>, states: &mut Vec<ClassState>, rows: &mut Vec<Vec<u64>>| -> Result<u32> {
        if let Some(&c) = by_row.get(&row) {
            let s = &mut states[c as usize];
            if member.key < s.best.key {
                s.best = member;
            }
            return Ok(c);
        }
        let c = states.len() as u32;
        if states.len() >= opts.class_cap {
            return Err(not_saturated(format!(
                "more than {} classes at pool {} depth {}",
                opts.class_cap, opts.pool_bound, opts.depth_bound
            )));
        }
        by_row.insert(row.clone(), c);
        rows.push(row);
        states.push(ClassState {
            working: Member {
                graph: Arc::clone(&member.graph),
                circuit: member.circuit.clone(),
                key: member.key.clone(),
            },
            best: member,
        });
        Ok(c)
    };

    let mut leaves = Vec::with_capacity(sys.base.len());
    for b in &sys.base {
        let row = cx.row(&b.graph)?;
        let member = Member {
            graph: Arc::clone(&b.graph),
            circuit: Circuit::named_leaf(&b.name, Arc::clone(&b.graph)),
            key: rep_key(&b.graph),
        };
        let class = add(member, row, &mut states, &mut rows)?;
        leaves.push(LeafClass {
            name: b.name.clone(),
            graph: Arc::clone(&b.graph),
            class,
        });
    }

    // Closure: each pass combines every not-yet-computed tuple of current
    // classes; rows are computed in parallel and merged in tuple order.
    let mut done: Vec<HashMap<Vec<u32>, u32>> = vec![HashMap::new(); sys.ops.len()];
    loop {
        let c = states.len() as u32;
        let pending: Vec<(usize, Vec<u32>)> = sys
            .ops
            .iter()
            .enumerate()
            .flat_map(|(oi, op)| {
                (0..op.arity())
                    .map(|_| 0..c)
                    .multi_cartesian_product()
                    .filter(|t| !done[oi].contains_key(t))
                    .map(move |t| (oi, t))
                    .collect::<Vec<_>>()
            })
            .collect();
        if pending.is_empty() {
            break;
        }
        let results: Vec<Result<(Member, Vec<u64>)>> = pending
            .par_iter()
            .map(|(oi, t)| {
                let args: Vec<&Member> = t.iter().map(|&i| &states[i as usize].working).collect();
                cx.combine(&sys.ops[*oi], &args)
            })
            .collect();
        for ((oi, t), r) in pending.into_iter().zip(results) {
            let (member, row) = r?;
            let class = add(member, row, &mut states, &mut rows)?;
            done[oi].insert(t, class);
        }
    }

    // Final representatives, then every transition again from them.
    let reps: Vec<&Member> = states.iter().map(|s| &s.best).collect();
    let c = states.len();
    let mut tables = Vec::with_capacity(sys.ops.len());
    for (oi, op) in sys.ops.iter().enumerate() {
        let tuples: Vec<Vec<u32>> = (0..op.arity()).map(|_| 0..c as u32).multi_cartesian_product().collect();
        let results: Vec<Result<(Member, Vec<u64>)>> = tuples
            .par_iter()
            .map(|t| {
                let args: Vec<&Member> = t.iter().map(|&i| reps[i as usize]).collect();
                cx.combine(op, &args)
            })
            .collect();
        let mut table = vec![MISSING; c.pow(op.arity() as u32)];
        for (idx, (t, r)) in tuples.iter().zip(results).enumerate() {
            let (_, row) = r?;
            let via_working = done[oi][t];
            match by_row.get(&row) {
                Some(&cls) if cls == via_working => table[idx] = cls,
                found => {
                    return Err(not_saturated(format!(
                        "{} on classes {:?} gives class {} from working representatives but {} from final ones (pool {} depth {})",
                        op.signature(),
                        t,
                        via_working,
                        found.map_or("a new row".to_string(), |f| f.to_string()),
                        opts.pool_bound,
                        opts.depth_bound
                    )))
                }
            }
        }
        tables.push(table);
    }

    let rank = BitMatrix::from_packed_rows(cx.contexts.len(), rows).gf2_rank();
    let classes = states
        .into_iter()
        .enumerate()
        .map(|(i, s)| Class {
            id: i as u32,
            accept: prop.holds(&s.best.graph),
            representative: s.best.circuit,
        })
        .collect();
    Ok(Automaton {
        system: sys.clone(),
        classes,
        tables,
        leaves,
        provenance: Provenance {
            rank,
            pool: opts.pool_bound,
            depth: opts.depth_bound,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::BaseStructure;
    use crate::properties::Property;

    fn k1() -> Arc<ColoredGraph> {
        Arc::new(ColoredGraph::edgeless(1, 0))
    }

    #[test]
    fn constant_property_single_class() {
        let sys = InductiveSystem::clique_width(2).unwrap();
        let aut = compile(&sys, &Property::Const(true), 3, 1).unwrap();
        assert_eq!(aut.class_count(), 1);
        assert!(aut.accepts(0));
        assert!(aut.tables.iter().all(|t| t.iter().all(|&x| x == 0)));
    }

    #[test]
    fn union_empty_two_classes() {
        let sys = InductiveSystem::union_only();
        let aut = compile(&sys, &Property::Empty, 3, 2).unwrap();
        assert_eq!(aut.class_count(), 2);
        let [e, v] = aut.base_classes()[..] else { panic!() };
        assert_ne!(e, v);
        assert!(aut.accepts(e) && !aut.accepts(v));
        assert_eq!(aut.step(0, &[e, e]).unwrap(), e);
        for (a, b) in [(e, v), (v, e), (v, v)] {
            assert_eq!(aut.step(0, &[a, b]).unwrap(), v);
        }
    }

    #[test]
    fn union_of_two_vertices_is_disconnected() {
        let sys = InductiveSystem::clique_width(2).unwrap();
        let aut = compile(&sys, &Property::connected(), 3, 2).unwrap();
        let t = Circuit::op(
            OpKind::Union,
            vec![Circuit::leaf(sys.base[0].graph.clone()), Circuit::leaf(sys.base[0].graph.clone())],
        )
        .unwrap();
        let trace = aut.evaluate_tree(&t).unwrap();
        assert!(!trace.accept);
        assert_eq!(trace.node_count, 3);
    }

    #[test]
    fn unknown_leaf_is_rejected() {
        let sys = InductiveSystem::new(
            "u1",
            0,
            vec![BaseStructure {
                name: "v".into(),
                graph: k1(),
            }],
            vec![OpKind::Union],
        )
        .unwrap();
        let aut = compile(&sys, &Property::connected(), 2, 1).unwrap();
        let bad = Circuit::leaf(ColoredGraph::complete(2));
        assert!(matches!(aut.evaluate_tree(&bad), Err(Error::LeafNotInBase(_))));
        assert!(matches!(aut.evaluate_tree(&Circuit::Free), Err(Error::FreeLeaf)));
    }

    #[test]
    fn class_cap_reports_unsaturated() {
        let sys = InductiveSystem::clique_width(2).unwrap();
        let mut opts = CompileOptions::new(3, 2);
        opts.class_cap = 2;
        let err = compile_with(&sys, &Property::connected(), &opts).unwrap_err();
        assert!(err.to_string().contains("rank not saturated"), "{err}");
    }
}

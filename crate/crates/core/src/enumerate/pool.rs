use std::collections::HashMap;
use std::sync::Arc;

use itertools::Itertools;

use crate::circuit::OpKind;
use crate::error::{Error, Result};
use crate::graph::{canonical_form, CanonicalForm, ColoredGraph, DEFAULT_CANON_BOUND};

use super::system::InductiveSystem;

/// Isomorphism-class representatives, ordered by vertex count and then by
/// certificate. Index 0 is always the empty structure.
#[derive(Debug, Clone)]
pub struct StructurePool {
    k: u8,
    n_max: usize,
    graphs: Vec<Arc<ColoredGraph>>,
    certs: Vec<CanonicalForm>,
    index: HashMap<CanonicalForm, usize>,
}

impl StructurePool {
    fn from_certified(k: u8, n_max: usize, mut entries: Vec<(CanonicalForm, ColoredGraph)>) -> Self {
        entries.sort_by(|a, b| (a.1.n(), &a.0).cmp(&(b.1.n(), &b.0)));
        entries.dedup_by(|a, b| a.0 == b.0);
        let index = entries.iter().enumerate().map(|(i, (c, _))| (c.clone(), i)).collect();
        let (certs, graphs) = entries.into_iter().map(|(c, g)| (c, Arc::new(g))).unzip();
        Self {
            k,
            n_max,
            graphs,
            certs,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    /// Vertex bound the pool was built with.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn get(&self, i: usize) -> &Arc<ColoredGraph> {
        &self.graphs[i]
    }

    pub fn certificate(&self, i: usize) -> &CanonicalForm {
        &self.certs[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Arc<ColoredGraph>> {
        self.graphs.iter()
    }

    pub fn graphs(&self) -> &[Arc<ColoredGraph>] {
        &self.graphs
    }

    /// Position of the entry isomorphic to `g`.
    pub fn index_of(&self, g: &ColoredGraph) -> Option<usize> {
        if g.k() != self.k || g.n() > self.n_max {
            return None;
        }
        self.index.get(&canonical_form(g).ok()?).copied()
    }
}

/// Extra vertices allowed on intermediates when the system can fuse.
const FUSION_SLACK: usize = 1;

fn check_bound(n_max: usize) -> Result<()> {
    if n_max > DEFAULT_CANON_BOUND {
        return Err(Error::SizeBound {
            what: "pool vertex bound",
            size: n_max,
            bound: DEFAULT_CANON_BOUND,
        });
    }
    Ok(())
}

/// Every colored graph on at most `n_max` vertices with `k` colors (vertices
/// may stay uncolored), one per isomorphism class.
///
/// Graphs on `n` vertices are produced by attaching a new vertex, with
/// every neighborhood and color, to the representatives on `n - 1`
/// vertices; removing any vertex of a graph gives such a representative up
/// to isomorphism, so nothing is missed.
pub fn enum_graphs(n_max: usize, k: u8) -> Result<StructurePool> {
    check_bound(n_max)?;
    let empty = ColoredGraph::empty(k);
    let mut all = vec![(canonical_form(&empty)?, empty)];
    let mut layer = vec![ColoredGraph::empty(k)];
    for n in 1..=n_max {
        let mut next: HashMap<CanonicalForm, ColoredGraph> = HashMap::new();
        for g in &layer {
            for mask in 0u32..1 << (n - 1) {
                for color in 0..=k {
                    let edges = g
                        .edges()
                        .iter()
                        .map(|&(u, v)| (u as usize, v as usize))
                        .chain((0..n - 1).filter(|&u| mask >> u & 1 == 1).map(|u| (u, n - 1)));
                    let colors = (0..n)
                        .map(|v| (v, if v == n - 1 { color } else { g.color(v).unwrap_or(0) }))
                        .filter(|&(_, c)| c != 0);
                    let h = ColoredGraph::from_parts(n, k, edges, colors)?;
                    next.entry(canonical_form(&h)?).or_insert(h);
                }
            }
        }
        let mut sorted: Vec<(CanonicalForm, ColoredGraph)> = next.into_iter().collect();
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        layer = sorted.iter().map(|(_, g)| g.clone()).collect();
        all.extend(sorted);
    }
    Ok(StructurePool::from_certified(k, n_max, all))
}

/// Which structures a matrix is indexed by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PoolKind {
    /// Members of the system's class (plus the empty structure).
    #[default]
    Class,
    /// Every graph with the system's number of colors.
    All,
}

impl std::str::FromStr for PoolKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "class" => Ok(Self::Class),
            "all" => Ok(Self::All),
            _ => Err(format!("unknown pool kind `{s}` (expected class or all)")),
        }
    }
}

pub fn build_pool(sys: &InductiveSystem, n_max: usize, kind: PoolKind) -> Result<StructurePool> {
    match kind {
        PoolKind::Class => class_pool(sys, n_max),
        PoolKind::All => enum_graphs(n_max, sys.k),
    }
}

/// The members of the system's class with at most `n_max` vertices, plus
/// the empty structure at index 0: closure of the base structures under
/// the operations, discarding results above a working bound.
///
/// Only fusion shrinks graphs, so for systems with fusion the closure also
/// explores intermediates with one vertex more than `n_max`. Members that
/// can only be reached through larger intermediates are missed; every pool
/// entry is still a genuine member, so ranks computed on it remain lower
/// bounds.
pub fn class_pool(sys: &InductiveSystem, n_max: usize) -> Result<StructurePool> {
    check_bound(n_max)?;
    let has_fuse = sys.ops.iter().any(|op| matches!(op, OpKind::Fuse(_)));
    let work_bound = if has_fuse {
        (n_max + FUSION_SLACK).min(DEFAULT_CANON_BOUND)
    } else {
        n_max
    };
    let empty = ColoredGraph::empty(sys.k);
    let mut index: HashMap<CanonicalForm, usize> = HashMap::new();
    let mut members: Vec<ColoredGraph> = Vec::new();
    let mut add = |g: ColoredGraph, members: &mut Vec<ColoredGraph>| -> Result<()> {
        if g.n() > work_bound {
            return Ok(());
        }
        let cert = canonical_form(&g)?;
        if !index.contains_key(&cert) {
            index.insert(cert, members.len());
            members.push(g);
        }
        Ok(())
    };
    for b in &sys.base {
        add(b.graph.as_ref().clone(), &mut members)?;
    }
    // Round-based closure: each round combines tuples that involve at least
    // one member discovered in the previous round.
    let mut frontier_start = 0;
    while frontier_start < members.len() {
        let frontier_end = members.len();
        for op in &sys.ops {
            let r = op.arity();
            for tuple in (0..r).map(|_| 0..frontier_end).multi_cartesian_product() {
                if tuple.iter().all(|&i| i < frontier_start) {
                    continue;
                }
                let args: Vec<&ColoredGraph> = tuple.iter().map(|&i| &members[i]).collect();
                if op.predict_size(&args).0 as usize > work_bound {
                    continue;
                }
                let g = op.apply(&args)?;
                add(g, &mut members)?;
            }
        }
        frontier_start = frontier_end;
    }
    let mut entries = vec![(canonical_form(&empty)?, empty)];
    for g in members.into_iter().filter(|g| g.n() <= n_max) {
        entries.push((canonical_form(&g)?, g));
    }
    Ok(StructurePool::from_certified(sys.k, n_max, entries))
}

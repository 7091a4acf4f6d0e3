//! Canonical certificates for small colored graphs: vertices are ordered by
//! an iterated color-refinement invariant, then every ordering consistent
//! with the refined cells is tried and the smallest adjacency code wins.

use super::{ColoredGraph, GraphError};

/// Default vertex bound for canonicalization.
pub const DEFAULT_CANON_BOUND: usize = 8;

/// Hard limit: adjacency codes are packed into a `u128`.
const MAX_CANON_VERTICES: usize = 16;

/// Byte string identifying a colored graph up to color-preserving
/// isomorphism.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CanonicalForm(Vec<u8>);

impl CanonicalForm {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

pub fn canonical_form(g: &ColoredGraph) -> Result<CanonicalForm, GraphError> {
    canonical_form_bounded(g, DEFAULT_CANON_BOUND)
}

pub fn canonical_form_bounded(g: &ColoredGraph, bound: usize) -> Result<CanonicalForm, GraphError> {
    let n = g.n();
    let bound = bound.min(MAX_CANON_VERTICES);
    if n > bound {
        return Err(GraphError::CanonBound { n, bound });
    }
    let mut adj = vec![0u16; n];
    for &(u, v) in g.edges() {
        adj[u as usize] |= 1 << v;
        adj[v as usize] |= 1 << u;
    }
    let rank = refine(g, &adj);
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let mut by_rank: Vec<usize> = (0..n).collect();
    by_rank.sort_by_key(|&v| (rank[v], v));
    for v in by_rank {
        match cells.last_mut() {
            Some(cell) if rank[cell[0]] == rank[v] => cell.push(v),
            _ => cells.push(vec![v]),
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut best = None;
    search(&cells, 0, &mut order, &adj, &mut best);
    let code = best.unwrap_or(0);
    let mut out = Vec::with_capacity(2 + n + 16);
    out.push(n as u8);
    out.push(g.k());
    let colors = g.color_slice();
    let mut seq: Vec<usize> = (0..n).collect();
    seq.sort_by_key(|&v| (rank[v], v));
    out.extend(seq.iter().map(|&v| colors[v]));
    out.extend_from_slice(&code.to_be_bytes());
    Ok(CanonicalForm(out))
}

/// Iterated 1-dimensional refinement starting from (color, degree). The
/// returned ranks are isomorphism-invariant.
fn refine(g: &ColoredGraph, adj: &[u16]) -> Vec<usize> {
    let n = adj.len();
    let colors = g.color_slice();
    let keys: Vec<(u8, u32)> = (0..n).map(|v| (colors[v], adj[v].count_ones())).collect();
    let mut rank = dense_ranks(&keys);
    let mut cells = distinct(&rank);
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = (0..n).filter(|&w| adj[v] >> w & 1 == 1).map(|w| rank[w]).collect();
                nb.sort_unstable();
                (rank[v], nb)
            })
            .collect();
        let next = dense_ranks(&sigs);
        let count = distinct(&next);
        rank = next;
        if count == cells {
            return rank;
        }
        cells = count;
    }
}

fn dense_ranks<T: Ord + Clone>(keys: &[T]) -> Vec<usize> {
    let mut sorted: Vec<T> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(k).unwrap())
        .collect()
}

fn distinct(rank: &[usize]) -> usize {
    let mut r = rank.to_vec();
    r.sort_unstable();
    r.dedup();
    r.len()
}

fn search(cells: &[Vec<usize>], ci: usize, order: &mut Vec<usize>, adj: &[u16], best: &mut Option<u128>) {
    if ci == cells.len() {
        let code = encode(order, adj);
        if best.map_or(true, |b| code < b) {
            *best = Some(code);
        }
        return;
    }
    let mut cell = cells[ci].clone();
    permute(&mut cell, 0, &mut |perm| {
        let len = order.len();
        order.extend_from_slice(perm);
        search(cells, ci + 1, order, adj, best);
        order.truncate(len);
    });
}

fn permute(items: &mut [usize], i: usize, f: &mut dyn FnMut(&[usize])) {
    if i + 1 >= items.len() {
        f(items);
        return;
    }
    for j in i..items.len() {
        items.swap(i, j);
        permute(items, i + 1, f);
        items.swap(i, j);
    }
}

fn encode(order: &[usize], adj: &[u16]) -> u128 {
    let mut code = 0u128;
    for i in 0..order.len() {
        let row = adj[order[i]];
        for &w in &order[i + 1..] {
            code = (code << 1) | (row >> w & 1) as u128;
        }
    }
    code
}

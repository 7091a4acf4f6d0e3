//! Hankel matrices of binary operations and circuit matrices of
//! one-hole contexts, with their GF(2) ranks.

mod bitmatrix;

use std::fmt;

use rayon::prelude::*;

pub use bitmatrix::{gf2_rank, BitMatrix};

use crate::circuit::{apply_within_budget, DecodeOptions, OpKind};
use crate::enumerate::{build_pool, enum_contexts_capped, ContextSet, InductiveSystem, PoolKind, StructurePool, DEFAULT_CONTEXT_CAP};
use crate::error::{Error, Result};
use crate::properties::PropertyOracle;

/// `H[i][j] = prop(op(A_i, A_j))` over the pool.
pub fn build_hankel<P: PropertyOracle + ?Sized>(op: &OpKind, prop: &P, pool: &StructurePool) -> Result<BitMatrix> {
    build_hankel_with(op, prop, pool, &DecodeOptions::from_env())
}

pub fn build_hankel_with<P: PropertyOracle + ?Sized>(
    op: &OpKind,
    prop: &P,
    pool: &StructurePool,
    opts: &DecodeOptions,
) -> Result<BitMatrix> {
    if op.arity() != 2 {
        return Err(Error::Invalid(format!(
            "Hankel matrices need a binary operation, `{}` has arity {}",
            op.signature(),
            op.arity()
        )));
    }
    let n = pool.len();
    let rows: Vec<Result<Vec<u64>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut bits = vec![0u64; n.div_ceil(64)];
            for j in 0..n {
                let g = apply_within_budget(op, &[pool.get(i), pool.get(j)], opts).map_err(|e| Error::Entry {
                    row: i,
                    col: j,
                    source: Box::new(e),
                })?;
                if prop.holds(&g) {
                    bits[j / 64] |= 1 << (j % 64);
                }
            }
            Ok(bits)
        })
        .collect();
    // Surface the first failing row so errors do not depend on scheduling.
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(BitMatrix::from_packed_rows(n, rows))
}

/// `M[i][j] = prop(C_j[A_i])` for pool rows and context columns.
pub fn build_circuit_matrix<P: PropertyOracle + ?Sized>(
    contexts: &ContextSet,
    prop: &P,
    pool: &StructurePool,
) -> Result<BitMatrix> {
    build_circuit_matrix_with(contexts, prop, pool, &DecodeOptions::from_env())
}

pub fn build_circuit_matrix_with<P: PropertyOracle + ?Sized>(
    contexts: &ContextSet,
    prop: &P,
    pool: &StructurePool,
    opts: &DecodeOptions,
) -> Result<BitMatrix> {
    let holds = |g: &crate::graph::ColoredGraph| prop.holds(g);
    let rows: Vec<Result<Vec<u64>>> = (0..pool.len())
        .into_par_iter()
        .map(|i| {
            contexts.row(pool.get(i), &holds, opts).map_err(|(j, e)| Error::Entry {
                row: i,
                col: j,
                source: Box::new(e),
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(BitMatrix::from_packed_rows(contexts.len(), rows))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankReport {
    pub rank: usize,
    pub distinct_rows: usize,
    /// Vertex bound of the pool the rows range over.
    pub pool: usize,
    pub depth: usize,
    pub saturated: bool,
    pub rows: usize,
    pub cols: usize,
}

impl RankReport {
    pub fn of(m: &BitMatrix, pool: usize, depth: usize) -> Self {
        Self {
            rank: m.gf2_rank(),
            distinct_rows: m.distinct_rows(),
            pool,
            depth,
            saturated: false,
            rows: m.rows(),
            cols: m.cols(),
        }
    }
}

impl fmt::Display for RankReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rank {} distinct_rows {} pool {} depth {} saturated {}",
            self.rank, self.distinct_rows, self.pool, self.depth, self.saturated as u8
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MatrixSettings {
    pub pool: PoolKind,
    pub context_cap: usize,
    pub decode: DecodeOptions,
}

impl Default for MatrixSettings {
    fn default() -> Self {
        Self {
            pool: PoolKind::Class,
            context_cap: DEFAULT_CONTEXT_CAP,
            decode: DecodeOptions::from_env(),
        }
    }
}

/// Circuit matrix of `prop` over the system's pool with at most `n`
/// vertices and contexts of nesting at most `depth`.
pub fn circuit_matrix<P: PropertyOracle + ?Sized>(
    sys: &InductiveSystem,
    prop: &P,
    n: usize,
    depth: usize,
    settings: &MatrixSettings,
) -> Result<BitMatrix> {
    let pool = build_pool(sys, n, settings.pool)?;
    let contexts = enum_contexts_capped(sys, &pool, depth, settings.context_cap)?;
    build_circuit_matrix_with(&contexts, prop, &pool, &settings.decode)
}

/// Reports for every `(n, d)` with `1 <= n <= n_max`, `0 <= d <= depth_max`,
/// in lexicographic order.
#[derive(Debug)]
pub struct Profile {
    pub reports: Vec<RankReport>,
    /// Set when a truncation failed; `reports` holds everything before it.
    pub error: Option<Error>,
}

/// A report is saturated once it and the two before it share a rank.
pub fn saturation_profile<P: PropertyOracle + ?Sized>(
    sys: &InductiveSystem,
    prop: &P,
    n_max: usize,
    depth_max: usize,
    settings: &MatrixSettings,
) -> Profile {
    let mut reports: Vec<RankReport> = Vec::new();
    for n in 1..=n_max {
        for d in 0..=depth_max {
            match circuit_matrix(sys, prop, n, d, settings) {
                Ok(m) => {
                    let mut r = RankReport::of(&m, n, d);
                    let i = reports.len();
                    r.saturated = i >= 2 && reports[i - 1].rank == r.rank && reports[i - 2].rank == r.rank;
                    reports.push(r);
                }
                Err(e) => {
                    return Profile {
                        reports,
                        error: Some(e),
                    }
                }
            }
        }
    }
    Profile { reports, error: None }
}

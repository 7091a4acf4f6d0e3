//! The `selftest` report: rank suite over small graphs, the Hankel-inside-
//! circuit-matrix check, order-restricted connectivity, compiled automata
//! against direct decoding, and the subset polynomial. The report holds no
//! timings or worker counts, so equal seeds give byte-identical output.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hc_core::circuit::{DecodeOptions, OpKind};
use hc_core::compiler::{compile_with, CompileOptions};
use hc_core::enumerate::{build_pool, enum_graphs, gen_parse_tree, InductiveSystem, PoolKind};
use hc_core::hankel::{build_circuit_matrix, build_hankel, RankReport};
use hc_core::properties::{poly_eval, OrderSet, Property, PropertyOracle};
use hc_core::{ColoredGraph, Result};

use crate::crosscheck::{self, Product};

/// Order sets exercised by the continuum section.
pub const ORDER_SETS: [&str; 7] = ["2Z+0", "2Z+1", "{1,2,3}", "{3,5}+4Z+0", "3Z+1", "{2}", "{2,3,5,7}"];

#[derive(Debug, Clone, Copy)]
pub struct SelftestConfig {
    pub seed: u64,
    pub random_trees: usize,
    pub max_tree_size: usize,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            random_trees: 200,
            max_tree_size: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub text: String,
    pub checks: usize,
    pub failures: usize,
}

struct Report {
    text: String,
    checks: usize,
    failures: usize,
}

impl Report {
    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn check(&mut self, ok: bool, s: impl AsRef<str>) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
        }
        self.line(format!("{} {}", s.as_ref(), if ok { "ok" } else { "FAIL" }));
    }
}

fn product_op(p: Product) -> OpKind {
    match p {
        Product::Union => OpKind::Union,
        Product::Join => OpKind::Join,
        Product::Tensor => OpKind::Tensor,
        Product::Cartesian => OpKind::Cartesian,
    }
}

/// Reference ranks for connectivity under each product.
fn reference_rank(p: Product) -> usize {
    match p {
        Product::Union => 2,
        Product::Join => 3,
        Product::Tensor => 4,
        Product::Cartesian => 3,
    }
}

fn same_entries(h: &hc_core::hankel::BitMatrix, brute: &[Vec<bool>]) -> bool {
    h.rows() == brute.len()
        && brute
            .iter()
            .enumerate()
            .all(|(i, row)| row.len() == h.cols() && row.iter().enumerate().all(|(j, &b)| h.get(i, j) == b))
}

pub fn selftest(cfg: &SelftestConfig) -> Result<SelftestReport> {
    let mut r = Report {
        text: String::new(),
        checks: 0,
        failures: 0,
    };
    r.line(format!("selftest seed {}", cfg.seed));
    rank_suite(&mut r)?;
    submatrix(&mut r)?;
    continuum(&mut r)?;
    compiled(&mut r, cfg)?;
    polynomial(&mut r)?;
    r.line(format!("summary checks {} failed {}", r.checks, r.failures));
    Ok(SelftestReport {
        text: r.text,
        checks: r.checks,
        failures: r.failures,
    })
}

fn rank_suite(r: &mut Report) -> Result<()> {
    let pool = enum_graphs(5, 0)?;
    let graphs: Vec<&ColoredGraph> = pool.iter().map(|g| g.as_ref()).collect();
    r.line(format!("[ranks] pool all n<=5 graphs {} prop connected", pool.len()));
    let prop = Property::connected();
    for p in [Product::Union, Product::Join, Product::Cartesian, Product::Tensor] {
        let h = build_hankel(&product_op(p), &prop, &pool)?;
        let rank = h.gf2_rank();
        let brute = crosscheck::matrix(&graphs, |a, b| {
            crosscheck::connected(&crosscheck::product_adjacency(p, a, b), true)
        });
        let entrywise = same_entries(&h, &brute) && crosscheck::rank(&brute) == rank;
        let reference = reference_rank(p);
        let head = format!("hankel {} connected rank {rank} reference {reference}", p.name());
        if p == Product::Tensor {
            r.check(entrywise && rank >= reference, format!("{head} entrywise {}", entrywise as u8));
            if rank != reference {
                r.line(format!(
                    "note tensor rank {rank} differs from reference {reference}: a one-vertex factor F gives F x_t H edgeless, so connectivity is not decided by the factors' connectivity and bipartiteness alone"
                ));
            }
        } else {
            r.check(entrywise && rank == reference, format!("{head} entrywise {}", entrywise as u8));
        }
    }
    Ok(())
}

fn submatrix(r: &mut Report) -> Result<()> {
    let sys = InductiveSystem::clique_width(2)?;
    let prop = Property::connected();
    let pool = build_pool(&sys, 4, PoolKind::Class)?;
    let contexts = hc_core::enumerate::enum_contexts(&sys, &pool, 2)?;
    let cm = build_circuit_matrix(&contexts, &prop, &pool)?;
    let report = RankReport::of(&cm, 4, 2);
    r.line(format!("[submatrix] system cw2 prop connected pool class n<=4 depth 2 structures {}", pool.len()));
    r.line(format!("circuit {report}"));
    for op in sys.ops.iter().filter(|op| op.arity() == 2) {
        let h = build_hankel(op, &prop, &pool)?;
        let hr = h.gf2_rank();
        r.check(hr <= report.rank, format!("hankel {} rank {hr} <= circuit rank {}", op.signature(), report.rank));
    }
    Ok(())
}

fn continuum(r: &mut Report) -> Result<()> {
    let pool = enum_graphs(5, 0)?;
    let graphs: Vec<&ColoredGraph> = pool.iter().map(|g| g.as_ref()).collect();
    r.line("[continuum] op union pool all n<=5 prop conn_of_order");
    let mut ranks = Vec::new();
    for spec in ORDER_SETS {
        let orders: OrderSet = spec.parse()?;
        let prop = Property::conn_of_order(orders.clone());
        let h = build_hankel(&OpKind::Union, &prop, &pool)?;
        let rank = h.gf2_rank();
        let brute = crosscheck::matrix(&graphs, |a, b| {
            orders.contains(a.n() + b.n())
                && crosscheck::connected(&crosscheck::product_adjacency(Product::Union, a, b), true)
        });
        let ok = same_entries(&h, &brute) && crosscheck::rank(&brute) == rank;
        r.check(ok, format!("{} rank {rank} entrywise {}", prop.name(), ok as u8));
        ranks.push(rank);
    }
    let shared = ranks.iter().all(|&x| x == ranks[0]);
    r.check(shared, format!("continuum shared rank {}", ranks[0]));
    if ranks[0] != 1 {
        r.line(format!(
            "note shared rank {} differs from reference 1: rows of the empty graph and of a nonempty graph are independent",
            ranks[0]
        ));
    }
    Ok(())
}

fn compiled(r: &mut Report, cfg: &SelftestConfig) -> Result<()> {
    let cw2 = InductiveSystem::clique_width(2)?;
    let union = InductiveSystem::union_only();
    let cases: [(&str, &InductiveSystem, Property, Option<usize>); 3] = [
        ("cw2", &cw2, Property::connected(), None),
        ("union", &union, Property::Empty, Some(2)),
        ("cw2", &cw2, Property::conn_of_order(OrderSet::evens()), None),
    ];
    r.line(format!(
        "[compile] pool class n<=4 depth 2 random_trees {} max_size {}",
        cfg.random_trees, cfg.max_tree_size
    ));
    let decode = DecodeOptions::from_env();
    for (ci, (name, sys, prop, expected)) in cases.into_iter().enumerate() {
        let aut = compile_with(sys, &prop, &CompileOptions::new(4, 2))?;
        let p = aut.provenance();
        let mut line = format!("compile {name} {} classes {} rank {}", prop.name(), aut.class_count(), p.rank);
        if let Some(e) = expected {
            let _ = write!(line, " expected {e}");
        }
        r.check(expected.is_none_or(|e| e == aut.class_count()), line);

        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (ci as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut agree = 0;
        for _ in 0..cfg.random_trees {
            let size = rng.gen_range(1..=cfg.max_tree_size);
            let t = gen_parse_tree(sys, size, rng.gen())?;
            let verdict = aut.evaluate_tree(&t)?.accept;
            if verdict == prop.holds(&t.decode(&decode)?) {
                agree += 1;
            }
        }
        r.check(
            agree == cfg.random_trees,
            format!("evaluate {name} {} agree {agree}/{}", prop.name(), cfg.random_trees),
        );
    }
    Ok(())
}

fn polynomial(r: &mut Report) -> Result<()> {
    r.line("[poly] subsets include the empty set and the whole vertex set");
    let mut all_ok = true;
    for n in 0..=10usize {
        let g = ColoredGraph::path(n);
        let v = poly_eval(&g, &Property::Const(true), 1.0, false)?;
        let mut binom = vec![1u64];
        for _ in 0..n {
            let mut next = vec![1u64; binom.len() + 1];
            for i in 1..binom.len() {
                next[i] = binom[i - 1] + binom[i];
            }
            binom = next;
        }
        all_ok &= v.coeffs == binom;
    }
    r.check(all_ok, "poly true paths n<=10 binomial");
    let v = poly_eval(&ColoredGraph::complete(2), &Property::connected(), 1.0, false)?;
    let coeffs: Vec<String> = v.coeffs.iter().map(u64::to_string).collect();
    r.check(v.coeffs == [1, 2, 1], format!("poly connected K2 coeffs {}", coeffs.join(" ")));
    Ok(())
}

use std::collections::HashMap;

use hc_core::circuit::{parse_circuit, parse_circuit_with, Circuit, DecodeOptions, OpKind};
use hc_core::enumerate::{
    count_parse_trees, exhaustive_parse_trees, feasible_tree_size, gen_parse_tree, trees_of_size, InductiveSystem,
};
use hc_core::{ColoredGraph, Error};
use proptest::prelude::*;

fn adj_masks(g: &ColoredGraph) -> Vec<u32> {
    let mut m = vec![0u32; g.n()];
    for &(u, v) in g.edges() {
        m[u as usize] |= 1 << v;
        m[v as usize] |= 1 << u;
    }
    m
}

/// Tree-width by the subset recurrence over elimination orders:
/// `TW(S) = min_{v in S} max(TW(S - v), |Q(S - v, v)|)` where `Q(S, v)` are
/// the vertices outside `S + v` reachable from `v` through `S`.
fn treewidth(g: &ColoredGraph) -> i32 {
    let n = g.n();
    if n == 0 {
        return -1;
    }
    let adj = adj_masks(g);
    let q = |s: u32, v: usize| -> i32 {
        let mut seen = 1u32 << v;
        let mut stack = vec![v];
        let mut out = 0u32;
        while let Some(u) = stack.pop() {
            let mut nb = adj[u] & !seen;
            while nb != 0 {
                let w = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                seen |= 1 << w;
                if s >> w & 1 == 1 {
                    stack.push(w);
                } else {
                    out |= 1 << w;
                }
            }
        }
        out.count_ones() as i32
    };
    let full = (1u32 << n) - 1;
    let mut tw = vec![i32::MAX; 1 << n];
    tw[0] = -1;
    for s in 1..=full {
        let mut best = i32::MAX;
        let mut bits = s;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let rest = s & !(1 << v);
            best = best.min(tw[rest as usize].max(q(rest, v)));
        }
        tw[s as usize] = best;
    }
    tw[full as usize]
}

/// Whether `g` decomposes recursively into 2 or 3 modules at a time
/// (pairwise all-or-nothing adjacency between parts).
fn modular_width_at_most_3(g: &ColoredGraph) -> bool {
    let adj = adj_masks(g);
    let mut memo = HashMap::new();
    decomposes(&adj, (1u32 << g.n()) - 1, &mut memo)
}

fn decomposes(adj: &[u32], set: u32, memo: &mut HashMap<u32, bool>) -> bool {
    if set.count_ones() <= 1 {
        return true;
    }
    if let Some(&r) = memo.get(&set) {
        return r;
    }
    let verts: Vec<usize> = (0..adj.len()).filter(|&v| set >> v & 1 == 1).collect();
    let mut found = false;
    'labels: for code in 0..3usize.pow(verts.len() as u32) {
        let mut parts = [0u32; 3];
        let mut c = code;
        for &v in &verts {
            parts[c % 3] |= 1 << v;
            c /= 3;
        }
        let used: Vec<u32> = parts.iter().copied().filter(|&p| p != 0).collect();
        if used.len() < 2 || parts[0] == 0 {
            continue;
        }
        for (i, &a) in used.iter().enumerate() {
            for &b in &used[i + 1..] {
                let mut kinds = [false; 2];
                for u in (0..adj.len()).filter(|&u| a >> u & 1 == 1) {
                    let hits = (adj[u] & b).count_ones();
                    if hits != 0 && hits != b.count_ones() {
                        continue 'labels;
                    }
                    kinds[(hits != 0) as usize] = true;
                }
                if kinds[0] && kinds[1] {
                    continue 'labels;
                }
            }
        }
        if used.iter().all(|&p| decomposes(adj, p, memo)) {
            found = true;
            break;
        }
    }
    memo.insert(set, found);
    found
}

/// Tree counts by size from the recurrence over operation arities.
fn tree_counts(sys: &InductiveSystem, max: usize) -> Vec<u128> {
    let mut t = vec![0u128; max + 1];
    for s in 1..=max {
        if s == 1 {
            t[1] = sys.base.len() as u128;
            continue;
        }
        let mut total = 0;
        for op in &sys.ops {
            // forests of `arity` trees with `s - 1` nodes
            let mut f = vec![0u128; s];
            f[0] = 1;
            for _ in 0..op.arity() {
                let mut g = vec![0u128; s];
                for (a, &fa) in f.iter().enumerate() {
                    for b in 1..s - a {
                        g[a + b] += fa * t[b];
                    }
                }
                f = g;
            }
            total += f[s - 1];
        }
        t[s] = total;
    }
    t
}

#[test]
fn counts_match_recurrence_and_streams() {
    for sys in [
        InductiveSystem::clique_width(2).unwrap(),
        InductiveSystem::union_only(),
        InductiveSystem::modular_width(3).unwrap(),
    ] {
        let counts = count_parse_trees(&sys, 7);
        let rec = tree_counts(&sys, 7);
        assert_eq!(counts[1..], rec[1..], "{}", sys.name);
        for s in 1..=6 {
            assert_eq!(trees_of_size(&sys, s).count() as u128, counts[s], "{} size {s}", sys.name);
        }
    }
    let cw2 = InductiveSystem::clique_width(2).unwrap();
    let total: u128 = count_parse_trees(&cw2, 12)[1..].iter().sum();
    assert_eq!(total, 33_887_464);
    assert_eq!(total, tree_counts(&cw2, 12)[1..].iter().sum::<u128>());
}

#[test]
fn clique_width_one_decodes_are_edgeless() {
    let cw1 = InductiveSystem::clique_width(1).unwrap();
    let opts = DecodeOptions::default();
    let mut n = 0;
    for t in exhaustive_parse_trees(&cw1, 7) {
        assert_eq!(t.decode(&opts).unwrap().edge_count(), 0, "{t}");
        n += 1;
    }
    assert!(n > 0);
}

#[test]
fn tree_width_decodes_respect_the_bound() {
    let opts = DecodeOptions::default();
    for k in [1u8, 2] {
        let sys = InductiveSystem::tree_width(k).unwrap();
        let mut checked = 0;
        let mut seed = 0u64;
        while checked < 60 {
            seed += 1;
            let t = gen_parse_tree(&sys, 1 + (seed as usize % 9), seed).unwrap();
            let g = t.decode(&opts).unwrap();
            if g.n() > 8 {
                continue;
            }
            assert!(treewidth(&g) <= k as i32, "tw{k}: {t}");
            checked += 1;
        }
    }
}

#[test]
fn treewidth_oracle_sanity() {
    assert_eq!(treewidth(&ColoredGraph::path(5)), 1);
    assert_eq!(treewidth(&ColoredGraph::cycle(5)), 2);
    assert_eq!(treewidth(&ColoredGraph::complete(5)), 4);
    assert_eq!(treewidth(&ColoredGraph::edgeless(3, 0)), 0);
    assert!(!modular_width_at_most_3(&ColoredGraph::path(4)));
    assert!(modular_width_at_most_3(&ColoredGraph::cycle(4)));
}

#[test]
fn modular_width_decodes_decompose() {
    let sys = InductiveSystem::modular_width(3).unwrap();
    let opts = DecodeOptions::default();
    for seed in 0..150u64 {
        let t = gen_parse_tree(&sys, 1 + seed as usize % 8, seed).unwrap();
        let g = t.decode(&opts).unwrap();
        assert!(g.n() <= 12);
        assert!(modular_width_at_most_3(&g), "{t}");
    }
}

#[test]
fn parse_errors_carry_positions() {
    let e = parse_circuit("(fuse 1 x y)").unwrap_err();
    assert_eq!((e.line, e.column), (1, 1));
    assert!(e.message.contains("expects 1 operand"));
    let e = parse_circuit("(union x\n  (frob x x))").unwrap_err();
    assert_eq!(e.line, 2);
    for bad in ["", "(", ")", "(union x)", "(leaf \"graph n=1 k=0)", "(leaf @v)"] {
        assert!(parse_circuit(bad).is_err(), "{bad:?}");
    }
    let deep = "(recolor 1 2 ".repeat(5000) + "x" + &")".repeat(5000);
    assert!(parse_circuit(&deep).is_err());
}

#[test]
fn unbalanced_arity_is_rejected_when_building() {
    assert!(Circuit::op(OpKind::Union, vec![Circuit::Free]).is_err());
    assert!(Circuit::op(OpKind::Eta(1, 1), vec![Circuit::Free]).is_err());
}

#[test]
fn free_leaves_must_be_substituted_before_decoding() {
    let c = parse_circuit("(union x (leaf \"graph n=1 k=0\"))").unwrap();
    assert!(matches!(c.decode(&DecodeOptions::default()), Err(Error::FreeLeaf)));
    let g = c.decode_with(&ColoredGraph::complete(2), &DecodeOptions::default()).unwrap();
    assert_eq!((g.n(), g.edge_count()), (3, 1));
}

#[test]
fn decode_budget_is_enforced() {
    let sys = InductiveSystem::clique_width(2).unwrap();
    let t = gen_parse_tree(&sys, 41, 7).unwrap();
    let tight = DecodeOptions {
        vertex_budget: 1,
        ..DecodeOptions::default()
    };
    assert!(t.tree_size() > 1);
    if t.decode(&DecodeOptions::default()).unwrap().n() > 1 {
        assert!(matches!(t.decode(&tight), Err(Error::Budget { .. })));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_trees_round_trip_through_text(size in 1usize..120, seed in any::<u64>()) {
        let sys = InductiveSystem::clique_width(2).unwrap();
        let t = gen_parse_tree(&sys, size, seed).unwrap();
        prop_assert!(t.is_closed());
        prop_assert_eq!(t.tree_size(), feasible_tree_size(&sys, size));
        prop_assert_eq!(&t, &gen_parse_tree(&sys, size, seed).unwrap());
        let back = parse_circuit_with(&t.to_string(), &sys.parse_env()).unwrap();
        prop_assert_eq!(&back, &t);
        let opts = DecodeOptions::default();
        prop_assert_eq!(back.decode(&opts).unwrap(), t.decode(&opts).unwrap());
    }

    #[test]
    fn modular_width_sizes_round_down(size in 1usize..40, seed in any::<u64>()) {
        let sys = InductiveSystem::modular_width(3).unwrap();
        let t = gen_parse_tree(&sys, size, seed).unwrap();
        prop_assert_eq!(t.tree_size(), feasible_tree_size(&sys, size));
        prop_assert!(t.tree_size() <= size);
    }
}

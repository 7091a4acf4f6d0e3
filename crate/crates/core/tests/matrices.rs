use std::collections::HashSet;

use hc_core::circuit::{Circuit, OpKind};
use hc_core::enumerate::{build_pool, enum_contexts, enum_graphs, InductiveSystem, PoolKind};
use hc_core::hankel::{build_circuit_matrix, build_hankel, BitMatrix};
use hc_core::properties::{poly_eval, OrderSet, Property, PropertyOracle};
use hc_core::ColoredGraph;
use proptest::prelude::*;

/// Rank by elimination over rows stored as `u128` masks.
fn naive_rank(rows: &[Vec<bool>]) -> usize {
    let mut basis: Vec<u128> = Vec::new();
    for row in rows {
        let mut x: u128 = row.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| 1u128 << j).sum();
        for &b in &basis {
            x = x.min(x ^ b);
        }
        if x != 0 {
            basis.push(x);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

fn transpose(rows: &[Vec<bool>], cols: usize) -> Vec<Vec<bool>> {
    (0..cols).map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}

fn matrix_strategy() -> impl Strategy<Value = (Vec<Vec<bool>>, usize)> {
    (0usize..40, 0usize..100).prop_flat_map(|(r, c)| {
        (prop::collection::vec(prop::collection::vec(any::<bool>(), c), r), Just(c))
    })
}

fn brute_connected(g: &ColoredGraph) -> bool {
    let n = g.n();
    if n == 0 {
        return true;
    }
    // Union-find over the edge list.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] == x {
            x
        } else {
            let r = find(p, p[x]);
            p[x] = r;
            r
        }
    }
    for &(u, v) in g.edges() {
        let (a, b) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
        parent[a] = b;
    }
    (0..n).all(|v| find(&mut parent, v) == find(&mut parent, 0))
}

fn brute_bipartite(g: &ColoredGraph) -> bool {
    let n = g.n();
    (0u32..1 << n).any(|side| g.edges().iter().all(|&(u, v)| (side >> u & 1) != (side >> v & 1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gf2_rank_matches_naive_elimination((rows, cols) in matrix_strategy()) {
        let m = BitMatrix::from_rows(&rows);
        let r = m.gf2_rank();
        prop_assert_eq!(r, naive_rank(&rows));
        prop_assert!(r <= rows.len().min(cols));
        prop_assert_eq!(r, BitMatrix::from_rows(&transpose(&rows, cols)).gf2_rank());
        prop_assert!(m.distinct_rows() as u128 <= 1u128 << r.min(127));
    }

    #[test]
    fn order_sets_round_trip(
        exc in prop::collection::btree_set(0usize..20, 0..4),
        modulus in 1usize..6,
        residues in prop::collection::btree_set(0usize..6, 0..3),
        threshold in 0usize..8,
    ) {
        let residues: Vec<usize> = residues.into_iter().filter(|&r| r < modulus).collect();
        let a = OrderSet::periodic(exc.clone(), modulus, residues.clone(), threshold).unwrap();
        let back: OrderSet = a.to_string().parse().unwrap();
        for n in 0..60 {
            prop_assert_eq!(a.contains(n), back.contains(n));
            let expect = exc.contains(&n) || (n >= threshold && residues.contains(&(n % modulus)));
            prop_assert_eq!(a.contains(n), expect);
        }
    }
}

#[test]
fn structural_properties_match_brute_force() {
    for g in enum_graphs(6, 0).unwrap().iter() {
        assert_eq!(Property::connected().holds(g), brute_connected(g), "{}", g.to_text());
        assert_eq!(Property::Bipartite.holds(g), brute_bipartite(g), "{}", g.to_text());
    }
}

#[test]
fn poly_matches_subset_enumeration() {
    let prop = Property::Bipartite;
    for g in enum_graphs(5, 0).unwrap().iter() {
        let n = g.n();
        let mut coeffs = vec![0u64; n + 1];
        for mask in 0u32..1 << n {
            let keep: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            let edges = g
                .edges()
                .iter()
                .filter(|&&(u, v)| mask >> u & 1 == 1 && mask >> v & 1 == 1)
                .map(|&(u, v)| {
                    let pos = |x: u32| keep.iter().position(|&k| k == x as usize).unwrap();
                    (pos(u), pos(v))
                });
            let sub = ColoredGraph::from_parts(keep.len(), 0, edges, std::iter::empty()).unwrap();
            if brute_bipartite(&sub) {
                coeffs[keep.len()] += 1;
            }
        }
        let v = poly_eval(g.as_ref(), &prop, 2.0, false).unwrap();
        assert_eq!(v.coeffs, coeffs);
        let value: f64 = coeffs.iter().enumerate().map(|(i, &c)| c as f64 * 2f64.powi(i as i32)).sum();
        assert_eq!(v.value, value);
        let proper = poly_eval(g.as_ref(), &prop, 2.0, true).unwrap();
        let top = coeffs[n] - proper.coeffs[n];
        assert_eq!(top, brute_bipartite(g) as u64);
    }
}

#[test]
fn union_hankel_is_symmetric_and_small() {
    let pool = enum_graphs(4, 0).unwrap();
    for prop in [Property::connected(), Property::Bipartite, Property::conn_of_order(OrderSet::evens())] {
        let h = build_hankel(&OpKind::Union, &prop, &pool).unwrap();
        for i in 0..h.rows() {
            for j in 0..h.cols() {
                assert_eq!(h.get(i, j), h.get(j, i));
            }
        }
        assert!(h.distinct_rows() <= 1 << h.gf2_rank());
    }
}

#[test]
fn hankel_sits_inside_the_circuit_matrix() {
    // Depth-1 contexts `(union x A_j)` give exactly the Hankel columns.
    let sys = InductiveSystem::clique_width(2).unwrap();
    let pool = build_pool(&sys, 3, PoolKind::Class).unwrap();
    let prop = Property::connected();
    let contexts = enum_contexts(&sys, &pool, 1).unwrap();
    let cm = build_circuit_matrix(&contexts, &prop, &pool).unwrap();
    let h = build_hankel(&OpKind::Union, &prop, &pool).unwrap();
    let mut found = vec![None; pool.len()];
    for c in 0..contexts.len() {
        let circuit = contexts.circuit(c);
        if let Circuit::Op(OpKind::Union, args) = &circuit {
            if matches!(args[0], Circuit::Free) {
                if let Circuit::Leaf(leaf) = &args[1] {
                    found[pool.index_of(&leaf.graph).unwrap()] = Some(c);
                }
            }
        }
    }
    for (j, col) in found.iter().enumerate() {
        let col = col.expect("every pool member appears as a right operand");
        for i in 0..pool.len() {
            assert_eq!(h.get(i, j), cm.get(i, col));
        }
    }
    assert!(h.gf2_rank() <= cm.gf2_rank());
}

#[test]
fn circuit_matrix_entries_match_decoding() {
    let sys = InductiveSystem::clique_width(2).unwrap();
    let pool = build_pool(&sys, 3, PoolKind::Class).unwrap();
    let prop = Property::connected();
    let contexts = enum_contexts(&sys, &pool, 2).unwrap();
    let cm = build_circuit_matrix(&contexts, &prop, &pool).unwrap();
    let opts = hc_core::circuit::DecodeOptions::default();
    let step = (contexts.len() / 97).max(1);
    for c in (0..contexts.len()).step_by(step) {
        let circuit = contexts.circuit(c);
        for (i, a) in pool.iter().enumerate() {
            assert_eq!(cm.get(i, c), prop.holds(&circuit.decode_with(a, &opts).unwrap()), "{circuit}");
        }
    }
    let distinct: HashSet<&[u64]> = (0..cm.rows()).map(|i| cm.row_words(i)).collect();
    assert_eq!(distinct.len(), cm.distinct_rows());
}

use std::collections::HashSet;

use hc_core::circuit::{Circuit, DecodeOptions};
use hc_core::compiler::{compile, load_automaton, parse_automaton, render_automaton, save_automaton, Automaton};
use hc_core::enumerate::{build_pool, enum_contexts, gen_parse_tree, InductiveSystem, PoolKind};
use hc_core::hankel::build_circuit_matrix;
use hc_core::properties::{OrderSet, Property, PropertyOracle};
use hc_core::ColoredGraph;
use proptest::prelude::*;
use std::sync::OnceLock;

fn cw2_connected() -> &'static Automaton {
    static AUT: OnceLock<Automaton> = OnceLock::new();
    AUT.get_or_init(|| compile(&InductiveSystem::clique_width(2).unwrap(), &Property::connected(), 4, 2).unwrap())
}

#[test]
fn class_count_matches_distinct_nonempty_rows() {
    let sys = InductiveSystem::clique_width(2).unwrap();
    let prop = Property::connected();
    let pool = build_pool(&sys, 4, PoolKind::Class).unwrap();
    let contexts = enum_contexts(&sys, &pool, 2).unwrap();
    let cm = build_circuit_matrix(&contexts, &prop, &pool).unwrap();
    let empty = pool.index_of(&ColoredGraph::empty(2));
    let rows: HashSet<&[u64]> = (0..cm.rows()).filter(|&i| Some(i) != empty).map(|i| cm.row_words(i)).collect();
    assert_eq!(cw2_connected().class_count(), rows.len());
    assert_eq!(cw2_connected().class_count(), 6);
}

#[test]
fn saved_automata_load_back_identically() {
    let aut = cw2_connected();
    let path = std::env::temp_dir().join(format!("hc-roundtrip-{}.aut", std::process::id()));
    save_automaton(aut, &path).unwrap();
    let back = load_automaton(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(&back, aut);
    assert_eq!(render_automaton(&back), render_automaton(aut));
    let sys = aut.system();
    for seed in 0..30 {
        let t = gen_parse_tree(sys, 1 + seed as usize * 7, seed).unwrap();
        assert_eq!(back.evaluate_tree(&t).unwrap(), aut.evaluate_tree(&t).unwrap());
    }
}

#[test]
fn compilation_does_not_depend_on_thread_count() {
    let sys = InductiveSystem::clique_width(2).unwrap();
    let prop = Property::conn_of_order(OrderSet::evens());
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| render_automaton(&compile(&sys, &prop, 3, 2).unwrap()))
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(parse_automaton(&one).map(|a| render_automaton(&a)).unwrap(), one);
}

#[test]
fn class_representatives_decode_to_their_verdict() {
    let aut = cw2_connected();
    let opts = DecodeOptions::default();
    for class in aut.classes() {
        let g = class.representative.decode(&opts).unwrap();
        assert_eq!(Property::connected().holds(&g), class.accept);
        assert_eq!(aut.evaluate_tree(&class.representative).unwrap().classes.last(), Some(&class.id));
    }
}

/// Wraps `t` in a random context built from small generated trees.
fn wrap(sys: &InductiveSystem, t: Circuit, seed: u64) -> Circuit {
    let mut c = t;
    let mut s = seed;
    for _ in 0..(seed % 4) {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let op = sys.ops[(s >> 33) as usize % sys.ops.len()].clone();
        let hole = (s >> 20) as usize % op.arity();
        let mut args: Vec<Circuit> =
            (1..op.arity()).map(|i| gen_parse_tree(sys, 1 + (s as usize >> (8 * i)) % 9, s ^ i as u64).unwrap()).collect();
        args.insert(hole, c);
        c = Circuit::op(op, args).unwrap();
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluation_agrees_with_decoding(size in 1usize..150, seed in any::<u64>()) {
        let aut = cw2_connected();
        let t = gen_parse_tree(aut.system(), size, seed).unwrap();
        let g = t.decode(&DecodeOptions::default()).unwrap();
        let trace = aut.evaluate_tree(&t).unwrap();
        prop_assert_eq!(trace.accept, Property::connected().holds(&g));
        prop_assert_eq!(trace.node_count, t.tree_size());
        prop_assert_eq!(trace.classes.len(), t.tree_size());
    }

    /// Trees in one class are interchangeable under any context.
    #[test]
    fn classes_are_congruences(s1 in 1usize..25, s2 in 1usize..25, a in any::<u64>(), b in any::<u64>(), ctx in any::<u64>()) {
        let aut = cw2_connected();
        let sys = aut.system();
        let (t1, t2) = (gen_parse_tree(sys, s1, a).unwrap(), gen_parse_tree(sys, s2, b).unwrap());
        let same = aut.evaluate_tree(&t1).unwrap().classes.last() == aut.evaluate_tree(&t2).unwrap().classes.last();
        prop_assume!(same);
        let opts = DecodeOptions::default();
        let (w1, w2) = (wrap(sys, t1, ctx), wrap(sys, t2, ctx));
        let prop = Property::connected();
        prop_assert_eq!(prop.holds(&w1.decode(&opts).unwrap()), prop.holds(&w2.decode(&opts).unwrap()));
    }
}

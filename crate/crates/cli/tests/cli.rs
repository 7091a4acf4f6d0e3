use std::path::PathBuf;
use std::process::{Command, Output};

use hc_core::enumerate::{build_pool, InductiveSystem, PoolKind};
use hc_core::hankel::{build_hankel, RankReport};
use hc_core::properties::Property;
use hc_core::circuit::OpKind;

fn hc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn compile_gen_eval_pipeline() {
    let aut = scratch("conn.aut");
    let tree = scratch("t.tree");
    let o = hc(&["compile", "--system", "cw2", "--prop", "connected", "--n", "4", "--depth", "2", "--out", aut.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("classes 6 "));
    let o = hc(&["gen", "--system", "cw2", "--size", "31", "--seed", "5", "--out", tree.to_str().unwrap()]);
    assert!(o.status.success());
    let o = hc(&["eval", "--automaton", aut.to_str().unwrap(), "--tree", tree.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("accept "), "{text}");
    assert!(text.contains("\nnodes 31\n"), "{text}");

    // A hand-written tree: eta joins the two singletons into K2.
    std::fs::write(&tree, "(eta 1 2 (union (leaf @v1) (leaf @v2)))").unwrap();
    let o = hc(&["eval", "--automaton", aut.to_str().unwrap(), "--tree", tree.to_str().unwrap()]);
    assert_eq!(stdout(&o), "accept 1\nnodes 4\n");
    std::fs::write(&tree, "(union (leaf @v1) (leaf @v2))").unwrap();
    let o = hc(&["eval", "--automaton", aut.to_str().unwrap(), "--tree", tree.to_str().unwrap()]);
    assert_eq!(stdout(&o), "accept 0\nnodes 3\n");
}

#[test]
fn rank_matches_the_library() {
    let o = hc(&["rank", "--system", "union", "--op", "join", "--pool", "all", "--n", "5"]);
    assert!(o.status.success());
    let pool = build_pool(&InductiveSystem::union_only(), 5, PoolKind::All).unwrap();
    let h = build_hankel(&OpKind::Join, &Property::connected(), &pool).unwrap();
    assert_eq!(stdout(&o), format!("{}\n", RankReport::of(&h, 5, 1)));
    assert!(stdout(&o).starts_with("rank 3 "));
}

#[test]
fn profile_reports_one_line_per_truncation() {
    let o = hc(&["rank", "--profile", "--system", "union", "--n", "3", "--depth", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().all(|l| l.starts_with("rank ")));
}

#[test]
fn poly_prints_coefficients() {
    let o = hc(&["poly", "--prop", "connected", "--graph", "K2"]);
    assert_eq!(stdout(&o), "coeffs 1 2 1\nvalue 4\n");
    let o = hc(&["poly", "--prop", "connected", "--graph", "K2", "--proper-subsets"]);
    assert_eq!(stdout(&o), "coeffs 1 2 0\nvalue 3\n");
}

#[test]
fn exit_codes_distinguish_usage_from_domain_errors() {
    assert_eq!(hc(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hc(&["rank", "--prop", "no-such-property"]).status.code(), Some(2));
    assert_eq!(hc(&["rank", "--system", "no-such-system"]).status.code(), Some(2));
    assert_eq!(hc(&["gen", "--size", "0"]).status.code(), Some(2));
    assert_eq!(hc(&["rank", "--workers", "0"]).status.code(), Some(2));
    let o = hc(&["compile", "--system", "cw2", "--class-cap", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rank not saturated"));
    let missing = scratch("missing.aut");
    let o = hc(&["eval", "--automaton", missing.to_str().unwrap(), "--tree", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn system_files_match_builtins() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../systems");
    for (file, sys) in [
        ("cw2.sys", InductiveSystem::clique_width(2).unwrap()),
        ("tw1.sys", InductiveSystem::tree_width(1).unwrap()),
        ("union.sys", InductiveSystem::union_only()),
    ] {
        let text = std::fs::read_to_string(root.join(file)).unwrap();
        assert_eq!(InductiveSystem::parse(&text).unwrap(), sys, "{file}");
    }
}

//! Line-oriented automaton files:
//!
//! ```text
//! automaton v1 system=<name> classes=<c>
//! leaf <class> <name> "<graph text>"
//! class <id> accept <0|1> repr <circuit>
//! tr <op-signature> <id>... -> <id>
//! provenance rank=<r> pool=<n> depth=<d>
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use super::{Automaton, Class, LeafClass, Provenance, MISSING};
use crate::circuit::{parse_circuit_with, OpKind, ParseEnv};
use crate::enumerate::{BaseStructure, InductiveSystem};
use crate::error::{Error, Result};
use crate::graph::ColoredGraph;

pub fn render_automaton(aut: &Automaton) -> String {
    let mut out = String::new();
    let c = aut.classes.len();
    let _ = writeln!(out, "automaton v1 system={} classes={}", aut.system.name, c);
    for l in &aut.leaves {
        let _ = writeln!(out, "leaf {} {} {}", l.class, l.name, quote(&l.graph.to_text()));
    }
    for cl in &aut.classes {
        let _ = writeln!(out, "class {} accept {} repr {}", cl.id, cl.accept as u8, cl.representative);
    }
    for (op, table) in aut.system.ops.iter().zip(&aut.tables) {
        let sig = op.signature();
        for (idx, &t) in table.iter().enumerate() {
            if t == MISSING {
                continue;
            }
            let mut args = vec![0usize; op.arity()];
            let mut rest = idx;
            for a in args.iter_mut().rev() {
                *a = rest % c;
                rest /= c;
            }
            let _ = write!(out, "tr {sig}");
            for a in args {
                let _ = write!(out, " {a}");
            }
            let _ = writeln!(out, " -> {t}");
        }
    }
    let p = aut.provenance;
    let _ = writeln!(out, "provenance rank={} pool={} depth={}", p.rank, p.pool, p.depth);
    out
}

pub fn save_automaton(aut: &Automaton, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, render_automaton(aut))?;
    Ok(())
}

pub fn load_automaton(path: impl AsRef<Path>) -> Result<Automaton> {
    parse_automaton(&std::fs::read_to_string(path)?)
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '\n' => out.push_str("\\n"),
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn unquote(s: &str) -> Option<String> {
    let inner = s.strip_prefix('"')?.strip_suffix('"')?;
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => match chars.next()? {
                'n' => out.push('\n'),
                '"' => out.push('"'),
                '\\' => out.push('\\'),
                _ => return None,
            },
            '"' => return None,
            c => out.push(c),
        }
    }
    Some(out)
}

fn key_value<'a>(token: &'a str, key: &str) -> Option<&'a str> {
    token.strip_prefix(key)?.strip_prefix('=')
}

pub fn parse_automaton(text: &str) -> Result<Automaton> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let bad = |line: usize, message: String| Error::AutomatonFile { line, message };

    let Some(&(hl, header)) = lines.first() else {
        return Err(bad(1, "empty file".into()));
    };
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.first() != Some(&"automaton") {
        return Err(bad(hl, "expected `automaton` header".into()));
    }
    match h.get(1) {
        Some(&"v1") => {}
        Some(v) => return Err(bad(hl, format!("unsupported version `{v}`"))),
        None => return Err(bad(hl, "missing version".into())),
    }
    let (Some(name), Some(count)) = (
        h.get(2).and_then(|t| key_value(t, "system")),
        h.get(3).and_then(|t| key_value(t, "classes")),
    ) else {
        return Err(bad(hl, "header needs system=<name> classes=<count>".into()));
    };
    let count: usize = count.parse().map_err(|_| bad(hl, format!("bad class count `{count}`")))?;
    if count == 0 || count >= MISSING as usize {
        return Err(bad(hl, format!("class count {count} out of range")));
    }

    let Some(&(pl, trailer)) = lines.last().filter(|(_, l)| l.starts_with("provenance")) else {
        return Err(bad(lines.last().map_or(1, |l| l.0), "missing provenance trailer".into()));
    };
    let mut prov = [None; 3];
    for tok in trailer.split_whitespace().skip(1) {
        for (slot, key) in prov.iter_mut().zip(["rank", "pool", "depth"]) {
            if let Some(v) = key_value(tok, key) {
                *slot = Some(v.parse::<usize>().map_err(|_| bad(pl, format!("bad {key} `{v}`")))?);
            }
        }
    }
    let [Some(rank), Some(pool), Some(depth)] = prov else {
        return Err(bad(pl, "provenance needs rank=, pool= and depth=".into()));
    };

    let class_id = |line: usize, s: &str| -> Result<u32> {
        match s.parse::<u32>() {
            Ok(c) if (c as usize) < count => Ok(c),
            _ => Err(bad(line, format!("bad class id `{s}`"))),
        }
    };

    let mut leaves: Vec<LeafClass> = Vec::new();
    let mut names: HashMap<String, Arc<ColoredGraph>> = HashMap::new();
    let mut classes: Vec<Class> = Vec::new();
    let mut ops: Vec<OpKind> = Vec::new();
    let mut entries: Vec<(usize, usize, Vec<u32>, u32)> = Vec::new();
    let mut max_color = 0u8;

    for &(ln, line) in &lines[1..lines.len() - 1] {
        let (kind, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim_start();
        match kind {
            "leaf" => {
                if !classes.is_empty() {
                    return Err(bad(ln, "leaf lines must precede class lines".into()));
                }
                let mut parts = rest.splitn(3, char::is_whitespace);
                let (Some(cls), Some(name), Some(graph)) = (parts.next(), parts.next(), parts.next()) else {
                    return Err(bad(ln, "expected `leaf <class> <name> \"<graph>\"`".into()));
                };
                let class = class_id(ln, cls)?;
                let text = unquote(graph.trim()).ok_or_else(|| bad(ln, "malformed graph string".into()))?;
                let g = Arc::new(ColoredGraph::parse_text(&text).map_err(|e| bad(ln, e.to_string()))?);
                max_color = max_color.max(g.k());
                if names.insert(name.to_string(), Arc::clone(&g)).is_some() {
                    return Err(bad(ln, format!("duplicate leaf `{name}`")));
                }
                leaves.push(LeafClass {
                    name: name.to_string(),
                    graph: g,
                    class,
                });
            }
            "class" => {
                let toks: Vec<&str> = rest.splitn(5, char::is_whitespace).collect();
                let [id, "accept", acc, "repr", repr] = toks[..] else {
                    return Err(bad(ln, "expected `class <id> accept <0|1> repr <circuit>`".into()));
                };
                let id = class_id(ln, id)?;
                if id as usize != classes.len() {
                    return Err(bad(ln, format!("class {id} out of order")));
                }
                let accept = match acc {
                    "0" => false,
                    "1" => true,
                    _ => return Err(bad(ln, format!("bad accept bit `{acc}`"))),
                };
                let env = ParseEnv {
                    names: Some(&names),
                    max_color: None,
                };
                let representative = parse_circuit_with(repr, &env).map_err(|e| bad(ln, e.to_string()))?;
                if !representative.is_closed() {
                    return Err(bad(ln, "representative must be closed".into()));
                }
                classes.push(Class {
                    id,
                    representative,
                    accept,
                });
            }
            "tr" => {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                let (Some(&sig), Some(&"->"), Some(&target)) =
                    (toks.first(), toks.get(toks.len().saturating_sub(2)), toks.last())
                else {
                    return Err(bad(ln, "expected `tr <op> <ids> -> <id>`".into()));
                };
                let op = OpKind::parse_signature(sig).ok_or_else(|| bad(ln, format!("unknown operation `{sig}`")))?;
                let args = toks[1..toks.len() - 2]
                    .iter()
                    .map(|s| class_id(ln, s))
                    .collect::<Result<Vec<_>>>()?;
                if args.len() != op.arity() {
                    return Err(bad(ln, format!("{sig} takes {} classes, got {}", op.arity(), args.len())));
                }
                let target = class_id(ln, target)?;
                let oi = match ops.iter().position(|o| *o == op) {
                    Some(i) => i,
                    None => {
                        ops.push(op);
                        ops.len() - 1
                    }
                };
                entries.push((ln, oi, args, target));
            }
            "provenance" => return Err(bad(ln, "provenance must be the last line".into())),
            other => return Err(bad(ln, format!("unknown line kind `{other}`"))),
        }
    }
    if classes.len() != count {
        return Err(bad(pl, format!("header declares {count} classes, found {}", classes.len())));
    }
    if leaves.is_empty() {
        return Err(bad(hl, "no leaf lines".into()));
    }

    let mut tables: Vec<Vec<u32>> = ops.iter().map(|op| vec![MISSING; count.pow(op.arity() as u32)]).collect();
    for (ln, oi, args, target) in entries {
        let idx = args.iter().fold(0usize, |acc, &a| acc * count + a as usize);
        let slot = &mut tables[oi][idx];
        if *slot != MISSING && *slot != target {
            return Err(bad(ln, "conflicting transition".into()));
        }
        *slot = target;
    }

    let k = leaves.iter().map(|l| l.graph.k()).max().unwrap_or(0).max(max_color);
    let base = leaves
        .iter()
        .map(|l| BaseStructure {
            name: l.name.clone(),
            graph: Arc::clone(&l.graph),
        })
        .collect();
    let system = InductiveSystem::new(name, k, base, ops).map_err(|e| bad(hl, e.to_string()))?;
    Ok(Automaton {
        system,
        classes,
        tables,
        leaves,
        provenance: Provenance { rank, pool, depth },
    })
}

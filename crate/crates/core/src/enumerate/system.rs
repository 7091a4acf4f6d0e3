//! Inductive systems: a finite set of named base structures and a finite
//! set of operations.
//!
//! System file format:
//!
//! ```text
//! # comment
//! system cw2 k=2
//! base v1 graph n=1 k=2
//! c 1 1
//! base v2 graph n=1 k=2
//! c 1 2
//! op union
//! op recolor 1 2
//! op eta 1 2
//! op subst graph n=3 k=0
//! e 1 2
//! ```
//!
//! Graph text continues on the following `e`/`c` lines.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::circuit::{LeafNames, OpKind, ParseEnv};
use crate::error::{Error, Result};
use crate::graph::{canonical_form, ColoredGraph};

use super::pool::enum_graphs;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseStructure {
    pub name: String,
    pub graph: Arc<ColoredGraph>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InductiveSystem {
    pub name: String,
    pub k: u8,
    pub base: Vec<BaseStructure>,
    pub ops: Vec<OpKind>,
}

impl InductiveSystem {
    /// Validates and builds a system. Operations are deduplicated, keeping
    /// the first occurrence.
    pub fn new(name: impl Into<String>, k: u8, base: Vec<BaseStructure>, ops: Vec<OpKind>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(Error::Invalid(format!("bad system name `{name}`")));
        }
        if base.is_empty() {
            return Err(Error::Invalid("a system needs at least one base structure".into()));
        }
        let mut names = HashSet::new();
        for b in &base {
            if b.graph.k() != k {
                return Err(Error::Invalid(format!(
                    "base structure `{}` has k={} but the system has k={k}",
                    b.name,
                    b.graph.k()
                )));
            }
            if b.name.is_empty() || b.name.contains(|c: char| c.is_whitespace() || c == '(' || c == ')' || c == '"') {
                return Err(Error::Invalid(format!("bad base structure name `{}`", b.name)));
            }
            if !names.insert(b.name.as_str()) {
                return Err(Error::Invalid(format!("duplicate base structure `{}`", b.name)));
            }
        }
        let mut seen = HashSet::new();
        let mut unique = Vec::new();
        for op in ops {
            op.validate().map_err(Error::Invalid)?;
            if op.max_color() > k {
                return Err(Error::Invalid(format!("operation {op} uses a color above k={k}")));
            }
            if matches!(op, OpKind::Tensor | OpKind::Cartesian) && k != 0 {
                return Err(Error::Invalid(format!("operation {op} needs an uncolored system")));
            }
            if op.arity() == 0 {
                return Err(Error::Invalid("operations of arity 0 are not supported".into()));
            }
            if seen.insert(op.clone()) {
                unique.push(op);
            }
        }
        Ok(Self {
            name,
            k,
            base,
            ops: unique,
        })
    }

    /// Clique-width: `k` colors, one single-vertex base structure per
    /// color, disjoint union, recoloring `i -> j` (`i != j`) and `eta i j`
    /// (`i < j`; the operation is symmetric).
    pub fn clique_width(k: u8) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid("clique-width systems need k >= 1".into()));
        }
        let base = (1..=k)
            .map(|c| BaseStructure {
                name: format!("v{c}"),
                graph: Arc::new(ColoredGraph::vertex(k, Some(c)).expect("color in range")),
            })
            .collect();
        let mut ops = vec![OpKind::Union];
        for i in 1..=k {
            for j in 1..=k {
                if i != j {
                    ops.push(OpKind::Recolor(i, j));
                }
            }
        }
        for i in 1..=k {
            for j in i + 1..=k {
                ops.push(OpKind::Eta(i, j));
            }
        }
        Self::new(format!("cw{k}"), k, base, ops)
    }

    /// Tree-width: `k + 1` colors acting as ports, every colored graph on at
    /// most `k + 1` vertices as a base structure, disjoint union, recoloring
    /// and fusion.
    pub fn tree_width(k: u8) -> Result<Self> {
        let colors = k + 1;
        let pool = enum_graphs(k as usize + 1, colors)?;
        let base = pool
            .iter()
            .skip(1)
            .enumerate()
            .map(|(i, g)| BaseStructure {
                name: format!("b{i}"),
                graph: Arc::clone(g),
            })
            .collect();
        let mut ops = vec![OpKind::Union];
        for i in 1..=colors {
            for j in 1..=colors {
                if i != j {
                    ops.push(OpKind::Recolor(i, j));
                }
            }
        }
        ops.extend((1..=colors).map(OpKind::Fuse));
        Self::new(format!("tw{k}"), colors, base, ops)
    }

    /// Modular-width: single uncolored vertex, disjoint union, join, and
    /// substitution into every graph on exactly `k` vertices (one template
    /// per isomorphism class).
    pub fn modular_width(k: u8) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid("modular-width systems need k >= 1".into()));
        }
        let base = vec![BaseStructure {
            name: "v".into(),
            graph: Arc::new(ColoredGraph::edgeless(1, 0)),
        }];
        let mut ops = vec![OpKind::Union, OpKind::Join];
        let templates = enum_graphs(k as usize, 0)?;
        ops.extend(templates.iter().filter(|t| t.n() == k as usize).map(|t| OpKind::Subst(Arc::clone(t))));
        Self::new(format!("mw{k}"), 0, base, ops)
    }

    /// Disjoint union alone over `{∅, K1}`.
    pub fn union_only() -> Self {
        let base = vec![
            BaseStructure {
                name: "empty".into(),
                graph: Arc::new(ColoredGraph::empty(0)),
            },
            BaseStructure {
                name: "v".into(),
                graph: Arc::new(ColoredGraph::edgeless(1, 0)),
            },
        ];
        Self::new("union", 0, base, vec![OpKind::Union]).expect("valid builtin")
    }

    /// Resolves `cw<k>`, `tw<k>`, `mw<k>` and `union`.
    pub fn builtin(name: &str) -> Option<Result<Self>> {
        if name == "union" {
            return Some(Ok(Self::union_only()));
        }
        let (prefix, k) = (name.get(..2)?, name.get(2..)?);
        let k: u8 = k.parse().ok()?;
        match prefix {
            "cw" => Some(Self::clique_width(k)),
            "tw" => Some(Self::tree_width(k)),
            "mw" => Some(Self::modular_width(k)),
            _ => None,
        }
    }

    pub fn base_graph(&self, name: &str) -> Option<&Arc<ColoredGraph>> {
        self.base.iter().find(|b| b.name == name).map(|b| &b.graph)
    }

    /// Index of the base structure isomorphic to `g`, if any.
    pub fn base_index_of(&self, g: &ColoredGraph) -> Option<usize> {
        let cert = canonical_form(g).ok();
        self.base.iter().position(|b| match (&cert, canonical_form(&b.graph)) {
            (Some(c), Ok(d)) => *c == d,
            _ => *b.graph == *g,
        })
    }

    pub fn max_arity(&self) -> usize {
        self.ops.iter().map(OpKind::arity).max().unwrap_or(0)
    }

    /// Parse environment resolving `@name` leaves against the base set.
    pub fn parse_env(&self) -> ParseEnv<'_> {
        ParseEnv {
            names: Some(self),
            max_color: Some(self.k),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::SystemFile { line, message };
        let mut header: Option<(String, u8)> = None;
        let mut base = Vec::new();
        let mut ops = Vec::new();
        // A graph block being collected: owner, starting line, text so far.
        enum Block {
            Base(String),
            Subst,
        }
        let mut open: Option<(Block, usize, String)> = None;
        let close = |open: Option<(Block, usize, String)>,
                     base: &mut Vec<BaseStructure>,
                     ops: &mut Vec<OpKind>|
         -> Result<()> {
            let Some((block, line, text)) = open else {
                return Ok(());
            };
            let g = ColoredGraph::parse_text(&text).map_err(|e| err(line, e.to_string()))?;
            match block {
                Block::Base(name) => base.push(BaseStructure {
                    name,
                    graph: Arc::new(g),
                }),
                Block::Subst => ops.push(OpKind::Subst(Arc::new(g))),
            }
            Ok(())
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                continue;
            }
            let words: Vec<&str> = l.split_whitespace().collect();
            if matches!(words[0], "e" | "c") {
                match open.as_mut() {
                    Some((_, _, text)) => {
                        text.push('\n');
                        text.push_str(l);
                        continue;
                    }
                    None => return Err(err(line, format!("`{}` line outside a graph block", words[0]))),
                }
            }
            close(open.take(), &mut base, &mut ops)?;
            match words[0] {
                "system" => {
                    if header.is_some() {
                        return Err(err(line, "duplicate `system` header".into()));
                    }
                    let bad = || err(line, format!("expected `system <name> k=<K>`, found `{l}`"));
                    let [_, name, k] = words.as_slice() else {
                        return Err(bad());
                    };
                    let k = k.strip_prefix("k=").and_then(|k| k.parse().ok()).ok_or_else(bad)?;
                    header = Some((name.to_string(), k));
                }
                _ if header.is_none() => return Err(err(line, "missing `system` header".into())),
                "base" => {
                    if words.len() < 3 || words[2] != "graph" {
                        return Err(err(line, format!("expected `base <name> graph n=<N> k=<K>`, found `{l}`")));
                    }
                    open = Some((Block::Base(words[1].to_string()), line, words[2..].join(" ")));
                }
                "op" => {
                    let num = |s: Option<&&str>| -> Result<u8> {
                        s.and_then(|s| s.parse().ok())
                            .ok_or_else(|| err(line, format!("bad color index in `{l}`")))
                    };
                    let fixed = |op: OpKind, want: usize| -> Result<OpKind> {
                        if words.len() != want {
                            return Err(err(line, format!("wrong number of parameters in `{l}`")));
                        }
                        Ok(op)
                    };
                    let op = match words.get(1).copied() {
                        Some("union") => fixed(OpKind::Union, 2)?,
                        Some("join") => fixed(OpKind::Join, 2)?,
                        Some("tensor") => fixed(OpKind::Tensor, 2)?,
                        Some("cartesian") => fixed(OpKind::Cartesian, 2)?,
                        Some("fuse") => fixed(OpKind::Fuse(num(words.get(2))?), 3)?,
                        Some("recolor") => fixed(OpKind::Recolor(num(words.get(2))?, num(words.get(3))?), 4)?,
                        Some("eta") => fixed(OpKind::Eta(num(words.get(2))?, num(words.get(3))?), 4)?,
                        Some("subst") if words.get(2) == Some(&"graph") => {
                            open = Some((Block::Subst, line, words[2..].join(" ")));
                            continue;
                        }
                        _ => return Err(err(line, format!("unknown operation in `{l}`"))),
                    };
                    ops.push(op);
                }
                other => return Err(err(line, format!("unknown directive `{other}`"))),
            }
        }
        close(open.take(), &mut base, &mut ops)?;
        let (name, k) = header.ok_or_else(|| err(1, "missing `system` header".into()))?;
        Self::new(name, k, base, ops)
    }

    /// Renders the system file format; `parse` inverts it.
    pub fn render(&self) -> String {
        let mut out = format!("system {} k={}\n", self.name, self.k);
        for b in &self.base {
            let _ = writeln!(out, "base {} {}", b.name, b.graph.to_text());
        }
        for op in &self.ops {
            let _ = match op {
                OpKind::Fuse(i) => writeln!(out, "op fuse {i}"),
                OpKind::Recolor(i, j) => writeln!(out, "op recolor {i} {j}"),
                OpKind::Eta(i, j) => writeln!(out, "op eta {i} {j}"),
                OpKind::Subst(t) => writeln!(out, "op subst {}", t.to_text()),
                other => writeln!(out, "op {}", other.keyword()),
            };
        }
        out
    }
}

impl LeafNames for InductiveSystem {
    fn resolve(&self, name: &str) -> Option<Arc<ColoredGraph>> {
        self.base_graph(name).cloned()
    }
}

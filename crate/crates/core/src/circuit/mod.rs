//! Circuits over graph operations: parse trees (closed circuits) and
//! contexts (circuits with a free leaf `x`).

mod parse;

use std::fmt;
use std::sync::Arc;

pub use parse::{parse_circuit, parse_circuit_with, LeafNames, ParseEnv};

use crate::error::{Error, Result};
use crate::graph::{self, ColoredGraph, GraphError};

/// Default vertex budget for [`Circuit::decode`].
pub const DEFAULT_VERTEX_BUDGET: u64 = 10_000_000;
/// Edges are guarded as well; a join of two large sides is quadratic.
pub const DEFAULT_EDGE_BUDGET: u64 = 50_000_000;

/// Environment variable overriding the decode vertex budget.
pub const BUDGET_ENV: &str = "HC_BUDGET_VERTICES";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeOptions {
    pub vertex_budget: u64,
    pub edge_budget: u64,
    /// Cap on the total vertices plus edges materialized over a whole
    /// decode; long chains of unary operations on a large graph copy it
    /// once per node.
    pub work_budget: u64,
}

impl Default for DecodeOptions {
    fn default() -> Self {
        Self {
            vertex_budget: DEFAULT_VERTEX_BUDGET,
            edge_budget: DEFAULT_EDGE_BUDGET,
            work_budget: u64::MAX,
        }
    }
}

impl DecodeOptions {
    /// Defaults, with the vertex budget taken from `HC_BUDGET_VERTICES`
    /// when it is set to an integer.
    pub fn from_env() -> Self {
        let mut opts = Self::default();
        if let Some(v) = std::env::var(BUDGET_ENV).ok().and_then(|s| s.trim().parse().ok()) {
            opts.vertex_budget = v;
        }
        opts
    }
}

/// The operation at an internal node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpKind {
    Union,
    Join,
    Tensor,
    Cartesian,
    Fuse(u8),
    Recolor(u8, u8),
    Eta(u8, u8),
    /// Modular substitution into an uncolored template.
    Subst(Arc<ColoredGraph>),
}

impl OpKind {
    pub fn arity(&self) -> usize {
        match self {
            OpKind::Union | OpKind::Join | OpKind::Tensor | OpKind::Cartesian => 2,
            OpKind::Fuse(_) | OpKind::Recolor(..) | OpKind::Eta(..) => 1,
            OpKind::Subst(t) => t.n(),
        }
    }

    /// Largest color index the operation mentions (0 if none).
    pub fn max_color(&self) -> u8 {
        match *self {
            OpKind::Fuse(i) => i,
            OpKind::Recolor(i, j) | OpKind::Eta(i, j) => i.max(j),
            _ => 0,
        }
    }

    pub fn apply(&self, args: &[&ColoredGraph]) -> Result<ColoredGraph, GraphError> {
        if args.len() != self.arity() {
            return Err(GraphError::ArityMismatch {
                expected: self.arity(),
                found: args.len(),
            });
        }
        match self {
            OpKind::Union => graph::disjoint_union(args[0], args[1]),
            OpKind::Join => graph::join(args[0], args[1]),
            OpKind::Tensor => graph::tensor_product(args[0], args[1]),
            OpKind::Cartesian => graph::cartesian_product(args[0], args[1]),
            OpKind::Fuse(i) => graph::fuse(args[0], *i),
            OpKind::Recolor(i, j) => graph::recolor(args[0], *i, *j),
            OpKind::Eta(i, j) => graph::add_bicolor_edges(args[0], *i, *j),
            OpKind::Subst(t) => graph::substitute(t, args),
        }
    }

    /// Upper bounds on the vertex and edge counts of `apply(args)`.
    pub fn predict_size(&self, args: &[&ColoredGraph]) -> (u64, u64) {
        let n = |i: usize| args[i].n() as u64;
        let m = |i: usize| args[i].edge_count() as u64;
        match self {
            OpKind::Union => (n(0) + n(1), m(0) + m(1)),
            OpKind::Join => (n(0) + n(1), m(0) + m(1) + n(0) * n(1)),
            OpKind::Tensor => (n(0) * n(1), 2 * m(0) * m(1)),
            OpKind::Cartesian => (n(0) * n(1), n(0) * m(1) + n(1) * m(0)),
            OpKind::Fuse(_) | OpKind::Recolor(..) => (n(0), m(0)),
            OpKind::Eta(i, j) => {
                let g = args[0];
                let ci = g.color_class(*i).count() as u64;
                let cj = g.color_class(*j).count() as u64;
                (n(0), m(0) + ci * cj)
            }
            OpKind::Subst(t) => {
                let verts = (0..args.len()).map(n).sum();
                let inner: u64 = (0..args.len()).map(m).sum();
                let cross: u64 = t.edges().iter().map(|&(a, b)| n(a as usize) * n(b as usize)).sum();
                (verts, inner + cross)
            }
        }
    }

    /// Keyword used in circuit text and system files.
    pub fn keyword(&self) -> &'static str {
        match self {
            OpKind::Union => "union",
            OpKind::Join => "join",
            OpKind::Tensor => "tensor",
            OpKind::Cartesian => "cartesian",
            OpKind::Fuse(_) => "fuse",
            OpKind::Recolor(..) => "recolor",
            OpKind::Eta(..) => "eta",
            OpKind::Subst(_) => "subst",
        }
    }

    /// Whitespace-free token identifying the operation, e.g. `recolor:1:2`
    /// or `subst:3:1-2,2-3`.
    pub fn signature(&self) -> String {
        match self {
            OpKind::Fuse(i) => format!("fuse:{i}"),
            OpKind::Recolor(i, j) => format!("recolor:{i}:{j}"),
            OpKind::Eta(i, j) => format!("eta:{i}:{j}"),
            OpKind::Subst(t) => {
                let edges: Vec<String> = t.edges().iter().map(|&(u, v)| format!("{}-{}", u + 1, v + 1)).collect();
                format!("subst:{}:{}", t.n(), edges.join(","))
            }
            other => other.keyword().to_string(),
        }
    }

    pub fn parse_signature(sig: &str) -> Option<OpKind> {
        let parts: Vec<&str> = sig.split(':').collect();
        let num = |s: &str| s.parse::<u8>().ok();
        Some(match parts.as_slice() {
            ["union"] => OpKind::Union,
            ["join"] => OpKind::Join,
            ["tensor"] => OpKind::Tensor,
            ["cartesian"] => OpKind::Cartesian,
            ["fuse", i] => OpKind::Fuse(num(i)?),
            ["recolor", i, j] => OpKind::Recolor(num(i)?, num(j)?),
            ["eta", i, j] => OpKind::Eta(num(i)?, num(j)?),
            ["subst", n, edges] => {
                let n: usize = n.parse().ok()?;
                let mut list = Vec::new();
                for e in edges.split(',').filter(|e| !e.is_empty()) {
                    let (u, v) = e.split_once('-')?;
                    let (u, v): (usize, usize) = (u.parse().ok()?, v.parse().ok()?);
                    list.push((u.checked_sub(1)?, v.checked_sub(1)?));
                }
                OpKind::Subst(Arc::new(ColoredGraph::from_parts(n, 0, list, []).ok()?))
            }
            _ => return None,
        })
    }

    pub(crate) fn validate(&self) -> Result<(), String> {
        match *self {
            OpKind::Fuse(0) | OpKind::Recolor(0, _) | OpKind::Recolor(_, 0) | OpKind::Eta(0, _) | OpKind::Eta(_, 0) => {
                Err("color indices start at 1".into())
            }
            OpKind::Eta(i, j) if i == j => Err(format!("eta needs two distinct colors, got {i} twice")),
            OpKind::Subst(ref t) if !t.is_uncolored() => Err("substitution template must be uncolored".into()),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.signature())
    }
}

/// A structure leaf. Named leaves refer to base structures of a system and
/// render as `(leaf @name)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Leaf {
    pub name: Option<Arc<str>>,
    pub graph: Arc<ColoredGraph>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Circuit {
    /// The free leaf `x`.
    Free,
    Leaf(Leaf),
    Op(OpKind, Vec<Circuit>),
}

impl Drop for Circuit {
    // Deep trees are dismantled iteratively.
    fn drop(&mut self) {
        if let Circuit::Op(_, children) = self {
            if children.iter().all(|c| !matches!(c, Circuit::Op(..))) {
                return;
            }
            let mut stack = std::mem::take(children);
            while let Some(mut node) = stack.pop() {
                if let Circuit::Op(_, ch) = &mut node {
                    stack.append(ch);
                }
            }
        }
    }
}

impl Circuit {
    pub fn leaf(graph: impl Into<Arc<ColoredGraph>>) -> Self {
        Circuit::Leaf(Leaf {
            name: None,
            graph: graph.into(),
        })
    }

    pub fn named_leaf(name: &str, graph: impl Into<Arc<ColoredGraph>>) -> Self {
        Circuit::Leaf(Leaf {
            name: Some(Arc::from(name)),
            graph: graph.into(),
        })
    }

    /// Builds an operation node, checking the child count.
    pub fn op(kind: OpKind, children: Vec<Circuit>) -> Result<Self> {
        if children.len() != kind.arity() {
            return Err(GraphError::ArityMismatch {
                expected: kind.arity(),
                found: children.len(),
            }
            .into());
        }
        kind.validate().map_err(Error::Invalid)?;
        Ok(Circuit::Op(kind, children))
    }

    /// Number of nodes.
    pub fn tree_size(&self) -> usize {
        let mut count = 0;
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            count += 1;
            if let Circuit::Op(_, ch) = node {
                stack.extend(ch.iter());
            }
        }
        count
    }

    pub fn free_leaf_count(&self) -> usize {
        let mut count = 0;
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            match node {
                Circuit::Free => count += 1,
                Circuit::Op(_, ch) => stack.extend(ch.iter()),
                Circuit::Leaf(_) => {}
            }
        }
        count
    }

    /// A parse tree: no free leaves.
    pub fn is_closed(&self) -> bool {
        self.free_leaf_count() == 0
    }

    /// `C[A]`: every free leaf replaced by the structure `a`.
    pub fn substitute_free(&self, a: &Arc<ColoredGraph>) -> Circuit {
        match self {
            Circuit::Free => Circuit::Leaf(Leaf {
                name: None,
                graph: Arc::clone(a),
            }),
            Circuit::Leaf(l) => Circuit::Leaf(l.clone()),
            Circuit::Op(kind, ch) => Circuit::Op(kind.clone(), ch.iter().map(|c| c.substitute_free(a)).collect()),
        }
    }

    /// Iterative post-order fold. `op` receives the already-folded children.
    pub fn fold<T, E>(
        &self,
        mut leaf: impl FnMut(&Circuit) -> Result<T, E>,
        mut op: impl FnMut(&OpKind, &[T]) -> Result<T, E>,
    ) -> Result<T, E> {
        let mut stack: Vec<(&Circuit, usize)> = vec![(self, 0)];
        let mut vals: Vec<T> = Vec::new();
        while let Some((node, i)) = stack.pop() {
            match node {
                Circuit::Op(kind, ch) => {
                    if i < ch.len() {
                        stack.push((node, i + 1));
                        stack.push((&ch[i], 0));
                    } else {
                        let start = vals.len() - ch.len();
                        let v = op(kind, &vals[start..])?;
                        vals.truncate(start);
                        vals.push(v);
                    }
                }
                _ => vals.push(leaf(node)?),
            }
        }
        Ok(vals.pop().expect("fold produces one value"))
    }

    /// Evaluates a closed circuit bottom-up into a graph.
    pub fn decode(&self, opts: &DecodeOptions) -> Result<ColoredGraph> {
        self.decode_inner(None, opts)
    }

    /// Decodes with every free leaf interpreted as `a`.
    pub fn decode_with(&self, a: &ColoredGraph, opts: &DecodeOptions) -> Result<ColoredGraph> {
        self.decode_inner(Some(a), opts)
    }

    fn decode_inner(&self, free: Option<&ColoredGraph>, opts: &DecodeOptions) -> Result<ColoredGraph> {
        let mut work = 0u64;
        self.fold(
            |node| match node {
                Circuit::Leaf(l) => Ok(l.graph.as_ref().clone()),
                Circuit::Free => free.cloned().ok_or(Error::FreeLeaf),
                Circuit::Op(..) => unreachable!(),
            },
            |kind, args| {
                let refs: Vec<&ColoredGraph> = args.iter().collect();
                if refs.len() == kind.arity() {
                    let (v, e) = kind.predict_size(&refs);
                    work = work.saturating_add(v).saturating_add(e);
                }
                if work > opts.work_budget {
                    return Err(Error::Budget {
                        what: "total work",
                        needed: work,
                        budget: opts.work_budget,
                    });
                }
                apply_within_budget(kind, &refs, opts)
            },
        )
    }
}

/// Applies `kind` after checking the predicted size against the budget.
pub fn apply_within_budget(kind: &OpKind, args: &[&ColoredGraph], opts: &DecodeOptions) -> Result<ColoredGraph> {
    if args.len() != kind.arity() {
        return Err(GraphError::ArityMismatch {
            expected: kind.arity(),
            found: args.len(),
        }
        .into());
    }
    let (verts, edges) = kind.predict_size(args);
    if verts > opts.vertex_budget {
        return Err(Error::Budget {
            what: "vertices",
            needed: verts,
            budget: opts.vertex_budget,
        });
    }
    if edges > opts.edge_budget {
        return Err(Error::Budget {
            what: "edges",
            needed: edges,
            budget: opts.edge_budget,
        });
    }
    Ok(kind.apply(args)?)
}

impl fmt::Display for Circuit {
    // Iterative so that deep parse trees render without recursion.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        enum Item<'a> {
            Node(&'a Circuit),
            Close,
        }
        let mut stack = vec![Item::Node(self)];
        let mut first = true;
        while let Some(item) = stack.pop() {
            let node = match item {
                Item::Close => {
                    f.write_str(")")?;
                    continue;
                }
                Item::Node(node) => node,
            };
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            match node {
                Circuit::Free => f.write_str("x")?,
                Circuit::Leaf(Leaf { name: Some(name), .. }) => write!(f, "(leaf @{name})")?,
                Circuit::Leaf(Leaf { graph, .. }) => write!(f, "(leaf {})", quote(&graph.to_text()))?,
                Circuit::Op(kind, ch) => {
                    match kind {
                        OpKind::Fuse(i) => write!(f, "(fuse {i}")?,
                        OpKind::Recolor(i, j) => write!(f, "(recolor {i} {j}")?,
                        OpKind::Eta(i, j) => write!(f, "(eta {i} {j}")?,
                        OpKind::Subst(t) => write!(f, "(subst {}", quote(&t.to_text()))?,
                        other => write!(f, "({}", other.keyword())?,
                    }
                    stack.push(Item::Close);
                    stack.extend(ch.iter().rev().map(Item::Node));
                }
            }
        }
        Ok(())
    }
}

/// Renders a circuit as text; inverse of [`parse_circuit`].
pub fn render_circuit(c: &Circuit) -> String {
    c.to_string()
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

#[cfg(test)]
mod tests {
    use super::*;

    fn k1c(c: u8) -> ColoredGraph {
        ColoredGraph::vertex(2, Some(c)).unwrap()
    }

    #[test]
    fn tree_size_counts_nodes() {
        let leaf = Circuit::leaf(ColoredGraph::edgeless(1, 0));
        assert_eq!(leaf.tree_size(), 1);
        let u = Circuit::op(OpKind::Union, vec![leaf.clone(), leaf.clone()]).unwrap();
        assert_eq!(u.tree_size(), 3);
        let mut t = leaf;
        for d in 1..=4 {
            t = Circuit::op(OpKind::Union, vec![t.clone(), t]).unwrap();
            assert_eq!(t.tree_size(), (1 << (d + 1)) - 1);
        }
    }

    #[test]
    fn substitute_free_examples() {
        let k1 = Arc::new(ColoredGraph::edgeless(1, 0));
        assert_eq!(Circuit::Free.substitute_free(&k1), Circuit::leaf(k1.clone()));
        let closed = Circuit::op(OpKind::Union, vec![Circuit::leaf(k1.clone()), Circuit::leaf(k1.clone())]).unwrap();
        assert_eq!(closed.substitute_free(&k1), closed);
        let two = Circuit::op(OpKind::Union, vec![Circuit::Free, Circuit::Free]).unwrap();
        let s = two.substitute_free(&k1);
        assert!(s.is_closed());
        assert_eq!(s, closed);
    }

    #[test]
    fn decode_examples() {
        let k1 = ColoredGraph::edgeless(1, 0);
        assert_eq!(Circuit::leaf(k1.clone()).decode(&DecodeOptions::default()).unwrap(), k1);
        let u = Circuit::op(OpKind::Union, vec![Circuit::leaf(k1.clone()), Circuit::leaf(k1.clone())]).unwrap();
        assert_eq!(u.decode(&DecodeOptions::default()).unwrap(), ColoredGraph::edgeless(2, 0));
        let cw = Circuit::op(
            OpKind::Eta(1, 2),
            vec![Circuit::op(OpKind::Union, vec![Circuit::leaf(k1c(1)), Circuit::leaf(k1c(2))]).unwrap()],
        )
        .unwrap();
        let g = cw.decode(&DecodeOptions::default()).unwrap();
        assert_eq!(g, ColoredGraph::from_parts(2, 2, [(0, 1)], [(0, 1), (1, 2)]).unwrap());
    }

    #[test]
    fn decode_errors() {
        assert!(matches!(Circuit::Free.decode(&DecodeOptions::default()), Err(Error::FreeLeaf)));
        let big = Circuit::leaf(ColoredGraph::edgeless(10, 0));
        let t = Circuit::op(OpKind::Tensor, vec![big.clone(), big]).unwrap();
        let tight = DecodeOptions {
            vertex_budget: 50,
            ..Default::default()
        };
        assert!(matches!(t.decode(&tight), Err(Error::Budget { .. })));
    }

    #[test]
    fn op_arity_checked() {
        assert!(Circuit::op(OpKind::Fuse(1), vec![Circuit::Free, Circuit::Free]).is_err());
        assert!(Circuit::op(OpKind::Eta(1, 1), vec![Circuit::Free]).is_err());
    }

    #[test]
    fn signatures_round_trip() {
        let t = Arc::new(ColoredGraph::path(3));
        for op in [
            OpKind::Union,
            OpKind::Join,
            OpKind::Tensor,
            OpKind::Cartesian,
            OpKind::Fuse(2),
            OpKind::Recolor(1, 3),
            OpKind::Eta(2, 1),
            OpKind::Subst(t),
            OpKind::Subst(Arc::new(ColoredGraph::edgeless(2, 0))),
        ] {
            assert_eq!(OpKind::parse_signature(&op.signature()), Some(op));
        }
        assert_eq!(OpKind::parse_signature("fuse"), None);
    }

    #[test]
    fn deep_tree_drops_without_overflow() {
        let mut t = Circuit::leaf(ColoredGraph::vertex(2, Some(1)).unwrap());
        for _ in 0..200_000 {
            t = Circuit::Op(OpKind::Recolor(1, 2), vec![t]);
        }
        assert_eq!(t.tree_size(), 200_001);
        assert_eq!(t.decode(&DecodeOptions::default()).unwrap().color(0), Some(2));
        drop(t);
    }
}

//! Graph properties, boolean combinations of them, and the subset
//! polynomial `F(G; x) = Σ_{S ⊆ V(G), G[S] ∈ P} x^|S|`.

mod order_set;
mod parse;

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::RwLock;

pub use order_set::OrderSet;
pub use parse::{parse_property, PropertyOptions};

use crate::error::{Error, Result};
use crate::graph::{canonical_form, induced_subgraph, CanonicalForm, ColoredGraph};

/// An isomorphism-invariant 0/1 verdict on colored graphs.
pub trait PropertyOracle: Send + Sync {
    fn holds(&self, g: &ColoredGraph) -> bool;

    fn name(&self) -> String;
}

/// Connectivity, ignoring colors. The empty graph's verdict is a
/// convention.
pub fn is_connected(g: &ColoredGraph, empty_connected: bool) -> bool {
    let n = g.n();
    if n == 0 {
        return empty_connected;
    }
    let (off, adj) = g.adjacency();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[off[v]..off[v + 1]] {
            let w = w as usize;
            if !seen[w] {
                seen[w] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    count == n
}

pub fn is_bipartite(g: &ColoredGraph) -> bool {
    let n = g.n();
    let (off, adj) = g.adjacency();
    let mut side = vec![u8::MAX; n];
    for s in 0..n {
        if side[s] != u8::MAX {
            continue;
        }
        side[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[off[v]..off[v + 1]] {
                let w = w as usize;
                if side[w] == u8::MAX {
                    side[w] = 1 - side[v];
                    queue.push_back(w);
                } else if side[w] == side[v] {
                    return false;
                }
            }
        }
    }
    true
}

/// Boolean formula over numbered slots.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolFormula {
    Const(bool),
    Slot(usize),
    Not(Box<BoolFormula>),
    And(Vec<BoolFormula>),
    Or(Vec<BoolFormula>),
}

impl BoolFormula {
    pub fn eval(&self, slots: &[bool]) -> bool {
        match self {
            BoolFormula::Const(b) => *b,
            BoolFormula::Slot(i) => slots[*i],
            BoolFormula::Not(f) => !f.eval(slots),
            BoolFormula::And(fs) => fs.iter().all(|f| f.eval(slots)),
            BoolFormula::Or(fs) => fs.iter().any(|f| f.eval(slots)),
        }
    }

    /// One more than the largest slot mentioned (0 if none).
    pub fn slot_count(&self) -> usize {
        match self {
            BoolFormula::Const(_) => 0,
            BoolFormula::Slot(i) => i + 1,
            BoolFormula::Not(f) => f.slot_count(),
            BoolFormula::And(fs) | BoolFormula::Or(fs) => fs.iter().map(Self::slot_count).max().unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Property {
    Const(bool),
    Connected { empty_connected: bool },
    Bipartite,
    /// The graph has no vertices.
    Empty,
    /// Connected graphs whose order lies in the set.
    ConnOfOrder { orders: OrderSet, empty_connected: bool },
    Combine { formula: BoolFormula, props: Vec<Property> },
}

impl Property {
    pub fn connected() -> Self {
        Property::Connected { empty_connected: true }
    }

    pub fn conn_of_order(orders: OrderSet) -> Self {
        Property::ConnOfOrder {
            orders,
            empty_connected: true,
        }
    }

    pub fn eval(&self, g: &ColoredGraph) -> bool {
        match self {
            Property::Const(b) => *b,
            Property::Connected { empty_connected } => is_connected(g, *empty_connected),
            Property::Bipartite => is_bipartite(g),
            Property::Empty => g.is_empty(),
            Property::ConnOfOrder { orders, empty_connected } => {
                orders.contains(g.n()) && is_connected(g, *empty_connected)
            }
            Property::Combine { formula, props } => {
                let verdicts: Vec<bool> = props.iter().map(|p| p.eval(g)).collect();
                formula.eval(&verdicts)
            }
        }
    }
}

/// `b(props[0](G), ..., props[m-1](G))`.
pub fn combine(formula: BoolFormula, props: Vec<Property>) -> Result<Property> {
    if formula.slot_count() != props.len() {
        return Err(Error::Invalid(format!(
            "formula uses {} slots but {} properties were given",
            formula.slot_count(),
            props.len()
        )));
    }
    Ok(Property::Combine { formula, props })
}

impl PropertyOracle for Property {
    fn holds(&self, g: &ColoredGraph) -> bool {
        self.eval(g)
    }

    fn name(&self) -> String {
        self.to_string()
    }
}

fn write_formula(f: &mut fmt::Formatter<'_>, b: &BoolFormula, props: &[Property]) -> fmt::Result {
    let list = |f: &mut fmt::Formatter<'_>, head: &str, fs: &[BoolFormula]| -> fmt::Result {
        write!(f, "{head}(")?;
        for (i, x) in fs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write_formula(f, x, props)?;
        }
        f.write_str(")")
    };
    match b {
        BoolFormula::Const(v) => write!(f, "{v}"),
        BoolFormula::Slot(i) => write!(f, "{}", props[*i]),
        BoolFormula::Not(x) => {
            f.write_str("not(")?;
            write_formula(f, x, props)?;
            f.write_str(")")
        }
        BoolFormula::And(fs) => list(f, "and", fs),
        BoolFormula::Or(fs) => list(f, "or", fs),
    }
}

/// The command-line syntax; the empty-graph convention is not shown.
impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::Const(b) => write!(f, "{b}"),
            Property::Connected { .. } => f.write_str("connected"),
            Property::Bipartite => f.write_str("bipartite"),
            Property::Empty => f.write_str("empty"),
            Property::ConnOfOrder { orders, .. } => write!(f, "conn_of_order:{orders}"),
            Property::Combine { formula, props } => write_formula(f, formula, props),
        }
    }
}

/// Named closure as an oracle.
pub struct FnOracle<F> {
    name: String,
    f: F,
}

impl<F: Fn(&ColoredGraph) -> bool + Send + Sync> FnOracle<F> {
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self { name: name.into(), f }
    }
}

impl<F: Fn(&ColoredGraph) -> bool + Send + Sync> PropertyOracle for FnOracle<F> {
    fn holds(&self, g: &ColoredGraph) -> bool {
        (self.f)(g)
    }

    fn name(&self) -> String {
        self.name.clone()
    }
}

/// Read-through cache keyed by canonical form. Graphs beyond the canonical
/// bound bypass the cache.
pub struct Memo<P> {
    inner: P,
    cache: RwLock<HashMap<CanonicalForm, bool>>,
}

impl<P: PropertyOracle> Memo<P> {
    pub fn new(inner: P) -> Self {
        Self {
            inner,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn cached(&self) -> usize {
        self.cache.read().map(|c| c.len()).unwrap_or(0)
    }
}

impl<P: PropertyOracle> PropertyOracle for Memo<P> {
    fn holds(&self, g: &ColoredGraph) -> bool {
        let Ok(cert) = canonical_form(g) else {
            return self.inner.holds(g);
        };
        let hit = self.cache.read().ok().and_then(|c| c.get(&cert).copied());
        if let Some(v) = hit {
            return v;
        }
        let v = self.inner.holds(g);
        if let Ok(mut c) = self.cache.write() {
            c.insert(cert, v);
        }
        v
    }

    fn name(&self) -> String {
        self.inner.name()
    }
}

/// Vertex bound for [`poly_eval`].
pub const POLY_MAX_VERTICES: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct PolyValue {
    /// `coeffs[i]` counts the qualifying subsets of size `i`.
    pub coeffs: Vec<u64>,
    pub value: f64,
}

/// Definitional evaluation over all `2^n` vertex subsets. With `proper`
/// the full vertex set is left out.
pub fn poly_eval<P: PropertyOracle + ?Sized>(g: &ColoredGraph, prop: &P, x: f64, proper: bool) -> Result<PolyValue> {
    let n = g.n();
    if n > POLY_MAX_VERTICES {
        return Err(Error::SizeBound {
            what: "subset polynomial",
            size: n,
            bound: POLY_MAX_VERTICES,
        });
    }
    let mut coeffs = vec![0u64; n + 1];
    let full = (1u32 << n) - 1;
    let mut subset = Vec::with_capacity(n);
    for mask in 0..=full {
        if proper && mask == full {
            continue;
        }
        subset.clear();
        subset.extend((0..n).filter(|&v| mask >> v & 1 == 1));
        if prop.holds(&induced_subgraph(g, &subset)?) {
            coeffs[subset.len()] += 1;
        }
    }
    let value = coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64);
    Ok(PolyValue { coeffs, value })
}

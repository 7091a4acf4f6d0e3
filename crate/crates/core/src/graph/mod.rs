//! Finite simple undirected graphs with `k` disjoint, possibly empty color
//! classes, and the operations used to build them inductively.
//!
//! Vertices are `0..n` in the API. The text format is 1-based:
//!
//! ```text
//! graph n=3 k=1
//! e 1 2
//! e 2 3
//! c 1 1
//! ```

mod canon;
mod ops;

use std::fmt;

use thiserror::Error;

pub use canon::{canonical_form, canonical_form_bounded, CanonicalForm, DEFAULT_CANON_BOUND};
pub use ops::{
    add_bicolor_edges, cartesian_product, disjoint_union, fuse, induced_subgraph, join, recolor,
    substitute, tensor_product,
};

pub type Vertex = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("color count mismatch: {left} vs {right}")]
    ColorCountMismatch { left: u8, right: u8 },
    #[error("color index {index} out of range 1..={k}")]
    ColorOutOfRange { index: u8, k: u8 },
    #[error("eta needs two distinct colors, got {0} twice")]
    SameColor(u8),
    #[error("products are defined on uncolored graphs only (got k = {0})")]
    ColoredInput(u8),
    #[error("substitution template must be uncolored")]
    ColoredTemplate,
    #[error("template has {expected} vertices but {found} parts were given")]
    ArityMismatch { expected: usize, found: usize },
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("canonical form: {n} vertices exceeds the bound {bound}")]
    CanonBound { n: usize, bound: usize },
    #[error("graph text, line {line}: {message}")]
    Text { line: usize, message: String },
}

/// A colored graph. Edges are stored normalized (`u < v`), sorted and
/// duplicate-free, so derived equality is labeled-graph equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColoredGraph {
    k: u8,
    /// `colors[v] == 0` means uncolored, otherwise the 1-based color.
    colors: Vec<u8>,
    edges: Vec<(Vertex, Vertex)>,
}

impl ColoredGraph {
    /// The empty structure with `k` available colors.
    pub fn empty(k: u8) -> Self {
        Self {
            k,
            colors: Vec::new(),
            edges: Vec::new(),
        }
    }

    /// `n` isolated, uncolored vertices.
    pub fn edgeless(n: usize, k: u8) -> Self {
        Self {
            k,
            colors: vec![0; n],
            edges: Vec::new(),
        }
    }

    /// A single vertex, optionally colored.
    pub fn vertex(k: u8, color: Option<u8>) -> Result<Self, GraphError> {
        let mut g = Self::edgeless(1, k);
        if let Some(c) = color {
            g.set_color(0, Some(c))?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u as Vertex, v as Vertex));
            }
        }
        Self {
            k: 0,
            colors: vec![0; n],
            edges,
        }
    }

    pub fn path(n: usize) -> Self {
        let edges = (1..n).map(|v| ((v - 1) as Vertex, v as Vertex)).collect();
        Self {
            k: 0,
            colors: vec![0; n],
            edges,
        }
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::path(n);
        if n >= 3 {
            g.edges.push((0, (n - 1) as Vertex));
            g.edges.sort_unstable();
        }
        g
    }

    /// Builds a graph from raw parts, validating every invariant.
    pub fn from_parts(
        n: usize,
        k: u8,
        edges: impl IntoIterator<Item = (usize, usize)>,
        colors: impl IntoIterator<Item = (usize, u8)>,
    ) -> Result<Self, GraphError> {
        let mut g = Self::edgeless(n, k);
        let mut list = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            list.push(normalize(u as Vertex, v as Vertex));
        }
        list.sort_unstable();
        list.dedup();
        g.edges = list;
        for (v, c) in colors {
            if v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n });
            }
            g.set_color(v, Some(c))?;
        }
        Ok(g)
    }

    /// Internal constructor; `edges` must already be normalized.
    pub(crate) fn from_sorted_unchecked(k: u8, colors: Vec<u8>, edges: Vec<(Vertex, Vertex)>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.iter().all(|&(u, v)| u < v && (v as usize) < colors.len()));
        Self { k, colors, edges }
    }

    /// Internal constructor that sorts and deduplicates `edges`.
    pub(crate) fn from_unsorted(k: u8, colors: Vec<u8>, mut edges: Vec<(Vertex, Vertex)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        Self { k, colors, edges }
    }

    pub fn n(&self) -> usize {
        self.colors.len()
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn color(&self, v: usize) -> Option<u8> {
        match self.colors[v] {
            0 => None,
            c => Some(c),
        }
    }

    pub(crate) fn color_slice(&self) -> &[u8] {
        &self.colors
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u == v || u >= self.n() || v >= self.n() {
            return false;
        }
        self.edges
            .binary_search(&normalize(u as Vertex, v as Vertex))
            .is_ok()
    }

    pub fn is_uncolored(&self) -> bool {
        self.colors.iter().all(|&c| c == 0)
    }

    /// Vertices of color `i`, in increasing order.
    pub fn color_class(&self, i: u8) -> impl Iterator<Item = usize> + '_ {
        self.colors
            .iter()
            .enumerate()
            .filter(move |&(_, &c)| c == i)
            .map(|(v, _)| v)
    }

    pub fn set_color(&mut self, v: usize, color: Option<u8>) -> Result<(), GraphError> {
        if v >= self.n() {
            return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n() });
        }
        let c = match color {
            None => 0,
            Some(c) => {
                self.check_color(c)?;
                c
            }
        };
        self.colors[v] = c;
        Ok(())
    }

    /// Same graph, reinterpreted with `k` available colors.
    pub fn with_k(&self, k: u8) -> Result<Self, GraphError> {
        if let Some(&c) = self.colors.iter().find(|&&c| c > k) {
            return Err(GraphError::ColorOutOfRange { index: c, k });
        }
        Ok(Self {
            k,
            colors: self.colors.clone(),
            edges: self.edges.clone(),
        })
    }

    pub(crate) fn check_color(&self, i: u8) -> Result<(), GraphError> {
        if i == 0 || i > self.k {
            Err(GraphError::ColorOutOfRange { index: i, k: self.k })
        } else {
            Ok(())
        }
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n()];
        for &(u, v) in &self.edges {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        deg
    }

    /// Compressed adjacency lists: `(offsets, targets)`.
    pub fn adjacency(&self) -> (Vec<usize>, Vec<Vertex>) {
        let n = self.n();
        let mut offsets = vec![0usize; n + 1];
        for &(u, v) in &self.edges {
            offsets[u as usize + 1] += 1;
            offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0; offsets[n]];
        for &(u, v) in &self.edges {
            targets[fill[u as usize]] = v;
            fill[u as usize] += 1;
            targets[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        (offsets, targets)
    }

    /// Renders the bit-exact text format (no trailing newline).
    pub fn to_text(&self) -> String {
        let mut out = format!("graph n={} k={}", self.n(), self.k);
        for &(u, v) in &self.edges {
            out.push_str(&format!("\ne {} {}", u + 1, v + 1));
        }
        for (v, &c) in self.colors.iter().enumerate() {
            if c != 0 {
                out.push_str(&format!("\nc {} {}", v + 1, c));
            }
        }
        out
    }

    /// Parses the text format. Blank lines and surrounding whitespace are
    /// ignored; duplicate `e` lines (in either orientation) are rejected.
    pub fn parse_text(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let err = |line: usize, message: String| GraphError::Text { line, message };
        let (hline, header) = lines
            .next()
            .ok_or_else(|| err(1, "missing `graph` header".into()))?;
        let (n, k) = parse_header(header).ok_or_else(|| {
            err(hline, format!("expected `graph n=<N> k=<K>`, found `{header}`"))
        })?;
        let mut edges = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut colors = vec![0u8; n];
        for (line, l) in lines {
            let parts: Vec<&str> = l.split_whitespace().collect();
            let nums: Option<Vec<usize>> = parts[1..].iter().map(|p| p.parse().ok()).collect();
            let nums = match nums {
                Some(v) if v.len() == 2 => v,
                _ => return Err(err(line, format!("malformed line `{l}`"))),
            };
            let vertex = |x: usize| -> Result<usize, GraphError> {
                if x == 0 || x > n {
                    Err(err(line, format!("vertex {x} out of range 1..={n}")))
                } else {
                    Ok(x - 1)
                }
            };
            match parts[0] {
                "e" => {
                    let (u, v) = (vertex(nums[0])?, vertex(nums[1])?);
                    if u == v {
                        return Err(err(line, format!("self-loop at vertex {}", u + 1)));
                    }
                    let e = normalize(u as Vertex, v as Vertex);
                    if !seen.insert(e) {
                        return Err(err(line, format!("duplicate edge {} {}", u + 1, v + 1)));
                    }
                    edges.push(e);
                }
                "c" => {
                    let v = vertex(nums[0])?;
                    let c = nums[1];
                    if c == 0 || c > k as usize {
                        return Err(err(line, format!("color {c} out of range 1..={k}")));
                    }
                    if colors[v] != 0 {
                        return Err(err(line, format!("vertex {} colored twice", v + 1)));
                    }
                    colors[v] = c as u8;
                }
                other => return Err(err(line, format!("unknown directive `{other}`"))),
            }
        }
        edges.sort_unstable();
        Ok(Self { k, colors, edges })
    }
}

fn parse_header(header: &str) -> Option<(usize, u8)> {
    let mut it = header.split_whitespace();
    if it.next()? != "graph" {
        return None;
    }
    let n = it.next()?.strip_prefix("n=")?.parse().ok()?;
    let k = it.next()?.strip_prefix("k=")?.parse().ok()?;
    if it.next().is_some() {
        return None;
    }
    Some((n, k))
}

#[inline]
pub(crate) fn normalize(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl fmt::Debug for ColoredGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ColoredGraph({:?})", self.to_text())
    }
}

impl fmt::Display for ColoredGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

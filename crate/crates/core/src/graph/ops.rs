use super::{normalize, ColoredGraph, GraphError, Vertex};

fn same_k(g: &ColoredGraph, h: &ColoredGraph) -> Result<u8, GraphError> {
    if g.k != h.k {
        return Err(GraphError::ColorCountMismatch {
            left: g.k,
            right: h.k,
        });
    }
    Ok(g.k)
}

fn uncolored(g: &ColoredGraph) -> Result<(), GraphError> {
    if g.k != 0 {
        return Err(GraphError::ColoredInput(g.k));
    }
    Ok(())
}

/// `g ⊔ h`: vertices of `h` are shifted by `g.n()`.
pub fn disjoint_union(g: &ColoredGraph, h: &ColoredGraph) -> Result<ColoredGraph, GraphError> {
    let k = same_k(g, h)?;
    let shift = g.n() as Vertex;
    let mut colors = Vec::with_capacity(g.n() + h.n());
    colors.extend_from_slice(&g.colors);
    colors.extend_from_slice(&h.colors);
    let mut edges = Vec::with_capacity(g.edges.len() + h.edges.len());
    edges.extend_from_slice(&g.edges);
    edges.extend(h.edges.iter().map(|&(u, v)| (u + shift, v + shift)));
    Ok(ColoredGraph::from_sorted_unchecked(k, colors, edges))
}

/// `g ⋈ h`: disjoint union plus every edge between the two sides.
pub fn join(g: &ColoredGraph, h: &ColoredGraph) -> Result<ColoredGraph, GraphError> {
    let k = same_k(g, h)?;
    let (n1, n2) = (g.n() as Vertex, h.n() as Vertex);
    let mut colors = Vec::with_capacity(g.n() + h.n());
    colors.extend_from_slice(&g.colors);
    colors.extend_from_slice(&h.colors);
    let mut edges =
        Vec::with_capacity(g.edges.len() + h.edges.len() + g.n() * h.n());
    let mut gi = g.edges.iter().peekable();
    for u in 0..n1 {
        while let Some(&&e) = gi.peek() {
            if e.0 != u {
                break;
            }
            edges.push(e);
            gi.next();
        }
        edges.extend((0..n2).map(|v| (u, n1 + v)));
    }
    edges.extend(h.edges.iter().map(|&(u, v)| (u + n1, v + n1)));
    Ok(ColoredGraph::from_sorted_unchecked(k, colors, edges))
}

/// Tensor (categorical) product of two uncolored graphs. Vertex `(a, b)` is
/// numbered `a * h.n() + b`.
pub fn tensor_product(g: &ColoredGraph, h: &ColoredGraph) -> Result<ColoredGraph, GraphError> {
    uncolored(g)?;
    uncolored(h)?;
    let m = h.n() as Vertex;
    let mut edges = Vec::with_capacity(2 * g.edges.len() * h.edges.len());
    for &(a1, a2) in &g.edges {
        for &(b1, b2) in &h.edges {
            edges.push(normalize(a1 * m + b1, a2 * m + b2));
            edges.push(normalize(a1 * m + b2, a2 * m + b1));
        }
    }
    Ok(ColoredGraph::from_unsorted(0, vec![0; g.n() * h.n()], edges))
}

/// Cartesian product of two uncolored graphs, same vertex numbering as
/// [`tensor_product`].
pub fn cartesian_product(g: &ColoredGraph, h: &ColoredGraph) -> Result<ColoredGraph, GraphError> {
    uncolored(g)?;
    uncolored(h)?;
    let m = h.n() as Vertex;
    let mut edges = Vec::with_capacity(g.n() * h.edges.len() + h.n() * g.edges.len());
    for a in 0..g.n() as Vertex {
        edges.extend(h.edges.iter().map(|&(b1, b2)| (a * m + b1, a * m + b2)));
    }
    for &(a1, a2) in &g.edges {
        edges.extend((0..m).map(|b| (a1 * m + b, a2 * m + b)));
    }
    Ok(ColoredGraph::from_unsorted(0, vec![0; g.n() * h.n()], edges))
}

/// Contracts color class `i` to a single vertex that keeps color `i`. The
/// contracted vertex takes the place of the smallest class member; an empty
/// class leaves the graph unchanged.
pub fn fuse(g: &ColoredGraph, i: u8) -> Result<ColoredGraph, GraphError> {
    g.check_color(i)?;
    let Some(first) = g.colors.iter().position(|&c| c == i) else {
        return Ok(g.clone());
    };
    let mut map = Vec::with_capacity(g.n());
    let mut colors = Vec::with_capacity(g.n());
    for (v, &c) in g.colors.iter().enumerate() {
        if c == i && v != first {
            map.push(map[first]);
        } else {
            map.push(colors.len() as Vertex);
            colors.push(c);
        }
    }
    let edges = g
        .edges
        .iter()
        .filter_map(|&(u, v)| {
            let (a, b) = (map[u as usize], map[v as usize]);
            (a != b).then(|| normalize(a, b))
        })
        .collect();
    Ok(ColoredGraph::from_unsorted(g.k, colors, edges))
}

/// Renames color `i` to `j`; the classes merge.
pub fn recolor(g: &ColoredGraph, i: u8, j: u8) -> Result<ColoredGraph, GraphError> {
    g.check_color(i)?;
    g.check_color(j)?;
    let mut out = g.clone();
    for c in out.colors.iter_mut() {
        if *c == i {
            *c = j;
        }
    }
    Ok(out)
}

/// `η_{i,j}`: adds every edge between color classes `i` and `j`.
pub fn add_bicolor_edges(g: &ColoredGraph, i: u8, j: u8) -> Result<ColoredGraph, GraphError> {
    g.check_color(i)?;
    g.check_color(j)?;
    if i == j {
        return Err(GraphError::SameColor(i));
    }
    let ci: Vec<Vertex> = g.color_class(i).map(|v| v as Vertex).collect();
    let cj: Vec<Vertex> = g.color_class(j).map(|v| v as Vertex).collect();
    if ci.is_empty() || cj.is_empty() {
        return Ok(g.clone());
    }
    let mut edges = Vec::with_capacity(g.edges.len() + ci.len() * cj.len());
    edges.extend_from_slice(&g.edges);
    for &u in &ci {
        edges.extend(cj.iter().map(|&v| normalize(u, v)));
    }
    Ok(ColoredGraph::from_unsorted(g.k, g.colors.clone(), edges))
}

/// Modular substitution `H[G_1, ..., G_r]`: the parts are laid out in order
/// as disjoint copies, and parts `a` and `b` are completely joined whenever
/// template vertices `a` and `b` are adjacent.
pub fn substitute(template: &ColoredGraph, parts: &[&ColoredGraph]) -> Result<ColoredGraph, GraphError> {
    if !template.is_uncolored() {
        return Err(GraphError::ColoredTemplate);
    }
    if parts.len() != template.n() {
        return Err(GraphError::ArityMismatch {
            expected: template.n(),
            found: parts.len(),
        });
    }
    let Some(first) = parts.first() else {
        return Ok(ColoredGraph::empty(template.k));
    };
    let k = first.k;
    let mut offsets = Vec::with_capacity(parts.len() + 1);
    offsets.push(0 as Vertex);
    let mut colors = Vec::new();
    let mut edges = Vec::new();
    for p in parts {
        same_k(first, p)?;
        let off = *offsets.last().unwrap();
        colors.extend_from_slice(&p.colors);
        edges.extend(p.edges.iter().map(|&(u, v)| (u + off, v + off)));
        offsets.push(off + p.n() as Vertex);
    }
    for &(a, b) in &template.edges {
        let (a, b) = (a as usize, b as usize);
        for u in offsets[a]..offsets[a + 1] {
            edges.extend((offsets[b]..offsets[b + 1]).map(|v| normalize(u, v)));
        }
    }
    Ok(ColoredGraph::from_unsorted(k, colors, edges))
}

/// `G[S]`, with the vertices of `S` relabelled `0..|S|` in increasing order.
pub fn induced_subgraph(g: &ColoredGraph, s: &[usize]) -> Result<ColoredGraph, GraphError> {
    let mut keep = vec![Vertex::MAX; g.n()];
    let mut sorted = s.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for (new, &v) in sorted.iter().enumerate() {
        if v >= g.n() {
            return Err(GraphError::VertexOutOfRange { vertex: v, n: g.n() });
        }
        keep[v] = new as Vertex;
    }
    let colors = sorted.iter().map(|&v| g.colors[v]).collect();
    let edges = g
        .edges
        .iter()
        .filter_map(|&(u, v)| {
            let (a, b) = (keep[u as usize], keep[v as usize]);
            (a != Vertex::MAX && b != Vertex::MAX).then_some((a, b))
        })
        .collect();
    Ok(ColoredGraph::from_sorted_unchecked(g.k, colors, edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::canonical_form;

    fn k1() -> ColoredGraph {
        ColoredGraph::edgeless(1, 0)
    }

    fn iso(a: &ColoredGraph, b: &ColoredGraph) -> bool {
        canonical_form(a).unwrap() == canonical_form(b).unwrap()
    }

    #[test]
    fn union_examples() {
        let g = ColoredGraph::path(3);
        assert_eq!(disjoint_union(&ColoredGraph::empty(0), &g).unwrap(), g);
        let two = disjoint_union(&k1(), &k1()).unwrap();
        assert_eq!((two.n(), two.edge_count()), (2, 0));
        let u = disjoint_union(&ColoredGraph::path(2), &ColoredGraph::path(3)).unwrap();
        assert_eq!((u.n(), u.edge_count()), (5, 3));
        assert!(disjoint_union(&ColoredGraph::empty(1), &ColoredGraph::empty(0)).is_err());
    }

    #[test]
    fn join_examples() {
        let g = ColoredGraph::path(3);
        assert_eq!(join(&ColoredGraph::empty(0), &g).unwrap(), g);
        assert_eq!(join(&k1(), &k1()).unwrap(), ColoredGraph::complete(2));
        let k2 = ColoredGraph::complete(2);
        assert_eq!(join(&k2, &k2).unwrap(), ColoredGraph::complete(4));
        let j = join(&ColoredGraph::path(3), &ColoredGraph::cycle(4)).unwrap();
        assert_eq!(j.edge_count(), 2 + 4 + 12);
    }

    #[test]
    fn products_examples() {
        let g = ColoredGraph::cycle(5);
        assert!(tensor_product(&ColoredGraph::empty(0), &g).unwrap().is_empty());
        let t = tensor_product(&k1(), &g).unwrap();
        assert_eq!((t.n(), t.edge_count()), (5, 0));
        let k2 = ColoredGraph::complete(2);
        // (0,0)-(1,1) and (0,1)-(1,0)
        let t = tensor_product(&k2, &k2).unwrap();
        assert_eq!(t.edges(), &[(0, 3), (1, 2)]);
        assert!(cartesian_product(&ColoredGraph::empty(0), &g).unwrap().is_empty());
        assert!(iso(&cartesian_product(&k1(), &g).unwrap(), &g));
        assert!(iso(&cartesian_product(&k2, &k2).unwrap(), &ColoredGraph::cycle(4)));
        let colored = ColoredGraph::vertex(1, Some(1)).unwrap();
        assert!(tensor_product(&colored, &colored).is_err());
        assert!(cartesian_product(&colored, &colored).is_err());
    }

    #[test]
    fn fuse_examples() {
        let two = ColoredGraph::from_parts(2, 1, [], [(0, 1), (1, 1)]).unwrap();
        assert_eq!(fuse(&two, 1).unwrap(), ColoredGraph::vertex(1, Some(1)).unwrap());
        // a(1) - b - c(1)
        let p = ColoredGraph::from_parts(3, 1, [(0, 1), (1, 2)], [(0, 1), (2, 1)]).unwrap();
        let f = fuse(&p, 1).unwrap();
        assert_eq!(f.n(), 2);
        assert_eq!(f.edges(), &[(0, 1)]);
        assert_eq!(f.color(0), Some(1));
        let plain = ColoredGraph::path(3).with_k(1).unwrap();
        assert_eq!(fuse(&plain, 1).unwrap(), plain);
        assert!(fuse(&plain, 2).is_err());
    }

    #[test]
    fn fuse_drops_intra_class_edges() {
        let g = ColoredGraph::from_parts(3, 1, [(0, 1), (1, 2)], [(0, 1), (1, 1)]).unwrap();
        let f = fuse(&g, 1).unwrap();
        assert_eq!(f.n(), 2);
        assert_eq!(f.edges(), &[(0, 1)]);
    }

    #[test]
    fn recolor_examples() {
        let g = ColoredGraph::from_parts(2, 2, [], [(0, 1), (1, 2)]).unwrap();
        assert_eq!(recolor(&g, 1, 1).unwrap(), g);
        let r = recolor(&g, 1, 2).unwrap();
        assert_eq!((r.color(0), r.color(1)), (Some(2), Some(2)));
        assert!(recolor(&g, 3, 1).is_err());
    }

    #[test]
    fn eta_examples() {
        let g = ColoredGraph::from_parts(2, 2, [], [(0, 1), (1, 2)]).unwrap();
        let e = add_bicolor_edges(&g, 1, 2).unwrap();
        assert_eq!(e.edges(), &[(0, 1)]);
        assert_eq!(add_bicolor_edges(&e, 1, 2).unwrap(), e);
        let lone = ColoredGraph::from_parts(2, 2, [], [(0, 1), (1, 1)]).unwrap();
        assert_eq!(add_bicolor_edges(&lone, 1, 2).unwrap(), lone);
        assert_eq!(add_bicolor_edges(&g, 1, 1), Err(GraphError::SameColor(1)));
    }

    #[test]
    fn substitute_examples() {
        let a = ColoredGraph::path(3);
        let b = ColoredGraph::cycle(4);
        let edgeless = ColoredGraph::edgeless(2, 0);
        assert_eq!(substitute(&edgeless, &[&a, &b]).unwrap(), disjoint_union(&a, &b).unwrap());
        let k2 = ColoredGraph::complete(2);
        assert_eq!(substitute(&k2, &[&a, &b]).unwrap(), join(&a, &b).unwrap());
        assert_eq!(substitute(&k1(), &[&a]).unwrap(), a);
        assert!(substitute(&k2, &[&a]).is_err());
    }

    #[test]
    fn induced_examples() {
        let g = ColoredGraph::cycle(5);
        assert_eq!(induced_subgraph(&g, &[0, 1, 2, 3, 4]).unwrap(), g);
        assert!(induced_subgraph(&g, &[]).unwrap().is_empty());
        let k3 = ColoredGraph::complete(3);
        assert_eq!(induced_subgraph(&k3, &[0, 2]).unwrap(), ColoredGraph::complete(2));
        assert!(induced_subgraph(&k3, &[5]).is_err());
    }
}

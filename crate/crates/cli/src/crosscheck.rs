//! Direct recomputation of Hankel entries for the four graph products,
//! from adjacency sets and breadth-first search, sharing no code with the
//! library's graph operations or bit matrices.

use std::collections::VecDeque;

use hc_core::ColoredGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Product {
    Union,
    Join,
    Tensor,
    Cartesian,
}

impl Product {
    pub const ALL: [Product; 4] = [Product::Union, Product::Join, Product::Tensor, Product::Cartesian];

    pub fn name(self) -> &'static str {
        match self {
            Product::Union => "union",
            Product::Join => "join",
            Product::Tensor => "tensor",
            Product::Cartesian => "cartesian",
        }
    }
}

fn adjacency(g: &ColoredGraph) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut adj = vec![vec![false; n]; n];
    for &(u, v) in g.edges() {
        adj[u as usize][v as usize] = true;
        adj[v as usize][u as usize] = true;
    }
    adj
}

/// Adjacency matrix of the product, vertices `(i, j)` numbered `i * nb + j`
/// for the products and `a` then `b` for union and join.
pub fn product_adjacency(p: Product, a: &ColoredGraph, b: &ColoredGraph) -> Vec<Vec<bool>> {
    let (x, y) = (adjacency(a), adjacency(b));
    let (na, nb) = (a.n(), b.n());
    match p {
        Product::Union | Product::Join => {
            let n = na + nb;
            let mut m = vec![vec![false; n]; n];
            for u in 0..n {
                for v in 0..n {
                    m[u][v] = match (u < na, v < na) {
                        (true, true) => x[u][v],
                        (false, false) => y[u - na][v - na],
                        _ => p == Product::Join,
                    };
                }
            }
            m
        }
        Product::Tensor | Product::Cartesian => {
            let n = na * nb;
            let mut m = vec![vec![false; n]; n];
            for u in 0..n {
                for v in 0..n {
                    let (i, j, k, l) = (u / nb, u % nb, v / nb, v % nb);
                    m[u][v] = if p == Product::Tensor {
                        x[i][k] && y[j][l]
                    } else {
                        (i == k && y[j][l]) || (j == l && x[i][k])
                    };
                }
            }
            m
        }
    }
}

pub fn connected(adj: &[Vec<bool>], empty_connected: bool) -> bool {
    let n = adj.len();
    if n == 0 {
        return empty_connected;
    }
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            if adj[u][v] && !seen[v] {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == n
}

/// Rank over GF(2) of a boolean matrix.
pub fn rank(rows: &[Vec<bool>]) -> usize {
    let mut m: Vec<Vec<bool>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c]) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && m[i][c] {
                for j in c..cols {
                    let bit = m[r][j];
                    m[i][j] ^= bit;
                }
            }
        }
        r += 1;
    }
    r
}

/// `entry(A_i, A_j)` for every pair.
pub fn matrix(pool: &[&ColoredGraph], entry: impl Fn(&ColoredGraph, &ColoredGraph) -> bool) -> Vec<Vec<bool>> {
    pool.iter().map(|a| pool.iter().map(|b| entry(a, b)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_products() {
        let k2 = ColoredGraph::complete(2);
        let k1 = ColoredGraph::edgeless(1, 0);
        // K2 x_t K2 is two disjoint edges
        assert!(!connected(&product_adjacency(Product::Tensor, &k2, &k2), true));
        assert!(connected(&product_adjacency(Product::Cartesian, &k2, &k2), true));
        assert!(connected(&product_adjacency(Product::Join, &k1, &k1), true));
        assert!(!connected(&product_adjacency(Product::Union, &k1, &k1), true));
        assert!(!connected(&[], false));
    }

    #[test]
    fn rank_examples() {
        let m = |rows: &[&[u8]]| -> Vec<Vec<bool>> { rows.iter().map(|r| r.iter().map(|&b| b == 1).collect()).collect() };
        assert_eq!(rank(&m(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]])), 2);
        assert_eq!(rank(&m(&[&[1, 0], &[0, 1]])), 2);
    }
}

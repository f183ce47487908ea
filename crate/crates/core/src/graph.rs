use crate::error::{invalid, Result};
use crate::matrix::OrderedMatrix;

/// Simple graph on vertices 0..n, ordered numerically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedGraph {
    n: usize,
    adj: Vec<bool>,
}

impl OrderedGraph {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return invalid("graph needs at least one vertex");
        }
        Ok(OrderedGraph {
            n,
            adj: vec![false; n * n],
        })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::new(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn from_fn(n: usize, mut adjacent: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut g = Self::new(n)?;
        for u in 0..n {
            for v in u + 1..n {
                if adjacent(u, v) {
                    g.set(u, v, true);
                }
            }
        }
        Ok(g)
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u == v || u >= self.n || v >= self.n {
            return invalid(format!("bad edge ({u},{v})"));
        }
        self.set(u, v, true);
        Ok(())
    }

    fn set(&mut self, u: usize, v: usize, on: bool) {
        self.adj[u * self.n + v] = on;
        self.adj[v * self.n + u] = on;
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v]
    }

    /// Edges as pairs (u,v) with u < v, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn n_edges(&self) -> usize {
        self.edges().len()
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.has_edge(u, v))
    }

    pub fn complement(&self) -> Self {
        Self::from_fn(self.n, |u, v| !self.has_edge(u, v)).expect("n > 0")
    }

    /// Induced subgraph on a strictly increasing vertex list.
    pub fn induced(&self, vertices: &[usize]) -> Result<Self> {
        if vertices.windows(2).any(|w| w[0] >= w[1]) || vertices.iter().any(|&v| v >= self.n) {
            return invalid("vertex list must be strictly increasing and in range");
        }
        Self::from_fn(vertices.len(), |i, j| self.has_edge(vertices[i], vertices[j]))
    }

    /// Symmetric 0/1 adjacency matrix with a zero diagonal.
    pub fn adjacency_matrix(&self) -> OrderedMatrix {
        OrderedMatrix::binary_from_fn(self.n, self.n, |u, v| self.has_edge(u, v))
    }

    /// Bitmask of the upper triangle; a compact key for small graphs.
    pub fn key(&self) -> Vec<u64> {
        let mut words = Vec::new();
        let mut bit = 0usize;
        for u in 0..self.n {
            for v in u + 1..self.n {
                if bit % 64 == 0 {
                    words.push(0);
                }
                if self.has_edge(u, v) {
                    *words.last_mut().unwrap() |= 1 << (bit % 64);
                }
                bit += 1;
            }
        }
        words
    }
}

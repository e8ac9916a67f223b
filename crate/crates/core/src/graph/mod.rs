//! Finite simple graphs and the graph operations used to build examples.

mod generators;

pub use generators::GeneratorSpec;

use std::collections::VecDeque;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::vertex_set::VertexSet;

/// Simple undirected graph on vertices `0..n` (printed as `1..=n`).
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<bool>,
    labels: Option<Vec<String>>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges_one_based())
            .finish()
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: vec![false; n * n],
            labels: None,
        }
    }

    /// Builds a graph from 0-based edges. Loops and out-of-range endpoints are rejected;
    /// repeated edges are merged.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph needs at least one vertex".into()));
        }
        let mut g = Graph::empty(n);
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::VertexOutOfRange {
                    vertex: a.max(b) + 1,
                    n,
                });
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("loop at vertex {}", a + 1)));
            }
            g.add_edge(a, b);
        }
        Ok(g)
    }

    fn add_edge(&mut self, a: usize, b: usize) {
        self.adj[a * self.n + b] = true;
        self.adj[b * self.n + a] = true;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::UniverseMismatch {
                expected: self.n,
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a * self.n + b]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.has_edge(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn edges_one_based(&self) -> Vec<(usize, usize)> {
        self.edges().into_iter().map(|(a, b)| (a + 1, b + 1)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&e| e).count() / 2
    }

    pub fn degree(&self, a: usize) -> usize {
        (0..self.n).filter(|&b| self.has_edge(a, b)).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|a| self.degree(a)).collect()
    }

    pub fn neighbours(&self, a: usize) -> VertexSet {
        VertexSet::from_indices(self.n, (0..self.n).filter(|&b| self.has_edge(a, b)))
    }

    /// Common degree if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.degree(0);
        (1..self.n).all(|a| self.degree(a) == d).then_some(d)
    }

    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |a, b| if self.has_edge(a, b) { 1.0 } else { 0.0 })
    }

    /// BFS distances from `source`; `None` for unreachable vertices.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(a) = queue.pop_front() {
            let d = dist[a].unwrap();
            for b in 0..self.n {
                if self.has_edge(a, b) && dist[b].is_none() {
                    dist[b] = Some(d + 1);
                    queue.push_back(b);
                }
            }
        }
        dist
    }

    pub fn distance_matrix(&self) -> Vec<Vec<Option<usize>>> {
        (0..self.n).map(|a| self.distances_from(a)).collect()
    }

    pub fn is_connected(&self) -> bool {
        self.distances_from(0).iter().all(Option::is_some)
    }

    /// Stable fingerprint of the labelled edge set (hex SHA-256).
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("n {}\n", self.n));
        for (a, b) in self.edges_one_based() {
            h.update(format!("{a} {b}\n"));
        }
        hex::encode(h.finalize())
    }

    /// Cartesian product with row-major vertex order: `(a, b)` is vertex `a * |Y| + b`.
    pub fn cartesian_product(&self, other: &Graph) -> Graph {
        let (m, k) = (self.n, other.n);
        let mut g = Graph::empty(m * k);
        for a in 0..m {
            for b in 0..k {
                for b2 in b + 1..k {
                    if other.has_edge(b, b2) {
                        g.add_edge(a * k + b, a * k + b2);
                    }
                }
                for a2 in a + 1..m {
                    if self.has_edge(a, a2) {
                        g.add_edge(a * k + b, a2 * k + b);
                    }
                }
            }
        }
        g
    }

    /// Join: disjoint union (vertices of `self` first) plus every cross edge.
    pub fn join(&self, other: &Graph) -> Graph {
        let (m1, m2) = (self.n, other.n);
        let mut g = Graph::empty(m1 + m2);
        for (a, b) in self.edges() {
            g.add_edge(a, b);
        }
        for (a, b) in other.edges() {
            g.add_edge(m1 + a, m1 + b);
        }
        for a in 0..m1 {
            for b in 0..m2 {
                g.add_edge(a, m1 + b);
            }
        }
        g
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::empty(self.n);
        for a in 0..self.n {
            for b in a + 1..self.n {
                if !self.has_edge(a, b) {
                    g.add_edge(a, b);
                }
            }
        }
        g.labels = self.labels.clone();
        g
    }

    /// Two-colouring with vertex 1 in the first part, or `None` if an odd cycle exists.
    pub fn bipartition(&self) -> Result<Option<(VertexSet, VertexSet)>> {
        if !self.is_connected() {
            return Err(Error::Disconnected("bipartition is ambiguous for disconnected graphs"));
        }
        let mut colour = vec![None; self.n];
        colour[0] = Some(false);
        let mut queue = VecDeque::from([0]);
        while let Some(a) = queue.pop_front() {
            let c = colour[a].unwrap();
            for b in 0..self.n {
                if !self.has_edge(a, b) {
                    continue;
                }
                match colour[b] {
                    None => {
                        colour[b] = Some(!c);
                        queue.push_back(b);
                    }
                    Some(cb) if cb == c => return Ok(None),
                    Some(_) => {}
                }
            }
        }
        let v0 = VertexSet::from_indices(self.n, (0..self.n).filter(|&a| colour[a] == Some(false)));
        let v1 = v0.complement();
        Ok(Some((v0, v1)))
    }

    /// Strongly regular parameters, if common-neighbour counts are constant on
    /// equal / adjacent / non-adjacent pairs. Complete and edgeless graphs have an
    /// empty pair class and are reported as not strongly regular.
    pub fn recognize_srg(&self) -> Option<SrgParams> {
        let kappa = self.regular_degree()?;
        let n = self.n;
        let mut lambda = None;
        let mut mu = None;
        for a in 0..n {
            for b in a + 1..n {
                let common = (0..n).filter(|&c| self.has_edge(a, c) && self.has_edge(b, c)).count();
                let slot = if self.has_edge(a, b) { &mut lambda } else { &mut mu };
                match *slot {
                    None => *slot = Some(common),
                    Some(x) if x != common => return None,
                    Some(_) => {}
                }
            }
        }
        Some(SrgParams {
            nu: n,
            kappa,
            lambda: lambda?,
            mu: mu?,
        })
    }
}

/// Parameters `(ν, κ, λ, μ)` of a strongly regular graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrgParams {
    pub nu: usize,
    pub kappa: usize,
    pub lambda: usize,
    pub mu: usize,
}

impl SrgParams {
    pub fn new(nu: usize, kappa: usize, lambda: usize, mu: usize) -> Self {
        SrgParams { nu, kappa, lambda, mu }
    }

    /// κ(κ − λ − 1) = (ν − κ − 1)μ.
    pub fn is_feasible(&self) -> bool {
        let (nu, k, l, m) = (self.nu as i64, self.kappa as i64, self.lambda as i64, self.mu as i64);
        k < nu && k * (k - l - 1) == (nu - k - 1) * m
    }

    /// Discriminant Δ = (μ − λ)² + 4(κ − μ).
    pub fn discriminant(&self) -> f64 {
        let d = self.mu as f64 - self.lambda as f64;
        d * d + 4.0 * (self.kappa as f64 - self.mu as f64)
    }

    /// Restricted eigenvalues (θ₁, θ₂).
    pub fn restricted_eigenvalues(&self) -> (f64, f64) {
        let s = self.discriminant().sqrt();
        let base = self.lambda as f64 - self.mu as f64;
        (0.5 * (base + s), 0.5 * (base - s))
    }

    /// Multiplicities (f, g) of θ₁ and θ₂.
    pub fn multiplicities(&self) -> (f64, f64) {
        let nu1 = self.nu as f64 - 1.0;
        let s = self.discriminant().sqrt();
        let skew = (nu1 * (self.mu as f64 - self.lambda as f64) - 2.0 * self.kappa as f64) / s;
        (0.5 * (nu1 + skew), 0.5 * (nu1 - skew))
    }

    /// Conference parameters `(4m+1, 2m, m−1, m)`.
    pub fn is_conference(&self) -> bool {
        self.nu % 4 == 1
            && self.kappa * 2 == self.nu - 1
            && self.mu * 2 == self.kappa
            && self.lambda + 1 == self.mu
    }
}

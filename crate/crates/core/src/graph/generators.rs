use std::fmt;

use super::Graph;
use crate::error::{Error, Result};

/// A named graph family with its parameters, or a composite built from other specs.
///
/// `Display` prints the generator DSL accepted by [`crate::io::dsl::parse_graph_dsl`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorSpec {
    Path(usize),
    Cycle(usize),
    Complete(usize),
    CompleteBipartite(usize, usize),
    CompleteMultipartite { parts: usize, size: usize },
    Hypercube(usize),
    DoubleStar(usize),
    McKay,
    Paley(usize),
    Petersen,
    /// Explicit edge list with 1-based endpoints.
    EdgeList { n: usize, edges: Vec<(usize, usize)> },
    Product(Box<GeneratorSpec>, Box<GeneratorSpec>),
    Join(Box<GeneratorSpec>, Box<GeneratorSpec>),
    Complement(Box<GeneratorSpec>),
}

pub(crate) fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<Graph> {
        use GeneratorSpec::*;
        match *self {
            Path(n) => {
                if n == 0 {
                    return Err(Error::param("path", "need at least 1 vertex"));
                }
                let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
                Graph::from_edges(n, &edges)
            }
            Cycle(n) => {
                if n < 3 {
                    return Err(Error::param("cycle", format!("need n >= 3, got {n}")));
                }
                let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
                Graph::from_edges(n, &edges)
            }
            Complete(n) => {
                if n == 0 {
                    return Err(Error::param("complete", "need at least 1 vertex"));
                }
                let edges: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
                Graph::from_edges(n, &edges)
            }
            CompleteBipartite(a, b) => {
                if a == 0 || b == 0 {
                    return Err(Error::param("cbip", "both parts must be nonempty"));
                }
                let edges: Vec<_> = (0..a).flat_map(|x| (a..a + b).map(move |y| (x, y))).collect();
                Graph::from_edges(a + b, &edges)
            }
            CompleteMultipartite { parts, size } => {
                if parts == 0 || size == 0 {
                    return Err(Error::param("cmulti", "need at least one part of positive size"));
                }
                let n = parts * size;
                let edges: Vec<_> = (0..n)
                    .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                    .filter(|&(a, b)| a / size != b / size)
                    .collect();
                Graph::from_edges(n, &edges)
            }
            Hypercube(d) => {
                if d == 0 || d > 20 {
                    return Err(Error::param("hypercube", format!("dimension must be in 1..=20, got {d}")));
                }
                let n = 1usize << d;
                let edges: Vec<_> = (0..n)
                    .flat_map(|v| (0..d).map(move |i| (v, v ^ (1 << i))))
                    .filter(|&(a, b)| a < b)
                    .collect();
                Graph::from_edges(n, &edges)
            }
            DoubleStar(k) => {
                if k == 0 {
                    return Err(Error::param("doublestar", "need k >= 1"));
                }
                // Centres 1 and 2; 1 carries leaves 3..=k+2, 2 carries k+3..=2k+2.
                let n = 2 * k + 2;
                let mut edges = vec![(0, 1)];
                edges.extend((2..k + 2).map(|a| (0, a)));
                edges.extend((k + 2..n).map(|a| (1, a)));
                Graph::from_edges(n, &edges)
            }
            McKay => {
                let edges = [(1, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (6, 8), (7, 8)];
                let edges: Vec<_> = edges.iter().map(|&(a, b)| (a - 1, b - 1)).collect();
                Graph::from_edges(8, &edges)
            }
            Paley(p) => {
                if !is_prime(p) || p % 4 != 1 {
                    return Err(Error::param("paley", format!("order must be a prime = 1 mod 4, got {p}")));
                }
                let mut residue = vec![false; p];
                for x in 1..p {
                    residue[x * x % p] = true;
                }
                let edges: Vec<_> = (0..p)
                    .flat_map(|a| (a + 1..p).map(move |b| (a, b)))
                    .filter(|&(a, b)| residue[b - a])
                    .collect();
                Graph::from_edges(p, &edges)
            }
            Petersen => {
                let mut edges = Vec::new();
                for i in 0..5 {
                    edges.push((i, (i + 1) % 5));
                    edges.push((5 + i, 5 + (i + 2) % 5));
                    edges.push((i, 5 + i));
                }
                Graph::from_edges(10, &edges)
            }
            EdgeList { n, ref edges } => {
                let mut zero_based = Vec::with_capacity(edges.len());
                for &(a, b) in edges {
                    if a == 0 || b == 0 || a > n || b > n {
                        let vertex = if a == 0 || a > n { a } else { b };
                        return Err(Error::VertexOutOfRange { vertex, n });
                    }
                    zero_based.push((a - 1, b - 1));
                }
                Graph::from_edges(n, &zero_based)
            }
            Product(ref x, ref y) => Ok(x.build()?.cartesian_product(&y.build()?)),
            Join(ref x, ref y) => Ok(x.build()?.join(&y.build()?)),
            Complement(ref x) => Ok(x.build()?.complement()),
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use GeneratorSpec::*;
        match self {
            Path(n) => write!(f, "path:{n}"),
            Cycle(n) => write!(f, "cycle:{n}"),
            Complete(n) => write!(f, "complete:{n}"),
            CompleteBipartite(a, b) => write!(f, "cbip:{a},{b}"),
            CompleteMultipartite { parts, size } => write!(f, "cmulti:{parts}x{size}"),
            Hypercube(d) => write!(f, "hypercube:{d}"),
            DoubleStar(k) => write!(f, "doublestar:{k}"),
            McKay => write!(f, "mckay"),
            Paley(p) => write!(f, "paley:{p}"),
            Petersen => write!(f, "petersen"),
            EdgeList { n, edges } => {
                write!(f, "edges:{n}:")?;
                for (i, (a, b)) in edges.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}-{b}")?;
                }
                Ok(())
            }
            Product(x, y) => write!(f, "product({x},{y})"),
            Join(x, y) => write!(f, "join({x},{y})"),
            Complement(x) => write!(f, "complement({x})"),
        }
    }
}

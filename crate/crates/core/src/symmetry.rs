//! Permutation groups acting on vertices, and the checks relating automorphisms to GST.

use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{GeneratorSpec, Graph};
use crate::gst::has_gst_from;
use crate::spectral::{transition, Spectrum};
use crate::vertex_set::VertexSet;

pub const DEFAULT_GROUP_CAP: usize = 100_000;

/// A bijection on `0..n`, stored as its image array.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::Precondition(format!("{images:?} is not a permutation of 0..{n}")));
            }
        }
        Ok(Permutation { images })
    }

    /// From a 1-based image array such as `[2,3,4,1]`.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::Precondition("permutation images are 1-based".into()));
        }
        Self::new(images.iter().map(|&x| x - 1).collect())
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, v: usize) -> usize {
        self.images[v]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `(self ∘ other)(v) = self(other(v))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation { images: other.images.iter().map(|&v| self.images[v]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (v, &w) in self.images.iter().enumerate() {
            inv[w] = v;
        }
        Permutation { images: inv }
    }

    pub fn apply_set(&self, s: &VertexSet) -> VertexSet {
        s.map(&self.images)
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(v, &w)| v == w)
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.images.iter().map(|v| v + 1).collect::<Vec<_>>().serialize(serializer)
    }
}

pub fn is_automorphism(graph: &Graph, p: &Permutation) -> Result<bool> {
    if p.n() != graph.n() {
        return Err(Error::UniverseMismatch { expected: graph.n(), found: p.n() });
    }
    let n = graph.n();
    Ok((0..n).all(|a| (a + 1..n).all(|b| graph.has_edge(a, b) == graph.has_edge(p.apply(a), p.apply(b)))))
}

#[derive(Clone, Debug)]
pub struct PermGroup {
    pub generators: Vec<Permutation>,
    pub elements: Vec<Permutation>,
}

impl PermGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn n(&self) -> usize {
        self.elements[0].n()
    }
}

/// Breadth-first closure of `gens` under composition, starting from the identity.
pub fn group_closure(n: usize, gens: &[Permutation], cap: usize) -> Result<PermGroup> {
    if cap == 0 {
        return Err(Error::Precondition("group cap must be at least 1".into()));
    }
    if let Some(g) = gens.iter().find(|g| g.n() != n) {
        return Err(Error::UniverseMismatch { expected: n, found: g.n() });
    }
    let id = Permutation::identity(n);
    let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
    let mut elements = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.compose(&x);
            if seen.insert(y.clone()) {
                if elements.len() >= cap {
                    return Err(Error::GroupOverflow { cap, reached: elements.len() + 1 });
                }
                elements.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(PermGroup { generators: gens.to_vec(), elements })
}

/// Distinct images `S^η`, in order of first appearance.
pub fn orbit_of_set(s: &VertexSet, g: &PermGroup) -> Vec<VertexSet> {
    let mut seen = HashSet::new();
    g.elements.iter().map(|p| p.apply_set(s)).filter(|img| seen.insert(img.clone())).collect()
}

pub fn setwise_stabilizer(s: &VertexSet, g: &PermGroup) -> PermGroup {
    let elements: Vec<Permutation> = g.elements.iter().filter(|p| &p.apply_set(s) == s).cloned().collect();
    PermGroup { generators: elements.clone(), elements }
}

fn is_subgroup_of(h: &PermGroup, k: &PermGroup) -> bool {
    let ks: HashSet<&Permutation> = k.elements.iter().collect();
    h.elements.iter().all(|p| ks.contains(p))
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    pub group_order: usize,
    /// (a) `(S^σ, T^σ)`-GST for every `σ` in the group.
    pub images_hold: bool,
    pub worst_image_residual: f64,
    /// (b) `T′ = ∩ T^η` over `η ∈ Stab(S)`, and whether `(S, T′)`-GST holds.
    pub intersected_target: VertexSet,
    pub intersected_holds: bool,
    /// (c) when `|S| = |T|`: `Stab(S) = Stab(T)`.
    pub stabilizers_equal: Option<bool>,
    pub stab_source: usize,
    pub stab_target: usize,
    /// `Stab(S) ≤ Stab(I(S,t))` and `Stab(S) ≤ Stab(F(S,t))`.
    pub stab_in_inverse: bool,
    pub stab_in_forward: bool,
    pub orbit_source: usize,
    pub orbit_inverse: usize,
    pub orbit_forward: usize,
    /// `F(S^σ,t) = F(S,t)^σ` for every `σ`.
    pub forward_equivariant: bool,
}

impl SymmetryReport {
    pub fn all_hold(&self) -> bool {
        self.images_hold
            && self.intersected_holds
            && self.stabilizers_equal.unwrap_or(true)
            && self.stab_in_inverse
            && self.stab_in_forward
            && self.orbit_source >= self.orbit_inverse
            && self.orbit_source >= self.orbit_forward
            && self.forward_equivariant
    }
}

pub fn gst_symmetry_check(
    spec: &Spectrum,
    graph: &Graph,
    s: &VertexSet,
    t_set: &VertexSet,
    t: f64,
    group: &PermGroup,
    zero_tol: f64,
) -> Result<SymmetryReport> {
    for (index, g) in group.generators.iter().enumerate() {
        if !is_automorphism(graph, g)? {
            return Err(Error::NotAutomorphism { index });
        }
    }
    let u = transition(spec, t);
    let base = has_gst_from(&u, s, t_set, zero_tol);
    if !base.holds {
        return Err(Error::Precondition(format!("({s},{t_set})-GST does not hold at t = {t}")));
    }
    let forward = u.forward_set(s, zero_tol);
    let inverse = crate::gst::inverse_set_from(&u.reversed(), s, zero_tol);

    let per_element: Vec<(f64, bool)> = group
        .elements
        .par_iter()
        .map(|p| {
            let r = has_gst_from(&u, &p.apply_set(s), &p.apply_set(t_set), zero_tol);
            let equivariant = u.forward_set(&p.apply_set(s), zero_tol) == p.apply_set(&forward);
            (r.residual, equivariant)
        })
        .collect();
    let images_hold = per_element.iter().all(|&(r, _)| r <= zero_tol);
    let worst_image_residual = per_element.iter().fold(0.0f64, |m, &(r, _)| m.max(r));
    let forward_equivariant = per_element.iter().all(|&(_, e)| e);

    let stab_s = setwise_stabilizer(s, group);
    let stab_t = setwise_stabilizer(t_set, group);
    let intersected_target = stab_s
        .elements
        .iter()
        .fold(VertexSet::full(s.universe()), |acc, p| acc.intersection(&p.apply_set(t_set)));
    let intersected_holds = has_gst_from(&u, s, &intersected_target, zero_tol).holds;
    let stabilizers_equal = (s.len() == t_set.len())
        .then(|| is_subgroup_of(&stab_s, &stab_t) && stab_s.order() == stab_t.order());

    Ok(SymmetryReport {
        group_order: group.order(),
        images_hold,
        worst_image_residual,
        intersected_target,
        intersected_holds,
        stabilizers_equal,
        stab_source: stab_s.order(),
        stab_target: stab_t.order(),
        stab_in_inverse: is_subgroup_of(&stab_s, &setwise_stabilizer(&inverse, group)),
        stab_in_forward: is_subgroup_of(&stab_s, &setwise_stabilizer(&forward, group)),
        orbit_source: orbit_of_set(s, group).len(),
        orbit_inverse: orbit_of_set(&inverse, group).len(),
        orbit_forward: orbit_of_set(&forward, group).len(),
        forward_equivariant,
    })
}

fn transposition(n: usize, a: usize, b: usize) -> Permutation {
    let mut images: Vec<usize> = (0..n).collect();
    images.swap(a, b);
    Permutation { images }
}

fn cycle_on(n: usize, points: &[usize]) -> Permutation {
    let mut images: Vec<usize> = (0..n).collect();
    for (i, &p) in points.iter().enumerate() {
        images[p] = points[(i + 1) % points.len()];
    }
    Permutation { images }
}

/// Generators of `Sym(points)` acting inside `0..n`.
fn symmetric_on(n: usize, points: &[usize]) -> Vec<Permutation> {
    if points.len() < 2 {
        return Vec::new();
    }
    vec![transposition(n, points[0], points[1]), cycle_on(n, points)]
}

/// Generators of a known subgroup of `Aut(X)` for the named families, or `None`
/// where no structure is known (explicit edge lists).
pub fn known_generators(spec: &GeneratorSpec) -> Option<Vec<Permutation>> {
    use GeneratorSpec::*;
    let n = spec.build().ok()?.n();
    let all: Vec<usize> = (0..n).collect();
    let gens = match *spec {
        Complete(_) => symmetric_on(n, &all),
        Path(_) => vec![Permutation { images: (0..n).rev().collect() }],
        Cycle(_) => vec![
            Permutation { images: (0..n).map(|v| (v + 1) % n).collect() },
            Permutation { images: (0..n).map(|v| (n - v) % n).collect() },
        ],
        CompleteBipartite(a, b) => {
            let mut g = symmetric_on(n, &all[..a]);
            g.extend(symmetric_on(n, &all[a..]));
            if a == b {
                g.push(Permutation { images: (0..n).map(|v| (v + a) % n).collect() });
            }
            g
        }
        CompleteMultipartite { parts, size } => {
            let mut g = symmetric_on(n, &all[..size]);
            if parts >= 2 {
                let block = |perm: Vec<usize>| Permutation {
                    images: (0..n).map(|v| perm[v / size] * size + v % size).collect(),
                };
                g.push(block({
                    let mut p: Vec<usize> = (0..parts).collect();
                    p.swap(0, 1);
                    p
                }));
                g.push(block((0..parts).map(|i| (i + 1) % parts).collect()));
            }
            g
        }
        Hypercube(d) => {
            let mut g: Vec<Permutation> =
                (0..d).map(|i| Permutation { images: (0..n).map(|v| v ^ (1 << i)).collect() }).collect();
            for i in 0..d.saturating_sub(1) {
                let swap_bits = |v: usize| {
                    let (x, y) = (v >> i & 1, v >> (i + 1) & 1);
                    (v & !(0b11 << i)) | (x << (i + 1)) | (y << i)
                };
                g.push(Permutation { images: (0..n).map(swap_bits).collect() });
            }
            g
        }
        DoubleStar(k) => {
            let leaves0: Vec<usize> = (2..k + 2).collect();
            let mut centre_swap: Vec<usize> = (0..n).collect();
            centre_swap.swap(0, 1);
            for i in 0..k {
                centre_swap.swap(2 + i, k + 2 + i);
            }
            let mut g = symmetric_on(n, &leaves0);
            g.push(Permutation { images: centre_swap });
            g
        }
        McKay => vec![
            Permutation { images: (0..8).rev().collect() },
            transposition(8, 0, 1),
            transposition(8, 6, 7),
        ],
        Paley(p) => {
            let mut g = vec![Permutation { images: (0..p).map(|x| (x + 1) % p).collect() }];
            for s in (1..p).map(|x| x * x % p).collect::<std::collections::BTreeSet<_>>() {
                if s != 1 {
                    g.push(Permutation { images: (0..p).map(|x| x * s % p).collect() });
                }
            }
            g
        }
        // Sym(5) acting on the 2-subsets labelling the vertices: a transposition and a 5-cycle.
        Petersen => vec![
            Permutation { images: vec![0, 1, 6, 9, 4, 5, 2, 8, 7, 3] },
            Permutation { images: vec![3, 4, 0, 1, 2, 8, 9, 5, 6, 7] },
        ],
        EdgeList { .. } => return None,
        Complement(ref x) => known_generators(x)?,
        Product(ref x, ref y) => {
            let (nx, ny) = (x.build().ok()?.n(), y.build().ok()?.n());
            let mut g: Vec<Permutation> = known_generators(x)?
                .iter()
                .map(|p| Permutation { images: (0..n).map(|v| p.apply(v / ny) * ny + v % ny).collect() })
                .collect();
            g.extend(
                known_generators(y)?
                    .iter()
                    .map(|p| Permutation { images: (0..n).map(|v| (v / ny) * ny + p.apply(v % ny)).collect() }),
            );
            debug_assert_eq!(nx * ny, n);
            g
        }
        Join(ref x, ref y) => {
            let nx = x.build().ok()?.n();
            let mut g: Vec<Permutation> = known_generators(x)?
                .iter()
                .map(|p| Permutation { images: (0..n).map(|v| if v < nx { p.apply(v) } else { v }).collect() })
                .collect();
            g.extend(known_generators(y)?.iter().map(|p| Permutation {
                images: (0..n).map(|v| if v < nx { v } else { nx + p.apply(v - nx) }).collect(),
            }));
            g
        }
    };
    Some(gens)
}

/// Orbits of `G` on vertices, ordered by smallest member.
pub fn vertex_orbits(g: &PermGroup) -> Vec<VertexSet> {
    let n = g.n();
    let mut assigned = vec![false; n];
    let mut orbits = Vec::new();
    for v in 0..n {
        if assigned[v] {
            continue;
        }
        let orbit = VertexSet::from_indices(n, g.elements.iter().map(|p| p.apply(v)));
        for w in orbit.iter() {
            assigned[w] = true;
        }
        orbits.push(orbit);
    }
    orbits
}

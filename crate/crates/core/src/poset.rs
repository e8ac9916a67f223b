//! The state-transfer poset, periodic sets, and the topology of t-closed sets.
//!
//! Everything here is driven by the singleton images `F({a},t)`: `F` is additive
//! over unions, so `F(S,t)` is the union of the images of the members of `S`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gst::UnionFind;
use crate::spectral::{transition, Spectrum, TransitionMatrix};
use crate::vertex_set::VertexSet;

pub const DEFAULT_N_CAP: usize = 16;
const POSET_N_MAX: usize = 5;

#[derive(Clone, Debug, Serialize)]
pub struct MaximalPairMap {
    pub time: f64,
    pub singleton_images: Vec<VertexSet>,
}

impl MaximalPairMap {
    pub fn from_transition(u: &TransitionMatrix, zero_tol: f64) -> Self {
        MaximalPairMap {
            time: u.time,
            singleton_images: (0..u.n()).map(|a| u.column_support(a, zero_tol)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.singleton_images.len()
    }

    pub fn forward(&self, s: &VertexSet) -> VertexSet {
        s.iter().fold(VertexSet::empty(self.n()), |acc, a| acc.union(&self.singleton_images[a]))
    }

    /// `{a : F({a}) ⊆ F(S)}`.
    pub fn closure(&self, s: &VertexSet) -> VertexSet {
        let image = self.forward(s);
        VertexSet::from_indices(self.n(), (0..self.n()).filter(|&a| self.singleton_images[a].is_subset(&image)))
    }

    /// `(S,T)` is maximal iff `T = F(S)` and no strict superset of `S` maps into `T`,
    /// i.e. `S` is t-closed.
    pub fn is_maximal(&self, s: &VertexSet, t: &VertexSet) -> bool {
        &self.forward(s) == t && &self.closure(s) == s
    }

    fn masks(&self) -> Vec<u64> {
        self.singleton_images.iter().map(|s| s.to_mask().expect("n <= 64")).collect()
    }
}

pub fn maximal_pairs(spec: &Spectrum, t: f64, zero_tol: f64) -> MaximalPairMap {
    MaximalPairMap::from_transition(&transition(spec, t), zero_tol)
}

fn forward_mask(images: &[u64], s: u64) -> u64 {
    let mut out = 0;
    let mut rest = s;
    while rest != 0 {
        let a = rest.trailing_zeros() as usize;
        out |= images[a];
        rest &= rest - 1;
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct PosetPair {
    pub source: VertexSet,
    pub target: VertexSet,
}

impl PosetPair {
    /// `(S,T) ⪯ (S′,T′)` iff `S ⊆ S′` and `T′ ⊆ T`.
    pub fn le(&self, other: &PosetPair) -> bool {
        self.source.is_subset(&other.source) && other.target.is_subset(&self.target)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StPoset {
    pub time: f64,
    pub pairs: Vec<PosetPair>,
}

impl StPoset {
    pub fn contains(&self, s: &VertexSet, t: &VertexSet) -> bool {
        self.pairs.iter().any(|p| &p.source == s && &p.target == t)
    }

    pub fn maximal_elements(&self) -> Vec<&PosetPair> {
        self.pairs
            .iter()
            .filter(|p| !self.pairs.iter().any(|q| p.le(q) && (q.source != p.source || q.target != p.target)))
            .collect()
    }
}

/// All `(S,T)` with `F(S,t) ⊆ T`, ordered by source mask then target mask.
pub fn st_poset(spec: &Spectrum, t: f64, zero_tol: f64) -> Result<StPoset> {
    let n = spec.n();
    if n > POSET_N_MAX {
        return Err(Error::TooLarge(format!(
            "state-transfer poset needs n <= {POSET_N_MAX} (got {n}); use maximal_pairs instead"
        )));
    }
    let map = maximal_pairs(spec, t, zero_tol);
    let images = map.masks();
    let mut pairs = Vec::new();
    for s in 0..1u64 << n {
        let image = forward_mask(&images, s);
        for target in 0..1u64 << n {
            if image & !target == 0 {
                pairs.push(PosetPair { source: VertexSet::from_mask(n, s), target: VertexSet::from_mask(n, target) });
            }
        }
    }
    Ok(StPoset { time: t, pairs })
}

/// All `S` with `F(S,t) = S`: unions of the classes of the relation `a ~ b` iff
/// `b ∈ F({a},t)`. The relation is symmetric because `U(t)` is.
pub fn periodic_sets(spec: &Spectrum, t: f64, zero_tol: f64, n_cap: usize) -> Result<Vec<VertexSet>> {
    let n = spec.n();
    if n > n_cap {
        return Err(Error::TooLarge(format!("periodic-set listing needs n <= {n_cap}, got {n}")));
    }
    let map = maximal_pairs(spec, t, zero_tol);
    let mut uf = UnionFind::new(n);
    for (a, img) in map.singleton_images.iter().enumerate() {
        for b in img.iter() {
            uf.union(a, b);
        }
    }
    let mut classes: Vec<u64> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for v in 0..n {
        let r = uf.find(v);
        if slot[r] == usize::MAX {
            slot[r] = classes.len();
            classes.push(0);
        }
        classes[slot[r]] |= 1 << v;
    }
    let mut out: Vec<u64> = (0..1u64 << classes.len())
        .map(|choice| {
            classes
                .iter()
                .enumerate()
                .filter(|(i, _)| choice >> i & 1 == 1)
                .fold(0, |acc, (_, c)| acc | c)
        })
        .collect();
    out.sort_unstable();
    Ok(out.into_iter().map(|m| VertexSet::from_mask(n, m)).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct TopologyAtTime {
    pub time: f64,
    pub universe: usize,
    pub closed_sets: Vec<VertexSet>,
    pub open_sets: Vec<VertexSet>,
}

impl TopologyAtTime {
    pub fn is_discrete(&self) -> bool {
        self.closed_sets.len() as u128 == 1u128 << self.universe
    }

    pub fn is_indiscrete(&self) -> bool {
        self.closed_sets.len() == 2 || (self.universe == 0 && self.closed_sets.len() == 1)
    }
}

fn enumerate_closed(images: &[u64]) -> Vec<u64> {
    let n = images.len();
    (0..1u64 << n)
        .into_par_iter()
        .filter(|&s| {
            let image = forward_mask(images, s);
            (0..n).all(|a| s >> a & 1 == 1 || images[a] & !image != 0)
        })
        .collect()
}

/// All t-closed sets (fixed points of the closure) and their complements, the t-open sets.
pub fn topology_at(spec: &Spectrum, t: f64, zero_tol: f64, n_cap: usize) -> Result<TopologyAtTime> {
    let n = spec.n();
    if n > n_cap.min(30) {
        return Err(Error::TooLarge(format!("topology enumeration needs n <= {n_cap}, got {n}")));
    }
    let map = maximal_pairs(spec, t, zero_tol);
    let closed = enumerate_closed(&map.masks());
    let full = if n == 64 { !0 } else { (1u64 << n) - 1 };
    let mut open: Vec<u64> = closed.iter().map(|s| !s & full).collect();
    open.sort_unstable();
    Ok(TopologyAtTime {
        time: t,
        universe: n,
        closed_sets: closed.into_iter().map(|m| VertexSet::from_mask(n, m)).collect(),
        open_sets: open.into_iter().map(|m| VertexSet::from_mask(n, m)).collect(),
    })
}

/// `∅` and `V` are closed, and the closed sets are closed under pairwise `∩` and `∪`.
pub fn verify_topology_axioms(topo: &TopologyAtTime) -> bool {
    let n = topo.universe;
    let closed: std::collections::HashSet<&VertexSet> = topo.closed_sets.iter().collect();
    if !closed.contains(&VertexSet::empty(n)) || !closed.contains(&VertexSet::full(n)) {
        return false;
    }
    let list = &topo.closed_sets;
    let pairwise = list.par_iter().enumerate().all(|(i, a)| {
        list[i..]
            .iter()
            .all(|b| closed.contains(&a.intersection(b)) && closed.contains(&a.union(b)))
    });
    let complements = topo.open_sets.len() == list.len()
        && topo.open_sets.iter().all(|o| closed.contains(&o.complement()));
    pairwise && complements
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedVsBijective {
    pub time: f64,
    pub closed_count: usize,
    /// t-closed sets `S` with `|F(S,t)| > |S|`.
    pub non_bijective_closed: Vec<VertexSet>,
}

pub fn closed_vs_bijective_report(spec: &Spectrum, t: f64, zero_tol: f64, n_cap: usize) -> Result<ClosedVsBijective> {
    let topo = topology_at(spec, t, zero_tol, n_cap)?;
    let map = maximal_pairs(spec, t, zero_tol);
    let non_bijective_closed = topo
        .closed_sets
        .iter()
        .filter(|s| map.forward(s).len() > s.len())
        .cloned()
        .collect();
    Ok(ClosedVsBijective { time: t, closed_count: topo.closed_sets.len(), non_bijective_closed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GeneratorSpec;
    use crate::gst::{closure, forward_set, has_gst, GstFlag};
    use crate::spectral::decompose;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const Z: f64 = 1e-9;

    fn spectrum(spec: GeneratorSpec) -> Spectrum {
        decompose(&spec.build().unwrap(), None).unwrap()
    }

    fn set(n: usize, v: &[usize]) -> VertexSet {
        VertexSet::from_one_based(n, v).unwrap()
    }

    #[test]
    fn singleton_images() {
        let k2 = spectrum(GeneratorSpec::Complete(2));
        let m = maximal_pairs(&k2, PI / 2.0, Z);
        assert_eq!(m.singleton_images, vec![set(2, &[2]), set(2, &[1])]);
        let m = maximal_pairs(&k2, 1.0, Z);
        assert!(m.singleton_images.iter().all(|s| s.is_full()));
        let q2 = spectrum(GeneratorSpec::Hypercube(2));
        let m = maximal_pairs(&q2, PI / 2.0, Z);
        for a in 0..4 {
            assert_eq!(m.singleton_images[a], VertexSet::singleton(4, a ^ 3));
        }
        assert!(m.is_maximal(&set(4, &[1]), &set(4, &[4])));
        let m = maximal_pairs(&k2, 1.0, Z);
        assert!(!m.is_maximal(&set(2, &[1]), &VertexSet::full(2)));
        assert!(m.is_maximal(&VertexSet::full(2), &VertexSet::full(2)));
    }

    #[test]
    fn k2_poset_at_quarter_period() {
        let k2 = spectrum(GeneratorSpec::Complete(2));
        let p = st_poset(&k2, PI / 2.0, Z).unwrap();
        assert_eq!(p.pairs.len(), 9);
        let e = VertexSet::empty(2);
        let v = VertexSet::full(2);
        for t in [e.clone(), set(2, &[1]), set(2, &[2]), v.clone()] {
            assert!(p.contains(&e, &t));
        }
        for (s, t) in [(&[1][..], &[1, 2][..]), (&[1], &[2]), (&[2], &[1, 2]), (&[2], &[1]), (&[1, 2], &[1, 2])] {
            assert!(p.contains(&set(2, s), &set(2, t)));
        }
        let maxima: Vec<_> = p.maximal_elements().into_iter().map(|q| (q.source.clone(), q.target.clone())).collect();
        assert_eq!(maxima.len(), 4);
        assert!(maxima.contains(&(set(2, &[1]), set(2, &[2]))));
        assert!(maxima.contains(&(e.clone(), e.clone())));
    }

    #[test]
    fn poset_generic_and_trivial() {
        let k2 = spectrum(GeneratorSpec::Complete(2));
        let p = st_poset(&k2, 1.0, Z).unwrap();
        assert!(p.pairs.iter().all(|q| q.source.is_empty() || q.target.is_full()));
        assert_eq!(p.pairs.len(), 4 + 3);

        let k1 = spectrum(GeneratorSpec::Complete(1));
        let p = st_poset(&k1, 0.7, Z).unwrap();
        assert_eq!(p.pairs.len(), 3);
        assert_eq!(p.maximal_elements().len(), 2);

        let pet = spectrum(GeneratorSpec::Petersen);
        assert!(matches!(st_poset(&pet, 1.0, Z), Err(Error::TooLarge(_))));
    }

    #[test]
    fn poset_is_a_down_set() {
        let p3 = spectrum(GeneratorSpec::Path(3));
        let p = st_poset(&p3, PI / 2f64.sqrt(), Z).unwrap();
        for q in &p.pairs {
            for r in &p.pairs {
                if r.le(q) {
                    assert!(p.contains(&r.source, &r.target));
                }
            }
        }
        // Every pair below a member is a member: check against all 64 candidate pairs.
        let total = p.pairs.len();
        let all: Vec<PosetPair> = (0..8u64)
            .flat_map(|s| (0..8u64).map(move |t| (s, t)))
            .map(|(s, t)| PosetPair { source: VertexSet::from_mask(3, s), target: VertexSet::from_mask(3, t) })
            .collect();
        let inside = all.iter().filter(|c| p.pairs.iter().any(|q| c.le(q))).count();
        assert_eq!(inside, total);
    }

    #[test]
    fn periodic_examples() {
        let k2 = spectrum(GeneratorSpec::Complete(2));
        assert_eq!(periodic_sets(&k2, PI, Z, 16).unwrap().len(), 4);
        let ds = spectrum(GeneratorSpec::DoubleStar(2));
        let p = periodic_sets(&ds, 2.0 * PI / 3.0, Z, 16).unwrap();
        let s = set(6, &[1, 2]);
        assert!(p.contains(&s) && p.contains(&s.complement()));
        let pet = spectrum(GeneratorSpec::Petersen);
        assert_eq!(periodic_sets(&pet, 0.0, Z, 16).unwrap().len(), 1 << 10);
        for q in &p {
            assert_eq!(&forward_set(&ds, q, 2.0 * PI / 3.0, Z), q);
            assert!(p.contains(&q.complement()));
            for r in &p {
                assert!(p.contains(&q.union(r)) && p.contains(&q.intersection(r)));
            }
        }
    }

    #[test]
    fn topology_examples() {
        let q2 = spectrum(GeneratorSpec::Hypercube(2));
        let t = topology_at(&q2, PI / 2.0, Z, 16).unwrap();
        assert!(t.is_discrete() && verify_topology_axioms(&t));
        let k2 = spectrum(GeneratorSpec::Complete(2));
        assert!(topology_at(&k2, PI / 2.0, Z, 16).unwrap().is_discrete());
        let pet = spectrum(GeneratorSpec::Petersen);
        let t = topology_at(&pet, 1.3, Z, 16).unwrap();
        assert!(t.is_indiscrete() && verify_topology_axioms(&t));
    }

    #[test]
    fn topology_fault_injection() {
        let q2 = spectrum(GeneratorSpec::Hypercube(2));
        let mut t = topology_at(&q2, PI / 2.0, Z, 16).unwrap();
        t.closed_sets.retain(|s| s != &set(4, &[1, 2]));
        assert!(!verify_topology_axioms(&t));
        let mut t = topology_at(&q2, PI / 2.0, Z, 16).unwrap();
        t.closed_sets.retain(|s| !s.is_empty());
        assert!(!verify_topology_axioms(&t));
    }

    #[test]
    fn closed_vs_bijective_examples() {
        for (spec, t) in [
            (GeneratorSpec::Hypercube(2), PI / 2.0),
            (GeneratorSpec::Complete(2), PI / 2.0),
            (GeneratorSpec::Petersen, 0.77),
        ] {
            let r = closed_vs_bijective_report(&spectrum(spec), t, Z, 16).unwrap();
            assert!(r.non_bijective_closed.is_empty());
        }
    }

    #[test]
    fn bijective_sets_are_closed() {
        let ds = spectrum(GeneratorSpec::DoubleStar(2));
        let t = 2.0 * PI / 3.0;
        let s = set(6, &[1, 2]);
        assert!(has_gst(&ds, &s, &s, t, Z).has(GstFlag::Bijective));
        assert_eq!(closure(&ds, &s, t, Z), s);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn union_additivity(mask in 0u64..1 << 8, t in 0.0f64..10.0) {
            let ds = spectrum(GeneratorSpec::Hypercube(3));
            let s = VertexSet::from_mask(8, mask);
            let map = maximal_pairs(&ds, t, Z);
            prop_assert_eq!(map.forward(&s), forward_set(&ds, &s, t, Z));
            prop_assert_eq!(map.closure(&s), closure(&ds, &s, t, Z));
        }
    }
}

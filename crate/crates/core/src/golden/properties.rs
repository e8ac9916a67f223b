//! Randomized property suites over small graphs.
//!
//! Every suite draws its cases from a fixed pool of graphs: the small named
//! families (evaluated at their special times as well as generic ones) and seeded
//! random graphs on at most 10 vertices.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::graph::Graph;
use crate::gst::{closure_from, has_gst_from, inverse_set_from, DEFAULT_ZERO_TOL};
use crate::io::dsl::parse_graph_dsl;
use crate::poset::MaximalPairMap;
use crate::spectral::{decompose, transition, verify_spectrum, Spectrum};
use crate::vertex_set::VertexSet;

const RANDOM_GRAPHS: usize = 160;
const COMPOSITION_TOL: f64 = 1e-9;
const REVERSAL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct PoolGraph {
    label: String,
    spec: Spectrum,
    special_times: Vec<f64>,
}

type Check = fn(&PoolGraph, &mut ChaCha8Rng) -> Result<(), String>;

const SUITES: [(&str, Check); 6] = [
    ("basic laws of the forward and inverse maps", map_laws),
    ("closed sets form a topology", topology_laws),
    ("|F(S,t)| >= |S|", cardinality),
    ("F union-additivity", union_additivity),
    ("U(s+t) = U(s)U(t)", composition),
    ("spectral invariants", spectral_invariants),
];

fn named_pool() -> Vec<(&'static str, Vec<f64>)> {
    let ds2 = 2.0 * PI / 3.0;
    vec![
        ("complete:2", vec![PI / 2.0, PI]),
        ("hypercube:2", vec![PI / 2.0, PI]),
        ("hypercube:3", vec![PI / 2.0, PI]),
        ("cycle:4", vec![PI / 2.0, PI]),
        ("path:3", vec![PI / 2f64.sqrt(), 2f64.sqrt() * PI]),
        ("complete:3", vec![2.0 * PI / 3.0]),
        ("doublestar:1", vec![2.0 * PI / 5f64.sqrt()]),
        ("doublestar:2", vec![ds2, 2.0 * ds2]),
        ("cmulti:3x2", vec![PI, PI / 3.0]),
        ("join(complete:1,cycle:4)", vec![2.0 * PI / 20f64.sqrt()]),
        ("petersen", vec![PI, 2.0 * PI]),
        ("product(complete:2,path:3)", vec![PI / 2.0]),
    ]
}

fn random_graph(rng: &mut ChaCha8Rng) -> Graph {
    let n = rng.random_range(2..=10usize);
    let p = rng.random_range(0.2..0.8);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("generated edges are simple")
}

fn build_pool(seed: u64) -> Vec<PoolGraph> {
    let mut pool: Vec<PoolGraph> = named_pool()
        .into_iter()
        .map(|(dsl, special_times)| {
            let g = parse_graph_dsl(dsl).and_then(|s| s.build()).expect("pool graph builds");
            PoolGraph { label: dsl.to_string(), spec: decompose(&g, None).expect("pool spectrum"), special_times }
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..RANDOM_GRAPHS {
        let g = random_graph(&mut rng);
        let spec = decompose(&g, None).expect("random spectrum");
        pool.push(PoolGraph { label: format!("random #{i} (n = {}, {} edges)", g.n(), g.edge_count()), spec, special_times: vec![] });
    }
    pool
}

fn random_set(n: usize, rng: &mut ChaCha8Rng) -> VertexSet {
    let mask = rng.random::<u64>() & ((1u64 << n) - 1);
    VertexSet::from_mask(n, mask)
}

fn random_time(g: &PoolGraph, rng: &mut ChaCha8Rng) -> f64 {
    if !g.special_times.is_empty() && rng.random_bool(0.5) {
        let t = g.special_times[rng.random_range(0..g.special_times.len())];
        if rng.random_bool(0.5) {
            -t
        } else {
            t
        }
    } else {
        rng.random_range(-10.0..10.0)
    }
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn map_laws(g: &PoolGraph, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let tol = DEFAULT_ZERO_TOL;
    let n = g.spec.n();
    let t = random_time(g, rng);
    let u = transition(&g.spec, t);
    let holds = |s: &VertexSet, target: &VertexSet| has_gst_from(&u, s, target, tol).holds;

    let s = random_set(n, rng);
    let target = u.forward_set(&s, tol).union(&random_set(n, rng));
    ensure(holds(&s, &target), || format!("(S,F(S) ∪ X) fails at t = {t}"))?;
    ensure(s.len() <= target.len(), || format!("|S| > |T| for a GST pair at t = {t}"))?;

    // singletons decide
    let other = random_set(n, rng);
    let by_singletons = s.iter().all(|a| holds(&VertexSet::singleton(n, a), &other));
    ensure(holds(&s, &other) == by_singletons, || format!("singletons fails at t = {t}"))?;

    // shrink the source, enlarge the target
    let s_sub = s.intersection(&random_set(n, rng));
    let t_sup = target.union(&random_set(n, rng));
    ensure(holds(&s_sub, &t_sup), || format!("monotonicity fails at t = {t}"))?;

    // meets and joins of GST pairs
    let s2 = random_set(n, rng);
    let t2 = u.forward_set(&s2, tol).union(&random_set(n, rng));
    ensure(holds(&s.intersection(&s2), &target.intersection(&t2)), || format!("meet fails at t = {t}"))?;
    ensure(holds(&s.union(&s2), &target.union(&t2)), || format!("join fails at t = {t}"))?;

    // complements, for an arbitrary pair and a GST pair
    for (a, b) in [(&s, &other), (&s, &target)] {
        ensure(holds(a, b) == holds(&b.complement(), &a.complement()), || format!("complement fails at t = {t}"))?;
    }

    // time reversal leaves every residual unchanged
    let ur = transition(&g.spec, -t);
    for (a, b) in [(&s, &other), (&s, &target), (&s2, &t2)] {
        let fwd = has_gst_from(&u, a, b, tol);
        let back = has_gst_from(&ur, a, b, tol);
        ensure(fwd.holds == back.holds && (fwd.residual - back.residual).abs() <= REVERSAL_TOL, || {
            format!("time reversal fails at t = {t}: residuals {} vs {}", fwd.residual, back.residual)
        })?;
    }

    // transitivity: the composed residual is bounded by n times the two residuals
    let tau = random_time(g, rng);
    let u_tau = transition(&g.spec, tau);
    let r = random_set(n, rng);
    let mid = u.forward_set(&r, tol).union(&random_set(n, rng));
    let end = u_tau.forward_set(&mid, tol).union(&random_set(n, rng));
    let r1 = has_gst_from(&u, &r, &mid, tol).residual;
    let r2 = has_gst_from(&u_tau, &mid, &end, tol).residual;
    let r12 = has_gst_from(&transition(&g.spec, t + tau), &r, &end, tol).residual;
    let bound = n as f64 * (r1 + r2) + 1e-11;
    ensure(r12 <= bound, || format!("transitivity fails at t = {t}, {tau}: residual {r12} > {bound}"))
}

fn topology_laws(g: &PoolGraph, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let tol = DEFAULT_ZERO_TOL;
    let n = g.spec.n();
    let t = random_time(g, rng);
    let u = transition(&g.spec, t);
    let ur = u.reversed();
    let f = |s: &VertexSet| u.forward_set(s, tol);
    let inv = |s: &VertexSet| inverse_set_from(&ur, s, tol);
    let cl = |s: &VertexSet| closure_from(&u, s, tol);
    let s = random_set(n, rng);
    let x = random_set(n, rng);
    let (meet, join) = (s.intersection(&x), s.union(&x));
    let fail = |part: &str| format!("({part}) fails at t = {t}");

    ensure(f(&s).is_subset(&f(&join)), || fail("a"))?;
    ensure(f(&meet).is_subset(&f(&s).intersection(&f(&x))), || fail("b"))?;
    ensure(f(&join) == f(&s).union(&f(&x)), || fail("c"))?;
    ensure(inv(&s).is_subset(&inv(&join)), || fail("d"))?;
    ensure(inv(&meet) == inv(&s).intersection(&inv(&x)), || fail("e"))?;
    ensure(inv(&s).union(&inv(&x)).is_subset(&inv(&join)), || fail("f"))?;
    ensure(s.is_subset(&cl(&s)), || fail("g"))?;
    ensure(cl(&meet).is_subset(&cl(&s).intersection(&cl(&x))), || fail("h"))?;
    ensure(cl(&s).union(&cl(&x)).is_subset(&cl(&join)), || fail("i"))?;
    ensure(cl(&cl(&s)) == cl(&s), || fail("idempotence"))?;
    // F(S,t) ⊆ T iff S ⊆ I(T,−t)
    ensure(f(&s).is_subset(&x) == s.is_subset(&inverse_set_from(&u, &x, tol)), || fail("GST characterization"))
}

fn cardinality(g: &PoolGraph, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = g.spec.n();
    let t = random_time(g, rng);
    let s = random_set(n, rng);
    let image = transition(&g.spec, t).forward_set(&s, DEFAULT_ZERO_TOL);
    ensure(image.len() >= s.len(), || format!("|F({s})| = {} at t = {t}", image.len()))
}

fn union_additivity(g: &PoolGraph, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = g.spec.n();
    let t = random_time(g, rng);
    let u = transition(&g.spec, t);
    let map = MaximalPairMap::from_transition(&u, DEFAULT_ZERO_TOL);
    let s = random_set(n, rng);
    let by_columns = s
        .iter()
        .fold(VertexSet::empty(n), |acc, a| acc.union(&map.singleton_images[a]));
    let direct = VertexSet::from_indices(n, (0..n).filter(|&b| s.iter().any(|a| u.get(b, a).norm() > DEFAULT_ZERO_TOL)));
    ensure(by_columns == direct && by_columns == u.forward_set(&s, DEFAULT_ZERO_TOL) && by_columns == map.forward(&s), || {
        format!("F({s}) is not the union of singleton images at t = {t}")
    })
}

fn composition(g: &PoolGraph, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = g.spec.n();
    let s = rng.random_range(-10.0..10.0);
    let t = rng.random_range(-10.0..10.0);
    let lhs = transition(&g.spec, s + t).entries;
    let rhs = transition(&g.spec, s).entries * transition(&g.spec, t).entries;
    let dev = (lhs - rhs).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    ensure(dev <= COMPOSITION_TOL * n as f64, || format!("|U(s+t) − U(s)U(t)| = {dev:e} at s = {s}, t = {t}"))?;
    let u = transition(&g.spec, s);
    ensure(u.unitarity_defect() <= COMPOSITION_TOL * n as f64, || format!("U({s}) not unitary"))?;
    ensure(u.symmetry_defect() <= COMPOSITION_TOL * n as f64, || format!("U({s}) not symmetric"))
}

fn spectral_invariants(g: &PoolGraph, _rng: &mut ChaCha8Rng) -> Result<(), String> {
    let spec = &g.spec;
    let diag = verify_spectrum(spec);
    ensure(diag.within(spec.eigen_tol()), || format!("spectral identities off by {:e}", diag.max_deviation()))?;
    let n = spec.n();
    let mults = spec.multiplicities();
    ensure(mults.iter().sum::<usize>() == n, || "multiplicities do not sum to n".into())?;
    // tr A = 0 and tr A² = 2|E|
    let tr1: f64 = spec.eigenvalues().iter().zip(mults).map(|(th, &m)| th * m as f64).sum();
    let tr2: f64 = spec.eigenvalues().iter().zip(mults).map(|(th, &m)| th * th * m as f64).sum();
    let edges = spec.adjacency().iter().filter(|&&x| x != 0.0).count() as f64 / 2.0;
    ensure(tr1.abs() <= 1e-9 * n as f64, || format!("trace {tr1}"))?;
    ensure((tr2 - 2.0 * edges).abs() <= 1e-8 * n as f64, || format!("tr A² = {tr2}, 2|E| = {}", 2.0 * edges))?;
    for (e, &m) in spec.projectors().iter().zip(mults) {
        ensure((e.trace() - m as f64).abs() <= 1e-8, || format!("projector trace {} vs multiplicity {m}", e.trace()))?;
    }
    Ok(())
}

/// Runs each suite on `cases` random cases. Suites run in parallel; every suite
/// uses its own seeded generator, so results do not depend on scheduling.
pub fn run_property_suites(cases: usize, seed: u64) -> Vec<SuiteOutcome> {
    let pool = build_pool(seed);
    SUITES
        .par_iter()
        .enumerate()
        .map(|(k, (name, check))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1 + k as u64));
            let mut failures = 0;
            let mut first_failure = None;
            for _ in 0..cases {
                let g = &pool[rng.random_range(0..pool.len())];
                if let Err(msg) = check(g, &mut rng) {
                    failures += 1;
                    first_failure.get_or_insert_with(|| format!("{}: {msg}", g.label));
                }
            }
            SuiteOutcome { name, cases, failures, first_failure }
        })
        .collect()
}

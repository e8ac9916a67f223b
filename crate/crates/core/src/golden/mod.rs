//! The acceptance criteria as executable fixtures.
//!
//! Each `criterion_*` function recomputes one criterion from scratch and returns a
//! [`CriterionOutcome`] with a verdict and a human-readable trail of what was
//! checked. [`run_golden`] runs all ten in order and feeds the scans of the
//! earlier criteria into the monogamy audit.

mod properties;

pub use properties::{run_property_suites, SuiteOutcome};

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::exact::{certify_gst, Verdict};
use crate::graph::{GeneratorSpec, Graph};
use crate::gst::{equal_card_structure, has_gst, DEFAULT_ZERO_TOL};
use crate::io::dsl::parse_graph_dsl;
use crate::poset::{st_poset, topology_at, verify_topology_axioms, DEFAULT_N_CAP};
use crate::scan::{
    conference_sweep, double_star_time, entry_zero_scan, isolation_check, join_discriminant, join_times, monogamy_audit,
    srg_times, verify_candidates, ScanParams, ScanResult, SrgTarget,
};
use crate::spectral::{decompose, transition, Spectrum};
use crate::vertex_set::VertexSet;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
    pub seconds: f64,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} [{:>2}] {} ({:.2}s)", self.id, self.title, self.seconds)
    }
}

#[derive(Clone, Debug)]
pub struct GoldenConfig {
    /// Cases per property suite in criterion 10.
    pub property_cases: usize,
    pub seed: u64,
}

impl Default for GoldenConfig {
    fn default() -> Self {
        GoldenConfig { property_cases: 10_000, seed: 0x5eed }
    }
}

/// Scans produced along the way, labelled by graph.
pub type LabelledScans = Vec<(String, ScanResult)>;

struct Log {
    passed: bool,
    details: Vec<String>,
}

impl Log {
    fn check(&mut self, ok: bool, msg: impl Into<String>) {
        self.passed &= ok;
        let tag = if ok { "ok" } else { "FAILED" };
        self.details.push(format!("{tag}: {}", msg.into()));
    }

    fn note(&mut self, msg: impl Into<String>) {
        self.details.push(format!("note: {}", msg.into()));
    }
}

fn run(id: u32, title: &'static str, body: impl FnOnce(&mut Log) -> Result<()>) -> CriterionOutcome {
    let start = Instant::now();
    let mut log = Log { passed: true, details: Vec::new() };
    if let Err(e) = body(&mut log) {
        log.passed = false;
        log.details.push(format!("error: {e}"));
    }
    CriterionOutcome { id, title, passed: log.passed, details: log.details, seconds: start.elapsed().as_secs_f64() }
}

fn load(dsl: &str) -> Result<(Graph, Spectrum)> {
    let g = parse_graph_dsl(dsl)?.build()?;
    let spec = decompose(&g, None)?;
    Ok((g, spec))
}

fn set(n: usize, labels: &[usize]) -> Result<VertexSet> {
    VertexSet::from_one_based(n, labels)
}

fn scan(spec: &Spectrum, from: f64, to: f64, step: f64) -> Result<ScanResult> {
    entry_zero_scan(spec, &ScanParams { from, to, step, ..ScanParams::default() })
}

/// Bijective witnesses of criteria 1 to 3: graph, `S`, `T`, time.
fn bijective_witnesses(seed: u64) -> Result<Vec<(String, Spectrum, VertexSet, VertexSet, f64)>> {
    let mut out = Vec::new();
    let (_, k2) = load("complete:2")?;
    out.push(("complete:2".into(), k2.clone(), set(2, &[1])?, set(2, &[2])?, PI / 2.0));
    out.push(("complete:2".into(), k2, set(2, &[2])?, set(2, &[1])?, PI / 2.0));
    for (d, (g, spec), subsets) in hypercube_subsets(seed)? {
        let n = g.n();
        for s in subsets {
            let t = antipode(&s);
            out.push((format!("hypercube:{d}"), spec.clone(), s, t, PI / 2.0));
        }
        if d % 2 == 1 {
            let (v0, v1) = g.bipartition()?.expect("hypercubes are bipartite");
            debug_assert_eq!(v0.universe(), n);
            out.push((format!("hypercube:{d}"), spec.clone(), v0, v1, PI / 2.0));
        }
    }
    for k in 1..=8 {
        let (g, tau, s) = double_star_time(k)?;
        out.push((format!("doublestar:{k}"), decompose(&g, None)?, s.clone(), s, tau));
    }
    Ok(out)
}

type HypercubeCase = (usize, (Graph, Spectrum), Vec<VertexSet>);

/// Hypercubes of dimension 2 to 6 with 20 seeded non-empty subsets each.
fn hypercube_subsets(seed: u64) -> Result<Vec<HypercubeCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (2..=6)
        .map(|d| {
            let g = GeneratorSpec::Hypercube(d).build()?;
            let spec = decompose(&g, None)?;
            let n = g.n();
            let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            let subsets = (0..20)
                .map(|_| loop {
                    let mask = rng.random::<u64>() & full;
                    if mask != 0 {
                        break VertexSet::from_mask(n, mask);
                    }
                })
                .collect();
            Ok((d, (g, spec), subsets))
        })
        .collect()
}

/// Vertex `v` of the cube is the bit string `v`; its antipode flips every bit.
fn antipode(s: &VertexSet) -> VertexSet {
    let n = s.universe();
    VertexSet::from_indices(n, s.iter().map(|v| v ^ (n - 1)))
}

pub fn criterion_1() -> CriterionOutcome {
    run(1, "K2: PST at pi/2 and the poset ST(K2, pi/2)", |log| {
        let (_, spec) = load("complete:2")?;
        let u = transition(&spec, PI / 2.0);
        let (u21, u11) = (u.get(1, 0).norm(), u.get(0, 0).norm());
        log.check((u21 - 1.0).abs() <= 1e-12, format!("|U(pi/2)_21| = {u21}"));
        log.check(u11 <= 1e-12, format!("|U(pi/2)_11| = {u11:e}"));

        let poset = st_poset(&spec, PI / 2.0, DEFAULT_ZERO_TOL)?;
        let expected: [(&[usize], &[usize]); 9] = [
            (&[], &[]),
            (&[], &[1]),
            (&[], &[2]),
            (&[], &[1, 2]),
            (&[1], &[2]),
            (&[1], &[1, 2]),
            (&[2], &[1]),
            (&[2], &[1, 2]),
            (&[1, 2], &[1, 2]),
        ];
        let mut all_present = true;
        for (s, t) in expected {
            all_present &= poset.contains(&set(2, s)?, &set(2, t)?);
        }
        log.check(
            all_present && poset.pairs.len() == expected.len(),
            format!("ST(K2, pi/2) has {} pairs, the figure's 9 all present: {all_present}", poset.pairs.len()),
        );
        Ok(())
    })
}

pub fn criterion_2(seed: u64) -> CriterionOutcome {
    run(2, "hypercubes: antipodal GST at pi/2, (V0,V1) for odd d, exact for d = 3", |log| {
        for (d, (g, spec), subsets) in hypercube_subsets(seed)? {
            let u = transition(&spec, PI / 2.0);
            let worst = subsets
                .iter()
                .map(|s| crate::gst::has_gst_from(&u, s, &antipode(s), DEFAULT_ZERO_TOL).residual)
                .fold(0.0, f64::max);
            log.check(worst < 1e-9, format!("Q{d}: 20 random (S, antipode(S)) pairs, worst residual {worst:.2e}"));
            if d % 2 == 1 {
                let (v0, v1) = g.bipartition()?.expect("hypercubes are bipartite");
                let r = crate::gst::has_gst_from(&u, &v0, &v1, DEFAULT_ZERO_TOL).residual;
                log.check(r < 1e-9, format!("Q{d}: (V0,V1) residual {r:.2e}"));
                if d == 3 {
                    let cert = certify_gst(&g, &v0, &v1, 1, 4)?;
                    log.check(
                        cert.verdict == Verdict::CertifiedGst,
                        format!("Q3: exact certificate at 2pi*1/4 proves {} entries zero", cert.zero_entries.len()),
                    );
                }
            }
        }
        Ok(())
    })
}

pub fn criterion_3() -> CriterionOutcome {
    run(3, "double stars: ({1,2},{1,2})-GST at 2pi/sqrt(4k+1)", |log| {
        for k in 1..=8 {
            let (g, tau, s) = double_star_time(k)?;
            let r = has_gst(&decompose(&g, None)?, &s, &s, tau, DEFAULT_ZERO_TOL).residual;
            log.check(r < 1e-8, format!("k = {k}: tau = {tau:.12}, residual {r:.2e}"));
        }
        let (g, _, s) = double_star_time(2)?;
        let cert = certify_gst(&g, &s, &s, 1, 3)?;
        log.check(cert.verdict == Verdict::CertifiedGst, "k = 2: exact certificate at 2pi/3");
        Ok(())
    })
}

pub fn criterion_4(seed: u64) -> CriterionOutcome {
    run(4, "equal-cardinality structure for every bijective witness of 1-3", |log| {
        let witnesses = bijective_witnesses(seed)?;
        let mut worst = 0.0f64;
        let mut failures = Vec::new();
        for (label, spec, s, t, tau) in &witnesses {
            let report = equal_card_structure(spec, s, t, *tau, DEFAULT_ZERO_TOL)?;
            worst = worst.max(report.max_residual());
            if !report.all_hold() || report.max_residual() >= 1e-8 {
                let bad: Vec<char> = report.clauses.iter().filter(|c| !c.holds).map(|c| c.clause).collect();
                failures.push(format!("{label} ({s},{t}) at {tau}: clauses {bad:?}"));
            }
        }
        log.check(
            failures.is_empty(),
            format!("{} witnesses, clauses (a)-(f) incl. S, T periodic at 2t; worst residual {worst:.2e}", witnesses.len()),
        );
        for f in failures {
            log.check(false, f);
        }
        Ok(())
    })
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-13 {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

pub fn criterion_5() -> (CriterionOutcome, LabelledScans) {
    let mut scans = Vec::new();
    let outcome = run(5, "McKay graph: ({3,6},{3,6})-GST found by scanning [0,30]", |log| {
        let (g, spec) = load("mckay")?;
        let s = set(g.n(), &[3, 6])?;
        let result = scan(&spec, 0.0, 30.0, 1e-3)?;

        let mut found = None;
        for event in result.gst_events.iter().filter(|e| e.bijective_target(&s).as_ref() == Some(&s)) {
            let r = has_gst(&spec, &s, &s, event.time, DEFAULT_ZERO_TOL).residual;
            let mut isolated = true;
            for hit in result.hits.iter().filter(|h| (h.time - event.time).abs() < 1e-7) {
                if s.contains(hit.col) && !s.contains(hit.row) {
                    isolated &= isolation_check(&spec, hit, 1e-4, DEFAULT_ZERO_TOL)?;
                }
            }
            if r < 1e-8 && isolated {
                found = Some((event.time, r));
                break;
            }
        }
        log.note(format!("scan found {} nontrivial events on [0,30]", result.gst_events.len()));

        // Best residual on the grid, refined, as evidence either way.
        let outside = s.complement();
        let residual = |t: f64| {
            s.iter()
                .flat_map(|a| outside.iter().map(move |b| (b, a)))
                .map(|(b, a)| spec.entry(b, a, t).norm())
                .fold(0.0, f64::max)
        };
        let step = 1e-3;
        let grid: Vec<f64> = (1..30_000).map(|k| residual(k as f64 * step)).collect();
        let (mut best_t, mut best_r) = (0.0, f64::INFINITY);
        for k in 1..grid.len() - 1 {
            if grid[k] <= grid[k - 1] && grid[k] <= grid[k + 1] && grid[k] < 0.5 {
                let (t, r) = golden_min(residual, (k as f64) * step, (k as f64 + 2.0) * step);
                if r < best_r {
                    (best_t, best_r) = (t, r);
                }
            }
        }
        log.note(format!("smallest ({{3,6}},{{3,6}}) residual on (0,30): {best_r:.4} at t = {best_t:.6}"));
        match found {
            Some((t, r)) => log.check(true, format!("isolated GST at t = {t:.12}, residual {r:.2e}")),
            None => log.check(false, "no time in [0,30] with residual < 1e-8"),
        }
        scans.push(("mckay".to_string(), result));
        Ok(())
    });
    (outcome, scans)
}

pub fn criterion_6() -> (CriterionOutcome, LabelledScans) {
    let mut scans = Vec::new();
    let outcome = run(6, "strongly regular graphs: K(2,2,2) at pi, Petersen, Paley(13), C5 sweep", |log| {
        let (g, spec) = load("cmulti:3x2")?;
        let u = transition(&spec, PI);
        let worst = SrgTarget::OwnPart
            .pairs(&g)?
            .iter()
            .map(|(s, t)| crate::gst::has_gst_from(&u, s, t, DEFAULT_ZERO_TOL).residual)
            .fold(0.0, f64::max);
        log.check(worst < 1e-9, format!("K(2,2,2): ({{b}}, V \\ X(b)) at pi for all b, worst residual {worst:.2e}"));
        let params = g.recognize_srg().expect("K(2,2,2) is strongly regular");
        let closed = srg_times(&params, 0)?;
        let at_pi = closed
            .candidates
            .iter()
            .find(|c| (c.time - PI).abs() < 1e-12 && c.target == SrgTarget::OwnPart);
        log.check(
            at_pi.is_some_and(|c| c.residual < 1e-9),
            format!("closed form h1(pi)/nu = {:.2e}", at_pi.map_or(f64::NAN, |c| c.residual)),
        );

        for dsl in ["petersen", "paley:13"] {
            let (_, spec) = load(dsl)?;
            let result = scan(&spec, 1e-3, 2.0 * PI, 1e-3)?;
            log.check(
                result.gst_events.is_empty(),
                format!("{dsl}: {} nontrivial events on [1e-3, 2pi] at step 1e-3", result.gst_events.len()),
            );
            scans.push((dsl.to_string(), result));
        }
        log.note("a finite grid can only rule out zeros it brackets; the scan is evidence, not proof");

        let sweep = conference_sweep(5, 1, 100_000, 1e-9);
        log.check(
            sweep.solutions.is_empty(),
            format!(
                "C5 = srg(5,2,0,1): no B <= 1e5 with cos(pi B/sqrt 5) = -1/4; closest B = {} (deviation {:.2e})",
                sweep.closest_b, sweep.closest_deviation
            ),
        );
        Ok(())
    });
    (outcome, scans)
}

pub fn criterion_7() -> CriterionOutcome {
    run(7, "products and joins", |log| {
        let (_, q2) = load("product(complete:2,complete:2)")?;
        // (a,b) is vertex 2a + b; K2 has ({1},{2}) and ({2},{1}) at pi/2.
        for (s, t) in [(&[1usize][..], &[4usize][..]), (&[2], &[3])] {
            let r = has_gst(&q2, &set(4, s)?, &set(4, t)?, PI / 2.0, DEFAULT_ZERO_TOL).residual;
            log.check(r < 1e-8, format!("K2 x K2: ({s:?},{t:?}) at pi/2, residual {r:.2e}"));
        }

        let (_, ds) = load("product(doublestar:2,complete:2)")?;
        // (a,b) is vertex 2a + b.
        let both = set(12, &[1, 2, 3, 4])?;
        let r = has_gst(&ds, &both, &both, 2.0 * PI / 3.0, DEFAULT_ZERO_TOL).residual;
        log.check(r < 1e-8, format!("doublestar(2) x K2: ({{1,2}} x V(K2)) periodic at 2pi/3, residual {r:.2e}"));
        let first = set(12, &[1, 3])?;
        let r = has_gst(&ds, &first, &first, 2.0 * PI, DEFAULT_ZERO_TOL).residual;
        log.check(r < 1e-8, format!("doublestar(2) x K2: ({{1,2}} x {{1}}) periodic at 2pi, residual {r:.2e}"));
        log.note("the nontrivial GST times of K2 (multiples of pi/2) meet those of doublestar(2) only at multiples of 2pi");

        let joins = [
            ("join(complete:1,complete:2)", (0, 1, 1, 2)),
            ("join(complement(complete:2),complement(complete:2))", (0, 2, 0, 2)),
            ("join(complete:1,cycle:4)", (0, 1, 2, 4)),
        ];
        for (dsl, (k1, m1, k2, m2)) in joins {
            let (_, spec) = load(dsl)?;
            let mut cands = join_times(k1, m1, k2, m2, 1);
            verify_candidates(&spec, &mut cands, DEFAULT_ZERO_TOL);
            let c = &cands[0];
            let r = c.residual.unwrap_or(f64::INFINITY);
            log.check(
                c.verified(1e-9),
                format!("{dsl}: D = {}, tau = 2pi/sqrt(D) = {:.12}, residual {r:.2e}", join_discriminant(k1, m1, k2, m2), c.time),
            );
        }
        // The displayed Δ = k1 + k2 ± sqrt(D) does not give a GST time on K3.
        let (_, k3) = load("join(complete:1,complete:2)")?;
        let delta = 1.0 + join_discriminant(0, 1, 1, 2).sqrt();
        let tau = 2.0 * PI / delta.sqrt();
        let r = has_gst(&k3, &set(3, &[1])?, &set(3, &[1])?, tau, DEFAULT_ZERO_TOL).residual;
        log.check(r > 1e-3, format!("flagged: with Δ = k1 + k2 + sqrt(D) = {delta}, K3 at 2pi/sqrt(Δ) has residual {r:.6}"));
        Ok(())
    })
}

pub fn criterion_8() -> CriterionOutcome {
    run(8, "topology at special and generic times", |log| {
        let special: [(&str, [f64; 2]); 5] = [
            ("complete:2", [PI / 2.0, PI]),
            ("hypercube:2", [PI / 2.0, PI]),
            ("hypercube:3", [PI / 2.0, PI]),
            ("doublestar:2", [2.0 * PI / 3.0, 4.0 * PI / 3.0]),
            ("path:3", [PI / 2f64.sqrt(), 2f64.sqrt() * PI]),
        ];
        let generic = [0.37, 1.13, 2.29, 3.71, 5.03];
        for (dsl, times) in special {
            let (_, spec) = load(dsl)?;
            for t in times {
                let topo = topology_at(&spec, t, DEFAULT_ZERO_TOL, DEFAULT_N_CAP)?;
                log.check(
                    verify_topology_axioms(&topo),
                    format!("{dsl} at {t:.6}: {} closed sets, axioms hold", topo.closed_sets.len()),
                );
                if dsl == "hypercube:2" && t == PI / 2.0 {
                    log.check(topo.is_discrete(), "Q2 at pi/2 is discrete");
                }
            }
            let mut all_indiscrete = true;
            for t in generic {
                let topo = topology_at(&spec, t, DEFAULT_ZERO_TOL, DEFAULT_N_CAP)?;
                all_indiscrete &= verify_topology_axioms(&topo) && topo.is_indiscrete();
            }
            log.check(all_indiscrete, format!("{dsl}: indiscrete at the 5 generic times"));
        }
        Ok(())
    })
}

/// Extra graphs scanned for the monogamy audit, over `(0, 2π)`.
const AUDIT_GRAPHS: [&str; 8] = [
    "complete:2",
    "hypercube:2",
    "doublestar:2",
    "complete:3",
    "cycle:4",
    "hypercube:3",
    "product(doublestar:2,complete:2)",
    "join(complete:1,cycle:4)",
];

pub fn criterion_9(previous: &[(String, ScanResult)]) -> CriterionOutcome {
    run(9, "monogamy audit over every scan", |log| {
        let mut own = Vec::new();
        for dsl in AUDIT_GRAPHS {
            let (_, spec) = load(dsl)?;
            own.push((dsl.to_string(), scan(&spec, 0.0, 2.0 * PI, 1e-3)?));
        }
        for (label, result) in previous.iter().chain(&own) {
            let audit = monogamy_audit(&[result]);
            log.check(
                audit.violations.is_empty(),
                format!(
                    "{label}: {} events, {} sources checked, {} violations",
                    result.gst_events.len(),
                    audit.sources_checked,
                    audit.violations.len()
                ),
            );
        }
        Ok(())
    })
}

pub fn criterion_10(cases: usize, seed: u64) -> CriterionOutcome {
    run(10, "randomized property suites on graphs with n <= 10", |log| {
        let start = Instant::now();
        for suite in run_property_suites(cases, seed) {
            let msg = match &suite.first_failure {
                Some(f) => format!("{}: {} / {} failed, first: {f}", suite.name, suite.failures, suite.cases),
                None => format!("{}: {} cases", suite.name, suite.cases),
            };
            log.check(suite.passed(), msg);
        }
        let secs = start.elapsed().as_secs_f64();
        log.check(secs < 300.0, format!("total {secs:.1}s"));
        Ok(())
    })
}

/// All ten criteria in order.
pub fn run_golden(config: &GoldenConfig) -> Vec<CriterionOutcome> {
    let mut out = vec![criterion_1(), criterion_2(config.seed), criterion_3(), criterion_4(config.seed)];
    let (c5, mut scans) = criterion_5();
    let (c6, more) = criterion_6();
    scans.extend(more);
    out.extend([c5, c6, criterion_7(), criterion_8(), criterion_9(&scans)]);
    out.push(criterion_10(config.property_cases, config.seed));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antipode_flips_every_bit() {
        let s = VertexSet::from_indices(8, [0, 3]);
        assert_eq!(antipode(&s), VertexSet::from_indices(8, [7, 4]));
    }

    #[test]
    fn hypercube_subsets_are_seeded() {
        let a = hypercube_subsets(3).unwrap();
        let b = hypercube_subsets(3).unwrap();
        for ((_, _, x), (_, _, y)) in a.iter().zip(&b) {
            assert_eq!(x, y);
            assert!(x.iter().all(|s| !s.is_empty()));
        }
    }

    #[test]
    fn failures_are_reported_not_raised() {
        let outcome = run(0, "broken", |_| Err(crate::error::Error::Precondition("boom".into())));
        assert!(!outcome.passed);
        assert!(outcome.details[0].contains("boom"));
        assert!(outcome.to_string().starts_with("FAIL [ 0] broken"));
    }
}

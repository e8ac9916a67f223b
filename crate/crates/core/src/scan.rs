//! Locating GST times.
//!
//! [`entry_zero_scan`] evaluates every entry function
//! `f_{b,a}(t) = Σ_r e^{iθ_r t} (E_r)_{b,a}` on a grid, refines local minima, and
//! groups the zeros into events whose support structure has more than one atom.
//! The remaining functions produce candidate times from closed forms and audit
//! scan output.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{Graph, SrgParams};
use crate::gst::{has_gst, SupportStructure, DEFAULT_ZERO_TOL};
use crate::spectral::{srg_h, transition, Spectrum};
use crate::vertex_set::VertexSet;

/// Weights below this are treated as exact zeros of the projector entry.
const WEIGHT_FLOOR: f64 = 1e-12;
const TIME_TOL: f64 = 1e-12;
const DEDUPE_TOL: f64 = 1e-9;
const CLUSTER_TOL: f64 = 1e-7;
const MAX_GRID_WORK: usize = 200_000_000;

#[derive(Clone, Debug)]
pub struct ScanParams {
    pub from: f64,
    pub to: f64,
    pub step: f64,
    pub zero_tol: f64,
    pub isolation_delta: f64,
}

impl Default for ScanParams {
    fn default() -> Self {
        ScanParams {
            from: 0.0,
            to: 2.0 * PI,
            step: 1e-3,
            zero_tol: DEFAULT_ZERO_TOL,
            isolation_delta: 1e-4,
        }
    }
}

/// A refined zero of one entry function. `row`/`col` are 0-based here and
/// 1-based when serialized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroHit {
    pub row: usize,
    pub col: usize,
    pub time: f64,
    pub refined_residual: f64,
    pub isolated: bool,
}

impl Serialize for ZeroHit {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("ZeroHit", 5)?;
        st.serialize_field("row", &(self.row + 1))?;
        st.serialize_field("col", &(self.col + 1))?;
        st.serialize_field("time", &self.time)?;
        st.serialize_field("refined_residual", &self.refined_residual)?;
        st.serialize_field("isolated", &self.isolated)?;
        st.end()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanResult {
    pub interval: (f64, f64),
    pub grid_step: f64,
    pub zero_tol: f64,
    pub hits: Vec<ZeroHit>,
    /// Times with more than one support atom, sorted by time.
    pub gst_events: Vec<SupportStructure>,
    pub warnings: Vec<String>,
}

impl ScanResult {
    /// First event at which `(S,T)` is a bijective pair.
    pub fn find_bijective(&self, s: &VertexSet, t: &VertexSet) -> Option<&SupportStructure> {
        self.gst_events.iter().find(|e| e.bijective_target(s).as_ref() == Some(t))
    }
}

fn phase_row(eigenvalues: &[f64], t: f64) -> Vec<Complex64> {
    eigenvalues.iter().map(|&th| Complex64::cis(th * t)).collect()
}

struct EntryFn {
    weights: Vec<f64>,
    eigenvalues: Vec<f64>,
}

impl EntryFn {
    fn new(spec: &Spectrum, b: usize, a: usize) -> Self {
        EntryFn { weights: spec.entry_weights(b, a), eigenvalues: spec.eigenvalues().to_vec() }
    }

    /// `f^{(m)}(t)`.
    fn derivative(&self, m: u32, t: f64) -> Complex64 {
        let i_pow = Complex64::i().powu(m);
        self.weights
            .iter()
            .zip(&self.eigenvalues)
            .map(|(&w, &th)| i_pow * w * th.powi(m as i32) * Complex64::cis(th * t))
            .sum()
    }

    fn abs(&self, t: f64) -> f64 {
        self.derivative(0, t).norm()
    }

    /// `Σ |w_r| |θ_r|^m`, the natural scale of `f^{(m)}`.
    fn scale(&self, m: u32) -> f64 {
        self.weights.iter().zip(&self.eigenvalues).map(|(w, th)| w.abs() * th.abs().powi(m as i32)).sum()
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Sharpens a zero of order `k` by Newton steps on `f^{(k−1)}`, whose zero is simple.
/// Golden section alone stalls on high-order zeros because `|f|` drops below
/// rounding noise over a wide neighbourhood.
fn polish(f: &EntryFn, t: f64, lo: f64, hi: f64) -> f64 {
    for m in 1..=8u32 {
        let d = f.derivative(m, t);
        if d.norm() <= 1e-3 * f.scale(m) {
            continue;
        }
        let mut x = t;
        for _ in 0..30 {
            let h = f.derivative(m - 1, x);
            let dh = f.derivative(m, x);
            let den = dh.norm_sqr();
            if den == 0.0 {
                break;
            }
            let dx = (dh.conj() * h).re / den;
            x -= dx;
            if !(lo..=hi).contains(&x) {
                return t;
            }
            if dx.abs() < 1e-15 * x.abs().max(1.0) {
                break;
            }
        }
        // Both values may sit at the rounding floor; prefer the Newton root there.
        return if f.abs(x) <= f.abs(t).max(1e-13) { x } else { t };
    }
    t
}

/// Checks `|f|` at `t ± δ_j`, `δ_j` geometric from `1e-6` to `delta`.
///
/// Isolated if every sample exceeds `zero_tol`, or failing that, if `|f|` rises
/// away from `t` on both sides (within rounding) and is clearly nonzero at radius
/// `delta`. The second clause admits zeros of order ≥ 2, such as `cos² t` at `π/2`,
/// whose values at `10⁻⁶` fall below any usable threshold.
fn entry_isolated(f: &EntryFn, t: f64, delta: f64, zero_tol: f64) -> bool {
    const NOISE: f64 = 1e-15;
    let base = f.abs(t);
    let lo = 1e-6f64.min(delta);
    let ratio = (delta / lo).powf(0.25);
    let offsets: Vec<f64> = (0..5).map(|j| lo * ratio.powi(j)).collect();
    if offsets.iter().all(|&d| f.abs(t - d) > zero_tol && f.abs(t + d) > zero_tol) {
        return true;
    }
    for sign in [-1.0, 1.0] {
        let mut prev = base;
        for &d in &offsets {
            let v = f.abs(t + sign * d);
            if v + NOISE < prev {
                return false;
            }
            prev = v;
        }
        if prev <= base.max(zero_tol * 1e-4) + NOISE {
            return false;
        }
    }
    true
}

fn adjacency_connected(spec: &Spectrum) -> bool {
    let a = spec.adjacency();
    let n = a.nrows();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for w in 0..n {
            if a[(v, w)] != 0.0 && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Whether the zero recorded by `hit` is isolated; see the rule on the sampled
/// offsets `t ± δ_j` above.
pub fn isolation_check(spec: &Spectrum, hit: &ZeroHit, delta: f64, zero_tol: f64) -> Result<bool> {
    if !adjacency_connected(spec) {
        return Err(Error::Disconnected("isolation_check"));
    }
    if !(delta > 0.0) {
        return Err(Error::Precondition(format!("delta must be positive, got {delta}")));
    }
    Ok(entry_isolated(&EntryFn::new(spec, hit.row, hit.col), hit.time, delta, zero_tol))
}

/// Grid scan of all entry functions over the open interval `(from, to)`.
///
/// Interior grid minima with `|f(t_k)| ≤ L·step` are bracketed, where
/// `L = Σ |θ_r (E_r)_{b,a}|` bounds `|f'|`; any zero within the bracket passes
/// this test. Each bracket is refined by golden section to time tolerance `1e-12`
/// and kept if `|f| ≤ zero_tol`.
pub fn entry_zero_scan(spec: &Spectrum, params: &ScanParams) -> Result<ScanResult> {
    let ScanParams { from, to, step, zero_tol, isolation_delta } = *params;
    if !(step > 0.0) || !from.is_finite() || !to.is_finite() || from >= to {
        return Err(Error::Precondition(format!("bad scan interval [{from}, {to}] with step {step}")));
    }
    let n = spec.n();
    let eig = spec.eigenvalues();
    let steps = ((to - from) / step).ceil() as usize;
    if steps.saturating_mul(eig.len()) > MAX_GRID_WORK {
        return Err(Error::TooLarge(format!("{steps} grid points × {} eigenvalues", eig.len())));
    }
    let grid: Vec<f64> = (0..=steps).map(|k| if k == steps { to } else { from + k as f64 * step }).collect();
    let phases: Vec<Vec<Complex64>> = grid.par_iter().map(|&t| phase_row(eig, t)).collect();

    let mut warnings = Vec::new();
    if spec.spread() * step > 0.5 {
        warnings.push(format!(
            "grid step {step} is coarse for spectral spread {:.6}; zeros may be missed",
            spec.spread()
        ));
    }
    let connected = adjacency_connected(spec);
    if !connected {
        warnings.push("graph is disconnected; zeros are not isolation-checked".into());
    }

    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (b, a))).collect();
    let per_pair: Vec<Vec<ZeroHit>> = pairs
        .par_iter()
        .map(|&(b, a)| {
            let f = EntryFn::new(spec, b, a);
            if f.weights.iter().all(|w| w.abs() <= WEIGHT_FLOOR) {
                return Vec::new();
            }
            let lip = f.scale(1);
            let mags: Vec<f64> = phases
                .iter()
                .map(|row| row.iter().zip(&f.weights).map(|(p, &w)| p * w).sum::<Complex64>().norm())
                .collect();
            let mut hits: Vec<ZeroHit> = Vec::new();
            for k in 1..steps {
                let m = mags[k];
                if m > mags[k - 1] || m > mags[k + 1] || m > lip * step + zero_tol {
                    continue;
                }
                let (lo, hi) = (grid[k - 1], grid[k + 1]);
                let (t0, _) = golden_min(|t| f.abs(t), lo, hi, TIME_TOL);
                let t = polish(&f, t0, lo, hi);
                let r = f.abs(t);
                if r > zero_tol || t <= from || t >= to {
                    continue;
                }
                if hits.last().is_some_and(|h| (h.time - t).abs() <= DEDUPE_TOL) {
                    continue;
                }
                let isolated = connected && entry_isolated(&f, t, isolation_delta, zero_tol);
                hits.push(ZeroHit { row: b, col: a, time: t, refined_residual: r, isolated });
                if a != b {
                    hits.push(ZeroHit { row: a, col: b, time: t, refined_residual: r, isolated });
                }
            }
            hits
        })
        .collect();

    let mut hits: Vec<ZeroHit> = per_pair.into_iter().flatten().collect();
    hits.sort_by(|x, y| x.time.total_cmp(&y.time).then(x.row.cmp(&y.row)).then(x.col.cmp(&y.col)));
    let unisolated = hits.iter().filter(|h| !h.isolated).count();
    if connected && unisolated > 0 {
        warnings.push(format!("{unisolated} zero hits failed the isolation check at delta {isolation_delta}"));
    }

    let gst_events = events_from_hits(spec, &hits, zero_tol);
    Ok(ScanResult {
        interval: (from, to),
        grid_step: step,
        zero_tol,
        hits,
        gst_events,
        warnings,
    })
}

/// Clusters hit times and keeps the clusters whose support structure is nontrivial.
fn events_from_hits(spec: &Spectrum, hits: &[ZeroHit], zero_tol: f64) -> Vec<SupportStructure> {
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for h in hits {
        match clusters.last_mut() {
            Some(c) if h.time - c.last().unwrap() <= CLUSTER_TOL => c.push(h.time),
            _ => clusters.push(vec![h.time]),
        }
    }
    clusters
        .par_iter()
        .filter_map(|c| {
            let t = c[c.len() / 2];
            let st = SupportStructure::new(&transition(spec, t), zero_tol);
            st.is_nontrivial().then_some(st)
        })
        .collect()
}

/// A closed-form candidate time, checked numerically by [`verify_candidates`].
#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    pub family: String,
    pub time: f64,
    /// `time = 2π p / q` when the candidate is an exact rational multiple of 2π.
    pub exact: Option<(i64, u64)>,
    pub pairs: Vec<(VertexSet, VertexSet)>,
    pub residual: Option<f64>,
    pub note: Option<String>,
}

impl Candidate {
    fn new(family: impl Into<String>, time: f64, pairs: Vec<(VertexSet, VertexSet)>) -> Self {
        Candidate { family: family.into(), time, exact: None, pairs, residual: None, note: None }
    }

    pub fn verified(&self, tol: f64) -> bool {
        self.residual.is_some_and(|r| r < tol)
    }
}

/// Fills `residual` with the largest GST residual over each candidate's pairs.
pub fn verify_candidates(spec: &Spectrum, candidates: &mut [Candidate], zero_tol: f64) {
    for c in candidates.iter_mut() {
        let r = c
            .pairs
            .iter()
            .map(|(s, t)| has_gst(spec, s, t, c.time, zero_tol).residual)
            .fold(0.0, f64::max);
        c.residual = Some(r);
    }
}

fn rationalize(x: f64, bound: u64, tol: f64) -> Option<(i64, u64)> {
    (1..=bound).find_map(|q| {
        let p = (x * q as f64).round();
        ((x - p / q as f64).abs() <= tol).then_some((p as i64, q))
    })
}

/// Bipartite candidate times: scale `A` by the smallest `α > 0` making every
/// `αθ_r` an integer. Then `(V₀,V₀)` and `(V₁,V₁)` transfer at `πα`, and if every
/// scaled eigenvalue is odd, `(V₀,V₁)` and `(V₁,V₀)` transfer at `πα/2`.
pub fn bipartite_times(graph: &Graph, spec: &Spectrum, denominator_bound: u64) -> Result<Vec<Candidate>> {
    let (v0, v1) = graph
        .bipartition()?
        .ok_or_else(|| Error::Precondition("graph is not bipartite".into()))?;
    let eig = spec.eigenvalues();
    let tol = spec.eigen_tol();
    let Some(theta_min) = eig.iter().copied().filter(|&x| x > tol).min_by(f64::total_cmp) else {
        return Ok(Vec::new());
    };
    let mut ratios = Vec::with_capacity(eig.len());
    for &th in eig {
        match rationalize(th / theta_min, denominator_bound, 1e-9) {
            Some(r) => ratios.push(r),
            None => return Ok(Vec::new()),
        }
    }
    let lcm = ratios.iter().fold(1u64, |acc, &(_, q)| acc.lcm(&q));
    let ints: Vec<i64> = ratios.iter().map(|&(p, q)| p * (lcm / q) as i64).collect();
    let g = ints.iter().fold(0i64, |acc, &k| acc.gcd(&k)).max(1);
    let scaled: Vec<i64> = ints.iter().map(|k| k / g).collect();
    let alpha = lcm as f64 / (g as f64 * theta_min);
    let exact = (theta_min - theta_min.round()).abs() < 1e-9;
    let two_pi_rational = |num: u64, den: u64| {
        // π·lcm/(g·θ) · num/den = 2π · (lcm·num) / (2·g·θ·den) for integral θ
        let p = lcm * num;
        let q = 2 * g as u64 * theta_min.round() as u64 * den;
        let d = p.gcd(&q);
        ((p / d) as i64, q / d)
    };

    let mut out = Vec::new();
    let mut a = Candidate::new("bipartite (a)", PI * alpha, vec![(v0.clone(), v0.clone()), (v1.clone(), v1.clone())]);
    a.note = Some(format!("alpha = {alpha}; scaled eigenvalues {scaled:?}"));
    if exact {
        a.exact = Some(two_pi_rational(1, 1));
    }
    out.push(a);
    if scaled.iter().all(|k| k % 2 != 0) {
        let mut b = Candidate::new("bipartite (b)", PI * alpha / 2.0, vec![(v0.clone(), v1.clone()), (v1, v0)]);
        b.note = Some(format!("alpha = {alpha}; all scaled eigenvalues odd"));
        if exact {
            b.exact = Some(two_pi_rational(1, 2));
        }
        out.push(b);
    }
    Ok(out)
}

/// `D = (k₁−k₂)² + 4m₁m₂`.
pub fn join_discriminant(k1: usize, m1: usize, k2: usize, m2: usize) -> f64 {
    let dk = k1 as f64 - k2 as f64;
    dk * dk + 4.0 * (m1 * m2) as f64
}

/// Times `2ℓπ/√D`, `ℓ = 1..=count`, for the join of a `k₁`-regular graph on `m₁`
/// vertices (listed first) with a `k₂`-regular graph on `m₂` vertices.
pub fn join_times(k1: usize, m1: usize, k2: usize, m2: usize, count: usize) -> Vec<Candidate> {
    let n = m1 + m2;
    let x1 = VertexSet::from_indices(n, 0..m1);
    let x2 = x1.complement();
    let d = join_discriminant(k1, m1, k2, m2);
    let sqrt_d = d.sqrt();
    let perfect = (sqrt_d.round() * sqrt_d.round() - d).abs() < 0.5;
    (1..=count)
        .map(|l| {
            let mut c = Candidate::new(
                "join",
                2.0 * PI * l as f64 / sqrt_d,
                vec![(x1.clone(), x1.clone()), (x2.clone(), x2.clone())],
            );
            if perfect {
                let (p, q) = (l as u64, sqrt_d.round() as u64);
                let g = p.gcd(&q);
                c.exact = Some(((p / g) as i64, q / g));
            }
            c.note = Some(format!(
                "D = {d}; uses sqrt(D). Taking k1 + k2 ± sqrt(D) under the radical instead fails on K3 (|U(pi)_21| = 2/3)"
            ));
            c
        })
        .collect()
}

/// The double star on `2k+2` vertices, its candidate time `2π/√(4k+1)`, and `S = {1,2}`.
pub fn double_star_time(k: usize) -> Result<(Graph, f64, VertexSet)> {
    let g = crate::graph::GeneratorSpec::DoubleStar(k).build()?;
    let s = VertexSet::from_indices(g.n(), [0, 1]);
    Ok((g, 2.0 * PI / ((4 * k + 1) as f64).sqrt(), s))
}

/// Targets of a strongly regular candidate, resolved against a concrete graph by [`SrgTarget::pairs`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SrgTarget {
    /// `U(τ) = I`: every vertex is periodic.
    Identity,
    /// `({b}, V∖X(b))` for every vertex `b`.
    OwnPart,
    /// `(V₀,V₀)` and `(V₁,V₁)` for the bipartition.
    Bipartition,
}

impl SrgTarget {
    pub fn pairs(&self, graph: &Graph) -> Result<Vec<(VertexSet, VertexSet)>> {
        let n = graph.n();
        Ok(match self {
            SrgTarget::Identity => (0..n).map(|b| (VertexSet::singleton(n, b), VertexSet::singleton(n, b))).collect(),
            SrgTarget::OwnPart => (0..n)
                .map(|b| (VertexSet::singleton(n, b), graph.neighbours(b).complement()))
                .collect(),
            SrgTarget::Bipartition => {
                let (v0, v1) = graph
                    .bipartition()?
                    .ok_or_else(|| Error::Precondition("graph is not bipartite".into()))?;
                vec![(v0.clone(), v0), (v1.clone(), v1)]
            }
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SrgCandidate {
    pub case: char,
    pub time: f64,
    pub target: SrgTarget,
    /// Largest `|U(τ)_{b,a}|` that must vanish, from the closed forms `h_δ`.
    pub residual: f64,
    /// Whether the transfer is maximal (the target equals the forward image).
    pub maximal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConferenceSweep {
    pub bound: u64,
    pub tolerance: f64,
    pub solutions: Vec<u64>,
    pub closest_b: u64,
    pub closest_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SrgCandidates {
    pub params: SrgParams,
    pub candidates: Vec<SrgCandidate>,
    pub conference: Option<ConferenceSweep>,
}

/// `|cos(πB/√ν) + 1/(4m)|` minimized over `1 ≤ B ≤ bound`.
pub fn conference_sweep(nu: usize, m: usize, bound: u64, tolerance: f64) -> ConferenceSweep {
    let root = (nu as f64).sqrt();
    let target = -1.0 / (4.0 * m as f64);
    let devs: Vec<(u64, f64)> = (1..=bound)
        .into_par_iter()
        .map(|b| (b, ((PI * b as f64 / root).cos() - target).abs()))
        .collect();
    let (closest_b, closest_deviation) = devs
        .iter()
        .copied()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap_or((0, f64::INFINITY));
    ConferenceSweep {
        bound,
        tolerance,
        solutions: devs.iter().filter(|d| d.1 < tolerance).map(|d| d.0).collect(),
        closest_b,
        closest_deviation,
    }
}

/// Candidate times in `(0, 2π)` from the strongly regular case analysis.
///
/// Case (b) emits every `τ = 2πj/ν`: at these times `e^{iκτ} = e^{−imτ}`, so
/// `U(τ)` is block diagonal on the parts, and the transfer is maximal unless
/// `U(τ) = I`. The times `2πℓ/m` are the subset where `U(τ) = I`.
pub fn srg_times(params: &SrgParams, conference_bound: u64) -> Result<SrgCandidates> {
    let p = *params;
    if !p.is_feasible() {
        return Err(Error::InfeasibleSrg(format!("{p:?}")));
    }
    let nu = p.nu as f64;
    let (th1, th2) = p.restricted_eigenvalues();
    let int = |x: f64| (x - x.round()).abs() < 1e-9;
    let eval = |t: f64, target: SrgTarget| -> Result<(f64, bool)> {
        let (h0, h1, h2) = srg_h(&p, t)?;
        let (h0, h1, h2) = (h0.norm() / nu, h1.norm() / nu, h2.norm() / nu);
        Ok(match target {
            SrgTarget::Identity => (h1.max(h2), true),
            SrgTarget::OwnPart => (h1, h0 > DEFAULT_ZERO_TOL && h2 > DEFAULT_ZERO_TOL),
            SrgTarget::Bipartition => (h1, h0 > DEFAULT_ZERO_TOL || h2 > DEFAULT_ZERO_TOL),
        })
    };
    let mut candidates = Vec::new();
    let mut push = |case, time, target| -> Result<()> {
        let (residual, maximal) = eval(time, target)?;
        candidates.push(SrgCandidate { case, time, target, residual, maximal });
        Ok(())
    };

    if int(th1) && int(th2) {
        let d = [p.kappa as i64, th1.round() as i64, th2.round() as i64]
            .iter()
            .fold(0i64, |acc, &x| acc.gcd(&x));
        if d >= 2 {
            for l in 1..d {
                push('a', 2.0 * PI * l as f64 / d as f64, SrgTarget::Identity)?;
            }
        }
    }
    let m = p.nu - p.kappa;
    let multipartite = p.mu == p.kappa && p.nu.is_multiple_of(m) && p.lambda + 2 * m == p.nu;
    if multipartite && p.nu / m > 2 {
        for j in 1..p.nu {
            push('b', 2.0 * PI * j as f64 / nu, SrgTarget::OwnPart)?;
        }
    }
    if p.nu == 2 * p.kappa && p.lambda == 0 && p.mu == p.kappa {
        for d in (1..=p.kappa).filter(|d| p.kappa.is_multiple_of(*d)) {
            push('c', PI / d as f64, SrgTarget::Bipartition)?;
        }
    }
    let conference = if p.is_conference() {
        Some(conference_sweep(p.nu, p.mu, conference_bound, 1e-9))
    } else {
        None
    };
    candidates.sort_by(|x, y| x.time.total_cmp(&y.time).then(x.case.cmp(&y.case)));
    Ok(SrgCandidates { params: p, candidates, conference })
}

#[derive(Clone, Debug, Serialize)]
pub struct MonogamyViolation {
    pub source: VertexSet,
    pub targets: Vec<VertexSet>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct MonogamyAudit {
    pub sources_checked: usize,
    pub violations: Vec<MonogamyViolation>,
}

/// For every atom source appearing in an event, collects its bijective partners at
/// every event time and flags sources with more than one partner other than themselves.
pub fn monogamy_audit(results: &[&ScanResult]) -> MonogamyAudit {
    let mut audit = MonogamyAudit::default();
    for result in results {
        let sources: BTreeSet<VertexSet> = result
            .gst_events
            .iter()
            .flat_map(|e| e.atoms.iter().map(|a| a.source.clone()))
            .collect();
        for s in sources {
            let mut partners: BTreeMap<VertexSet, ()> = BTreeMap::new();
            for e in &result.gst_events {
                if let Some(t) = e.bijective_target(&s) {
                    if t != s {
                        partners.insert(t, ());
                    }
                }
            }
            audit.sources_checked += 1;
            if partners.len() > 1 {
                audit.violations.push(MonogamyViolation { source: s, targets: partners.into_keys().collect() });
            }
        }
    }
    audit
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GeneratorSpec;
    use crate::spectral::decompose;

    fn spectrum(spec: &GeneratorSpec) -> Spectrum {
        decompose(&spec.build().unwrap(), None).unwrap()
    }

    fn set(n: usize, v: &[usize]) -> VertexSet {
        VertexSet::from_one_based(n, v).unwrap()
    }

    fn scan(spec: &Spectrum, from: f64, to: f64) -> ScanResult {
        entry_zero_scan(spec, &ScanParams { from, to, ..Default::default() }).unwrap()
    }

    #[test]
    fn golden_section_finds_quadratic_minimum() {
        let (x, v) = golden_min(|t| (t - 0.3).abs(), 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-11 && v < 1e-11);
    }

    #[test]
    fn k2_hits() {
        let k2 = spectrum(&GeneratorSpec::Complete(2));
        let r = scan(&k2, 0.0, 4.0);
        let diag: Vec<_> = r.hits.iter().filter(|h| h.row == h.col).collect();
        assert_eq!(diag.len(), 2);
        assert!(diag.iter().all(|h| (h.time - PI / 2.0).abs() < 1e-12 && h.isolated));
        let off: Vec<_> = r.hits.iter().filter(|h| h.row != h.col).collect();
        assert_eq!(off.len(), 2);
        assert!(off.iter().all(|h| (h.time - PI).abs() < 1e-12));
        assert_eq!(r.gst_events.len(), 2);
        assert!(r.find_bijective(&set(2, &[1]), &set(2, &[2])).is_some());
    }

    #[test]
    fn endpoints_are_excluded() {
        let k2 = spectrum(&GeneratorSpec::Complete(2));
        let r = scan(&k2, 0.0, PI);
        assert!(r.hits.iter().all(|h| h.time > 0.0 && h.time < PI));
        assert_eq!(r.gst_events.len(), 1);
    }

    #[test]
    fn high_order_zeros_are_polished() {
        let q3 = spectrum(&GeneratorSpec::Hypercube(3));
        let r = scan(&q3, 1.0, 2.0);
        assert!(!r.hits.is_empty());
        for h in &r.hits {
            assert!((h.time - PI / 2.0).abs() < 1e-9, "{h:?}");
        }
        assert_eq!(r.gst_events.len(), 1);
        assert_eq!(r.gst_events[0].atoms.len(), 8);
    }

    #[test]
    fn double_star_event() {
        let ds = spectrum(&GeneratorSpec::DoubleStar(2));
        let r = scan(&ds, 0.5, 3.0);
        let s = set(6, &[1, 2]);
        let e = r.find_bijective(&s, &s).expect("event near 2π/3");
        assert!((e.time - 2.0 * PI / 3.0).abs() < 1e-9);
        assert!(r.hits.iter().all(|h| h.refined_residual <= 1e-9));
    }

    #[test]
    fn petersen_has_no_events() {
        let pet = spectrum(&GeneratorSpec::Petersen);
        let r = scan(&pet, 1e-3, 2.0 * PI);
        assert!(r.gst_events.is_empty());
    }

    #[test]
    fn event_times_stable_under_halving() {
        for spec in [GeneratorSpec::Hypercube(2), GeneratorSpec::DoubleStar(2), GeneratorSpec::Complete(3)] {
            let s = spectrum(&spec);
            let coarse = scan(&s, 0.1, 7.0);
            let fine = entry_zero_scan(&s, &ScanParams { from: 0.1, to: 7.0, step: 5e-4, ..Default::default() }).unwrap();
            assert_eq!(coarse.gst_events.len(), fine.gst_events.len(), "{spec}");
            for (a, b) in coarse.gst_events.iter().zip(&fine.gst_events) {
                assert!((a.time - b.time).abs() < 1e-9, "{spec}: {} vs {}", a.time, b.time);
            }
        }
    }

    #[test]
    fn coarse_grid_warns() {
        let pet = spectrum(&GeneratorSpec::Petersen);
        let r = entry_zero_scan(&pet, &ScanParams { from: 0.0, to: 5.0, step: 0.2, ..Default::default() }).unwrap();
        assert!(r.warnings.iter().any(|w| w.contains("coarse")));
    }

    #[test]
    fn bad_parameters() {
        let k2 = spectrum(&GeneratorSpec::Complete(2));
        for (from, to, step) in [(0.0, 1.0, 0.0), (1.0, 0.0, 0.1), (0.0, f64::INFINITY, 0.1)] {
            assert!(entry_zero_scan(&k2, &ScanParams { from, to, step, ..Default::default() }).is_err());
        }
    }

    #[test]
    fn bipartite_examples() {
        let q3 = GeneratorSpec::Hypercube(3).build().unwrap();
        let s = decompose(&q3, None).unwrap();
        let mut c = bipartite_times(&q3, &s, 64).unwrap();
        verify_candidates(&s, &mut c, 1e-9);
        assert_eq!(c.len(), 2);
        assert!((c[1].time - PI / 2.0).abs() < 1e-12 && c[1].family == "bipartite (b)");
        assert_eq!(c[1].exact, Some((1, 4)));
        assert!(c.iter().all(|x| x.verified(1e-9)));

        let p3 = GeneratorSpec::Path(3).build().unwrap();
        let s = decompose(&p3, None).unwrap();
        let mut c = bipartite_times(&p3, &s, 64).unwrap();
        verify_candidates(&s, &mut c, 1e-9);
        assert_eq!(c.len(), 1);
        assert!((c[0].time - PI / 2f64.sqrt()).abs() < 1e-12);
        assert!(c[0].verified(1e-10));

        let c4 = GeneratorSpec::Cycle(4).build().unwrap();
        let s = decompose(&c4, None).unwrap();
        let mut c = bipartite_times(&c4, &s, 64).unwrap();
        verify_candidates(&s, &mut c, 1e-9);
        assert_eq!(c.len(), 1);
        assert!((c[0].time - PI / 2.0).abs() < 1e-12);
        assert!(c[0].verified(1e-10));

        let k3 = GeneratorSpec::Complete(3).build().unwrap();
        assert!(bipartite_times(&k3, &decompose(&k3, None).unwrap(), 64).is_err());
    }

    #[test]
    fn join_examples() {
        // K₁ + K₂ = K₃, 2K₁ + 2K₁ = C₄, K₁ + C₄ = wheel.
        let cases = [
            ("join(complete:1,complete:2)", (0, 1, 1, 2), 2.0 * PI / 3.0),
            ("join(complement(complete:2),complement(complete:2))", (0, 2, 0, 2), PI / 2.0),
            ("join(complete:1,cycle:4)", (0, 1, 2, 4), 2.0 * PI / 20f64.sqrt()),
        ];
        for (dsl, (k1, m1, k2, m2), expected) in cases {
            let g = crate::io::dsl::parse_graph_dsl(dsl).unwrap().build().unwrap();
            let s = decompose(&g, None).unwrap();
            let mut c = join_times(k1, m1, k2, m2, 3);
            verify_candidates(&s, &mut c, 1e-9);
            assert!((c[0].time - expected).abs() < 1e-12, "{dsl}");
            assert!(c.iter().all(|x| x.verified(1e-9)), "{dsl}: {c:?}");
        }
        // The displayed k₁+k₂+√D would give τ = π on K₃, where U(π)_{2,1} = 2/3.
        let k3 = decompose(&GeneratorSpec::Complete(3).build().unwrap(), None).unwrap();
        assert!((transition(&k3, PI).get(1, 0).norm() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn double_star_times() {
        for k in 1..=8 {
            let (g, t, s) = double_star_time(k).unwrap();
            let spec = decompose(&g, None).unwrap();
            assert!(has_gst(&spec, &s, &s, t, 1e-9).residual < 1e-10, "k = {k}");
        }
        assert!((double_star_time(6).unwrap().1 - 2.0 * PI / 5.0).abs() < 1e-15);
    }

    #[test]
    fn srg_cases() {
        let c = srg_times(&SrgParams::new(6, 4, 2, 4), 100).unwrap();
        let at_pi: Vec<_> = c.candidates.iter().filter(|x| (x.time - PI).abs() < 1e-12).collect();
        assert!(at_pi.iter().any(|x| x.case == 'b'));
        assert!(c.candidates.iter().filter(|x| x.case == 'b').all(|x| x.residual < 1e-12));
        // 2π/3 is maximal; π is where U = I.
        let b = |t: f64| c.candidates.iter().find(|x| x.case == 'b' && (x.time - t).abs() < 1e-12).unwrap();
        assert!(b(2.0 * PI / 3.0).maximal && !b(PI).maximal);

        let c = srg_times(&SrgParams::new(6, 3, 0, 3), 100).unwrap();
        let cs: Vec<f64> = c.candidates.iter().filter(|x| x.case == 'c').map(|x| x.time).collect();
        assert_eq!(cs.len(), 2);
        assert!((cs[0] - PI / 3.0).abs() < 1e-12 && (cs[1] - PI).abs() < 1e-12);
        assert!(c.candidates.iter().all(|x| x.residual < 1e-12));

        let c = srg_times(&SrgParams::new(10, 3, 0, 1), 100).unwrap();
        assert!(c.candidates.is_empty() && c.conference.is_none());

        let c = srg_times(&SrgParams::new(5, 2, 0, 1), 100_000).unwrap();
        let sweep = c.conference.unwrap();
        assert!(sweep.solutions.is_empty());
        assert!(sweep.closest_deviation > 1e-9);
    }

    #[test]
    fn srg_candidates_match_dense_evaluation() {
        let g = GeneratorSpec::CompleteMultipartite { parts: 3, size: 2 }.build().unwrap();
        let spec = decompose(&g, None).unwrap();
        let c = srg_times(&g.recognize_srg().unwrap(), 10).unwrap();
        for cand in &c.candidates {
            for (s, t) in cand.target.pairs(&g).unwrap() {
                let r = has_gst(&spec, &s, &t, cand.time, 1e-9);
                assert!(r.holds, "{cand:?}");
                assert_eq!(r.forward_image == t, cand.maximal, "{cand:?}");
            }
        }
    }

    #[test]
    fn monogamy_examples() {
        for (spec, to) in [
            (GeneratorSpec::Complete(2), 4.0 * PI),
            (GeneratorSpec::Hypercube(2), 2.0 * PI),
            (GeneratorSpec::DoubleStar(2), 4.0 * PI),
        ] {
            let s = spectrum(&spec);
            let r = scan(&s, 0.0, to);
            assert!(!r.gst_events.is_empty());
            let audit = monogamy_audit(&[&r]);
            assert!(audit.sources_checked > 0);
            assert!(audit.violations.is_empty(), "{spec}: {:?}", audit.violations);
        }
        let q2 = scan(&spectrum(&GeneratorSpec::Hypercube(2)), 0.0, 2.0 * PI);
        let e = q2.find_bijective(&set(4, &[1]), &set(4, &[4]));
        assert!(e.is_some());
    }

    #[test]
    fn isolation_examples() {
        let k2 = spectrum(&GeneratorSpec::Complete(2));
        let hit = ZeroHit { row: 0, col: 0, time: PI / 2.0, refined_residual: 0.0, isolated: true };
        assert!(isolation_check(&k2, &hit, 1e-4, 1e-9).unwrap());

        let c4 = spectrum(&GeneratorSpec::Cycle(4));
        let hit = ZeroHit { row: 0, col: 2, time: PI / 2.0, refined_residual: 0.0, isolated: true };
        assert!(isolation_check(&c4, &hit, 1e-4, 1e-9).unwrap());

        let two_k2 = decompose(&crate::io::dsl::parse_graph_dsl("edges:4:1-2,3-4").unwrap().build().unwrap(), None)
            .unwrap();
        assert!(matches!(isolation_check(&two_k2, &hit, 1e-4, 1e-9), Err(Error::Disconnected(_))));
    }
}

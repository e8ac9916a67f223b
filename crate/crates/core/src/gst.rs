//! Group state transfer: the forward map `F(S,t)`, the inverse map `I(S,t)`,
//! the t-closure, the GST predicate with its classification, and the checks
//! that follow from equal-cardinality transfer.
//!
//! Support decisions use one absolute threshold `zero_tol` on `|U(t)_{b,a}|`.
//! Entries in `(zero_tol, 10·zero_tol)` are reported as borderline.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{transition, Spectrum, TransitionMatrix};
use crate::vertex_set::VertexSet;

pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GstFlag {
    Trivial,
    Maximal,
    Bijective,
    Periodic,
    Pst,
    FractionalRevival,
    ProperFractionalRevival,
}

/// Entry whose magnitude lies just above the zero threshold.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BorderlineEntry {
    /// 1-based row.
    pub row: usize,
    /// 1-based column.
    pub col: usize,
    pub magnitude: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GstReport {
    pub source: VertexSet,
    pub target: VertexSet,
    pub time: f64,
    pub holds: bool,
    pub residual: f64,
    pub classification: BTreeSet<GstFlag>,
    pub forward_image: VertexSet,
    pub borderline: Vec<BorderlineEntry>,
}

impl GstReport {
    pub fn has(&self, flag: GstFlag) -> bool {
        self.classification.contains(&flag)
    }
}

fn check_universe(u: &TransitionMatrix, s: &VertexSet) {
    assert_eq!(u.n(), s.universe(), "vertex set universe does not match the graph");
}

impl TransitionMatrix {
    /// Rows where column `a` is supported.
    pub fn column_support(&self, a: usize, zero_tol: f64) -> VertexSet {
        let n = self.n();
        VertexSet::from_indices(n, (0..n).filter(|&b| self.get(b, a).norm() > zero_tol))
    }

    /// `F(S,t)`: union of the column supports over `S`.
    pub fn forward_set(&self, s: &VertexSet, zero_tol: f64) -> VertexSet {
        check_universe(self, s);
        let n = self.n();
        let mut out = VertexSet::empty(n);
        for a in s.iter() {
            for b in 0..n {
                if !out.contains(b) && self.get(b, a).norm() > zero_tol {
                    out.insert(b);
                }
            }
        }
        out
    }

    /// `max_{a∈S, b∉T} |U_{b,a}|`, zero when nothing is outside `T`.
    pub fn residual(&self, s: &VertexSet, t: &VertexSet) -> f64 {
        check_universe(self, s);
        check_universe(self, t);
        let outside = t.complement();
        let mut worst = 0.0f64;
        for a in s.iter() {
            for b in outside.iter() {
                worst = worst.max(self.get(b, a).norm());
            }
        }
        worst
    }
}

/// `F(S,t) = {a : ∃ b∈S, |U(t)_{a,b}| > zero_tol}`.
pub fn forward_set(spec: &Spectrum, s: &VertexSet, t: f64, zero_tol: f64) -> VertexSet {
    transition(spec, t).forward_set(s, zero_tol)
}

/// `I(S,t) = {a : F({a}, −t) ⊆ S}`, i.e. the column of `U(−t)` at `a` is supported in `S`.
pub fn inverse_set(spec: &Spectrum, s: &VertexSet, t: f64, zero_tol: f64) -> VertexSet {
    inverse_set_from(&transition(spec, -t), s, zero_tol)
}

/// `I(S,t)` from a precomputed `U(−t)`.
pub fn inverse_set_from(u_reversed: &TransitionMatrix, s: &VertexSet, zero_tol: f64) -> VertexSet {
    check_universe(u_reversed, s);
    let n = u_reversed.n();
    VertexSet::from_indices(
        n,
        (0..n).filter(|&a| u_reversed.column_support(a, zero_tol).is_subset(s)),
    )
}

/// t-closure `I(F(S,t), −t) = {a : F({a},t) ⊆ F(S,t)}`.
pub fn closure(spec: &Spectrum, s: &VertexSet, t: f64, zero_tol: f64) -> VertexSet {
    closure_from(&transition(spec, t), s, zero_tol)
}

pub fn closure_from(u: &TransitionMatrix, s: &VertexSet, zero_tol: f64) -> VertexSet {
    let image = u.forward_set(s, zero_tol);
    inverse_set_from(u, &image, zero_tol)
}

/// Evaluates `(S,T)`-GST at time `t`.
pub fn has_gst(spec: &Spectrum, s: &VertexSet, t_set: &VertexSet, t: f64, zero_tol: f64) -> GstReport {
    has_gst_from(&transition(spec, t), s, t_set, zero_tol)
}

pub fn has_gst_from(u: &TransitionMatrix, s: &VertexSet, target: &VertexSet, zero_tol: f64) -> GstReport {
    let forward_image = u.forward_set(s, zero_tol);
    let residual = u.residual(s, target);
    let holds = forward_image.is_subset(target);
    debug_assert_eq!(holds, residual <= zero_tol);

    let mut borderline = Vec::new();
    for a in s.iter() {
        for b in 0..u.n() {
            let m = u.get(b, a).norm();
            if m > zero_tol && m < 10.0 * zero_tol {
                borderline.push(BorderlineEntry { row: b + 1, col: a + 1, magnitude: m });
            }
        }
    }

    let mut report = GstReport {
        source: s.clone(),
        target: target.clone(),
        time: u.time,
        holds,
        residual,
        classification: BTreeSet::new(),
        forward_image,
        borderline,
    };
    report.classification = classify(&report, u, zero_tol);
    report
}

/// Classification flags of a report; empty when the transfer does not hold.
///
/// `fractional_revival` is `({a},{a,b})`-GST in the broad sense, which also covers
/// periodicity at `a` and PST to `b`; `proper_fractional_revival` requires both
/// amplitudes on `{a,b}` to exceed `zero_tol`.
pub fn classify(report: &GstReport, u: &TransitionMatrix, zero_tol: f64) -> BTreeSet<GstFlag> {
    let mut flags = BTreeSet::new();
    if !report.holds {
        return flags;
    }
    let (s, t, image) = (&report.source, &report.target, &report.forward_image);
    if s.is_empty() || t.is_full() {
        flags.insert(GstFlag::Trivial);
    }
    let maximal = t == image;
    if maximal {
        flags.insert(GstFlag::Maximal);
    }
    let bijective = maximal && s.len() == t.len();
    if bijective {
        flags.insert(GstFlag::Bijective);
        if s == t {
            flags.insert(GstFlag::Periodic);
        }
        if s.len() == 1 && s != t {
            flags.insert(GstFlag::Pst);
        }
    }
    if s.len() == 1 && t.len() == 2 && s.is_subset(t) {
        flags.insert(GstFlag::FractionalRevival);
        let a = s.iter().next().unwrap();
        if t.iter().all(|b| u.get(b, a).norm() > zero_tol) {
            flags.insert(GstFlag::ProperFractionalRevival);
        }
    }
    flags
}

/// `(V∖T, V∖S)`-GST, which holds exactly when `(S,T)`-GST does.
pub fn complement_transfer(spec: &Spectrum, s: &VertexSet, t_set: &VertexSet, t: f64, zero_tol: f64) -> GstReport {
    has_gst(spec, &t_set.complement(), &s.complement(), t, zero_tol)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClauseCheck {
    pub clause: char,
    pub description: &'static str,
    pub source: VertexSet,
    pub target: VertexSet,
    pub time: f64,
    pub holds: bool,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EqualCardReport {
    pub source: VertexSet,
    pub target: VertexSet,
    pub time: f64,
    pub clauses: Vec<ClauseCheck>,
}

impl EqualCardReport {
    pub fn all_hold(&self) -> bool {
        self.clauses.iter().all(|c| c.holds)
    }

    pub fn max_residual(&self) -> f64 {
        self.clauses.iter().fold(0.0, |m, c| m.max(c.residual))
    }
}

/// Checks the six consequences of bijective `(S,T)`-GST at `t`:
/// (a) `(T,S)` at t; (b) `(S∖I, T∖I)` at t; (c) `(T∖I, S∖I)` at t; (d) `I` periodic at t;
/// (e) `S` and `T` periodic at 2t; (f) `V∖(S∪T)` periodic at t, where `I = S∩T`.
pub fn equal_card_structure(
    spec: &Spectrum,
    s: &VertexSet,
    t_set: &VertexSet,
    t: f64,
    zero_tol: f64,
) -> Result<EqualCardReport> {
    if s.len() != t_set.len() {
        return Err(Error::Precondition(format!("|S| = {} differs from |T| = {}", s.len(), t_set.len())));
    }
    let u = transition(spec, t);
    let base = has_gst_from(&u, s, t_set, zero_tol);
    if !base.holds {
        return Err(Error::Precondition(format!(
            "({s},{t_set})-GST does not hold at t = {t} (residual {:.3e})",
            base.residual
        )));
    }
    let u2 = transition(spec, 2.0 * t);
    let inter = s.intersection(t_set);
    let rest = s.union(t_set).complement();
    let s_only = s.difference(&inter);
    let t_only = t_set.difference(&inter);

    let mut clauses = Vec::new();
    let mut push = |clause, description, u: &TransitionMatrix, src: &VertexSet, dst: &VertexSet| {
        let r = has_gst_from(u, src, dst, zero_tol);
        clauses.push(ClauseCheck {
            clause,
            description,
            source: src.clone(),
            target: dst.clone(),
            time: u.time,
            holds: r.holds,
            residual: r.residual,
        });
    };
    push('a', "(T,S)-GST at t", &u, t_set, s);
    push('b', "(S\\I, T\\I)-GST at t", &u, &s_only, &t_only);
    push('c', "(T\\I, S\\I)-GST at t", &u, &t_only, &s_only);
    push('d', "I = S∩T periodic at t", &u, &inter, &inter);
    push('e', "S periodic at 2t", &u2, s, s);
    push('e', "T periodic at 2t", &u2, t_set, t_set);
    push('f', "V\\(S∪T) periodic at t", &u, &rest, &rest);
    Ok(EqualCardReport {
        source: s.clone(),
        target: t_set.clone(),
        time: t,
        clauses,
    })
}

/// Orthogonal projector onto the column span of `cols`: the eigenvectors of
/// `cols·colsᵀ` whose eigenvalues exceed `rank_tol²`.
///
/// nalgebra's SVD can return a wrong left basis for rank-deficient input (it fails
/// to recompose projector columns of Q₃), so the symmetric eigensolver is used.
fn span_projector(cols: &DMatrix<f64>, rank_tol: f64) -> DMatrix<f64> {
    let n = cols.nrows();
    if cols.ncols() == 0 {
        return DMatrix::zeros(n, n);
    }
    let gram = cols * cols.transpose();
    let eig = gram.symmetric_eigen();
    let mut proj = DMatrix::<f64>::zeros(n, n);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > rank_tol * rank_tol {
            let v = eig.eigenvectors.column(k);
            proj += v * v.transpose();
        }
    }
    proj
}

const RANK_TOL: f64 = 1e-7;

/// For each eigenvalue, whether `span{E_r e_a : a∈S} = span{E_r e_a : a∈T}`,
/// compared through the orthogonal projectors onto the two spans.
pub fn parallel_check(spec: &Spectrum, s: &VertexSet, t_set: &VertexSet, tol: f64) -> Result<Vec<bool>> {
    if s.len() != t_set.len() {
        return Err(Error::Precondition(format!("|S| = {} differs from |T| = {}", s.len(), t_set.len())));
    }
    let pick = |e: &DMatrix<f64>, set: &VertexSet| {
        let idx: Vec<usize> = set.iter().collect();
        DMatrix::from_fn(e.nrows(), idx.len(), |i, j| e[(i, idx[j])])
    };
    Ok(spec
        .projectors()
        .iter()
        .map(|e| {
            let ps = span_projector(&pick(e, s), RANK_TOL);
            let pt = span_projector(&pick(e, t_set), RANK_TOL);
            (ps - pt).iter().all(|x| x.abs() <= tol)
        })
        .collect())
}

/// `max |W W* − I|` for the block `W = U(t)[T, S]`; zero when bijective GST holds exactly.
pub fn transfer_block_unitarity(u: &TransitionMatrix, s: &VertexSet, t_set: &VertexSet) -> f64 {
    let rows: Vec<usize> = t_set.iter().collect();
    let cols: Vec<usize> = s.iter().collect();
    let w = DMatrix::from_fn(rows.len(), cols.len(), |i, j| u.get(rows[i], cols[j]));
    let prod = &w * w.adjoint();
    let mut worst = 0.0f64;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// A source/target pair with bijective GST.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct BijectivePair {
    pub source: VertexSet,
    pub target: VertexSet,
}

/// Support pattern of `U(t)` at one time.
///
/// `atoms` are the connected components of the bipartite graph joining column `a`
/// to row `b` whenever `|U_{b,a}| > zero_tol`. A set `S` has bijective GST exactly
/// when it is a union of atom sources, and its partner is the union of the matching
/// targets. `periodic_atoms` are the components of the symmetric relation
/// `a ~ b ⟺ |U_{b,a}| > zero_tol`; periodic sets are exactly their unions.
#[derive(Clone, Debug, Serialize)]
pub struct SupportStructure {
    pub time: f64,
    pub atoms: Vec<BijectivePair>,
    pub periodic_atoms: Vec<VertexSet>,
    /// Largest magnitude among entries treated as zero.
    pub residual: f64,
}

impl SupportStructure {
    pub fn new(u: &TransitionMatrix, zero_tol: f64) -> Self {
        let n = u.n();
        let mut bip = UnionFind::new(2 * n);
        let mut sym = UnionFind::new(n);
        let mut residual = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let m = u.get(b, a).norm();
                if m > zero_tol {
                    bip.union(a, n + b);
                    sym.union(a, b);
                } else {
                    residual = residual.max(m);
                }
            }
        }
        let mut atoms: Vec<BijectivePair> = Vec::new();
        let mut slot = vec![usize::MAX; 2 * n];
        for x in 0..2 * n {
            let r = bip.find(x);
            if slot[r] == usize::MAX {
                slot[r] = atoms.len();
                atoms.push(BijectivePair { source: VertexSet::empty(n), target: VertexSet::empty(n) });
            }
            let pair = &mut atoms[slot[r]];
            if x < n {
                pair.source.insert(x);
            } else {
                pair.target.insert(x - n);
            }
        }
        atoms.sort();
        let mut periodic_atoms: Vec<VertexSet> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for v in 0..n {
            let r = sym.find(v);
            if slot[r] == usize::MAX {
                slot[r] = periodic_atoms.len();
                periodic_atoms.push(VertexSet::empty(n));
            }
            periodic_atoms[slot[r]].insert(v);
        }
        periodic_atoms.sort();
        SupportStructure { time: u.time, atoms, periodic_atoms, residual }
    }

    /// More than one atom means some nontrivial bijective GST happens at this time.
    pub fn is_nontrivial(&self) -> bool {
        self.atoms.len() > 1
    }

    /// Partner `T` of a bijective `(S,T)`-GST, if `S` is a union of atom sources.
    pub fn bijective_target(&self, s: &VertexSet) -> Option<VertexSet> {
        let mut target = VertexSet::empty(s.universe());
        for atom in &self.atoms {
            let meet = atom.source.intersection(s);
            if meet.is_empty() {
                continue;
            }
            if meet != atom.source {
                return None;
            }
            target = target.union(&atom.target);
        }
        Some(target)
    }

    pub fn is_periodic(&self, s: &VertexSet) -> bool {
        self.periodic_atoms.iter().all(|p| {
            let meet = p.intersection(s);
            meet.is_empty() || &meet == p
        })
    }
}

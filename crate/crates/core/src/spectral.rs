//! Spectral decomposition of the adjacency matrix and the transition operator
//! `U(t) = exp(itA) = Σ_r e^{itθ_r} E_r`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, SrgParams};

/// Distinct eigenvalues in strictly descending order with their orthogonal projectors.
#[derive(Clone, Debug)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    projectors: Vec<DMatrix<f64>>,
    multiplicities: Vec<usize>,
    eigen_tol: f64,
    adjacency: DMatrix<f64>,
}

/// Default grouping tolerance `1e-8 · max(1, ρ)` for spectral radius `ρ`.
pub fn default_eigen_tol(spectral_radius: f64) -> f64 {
    1e-8 * spectral_radius.abs().max(1.0)
}

/// Decomposes `A(X)`; `eigen_tol = None` selects [`default_eigen_tol`].
pub fn decompose(graph: &Graph, eigen_tol: Option<f64>) -> Result<Spectrum> {
    Spectrum::from_symmetric(graph.adjacency_matrix(), eigen_tol)
}

impl Spectrum {
    /// Decomposes a real symmetric matrix. Eigenvalues are sorted and cut into
    /// clusters wherever the gap is at least `eigen_tol`.
    pub fn from_symmetric(matrix: DMatrix<f64>, eigen_tol: Option<f64>) -> Result<Spectrum> {
        let n = matrix.nrows();
        if n == 0 || matrix.ncols() != n {
            return Err(Error::InvalidGraph("adjacency matrix must be square and nonempty".into()));
        }
        let eig = SymmetricEigen::new(matrix.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let sorted: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

        let radius = sorted.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let tol = eigen_tol.unwrap_or_else(|| default_eigen_tol(radius));
        if !(tol > 0.0) {
            return Err(Error::Precondition(format!("eigen_tol must be positive, got {tol}")));
        }

        let mut clusters: Vec<Vec<usize>> = vec![vec![0]];
        for k in 1..n {
            let gap = sorted[k - 1] - sorted[k];
            if gap >= tol {
                if gap < 2.0 * tol {
                    return Err(Error::AmbiguousClusters { value: sorted[k], gap, tol });
                }
                clusters.push(vec![k]);
            } else {
                let cluster = clusters.last_mut().unwrap();
                let diameter = sorted[cluster[0]] - sorted[k];
                if diameter >= tol {
                    return Err(Error::AmbiguousClusters { value: sorted[k], gap, tol });
                }
                cluster.push(k);
            }
        }

        let mut eigenvalues = Vec::with_capacity(clusters.len());
        let mut projectors = Vec::with_capacity(clusters.len());
        let mut multiplicities = Vec::with_capacity(clusters.len());
        for cluster in &clusters {
            let mean = cluster.iter().map(|&k| sorted[k]).sum::<f64>() / cluster.len() as f64;
            let mut proj = DMatrix::<f64>::zeros(n, n);
            // Fill one triangle and mirror so the projector is exactly symmetric.
            for a in 0..n {
                for b in a..n {
                    let mut s = 0.0;
                    for &k in cluster {
                        let col = order[k];
                        s += eig.eigenvectors[(a, col)] * eig.eigenvectors[(b, col)];
                    }
                    proj[(a, b)] = s;
                    proj[(b, a)] = s;
                }
            }
            eigenvalues.push(mean);
            projectors.push(proj);
            multiplicities.push(cluster.len());
        }

        Ok(Spectrum {
            eigenvalues,
            projectors,
            multiplicities,
            eigen_tol: tol,
            adjacency: matrix,
        })
    }

    pub fn n(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[DMatrix<f64>] {
        &self.projectors
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn eigen_tol(&self) -> f64 {
        self.eigen_tol
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Spread `θ_0 − θ_d` of the spectrum.
    pub fn spread(&self) -> f64 {
        self.eigenvalues[0] - self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `(E_r)_{b,a}` for every `r`.
    pub fn entry_weights(&self, b: usize, a: usize) -> Vec<f64> {
        self.projectors.iter().map(|e| e[(b, a)]).collect()
    }

    /// `U(t)_{b,a} = Σ_r e^{itθ_r} (E_r)_{b,a}`.
    pub fn entry(&self, b: usize, a: usize, t: f64) -> Complex64 {
        self.eigenvalues
            .iter()
            .zip(&self.projectors)
            .map(|(&theta, e)| Complex64::cis(t * theta) * e[(b, a)])
            .sum()
    }

    /// Copy with one projector entry perturbed; for fault-injection tests of
    /// [`verify_spectrum`].
    pub fn with_perturbed_projector(&self, r: usize, a: usize, b: usize, delta: f64) -> Spectrum {
        let mut s = self.clone();
        s.projectors[r][(a, b)] += delta;
        s
    }
}

/// `U(t)` as a dense complex matrix.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    pub time: f64,
    pub entries: DMatrix<Complex64>,
}

impl TransitionMatrix {
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, b: usize, a: usize) -> Complex64 {
        self.entries[(b, a)]
    }

    /// `U(−t)`, which is the entrywise conjugate of `U(t)`.
    pub fn reversed(&self) -> TransitionMatrix {
        TransitionMatrix {
            time: -self.time,
            entries: self.entries.map(|z| z.conj()),
        }
    }

    /// max |U U* − I|.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.n();
        let prod = &self.entries * self.entries.adjoint();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - target).norm());
            }
        }
        worst
    }

    /// max |U − Uᵀ|.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)]).norm());
            }
        }
        worst
    }
}

/// Evaluates `U(t)`. Phases are recomputed on every call.
pub fn transition(spec: &Spectrum, t: f64) -> TransitionMatrix {
    let n = spec.n();
    let mut entries = DMatrix::<Complex64>::zeros(n, n);
    for (&theta, e) in spec.eigenvalues.iter().zip(&spec.projectors) {
        let phase = Complex64::cis(t * theta);
        for a in 0..n {
            for b in 0..n {
                entries[(b, a)] += phase * e[(b, a)];
            }
        }
    }
    TransitionMatrix { time: t, entries }
}

/// Maximum deviations for the three defining identities of a spectral decomposition.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SpectrumDiagnostics {
    /// max |Σ E_r − I|
    pub resolution_of_identity: f64,
    /// max over r, s of |E_r E_s − δ_rs E_r|
    pub orthogonality: f64,
    /// max |Σ θ_r E_r − A|
    pub reconstruction: f64,
    pub strictly_descending: bool,
}

impl SpectrumDiagnostics {
    pub fn max_deviation(&self) -> f64 {
        self.resolution_of_identity.max(self.orthogonality).max(self.reconstruction)
    }

    /// All identities within `10 · eigen_tol`.
    pub fn within(&self, eigen_tol: f64) -> bool {
        self.strictly_descending && self.max_deviation() <= 10.0 * eigen_tol
    }
}

pub fn verify_spectrum(spec: &Spectrum) -> SpectrumDiagnostics {
    let n = spec.n();
    let max_abs = |m: &DMatrix<f64>| m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));

    let mut sum = DMatrix::<f64>::zeros(n, n);
    let mut recon = DMatrix::<f64>::zeros(n, n);
    for (&theta, e) in spec.eigenvalues.iter().zip(&spec.projectors) {
        sum += e;
        recon += e * theta;
    }
    let resolution_of_identity = max_abs(&(sum - DMatrix::<f64>::identity(n, n)));
    let reconstruction = max_abs(&(recon - &spec.adjacency));

    let mut orthogonality = 0.0f64;
    for (r, er) in spec.projectors.iter().enumerate() {
        for (s, es) in spec.projectors.iter().enumerate() {
            let prod = er * es;
            let dev = if r == s { max_abs(&(prod - er)) } else { max_abs(&prod) };
            orthogonality = orthogonality.max(dev);
        }
    }
    let strictly_descending = spec.eigenvalues.windows(2).all(|w| w[0] > w[1]);
    SpectrumDiagnostics {
        resolution_of_identity,
        orthogonality,
        reconstruction,
        strictly_descending,
    }
}

/// Closed forms for a connected non-complete strongly regular graph:
/// `e_aᵀ U(t) e_b = h_δ(t) / ν` with `δ = ∂(a, b)`.
pub fn srg_h(params: &SrgParams, t: f64) -> Result<(Complex64, Complex64, Complex64)> {
    if !params.is_feasible() {
        return Err(Error::InfeasibleSrg(format!("{params:?} violates κ(κ−λ−1) = (ν−κ−1)μ")));
    }
    if params.kappa == 0 || params.kappa + 1 >= params.nu || params.mu == 0 {
        return Err(Error::InfeasibleSrg(format!(
            "{params:?}: need a connected, non-complete graph (0 < κ < ν−1, μ > 0)"
        )));
    }
    let (f, g) = params.multiplicities();
    let (th1, th2) = params.restricted_eigenvalues();
    let near_int = |x: f64| (x - x.round()).abs() < 1e-9;
    if !near_int(f) || !near_int(g) || f < 0.0 || g < 0.0 {
        return Err(Error::InfeasibleSrg(format!("multiplicities f = {f}, g = {g} are not nonnegative integers")));
    }
    if (f - g).abs() > 0.5 && !(near_int(th1) && near_int(th2)) {
        return Err(Error::InfeasibleSrg(format!(
            "f ≠ g but eigenvalues θ₁ = {th1}, θ₂ = {th2} are not integers"
        )));
    }
    let (nu, kappa) = (params.nu as f64, params.kappa as f64);
    let p0 = Complex64::cis(kappa * t);
    let p1 = Complex64::cis(th1 * t);
    let p2 = Complex64::cis(th2 * t);
    let h0 = p0 + p1 * f + p2 * g;
    let h1 = p0 + p1 * (f * th1 / kappa) + p2 * (g * th2 / kappa);
    let denom = kappa + 1.0 - nu;
    let h2 = p0 + p1 * (f * (1.0 + th1) / denom) + p2 * (g * (1.0 + th2) / denom);
    Ok((h0, h1, h2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GeneratorSpec;
    use std::f64::consts::PI;

    fn spectrum(spec: GeneratorSpec) -> Spectrum {
        decompose(&spec.build().unwrap(), None).unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    /// Scaled-and-squared Taylor series for exp(itA); independent of the eigensolver.
    fn taylor_expm(a: &DMatrix<f64>, t: f64) -> DMatrix<Complex64> {
        let n = a.nrows();
        let norm = a.iter().map(|x| x.abs()).sum::<f64>() * t.abs();
        let squarings = (norm.max(1.0).log2().ceil() as u32) + 1;
        let scale = t / f64::powi(2.0, squarings as i32);
        let m = a.map(|x| Complex64::new(0.0, x * scale));
        let mut term = DMatrix::<Complex64>::identity(n, n);
        let mut sum = term.clone();
        for k in 1..60 {
            term = &term * &m / Complex64::from(k as f64);
            sum += &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    #[test]
    fn k2_projectors_are_halves() {
        let s = spectrum(GeneratorSpec::Complete(2));
        assert_eq!(s.multiplicities(), &[1, 1]);
        assert_close(s.eigenvalues()[0], 1.0, 1e-14);
        assert_close(s.eigenvalues()[1], -1.0, 1e-14);
        let e0 = &s.projectors()[0];
        let e1 = &s.projectors()[1];
        for (a, b) in [(0, 0), (1, 1)] {
            assert_close(e0[(a, b)], 0.5, 1e-15);
            assert_close(e1[(a, b)], 0.5, 1e-15);
        }
        assert_close(e0[(0, 1)], 0.5, 1e-15);
        assert_close(e1[(0, 1)], -0.5, 1e-15);
        assert!(verify_spectrum(&s).max_deviation() < 1e-15);
    }

    #[test]
    fn double_star_spectrum() {
        let s = spectrum(GeneratorSpec::DoubleStar(2));
        let expected = [2.0, 1.0, 0.0, -1.0, -2.0];
        assert_eq!(s.eigenvalues().len(), 5);
        for (x, e) in s.eigenvalues().iter().zip(expected) {
            assert_close(*x, e, 1e-12);
        }
        assert_eq!(s.multiplicities(), &[1, 1, 2, 1, 1]);
    }

    #[test]
    fn complete_multipartite_spectrum() {
        let s = spectrum(GeneratorSpec::CompleteMultipartite { parts: 3, size: 2 });
        let (t1, t2) = SrgParams::new(6, 4, 2, 4).restricted_eigenvalues();
        assert_eq!((t1, t2), (0.0, -2.0));
        let expected = [4.0, t1, t2];
        for (x, e) in s.eigenvalues().iter().zip(expected) {
            assert_close(*x, e, 1e-12);
        }
        assert_eq!(s.multiplicities(), &[1, 3, 2]);
    }

    #[test]
    fn transition_examples() {
        let k2 = spectrum(GeneratorSpec::Complete(2));
        let u0 = transition(&k2, 0.0);
        assert!((u0.entries.clone() - DMatrix::<Complex64>::identity(2, 2)).norm() < 1e-15);
        let u = transition(&k2, PI / 2.0);
        assert!(u.get(0, 0).norm() < 1e-15);
        assert!((u.get(1, 0) - Complex64::i()).norm() < 1e-15);

        let p3 = spectrum(GeneratorSpec::Path(3));
        let u = transition(&p3, PI / 2f64.sqrt());
        let expected = [[0.0, 0.0, -1.0], [0.0, -1.0, 0.0], [-1.0, 0.0, 0.0]];
        for a in 0..3 {
            for b in 0..3 {
                assert!((u.get(a, b) - Complex64::from(expected[a][b])).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn transition_is_unitary_and_symmetric() {
        for spec in [GeneratorSpec::Petersen, GeneratorSpec::McKay, GeneratorSpec::Hypercube(4)] {
            let s = spectrum(spec);
            for t in [0.3, 1.7, -4.2, 11.0] {
                let u = transition(&s, t);
                assert!(u.unitarity_defect() < 1e-9 * s.n() as f64);
                assert!(u.symmetry_defect() < 1e-12);
            }
        }
    }

    #[test]
    fn matches_taylor_series() {
        for spec in [
            GeneratorSpec::Path(4),
            GeneratorSpec::McKay,
            GeneratorSpec::DoubleStar(3),
            GeneratorSpec::Cycle(5),
        ] {
            let g = spec.build().unwrap();
            let s = decompose(&g, None).unwrap();
            for t in [-4.0, -1.3, 0.5, 2.2, 4.0] {
                let oracle = taylor_expm(&g.adjacency_matrix(), t);
                let u = transition(&s, t);
                let dev = (u.entries - oracle).iter().fold(0.0f64, |m, z| m.max(z.norm()));
                assert!(dev < 1e-8, "{spec} t={t} dev={dev}");
            }
        }
    }

    #[test]
    fn time_reversal_is_conjugation() {
        let s = spectrum(GeneratorSpec::McKay);
        let u = transition(&s, 2.345);
        let v = transition(&s, -2.345);
        let dev = (u.reversed().entries - v.entries).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        assert!(dev <= 1e-12);
    }

    #[test]
    fn bipartite_projectors_pair_up_with_signed_blocks() {
        for spec in [GeneratorSpec::Path(5), GeneratorSpec::Hypercube(3), GeneratorSpec::DoubleStar(3)] {
            let g = spec.build().unwrap();
            let (v0, _) = g.bipartition().unwrap().unwrap();
            let s = decompose(&g, None).unwrap();
            let d = s.eigenvalues().len();
            for r in 0..d {
                let partner = d - 1 - r;
                assert_close(s.eigenvalues()[partner], -s.eigenvalues()[r], 1e-8);
                let er = &s.projectors()[r];
                let ep = &s.projectors()[partner];
                for a in 0..g.n() {
                    for b in 0..g.n() {
                        let sign = if v0.contains(a) == v0.contains(b) { 1.0 } else { -1.0 };
                        assert_close(sign * er[(a, b)], ep[(a, b)], 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn diagnostics_and_fault_injection() {
        let s = spectrum(GeneratorSpec::Hypercube(4));
        let diag = verify_spectrum(&s);
        assert!(diag.max_deviation() < 1e-10, "{diag:?}");
        assert!(diag.within(s.eigen_tol()));
        let bad = s.with_perturbed_projector(1, 2, 3, 1e-3);
        let diag = verify_spectrum(&bad);
        assert!(diag.max_deviation() > 1e-4);
        assert!(!diag.within(bad.eigen_tol()));
    }

    #[test]
    fn ambiguous_clusters_are_rejected() {
        // eigenvalues 0, 1.5e-8, 3e-8, ... chained gaps below tolerance
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.0, 0.6e-8, 1.2e-8, 5.0]));
        let err = Spectrum::from_symmetric(m, Some(1e-8)).unwrap_err();
        assert!(matches!(err, Error::AmbiguousClusters { .. }));
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.0, 1.5e-8, 5.0]));
        assert!(Spectrum::from_symmetric(m, Some(1e-8)).is_err());
    }

    #[test]
    fn srg_h_at_zero() {
        for p in [SrgParams::new(10, 3, 0, 1), SrgParams::new(6, 4, 2, 4), SrgParams::new(13, 6, 2, 3)] {
            let (h0, h1, h2) = srg_h(&p, 0.0).unwrap();
            assert!((h0 - Complex64::from(p.nu as f64)).norm() < 1e-12);
            assert!(h1.norm() < 1e-12 && h2.norm() < 1e-12);
        }
    }

    #[test]
    fn srg_h_matches_dense_evolution() {
        for (spec, params) in [
            (GeneratorSpec::Petersen, SrgParams::new(10, 3, 0, 1)),
            (GeneratorSpec::CompleteMultipartite { parts: 3, size: 2 }, SrgParams::new(6, 4, 2, 4)),
            (GeneratorSpec::Paley(13), SrgParams::new(13, 6, 2, 3)),
        ] {
            let g = spec.build().unwrap();
            let s = decompose(&g, None).unwrap();
            let dist = g.distance_matrix();
            let mut worst = 0.0f64;
            for k in 0..40 {
                let t = -3.0 + 0.37 * k as f64;
                let h = srg_h(&params, t).unwrap();
                let u = transition(&s, t);
                for a in 0..g.n() {
                    for b in 0..g.n() {
                        let hd = [h.0, h.1, h.2][dist[a][b].unwrap()];
                        worst = worst.max((u.get(b, a) - hd / params.nu as f64).norm());
                    }
                }
            }
            assert!(worst < 1e-9, "{spec}: {worst}");
        }
        let (_, h1, _) = srg_h(&SrgParams::new(6, 4, 2, 4), PI).unwrap();
        assert!(h1.norm() < 1e-10);
    }

    #[test]
    fn srg_h_rejects_infeasible() {
        assert!(srg_h(&SrgParams::new(10, 3, 1, 1), 0.0).is_err());
        assert!(srg_h(&SrgParams::new(4, 3, 2, 0), 0.0).is_err());
    }
}

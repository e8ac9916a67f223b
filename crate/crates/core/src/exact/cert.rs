use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::cyclotomic::CyclotomicNumber;
use super::rational::{int_mul, rational_string, RationalMatrix};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::gst::has_gst;
use crate::spectral::decompose;
use crate::vertex_set::VertexSet;

/// Exact projectors `E_r = Π_{s≠r} (A − θ_s I)/(θ_r − θ_s)` for a graph whose
/// eigenvalues are integers, in descending order of eigenvalue.
pub fn rational_projectors(graph: &Graph) -> Result<Vec<(i64, RationalMatrix)>> {
    let n = graph.n();
    let spec = decompose(graph, None)?;
    let mut thetas = Vec::new();
    for &x in spec.eigenvalues() {
        if (x - x.round()).abs() > 1e-6 {
            return Err(Error::NonIntegerSpectrum(x));
        }
        thetas.push(x.round() as i64);
    }
    thetas.dedup();

    let a: Vec<BigInt> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| BigInt::from(graph.has_edge(i, j) as i64))
        .collect();
    let shifted = |theta: i64| -> Vec<BigInt> {
        let mut m = a.clone();
        for i in 0..n {
            m[i * n + i] -= theta;
        }
        m
    };
    let identity: Vec<BigInt> = (0..n * n).map(|k| BigInt::from((k % (n + 1) == 0) as i64)).collect();

    // The candidate integers must annihilate A exactly.
    let annihilator = thetas.iter().fold(identity.clone(), |acc, &th| int_mul(n, &acc, &shifted(th)));
    if !annihilator.iter().all(Zero::is_zero) {
        return Err(Error::AnnihilationFailed(thetas));
    }

    let projectors: Vec<(i64, RationalMatrix)> = thetas
        .par_iter()
        .map(|&th_r| {
            let mut num = identity.clone();
            let mut den = BigInt::from(1);
            for &th_s in thetas.iter().filter(|&&s| s != th_r) {
                num = int_mul(n, &num, &shifted(th_s));
                den *= th_r - th_s;
            }
            let entries: Vec<BigRational> = num.into_iter().map(|x| BigRational::new(x, den.clone())).collect();
            (th_r, RationalMatrix::from_entries(n, entries))
        })
        .collect();
    Ok(projectors)
}

/// `U(2πp/q)_{b,a} = Σ_r (E_r)_{b,a} ζ_q^{pθ_r mod q}`.
pub fn entry_at_rational_time(projs: &[(i64, RationalMatrix)], a: usize, b: usize, p: i64, q: u64) -> CyclotomicNumber {
    let mut x = CyclotomicNumber::zero(q as usize);
    for (theta, e) in projs {
        let w = e.get(b, a);
        if !w.is_zero() {
            x.add_term((p as i128 * *theta as i128).rem_euclid(q as i128) as i64, w);
        }
    }
    x
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "certified-GST")]
    CertifiedGst,
    #[serde(rename = "certified-not-GST")]
    CertifiedNotGst,
}

/// A nonzero entry `U_{row,col}` with `col ∈ S`, `row ∉ T`; coefficients of `ζ_q^j` as `num/den`.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub row: usize,
    pub col: usize,
    pub coefficients: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub graph_fingerprint: String,
    pub n: usize,
    pub source: VertexSet,
    pub target: VertexSet,
    pub p: i64,
    pub q: u64,
    pub time: f64,
    pub eigenvalues: Vec<i64>,
    pub verdict: Verdict,
    /// Entries `(row, col)`, 1-based, proven zero.
    pub zero_entries: Vec<(usize, usize)>,
    pub witness: Option<Witness>,
    /// Floating-point residual at the same time, for comparison.
    pub float_residual: f64,
}

/// Decides `(S,T)`-GST at `t = 2πp/q` exactly: every `U_{b,a}` with `a ∈ S`,
/// `b ∉ T` must vanish in ℚ(ζ_q).
pub fn certify_gst(graph: &Graph, s: &VertexSet, t_set: &VertexSet, p: i64, q: u64) -> Result<Certificate> {
    if q == 0 {
        return Err(Error::Precondition("q must be positive".into()));
    }
    for set in [s, t_set] {
        if set.universe() != graph.n() {
            return Err(Error::UniverseMismatch { expected: graph.n(), found: set.universe() });
        }
    }
    let g = p.unsigned_abs().gcd(&q);
    let (p, q) = (p / g as i64, q / g);
    let projs = rational_projectors(graph)?;
    let outside = t_set.complement();
    let entries: Vec<(usize, usize)> = s.iter().flat_map(|a| outside.iter().map(move |b| (b, a))).collect();
    let checked: Vec<((usize, usize), CyclotomicNumber, bool)> = entries
        .par_iter()
        .map(|&(b, a)| {
            let x = entry_at_rational_time(&projs, a, b, p, q);
            let zero = x.is_zero();
            ((b, a), x, zero)
        })
        .collect();
    let witness = checked.iter().find(|(_, _, zero)| !zero).map(|((b, a), x, _)| Witness {
        row: b + 1,
        col: a + 1,
        coefficients: x.coefficients().iter().map(rational_string).collect(),
    });
    let zero_entries = checked.iter().filter(|c| c.2).map(|((b, a), _, _)| (b + 1, a + 1)).collect();
    let time = 2.0 * std::f64::consts::PI * p as f64 / q as f64;
    let float_residual = has_gst(&decompose(graph, None)?, s, t_set, time, crate::gst::DEFAULT_ZERO_TOL).residual;
    Ok(Certificate {
        graph_fingerprint: graph.fingerprint(),
        n: graph.n(),
        source: s.clone(),
        target: t_set.clone(),
        p,
        q,
        time,
        eigenvalues: projs.iter().map(|(th, _)| *th).collect(),
        verdict: if witness.is_none() { Verdict::CertifiedGst } else { Verdict::CertifiedNotGst },
        zero_entries,
        witness,
        float_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GeneratorSpec;
    use num_traits::One;

    fn half(sign: i64) -> BigRational {
        BigRational::new(sign.into(), 2.into())
    }

    fn set(n: usize, v: &[usize]) -> VertexSet {
        VertexSet::from_one_based(n, v).unwrap()
    }

    fn check_resolution(projs: &[(i64, RationalMatrix)]) {
        let n = projs[0].1.n();
        let sum = projs.iter().fold(RationalMatrix::zeros(n), |acc, (_, e)| acc.add(e));
        assert_eq!(sum, RationalMatrix::identity(n));
        for (i, (_, e)) in projs.iter().enumerate() {
            for (j, (_, f)) in projs.iter().enumerate() {
                let prod = e.mul(f);
                if i == j {
                    assert_eq!(&prod, e);
                } else {
                    assert!(prod.is_zero());
                }
            }
        }
    }

    #[test]
    fn k2_projectors() {
        let g = GeneratorSpec::Complete(2).build().unwrap();
        let projs = rational_projectors(&g).unwrap();
        assert_eq!(projs.iter().map(|p| p.0).collect::<Vec<_>>(), vec![1, -1]);
        assert_eq!(projs[0].1.get(0, 1), &half(1));
        assert_eq!(projs[1].1.get(0, 1), &half(-1));
        assert_eq!(projs[1].1.get(1, 1), &half(1));
        check_resolution(&projs);
    }

    #[test]
    fn integer_spectrum_projectors() {
        let ds = rational_projectors(&GeneratorSpec::DoubleStar(2).build().unwrap()).unwrap();
        assert_eq!(ds.iter().map(|p| p.0).collect::<Vec<_>>(), vec![2, 1, 0, -1, -2]);
        check_resolution(&ds);
        let q3 = rational_projectors(&GeneratorSpec::Hypercube(3).build().unwrap()).unwrap();
        assert_eq!(q3.iter().map(|p| p.0).collect::<Vec<_>>(), vec![3, 1, -1, -3]);
        check_resolution(&q3);
        for (_, e) in &q3 {
            for i in 0..8 {
                for j in 0..8 {
                    assert!(e.get(i, j).denom().is_one() || e.get(i, j).denom() == &BigInt::from(8) || e.get(i, j).denom() == &BigInt::from(4) || e.get(i, j).denom() == &BigInt::from(2));
                }
            }
        }
        for spec in ["cycle:4", "cmulti:3x2", "petersen"] {
            let g = crate::io::dsl::parse_graph_dsl(spec).unwrap().build().unwrap();
            check_resolution(&rational_projectors(&g).unwrap());
        }
    }

    #[test]
    fn non_integer_spectrum_is_rejected() {
        let p3 = GeneratorSpec::Path(3).build().unwrap();
        match rational_projectors(&p3) {
            Err(Error::NonIntegerSpectrum(x)) => assert!((x.abs() - 2f64.sqrt()).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn entry_examples() {
        let projs = rational_projectors(&GeneratorSpec::Complete(2).build().unwrap()).unwrap();
        let x = entry_at_rational_time(&projs, 0, 1, 1, 4);
        assert_eq!(x.coefficients(), &[BigRational::zero(), half(1), BigRational::zero(), half(-1)]);
        assert!(!x.is_zero());
        assert!((x.to_complex() - num_complex::Complex64::i()).norm() < 1e-15);
        let y = entry_at_rational_time(&projs, 0, 0, 1, 4);
        assert_eq!(y.coefficients(), &[BigRational::zero(), half(1), BigRational::zero(), half(1)]);
        assert!(y.is_zero());
    }

    #[test]
    fn certificates() {
        let q3 = GeneratorSpec::Hypercube(3).build().unwrap();
        let (v0, v1) = q3.bipartition().unwrap().unwrap();
        let c = certify_gst(&q3, &v0, &v1, 1, 4).unwrap();
        assert_eq!(c.verdict, Verdict::CertifiedGst);
        assert_eq!(c.zero_entries.len(), 16);
        assert!(c.float_residual < 1e-8);

        let ds = GeneratorSpec::DoubleStar(2).build().unwrap();
        let s = set(6, &[1, 2]);
        let c = certify_gst(&ds, &s, &s, 1, 3).unwrap();
        assert_eq!(c.verdict, Verdict::CertifiedGst);
        assert!(c.float_residual < 1e-8);
        // Same time written non-reduced.
        assert_eq!(certify_gst(&ds, &s, &s, 2, 6).unwrap().q, 3);

        let k2 = GeneratorSpec::Complete(2).build().unwrap();
        let c = certify_gst(&k2, &set(2, &[1]), &set(2, &[1]), 1, 4).unwrap();
        assert_eq!(c.verdict, Verdict::CertifiedNotGst);
        let w = c.witness.unwrap();
        assert_eq!((w.row, w.col), (2, 1));
        assert_eq!(w.coefficients, vec!["0/1", "1/2", "0/1", "-1/2"]);
        assert!(c.float_residual > 1e-4);
        let json = serde_json::to_value(certify_gst(&k2, &set(2, &[1]), &set(2, &[2]), 1, 4).unwrap()).unwrap();
        assert_eq!(json["verdict"], "certified-GST");
        assert_eq!(json["source"], serde_json::json!([1]));
    }
}

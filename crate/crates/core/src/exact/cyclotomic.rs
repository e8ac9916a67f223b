use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// `Σ_j c_j ζ_q^j` with `ζ_q = e^{2πi/q}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicNumber {
    q: usize,
    coefficients: Vec<BigRational>,
}

impl CyclotomicNumber {
    pub fn zero(q: usize) -> Self {
        assert!(q >= 1, "cyclotomic order must be positive");
        CyclotomicNumber { q, coefficients: vec![BigRational::zero(); q] }
    }

    pub fn from_coefficients(q: usize, coefficients: Vec<BigRational>) -> Self {
        assert_eq!(coefficients.len(), q, "need exactly q coefficients");
        CyclotomicNumber { q, coefficients }
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coefficients
    }

    /// Adds `c · ζ_q^k` (any integer `k`).
    pub fn add_term(&mut self, k: i64, c: &BigRational) {
        let idx = k.rem_euclid(self.q as i64) as usize;
        self.coefficients[idx] += c;
    }

    /// Exact zero test: `Φ_q` divides `Σ c_j X^j`.
    pub fn is_zero(&self) -> bool {
        let phi = cyclotomic_polynomial(self.q);
        let mut rem = self.coefficients.clone();
        let deg = phi.len() - 1;
        // Φ_q is monic, so long division stays exact.
        for top in (deg..rem.len()).rev() {
            let lead = rem[top].clone();
            if lead.is_zero() {
                continue;
            }
            for (i, c) in phi.iter().enumerate() {
                if !c.is_zero() {
                    rem[top - deg + i] -= &lead * BigRational::from_integer(c.clone());
                }
            }
        }
        rem.iter().take(deg).all(Zero::is_zero)
    }

    /// Floating-point value, for cross-checks.
    pub fn to_complex(&self) -> num_complex::Complex64 {
        use num_traits::ToPrimitive;
        self.coefficients
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let x = c.to_f64().unwrap_or(f64::NAN);
                num_complex::Complex64::cis(2.0 * std::f64::consts::PI * j as f64 / self.q as f64) * x
            })
            .sum()
    }
}

fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    debug_assert!(den[dd].is_one());
    let mut quot = vec![BigInt::zero(); num.len() - dd];
    for top in (dd..rem.len()).rev() {
        let lead = rem[top].clone();
        if lead.is_zero() {
            continue;
        }
        quot[top - dd] = lead.clone();
        for (i, c) in den.iter().enumerate() {
            rem[top - dd + i] -= &lead * c;
        }
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

/// Integer coefficients of `Φ_q`, lowest degree first:
/// `X^q − 1` divided by `Φ_d` for every proper divisor `d` of `q`.
pub fn cyclotomic_polynomial(q: usize) -> Vec<BigInt> {
    assert!(q >= 1);
    let mut poly = vec![BigInt::zero(); q + 1];
    poly[0] = BigInt::from(-1);
    poly[q] = BigInt::one();
    for d in (1..q).filter(|d| q.is_multiple_of(*d)) {
        poly = poly_div_exact(&poly, &cyclotomic_polynomial(d));
    }
    poly
}

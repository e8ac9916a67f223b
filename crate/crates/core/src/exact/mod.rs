//! Exact certification for graphs with integer spectrum at times `2πp/q`.
//!
//! Projectors are computed exactly over ℚ by Lagrange interpolation in `A`, so each
//! entry of `U(2πp/q)` is an element of ℚ(ζ_q). Zero tests reduce modulo the
//! cyclotomic polynomial `Φ_q`.

mod cert;
mod cyclotomic;
mod rational;

pub use cert::{certify_gst, entry_at_rational_time, rational_projectors, Certificate, Verdict, Witness};
pub use cyclotomic::{cyclotomic_polynomial, CyclotomicNumber};
pub use rational::{rational_string, RationalMatrix};

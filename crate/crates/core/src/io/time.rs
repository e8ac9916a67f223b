//! Time expressions.
//!
//! * decimal literals: `1.5`, `1e-3`
//! * multiples of π: `pi`, `pi/2`, `2pi/3`, `2*pi/sqrt(5)`, `0.5pi`
//! * exact rational multiples of 2π: `2pi:1/3`

use std::f64::consts::PI;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeSpec {
    Real { value: f64 },
    /// `t = 2π p / q`, kept exact for certification.
    TwoPiRational { p: i64, q: u64 },
}

impl TimeSpec {
    pub fn value(&self) -> f64 {
        match *self {
            TimeSpec::Real { value } => value,
            TimeSpec::TwoPiRational { p, q } => 2.0 * PI * p as f64 / q as f64,
        }
    }

    pub fn as_two_pi_rational(&self) -> Option<(i64, u64)> {
        match *self {
            TimeSpec::TwoPiRational { p, q } => Some((p, q)),
            TimeSpec::Real { .. } => None,
        }
    }
}

fn reduced(p: i64, q: u64) -> TimeSpec {
    let g = (p.unsigned_abs()).gcd(&q).max(1);
    TimeSpec::TwoPiRational { p: p / g as i64, q: q / g }
}

pub fn parse_time(input: &str) -> Result<TimeSpec> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
    if s.is_empty() {
        return Err(Error::parse(0, "empty time expression"));
    }
    if let Some(rest) = s.strip_prefix("2pi:") {
        let (p, q) = rest.split_once('/').unwrap_or((rest, "1"));
        let p: i64 = p.parse().map_err(|_| Error::parse(4, format!("bad numerator {p:?}")))?;
        let q: u64 = q.parse().map_err(|_| Error::parse(4, format!("bad denominator {q:?}")))?;
        if q == 0 {
            return Err(Error::parse(4, "zero denominator"));
        }
        return Ok(reduced(p, q));
    }
    let Some(idx) = s.find("pi") else {
        let value: f64 = s.parse().map_err(|_| Error::parse(0, format!("not a number: {input:?}")))?;
        return finite(value);
    };

    let coef_src = s[..idx].trim_end_matches('*');
    let (coef, coef_int): (f64, Option<i64>) = match coef_src {
        "" => (1.0, Some(1)),
        "-" => (-1.0, Some(-1)),
        c => match c.parse::<i64>() {
            Ok(k) => (k as f64, Some(k)),
            Err(_) => (c.parse().map_err(|_| Error::parse(0, format!("bad coefficient {c:?}")))?, None),
        },
    };
    let mut value = coef * PI;
    let mut exact_den: Option<u64> = Some(1);
    let mut pos = idx + 2;
    let rest = &s[pos..];
    if !rest.is_empty() {
        let Some(den) = rest.strip_prefix('/') else {
            return Err(Error::parse(pos, format!("expected '/' after pi, got {rest:?}")));
        };
        pos += 1;
        if let Some(inner) = den.strip_prefix("sqrt(").and_then(|d| d.strip_suffix(')')) {
            let x: f64 = inner.parse().map_err(|_| Error::parse(pos + 5, format!("bad sqrt argument {inner:?}")))?;
            if x <= 0.0 {
                return Err(Error::parse(pos + 5, "sqrt argument must be positive"));
            }
            value /= x.sqrt();
            exact_den = None;
        } else {
            let d: f64 = den.parse().map_err(|_| Error::parse(pos, format!("bad denominator {den:?}")))?;
            if d == 0.0 {
                return Err(Error::parse(pos, "zero denominator"));
            }
            value /= d;
            exact_den = den.parse::<u64>().ok();
        }
    }
    match (coef_int, exact_den) {
        // kπ/d = 2π · k/(2d)
        (Some(k), Some(d)) => Ok(reduced(k, 2 * d)),
        _ => finite(value),
    }
}

fn finite(value: f64) -> Result<TimeSpec> {
    if value.is_finite() {
        Ok(TimeSpec::Real { value })
    } else {
        Err(Error::parse(0, "time must be finite"))
    }
}

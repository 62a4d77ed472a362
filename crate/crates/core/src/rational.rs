//! Exact rational helpers on top of `num_rational::BigRational`.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {input:?} as a rational: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = |reason| ParseRationalError {
        input: s.to_string(),
        reason,
    };
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (t, "1"),
    };
    let p: BigInt = num.parse().map_err(|_| err("bad numerator"))?;
    let q: BigInt = den.parse().map_err(|_| err("bad denominator"))?;
    if q.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(p, q))
}

/// Canonical `"p/q"` form, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Display adaptor producing the canonical `"p/q"` form.
pub struct Pq<'a>(pub &'a Rational);

impl fmt::Display for Pq<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Nearest rational with denominator `denom` (ties away from zero).
pub fn snap_f64(x: f64, denom: u64) -> Rational {
    let scaled = (x * denom as f64).round();
    let n = BigInt::from(scaled as i128);
    Rational::new(n, BigInt::from(denom))
}

/// Rational `g` with `sqrt(x) <= g <= sqrt(x) * (1 + 1/scale)` for `x >= 0`.
pub fn sqrt_upper(x: &Rational, scale: u64) -> Rational {
    assert!(!x.is_negative(), "sqrt of a negative rational");
    if x.is_zero() {
        return zero();
    }
    // sqrt(p/q) = sqrt(p*q*s^2) / (q*s)
    let s = BigInt::from(scale);
    let q = x.denom().clone();
    let radicand = x.numer() * &q * &s * &s;
    let mut r = radicand.sqrt();
    if &r * &r != radicand {
        r += 1;
    }
    Rational::new(r, q * s)
}

pub fn ceil_to_u64(r: &Rational) -> Option<u64> {
    r.ceil().to_integer().to_u64()
}

pub fn is_nonneg(r: &Rational) -> bool {
    r.numer().sign() != Sign::Minus
}

pub fn max_of<'a, I: IntoIterator<Item = &'a Rational>>(it: I) -> Option<Rational> {
    it.into_iter().max().cloned()
}

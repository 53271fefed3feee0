//! Exact rational numbers and the small helpers built on them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational used everywhere in the crate.
pub type Rational = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot parse {0:?} as a rational (expected `p` or `p/q`)")]
pub struct ParseRationalError(pub String);

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn big(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// `n/d`; panics on a zero denominator.
pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p"` or `"p/q"` with optional surrounding whitespace.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let t = text.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| err())?;
    let d: BigInt = d.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(n, d))
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn is_integral(r: &Rational) -> bool {
    r.is_integer()
}

/// The integer value of `r` if it is a non-negative integer that fits in `u64`.
pub fn to_u64(r: &Rational) -> Option<u64> {
    if r.is_integer() && !r.is_negative() {
        r.to_integer().to_u64()
    } else {
        None
    }
}

/// Lower factorial `(a)_b = a (a-1) ... (a-b+1)`, equal to 1 when `b = 0`.
pub fn lower_factorial(a: &Rational, b: u32) -> Rational {
    let mut acc = one();
    let mut f = a.clone();
    for _ in 0..b {
        acc *= &f;
        f -= one();
    }
    acc
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Smallest integer `>= r`.
pub fn ceil(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

/// Rescales `values` by a positive factor so that they become coprime
/// integers. All-zero input is returned unchanged.
pub fn primitive_integer_vector(values: &[Rational]) -> Vec<Rational> {
    let lcm = values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = values.iter().map(|v| (v * big(lcm.clone())).to_integer()).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if gcd.is_zero() {
        return values.to_vec();
    }
    ints.into_iter().map(|v| big(v / &gcd)).collect()
}

/// Serde adapter storing a rational as its canonical string.
pub mod serde_text {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_factorial_values() {
        assert_eq!(lower_factorial(&int(5), 2), int(20));
        assert_eq!(lower_factorial(&frac(3, 2), 0), int(1));
        assert_eq!(lower_factorial(&frac(3, 2), 2), frac(3, 4));
        assert_eq!(lower_factorial(&int(3), 4), int(0));
    }

    #[test]
    fn parse_and_format_round_trip() {
        for text in ["0", "7", "-3/4", "1/2", "1023"] {
            assert_eq!(format_rational(&parse_rational(text).unwrap()), text);
        }
        assert_eq!(parse_rational(" 2/4 ").unwrap(), frac(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(factorial(5), BigInt::from(120));
    }

    #[test]
    fn primitive_vector() {
        let v = primitive_integer_vector(&[frac(1, 2), frac(1, 2), int(0)]);
        assert_eq!(v, vec![int(1), int(1), int(0)]);
    }
}

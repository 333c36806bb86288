//! Exact rational numbers.
//!
//! [`Rational`] is `num_rational::BigRational`, which keeps every value in
//! lowest terms with a positive denominator. This module adds the small
//! amount of glue the rest of the workspace needs: terse constructors, the
//! `"p/q"` string form used in every JSON document, and a serde adapter.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number, always normalized.
pub type Rational = num_rational::BigRational;

/// The integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// The rational `n / d`, normalized.
///
/// # Panics
/// Panics if `d == 0`.
pub fn frac(n: i64, d: i64) -> Rational {
    assert!(d != 0, "zero denominator");
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// A big integer as a rational.
pub fn from_bigint(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// `b^e` as an exact rational.
pub fn pow_int(b: i64, e: u32) -> Rational {
    from_bigint(num_traits::pow(BigInt::from(b), e as usize))
}

/// `n!` as a big integer.
pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// The canonical string form: `"p/q"`, or `"n"` when the denominator is 1.
pub fn to_string(q: &Rational) -> String {
    q.to_string()
}

/// Error produced when a string is not a rational literal.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed rational literal {0:?}")]
pub struct ParseRationalError(pub String);

/// Parses `"n"`, `"-n"`, or `"p/q"` (with `q != 0`).
pub fn parse(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n = BigInt::from_str(num).map_err(|_| err())?;
    let d = BigInt::from_str(den).map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(n, d))
}

/// `true` when `q` is an integer.
pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

/// Absolute value.
pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

/// `n / d` in lowest terms, for `d > 0`. When `d` fits in a machine word
/// the common factor is found with one word-sized remainder instead of a
/// full big-integer gcd, which dominates hot loops whose values have huge
/// numerators and tiny denominators.
fn reduced(n: BigInt, d: BigInt) -> Rational {
    debug_assert!(d.is_positive());
    if d.is_one() {
        return Rational::from_integer(n);
    }
    match d.to_u64() {
        Some(du) => {
            let g = (n.magnitude() % du).to_u64().expect("remainder below a u64").gcd(&du);
            if g == 1 {
                Rational::new_raw(n, d)
            } else {
                Rational::new_raw(n / g, d / g)
            }
        }
        None => Rational::new(n, d),
    }
}

/// `a + b`, exact.
pub fn add(a: &Rational, b: &Rational) -> Rational {
    let (an, ad, bn, bd) = (a.numer(), a.denom(), b.numer(), b.denom());
    if ad == bd {
        reduced(an + bn, ad.clone())
    } else if ad.is_one() {
        // gcd(a·bd + bn, bd) = gcd(bn, bd) = 1.
        Rational::new_raw(an * bd + bn, bd.clone())
    } else if bd.is_one() {
        Rational::new_raw(bn * ad + an, ad.clone())
    } else {
        reduced(an * bd + bn * ad, ad * bd)
    }
}

/// `a − b`, exact.
pub fn sub(a: &Rational, b: &Rational) -> Rational {
    add(a, &-b)
}

/// `a · s` for a machine integer `s`, exact.
pub fn mul_int(a: &Rational, s: i64) -> Rational {
    if s == 0 {
        return Rational::zero();
    }
    let g = (a.denom() % s.unsigned_abs()).to_u64().expect("remainder below a u64").gcd(&s.unsigned_abs());
    Rational::new_raw(a.numer() * (s / g as i64), a.denom() / g)
}

/// `a / s` for a nonzero machine integer `s`, exact.
///
/// # Panics
/// Panics if `s == 0`.
pub fn div_int(a: &Rational, s: i64) -> Rational {
    assert!(s != 0, "division by zero");
    let g = (a.numer().magnitude() % s.unsigned_abs()).to_u64().expect("remainder below a u64").gcd(&s.unsigned_abs());
    let q = s / g as i64;
    let n = a.numer() / g;
    if q < 0 {
        Rational::new_raw(-n, a.denom() * (-q))
    } else {
        Rational::new_raw(n, a.denom() * q)
    }
}

/// `v + (x − x₀)·s`: the value at `x` of the line through `(x₀, v)` with slope `s`.
pub fn affine(v: &Rational, x: &Rational, x0: &Rational, s: i64) -> Rational {
    add(v, &mul_int(&sub(x, x0), s))
}

/// Wrapper that displays a rational in its canonical string form.
pub struct Show<'a>(pub &'a Rational);

impl fmt::Display for Show<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Serde adapter: `#[serde(with = "g13_core::rational::serde_str")]`.
pub mod serde_str {
    use super::{parse, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(D::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod serde_str_vec {
    use super::{parse, Rational};
    use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&q.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse(s).map_err(D::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalizes_eagerly() {
        let q = frac(6, -4);
        assert_eq!(q.numer(), &BigInt::from(-3));
        assert_eq!(q.denom(), &BigInt::from(2));
        assert_eq!(to_string(&q), "-3/2");
    }

    #[test]
    fn integer_form_has_no_slash() {
        assert_eq!(to_string(&frac(10, 5)), "2");
        assert_eq!(to_string(&int(0)), "0");
    }

    #[test]
    fn parse_round_trip() {
        for s in ["0", "-7", "5059/749", "-236364091/2730"] {
            assert_eq!(to_string(&parse(s).unwrap()), s);
        }
        assert_eq!(parse(" 4/6 ").unwrap(), frac(2, 3));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn factorial_small() {
        assert_eq!(factorial(0), BigInt::from(1));
        assert_eq!(factorial(12), BigInt::from(479_001_600));
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-10_000i64..10_000, 1i64..40, 0u32..40).prop_map(|(n, d, e)| {
            Rational::new(BigInt::from(n) * num_traits::pow(BigInt::from(10), e as usize), BigInt::from(d))
        })
    }

    /// Equal as values and in the same lowest-terms representation.
    fn same(x: Rational, y: Rational) -> bool {
        x.numer() == y.numer() && x.denom() == y.denom()
    }

    proptest! {
        #[test]
        fn fast_ops_agree_with_plain_ops(a in small_rational(), b in small_rational(), s in -50i64..50) {
            prop_assert!(same(add(&a, &b), &a + &b));
            prop_assert!(same(sub(&a, &b), &a - &b));
            prop_assert!(same(mul_int(&a, s), &a * int(s)));
            if s != 0 {
                prop_assert!(same(div_int(&a, s), &a / int(s)));
            }
            prop_assert!(same(affine(&a, &b, &a, s), &a + (&b - &a) * int(s)));
        }
    }
}

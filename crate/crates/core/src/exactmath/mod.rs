//! Exact arithmetic: rationals, dense matrices, integer normal forms,
//! polynomials and truncated power series.
//!
//! Nothing in this crate touches floating point. Rationals are
//! `num_rational::BigRational`, which keeps values reduced with a positive
//! denominator.

mod mat;
mod normal_form;
mod poly;

pub use mat::{Mat, Solution};
pub use normal_form::{hnf, snf, Snf};
pub use poly::{Poly, TruncSeries};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = num_rational::BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn int_to_rat(n: &BigInt) -> Rat {
    Rat::from_integer(n.clone())
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Input(format!("cannot parse rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Input(format!("zero denominator in {s:?}")));
            }
            Ok(Rat::new(p, q))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// `"p/q"`, or `"p"` for integers.
pub fn format_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn format_vec(v: &[Rat]) -> String {
    let parts: Vec<String> = v.iter().map(format_rat).collect();
    format!("({})", parts.join(", "))
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Integer vector if every entry is integral.
pub fn to_integers(v: &[Rat]) -> Option<Vec<BigInt>> {
    v.iter()
        .map(|r| r.is_integer().then(|| r.numer().clone()))
        .collect()
}

/// Scales a rational vector by the lcm of its denominators.
pub fn clear_denominators(v: &[Rat]) -> (Vec<BigInt>, BigInt) {
    let q = common_denominator(v);
    let ints = v
        .iter()
        .map(|r| (r * int_to_rat(&q)).to_integer())
        .collect();
    (ints, q)
}

pub fn gcd_all<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::zero(), |acc, v| acc.gcd(v))
}

/// Divides by the gcd of the entries; the zero vector is returned unchanged.
pub fn primitive(v: &[BigInt]) -> Vec<BigInt> {
    let g = gcd_all(v);
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

pub fn dot_int(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn to_i64(n: &BigInt) -> Result<i64> {
    n.to_i64()
        .ok_or_else(|| Error::Overflow(format!("{n} does not fit in 64 bits")))
}

pub fn to_i64_vec(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter().map(to_i64).collect()
}

/// Binomial coefficient `C(n, k)` for `n >= 0`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Floor division for integers with positive divisor.
pub(crate) fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use proptest::prelude::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("3/6").unwrap(), frac(1, 2));
        assert_eq!(parse_rat(" -4 ").unwrap(), rat(-4));
        assert_eq!(parse_rat("2/-4").unwrap(), frac(-1, 2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
        assert_eq!(format_rat(&frac(-2, 4)), "-1/2");
        assert_eq!(format_rat(&rat(7)), "7");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(7, 3), BigInt::from(35));
        assert_eq!(binomial(3, 7), BigInt::zero());
        assert_eq!(binomial(0, 0), BigInt::one());
    }

    fn small_rat() -> impl Strategy<Value = Rat> {
        (-50i64..50, 1i64..20).prop_map(|(p, q)| frac(p, q))
    }

    proptest! {
        #[test]
        fn rational_field_axioms(a in small_rat(), b in small_rat(), c in small_rat()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            prop_assert_eq!(&a - &a, rat(0));
            if !a.is_zero() {
                prop_assert_eq!(&a * a.recip(), rat(1));
            }
            // always reduced with positive denominator
            let s = &a * &b + &c;
            prop_assert!(s.denom().is_positive());
            prop_assert!(s.numer().gcd(s.denom()).is_one());
        }
    }
}

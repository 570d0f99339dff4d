//! Exact scalar fields.
//!
//! Everything metric in the crate is generic over [`ExactField`]. The trait is
//! implemented for rational numbers over machine integers and over big
//! integers; [`crate::Rational`] is the default choice.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, Zero};

/// An ordered field with exact arithmetic and a canonical `p/q` text form.
pub trait ExactField:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    /// Parses `"p/q"` or an integer literal. Decimal points are rejected.
    fn parse_exact(s: &str) -> Option<Self>;

    /// Canonical `"p/q"` form with `q > 0`, always including the denominator.
    fn to_exact_string(&self) -> String;

    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer fits the field")
    }

    fn from_frac(p: i64, q: i64) -> Self {
        Self::from_int(p) / Self::from_int(q)
    }
}

fn split_fraction(s: &str) -> Option<(&str, &str)> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        Some((p, q)) => Some((p.trim(), q.trim())),
        None => Some((s, "1")),
    }
}

fn is_integer_literal(s: &str) -> bool {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

macro_rules! impl_exact_ratio {
    ($int:ty) => {
        impl ExactField for Ratio<$int> {
            fn parse_exact(s: &str) -> Option<Self> {
                let (p, q) = split_fraction(s)?;
                if !is_integer_literal(p) || !is_integer_literal(q) || q.starts_with('-') {
                    return None;
                }
                let p: $int = p.trim_start_matches('+').parse().ok()?;
                let q: $int = q.trim_start_matches('+').parse().ok()?;
                if q.is_zero() {
                    return None;
                }
                Some(Ratio::new(p, q))
            }

            fn to_exact_string(&self) -> String {
                format!("{}/{}", self.numer(), self.denom())
            }
        }
    };
}

impl_exact_ratio!(i64);
impl_exact_ratio!(i128);
impl_exact_ratio!(BigInt);

/// Sign of a field element as `-1`, `0` or `1`.
pub fn sign_of<T: ExactField>(x: &T) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// `(-1)^k` in the field.
pub fn parity_sign<T: ExactField>(k: usize) -> T {
    if k % 2 == 0 {
        T::one()
    } else {
        -T::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::One;

    #[test]
    fn parses_integers_and_fractions() {
        let half = Rational::parse_exact("1/2").unwrap();
        assert_eq!(half, Rational::from_frac(1, 2));
        assert_eq!(Rational::parse_exact("-3").unwrap(), Rational::from_int(-3));
        assert_eq!(Rational::parse_exact("4/6").unwrap().to_exact_string(), "2/3");
    }

    #[test]
    fn rejects_floats_and_zero_denominators() {
        assert!(Rational::parse_exact("1.5").is_none());
        assert!(Rational::parse_exact("1/0").is_none());
        assert!(Rational::parse_exact("").is_none());
        assert!(Rational::parse_exact("1/-2").is_none());
        assert!(Rational::parse_exact("abc").is_none());
    }

    #[test]
    fn canonical_string_keeps_denominator() {
        assert_eq!(Rational::from_int(3).to_exact_string(), "3/1");
        assert_eq!(Rational::zero().to_exact_string(), "0/1");
        assert_eq!(Rational::from_frac(-1, 12).to_exact_string(), "-1/12");
        assert_eq!(Ratio::<i64>::from_frac(2, -4).to_exact_string(), "-1/2");
        assert!(Rational::one().is_one());
    }
}

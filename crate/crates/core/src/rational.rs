//! Exact rational scalars used for every action, bar endpoint and bound.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalError {
    #[error("cannot parse `{0}` as an exact rational (expected `p/q` or `p`)")]
    Syntax(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("negative value {0} where a non-negative action is required")]
    Negative(String),
}

/// Parses `p/q` or `p` into an exact rational. Whitespace around the tokens is ignored.
pub fn parse_rational(s: &str) -> Result<Rational, RationalError> {
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| RationalError::Syntax(s.to_string()))?;
    let den = BigInt::from_str(den).map_err(|_| RationalError::Syntax(s.to_string()))?;
    if den.is_zero() {
        return Err(RationalError::ZeroDenominator(s.to_string()));
    }
    Ok(BigRational::new(num, den))
}

/// Canonical `p/q` rendering; integers are written without a denominator.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Nearest double, for display and for handing exact values to the numerical layer.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Smallest double that is `>= r`. Used wherever a rational bound is compared against a
/// floating-point measurement, so that rounding can only loosen the bound.
pub fn to_f64_round_up(r: &Rational) -> f64 {
    let f = to_f64(r);
    if !f.is_finite() {
        return f;
    }
    match BigRational::from_float(f) {
        Some(exact) if &exact < r => f.next_up(),
        _ => f,
    }
}

/// Exact rational value of a finite double.
pub fn from_f64(x: f64) -> Option<Rational> {
    BigRational::from_float(x)
}

/// A value on the extended half-line: a finite quantity or `+inf`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Extended<T> {
    Finite(T),
    Infinite,
}

impl<T> Extended<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn finite(&self) -> Option<&T> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Extended<U> {
        match self {
            Extended::Finite(v) => Extended::Finite(f(v)),
            Extended::Infinite => Extended::Infinite,
        }
    }
}

impl<T: Ord> PartialOrd for Extended<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Ord> Ord for Extended<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.cmp(b),
            (Extended::Finite(_), Extended::Infinite) => Less,
            (Extended::Infinite, Extended::Finite(_)) => Greater,
            (Extended::Infinite, Extended::Infinite) => Equal,
        }
    }
}

impl fmt::Display for Extended<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(r) => f.write_str(&format_rational(r)),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

impl fmt::Display for Extended<Action> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(a) => a.fmt(f),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Extended<Rational> {
    type Err = RationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "+inf" | "infinity" => Ok(Extended::Infinite),
            other => parse_rational(other).map(Extended::Finite),
        }
    }
}

/// Exact non-negative action (time-length of a Reeb chord, or a sum of such).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action(Rational);

impl Action {
    pub fn new(value: Rational) -> Result<Self, RationalError> {
        if value.is_negative() {
            return Err(RationalError::Negative(format_rational(&value)));
        }
        Ok(Action(value))
    }

    pub fn zero() -> Self {
        Action(Rational::zero())
    }

    pub fn from_ratio(n: u64, d: u64) -> Self {
        assert!(d != 0, "zero denominator");
        Action(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_integer(n: u64) -> Self {
        Action(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_inner(self) -> Rational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.0)
    }

    /// `self * c` for a positive scalar.
    pub fn scale(&self, c: &Rational) -> Action {
        debug_assert!(c.is_positive());
        Action(&self.0 * c)
    }

    /// `self - c`, or `None` if the result would be negative.
    pub fn checked_sub(&self, c: &Rational) -> Option<Action> {
        let v = &self.0 - c;
        if v.is_negative() {
            None
        } else {
            Some(Action(v))
        }
    }
}

impl Add for &Action {
    type Output = Action;

    fn add(self, rhs: &Action) -> Action {
        Action(&self.0 + &rhs.0)
    }
}

impl Add for Action {
    type Output = Action;

    fn add(self, rhs: Action) -> Action {
        Action(self.0 + rhs.0)
    }
}

impl std::iter::Sum for Action {
    fn sum<I: Iterator<Item = Action>>(iter: I) -> Action {
        iter.fold(Action::zero(), |a, b| a + b)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl FromStr for Action {
    type Err = RationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Action::new(parse_rational(s)?)
    }
}

impl TryFrom<Rational> for Action {
    type Error = RationalError;

    fn try_from(value: Rational) -> Result<Self, Self::Error> {
        Action::new(value)
    }
}

impl serde::Serialize for Action {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Action {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational(" 6/4 ").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(parse_rational("-1/3").unwrap(), rat(-1, 3));
        assert!(matches!(parse_rational("1/0"), Err(RationalError::ZeroDenominator(_))));
        assert!(matches!(parse_rational("1.5"), Err(RationalError::Syntax(_))));
        assert_eq!(format_rational(&rat(10, 5)), "2");
        assert_eq!(format_rational(&rat(201, 100)), "201/100");
    }

    #[test]
    fn action_rejects_negative() {
        assert!("-1".parse::<Action>().is_err());
        assert!("0/1".parse::<Action>().unwrap().is_zero());
    }

    #[test]
    fn round_up_never_undershoots() {
        for (n, d) in [(1, 3), (2, 3), (10, 7), (1, 10), (123456789, 1000)] {
            let r = rat(n, d);
            let f = to_f64_round_up(&r);
            assert!(from_f64(f).unwrap() >= r);
            assert!(f - to_f64(&r) <= f64::EPSILON * f.abs());
        }
        assert_eq!(to_f64_round_up(&int(4)), 4.0);
    }

    #[test]
    fn extended_order_and_display() {
        let a: Extended<Rational> = "inf".parse().unwrap();
        let b: Extended<Rational> = "5/2".parse().unwrap();
        assert!(b < a);
        assert_eq!(a.to_string(), "inf");
        assert_eq!(b.to_string(), "5/2");
    }
}

//! Exact rationals, dyadic weights, three-valued comparisons and rational
//! intervals.
//!
//! Nothing in this crate rounds. Every value is a canonical `p/q` with
//! `q > 0` and `gcd(|p|, q) = 1`, so structural equality is numeric equality.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericsError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("invalid period {0}: a geometric block needs period >= 1")]
    InvalidPeriod(u64),
    #[error("invalid interval [{lo}, {hi}]: lower end exceeds upper end")]
    InvalidInterval { lo: String, hi: String },
    #[error("malformed rational {input:?}: {reason}")]
    Parse { input: String, reason: &'static str },
}

/// Arbitrary-precision exact rational in canonical form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self, NumericsError> {
        let den = den.into();
        if den.is_zero() {
            return Err(NumericsError::ZeroDenominator);
        }
        // BigRational::new reduces and moves the sign onto the numerator.
        Ok(Rational(BigRational::new(num.into(), den)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn two() -> Self {
        Rational::from_integer(2)
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    /// `2^-exp`.
    pub fn dyadic(exp: u64) -> Self {
        Rational(BigRational::new_raw(BigInt::one(), pow2(exp)))
    }

    /// `2^(1 - first)`, the full geometric tail `sum_{n >= first} 2^-n`.
    /// For `first = 0` this is 2.
    pub fn tail_from(first: u64) -> Self {
        if first == 0 {
            Rational::two()
        } else {
            Rational::dyadic(first - 1)
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn checked_div(&self, rhs: &Rational) -> Option<Rational> {
        if rhs.is_zero() {
            None
        } else {
            Some(Rational(&self.0 / &rhs.0))
        }
    }

    pub fn min(self, other: Rational) -> Rational {
        std::cmp::min(self, other)
    }

    pub fn max(self, other: Rational) -> Rational {
        std::cmp::max(self, other)
    }

    /// Exact midpoint of `self` and `other`.
    pub fn midpoint(&self, other: &Rational) -> Rational {
        Rational((&self.0 + &other.0) / BigInt::from(2))
    }

    /// The value as a natural number, if it is one and fits in `u64`.
    pub fn to_natural(&self) -> Option<u64> {
        if self.is_integer() && !self.is_negative() {
            self.numer().to_u64()
        } else {
            None
        }
    }
}

pub(crate) fn pow2(exp: u64) -> BigInt {
    BigInt::one() << usize::try_from(exp).expect("dyadic exponent exceeds address space")
}

/// Clamp a big integer to a natural index, saturating at both ends.
pub(crate) fn clamp_to_index(n: &BigInt) -> u64 {
    if n.is_negative() {
        0
    } else {
        n.to_u64().unwrap_or(u64::MAX)
    }
}

/// Canonical rational `num/den`.
pub fn make_rational(num: i64, den: i64) -> Result<Rational, NumericsError> {
    Rational::new(num, den)
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn all_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// Accepts `p`, `p/q`, `-p` and `-p/q` with decimal-digit `p` and `q`.
/// Decimal points, exponents, whitespace and explicit `+` are rejected.
impl FromStr for Rational {
    type Err = NumericsError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let err = |reason| NumericsError::Parse {
            input: input.to_owned(),
            reason,
        };
        if input.contains('.') {
            return Err(err("decimal notation is not accepted; write p/q"));
        }
        let (negative, body) = match input.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, input),
        };
        let (num, den) = match body.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (body, None),
        };
        if !all_digits(num) {
            return Err(err("numerator must be a nonempty run of decimal digits"));
        }
        let mut p: BigInt = num.parse().map_err(|_| err("numerator out of range"))?;
        if negative {
            p = -p;
        }
        let q: BigInt = match den {
            None => BigInt::one(),
            Some(d) if all_digits(d) => d.parse().map_err(|_| err("denominator out of range"))?,
            Some(_) => return Err(err("denominator must be a nonempty run of decimal digits")),
        };
        Rational::new(p, q).map_err(|_| err("zero denominator"))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(self.0, rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational($trait::$method(self.0, &rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(&self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

/// Panics on a zero divisor, like integer division. Use
/// [`Rational::checked_div`] when the divisor is not known to be nonzero.
impl Div<&Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        self.checked_div(rhs).expect("division by zero rational")
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

/// The weight `2^-index` attached to an enumeration index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicWeight(pub u64);

impl DyadicWeight {
    pub fn index(self) -> u64 {
        self.0
    }

    pub fn value(self) -> Rational {
        Rational::dyadic(self.0)
    }
}

/// Exact `sum_{n in indices} 2^-n`.
pub fn weight_sum(indices: &BTreeSet<u64>) -> Rational {
    let Some(&deepest) = indices.last() else {
        return Rational::zero();
    };
    // Over the common denominator 2^deepest each index contributes one bit.
    let mut numer = BigInt::zero();
    for &n in indices {
        numer.set_bit(deepest - n, true);
    }
    Rational(BigRational::new(numer, pow2(deepest)))
}

/// Exact `sum_{first <= n < end} 2^-n`; zero when the range is empty.
pub fn range_weight_sum(first: u64, end: u64) -> Rational {
    if end <= first {
        Rational::zero()
    } else {
        Rational::tail_from(first) - Rational::tail_from(end)
    }
}

/// Closed form of `sum_{j >= 0} 2^-(first + j*period)`,
/// i.e. `2^-first * 2^period / (2^period - 1)`.
pub fn geometric_block_sum(first: u64, period: u64) -> Result<Rational, NumericsError> {
    if period == 0 {
        return Err(NumericsError::InvalidPeriod(period));
    }
    let block = pow2(period);
    let numer = block.clone();
    let denom = (block - BigInt::one()) * pow2(first);
    Ok(Rational(BigRational::new(numer, denom)))
}

/// Three-valued truth for comparisons against approximately known values.
///
/// There is deliberately no conversion to `bool`; callers must say what an
/// `Unknown` means in their context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tribool {
    CertainTrue,
    CertainFalse,
    Unknown,
}

impl Tribool {
    pub fn is_certain_true(self) -> bool {
        self == Tribool::CertainTrue
    }

    pub fn is_certain_false(self) -> bool {
        self == Tribool::CertainFalse
    }

    pub fn is_unknown(self) -> bool {
        self == Tribool::Unknown
    }

    /// Whether `self` is at least as informative as `coarser` and agrees
    /// with it wherever `coarser` is certain.
    pub fn refines(self, coarser: Tribool) -> bool {
        coarser == Tribool::Unknown || self == coarser
    }
}

/// Closed interval `[lo, hi]` with rational ends.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatInterval {
    lo: Rational,
    hi: Rational,
}

impl RatInterval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, NumericsError> {
        if lo > hi {
            return Err(NumericsError::InvalidInterval {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        Ok(RatInterval { lo, hi })
    }

    pub fn point(value: Rational) -> Self {
        RatInterval {
            lo: value.clone(),
            hi: value,
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, inner: &RatInterval) -> bool {
        self.lo <= inner.lo && inner.hi <= self.hi
    }

    pub fn strictly_below(&self, x: &Rational) -> Tribool {
        interval_strictly_below(self, x)
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Decides "the value enclosed by `i` is `< x`" as far as `i` permits.
pub fn interval_strictly_below(i: &RatInterval, x: &Rational) -> Tribool {
    if &i.hi < x {
        Tribool::CertainTrue
    } else if &i.lo >= x {
        Tribool::CertainFalse
    } else {
        Tribool::Unknown
    }
}

/// `gcd` exposure for tests that check canonical form.
pub fn is_canonical(r: &Rational) -> bool {
    r.denom().is_positive() && r.numer().abs().gcd(r.denom()).is_one()
}

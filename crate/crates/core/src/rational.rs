//! Exact rational numbers.
//!
//! Every truth value, threshold and shift constant in the reasoner is a
//! [`Rational`]. The type is a thin wrapper around [`BigRational`] that fixes
//! the textual form (`a/b`, or `a` for integers), accepts decimal input, and
//! serializes as a string so that JSON round-trips are bit-exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

/// An always-reduced fraction with a positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn half() -> Self {
        Rational::new(1, 2)
    }

    /// Builds `numer/denom`. Panics when `denom == 0`.
    pub fn new(numer: i64, denom: i64) -> Self {
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_big(numer: BigInt, denom: BigInt) -> Self {
        Rational(BigRational::new(numer, denom))
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

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// True when the value lies in the closed unit interval.
    pub fn in_unit_interval(&self) -> bool {
        !self.0.is_negative() && self.0 <= BigRational::one()
    }

    /// `1 - self`.
    pub fn complement(&self) -> Rational {
        Rational(BigRational::one() - &self.0)
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn min_of<'a>(&'a self, other: &'a Rational) -> &'a Rational {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max_of<'a>(&'a self, other: &'a Rational) -> &'a Rational {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Truncated subtraction `max(self - c, 0)`.
    pub fn monus(&self, c: &Rational) -> Rational {
        let d = &self.0 - &c.0;
        if d.is_negative() {
            Rational::zero()
        } else {
            Rational(d)
        }
    }

    /// Truncated addition `min(self + c, 1)`.
    pub fn bounded_add(&self, c: &Rational) -> Rational {
        let s = &self.0 + &c.0;
        if s > BigRational::one() {
            Rational::one()
        } else {
            Rational(s)
        }
    }

    /// Midpoint `(self + other) / 2`.
    pub fn midpoint(&self, other: &Rational) -> Rational {
        Rational((&self.0 + &other.0) / BigRational::from_integer(BigInt::from(2)))
    }

    pub fn div_int(&self, n: u64) -> Rational {
        Rational(&self.0 / BigRational::from_integer(BigInt::from(n)))
    }

    pub fn mul_int(&self, n: i64) -> Rational {
        Rational(&self.0 * BigRational::from_integer(BigInt::from(n)))
    }

    /// `self / other` as an integer when `other` divides `self` exactly.
    pub fn exact_quotient(&self, other: &Rational) -> Option<BigInt> {
        if other.is_zero() {
            return None;
        }
        let q = &self.0 / &other.0;
        q.is_integer().then(|| q.to_integer())
    }

    pub fn to_f64_lossy(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    /// `ceil(log2(n))` for a positive integer, and 0 for `n <= 1`.
    pub(crate) fn ceil_log2(n: &BigInt) -> u64 {
        if n <= &BigInt::one() {
            return 0;
        }
        let m: BigUint = (n - BigInt::one()).magnitude().clone();
        m.bits()
    }

    /// Greatest common divisor of two rationals as elements of the additive
    /// group they generate: the largest `g` such that both are integer
    /// multiples of `g`. Returns the absolute value of the nonzero argument
    /// when the other is zero.
    pub fn rational_gcd(&self, other: &Rational) -> Rational {
        if self.is_zero() {
            return other.abs();
        }
        if other.is_zero() {
            return self.abs();
        }
        let l = self.denom().lcm(other.denom());
        let a = (self.numer() * (&l / self.denom())).abs();
        let b = (other.numer() * (&l / other.denom())).abs();
        Rational::from_big(a.gcd(&b), l)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
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

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `a`, `a/b` and decimals such as `0.25` or `-1.5`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let t = s.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t),
        };
        if body.is_empty() {
            return Err(err());
        }
        let value = if let Some((n, d)) = body.split_once('/') {
            let n = parse_digits(n).ok_or_else(err)?;
            let d = parse_digits(d).ok_or_else(err)?;
            if d.is_zero() {
                return Err(err());
            }
            BigRational::new(n, d)
        } else if let Some((int, frac)) = body.split_once('.') {
            if int.is_empty() && frac.is_empty() {
                return Err(err());
            }
            let int = if int.is_empty() {
                BigInt::zero()
            } else {
                parse_digits(int).ok_or_else(err)?
            };
            let scale = BigInt::from(10u32).pow(frac.len() as u32);
            let frac_v = if frac.is_empty() {
                BigInt::zero()
            } else {
                parse_digits(frac).ok_or_else(err)?
            };
            BigRational::new(int * &scale + frac_v, scale)
        } else {
            BigRational::from_integer(parse_digits(body).ok_or_else(err)?)
        };
        Ok(Rational(if neg { -value } else { value }))
    }
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::parse_bytes(s.as_bytes(), 10).inspect(|n| debug_assert!(n.sign() != Sign::Minus))
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
    ($tr:ident, $m:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                Rational($tr::$m(&self.0, &rhs.0))
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational($tr::$m(self.0, rhs.0))
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                Rational($tr::$m(self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

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

/// Total order helper used where an `Ordering` on borrowed values is needed.
pub fn cmp_ref(a: &Rational, b: &Rational) -> Ordering {
    a.cmp(b)
}

//! Exact rational scalars.
//!
//! Negative ⊛-powers and polynomial evaluations at negative points leave the
//! integers, so results that may be fractional are carried as [`ExactScalar`].

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A canonical rational `numerator / denominator` with `denominator >= 1`
/// and `gcd(|numerator|, denominator) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactScalar(BigRational);

impl ExactScalar {
    pub fn new(numerator: BigInt, denominator: BigInt) -> Self {
        // BigRational::new normalises sign and reduces; panics on zero denominator.
        ExactScalar(BigRational::new(numerator, denominator))
    }

    pub fn from_integer(value: BigInt) -> Self {
        ExactScalar(BigRational::from_integer(value))
    }

    pub fn zero() -> Self {
        ExactScalar(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactScalar(BigRational::one())
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// The integer value, if the scalar is integral.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.numer().clone())
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn abs(&self) -> Self {
        ExactScalar(self.0.abs())
    }

    /// Integer power; negative exponents invert. Returns `None` for `0^e`, `e < 0`.
    pub fn pow(&self, exp: i64) -> Option<Self> {
        if exp < 0 && self.0.is_zero() {
            return None;
        }
        let magnitude = u32::try_from(exp.unsigned_abs()).ok()?;
        let base = if exp < 0 { self.0.recip() } else { self.0.clone() };
        Some(ExactScalar(num_traits::pow::Pow::pow(&base, magnitude)))
    }

    /// Parse `"p"` or `"p/q"`.
    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        match text.split_once('/') {
            None => text.parse::<BigInt>().ok().map(Self::from_integer),
            Some((n, d)) => {
                let n = n.trim().parse::<BigInt>().ok()?;
                let d = d.trim().parse::<BigInt>().ok()?;
                (!d.is_zero()).then(|| Self::new(n, d))
            }
        }
    }
}

impl From<BigInt> for ExactScalar {
    fn from(value: BigInt) -> Self {
        Self::from_integer(value)
    }
}

impl From<i64> for ExactScalar {
    fn from(value: i64) -> Self {
        Self::from_integer(BigInt::from(value))
    }
}

impl From<BigRational> for ExactScalar {
    fn from(value: BigRational) -> Self {
        ExactScalar(value)
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        ExactScalar::parse(&text)
            .ok_or_else(|| serde::de::Error::custom(format!("invalid rational {text:?}")))
    }
}

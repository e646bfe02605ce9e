//! Scalar backends.
//!
//! Two implementations of [`Scalar`] are provided:
//!
//! * [`Rational`]: exact arbitrary-precision fractions, always in lowest
//!   terms with a positive denominator. Used for algebraic identities.
//! * [`Fixed`]: binary fixed point with `P` fractional bits. Addition,
//!   subtraction and `mod_one` are exact; multiplication, division and
//!   square roots round to the nearest representable value. Used for orbits
//!   of irrational parameters.
//!
//! Generic code is written against the trait; the backend is chosen once at
//! the top of an experiment.

mod fixed;
mod rational;

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

pub use fixed::Fixed;
pub use rational::Rational;

/// Smallest supported number of fractional bits.
pub const MIN_PRECISION_BITS: u32 = 64;
/// Default number of fractional bits for the fixed-point backend.
pub const DEFAULT_PRECISION_BITS: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumericsError {
    #[error("malformed scalar literal {0:?}")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("precision must be at least {MIN_PRECISION_BITS} bits, got {0}")]
    PrecisionTooSmall(u32),
}

/// Which arithmetic a scalar uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Rational,
    Fixed,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Rational => f.write_str("rational"),
            Backend::Fixed => f.write_str("fixed"),
        }
    }
}

/// Precision settings shared by every scalar of an experiment.
///
/// The comparison tolerance is `2^-(P-16)` and only applies to the
/// fixed-point backend; rational comparisons are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NumericsConfig {
    precision_bits: u32,
}

impl NumericsConfig {
    pub fn new(precision_bits: u32) -> Result<Self, NumericsError> {
        if precision_bits < MIN_PRECISION_BITS {
            return Err(NumericsError::PrecisionTooSmall(precision_bits));
        }
        Ok(Self { precision_bits })
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// Exponent `e` of the fixed-point tolerance `2^-e`.
    pub fn tolerance_exponent(&self) -> u32 {
        self.precision_bits - 16
    }

    /// Decimal digits needed to print a `P`-bit fraction unambiguously.
    pub fn decimal_digits(&self) -> usize {
        (self.precision_bits as f64 * std::f64::consts::LOG10_2).ceil() as usize
    }
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            precision_bits: DEFAULT_PRECISION_BITS,
        }
    }
}

/// A real number under one of the arithmetic backends.
///
/// Values are immutable. Mixing fixed-point values of different precisions
/// is a programming error and panics.
pub trait Scalar:
    Clone
    + Eq
    + Ord
    + Hash
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    const BACKEND: Backend;

    /// Parses `"p/q"`, an integer, or a decimal literal.
    fn parse(text: &str, cfg: &NumericsConfig) -> Result<Self, NumericsError>;

    /// `num / den`, rounded to the backend's precision. `den` must be nonzero.
    fn from_ratio(num: i64, den: i64, cfg: &NumericsConfig) -> Self;

    /// `num / den` for arbitrary-size integers. `den` must be nonzero.
    fn from_big_ratio(num: &BigInt, den: &BigInt, cfg: &NumericsConfig) -> Self;

    /// Correctly rounded approximation of an `f64`.
    fn from_f64(value: f64, cfg: &NumericsConfig) -> Self;

    fn from_integer(n: i64, cfg: &NumericsConfig) -> Self {
        Self::from_ratio(n, 1, cfg)
    }

    fn zero(cfg: &NumericsConfig) -> Self {
        Self::from_integer(0, cfg)
    }

    fn one(cfg: &NumericsConfig) -> Self {
        Self::from_integer(1, cfg)
    }

    /// Precision of this value, or `None` for exact values.
    fn precision(&self) -> Option<u32>;

    /// A configuration reproducing this value's precision.
    fn config(&self) -> NumericsConfig {
        self.precision()
            .map(|p| NumericsConfig { precision_bits: p })
            .unwrap_or_default()
    }

    /// Integer `n` at the same precision as `self`.
    fn int_like(&self, n: i64) -> Self {
        Self::from_integer(n, &self.config())
    }

    /// Division; `None` when `other` is zero.
    fn checked_div(&self, other: &Self) -> Option<Self>;

    /// The representative of `self` modulo 1 in `[0, 1)`.
    fn mod_one(&self) -> Self;

    /// Largest integer not exceeding `self`.
    fn floor(&self) -> BigInt;

    fn signum(&self) -> i8;

    fn is_zero(&self) -> bool {
        self.signum() == 0
    }

    fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn to_f64(&self) -> f64;

    /// Square root of a non-negative value. Exact backends return `None` when
    /// the root is not representable.
    fn sqrt(&self) -> Option<Self>;

    /// Comparison tolerance, `None` for exact backends.
    fn tolerance(&self) -> Option<Self>;

    /// Equality up to the backend's tolerance.
    fn near(&self, other: &Self) -> bool {
        match self.tolerance() {
            None => self == other,
            Some(tol) => (self.clone() - other).abs() <= tol,
        }
    }

    /// Equality of circle points (values taken modulo 1) up to tolerance.
    fn near_mod_one(&self, other: &Self) -> bool {
        let d = (self.clone() - other).mod_one();
        match self.tolerance() {
            None => d.is_zero(),
            Some(tol) => d <= tol || self.int_like(1) - &d <= tol,
        }
    }

    /// The exact rational value, available only from exact backends.
    fn to_rational(&self) -> Option<BigRational>;
}

/// Circular distance `min(|a-b| mod 1, 1 - |a-b| mod 1)`.
pub fn circle_distance<S: Scalar>(a: &S, b: &S) -> S {
    let d = (a.clone() - b).mod_one();
    let e = d.int_like(1) - &d;
    if d <= e {
        d
    } else {
        e
    }
}

/// Splits `"p/q"` or a decimal literal into an exact fraction.
pub(crate) fn parse_fraction(text: &str) -> Result<(BigInt, BigInt), NumericsError> {
    let t = text.trim();
    let malformed = || NumericsError::Malformed(text.to_string());
    if t.is_empty() {
        return Err(malformed());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = parse_integer(p).ok_or_else(malformed)?;
        let q: BigInt = parse_integer(q).ok_or_else(malformed)?;
        if q == BigInt::from(0) {
            return Err(NumericsError::ZeroDenominator(text.to_string()));
        }
        return Ok((p, q));
    }
    let (negative, body) = match t.as_bytes()[0] {
        b'-' => (true, &t[1..]),
        b'+' => (false, &t[1..]),
        _ => (false, t),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(malformed());
    }
    let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return Err(malformed());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = if digits.is_empty() {
        BigInt::from(0)
    } else {
        digits.parse().map_err(|_| malformed())?
    };
    if negative {
        num = -num;
    }
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    Ok((num, den))
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let s = s.trim();
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_rejects_small_precision() {
        assert_eq!(
            NumericsConfig::new(63),
            Err(NumericsError::PrecisionTooSmall(63))
        );
        assert!(NumericsConfig::new(64).is_ok());
    }

    #[test]
    fn decimal_digits_cover_precision() {
        assert_eq!(NumericsConfig::default().decimal_digits(), 78);
        assert_eq!(NumericsConfig::new(64).unwrap().decimal_digits(), 20);
    }

    #[test]
    fn fraction_parsing() {
        let (p, q) = parse_fraction("-0.250").unwrap();
        assert_eq!((p, q), (BigInt::from(-250), BigInt::from(1000)));
        assert!(parse_fraction("1/0").is_err());
        assert!(parse_fraction("1.2.3").is_err());
        assert!(parse_fraction("abc").is_err());
        assert!(parse_fraction(".").is_err());
        assert!(parse_fraction("").is_err());
        assert_eq!(parse_fraction(".5").unwrap().0, BigInt::from(5));
    }
}

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{parse_fraction, Backend, NumericsConfig, NumericsError, Scalar};

/// Exact rational number in lowest terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
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

impl Scalar for Rational {
    const BACKEND: Backend = Backend::Rational;

    fn parse(text: &str, _cfg: &NumericsConfig) -> Result<Self, NumericsError> {
        let (p, q) = parse_fraction(text)?;
        Ok(Rational::new(p, q))
    }

    fn from_ratio(num: i64, den: i64, _cfg: &NumericsConfig) -> Self {
        Rational::new(num, den)
    }

    fn from_big_ratio(num: &BigInt, den: &BigInt, _cfg: &NumericsConfig) -> Self {
        Rational::new(num.clone(), den.clone())
    }

    fn from_f64(value: f64, _cfg: &NumericsConfig) -> Self {
        Rational(BigRational::from_float(value).expect("finite float"))
    }

    fn precision(&self) -> Option<u32> {
        None
    }

    fn checked_div(&self, other: &Self) -> Option<Self> {
        if other.0.is_zero() {
            None
        } else {
            Some(Rational(&self.0 / &other.0))
        }
    }

    fn mod_one(&self) -> Self {
        Rational(&self.0 - self.0.floor())
    }

    fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    fn signum(&self) -> i8 {
        if self.0.is_zero() {
            0
        } else if self.0.is_positive() {
            1
        } else {
            -1
        }
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    fn sqrt(&self) -> Option<Self> {
        if self.0.is_negative() {
            return None;
        }
        let p = self.0.numer().sqrt();
        let q = self.0.denom().sqrt();
        (&p * &p == *self.0.numer() && &q * &q == *self.0.denom()).then(|| Rational::new(p, q))
    }

    fn tolerance(&self) -> Option<Self> {
        None
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.0.clone())
    }

    fn int_like(&self, n: i64) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    fn one(_cfg: &NumericsConfig) -> Self {
        Rational(BigRational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        Rational::parse(s, &NumericsConfig::default()).unwrap()
    }

    #[test]
    fn mod_one_examples() {
        assert_eq!(q("3/2").mod_one(), q("1/2"));
        assert_eq!(q("-1/4").mod_one(), q("3/4"));
        assert_eq!(q("7/3").mod_one(), q("1/3"));
        assert_eq!(q("-2").mod_one(), q("0"));
    }

    #[test]
    fn parse_examples() {
        assert_eq!(q("1/3"), Rational::new(1, 3));
        assert_eq!(q("2/6"), Rational::new(1, 3));
        assert_eq!(q("0.125"), Rational::new(1, 8));
        assert_eq!(q("-3/-6").to_string(), "1/2");
        assert!(matches!(
            Rational::parse("2/0", &NumericsConfig::default()),
            Err(NumericsError::ZeroDenominator(_))
        ));
    }

    #[test]
    fn lowest_terms_positive_denominator() {
        let r = Rational::new(4, -6);
        assert_eq!(r.numer(), &BigInt::from(-2));
        assert_eq!(r.denom(), &BigInt::from(3));
    }

    #[test]
    fn sqrt_only_when_exact() {
        assert_eq!(q("25/16").sqrt(), Some(q("5/4")));
        assert_eq!(q("2").sqrt(), None);
        assert_eq!(q("-1").sqrt(), None);
    }
}

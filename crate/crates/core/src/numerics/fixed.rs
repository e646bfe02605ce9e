use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::{parse_fraction, Backend, NumericsConfig, NumericsError, Scalar};

type Limbs = SmallVec<[u64; 6]>;

/// Binary fixed-point number `M / 2^P`.
///
/// `M` is stored in two's complement over `ceil(P/64) + 1` little-endian
/// limbs, which leaves at least 64 bits for the integer part. Values that
/// overflow the integer part wrap silently; every quantity in this crate is
/// bounded by a few units.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Fixed {
    frac_bits: u32,
    limbs: Limbs,
}

fn limb_count(frac_bits: u32) -> usize {
    frac_bits.div_ceil(64) as usize + 1
}

impl Fixed {
    fn zeroed(frac_bits: u32) -> Self {
        Fixed {
            frac_bits,
            limbs: SmallVec::from_elem(0, limb_count(frac_bits)),
        }
    }

    /// Builds `mantissa / 2^frac_bits`.
    pub fn from_mantissa(mantissa: &BigInt, frac_bits: u32) -> Self {
        let n = limb_count(frac_bits);
        let modulus = BigInt::one() << (64 * n);
        let wrapped = mantissa.mod_floor(&modulus);
        let (_, digits) = wrapped.to_u64_digits();
        let mut out = Fixed::zeroed(frac_bits);
        for (dst, src) in out.limbs.iter_mut().zip(digits) {
            *dst = src;
        }
        out
    }

    /// The integer `M` with `self = M / 2^P`.
    pub fn mantissa(&self) -> BigInt {
        let mut bytes = Vec::with_capacity(self.limbs.len() * 8);
        for limb in &self.limbs {
            bytes.extend_from_slice(&limb.to_le_bytes());
        }
        let magnitude = BigUint::from_bytes_le(&bytes);
        if self.is_negative() {
            BigInt::from_biguint(Sign::Plus, magnitude) - (BigInt::one() << (64 * self.limbs.len()))
        } else {
            BigInt::from_biguint(Sign::Plus, magnitude)
        }
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    #[inline]
    fn check(&self, other: &Fixed) {
        assert_eq!(
            self.frac_bits, other.frac_bits,
            "fixed-point precision mismatch"
        );
    }

    /// `0 <= M <= 2^16`, i.e. a non-negative value within the comparison tolerance.
    #[inline]
    fn within_tolerance(&self) -> bool {
        self.limbs[1..].iter().all(|&l| l == 0) && self.limbs[0] <= 1 << 16
    }

    #[inline]
    fn top(&self) -> i64 {
        *self.limbs.last().expect("non-empty limbs") as i64
    }

    /// 64-bit window of `M` starting at bit `offset`.
    #[inline]
    fn window(&self, offset: u32) -> u64 {
        let idx = (offset / 64) as usize;
        let shift = offset % 64;
        let lo = self.limbs[idx];
        if shift == 0 {
            lo
        } else {
            let hi = self
                .limbs
                .get(idx + 1)
                .copied()
                .unwrap_or(if self.top() < 0 { u64::MAX } else { 0 });
            (lo >> shift) | (hi << (64 - shift))
        }
    }

    #[inline]
    fn add_in_place(&mut self, rhs: &Fixed) {
        self.check(rhs);
        let mut carry = false;
        for (a, &b) in self.limbs.iter_mut().zip(rhs.limbs.iter()) {
            let (s1, c1) = a.overflowing_add(b);
            let (s2, c2) = s1.overflowing_add(carry as u64);
            *a = s2;
            carry = c1 | c2;
        }
    }

    #[inline]
    fn sub_in_place(&mut self, rhs: &Fixed) {
        self.check(rhs);
        let mut borrow = false;
        for (a, &b) in self.limbs.iter_mut().zip(rhs.limbs.iter()) {
            let (s1, b1) = a.overflowing_sub(b);
            let (s2, b2) = s1.overflowing_sub(borrow as u64);
            *a = s2;
            borrow = b1 | b2;
        }
    }

    fn round_shift(value: BigInt, shift: u32) -> BigInt {
        if shift == 0 {
            return value;
        }
        let half = BigInt::one() << (shift - 1);
        (value + half).div_floor(&(BigInt::one() << shift))
    }

    fn from_ratio_big(num: &BigInt, den: &BigInt, frac_bits: u32) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let (num, den) = if den.is_negative() {
            (-num, -den)
        } else {
            (num.clone(), den.clone())
        };
        // round(num * 2^P / den), ties upward
        let scaled = (num << (frac_bits + 1)) + &den;
        let mantissa = scaled.div_floor(&(den << 1));
        Fixed::from_mantissa(&mantissa, frac_bits)
    }
}

impl PartialOrd for Fixed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fixed {
    #[inline]
    fn cmp(&self, other: &Self) -> Ordering {
        self.check(other);
        match self.top().cmp(&other.top()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let n = self.limbs.len() - 1;
        for i in (0..n).rev() {
            match self.limbs[i].cmp(&other.limbs[i]) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl Add for Fixed {
    type Output = Fixed;
    #[inline]
    fn add(mut self, rhs: Fixed) -> Fixed {
        self.add_in_place(&rhs);
        self
    }
}

impl<'a> Add<&'a Fixed> for Fixed {
    type Output = Fixed;
    #[inline]
    fn add(mut self, rhs: &'a Fixed) -> Fixed {
        self.add_in_place(rhs);
        self
    }
}

impl Sub for Fixed {
    type Output = Fixed;
    #[inline]
    fn sub(mut self, rhs: Fixed) -> Fixed {
        self.sub_in_place(&rhs);
        self
    }
}

impl<'a> Sub<&'a Fixed> for Fixed {
    type Output = Fixed;
    #[inline]
    fn sub(mut self, rhs: &'a Fixed) -> Fixed {
        self.sub_in_place(rhs);
        self
    }
}

impl Neg for Fixed {
    type Output = Fixed;
    fn neg(self) -> Fixed {
        let mut out = Fixed::zeroed(self.frac_bits);
        out.sub_in_place(&self);
        out
    }
}

impl<'a> Mul<&'a Fixed> for Fixed {
    type Output = Fixed;
    fn mul(self, rhs: &'a Fixed) -> Fixed {
        self.check(rhs);
        let product = self.mantissa() * rhs.mantissa();
        Fixed::from_mantissa(&Fixed::round_shift(product, self.frac_bits), self.frac_bits)
    }
}

impl Mul for Fixed {
    type Output = Fixed;
    fn mul(self, rhs: Fixed) -> Fixed {
        self * &rhs
    }
}

impl fmt::Display for Fixed {
    /// Decimal with `ceil(P log10 2)` fractional digits, enough to round-trip.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = NumericsConfig {
            precision_bits: self.frac_bits,
        }
        .decimal_digits();
        let m = self.mantissa();
        let negative = m.is_negative();
        let ten_pow = num_traits::pow(BigInt::from(10), digits);
        let scaled = Fixed::round_shift(m.abs() * &ten_pow, self.frac_bits);
        let (int, frac) = scaled.div_rem(&ten_pow);
        if negative && !scaled.is_zero() {
            f.write_str("-")?;
        }
        write!(f, "{int}.{:0>width$}", frac.to_string(), width = digits)
    }
}

impl fmt::Debug for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.20}~", self.to_f64())
    }
}

impl Scalar for Fixed {
    const BACKEND: Backend = Backend::Fixed;

    fn parse(text: &str, cfg: &NumericsConfig) -> Result<Self, NumericsError> {
        let (p, q) = parse_fraction(text)?;
        Ok(Fixed::from_ratio_big(&p, &q, cfg.precision_bits))
    }

    fn from_ratio(num: i64, den: i64, cfg: &NumericsConfig) -> Self {
        Fixed::from_ratio_big(&BigInt::from(num), &BigInt::from(den), cfg.precision_bits)
    }

    fn from_big_ratio(num: &BigInt, den: &BigInt, cfg: &NumericsConfig) -> Self {
        Fixed::from_ratio_big(num, den, cfg.precision_bits)
    }

    fn from_f64(value: f64, cfg: &NumericsConfig) -> Self {
        let r = BigRational::from_float(value).expect("finite float");
        Fixed::from_ratio_big(r.numer(), r.denom(), cfg.precision_bits)
    }

    fn from_integer(n: i64, cfg: &NumericsConfig) -> Self {
        Fixed::from_mantissa(&(BigInt::from(n) << cfg.precision_bits), cfg.precision_bits)
    }

    fn precision(&self) -> Option<u32> {
        Some(self.frac_bits)
    }

    fn checked_div(&self, other: &Self) -> Option<Self> {
        self.check(other);
        let den = other.mantissa();
        if den.is_zero() {
            return None;
        }
        Some(Fixed::from_ratio_big(
            &self.mantissa(),
            &den,
            self.frac_bits,
        ))
    }

    #[inline]
    fn mod_one(&self) -> Self {
        let mut out = self.clone();
        let bits = self.frac_bits as usize;
        for (i, limb) in out.limbs.iter_mut().enumerate() {
            let lo = 64 * i;
            if lo >= bits {
                *limb = 0;
            } else if lo + 64 > bits {
                *limb &= (1u64 << (bits - lo)) - 1;
            }
        }
        out
    }

    fn floor(&self) -> BigInt {
        self.mantissa()
            .div_floor(&(BigInt::one() << self.frac_bits))
    }

    #[inline]
    fn signum(&self) -> i8 {
        let top = self.top();
        if top < 0 {
            -1
        } else if top > 0 || self.limbs.iter().any(|&l| l != 0) {
            1
        } else {
            0
        }
    }

    /// Nearest `f64`, except that a fractional part just below 1 stays below
    /// 1, so circle points in `[0, 1)` map into `[0, 1)`.
    #[inline]
    fn to_f64(&self) -> f64 {
        let int = self.window(self.frac_bits) as i64;
        let frac = self.window(self.frac_bits - 64) as f64 * (-64f64).exp2();
        int as f64 + frac.min(1.0 - f64::EPSILON / 2.0)
    }

    fn sqrt(&self) -> Option<Self> {
        let m = self.mantissa();
        if m.is_negative() {
            return None;
        }
        let root = (m << self.frac_bits).sqrt();
        Some(Fixed::from_mantissa(&root, self.frac_bits))
    }

    fn tolerance(&self) -> Option<Self> {
        Some(Fixed::from_mantissa(
            &BigInt::from(1u32 << 16),
            self.frac_bits,
        ))
    }

    fn near(&self, other: &Self) -> bool {
        let d = self.clone() - other;
        let d = if d.is_negative() { -d } else { d };
        d.within_tolerance()
    }

    fn near_mod_one(&self, other: &Self) -> bool {
        let d = (self.clone() - other).mod_one();
        d.within_tolerance() || (-d).mod_one().within_tolerance()
    }

    fn to_rational(&self) -> Option<BigRational> {
        None
    }
}

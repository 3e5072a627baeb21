//! Exact decimal scalars: an arbitrary-precision integer mantissa scaled by a
//! power of ten.
//!
//! Addition, subtraction and multiplication are exact. Division and scaling by
//! a rational are exact whenever the result has a terminating decimal
//! expansion and are otherwise rounded half-to-even to [`DIV_PRECISION`]
//! significant digits.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Significant digits kept when a quotient does not terminate.
pub const DIV_PRECISION: u32 = 34;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Decimal {
    // Normalized: no trailing zero digits in the mantissa; zero has exponent 0.
    mantissa: BigInt,
    exponent: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecimalError {
    #[error("invalid decimal literal `{0}`")]
    Invalid(String),
    #[error("division by zero")]
    DivisionByZero,
}

fn pow10(n: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u8), n as usize)
}

fn digit_count(n: &BigInt) -> u32 {
    if n.is_zero() {
        1
    } else {
        n.abs().to_string().len() as u32
    }
}

impl Decimal {
    pub fn new(mantissa: impl Into<BigInt>, exponent: i32) -> Self {
        Self::normalized(mantissa.into(), exponent)
    }

    pub fn zero() -> Self {
        Self { mantissa: BigInt::zero(), exponent: 0 }
    }

    pub fn one() -> Self {
        Self::from(1i64)
    }

    fn normalized(mut mantissa: BigInt, mut exponent: i32) -> Self {
        if mantissa.is_zero() {
            return Self::zero();
        }
        let ten = BigInt::from(10u8);
        loop {
            let (q, r) = mantissa.div_rem(&ten);
            if !r.is_zero() {
                break;
            }
            mantissa = q;
            exponent += 1;
        }
        Self { mantissa, exponent }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.sign() == Sign::Minus
    }

    pub fn abs(&self) -> Self {
        Self { mantissa: self.mantissa.abs(), exponent: self.exponent }
    }

    /// Both mantissas rescaled to the smaller exponent.
    fn aligned(&self, other: &Self) -> (BigInt, BigInt, i32) {
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa * pow10((self.exponent - e) as u32);
        let b = &other.mantissa * pow10((other.exponent - e) as u32);
        (a, b, e)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exponent >= 0 {
            BigRational::from_integer(&self.mantissa * pow10(self.exponent as u32))
        } else {
            BigRational::new(self.mantissa.clone(), pow10((-self.exponent) as u32))
        }
    }

    /// Converts a rational to a decimal, rounding when the expansion does not
    /// terminate.
    pub fn from_rational(r: &BigRational) -> Self {
        Self::quotient(r.numer().clone(), r.denom().clone())
    }

    fn quotient(num: BigInt, den: BigInt) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return Self::zero();
        }
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num, den) };
        let g = num.gcd(&den);
        let (num, den) = (num / &g, den / &g);

        // Terminating iff the reduced denominator is 2^a * 5^b.
        let two = BigInt::from(2u8);
        let five = BigInt::from(5u8);
        let (mut rest, mut twos, mut fives) = (den.clone(), 0u32, 0u32);
        while rest.is_even() {
            rest /= &two;
            twos += 1;
        }
        while (&rest % &five).is_zero() {
            rest /= &five;
            fives += 1;
        }
        if rest.is_one() {
            let k = twos.max(fives);
            return Self::normalized(num * pow10(k) / den, -(k as i32));
        }

        // Scale so the integer quotient carries a few digits beyond the target
        // precision, then round once.
        let shift = DIV_PRECISION as i64 + 3 + digit_count(&den) as i64 - digit_count(&num) as i64;
        let (n, d) = if shift >= 0 {
            (num * pow10(shift as u32), den)
        } else {
            (num, den * pow10((-shift) as u32))
        };
        let (q, r) = n.div_rem(&d);
        // Non-terminating, so the remainder is never zero; fold it into a
        // sticky digit for correct half-even rounding.
        let sticky = if r.is_zero() { BigInt::zero() } else { BigInt::one() };
        let sticky = if n.is_negative() { -sticky } else { sticky };
        let q = q * 10 + sticky;
        Self::round_mantissa(q, -(shift as i32) - 1, DIV_PRECISION)
    }

    fn round_mantissa(m: BigInt, exponent: i32, digits: u32) -> Self {
        let have = digit_count(&m);
        if have <= digits {
            return Self::normalized(m, exponent);
        }
        let drop = have - digits;
        let p = pow10(drop);
        let negative = m.is_negative();
        let (q, r) = m.abs().div_rem(&p);
        let half = &p / 2;
        let q = match r.cmp(&half) {
            Ordering::Greater => q + 1,
            Ordering::Less => q,
            Ordering::Equal => {
                if q.is_odd() {
                    q + 1
                } else {
                    q
                }
            }
        };
        let q = if negative { -q } else { q };
        Self::normalized(q, exponent + drop as i32)
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, DecimalError> {
        if other.is_zero() {
            return Err(DecimalError::DivisionByZero);
        }
        let r = self.to_rational() / other.to_rational();
        Ok(Self::from_rational(&r))
    }

    pub fn mul_rational(&self, r: &BigRational) -> Self {
        Self::from_rational(&(self.to_rational() * r))
    }

    pub fn to_f64(&self) -> f64 {
        self.to_string().parse().unwrap_or(f64::NAN)
    }

    /// Integer value when the decimal has no fractional part and fits.
    pub fn to_i64(&self) -> Option<i64> {
        if self.exponent < 0 {
            return None;
        }
        (&self.mantissa * pow10(self.exponent as u32)).to_i64()
    }
}

impl From<i64> for Decimal {
    fn from(v: i64) -> Self {
        Self::normalized(BigInt::from(v), 0)
    }
}

impl FromStr for Decimal {
    type Err = DecimalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DecimalError::Invalid(s.to_string());
        let t = s.trim();
        let (body, exp) = match t.find(['e', 'E']) {
            Some(i) => {
                let e: i32 = t[i + 1..].parse().map_err(|_| bad())?;
                (&t[..i], e)
            }
            None => (t, 0),
        };
        let (negative, body) = match body.as_bytes().first() {
            Some(b'-') => (true, &body[1..]),
            Some(b'+') => (false, &body[1..]),
            _ => (false, body),
        };
        let (int, frac) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let mut m: BigInt = digits.parse().map_err(|_| bad())?;
        if negative {
            m = -m;
        }
        Ok(Self::normalized(m, exp - frac.len() as i32))
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.is_negative() { "-" } else { "" };
        let digits = self.mantissa.abs().to_string();
        if self.exponent >= 0 {
            write!(f, "{sign}{digits}{}", "0".repeat(self.exponent as usize))
        } else {
            let frac_len = (-self.exponent) as usize;
            if digits.len() > frac_len {
                let (i, r) = digits.split_at(digits.len() - frac_len);
                write!(f, "{sign}{i}.{r}")
            } else {
                write!(f, "{sign}0.{}{digits}", "0".repeat(frac_len - digits.len()))
            }
        }
    }
}

impl PartialOrd for Decimal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Decimal {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl Add for &Decimal {
    type Output = Decimal;
    fn add(self, rhs: &Decimal) -> Decimal {
        let (a, b, e) = self.aligned(rhs);
        Decimal::normalized(a + b, e)
    }
}

impl Sub for &Decimal {
    type Output = Decimal;
    fn sub(self, rhs: &Decimal) -> Decimal {
        let (a, b, e) = self.aligned(rhs);
        Decimal::normalized(a - b, e)
    }
}

impl Mul for &Decimal {
    type Output = Decimal;
    fn mul(self, rhs: &Decimal) -> Decimal {
        Decimal::normalized(&self.mantissa * &rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Neg for &Decimal {
    type Output = Decimal;
    fn neg(self) -> Decimal {
        Decimal { mantissa: -&self.mantissa, exponent: self.exponent }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Decimal {
            type Output = Decimal;
            fn $m(self, rhs: Decimal) -> Decimal {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Decimal {
    type Output = Decimal;
    fn neg(self) -> Decimal {
        -&self
    }
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(s: &str) -> Decimal {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(d("0").to_string(), "0");
        assert_eq!(d("-0.000").to_string(), "0");
        assert_eq!(d("12.500").to_string(), "12.5");
        assert_eq!(d("1.5e3").to_string(), "1500");
        assert_eq!(d("-0.0012").to_string(), "-0.0012");
        assert_eq!(d(".5").to_string(), "0.5");
        assert!("1.2.3".parse::<Decimal>().is_err());
        assert!("".parse::<Decimal>().is_err());
        assert!("abc".parse::<Decimal>().is_err());
    }

    #[test]
    fn equality_ignores_trailing_zeros() {
        assert_eq!(d("1.0"), d("1"));
        assert_eq!(d("100"), Decimal::new(1, 2));
    }

    #[test]
    fn terminating_division_is_exact() {
        assert_eq!(d("6").checked_div(&d("2")).unwrap(), d("3"));
        assert_eq!(d("1").checked_div(&d("8")).unwrap(), d("0.125"));
        assert_eq!(d("576.3").checked_div(&d("2")).unwrap(), d("288.15"));
    }

    #[test]
    fn non_terminating_division_rounds() {
        let third = d("1").checked_div(&d("3")).unwrap();
        assert_eq!(third.to_string(), format!("0.{}", "3".repeat(34)));
        let two_thirds = d("2").checked_div(&d("3")).unwrap();
        assert_eq!(two_thirds.to_string(), format!("0.{}7", "6".repeat(33)));
        let neg = d("-2").checked_div(&d("3")).unwrap();
        assert_eq!(neg, -two_thirds);
    }

    #[test]
    fn divide_by_zero() {
        assert_eq!(d("1").checked_div(&Decimal::zero()), Err(DecimalError::DivisionByZero));
    }

    #[test]
    fn ordering() {
        assert!(d("-1") < d("0.5"));
        assert!(d("10") > d("9.999"));
    }

    proptest! {
        #[test]
        fn add_sub_inverse(a in -1_000_000i64..1_000_000, ea in -6i32..6, b in -1_000_000i64..1_000_000, eb in -6i32..6) {
            let x = Decimal::new(a, ea);
            let y = Decimal::new(b, eb);
            prop_assert_eq!(&(&x + &y) - &y, x.clone());
            prop_assert_eq!(x.to_string().parse::<Decimal>().unwrap(), x);
        }

        #[test]
        fn mul_div_inverse(a in -1_000_000i64..1_000_000, ea in -6i32..6, b in 1i64..1_000, eb in -3i32..3) {
            let x = Decimal::new(a, ea);
            let y = Decimal::new(b, eb);
            // Exact because x*y/y has the same terminating expansion as x.
            prop_assert_eq!((&x * &y).checked_div(&y).unwrap(), x);
        }
    }
}

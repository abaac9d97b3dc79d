//! Exact rational scalar used for every size, value, cost and gain.
//!
//! `Rat` wraps an arbitrary-precision `BigRational`, which is always kept in
//! lowest terms with a positive denominator. Floats only enter through the
//! explicit grid-rounding constructors.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

/// Rejected decimal or fraction literal.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct RatParseError(pub String);

impl Rat {
    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den`, reduced. Panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Rat(BigRational::new(num, den))
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

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Rat {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rat(self.0.recip())
    }

    /// Powers of a fraction in lowest terms stay in lowest terms, so no
    /// reduction is needed.
    pub fn pow(&self, exp: u32) -> Rat {
        let e = exp as usize;
        let n = num_traits::pow(self.numer().clone(), e);
        let d = num_traits::pow(self.denom().clone(), e);
        Rat(BigRational::new_raw(n, d))
    }

    /// Approximate base-2 logarithm of a positive value.
    pub fn log2_approx(&self) -> f64 {
        fn log2_int(x: &BigInt) -> f64 {
            let shift = x.bits().saturating_sub(64);
            (x >> shift).to_f64().unwrap_or(f64::NAN).log2() + shift as f64
        }
        log2_int(self.numer()) - log2_int(self.denom())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn min(self, other: Rat) -> Rat {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Rat) -> Rat {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Nearest `f64`; may lose precision, never used for decisions.
    pub fn to_f64(&self) -> f64 {
        if let Some(v) = self.0.to_f64() {
            if v.is_finite() {
                return v;
            }
        }
        // Huge numerators and denominators overflow the direct conversion;
        // shift both down to 64 significant bits first.
        let n = self.numer();
        let d = self.denom();
        let shift_n = n.bits().saturating_sub(64);
        let shift_d = d.bits().saturating_sub(64);
        let nf = (n >> shift_n).to_f64().unwrap_or(f64::NAN);
        let df = (d >> shift_d).to_f64().unwrap_or(f64::NAN);
        let exp = shift_n as i64 - shift_d as i64;
        (nf / df) * 2f64.powi(exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }

    /// Exact binary value of a finite float.
    pub fn from_f64_exact(x: f64) -> Option<Rat> {
        BigRational::from_float(x).map(Rat)
    }

    /// Largest multiple of `1/den` not above `x`.
    pub fn floor_to_grid(x: f64, den: u64) -> Option<Rat> {
        let exact = Rat::from_f64_exact(x)?;
        Some(exact.floor_to(den))
    }

    /// Smallest multiple of `1/den` not below `x`.
    pub fn ceil_to_grid(x: f64, den: u64) -> Option<Rat> {
        let exact = Rat::from_f64_exact(x)?;
        Some(exact.ceil_to(den))
    }

    /// Round down to a multiple of `1/den`.
    pub fn floor_to(&self, den: u64) -> Rat {
        let d = BigInt::from(den);
        let scaled = &self.0 * BigRational::from_integer(d.clone());
        Rat(BigRational::new(scaled.floor().to_integer(), d))
    }

    /// Round up to a multiple of `1/den`.
    pub fn ceil_to(&self, den: u64) -> Rat {
        let d = BigInt::from(den);
        let scaled = &self.0 * BigRational::from_integer(d.clone());
        Rat(BigRational::new(scaled.ceil().to_integer(), d))
    }

    /// Exact decimal expansion when the denominator has only factors 2 and 5.
    pub fn to_exact_decimal(&self) -> Option<String> {
        let mut d = self.denom().clone();
        let two = BigInt::from(2u32);
        let five = BigInt::from(5u32);
        let (mut twos, mut fives) = (0usize, 0usize);
        while (&d % &two).is_zero() {
            d /= &two;
            twos += 1;
        }
        while (&d % &five).is_zero() {
            d /= &five;
            fives += 1;
        }
        if !d.is_one() {
            return None;
        }
        let digits = twos.max(fives);
        let s = self.to_decimal(digits);
        if digits == 0 {
            return Some(s);
        }
        Some(s.trim_end_matches('0').trim_end_matches('.').to_string())
    }

    /// Fixed-point rendering with `digits` fractional digits (truncated toward zero).
    pub fn to_decimal(&self, digits: usize) -> String {
        let neg = self.is_negative();
        let abs = self.0.abs();
        let scale = BigInt::from(10u32).pow(digits as u32);
        let scaled = (abs * BigRational::from_integer(scale.clone())).floor().to_integer();
        let int_part = &scaled / &scale;
        let frac_part = &scaled % &scale;
        let sign = if neg && !scaled.is_zero() { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = digits)
        }
    }
}

impl fmt::Display for Rat {
    /// `p/q`, or `p` when the denominator is 1.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = RatParseError;

    /// Accepts `p/q`, plain integers, and decimals with an optional exponent
    /// (`0.25`, `-3`, `1e6`, `2.5E-3`). Parsing is exact.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || RatParseError(s.to_string());
        let t = s.trim();
        if t.is_empty() {
            return Err(err());
        }
        if let Some((p, q)) = t.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            return Ok(Rat(BigRational::new(p, q)));
        }
        let (mantissa, exponent) = match t.find(['e', 'E']) {
            Some(pos) => {
                let e: i32 = t[pos + 1..].parse().map_err(|_| err())?;
                (&t[..pos], e)
            }
            None => (t, 0),
        };
        let (neg, digits) = match mantissa.as_bytes().first() {
            Some(b'-') => (true, &mantissa[1..]),
            Some(b'+') => (false, &mantissa[1..]),
            _ => (false, mantissa),
        };
        let (int_part, frac_part) = match digits.split_once('.') {
            Some((i, f)) => (i, f),
            None => (digits, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let all_digits = format!("{int_part}{frac_part}");
        let mut num: BigInt = all_digits.parse().map_err(|_| err())?;
        if neg {
            num = -num;
        }
        let scale = exponent - frac_part.len() as i32;
        let ten = BigInt::from(10u32);
        let value = if scale >= 0 {
            BigRational::from_integer(num * ten.pow(scale as u32))
        } else {
            BigRational::new(num, ten.pow((-scale) as u32))
        };
        Ok(Rat(value))
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_integer(n)
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Self {
        Rat(BigRational::from_integer(n))
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident) => {
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $tr<Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $tr<&'b Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: &'b Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl AddAssign<Rat> for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl SubAssign<Rat> for Rat {
    fn sub_assign(&mut self, rhs: Rat) {
        self.0 -= rhs.0;
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        let mut acc = Rat::zero();
        for x in iter {
            acc += x;
        }
        acc
    }
}

/// Compare `a/b` with `c/d` for positive `b`, `d` without dividing.
pub fn cmp_ratio(a: &Rat, b: &Rat, c: &Rat, d: &Rat) -> Ordering {
    (a * d).cmp(&(c * b))
}

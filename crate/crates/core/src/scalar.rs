//! Scalar abstraction shared by the polynomial and competition-function code.
//!
//! Everything that only needs field arithmetic is written against [`Scalar`],
//! so the same construction runs in `f64`, `f32` or exact [`Rational`]
//! arithmetic. Root finding and simulation work in `f64`.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Arbitrary-precision rational, the exact scalar.
pub type Rational = BigRational;

/// Field-like scalar usable by the exact and floating-point code paths.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    /// True when arithmetic is exact (no rounding).
    const EXACT: bool;

    fn to_f64(&self) -> f64;

    /// Converts a float. For rationals this is the exact binary value.
    fn from_f64_lossy(v: f64) -> Self;

    /// `n / d` in this scalar type.
    fn ratio(n: i64, d: i64) -> Self {
        Self::from_i64(n).expect("i64 fits") / Self::from_i64(d).expect("i64 fits")
    }

    fn from_usize_exact(n: usize) -> Self {
        Self::from_usize(n).expect("usize fits")
    }

    /// Zero test used for degeneracy detection: exact for rationals, an
    /// absolute threshold for floats.
    fn is_negligible(&self, abs_tol: f64) -> bool;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64_lossy(v: f64) -> Self {
        v
    }

    fn is_negligible(&self, abs_tol: f64) -> bool {
        self.abs() < abs_tol
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }

    fn from_f64_lossy(v: f64) -> Self {
        v as f32
    }

    fn is_negligible(&self, abs_tol: f64) -> bool {
        // f32 cannot resolve below its own epsilon.
        f64::from(self.abs()) < abs_tol.max(f64::from(f32::EPSILON))
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64_lossy(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(Zero::zero)
    }

    fn ratio(n: i64, d: i64) -> Self {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn is_negligible(&self, _abs_tol: f64) -> bool {
        self.is_zero()
    }
}

/// Parses `"3"`, `"-7/6"`, `"0.9"` or `"1e-3"` into an exact rational.
///
/// Decimal strings are read digit by digit, so `"0.9"` becomes exactly 9/10.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let s = text.trim();
    let bad = || Error::InvalidArgument(format!("cannot parse {text:?} as a rational"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(&all_digits).map_err(|_| bad())?);
    let shift = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    if shift >= 0 {
        value *= scale;
    } else {
        value /= scale;
    }
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Binomial coefficient `C(n, k)` as an exact integer.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `C(n, k)` as a scalar.
pub fn binomial_scalar<T: Scalar>(n: usize, k: usize) -> T {
    T::from_u128(binomial(n, k)).expect("binomial fits")
}

/// Integer power by repeated multiplication (works for every [`Scalar`]).
pub fn powi<T: Scalar>(base: &T, exp: usize) -> T {
    let mut acc = T::one();
    for _ in 0..exp {
        acc = acc * base.clone();
    }
    acc
}

pub(crate) fn one<T: Scalar>() -> T {
    One::one()
}

pub(crate) fn zero<T: Scalar>() -> T {
    Zero::zero()
}

//! Weight scalars.
//!
//! Team weights, compiled real terms and SO function tables are generic over
//! [`Scalar`]. The exact instance is [`Rational`]; `f64`/`f32` are used by the
//! numeric solver and for quick experiments.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, ToPrimitive, Zero};

/// Arbitrary-precision rational.
pub type Rational = BigRational;

/// A numeric weight type usable throughout the team algebra.
pub trait Scalar:
    Num + Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Whether arithmetic on this type is exact.
    const EXACT: bool;

    fn from_rational(r: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    /// Equality used by atom semantics: exact for rationals, relative
    /// tolerance for floats.
    fn approx_eq(&self, other: &Self) -> bool;

    /// `-x * log2(x)` with `0 log 0 = 0`; `None` when the type cannot
    /// represent the result (exact rationals).
    fn neg_xlog2x(&self) -> Option<Self>;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    fn from_usize(n: usize) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }
}

const FLOAT_REL_TOL: f64 = 1e-12;

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn neg_xlog2x(&self) -> Option<Self> {
        if self.is_zero() || self.is_one() {
            Some(Self::zero())
        } else {
            None
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn approx_eq(&self, other: &Self) -> bool {
        let scale = self.abs().max(other.abs()).max(1.0);
        (self - other).abs() <= FLOAT_REL_TOL * scale
    }

    fn neg_xlog2x(&self) -> Option<Self> {
        if *self <= 0.0 {
            Some(0.0)
        } else {
            Some(-self * self.log2())
        }
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f32(r).unwrap_or(f32::NAN)
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }

    fn approx_eq(&self, other: &Self) -> bool {
        let scale = self.abs().max(other.abs()).max(1.0);
        (self - other).abs() <= 1e-5 * scale
    }

    fn neg_xlog2x(&self) -> Option<Self> {
        if *self <= 0.0 {
            Some(0.0)
        } else {
            Some(-self * self.log2())
        }
    }
}

/// Parses `"p/q"`, integers and plain decimals (`"0.25"`, `"1e-3"`) into an
/// exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().ok()?);
    let shift = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= num_traits::pow(ten, shift as usize);
    } else {
        value /= num_traits::pow(ten, (-shift) as usize);
    }
    if negative {
        value = -value;
    }
    Some(value)
}

/// Renders a rational as `p/q` (or `p` for integers).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// by continued-fraction convergents and semiconvergents.
pub fn rationalize(x: f64, max_den: u64) -> Rational {
    if !x.is_finite() {
        return Rational::zero();
    }
    let negative = x < 0.0;
    let target = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    let mut frac = target;
    let max_den = u128::from(max_den.max(1));
    loop {
        let a = frac.floor();
        if a > 1e18 {
            break;
        }
        let a_int = a as u128;
        let q2 = a_int * q1 + q0;
        if q2 > max_den {
            // best semiconvergent within the cap
            let k = (max_den - q0) / q1.max(1);
            let (ps, qs) = (k * p1 + p0, k * q1 + q0);
            let err_semi = (ps as f64 / qs as f64 - target).abs();
            let err_conv = (p1 as f64 / q1.max(1) as f64 - target).abs();
            if q1 == 0 || (qs > 0 && err_semi < err_conv) {
                p1 = ps;
                q1 = qs;
            }
            break;
        }
        let p2 = a_int * p1 + p0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let rem = frac - a;
        if rem < 1e-15 {
            break;
        }
        frac = 1.0 / rem;
    }
    let r = Rational::new(BigInt::from(p1), BigInt::from(q1.max(1)));
    if negative {
        -r
    } else {
        r
    }
}

/// Converts an `f64` to an exact rational (binary expansion).
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_f64(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/3"), Some(q(1, 3)));
        assert_eq!(parse_rational("0.25"), Some(q(1, 4)));
        assert_eq!(parse_rational("2"), Some(q(2, 1)));
        assert_eq!(parse_rational("1e-3"), Some(q(1, 1000)));
        assert_eq!(parse_rational("-0.5"), Some(q(-1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn rationalize_recovers_small_fractions() {
        assert_eq!(rationalize(1.0 / 3.0, 1_000_000), q(1, 3));
        assert_eq!(rationalize(0.142857142857, 1_000_000), q(1, 7));
        assert_eq!(rationalize(-0.75, 100), q(-3, 4));
        assert_eq!(rationalize(1e-12, 1_000_000), q(0, 1));
        let pi = rationalize(std::f64::consts::PI, 1000);
        assert_eq!(pi, q(355, 113));
    }

    #[test]
    fn float_approx_eq_is_relative() {
        assert!(Scalar::approx_eq(&1.0f64, &(1.0 + 1e-14)));
        assert!(!Scalar::approx_eq(&1.0f64, &1.001));
        assert!(Scalar::approx_eq(&q(1, 3), &q(2, 6)));
    }
}

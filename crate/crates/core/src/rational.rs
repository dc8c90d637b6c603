//! Exact rational scalars, literal parsing and extended values.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use malachite_base::num::arithmetic::traits::{self as arith, Pow};
use malachite_base::num::basic::traits::{One, Zero};
use malachite_base::num::conversion::traits::{IsInteger, RoundingFrom};
use malachite_base::rounding_modes::RoundingMode;
use malachite_nz::integer::Integer;

use crate::error::Error;

/// The exact scalar type used throughout the crate.
///
/// Small numerators and denominators are stored inline, which keeps the
/// gcd normalisation after each operation cheap.
pub type Rational = malachite_q::Rational;

pub fn int(n: i64) -> Rational {
    Rational::from(n)
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::from_signeds(p, q)
}

/// Ring operations shared by `f64` and [`Rational`], enough for the homotopies.
pub trait Scalar:
    Clone + PartialOrd + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        <Rational as Zero>::ZERO
    }
    fn one() -> Self {
        <Rational as One>::ONE
    }
    fn is_zero(&self) -> bool {
        *self == <Rational as Zero>::ZERO
    }
}

/// Sign tests, rounding and integer extraction on [`Rational`].
pub trait RationalExt: Sized {
    fn is_positive(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn abs(&self) -> Self;
    fn floor(&self) -> Self;
    fn ceil(&self) -> Self;
    fn is_integer(&self) -> bool;
    /// The value as an `i64`, if it is an integer in range.
    fn to_i64(&self) -> Option<i64>;
}

impl RationalExt for Rational {
    fn is_positive(&self) -> bool {
        *self > 0u32
    }
    fn is_negative(&self) -> bool {
        *self < 0u32
    }
    fn abs(&self) -> Self {
        arith::Abs::abs(self)
    }
    fn floor(&self) -> Self {
        Rational::from(arith::Floor::floor(self))
    }
    fn ceil(&self) -> Self {
        Rational::from(arith::Ceiling::ceiling(self))
    }
    fn is_integer(&self) -> bool {
        IsInteger::is_integer(self)
    }
    fn to_i64(&self) -> Option<i64> {
        i64::try_from(self).ok()
    }
}

fn parse_integer(text: &str) -> Option<Integer> {
    let t = text.trim();
    let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let n = Integer::from_str(digits).ok()?;
    Some(if t.starts_with('-') { -n } else { n })
}

/// Parses an exact rational literal.
///
/// Accepted forms are integers (`-3`), fractions (`7/4`, `-1/2`) and finite
/// decimals (`0.125`, `-2.5`). Decimals are converted exactly.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational literal: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let p = parse_integer(num).ok_or_else(bad)?;
        let q = parse_integer(den).ok_or_else(bad)?;
        if q == 0u32 {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::from_integers(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let mantissa = parse_integer(&format!("{digits}{frac}")).ok_or_else(bad)?;
        let scale = Integer::from(10u32).pow(frac.len() as u64);
        let value = Rational::from_integers(mantissa, scale);
        return Ok(if negative { -value } else { value });
    }
    Ok(Rational::from(parse_integer(s).ok_or_else(bad)?))
}

/// Parses a comma-separated list of rational literals.
pub fn parse_rational_list(text: &str) -> Result<Vec<Rational>, Error> {
    text.split(',').map(parse_rational).collect()
}

/// Nearest `f64`; values beyond the finite range become infinities.
pub fn to_f64(q: &Rational) -> f64 {
    let (x, order) = f64::rounding_from(q, RoundingMode::Nearest);
    if x.abs() == f64::MAX && order != Ordering::Equal {
        // ties at MAX + ulp/2 round to even, which is the infinity
        let limit =
            Rational::from((Integer::from(1u32) << 1024u64) - (Integer::from(1u32) << 970u64));
        if q.abs() >= limit {
            return x.signum() * f64::INFINITY;
        }
    }
    x
}

/// Exact conversion of a finite float (every finite `f64` is a dyadic rational).
pub fn from_f64(x: f64) -> Result<Rational, Error> {
    Rational::try_from(x).map_err(|_| Error::BadParameter(format!("non-finite value {x}")))
}

/// Rounds `x` down to a multiple of `precision`.
pub fn round_down(x: f64, precision: &Rational) -> Option<Rational> {
    let q = Rational::try_from(x).ok()?;
    Some((q / precision).floor() * precision)
}

/// Rounds `x` up to a multiple of `precision`.
pub fn round_up(x: f64, precision: &Rational) -> Option<Rational> {
    let q = Rational::try_from(x).ok()?;
    Some((q / precision).ceil() * precision)
}

/// Default outward-rounding precision, 2^-40.
pub fn default_precision() -> Rational {
    ratio(1, 1 << 40)
}

/// A rational extended by the two infinities, used for empty suprema and infima.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Extended {
    NegInfinity,
    Finite(Rational),
    PosInfinity,
}

impl Extended {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Extended::Finite(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Extended::NegInfinity => f64::NEG_INFINITY,
            Extended::Finite(q) => to_f64(q),
            Extended::PosInfinity => f64::INFINITY,
        }
    }
}

impl From<Rational> for Extended {
    fn from(q: Rational) -> Self {
        Extended::Finite(q)
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        use Extended::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (NegInfinity, NegInfinity) | (PosInfinity, PosInfinity) => Ordering::Equal,
            (NegInfinity, _) | (_, PosInfinity) => Ordering::Less,
            (_, NegInfinity) | (PosInfinity, _) => Ordering::Greater,
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::NegInfinity => f.write_str("-inf"),
            Extended::Finite(q) => write!(f, "{q}"),
            Extended::PosInfinity => f.write_str("inf"),
        }
    }
}

/// Joins rationals with `sep` using the canonical `p/q` form.
pub fn join(values: &[Rational], sep: &str) -> String {
    values
        .iter()
        .map(|q| q.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

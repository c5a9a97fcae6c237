//! Numeric backends.
//!
//! Every algorithm in the crate is generic over [`Scalar`], which is
//! implemented for exact arbitrary-precision rationals ([`Rational`]) and for
//! `f64`. Identities are checked on the exact backend; the float backend is
//! for sampling and quick estimates.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational backend. Always reduced with a positive denominator.
pub type Rational = BigRational;

/// Tolerance for a float distribution's mass sum before renormalization.
pub const FLOAT_SUM_TOLERANCE: f64 = 1e-12;

/// Residuals at or below this magnitude are treated as zero when building
/// plans on the float backend.
pub const FLOAT_SNAP_TOLERANCE: f64 = 1e-12;

pub trait Scalar: Signed + Clone + PartialOrd + Debug + Display + Send + Sync + 'static {
    /// True for the exact rational backend.
    const EXACT: bool;

    fn from_int(v: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Exact backend: `self == 0`. Float backend: `|self| <= tol`.
    fn is_negligible(&self, tol: f64) -> bool;

    fn is_finite_value(&self) -> bool;

    /// Whether a mass total is acceptable as 1 for this backend.
    fn sum_is_one(sum: &Self) -> bool;

    /// Strictly greater than zero. (`Signed::is_positive` treats `+0.0` as
    /// positive on floats.)
    fn gt_zero(&self) -> bool {
        *self > Self::zero()
    }

    /// Strictly less than zero.
    fn lt_zero(&self) -> bool {
        *self < Self::zero()
    }

    /// Clamp float round-off to zero; identity on the exact backend.
    fn snap(self) -> Self {
        if self.is_negligible(FLOAT_SNAP_TOLERANCE) {
            Self::zero()
        } else {
            self
        }
    }

    /// Total order over finite values.
    fn cmp_total(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn is_finite_value(&self) -> bool {
        true
    }

    fn sum_is_one(sum: &Self) -> bool {
        *sum == Rational::from_int(1)
    }

    fn cmp_total(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }

    fn sum_is_one(sum: &Self) -> bool {
        (sum - 1.0).abs() <= FLOAT_SUM_TOLERANCE
    }

    fn cmp_total(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }
}

/// Build `num / den` as an exact rational.
///
/// Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parse `"p/q"`, an integer, or a decimal (optionally with an exponent,
/// e.g. `"-1.25e-3"`) into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let err = || Error::Parse(text.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = s.split_once('/') {
        let num: BigInt = p.trim().parse().map_err(|_| err())?;
        let den: BigInt = q.trim().parse().map_err(|_| err())?;
        if !den.is_positive() {
            return Err(err());
        }
        return Ok(Rational::new(num, den));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().map_err(|_| err())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().map_err(|_| err())?);
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 10_000 {
        return Err(err());
    }
    let power = Rational::from_integer(num_traits::pow(BigInt::from(10), scale.unsigned_abs() as usize));
    if scale >= 0 {
        value *= power;
    } else {
        value /= power;
    }
    Ok(if negative { -value } else { value })
}

/// Render an exact rational as `"p/q"`, or `"p"` for integers.
pub fn rational_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Render `r` in decimal with `digits` significant digits, rounding half
/// away from zero. Trailing fractional zeros are dropped; magnitudes outside
/// `[1e-6, 1e21)` use exponent notation, e.g. `"1.25e-9"`.
///
/// Panics if `digits == 0`.
pub fn decimal_string(r: &Rational, digits: usize) -> String {
    assert!(digits > 0, "need at least one significant digit");
    if r.is_zero() {
        return "0".to_string();
    }
    let negative = r.is_negative();
    let mag = r.abs();
    let pow10 = |e: i64| -> Rational {
        let p = Rational::from_integer(num_traits::pow(BigInt::from(10), e.unsigned_abs() as usize));
        if e >= 0 {
            p
        } else {
            p.recip()
        }
    };

    // 10^e <= mag < 10^(e+1)
    let mut e = mag.numer().to_string().len() as i64 - mag.denom().to_string().len() as i64;
    while pow10(e) > mag {
        e -= 1;
    }
    while pow10(e + 1) <= mag {
        e += 1;
    }

    let shift = digits as i64 - 1 - e;
    let scaled = &mag * pow10(shift);
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    let mut int = (scaled + half).floor().to_integer();
    if int >= num_traits::pow(BigInt::from(10), digits) {
        int /= 10;
        e += 1;
    }
    let body = int.to_string();
    debug_assert_eq!(body.len(), digits);

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if (-6..21).contains(&e) {
        let point = e + 1;
        if point <= 0 {
            out.push_str("0.");
            out.push_str(&"0".repeat((-point) as usize));
            out.push_str(body.trim_end_matches('0'));
        } else if point as usize >= body.len() {
            out.push_str(&body);
            out.push_str(&"0".repeat(point as usize - body.len()));
        } else {
            let (head, tail) = body.split_at(point as usize);
            out.push_str(head);
            let tail = tail.trim_end_matches('0');
            if !tail.is_empty() {
                out.push('.');
                out.push_str(tail);
            }
        }
    } else {
        let (head, tail) = body.split_at(1);
        out.push_str(head);
        let tail = tail.trim_end_matches('0');
        if !tail.is_empty() {
            out.push('.');
            out.push_str(tail);
        }
        out.push_str(&format!("e{e}"));
    }
    out
}

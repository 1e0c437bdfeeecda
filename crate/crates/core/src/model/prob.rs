//! Probability values in exact-rational or binary64 form.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on row sums in float mode.
pub const FLOAT_SUM_TOLERANCE: f64 = 1e-12;

/// Numeric mode of a model or a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumericMode {
    Exact,
    Float,
}

/// A probability, either an exact rational or a float.
#[derive(Debug, Clone, PartialEq)]
pub enum Probability {
    Exact(BigRational),
    Float(f64),
}

impl Probability {
    pub fn zero() -> Self {
        Probability::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Probability::Exact(BigRational::one())
    }

    /// Exact `num/den`. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Probability::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn mode(&self) -> NumericMode {
        match self {
            Probability::Exact(_) => NumericMode::Exact,
            Probability::Float(_) => NumericMode::Float,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Probability::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Probability::Exact(r) => Some(r),
            Probability::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Probability::Exact(r) => ratio_to_f64(r),
            Probability::Float(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Probability::Exact(r) => r.is_zero(),
            Probability::Float(x) => *x == 0.0,
        }
    }

    /// Whether the value lies in `[0, 1]`.
    pub fn in_unit_interval(&self) -> bool {
        match self {
            Probability::Exact(r) => !r.is_negative_value() && *r <= BigRational::one(),
            Probability::Float(x) => (0.0..=1.0).contains(x),
        }
    }

    /// `1 - self`, staying in the same mode.
    pub fn complement(&self) -> Self {
        match self {
            Probability::Exact(r) => Probability::Exact(BigRational::one() - r),
            Probability::Float(x) => Probability::Float(1.0 - x),
        }
    }

    /// Product; exact only if both operands are exact.
    pub fn mul(&self, other: &Probability) -> Self {
        match (self, other) {
            (Probability::Exact(a), Probability::Exact(b)) => Probability::Exact(a * b),
            _ => Probability::Float(self.to_f64() * other.to_f64()),
        }
    }

    /// Sum; exact only if both operands are exact.
    pub fn add(&self, other: &Probability) -> Self {
        match (self, other) {
            (Probability::Exact(a), Probability::Exact(b)) => Probability::Exact(a + b),
            _ => Probability::Float(self.to_f64() + other.to_f64()),
        }
    }

    /// Parses a probability literal: `"n/d"` or an integer is exact; a decimal
    /// such as `"0.25"` is a float.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if let Some(r) = parse_rational(t) {
            return Ok(Probability::Exact(r));
        }
        f64::from_str(t)
            .map(Probability::Float)
            .map_err(|_| Error::Parse(format!("not a probability literal: `{text}`")))
    }

    /// Parses and rejects anything that is not an exact rational.
    pub fn parse_exact(text: &str) -> Result<Self> {
        parse_rational(text.trim())
            .map(Probability::Exact)
            .ok_or_else(|| {
                Error::Probability(format!(
                    "`{text}` is not an exact rational (use n/d); decimals are rejected in exact mode"
                ))
            })
    }
}

trait NegativeCheck {
    fn is_negative_value(&self) -> bool;
}

impl NegativeCheck for BigRational {
    fn is_negative_value(&self) -> bool {
        *self < BigRational::zero()
    }
}

fn parse_rational(t: &str) -> Option<BigRational> {
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let is_int = |s: &str| {
        let digits = s.strip_prefix('-').unwrap_or(s);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !is_int(num) || !is_int(den) {
        return None;
    }
    let n = BigInt::from_str(num).ok()?;
    let d = BigInt::from_str(den).ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// Converts a rational to the nearest representable float, robust to huge
/// numerators and denominators.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if let Some(x) = r.to_f64() {
        if x.is_finite() {
            return x;
        }
    }
    // Scale both sides down to fit before dividing.
    let n = r.numer();
    let d = r.denom();
    let shift = n.bits().max(d.bits()).saturating_sub(1000);
    let n = (n >> shift as usize).to_f64().unwrap_or(0.0);
    let d = (d >> shift as usize).to_f64().unwrap_or(1.0);
    if d == 0.0 {
        0.0
    } else {
        n / d
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Probability::Exact(r) => write!(f, "{r}"),
            Probability::Float(x) => write!(f, "{x}"),
        }
    }
}

impl From<BigRational> for Probability {
    fn from(r: BigRational) -> Self {
        Probability::Exact(r)
    }
}

impl From<f64> for Probability {
    fn from(x: f64) -> Self {
        Probability::Float(x)
    }
}
